"""Prolate-spheroidal super-resolution toolkit: extended-precision prolate
bases, the classical forward/reconstruction model of a 1-D Fourier
microscope, c-number quantum-noise Monte Carlo and resolution metrics."""

from .basisfile import BasisFileError, basis_checksum, load_basis, save_basis
from .fieldmodel import (
    CoeffVector,
    FieldProfile,
    ObjectField,
    direct_spectrum,
    forward_image,
    forward_spectrum,
    make_double_gaussian,
    make_rect_source,
    make_sampled,
    project_coeffs,
    rayleigh_distance,
    reconstruct_object,
    reconstruct_spectrum,
)
from .metrics import (
    PsfProfile,
    SweepPoint,
    half_width,
    imaging_psf,
    noise_figure,
    reconstruction_psf,
    select_max_modes,
    snr_input,
    snr_reconstructed,
    superres_factor,
    sweep_S_vs_N,
)
from .prolate import (
    ProlateBasis,
    ProlateMode,
    build_basis,
    build_operator_matrix,
    compute_lambda,
    eval_chi,
    eval_phi,
    eval_psi,
    solve_eigenproblem,
)
from .special import legendre_P, spherical_bessel_j
from .stochastic import (
    Ensemble,
    NoiseDraw,
    NoiseModel,
    beamsplitter_energy_check,
    noisy_reconstruct,
    photons_from_power,
    run_ensemble,
    sample_draw,
)

__version__ = "0.1.0"
