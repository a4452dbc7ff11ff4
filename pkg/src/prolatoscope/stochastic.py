"""Quantum fluctuations in the antinormally ordered c-number picture.

Every mode operator is replaced by a complex Gaussian variable whose X and Y
quadratures have variances 1/4 for coherent light and vacuum, or
exp(-2r)/4 and exp(2r)/4 for amplitude-squeezed light. Object-core modes
carry the fluctuations delta alpha_k; the wing modes, which are vacuum for a
finite object, carry delta beta_k. Reconstruction divides the pupil
amplitude by sqrt(lambda_k), so wing noise is amplified by
sqrt((1 - lambda_k) / lambda_k).

Each Monte Carlo trial draws from its own Philox stream keyed by
``(seed, trial_index)``. Trials therefore do not depend on execution order,
and an ensemble can be split across workers and merged by index.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np

from .fieldmodel import CoeffVector, phase_factors, project_coeffs
from .prolate import psi_table

PLANCK = 6.62607015e-34
LIGHT_SPEED = 2.99792458e8


@dataclass(frozen=True)
class NoiseModel:
    """Illumination state: ``"coherent"`` (r = 0) or ``"squeezed"``."""

    kind: str = "coherent"
    r: float = 0.0

    def __post_init__(self):
        if self.kind not in ("coherent", "squeezed"):
            raise ValueError(f"unknown noise model {self.kind!r}")
        if self.r < 0:
            raise ValueError("squeezing parameter must be >= 0")
        if self.kind == "coherent" and self.r != 0:
            raise ValueError("coherent light has r = 0")

    @classmethod
    def coherent(cls):
        return cls("coherent", 0.0)

    @classmethod
    def squeezed(cls, r):
        return cls("squeezed", float(r))

    @property
    def var_x(self):
        return math.exp(-2 * self.r) / 4

    @property
    def var_y(self):
        return math.exp(2 * self.r) / 4


@dataclass(frozen=True)
class NoiseDraw:
    dalpha: np.ndarray
    dbeta: np.ndarray

    @property
    def L(self):
        return len(self.dalpha)

    @classmethod
    def zero(cls, L):
        return cls(np.zeros(L, complex), np.zeros(L, complex))


def trial_generator(seed, trial_index):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial_index])))


def sample_draw(model, L, seed, trial_index):
    """Fluctuations for one trial.

    Standard normals are taken in a fixed order (mode ascending; alpha before
    beta; X before Y) and scaled by the quadrature standard deviations.
    """
    if L < 1:
        raise ValueError("need at least one mode")
    z = trial_generator(seed, trial_index).standard_normal((L, 4))
    sx, sy = math.sqrt(model.var_x), math.sqrt(model.var_y)
    dalpha = sx * z[:, 0] + 1j * sy * z[:, 1]
    dbeta = sx * z[:, 2] + 1j * sy * z[:, 3]
    return NoiseDraw(dalpha, dbeta)


def amplification(basis, L):
    """sqrt((1 - lambda_k)/lambda_k) for k < L, from the extended-precision eigenvalues."""
    out = np.empty(L)
    for k in range(L):
        lam = basis.modes[k].lam
        if float(lam) == 0.0:
            raise ValueError(
                f"lambda_{k} = {mpmath.nstr(lam, 5)} is below double range; use fewer modes (L <= {k})"
            )
        with mpmath.workprec(basis.precision_bits):
            out[k] = float(mpmath.sqrt((1 - lam) / lam))
    return out


def noisy_reconstruct(coeffs, basis, L, draw, gain=None):
    """alpha_k^(r) = a_k + delta alpha_k + sqrt((1-lambda_k)/lambda_k) delta beta_k."""
    if L > len(coeffs) or L > draw.L:
        raise ValueError("L exceeds the available coefficients or noise draw")
    gain = amplification(basis, L) if gain is None else gain
    vals = np.asarray(coeffs.values[:L]) + draw.dalpha[:L] + gain * draw.dbeta[:L]
    return CoeffVector(vals, "reconstructed")


@dataclass(frozen=True)
class Ensemble:
    """``trials`` reconstructed coefficient sets, row t from trial t."""

    coeffs: np.ndarray
    mean_coeffs: np.ndarray
    seed: int
    model: NoiseModel
    photons: float
    c: float

    @property
    def trials(self):
        return self.coeffs.shape[0]

    @property
    def L(self):
        return self.coeffs.shape[1]

    def trial(self, t):
        return CoeffVector(self.coeffs[t], "reconstructed")

    def spectra(self, basis, xi, quadrature="x"):
        """Reconstructed spectra, one row per trial.

        ``quadrature="x"`` keeps only the amplitude quadrature Re alpha_k^(r)
        of each mode (what a homodyne detector locked to the signal reads);
        ``"both"`` uses the full complex coefficients.
        """
        c = _select_quadrature(self.coeffs, quadrature)
        psi = psi_table(basis, xi, self.L)
        return (c * phase_factors(self.L)) @ psi

    def noise_free_spectrum(self, basis, xi):
        psi = psi_table(basis, xi, self.L)
        return (self.mean_coeffs * phase_factors(self.L)) @ psi

    def deviation(self, basis, xi, quadrature="x"):
        """Per-bin RMS deviation of the realizations from the noise-free
        spectrum, divided by sqrt(photons) so different budgets compare."""
        dev = self.spectra(basis, xi, quadrature) - self.noise_free_spectrum(basis, xi)
        return np.sqrt(np.mean(np.abs(dev) ** 2, axis=0) / self.photons)

    def summary(self, quadrature="x"):
        c = _select_quadrature(self.coeffs, quadrature)
        return {
            "mean_re": c.real.mean(axis=0),
            "mean_im": c.imag.mean(axis=0),
            "var_re": c.real.var(axis=0, ddof=1) if self.trials > 1 else np.zeros(self.L),
            "var_im": c.imag.var(axis=0, ddof=1) if self.trials > 1 else np.zeros(self.L),
        }


def _select_quadrature(coeffs, quadrature):
    if quadrature == "x":
        return coeffs.real.astype(complex)
    if quadrature == "both":
        return coeffs
    raise ValueError(f"quadrature must be 'x' or 'both', not {quadrature!r}")


def _trial_rows(model, L, seed, indices, a, gain):
    out = np.empty((len(indices), L), complex)
    sx, sy = math.sqrt(model.var_x), math.sqrt(model.var_y)
    for row, t in enumerate(indices):
        z = trial_generator(seed, t).standard_normal((L, 4))
        out[row] = a + sx * z[:, 0] + 1j * sy * z[:, 1] + gain * (sx * z[:, 2] + 1j * sy * z[:, 3])
    return out


def run_ensemble(obj, basis, L, model, trials, seed, workers=1):
    """Monte Carlo ensemble of noisy reconstructions of ``obj`` with L modes."""
    if trials < 1:
        raise ValueError("need at least one trial")
    a = project_coeffs(obj, basis, L).values
    gain = amplification(basis, L)
    if workers <= 1:
        rows = _trial_rows(model, L, seed, range(trials), a, gain)
    else:
        chunks = np.array_split(np.arange(trials), workers)
        with ThreadPoolExecutor(workers) as pool:
            parts = pool.map(lambda idx: _trial_rows(model, L, seed, idx, a, gain), chunks)
            rows = np.vstack(list(parts))
    return Ensemble(rows, a, seed, model, obj.photon_budget, basis.c)


def photons_from_power(power, wavelength, time):
    """Mean photon number delivered by ``power`` watts over ``time`` seconds."""
    if not (power > 0 and wavelength > 0 and time > 0):
        raise ValueError("power, wavelength and time must be positive")
    return power * time * wavelength / (PLANCK * LIGHT_SPEED)


def beamsplitter_energy_check(a, lam):
    """| |f_k|^2 + |g_k|^2 - |a_k|^2 | for the classical core/wing split.

    ``a`` and ``lam`` may be arrays; the mode index is their position.
    """
    a = np.asarray(a, dtype=complex)
    lam = np.asarray(lam, dtype=float)
    phase = phase_factors(a.size).reshape(a.shape) if a.ndim else 1.0
    f = phase * np.sqrt(lam) * a
    g = phase * np.sqrt(1 - lam) * a
    return np.abs(np.abs(f) ** 2 + np.abs(g) ** 2 - np.abs(a) ** 2)
