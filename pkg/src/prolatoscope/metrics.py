"""Resolution metrics: imaging and reconstruction point-spread functions,
half-widths, signal-to-noise ratios, noise figure, the mode-count rule and
super-resolution sweeps over photon number."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .fieldmodel import make_rect_source, photon_integral, project_coeffs, uniform_grid
from .prolate import phi_table
from .stochastic import NoiseModel

PROBE_WIDTH = 1e-2
PSF_GRID = (-1.5, 1.5, 1e-3)
HALF_WIDTH_TOL = 1e-9


@dataclass(frozen=True)
class PsfProfile:
    """Point-spread function normalized to a unit peak at s = 0.

    ``func`` evaluates the same normalized profile at arbitrary points and
    lets :func:`half_width` refine the crossing beyond the grid spacing.
    """

    grid: np.ndarray
    values: np.ndarray
    func: Optional[Callable] = None

    @property
    def half_width(self):
        return half_width(self)


def _psf_grid(grid):
    return uniform_grid(*PSF_GRID) if grid is None else np.asarray(grid, dtype=float)


def imaging_psf(c, grid=None):
    """Coherent imaging PSF sin(cs)/(pi s), divided by its peak c/pi."""
    if not c > 0:
        raise ValueError("space-bandwidth product must be positive")

    def func(s):
        return np.sinc(c * np.asarray(s, dtype=float) / math.pi)

    if grid is None:
        # out to the third zero so the main lobe and first sidelobes are sampled
        grid = uniform_grid(-3 * math.pi / c, 3 * math.pi / c, PSF_GRID[2] / c)
    grid = np.asarray(grid, dtype=float)
    return PsfProfile(grid, func(grid), func)


def reconstruction_psf(basis, L, grid=None):
    """Reconstruction PSF for a point source at the origin with L modes,
    sum_{k<L} phi_k(0) phi_k(s), divided by its value at s = 0.

    The profile vanishes outside the core, where the modes are zero.
    """
    if not 1 <= L <= basis.num_modes:
        raise ValueError(f"L must lie in 1..{basis.num_modes}")
    w = phi_table(basis, [0.0], L)[:, 0]
    peak = float(w @ w)

    def func(s):
        s = np.asarray(s, dtype=float)
        return (w @ phi_table(basis, s.ravel(), L)).reshape(s.shape) / peak

    grid = _psf_grid(grid)
    return PsfProfile(grid, func(grid), func)


def reconstruction_psf_integral(basis, L, n=200):
    """Core integral of the un-normalized reconstruction PSF."""
    from .special import gauss_legendre

    x, wts = gauss_legendre(n)
    w = phi_table(basis, [0.0], L)[:, 0]
    return float((w @ phi_table(basis, x, L)) @ wts)


def half_width(profile, tol=HALF_WIDTH_TOL):
    """Distance from s = 0 to the first point where the profile falls to 1/2.

    The first grid interval on the positive side that brackets 1/2 is refined
    by bisection on ``profile.func`` when available, otherwise by linear
    interpolation of the samples.
    """
    g, v = profile.grid, profile.values
    start = int(np.searchsorted(g, 0.0))
    if start >= g.size:
        raise ValueError("profile grid has no points at s >= 0")
    above = v[start:] >= 0.5
    if not above[0]:
        raise ValueError("profile is below half maximum at s = 0")
    drops = np.flatnonzero(~above)
    if drops.size == 0:
        raise ValueError("profile does not fall to half maximum within the grid")
    i = start + drops[0]
    lo, hi = g[i - 1], g[i]
    if profile.func is None:
        vlo, vhi = v[i - 1], v[i]
        return float(lo + (vlo - 0.5) * (hi - lo) / (vlo - vhi))
    f = profile.func
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.5:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def snr_input(obj):
    """Input SNR for coherent light: the mean photon number of the object."""
    return photon_integral(obj)


def snr_reconstructed(coeffs, basis, L, model=NoiseModel()):
    """SNR of the L-mode reconstruction.

    Coherent: (sum |a_k|^2)^2 / sum(|a_k|^2 / lambda_k). Squeezed light
    scales the noise by the amplitude-quadrature factor exp(-2r).
    """
    if L > len(coeffs) or L > basis.num_modes:
        raise ValueError("L exceeds available coefficients or modes")
    a2 = np.abs(np.asarray(coeffs.values[:L])) ** 2
    # exact summation so that appending a zero coefficient leaves R unchanged
    signal = math.fsum(a2)
    if signal == 0:
        raise ValueError("all coefficients vanish; reconstructed SNR is undefined")
    lam = basis.lambdas[:L]
    if np.any(lam[a2 > 0] == 0):
        raise ValueError("an eigenvalue underflows double range; reduce L")
    with np.errstate(divide="ignore", invalid="ignore"):
        noise = math.fsum(np.where(a2 > 0, a2 / lam, 0.0))
    return float(signal * (signal / noise) * math.exp(2 * model.r))


def noise_figure(snr_in, snr_rec):
    if not snr_rec > 0:
        raise ValueError("reconstructed SNR must be positive")
    return snr_in / snr_rec


class Selection(NamedTuple):
    L_star: int
    reconstructable: bool


def select_max_modes(obj, basis, model=NoiseModel(), photons=None):
    """Largest L <= K whose reconstructed SNR is still >= 1.

    ``obj`` is rescaled to ``photons`` when given. L* = 0 with
    ``reconstructable=False`` means even a single mode is too noisy.
    """
    if photons is not None:
        obj = obj.scaled(photons)
    coeffs = project_coeffs(obj, basis)
    best = 0
    for L in range(1, basis.num_modes + 1):
        if not np.any(coeffs.values[:L]):
            continue
        if snr_reconstructed(coeffs, basis, L, model) >= 1:
            best = L
    return Selection(best, best > 0)


def superres_factor(basis, L, c=None, grid=None):
    """Super-resolution factor S = W / W_L; returns ``(S, W, W_L)``."""
    c = basis.c if c is None else c
    W = half_width(imaging_psf(c, grid))
    W_L = half_width(reconstruction_psf(basis, L, grid))
    return W / W_L, W, W_L


@dataclass(frozen=True)
class SweepPoint:
    photons: float
    model: NoiseModel
    L_star: int
    S: float
    W: float
    W_L: float


def sweep_S_vs_N(photon_list, models, basis, eps=PROBE_WIDTH):
    """S at the selected mode count for every (photon number, model) pair,
    using a centred rectangle of width ``eps`` as the point-source probe."""
    if len(photon_list) == 0 or len(models) == 0:
        raise ValueError("need at least one photon number and one model")
    probe = make_rect_source(1.0, eps)
    W = half_width(imaging_psf(basis.c))
    widths = {}
    points = []
    for model in models:
        for n in photon_list:
            L_star = select_max_modes(probe, basis, model, photons=n).L_star
            if L_star == 0:
                points.append(SweepPoint(float(n), model, 0, float("nan"), W, float("nan")))
                continue
            if L_star not in widths:
                widths[L_star] = half_width(reconstruction_psf(basis, L_star))
            W_L = widths[L_star]
            points.append(SweepPoint(float(n), model, L_star, W / W_L, W, W_L))
    return points
