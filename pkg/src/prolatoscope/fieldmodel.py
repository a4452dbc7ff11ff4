"""Classical object amplitudes, their prolate coefficients, the forward model
(pupil-plane spectrum and diffraction-limited image) and truncated
noise-free reconstruction.

Coordinates are dimensionless: the object occupies the core |s| <= 1 and the
pupil passes |xi| <= 1. The object amplitude is real and normalized so that
its squared integral equals the mean photon number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .prolate import phi_table, psi_table
from .special import gauss_legendre, integrate, integrate_checked

QUAD_NODES = 200
OBJECT_GRID = (-1.5, 1.5, 1e-3)
SPECTRUM_GRID = (-15.0, 15.0, 1e-2)
CLOSENESS_THRESHOLD = 0.05

# (-i)^k for k mod 4, exact in complex arithmetic
_PHASE = np.array([1.0, -1j, -1.0, 1j])


def uniform_grid(lo, hi, step):
    """Inclusive uniform grid; the point count is rounded, not floored."""
    n = int(round((hi - lo) / step)) + 1
    return np.linspace(lo, hi, n)


def default_object_grid():
    return uniform_grid(*OBJECT_GRID)


def default_spectrum_grid():
    return uniform_grid(*SPECTRUM_GRID)


def phase_factors(L):
    return _PHASE[np.arange(L) % 4]


@dataclass(frozen=True)
class DoubleGaussian:
    s0: float
    sigma: float
    amplitude: float

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        two_var = 2 * self.sigma**2
        return self.amplitude * (np.exp(-((s - self.s0) ** 2) / two_var) + np.exp(-((s + self.s0) ** 2) / two_var))


@dataclass(frozen=True)
class RectSource:
    eps: float
    height: float

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(np.abs(s) <= self.eps / 2, self.height, 0.0)


@dataclass(frozen=True)
class Sampled:
    grid: np.ndarray
    values: np.ndarray

    def __call__(self, s):
        return np.interp(s, self.grid, self.values, left=0.0, right=0.0)


ObjectSpec = Union[DoubleGaussian, RectSource, Sampled]


@dataclass(frozen=True)
class ObjectField:
    """Real object amplitude a(s) on the core, scaled to ``photon_budget``."""

    spec: ObjectSpec
    photon_budget: float

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(np.abs(s) <= 1, self.spec(s), 0.0)

    @property
    def symmetric(self):
        """True when a(-s) = a(s) by construction (or, for samples, to rounding)."""
        if isinstance(self.spec, Sampled):
            return bool(np.allclose(self.spec(-self.spec.grid), self.spec.values))
        return isinstance(self.spec, (DoubleGaussian, RectSource))

    def quadrature(self, n=QUAD_NODES):
        """Nodes and weights that integrate a(s) times a smooth function exactly
        enough: the support interval for the rectangle, per-panel rules for
        sampled data, the full core otherwise."""
        if isinstance(self.spec, RectSource):
            return gauss_legendre(n, -self.spec.eps / 2, self.spec.eps / 2)
        if isinstance(self.spec, Sampled):
            return _panel_rule(self.spec.grid)
        return gauss_legendre(n)

    def scaled(self, photons):
        """Same shape with a different photon budget."""
        if photons < 0:
            raise ValueError("photon budget must be non-negative")
        factor = math.sqrt(photons / self.photon_budget) if self.photon_budget else 0.0
        spec = self.spec
        if isinstance(spec, DoubleGaussian):
            spec = replace(spec, amplitude=spec.amplitude * factor)
        elif isinstance(spec, RectSource):
            spec = replace(spec, height=spec.height * factor)
        else:
            spec = Sampled(spec.grid, spec.values * factor)
        return ObjectField(spec, float(photons))


def _panel_rule(grid, per_panel=8):
    grid = np.clip(np.asarray(grid, dtype=float), -1.0, 1.0)
    edges = np.unique(np.concatenate([[-1.0], grid, [1.0]]))
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(per_panel, a, b)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def make_double_gaussian(photons, s0=0.5, sigma=0.1):
    """Two Gaussian peaks at +-s0 of width sigma carrying ``photons`` in total."""
    if not photons > 0:
        raise ValueError("photon budget must be positive")
    if not sigma > 0:
        raise ValueError("peak width must be positive")
    if not 0 <= s0 < 1:
        raise ValueError("half-separation must lie in [0, 1)")
    unit = DoubleGaussian(s0, sigma, 1.0)
    try:
        norm, _ = integrate_checked(lambda s: unit(s) ** 2, -1.0, 1.0, n=QUAD_NODES)
    except ArithmeticError as exc:
        raise ValueError(f"peak width {sigma} is under-resolved by the {QUAD_NODES}-node rule: {exc}") from None
    return ObjectField(replace(unit, amplitude=math.sqrt(photons / norm)), float(photons))


def make_rect_source(photons, eps):
    """Narrow rectangle of width ``eps`` centred at the origin."""
    if not 0 < eps <= 2:
        raise ValueError("rectangle width must satisfy 0 < eps <= 2")
    if photons < 0:
        raise ValueError("photon budget must be non-negative")
    return ObjectField(RectSource(eps, math.sqrt(photons / eps)), float(photons))


def make_sampled(grid, values, photons=None):
    """Object from samples, linearly interpolated and zero outside the grid.

    With ``photons`` given the samples are rescaled to that budget; otherwise
    the budget is the squared integral of the interpolant.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
        raise ValueError("grid and values must be matching 1-D arrays")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    if not np.all(np.isfinite(values)):
        raise ValueError("sample values must be finite")
    spec = Sampled(grid.copy(), values.copy())
    x, w = _panel_rule(grid)
    norm = float(np.dot(spec(x) ** 2, w))
    obj = ObjectField(spec, norm)
    return obj if photons is None else obj.scaled(photons)


@dataclass(frozen=True)
class CoeffVector:
    """Prolate-mode coefficients a_k (object), f_k (pupil) or a_k^(r)."""

    values: np.ndarray
    kind: str = "object"

    def __post_init__(self):
        if self.kind not in ("object", "pupil", "reconstructed"):
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("coefficients must be finite")

    @property
    def L(self):
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


@dataclass(frozen=True)
class FieldProfile:
    """Sampled field: object a(s), spectrum f(xi), image e(s) or reconstruction."""

    grid: np.ndarray
    values: np.ndarray
    meaning: str
    c: float = float("nan")
    L: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values differ in shape")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile values must be finite")


def project_coeffs(obj, basis, L=None):
    """a_k = integral of a(s) phi_k(s) over the core, k < L.

    For symmetric objects the odd coefficients are set to exactly zero rather
    than left at quadrature round-off.
    """
    L = basis.num_modes if L is None else L
    if L > basis.num_modes:
        raise ValueError(f"L={L} exceeds the {basis.num_modes} modes of the basis")
    x, w = obj.quadrature()
    vals = phi_table(basis, x, L) @ (obj(x) * w)
    if obj.symmetric:
        vals[1::2] = 0.0
    return CoeffVector(vals, "object")


def pupil_coeffs(coeffs, basis):
    """Classical pupil-plane mode amplitudes f_k = (-i)^k sqrt(lambda_k) a_k."""
    L = len(coeffs)
    return CoeffVector(phase_factors(L) * np.sqrt(basis.lambdas[:L]) * coeffs.values, "pupil")


def _series_spectrum(coeffs, basis, xi, L):
    psi = psi_table(basis, xi, L)
    return (phase_factors(L) * np.asarray(coeffs.values[:L])) @ psi


def forward_spectrum(coeffs, basis, xi=None):
    """Pupil-plane spectrum f(xi) = sum_k (-i)^k a_k psi_k(xi)."""
    if coeffs.kind != "object":
        raise ValueError("forward_spectrum expects object-side coefficients")
    xi = default_spectrum_grid() if xi is None else np.asarray(xi, dtype=float)
    vals = _series_spectrum(coeffs, basis, xi, len(coeffs))
    return FieldProfile(xi, vals, "spectrum", basis.c, len(coeffs), {"passband": 1.0})


def direct_spectrum(obj, c, xi=None):
    """Exact spectrum by quadrature of the finite Fourier transform of a(s)."""
    xi = default_spectrum_grid() if xi is None else np.asarray(xi, dtype=float)
    x, w = obj.quadrature()
    kern = np.exp(-1j * c * np.outer(xi, x))
    vals = math.sqrt(c / (2 * math.pi)) * (kern @ (obj(x) * w))
    return FieldProfile(xi, vals, "spectrum", c, 0, {"passband": 1.0})


def sinc_kernel(c, d):
    """sin(c d) / (pi d) with the limit c/pi at d = 0."""
    return c / math.pi * np.sinc(c * np.asarray(d, dtype=float) / math.pi)


def forward_image(obj, basis=None, s=None, method="kernel", c=None, L=None):
    """Diffraction-limited image e(s).

    ``method="kernel"`` convolves a(s') with the imaging PSF by quadrature
    over the object support (needs ``c`` or ``basis``). ``method="series"``
    sums sqrt(lambda_k) a_k psi_k(s), which equals sum lambda_k a_k phi_k(s)
    on the core.
    """
    s = default_object_grid() if s is None else np.asarray(s, dtype=float)
    if method == "kernel":
        c = basis.c if c is None else c
        x, w = obj.quadrature()
        vals = sinc_kernel(c, s[:, None] - x[None, :]) @ (obj(x) * w)
        return FieldProfile(s, vals, "image", c, 0)
    if method == "series":
        coeffs = project_coeffs(obj, basis, L)
        L = len(coeffs)
        vals = (np.sqrt(basis.lambdas[:L]) * coeffs.values) @ psi_table(basis, s, L)
        return FieldProfile(s, vals, "image", basis.c, L)
    raise ValueError(f"unknown image method {method!r}")


def reconstruct_object(coeffs, basis, L=None, s=None):
    """Truncated reconstruction a^(r)(s) = sum_{k<L} a_k phi_k(s) (zero off the core)."""
    L = len(coeffs) if L is None else L
    if L > len(coeffs):
        raise ValueError(f"L={L} exceeds the {len(coeffs)} available coefficients")
    if coeffs.kind == "pupil":
        raise ValueError("reconstruction needs object-side or reconstructed coefficients")
    s = default_object_grid() if s is None else np.asarray(s, dtype=float)
    vals = np.asarray(coeffs.values[:L]) @ phi_table(basis, s, L)
    return FieldProfile(s, vals, "reconstruction", basis.c, L)


def reconstruct_spectrum(coeffs, basis, L=None, xi=None):
    """Truncated spectrum f^(r)(xi) = sum_{k<L} (-i)^k a_k psi_k(xi)."""
    L = len(coeffs) if L is None else L
    if L > len(coeffs):
        raise ValueError(f"L={L} exceeds the {len(coeffs)} available coefficients")
    if coeffs.kind == "pupil":
        raise ValueError("reconstruction needs object-side or reconstructed coefficients")
    xi = default_spectrum_grid() if xi is None else np.asarray(xi, dtype=float)
    vals = _series_spectrum(coeffs, basis, xi, L)
    return FieldProfile(xi, vals, "reconstructed spectrum", basis.c, L, {"passband": 1.0})


def relative_rms(approx, exact, window):
    """RMS of approx - exact over |xi| <= window, relative to the RMS of exact."""
    mask = np.abs(exact.grid) <= window + 1e-12
    diff = approx.values[mask] - exact.values[mask]
    return float(np.sqrt(np.mean(np.abs(diff) ** 2) / np.mean(np.abs(exact.values[mask]) ** 2)))


def closeness_window(approx, exact, threshold=CLOSENESS_THRESHOLD):
    """Largest grid half-width W with relative RMS deviation over |xi| <= W
    at most ``threshold``. Returns 0.0 if no window qualifies."""
    if not np.array_equal(approx.grid, exact.grid):
        raise ValueError("profiles must share a grid")
    radii = np.unique(np.abs(exact.grid))
    best = 0.0
    for w in radii:
        if w > 0 and relative_rms(approx, exact, w) <= threshold:
            best = float(w)
    return best


def count_local_maxima(values):
    """Number of strict interior local maxima; flat tops count once."""
    v = np.asarray(values, dtype=float)
    keep = np.concatenate([[True], np.diff(v) != 0])
    v = v[keep]
    if v.size < 3:
        return 0
    return int(np.sum((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])))


def rayleigh_distance(c):
    """Classical two-point resolution distance pi/c in object units."""
    if not c > 0:
        raise ValueError("space-bandwidth product must be positive")
    return math.pi / c


def beyond_rayleigh(separation, c):
    """True when two points ``separation`` apart are closer than the Rayleigh distance."""
    return separation < rayleigh_distance(c)


def photon_integral(obj, n=QUAD_NODES):
    """Squared integral of the amplitude, by the object's own quadrature."""
    x, w = obj.quadrature(n)
    return float(np.dot(obj(x) ** 2, w))


__all__ = [
    "CoeffVector",
    "DoubleGaussian",
    "FieldProfile",
    "ObjectField",
    "RectSource",
    "Sampled",
    "beyond_rayleigh",
    "closeness_window",
    "count_local_maxima",
    "default_object_grid",
    "default_spectrum_grid",
    "direct_spectrum",
    "forward_image",
    "forward_spectrum",
    "integrate",
    "make_double_gaussian",
    "make_rect_source",
    "make_sampled",
    "photon_integral",
    "project_coeffs",
    "pupil_coeffs",
    "rayleigh_distance",
    "reconstruct_object",
    "reconstruct_spectrum",
    "relative_rms",
    "sinc_kernel",
    "uniform_grid",
]
