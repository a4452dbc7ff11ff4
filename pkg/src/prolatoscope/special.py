"""Numeric kernels shared by the prolate series: Legendre polynomials,
spherical Bessel functions and Gauss-Legendre quadrature."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# below this |x| the three-term Taylor expansion of j_k is exact to double precision
_SERIES_CUTOFF = 1e-2
_RESCALE = 1e150


def legendre_P(k, s):
    """Legendre polynomial P_k(s) by the ascending three-term recurrence.

    ``s`` may be a scalar or an array; the return value has the same shape.
    """
    if k < 0:
        raise ValueError(f"Legendre degree must be >= 0, got {k}")
    s = np.asarray(s, dtype=float)
    p_prev = np.ones_like(s)
    if k == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = s.copy()
    for j in range(1, k):
        p_prev, p = p, ((2 * j + 1) * s * p - j * p_prev) / (j + 1)
    return p if p.ndim else float(p)


def legendre_table(kmax, s):
    """All P_0..P_kmax at points ``s``; returns an array of shape (kmax+1, len(s))."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty((kmax + 1, s.size))
    out[0] = 1.0
    if kmax >= 1:
        out[1] = s
    for j in range(1, kmax):
        out[j + 1] = ((2 * j + 1) * s * out[j] - j * out[j - 1]) / (j + 1)
    return out


def _double_factorial_odd(k):
    # (2k+1)!!
    return float(np.prod(np.arange(1, 2 * k + 2, 2, dtype=float)))


def _bessel_series(kmax, x):
    out = np.empty((kmax + 1, x.size))
    x2 = x * x
    for k in range(kmax + 1):
        lead = x**k / _double_factorial_odd(k)
        t1 = x2 / (2 * (2 * k + 3))
        t2 = x2 * x2 / (8 * (2 * k + 3) * (2 * k + 5))
        out[k] = lead * (1.0 - t1 + t2)
    return out


def _bessel_miller(kmax, x):
    """Downward recurrence from a high start order, normalized to j_0 or j_1."""
    top = max(kmax, 1)
    start = top + int(np.max(np.abs(x))) + 20 + int(np.sqrt(40.0 * (top + 1)))
    out = np.zeros((top + 1, x.size))
    f_next = np.zeros_like(x)
    f = np.full_like(x, 1e-300)
    for j in range(start, 0, -1):
        f_next, f = f, (2 * j + 1) / x * f - f_next
        big = np.abs(f) > _RESCALE
        if np.any(big):
            f[big] /= _RESCALE
            f_next[big] /= _RESCALE
            out[:, big] /= _RESCALE
        if j <= top:
            out[j] = f_next
        if j == 1:
            out[0] = f
    j0 = np.sin(x) / x
    j1 = np.sin(x) / (x * x) - np.cos(x) / x
    scale = np.where(np.abs(j0) >= np.abs(j1), j0 / out[0], j1 / out[1])
    return (out * scale)[: kmax + 1]


def _bessel_upward(kmax, x):
    out = np.empty((kmax + 1, x.size))
    out[0] = np.sin(x) / x
    if kmax >= 1:
        out[1] = np.sin(x) / (x * x) - np.cos(x) / x
    for k in range(1, kmax):
        out[k + 1] = (2 * k + 1) / x * out[k] - out[k - 1]
    return out


def spherical_bessel_table(kmax, x):
    """Spherical Bessel functions j_0..j_kmax at points ``x``.

    Orders above |x| come from Miller's downward recurrence; orders at or
    below |x| from the upward recurrence, which is stable there. Returns an
    array of shape (kmax+1, len(x)).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((kmax + 1, x.size))
    small = np.abs(x) < _SERIES_CUTOFF
    if np.any(small):
        out[:, small] = _bessel_series(kmax, x[small])
    rest = ~small
    if np.any(rest):
        xr = x[rest]
        vals = _bessel_miller(kmax, xr)
        kup = min(kmax, int(np.max(np.abs(xr))))
        if kup >= 1:
            # upward values are only kept where k <= |x|, so overflow elsewhere is harmless
            with np.errstate(over="ignore", invalid="ignore"):
                up = _bessel_upward(kup, xr)
            orders = np.arange(kup + 1)[:, None]
            vals[: kup + 1] = np.where(orders <= np.abs(xr)[None, :], up, vals[: kup + 1])
        out[:, rest] = vals
    return out


def spherical_bessel_j(k, x):
    """Spherical Bessel function of the first kind j_k(x); j_0(0)=1, j_k(0)=0."""
    if k < 0:
        raise ValueError(f"Bessel order must be >= 0, got {k}")
    xa = np.asarray(x, dtype=float)
    vals = spherical_bessel_table(k, xa.ravel())[k].reshape(xa.shape)
    return vals if vals.ndim else float(vals)


@lru_cache(maxsize=32)
def _gl_reference(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(n, a=-1.0, b=1.0):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = _gl_reference(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def integrate(func, a=-1.0, b=1.0, n=200):
    """Gauss-Legendre integral of a vectorized ``func`` over [a, b]."""
    x, w = gauss_legendre(n, a, b)
    return np.tensordot(np.asarray(func(x)), w, axes=([-1], [0]))


def integrate_checked(func, a=-1.0, b=1.0, n=200, rtol=1e-10):
    """Integrate with ``n`` and ``2n`` nodes; returns (value, error estimate).

    Raises ``ArithmeticError`` when the two rules disagree by more than
    ``rtol`` relative to the larger result.
    """
    coarse = integrate(func, a, b, n)
    fine = integrate(func, a, b, 2 * n)
    err = float(np.max(np.abs(fine - coarse)))
    scale = max(float(np.max(np.abs(fine))), np.finfo(float).tiny)
    if err > rtol * scale:
        raise ArithmeticError(
            f"quadrature not converged on [{a}, {b}]: {n}/{2 * n}-node "
            f"estimates differ by {err:.3e}; refine the integrand resolution"
        )
    return fine, err
