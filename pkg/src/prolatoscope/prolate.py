"""Linear prolate spheroidal wave functions on the core |s| <= 1.

The Legendre coefficients of each mode are eigenvectors of a symmetric
five-diagonal operator matrix. Entries couple only k and k+2, so the matrix
splits into an even-index and an odd-index tridiagonal chain that are
diagonalized separately by cyclic Jacobi rotations in extended precision.
Eigenvalues of the sinc kernel are then recovered from the value (even
modes) or slope (odd modes) of the self-Fourier relation at the origin,
which stays accurate even for eigenvalues near 1e-50 and below.

Pointwise evaluation of phi, psi and chi is done in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import mpmath
import numpy as np

from .special import legendre_table, spherical_bessel_table

MIN_PRECISION_BITS = 128
DEFAULT_PRECISION_BITS = 256
TAIL_TOLERANCE = mpmath.mpf("1e-40")
MAX_JACOBI_SWEEPS = 60


class ConvergenceError(ArithmeticError):
    """Jacobi iteration did not converge for one parity chain."""

    def __init__(self, parity, index, sweeps):
        self.parity = parity
        self.index = index
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi rotations did not converge on the {parity} chain after "
            f"{sweeps} sweeps (largest off-diagonal at chain index {index})"
        )


class ParityError(ArithmeticError):
    """A mode's origin value or slope vanished where parity says it cannot."""


@dataclass(frozen=True)
class ProlateMode:
    """One prolate mode: index, eigenvalue and Legendre coefficients.

    ``lam`` is held as an mpmath number so that eigenvalues far below the
    double range stay exact; ``lambda_mantissa``/``lambda_exponent`` give the
    decimal (mantissa, exponent) view.
    """

    index: int
    lam: mpmath.mpf
    gamma_hp: tuple
    chi: mpmath.mpf

    @property
    def parity(self):
        return self.index % 2

    @property
    def lambda_exponent(self):
        return int(mpmath.floor(mpmath.log10(self.lam)))

    @property
    def lambda_mantissa(self):
        return float(self.lam / mpmath.mpf(10) ** self.lambda_exponent)

    @property
    def lambda_float(self):
        return float(self.lam)

    @cached_property
    def gamma(self):
        g = np.array([float(x) for x in self.gamma_hp])
        g.setflags(write=False)
        return g


@dataclass(frozen=True)
class ProlateBasis:
    """Prolate modes n = 0..K-1 for space-bandwidth product ``c``."""

    c: float
    modes: tuple
    matrix_order: int
    precision_bits: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def num_modes(self):
        return len(self.modes)

    K = num_modes

    @property
    def lambdas(self):
        """Eigenvalues as doubles (values below ~1e-308 underflow to 0)."""
        if "lambdas" not in self._cache:
            lam = np.array([m.lambda_float for m in self.modes])
            lam.setflags(write=False)
            self._cache["lambdas"] = lam
        return self._cache["lambdas"]

    @property
    def gammas(self):
        """Legendre coefficient matrix, shape (K, N), rounded to double."""
        if "gammas" not in self._cache:
            g = np.vstack([m.gamma for m in self.modes])
            g.setflags(write=False)
            self._cache["gammas"] = g
        return self._cache["gammas"]

    def __getitem__(self, n):
        return self.modes[n]

    def __len__(self):
        return len(self.modes)


def default_matrix_order(c, num_modes):
    return max(2 * num_modes + 30, math.ceil(4 * c) + 30)


def build_operator_matrix(c, N):
    """Diagonal and k,k+2 entries of the Legendre-basis prolate operator.

    Returns ``(diag, upper)`` as lists of mpmath numbers at the current
    working precision: ``diag[k] = A[k,k]`` for k < N and
    ``upper[k] = A[k,k+2]`` for k < N-2. All other entries are zero.
    """
    if N < 4:
        raise ValueError(f"matrix order must be >= 4, got {N}")
    if not c > 0:
        raise ValueError(f"space-bandwidth product must be positive, got {c}")
    return _operator_entries(mpmath.mpf(c), N)


def _operator_entries(c, N):
    # c may be zero here (pure Legendre operator); public entry point forbids it
    c2 = c * c
    diag = []
    upper = []
    for k in range(N):
        kk = mpmath.mpf(k)
        diag.append(kk * (kk + 1) + c2 * (2 * kk * (kk + 1) - 1) / ((2 * kk + 3) * (2 * kk - 1)))
        if k + 2 < N:
            upper.append(
                c2 * (kk + 2) * (kk + 1)
                / ((2 * kk + 3) * mpmath.sqrt((2 * kk + 1) * (2 * kk + 5)))
            )
    return diag, upper


def operator_matrix_dense(c, N):
    """The full N x N operator matrix as float64, for inspection and tests."""
    with mpmath.workprec(DEFAULT_PRECISION_BITS):
        diag, upper = _operator_entries(mpmath.mpf(c), N)
    A = np.diag([float(d) for d in diag])
    for k, u in enumerate(upper):
        A[k, k + 2] = A[k + 2, k] = float(u)
    return A


def _jacobi_eigh(d, e, parity):
    """Cyclic Jacobi on the symmetric tridiagonal matrix (d, e).

    Works at the caller's mpmath precision. Returns eigenvalues (ascending)
    and the matching eigenvectors as lists of columns.
    """
    n = len(d)
    a = [[mpmath.mpf(0)] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = d[i]
    for i in range(n - 1):
        a[i][i + 1] = a[i + 1][i] = e[i]
    v = [[mpmath.mpf(1) if i == j else mpmath.mpf(0) for j in range(n)] for i in range(n)]

    eps = mpmath.mpf(2) ** (-mpmath.mp.prec)
    scale = max(abs(x) for x in d) + max((abs(x) for x in e), default=0)
    threshold = (eps * scale) ** 2

    for sweep in range(MAX_JACOBI_SWEEPS):
        off = mpmath.fsum(a[p][q] ** 2 for p in range(n) for q in range(p + 1, n))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if not apq:
                    continue
                app, aqq = a[p][p], a[q][q]
                if abs(apq) <= eps * mpmath.sqrt(abs(app * aqq)) * mpmath.mpf("1e-3"):
                    a[p][q] = a[q][p] = mpmath.mpf(0)
                    continue
                theta = (aqq - app) / (2 * apq)
                t = 1 / (abs(theta) + mpmath.sqrt(theta * theta + 1))
                if theta < 0:
                    t = -t
                cs = 1 / mpmath.sqrt(t * t + 1)
                sn = t * cs
                tau = sn / (1 + cs)
                a[p][p] = app - t * apq
                a[q][q] = aqq + t * apq
                a[p][q] = a[q][p] = mpmath.mpf(0)
                for r in range(n):
                    if r != p and r != q:
                        arp, arq = a[r][p], a[r][q]
                        a[r][p] = a[p][r] = arp - sn * (arq + tau * arp)
                        a[r][q] = a[q][r] = arq + sn * (arp - tau * arq)
                    vr = v[r]
                    vrp, vrq = vr[p], vr[q]
                    vr[p] = vrp - sn * (vrq + tau * vrp)
                    vr[q] = vrq + sn * (vrp - tau * vrq)
    else:
        worst = max(
            ((p, q) for p in range(n) for q in range(p + 1, n)),
            key=lambda pq: abs(a[pq[0]][pq[1]]),
        )
        raise ConvergenceError(parity, worst[0], MAX_JACOBI_SWEEPS)

    order = sorted(range(n), key=lambda i: a[i][i])
    values = [a[i][i] for i in order]
    vectors = [[v[r][i] for r in range(n)] for i in order]
    return values, vectors


def solve_eigenproblem(matrix, precision_bits=DEFAULT_PRECISION_BITS):
    """Eigenpairs of the operator matrix, ordered by ascending eigenvalue.

    ``matrix`` is the ``(diag, upper)`` pair from :func:`build_operator_matrix`.
    Returns a list of ``(chi, gamma)`` where ``gamma`` is a full-length
    coefficient vector (zeros at opposite-parity indices), unit-normalized,
    with its first nonzero entry positive. List position equals mode index.
    """
    if precision_bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision_bits must be >= {MIN_PRECISION_BITS}")
    diag, upper = matrix
    N = len(diag)
    pairs = []
    with mpmath.workprec(precision_bits):
        for parity, name in ((0, "even"), (1, "odd")):
            idx = list(range(parity, N, 2))
            d = [mpmath.mpf(diag[k]) for k in idx]
            e = [mpmath.mpf(upper[k]) for k in idx[:-1]]
            values, vectors = _jacobi_eigh(d, e, name)
            for chi, vec in zip(values, vectors):
                norm = mpmath.sqrt(mpmath.fsum(x * x for x in vec))
                sign = -1 if vec[0] < 0 else 1
                gamma = [mpmath.mpf(0)] * N
                for k, x in zip(idx, vec):
                    gamma[k] = sign * x / norm
                pairs.append((chi, gamma))
    pairs.sort(key=lambda p: p[0])
    for n, (_, gamma) in enumerate(pairs):
        if gamma[n % 2] == 0 or any(gamma[k] for k in range(1 - n % 2, N, 2)):
            raise ParityError(f"mode {n} does not have parity {n % 2}")
    return pairs


def _legendre_at_zero(kmax):
    """P_k(0) and P_k'(0) for k = 0..kmax in mpmath arithmetic."""
    p0 = [mpmath.mpf(0)] * (kmax + 1)
    dp0 = [mpmath.mpf(0)] * (kmax + 1)
    p0[0] = mpmath.mpf(1)
    for k in range(2, kmax + 1, 2):
        p0[k] = -p0[k - 2] * (k - 1) / k
    for k in range(1, kmax + 1, 2):
        # (1 - x^2) P_k' = k (P_{k-1} - x P_k)
        dp0[k] = k * p0[k - 1]
    return p0, dp0


def compute_lambda(mode_index, gamma, c, precision_bits=DEFAULT_PRECISION_BITS):
    """Sinc-kernel eigenvalue of one mode from its Legendre coefficients.

    Even modes use the origin value of the self-Fourier relation, odd modes
    its slope. ``gamma`` must be normalized and sign-fixed.
    """
    with mpmath.workprec(precision_bits):
        c = mpmath.mpf(c)
        g = [mpmath.mpf(x) for x in gamma]
        p0, dp0 = _legendre_at_zero(len(g) - 1)
        half = mpmath.mpf(1) / 2
        if mode_index % 2 == 0:
            phi0 = mpmath.fsum(gk * mpmath.sqrt(k + half) * p0[k] for k, gk in enumerate(g) if k % 2 == 0)
            if phi0 == 0:
                raise ParityError(f"even mode {mode_index} has phi(0) = 0")
            ratio = mpmath.sqrt(2) * g[0] / phi0
        else:
            dphi0 = mpmath.fsum(gk * mpmath.sqrt(k + half) * dp0[k] for k, gk in enumerate(g) if k % 2 == 1)
            if dphi0 == 0:
                raise ParityError(f"odd mode {mode_index} has phi'(0) = 0")
            ratio = mpmath.sqrt(6) / 3 * c * g[1] / dphi0
        return c / (2 * mpmath.pi) * ratio * ratio


def build_basis(c, num_modes, precision_bits=DEFAULT_PRECISION_BITS, matrix_order=None):
    """Compute the first ``num_modes`` prolate modes for bandwidth ``c``.

    The Legendre truncation starts at ``max(2K+30, ceil(4c)+30)`` unless
    ``matrix_order`` is given, and is doubled until the last two
    coefficients of every retained mode fall below 1e-40.
    """
    if num_modes < 1:
        raise ValueError(f"need at least one mode, got {num_modes}")
    if precision_bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision_bits must be >= {MIN_PRECISION_BITS}")
    N = matrix_order or default_matrix_order(c, num_modes)
    N = max(N, num_modes + 4)
    while True:
        with mpmath.workprec(precision_bits):
            pairs = solve_eigenproblem(build_operator_matrix(c, N), precision_bits)[:num_modes]
            tail_ok = all(abs(g[N - 1]) < TAIL_TOLERANCE and abs(g[N - 2]) < TAIL_TOLERANCE for _, g in pairs)
        if tail_ok:
            break
        N *= 2
    modes = []
    with mpmath.workprec(precision_bits):
        for n, (chi, gamma) in enumerate(pairs):
            lam = compute_lambda(n, gamma, c, precision_bits)
            modes.append(ProlateMode(n, lam, tuple(gamma), chi))
    basis = ProlateBasis(float(c), tuple(modes), N, precision_bits)
    try:
        validate_basis(basis)
    except ValueError as exc:
        # tiny eigenvalues come from tiny leading coefficients, which lose
        # their relative accuracy first when the working precision runs out
        raise ArithmeticError(f"{exc}; increase precision_bits or reduce the mode count") from None
    return basis


def validate_basis(basis):
    """Check the structural invariants of a basis; raises ``ValueError``."""
    if basis.num_modes < 1:
        raise ValueError("basis has no modes")
    N = basis.matrix_order
    if N < basis.num_modes + 4:
        raise ValueError(f"matrix order {N} too small for {basis.num_modes} modes")
    tol = mpmath.mpf(2) ** (-basis.precision_bits // 2)
    with mpmath.workprec(basis.precision_bits):
        prev = None
        for n, mode in enumerate(basis.modes):
            if mode.index != n:
                raise ValueError(f"mode at position {n} carries index {mode.index}")
            if len(mode.gamma_hp) != N:
                raise ValueError(f"mode {n}: expected {N} coefficients, got {len(mode.gamma_hp)}")
            if any(mode.gamma_hp[k] != 0 for k in range(1 - n % 2, N, 2)):
                raise ValueError(f"mode {n}: nonzero coefficient of opposite parity")
            if not mode.gamma_hp[n % 2] > 0:
                raise ValueError(f"mode {n}: leading coefficient not positive")
            norm = mpmath.fsum(x * x for x in mode.gamma_hp)
            if abs(norm - 1) > tol:
                raise ValueError(f"mode {n}: coefficient norm {mpmath.nstr(norm, 20)} != 1")
            if not 0 < mode.lam < 1:
                raise ValueError(f"mode {n}: eigenvalue {mpmath.nstr(mode.lam, 10)} outside (0, 1)")
            if prev is not None and not mode.lam < prev:
                raise ValueError(f"eigenvalues not strictly decreasing at mode {n}")
            prev = mode.lam


def _check_mode(basis, n):
    if not 0 <= n < basis.num_modes:
        raise IndexError(f"mode {n} outside basis of {basis.num_modes} modes")


def _weighted_gamma(basis, n):
    g = basis.gammas[n]
    return g * np.sqrt(np.arange(g.size) + 0.5)


def eval_phi(basis, n, s):
    """Core-normalized prolate function phi_n(s) for |s| <= 1."""
    _check_mode(basis, n)
    s_arr = np.asarray(s, dtype=float)
    if np.any(np.abs(s_arr) > 1):
        raise ValueError("phi is defined on the core |s| <= 1; use eval_chi for the wings")
    out = phi_table(basis, s_arr.ravel(), n + 1)[n].reshape(s_arr.shape)
    return out if out.ndim else float(out)


def phi_table(basis, s, L=None):
    """phi_0..phi_{L-1} at core points ``s`` (shape (L, len(s))), zero for |s| > 1.

    Unlike :func:`eval_phi` this accepts points outside the core and returns
    the zero extension there.
    """
    L = basis.num_modes if L is None else L
    s = np.atleast_1d(np.asarray(s, dtype=float))
    N = basis.matrix_order
    inside = np.abs(s) <= 1
    P = legendre_table(N - 1, np.where(inside, s, 0.0))
    w = basis.gammas[:L] * np.sqrt(np.arange(N) + 0.5)
    return (w @ P) * inside


def _sign_table(L, N):
    n = np.arange(L)[:, None]
    k = np.arange(N)[None, :]
    same = (n - k) % 2 == 0
    return np.where(same, np.where(((n - k) // 2) % 2 == 0, 1.0, -1.0), 0.0)


def psi_table(basis, x, L=None):
    """psi_0..psi_{L-1} on the full line, shape (L, len(x))."""
    L = basis.num_modes if L is None else L
    x = np.atleast_1d(np.asarray(x, dtype=float))
    N = basis.matrix_order
    J = spherical_bessel_table(N - 1, basis.c * x)
    w = basis.gammas[:L] * np.sqrt(np.arange(N) + 0.5) * _sign_table(L, N)
    return math.sqrt(2 * basis.c / math.pi) * (w @ J)


def eval_psi(basis, n, x):
    """Full-line prolate function psi_n(x) from its spherical Bessel series."""
    _check_mode(basis, n)
    x_arr = np.asarray(x, dtype=float)
    out = psi_table(basis, x_arr.ravel(), n + 1)[n].reshape(x_arr.shape)
    return out if out.ndim else float(out)


def eval_chi(basis, n, s):
    """Wing-normalized prolate function chi_n(s) for |s| > 1."""
    _check_mode(basis, n)
    s_arr = np.asarray(s, dtype=float)
    if np.any(np.abs(s_arr) <= 1):
        raise ValueError("chi is defined on the wings |s| > 1; use eval_phi for the core")
    lam = basis.modes[n].lam
    return eval_psi(basis, n, s) / float(mpmath.sqrt(1 - lam))
