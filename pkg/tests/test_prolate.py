import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import composite_rule
from prolatoscope.prolate import (
    ParityError,
    build_basis,
    build_operator_matrix,
    compute_lambda,
    eval_chi,
    eval_phi,
    eval_psi,
    operator_matrix_dense,
    phi_table,
    psi_table,
    solve_eigenproblem,
    validate_basis,
)
from prolatoscope.special import gauss_legendre

# Frozen from a 512-bit rebuild (agrees with 256 bits to all printed digits)
# and cross-checked by a 120-digit quadrature of psi_17^2 over the core.
LAMBDA_17 = 4.0881321999956525682e-50
# Independent Nystrom oracle: 200-node Gauss-Legendre discretization of the
# sinc kernel, float64 eigvalsh.
NYSTROM_LAMBDA_0 = 5.725817806378957e-01


def nystrom_eigenvalues(c, n=200):
    x, w = np.polynomial.legendre.leggauss(n)
    d = x[:, None] - x[None, :]
    K = np.where(d == 0, c / math.pi, np.sin(c * d) / (math.pi * np.where(d == 0, 1, d)))
    sw = np.sqrt(w)
    return np.sort(np.linalg.eigvalsh(sw[:, None] * K * sw[None, :]))[::-1]


def small_c_asymptote(n, c):
    # leading small-c behaviour of the sinc-kernel eigenvalues
    r = 2 ** (2 * n) * math.factorial(n) ** 3 / (math.factorial(2 * n) * math.factorial(2 * n + 1))
    return 2 / math.pi * r**2 * c ** (2 * n + 1)


def tail_integral(c, X, parity):
    # int_X^inf sin^2(cx)/x^2 dx (even) or cos^2(cx)/x^2 dx (odd)
    core = c * (math.pi / 2 - float(mpmath.si(2 * c * X)))
    if parity == 0:
        return core + math.sin(c * X) ** 2 / X
    return -core + math.cos(c * X) ** 2 / X


def full_line_gram(basis, L, X=400.0):
    """Full-line Gram matrix of psi_0..psi_{L-1}: quadrature on [-X, X] plus the
    analytic 1/x tail beyond X."""
    x, w = composite_rule(-X, X, int(X))
    P = psi_table(basis, x, L)
    G = (P * w) @ P.T
    phi1 = phi_table(basis, [1.0], L)[:, 0]
    c = basis.c
    for m in range(L):
        for n in range(L):
            if (m - n) % 2:
                continue
            if m % 2 == 0:
                sign = (-1) ** ((m + n) // 2)
            else:
                sign = (-1) ** ((m + 1) // 2 + (n + 1) // 2)
            G[m, n] += 2 * sign * 2 / (math.pi * c) * phi1[m] * phi1[n] * tail_integral(c, X, m % 2)
    return G


def test_lambda_0_matches_nystrom(basis18):
    assert basis18.lambdas[0] == pytest.approx(NYSTROM_LAMBDA_0, rel=1e-8)


def test_leading_lambdas_match_nystrom(basis18):
    ref = nystrom_eigenvalues(1.0)[:6]
    np.testing.assert_allclose(basis18.lambdas[:6], ref, rtol=1e-6)


def test_lambda_17_frozen(basis18):
    lam = basis18[17].lam
    assert float(lam) == pytest.approx(LAMBDA_17, rel=1e-12)
    assert basis18[17].lambda_exponent == -50
    # independent small-c asymptote is good to a few 1e-5 at c = 1
    assert float(lam) == pytest.approx(small_c_asymptote(17, 1.0), rel=1e-4)


def test_lambda_17_stable_under_precision():
    hi = build_basis(1.0, 18, precision_bits=384)
    assert float(hi[17].lam) == pytest.approx(LAMBDA_17, rel=1e-15)


def test_lambdas_strictly_decreasing(basis31):
    lam = [m.lam for m in basis31.modes]
    assert all(a > b for a, b in zip(lam, lam[1:]))
    assert all(0 < x < 1 for x in lam)


def test_mantissa_exponent_view(basis18):
    m = basis18[10]
    assert m.lambda_mantissa * 10.0**m.lambda_exponent == pytest.approx(float(m.lam), rel=1e-14)
    assert 1 <= abs(m.lambda_mantissa) < 10


def test_eigenvectors_match_mpmath_eigsy():
    # dual route: dense symmetric eigensolver from mpmath on the full matrix
    c, N = 1.0, 24
    with mpmath.workprec(200):
        diag, upper = build_operator_matrix(c, N)
        pairs = solve_eigenproblem((diag, upper), 200)
        A = mpmath.zeros(N)
        for k in range(N):
            A[k, k] = diag[k]
        for k in range(N - 2):
            A[k, k + 2] = A[k + 2, k] = upper[k]
        E, Q = mpmath.eigsy(A)
        ref = sorted(E[i] for i in range(N))
    for (chi, _), r in zip(pairs, ref):
        assert abs(chi - r) < mpmath.mpf(10) ** -50


def test_dense_matrix_is_symmetric_pentadiagonal():
    A = operator_matrix_dense(2.0, 12)
    np.testing.assert_array_equal(A, A.T)
    i, j = np.nonzero(A)
    assert set(np.abs(i - j)) <= {0, 2}


def test_eigenvectors_parity_and_sign(basis18):
    g = basis18.gammas
    for n in range(basis18.num_modes):
        assert np.all(g[n, 1 - n % 2 :: 2] == 0)
        assert g[n, n % 2] > 0
        assert np.sum(g[n] ** 2) == pytest.approx(1, abs=1e-14)


def test_tail_coefficients_below_threshold(basis18):
    for m in basis18.modes:
        assert abs(m.gamma_hp[-1]) < 1e-40 and abs(m.gamma_hp[-2]) < 1e-40


def test_core_orthonormality(basis18):
    x, w = gauss_legendre(200)
    P = phi_table(basis18, x, 9)
    G = (P * w) @ P.T
    assert np.max(np.abs(G - np.eye(9))) <= 1e-8


def test_phi_parity(basis18):
    s = np.linspace(0, 1, 21)
    for n in range(6):
        np.testing.assert_allclose(eval_phi(basis18, n, -s), (-1) ** n * eval_phi(basis18, n, s), atol=1e-14)


def test_psi_equals_scaled_phi_on_core(basis18):
    s = np.linspace(-0.98, 0.98, 50)
    for n in range(6):
        phi = eval_phi(basis18, n, s)
        psi = eval_psi(basis18, n, s)
        np.testing.assert_allclose(psi, math.sqrt(basis18.lambdas[n]) * phi, rtol=1e-6, atol=1e-14)


def test_trace_identity(basis31):
    assert abs(math.fsum(basis31.lambdas[:31]) - 2 / math.pi) <= 1e-10


def test_kernel_identity(basis18):
    s = np.linspace(-1, 1, 41)
    P = phi_table(basis18, s, 18)
    lam = basis18.lambdas[:18]
    series = (P.T * lam) @ P
    d = s[:, None] - s[None, :]
    exact = np.sinc(d / math.pi) / math.pi  # c = 1
    assert np.max(np.abs(series - exact)) <= 1e-6


@pytest.mark.parametrize("xi", [0.0, 0.3, 1.7, 4.0])
def test_fourier_self_mapping(basis18, xi):
    c = basis18.c
    x, w = gauss_legendre(200)
    P = phi_table(basis18, x, 7)
    lhs = (P * np.exp(-1j * c * x * xi)) @ w
    psi = psi_table(basis18, [xi], 7)[:, 0]
    rhs = (-1j) ** np.arange(7) * math.sqrt(2 * math.pi / c) * psi
    assert np.max(np.abs(lhs - rhs)) <= 1e-8


def test_full_line_orthonormality(basis18):
    G = full_line_gram(basis18, 6)
    assert np.max(np.abs(G - np.eye(6))) <= 1e-4


def test_truncated_full_line_is_not_enough(basis18):
    # psi decays like 1/x, so [-40, 40] alone misses ~1e-2 of the norm
    x, w = composite_rule(-40, 40, 80)
    P = psi_table(basis18, x, 2)
    assert abs(((P * w) @ P.T)[0, 0] - 1) > 1e-3


def test_wing_orthonormality(basis18):
    L = 4
    G_full = full_line_gram(basis18, L)
    x, w = gauss_legendre(200)
    P = psi_table(basis18, x, L)
    G_core = (P * w) @ P.T
    scale = np.sqrt(1 - basis18.lambdas[:L])
    G_wing = (G_full - G_core) / np.outer(scale, scale)
    assert np.max(np.abs(G_wing - np.eye(L))) <= 1e-3


def test_chi_is_rescaled_psi(basis18):
    s = np.array([-3.0, 1.5, 7.25])
    np.testing.assert_allclose(
        eval_chi(basis18, 2, s), eval_psi(basis18, 2, s) / math.sqrt(1 - basis18.lambdas[2]), rtol=1e-14
    )


def test_domain_errors(basis18):
    with pytest.raises(ValueError):
        eval_phi(basis18, 0, 1.5)
    with pytest.raises(ValueError):
        eval_chi(basis18, 0, 0.5)
    with pytest.raises(IndexError):
        eval_phi(basis18, 18, 0.0)


def test_phi_table_zero_outside_core(basis18):
    assert np.all(phi_table(basis18, [-1.2, 1.0001, 3.0], 5) == 0)


def test_build_rejects_bad_arguments():
    with pytest.raises(ValueError):
        build_basis(1.0, 0)
    with pytest.raises(ValueError):
        build_basis(1.0, 4, precision_bits=64)
    with pytest.raises(ValueError):
        build_operator_matrix(0.0, 10)
    with pytest.raises(ValueError):
        build_operator_matrix(1.0, 3)


def test_compute_lambda_detects_broken_parity():
    gamma = [0, 0, 1, 0, 0, 0]
    with pytest.raises(ParityError):
        compute_lambda(1, gamma, 1.0)


def test_validate_basis_catches_bad_ordering(basis18):
    import dataclasses

    swapped = dataclasses.replace(basis18, modes=(basis18.modes[1], basis18.modes[0]) + basis18.modes[2:], _cache={})
    with pytest.raises(ValueError):
        validate_basis(swapped)


def test_matrix_order_growth_for_large_c():
    b = build_basis(20.0, 4)
    assert b.matrix_order >= 2 * 4 + 30
    assert b.lambdas[0] == pytest.approx(1.0, abs=1e-12)


@given(st.floats(min_value=0.2, max_value=6.0))
@settings(max_examples=8, deadline=None)
def test_lambda_0_against_nystrom_over_c(c):
    b = build_basis(c, 2, precision_bits=128)
    assert b.lambdas[0] == pytest.approx(nystrom_eigenvalues(c, 120)[0], rel=1e-9)


def test_precision_exhaustion_is_reported():
    # at c = 0.05 the eigenvalues fall ~5 decades per mode and 128 bits run out
    with pytest.raises(ArithmeticError, match="precision_bits"):
        build_basis(0.05, 20, precision_bits=128)
