import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prolatoscope.fieldmodel import make_double_gaussian, project_coeffs
from prolatoscope.stochastic import (
    NoiseDraw,
    NoiseModel,
    amplification,
    beamsplitter_energy_check,
    noisy_reconstruct,
    photons_from_power,
    run_ensemble,
    sample_draw,
)

R10 = math.log(10.0)
T = 100_000


@pytest.fixture(scope="module")
def draws_coherent():
    return [sample_draw(NoiseModel.coherent(), 1, 11, t) for t in range(T)]


@pytest.fixture(scope="module")
def ensembles(basis18):
    obj = make_double_gaussian(1e12)
    return {
        kind: run_ensemble(obj, basis18, 4, model, T, seed=2024)
        for kind, model in (("coherent", NoiseModel.coherent()), ("squeezed", NoiseModel.squeezed(R10)))
    }


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel("thermal")
    with pytest.raises(ValueError):
        NoiseModel.squeezed(-1)
    with pytest.raises(ValueError):
        NoiseModel("coherent", 0.5)
    m = NoiseModel.squeezed(0.7)
    assert m.var_x * m.var_y == pytest.approx(1 / 16)


def test_coherent_draw_variance(draws_coherent):
    x = np.array([d.dalpha[0].real for d in draws_coherent])
    assert 0.24 <= x.var(ddof=1) <= 0.26


def test_squeezed_draw_variances():
    model = NoiseModel.squeezed(R10)
    z = np.array([sample_draw(model, 1, 5, t).dalpha[0] for t in range(T)])
    assert z.real.var(ddof=1) == pytest.approx(0.0025, rel=0.05)
    assert z.imag.var(ddof=1) == pytest.approx(25.0, rel=0.05)


def test_draw_is_deterministic_and_ordered():
    a = sample_draw(NoiseModel.coherent(), 3, 42, 7)
    b = sample_draw(NoiseModel.coherent(), 3, 42, 7)
    np.testing.assert_array_equal(a.dalpha, b.dalpha)
    np.testing.assert_array_equal(a.dbeta, b.dbeta)
    # draws for a shorter L are a prefix of those for a longer L
    c = sample_draw(NoiseModel.coherent(), 5, 42, 7)
    np.testing.assert_array_equal(c.dalpha[:3], a.dalpha)
    assert not np.array_equal(sample_draw(NoiseModel.coherent(), 3, 42, 8).dalpha, a.dalpha)


def test_zero_draw_is_noise_free(default_coeffs, basis18):
    out = noisy_reconstruct(default_coeffs, basis18, 7, NoiseDraw.zero(7))
    np.testing.assert_array_equal(out.values, default_coeffs.values[:7])
    assert out.kind == "reconstructed"


def test_amplification_rejects_underflow(basis18):
    import dataclasses

    import mpmath

    tiny = dataclasses.replace(basis18.modes[5], lam=mpmath.mpf("1e-400"))
    b = dataclasses.replace(basis18, modes=basis18.modes[:5] + (tiny,), _cache={})
    assert b.lambdas[-1] == 0.0
    with pytest.raises(ValueError, match="fewer modes"):
        amplification(b, 6)
    assert np.all(np.isfinite(amplification(b, 5)))


def test_ensemble_matches_single_trial_route(basis18):
    obj = make_double_gaussian(1e6)
    model = NoiseModel.squeezed(0.5)
    ens = run_ensemble(obj, basis18, 5, model, 4, seed=9)
    coeffs = project_coeffs(obj, basis18, 5)
    for t in range(4):
        ref = noisy_reconstruct(coeffs, basis18, 5, sample_draw(model, 5, 9, t))
        np.testing.assert_array_equal(ens.coeffs[t], ref.values)


def test_ensemble_independent_of_workers(basis18):
    obj = make_double_gaussian(1e12)
    e1 = run_ensemble(obj, basis18, 7, NoiseModel.coherent(), 50, seed=3)
    e4 = run_ensemble(obj, basis18, 7, NoiseModel.coherent(), 50, seed=3, workers=4)
    np.testing.assert_array_equal(e1.coeffs, e4.coeffs)


@pytest.mark.parametrize("kind", ["coherent", "squeezed"])
def test_variance_law(ensembles, basis18, kind):
    ens = ensembles[kind]
    r = ens.model.r
    var = ens.summary()["var_re"]
    expected = math.exp(-2 * r) / (4 * basis18.lambdas[:4])
    np.testing.assert_allclose(var, expected, rtol=0.05)


def test_squeezed_to_coherent_ratio(ensembles):
    ratio = ensembles["squeezed"].summary()["var_re"] / ensembles["coherent"].summary()["var_re"]
    np.testing.assert_allclose(ratio, 0.01, rtol=0.10)


@pytest.mark.parametrize("kind", ["coherent", "squeezed"])
def test_mean_law(ensembles, kind):
    ens = ensembles[kind]
    s = ens.summary()
    se = np.sqrt(s["var_re"] / ens.trials)
    assert np.all(np.abs(s["mean_re"] - ens.mean_coeffs.real) <= 3 * se)


def test_mode_independence(ensembles):
    x = ensembles["coherent"].coeffs.real
    corr = np.corrcoef(x.T)
    off = corr[~np.eye(corr.shape[0], dtype=bool)]
    assert np.max(np.abs(off)) <= 3 / math.sqrt(T)


def test_deviation_grows_with_frequency(basis18):
    obj = make_double_gaussian(1e12)
    ens = run_ensemble(obj, basis18, 7, NoiseModel.coherent(), 2000, seed=1)
    dev = ens.deviation(basis18, np.array([1.0, 3.0, 5.0, 7.0]))
    assert np.all(np.diff(dev) > 0)


def test_quadrature_selector(ensembles, basis18):
    ens = ensembles["coherent"]
    xi = np.array([0.0, 2.0])
    with pytest.raises(ValueError):
        ens.spectra(basis18, xi, quadrature="z")
    assert ens.spectra(basis18, xi, "both").shape == (T, 2)


def test_photon_conversion():
    n = photons_from_power(1e-3, 1064e-9, 1e-3)
    assert n == pytest.approx(5.3e12, rel=0.02)
    assert photons_from_power(2e-3, 1064e-9, 1e-3) == pytest.approx(2 * n, rel=1e-15)
    assert photons_from_power(1e-3, 532e-9, 1e-3) == pytest.approx(n / 2, rel=1e-15)
    with pytest.raises(ValueError):
        photons_from_power(0, 1e-6, 1)


@given(
    st.complex_numbers(max_magnitude=1e8, allow_nan=False, allow_infinity=False),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_beamsplitter_energy(a, lam):
    assert beamsplitter_energy_check(a, lam) <= 1e-12 * max(abs(a) ** 2, 1e-300)


def test_beamsplitter_limits():
    assert beamsplitter_energy_check(0.0, 0.3) == 0.0
    res = beamsplitter_energy_check(np.array([1.0, 2.0, 3.0]), np.array([0.9, 0.5, 1.0]))
    assert np.all(res <= 1e-12 * 9)
