import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from conftest import orthonormal_design
from oracles import quadrature_marginal_likelihood
from spikeslab import (CorrelatedPairSetting, DiracF, DiracG, DiracI, OrthogonalSetting,
                       h_correlated_pair, h_orthogonal, load_dataset,
                       log_conditional_marginal_likelihood, log_marginal_likelihood,
                       posterior_moments)
from spikeslab.exceptions import DegenerateFitError, SingularDesignError
from spikeslab.marginal import log_ml_fast, slab_code

SLABS = [DiracI(c=1.0), DiracG(g=10.0), DiracF(b=0.1)]


def _random_data(rng, N=12, d=3):
    X = rng.normal(size=(N, d))
    y = X @ rng.normal(size=d) + rng.normal(size=N)
    return load_dataset(y, X)


@pytest.mark.parametrize("slab", SLABS[:2], ids=["i", "g"])
def test_empty_model(rng, slab):
    data = _random_data(rng)
    pm = posterior_moments(data, (0, 0, 0), slab)
    assert pm.S_N == pytest.approx(data.yty / 2)
    assert pm.log_det_ratio == 0.0
    assert pm.s_N == (data.N - 1) / 2


def test_empty_model_f_slab_keeps_fraction(rng):
    # the f-slab evaluates the likelihood at power (1-b) for every model,
    # including the one without regressors
    data = _random_data(rng)
    pm = posterior_moments(data, (0, 0, 0), DiracF(b=0.1))
    assert pm.S_N == pytest.approx(0.9 * data.yty / 2)
    assert pm.log_det_ratio == 0.0


def test_single_regressor_i_slab(rng):
    N, c = 20, 2.0
    x = orthonormal_design(rng, N, 1)
    y = 0.7 * x[:, 0] + rng.normal(size=N)
    data = load_dataset(y, x)
    pm = posterior_moments(data, (1,), DiracI(c=c))
    s_y = math.sqrt(data.s_y2)
    r_y1 = float(data.X[:, 0] @ data.y_c) / (N * s_y)
    assert pm.A_N[0, 0] == pytest.approx(1 / (N + 1 / c), rel=1e-12)
    assert pm.a_N[0] == pytest.approx(N * s_y * r_y1 / (N + 1 / c), rel=1e-12)


def test_two_point_example():
    data = load_dataset([0.0, 2.0], [[0.3], [1.1]])
    expected = -0.5 * math.log(2) - 0.5 * math.log(2 * math.pi) + math.lgamma(0.5) - 0.5 * math.log(1)
    assert log_marginal_likelihood(data, (0,), DiracI(c=1.0)) == pytest.approx(expected, rel=1e-14)


def test_g_penalty_monotone_for_null_regressor(rng):
    N = 30
    X = orthonormal_design(rng, N, 2)
    # response orthogonal to the second column
    y = 1.5 * X[:, 0] + rng.normal(size=N)
    y -= (X[:, 1] @ (y - y.mean())) / N * X[:, 1]
    data = load_dataset(y, X)
    assert abs(data.xty[1]) < 1e-10
    vals = [log_marginal_likelihood(data, (0, 1), DiracG(g=g)) for g in (1, 10, 100, 1000)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def _dense_ldr(data, delta, slab):
    idx = np.flatnonzero(delta)
    G = data.gram[np.ix_(idx, idx)]
    if isinstance(slab, DiracG):
        A0, AN = slab.g * np.linalg.inv(G), slab.g / (slab.g + 1) * np.linalg.inv(G)
    elif isinstance(slab, DiracF):
        A0, AN = np.linalg.inv(G) / slab.b, np.linalg.inv(G)
    else:
        A0, AN = slab.c * np.eye(idx.size), np.linalg.inv(G + np.eye(idx.size) / slab.c)
    return 0.5 * (np.linalg.slogdet(AN)[1] - np.linalg.slogdet(A0)[1])


def test_g_slab_log_det_ratio_example(rng):
    X = rng.normal(size=(5, 3))
    data = load_dataset(rng.normal(size=5), X)
    g = 4.0
    pm = posterior_moments(data, (1, 1, 1), DiracG(g=g))
    assert pm.log_det_ratio == pytest.approx(-1.5 * math.log1p(g), abs=1e-10)
    assert pm.log_det_ratio == pytest.approx(_dense_ldr(data, (1, 1, 1), DiracG(g=g)), abs=1e-10)


def test_determinant_shortcuts_match_dense():
    rng = np.random.default_rng(7)
    for _ in range(200):
        N = int(rng.integers(8, 25))
        d = int(rng.integers(1, 6))
        data = _random_data(rng, N, d)
        delta = rng.integers(0, 2, size=d)
        if delta.sum() == 0:
            delta[rng.integers(d)] = 1
        g = float(rng.uniform(1, 100))
        for slab in (DiracG(g=g), DiracF(b=1 / g), DiracI(c=float(rng.uniform(0.1, 10)))):
            pm = posterior_moments(data, delta, slab)
            assert pm.log_det_ratio == pytest.approx(_dense_ldr(data, delta, slab), abs=1e-10)


@pytest.mark.parametrize("slab", SLABS, ids=["i", "g", "f"])
def test_a_N_formula(rng, slab):
    data = _random_data(rng, 15, 4)
    delta = (1, 0, 1, 1)
    idx = np.flatnonzero(delta)
    pm = posterior_moments(data, delta, slab)
    np.testing.assert_allclose(pm.A_N, pm.A_N.T, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(pm.A_N) > 0)
    np.testing.assert_allclose(pm.a_N, pm.A_N @ data.xty[idx], rtol=1e-10)
    if isinstance(slab, DiracF):
        Xd = data.X[:, idx]
        resid = data.y_c - Xd @ np.linalg.lstsq(Xd, data.y_c, rcond=None)[0]
        assert pm.S_N == pytest.approx(0.5 * (1 - slab.b) * resid @ resid, rel=1e-10)
    else:
        expected = 0.5 * (data.yty - pm.a_N @ np.linalg.solve(pm.A_N, pm.a_N))
        assert pm.S_N == pytest.approx(expected, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.sampled_from(SLABS))
def test_exchange_symmetry(seed, slab):
    rng = np.random.default_rng(seed)
    data = _random_data(rng, 14, 5)
    delta = rng.integers(0, 2, size=5)
    perm = rng.permutation(5)
    permuted = load_dataset(data.y, data.X[:, perm])
    a = log_marginal_likelihood(data, delta, slab)
    b = log_marginal_likelihood(permuted, delta[perm], slab)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.sampled_from(SLABS))
def test_finite_when_preconditions_hold(seed, slab):
    rng = np.random.default_rng(seed)
    data = _random_data(rng, 10, 4)
    delta = rng.integers(0, 2, size=4)
    assert math.isfinite(log_marginal_likelihood(data, delta, slab))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.sampled_from(SLABS))
def test_compiled_path_matches_reference(seed, slab):
    rng = np.random.default_rng(seed)
    data = _random_data(rng, 12, 5)
    delta = rng.integers(0, 2, size=5).astype(bool)
    code, param = slab_code(slab)
    fast, S = log_ml_fast(data, delta, code, param)
    assert fast == pytest.approx(log_marginal_likelihood(data, delta, slab), rel=1e-11)
    assert S == pytest.approx(posterior_moments(data, delta, slab).S_N, rel=1e-11)


@pytest.mark.parametrize("kind,slab", [("i", DiracI(c=1.0)), ("g", DiracG(g=10.0)),
                                       ("f", DiracF(b=0.1))])
def test_d1_one_matches_quadrature(rng, kind, slab):
    N = 10
    X = rng.normal(size=(N, 1))
    y = 0.8 * X[:, 0] + rng.normal(size=N)
    data = load_dataset(y, X)
    param = {"i": 1.0, "g": 10.0, "f": 0.1}[kind]
    ref = quadrature_marginal_likelihood(X, y, (1,), kind, param)
    assert log_marginal_likelihood(data, (1,), slab) == pytest.approx(ref, rel=1e-5)


@pytest.mark.parametrize("slab", SLABS, ids=["i", "g", "f"])
def test_marginal_is_sigma2_integral_of_conditional(rng, slab):
    data = _random_data(rng, 9, 2)
    delta = (1, 1)
    lml = log_marginal_likelihood(data, delta, slab)
    # substitute sigma2 = exp(t): (1/sigma2) d sigma2 = dt
    f = lambda t: math.exp(log_conditional_marginal_likelihood(data, delta, slab, math.exp(t)) - lml)
    val, _ = integrate.quad(f, -40, 40, points=[0.0], epsabs=0, epsrel=1e-12, limit=400)
    assert val == pytest.approx(1.0, rel=1e-8)


def test_conditional_empty_model_is_gaussian(rng):
    data = _random_data(rng, 8, 2)
    s2 = 1.7
    expected = (-0.5 * math.log(data.N) - 0.5 * (data.N - 1) * math.log(2 * math.pi * s2)
                - data.yty / (2 * s2))
    got = log_conditional_marginal_likelihood(data, (0, 0), DiracG(g=8.0), s2)
    assert got == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("slab", [DiracI(c=1.0), DiracG(g=40.0), DiracF(b=1 / 40)],
                         ids=["i", "g", "f"])
def test_conditional_difference_equals_half_h_orthogonal(rng, slab):
    N = 40
    X = orthonormal_design(rng, N, 2)
    y = X @ [1.0, 0.35] + rng.normal(size=N)
    data = load_dataset(y, X)
    alpha_hat2 = data.xty[1] / N
    diff = (log_conditional_marginal_likelihood(data, (1, 0), slab, 1.0)
            - log_conditional_marginal_likelihood(data, (1, 1), slab, 1.0))
    h = h_orthogonal(OrthogonalSetting(alpha_hat=alpha_hat2, s_j2=1.0, N=N, sigma2=1.0), slab)
    assert diff == pytest.approx(h / 2, rel=1e-10)


@pytest.mark.parametrize("r12", [0.3, 0.7, -0.5])
@pytest.mark.parametrize("slab", [DiracI(c=1.0), DiracG(g=40.0), DiracF(b=1 / 40)],
                         ids=["i", "g", "f"])
def test_conditional_difference_equals_half_h_correlated(rng, r12, slab):
    N = 40
    X = orthonormal_design(rng, N, 2, corr=[[1, r12], [r12, 1]])
    y = X @ [1.0, 0.3] + rng.normal(size=N)
    data = load_dataset(y, X)
    ls = np.linalg.solve(data.gram, data.xty)
    s_y = math.sqrt(data.s_y2)
    r_y2 = data.xty[1] / (N * s_y)
    setting = CorrelatedPairSetting(alpha_hat2=ls[1], r12=r12, r_y2=r_y2, s_y=s_y, N=N)
    diff = (log_conditional_marginal_likelihood(data, (1, 0), slab, 1.0)
            - log_conditional_marginal_likelihood(data, (1, 1), slab, 1.0))
    assert 2 * diff == pytest.approx(h_correlated_pair(setting, slab), rel=1e-9, abs=1e-10)


@pytest.mark.parametrize("slab", [DiracG(g=5.0), DiracF(b=0.2)], ids=["g", "f"])
def test_singular_design_names_delta(slab):
    x = np.arange(6.0)
    X = np.column_stack([x, 2 * x, np.sin(x)])
    data = load_dataset(np.cos(x), X)
    with pytest.raises(SingularDesignError) as info:
        log_marginal_likelihood(data, (1, 1, 0), slab)
    assert list(info.value.delta) == [1, 1, 0]
    # the i-slab ridge keeps the same model well defined
    assert math.isfinite(log_marginal_likelihood(data, (1, 1, 0), DiracI(c=1.0)))
    code, param = slab_code(slab)
    assert log_ml_fast(data, np.array([1, 1, 0], bool), code, param)[0] == -math.inf


def test_perfect_fit_is_degenerate():
    x = np.arange(5.0)
    data = load_dataset(3 * x + 1, x[:, None])
    with pytest.raises(DegenerateFitError):
        log_marginal_likelihood(data, (1,), DiracF(b=0.2))
