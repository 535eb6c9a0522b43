import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from spikeslab import (CorrelatedPairSetting, DiracF, DiracG, DiracI, OrthogonalSetting,
                       h_correlated_pair, h_orthogonal, inclusion_probability_from_h,
                       inclusion_probability_integrated_omega)
from spikeslab.analytic import q_corr


def orth(a, N=40, s2=1.0, sigma2=1.0):
    return OrthogonalSetting(alpha_hat=a, s_j2=s2, N=N, sigma2=sigma2)


def test_zero_effect_g_slab_is_penalty():
    assert h_orthogonal(orth(0.0), DiracG(g=40.0)) == pytest.approx(math.log(41.0))


@pytest.mark.parametrize("a", [0.0, 0.13, 0.5, 1.2])
def test_orthogonal_curve_spot_values(a):
    # direct evaluation of the three closed forms at N=40, c=1, sigma2=1, s2=1
    N, c = 40, 1.0
    g, b = N * c, 1 / (N * c)
    h_i = -N * a * a / (1 + 1 / (N * c)) + math.log(N * c + 1)
    h_g = -N * a * a * g / (g + 1) + math.log(g + 1)
    h_f = -N * a * a * (1 - b) - math.log(b)
    assert h_orthogonal(orth(a), DiracI(c=c)) == pytest.approx(h_i, rel=1e-14)
    assert h_orthogonal(orth(a), DiracG(g=g)) == pytest.approx(h_g, rel=1e-14)
    assert h_orthogonal(orth(a), DiracF(b=b)) == pytest.approx(h_f, rel=1e-14)


def test_i_and_g_coincide_when_nc_equals_g():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        a = rng.normal(scale=2)
        N = int(rng.integers(2, 500))
        c = float(rng.uniform(0.05, 20))
        sigma2 = float(rng.uniform(0.1, 5))
        s = orth(a, N=N, sigma2=sigma2)
        assert h_orthogonal(s, DiracI(c=c)) == pytest.approx(
            h_orthogonal(s, DiracG(g=N * c)), rel=1e-12, abs=1e-12)


def _crossover_signal(g):
    # h_f - h_g = N a^2 s^2 / (sigma2 g (g+1)) - log(1 + 1/g)
    return g * (g + 1) * math.log1p(1 / g)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 0.999), st.floats(1.001, 1e4), st.integers(2, 1000))
def test_f_penalty_below_g(frac, g, N):
    # signal N a^2 ranges over [0, crossover) where the dominance holds
    a = math.sqrt(frac * _crossover_signal(g) / N)
    s = orth(a, N=N)
    assert h_orthogonal(s, DiracF(b=1 / g)) < h_orthogonal(s, DiracG(g=g))


@pytest.mark.parametrize("a,g,N", [(0.3, 40.0, 40), (1.5, 40.0, 40), (2.0, 5.0, 10)])
def test_f_minus_g_closed_form(a, g, N):
    s = orth(a, N=N)
    diff = h_orthogonal(s, DiracF(b=1 / g)) - h_orthogonal(s, DiracG(g=g))
    assert diff == pytest.approx(N * a * a / (g * (g + 1)) - math.log1p(1 / g), rel=1e-9)
    # beyond the crossover the ordering flips, but both probabilities are then saturated
    if N * a * a > _crossover_signal(g):
        assert diff > 0
        assert inclusion_probability_from_h(h_orthogonal(s, DiracG(g=g)), 0.5) > 1 - 1e-6


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 2.0), st.floats(0.01, 1.0),
       st.sampled_from([DiracI(c=1.0), DiracG(g=40.0), DiracF(b=0.025)]))
def test_signal_monotonicity(a, step, slab):
    lo, hi = orth(a), orth(a + step)
    assert h_orthogonal(hi, slab) < h_orthogonal(lo, slab)
    assert (inclusion_probability_from_h(h_orthogonal(hi, slab), 0.5)
            >= inclusion_probability_from_h(h_orthogonal(lo, slab), 0.5))


def test_penalty_monotonicity_at_zero_effect():
    s = orth(0.0)
    hs = [h_orthogonal(s, DiracI(c=c)) for c in (0.1, 1, 10, 100)]
    assert all(np.diff(hs) > 0)
    hs = [h_orthogonal(s, DiracG(g=g)) for g in (1, 10, 100)]
    assert all(np.diff(hs) > 0)
    hs = [h_orthogonal(s, DiracF(b=b)) for b in (0.01, 0.1, 0.5, 0.9)]
    assert all(np.diff(hs) < 0)


def test_correlated_reduces_to_orthogonal_at_zero_correlation():
    rng = np.random.default_rng(11)
    N, c = 40, 1.0
    for _ in range(10):
        a = rng.normal()
        s_y = float(rng.uniform(0.5, 3))
        pair = CorrelatedPairSetting(alpha_hat2=a, r12=0.0, r_y2=a / s_y, s_y=s_y, N=N)
        for slab in (DiracI(c=c), DiracG(g=N * c), DiracF(b=1 / (N * c))):
            assert h_correlated_pair(pair, slab) == pytest.approx(
                h_orthogonal(orth(a, N=N), slab), rel=1e-10, abs=1e-10)


def test_q_corr_at_zero_correlation():
    assert q_corr(0.0, 40.0) == pytest.approx((1 + 1 / 40) ** 3, rel=1e-14)


def test_g_slab_penalty_grows_with_squared_correlation():
    vals = [h_correlated_pair(CorrelatedPairSetting(alpha_hat2=0.4, r12=r, N=40), DiracG(g=40.0))
            for r in (0.0, 0.3, -0.6, 0.9)]
    assert all(np.diff(vals) > 0)


def test_from_r_y1_backs_out_r_y2():
    s = CorrelatedPairSetting.from_r_y1(0.3, 0.5, r_y1=0.9, s_y=2.0)
    assert s.r_y2 == pytest.approx(0.3 * 0.75 / 2.0 + 0.45)
    assert s.r_y1 == pytest.approx(0.9)


def test_settings_validation():
    with pytest.raises(ValueError):
        OrthogonalSetting(alpha_hat=0.1, s_j2=0.0)
    with pytest.raises(ValueError):
        OrthogonalSetting(alpha_hat=0.1, omega=1.0)
    with pytest.raises(ValueError):
        CorrelatedPairSetting(alpha_hat2=0.1, r12=1.0)
    with pytest.raises(TypeError):
        h_orthogonal(orth(0.1), object())


def test_inclusion_probability_basics():
    assert inclusion_probability_from_h(0.0, 0.5) == 0.5
    assert inclusion_probability_from_h(0.0, 0.2) == pytest.approx(0.2)
    assert inclusion_probability_from_h(1e6, 0.5) == 0.0
    assert inclusion_probability_from_h(-1e6, 0.5) == 1.0
    hs = np.linspace(-20, 20, 41)
    assert np.all(np.diff(inclusion_probability_from_h(hs, 0.3)) < 0)


def test_inclusion_at_zero_effect_uses_half_h():
    h = h_orthogonal(orth(0.0), DiracG(g=40.0))
    assert inclusion_probability_from_h(h, 0.5) == pytest.approx(1 / (1 + math.sqrt(41)), rel=1e-14)


def test_integrated_omega_neutral_evidence():
    assert inclusion_probability_integrated_omega(0.0, 1.0, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_integrated_omega_matches_adaptive_quadrature():
    for a, b, h in ((1.0, 1.0, -10.0), (2.0, 5.0, 3.0), (1.0, 3.0, 0.5)):
        f = lambda w: stats.beta.pdf(w, a, b) / (1 + math.exp(h / 2) * (1 - w) / w)
        ref, _ = integrate.quad(f, 0, 1, epsabs=1e-13, limit=200)
        assert inclusion_probability_integrated_omega(h, a, b) == pytest.approx(ref, abs=1e-6)


def test_integrated_omega_against_high_order_rule():
    ref = inclusion_probability_integrated_omega(-10.0, 1.0, 1.0, n_nodes=1000)
    assert inclusion_probability_integrated_omega(-10.0, 1.0, 1.0) == pytest.approx(ref, abs=1e-6)


def test_integrated_omega_monotone_in_h():
    hs = np.linspace(-15, 15, 61)
    vals = inclusion_probability_integrated_omega(hs, 2.0, 3.0)
    assert np.all(np.diff(vals) < 0)
    with pytest.raises(ValueError):
        inclusion_probability_integrated_omega(0.0, 0.0, 1.0)
