import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from tests.conftest import fresh_rng
from uwoclink import metrics
from uwoclink.channel import GGLayer, OOK, PointingError
from uwoclink.mc import (
    ber_from_samples,
    capacity_from_samples,
    conditional_ber,
    estimate_ber,
    estimate_capacity,
    estimate_outage,
    sample_gg,
    sample_pointing,
    sample_snr,
)
from uwoclink.stats import SnrDistribution, cascade_moment, cdf_snr, combined_moment


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def test_gg_unit_layer_is_exponential():
    rng = fresh_rng(1)
    x = sample_gg(GGLayer(a=1.0, d=1.0, p=1.0), rng, size=100_000)
    stat, _ = scipy_stats.kstest(x, "expon")
    # 1% critical value of the one-sample KS statistic
    assert stat < 1.628 / math.sqrt(x.size)


def test_gg_mean_matches_moment():
    layer = GGLayer(a=0.6302, d=1.1780, p=0.8444)
    rng = fresh_rng(2)
    x = sample_gg(layer, rng, size=1_000_000)
    target = cascade_moment([layer], 1.0)
    se = x.std(ddof=1) / math.sqrt(x.size)
    assert abs(x.mean() - target) <= 3.0 * se


def test_gg_rayleigh_second_moment():
    # d=2, p=2, a=1: E[X^2] = Gamma(2)/Gamma(1) = 1
    rng = fresh_rng(3)
    x = sample_gg(GGLayer(a=1.0, d=2.0, p=2.0), rng, size=400_000)
    sq = x ** 2
    se = sq.std(ddof=1) / math.sqrt(x.size)
    assert abs(sq.mean() - 1.0) <= 3.0 * se


def test_gamma_variate_moments():
    # underlying Gamma(d/p) draws must match mean = var = d/p
    rng = fresh_rng(4)
    for shape in (0.3, 1.0, 5.0):
        g = rng.gamma(shape, 1.0, size=1_000_000)
        se_mean = g.std(ddof=1) / math.sqrt(g.size)
        assert abs(g.mean() - shape) <= 3.0 * se_mean
        sq = (g - shape) ** 2
        se_var = sq.std(ddof=1) / math.sqrt(g.size)
        assert abs(g.var(ddof=1) - shape) <= 3.0 * se_var


def test_pointing_inverse_cdf():
    pe = PointingError(rho2=2.5, a0=0.7)
    assert sample_pointing(pe, 1.0) == pytest.approx(0.7)
    assert sample_pointing(pe, 0.0) == 0.0
    rng = fresh_rng(5)
    u = rng.uniform(size=1_000_000)
    hp = sample_pointing(pe, u)
    assert np.all((0 <= hp) & (hp <= pe.a0))
    target = pe.rho2 * pe.a0 / (pe.rho2 + 1.0)
    se = hp.std(ddof=1) / math.sqrt(hp.size)
    assert abs(hp.mean() - target) <= 3.0 * se


def test_sample_snr_mean(table1):
    rng = fresh_rng(6)
    snr = sample_snr(table1, rng, size=1_000_000)
    dist = SnrDistribution.from_scenario(table1)
    target = dist.gamma0 * combined_moment(table1.layers, table1.pointing, 2.0)
    se = snr.std(ddof=1) / math.sqrt(snr.size)
    assert abs(snr.mean() - target) <= 3.0 * se


def test_sample_snr_vs_cdf_dkw(table1, dist1):
    rng = fresh_rng(8)
    n = 200_000
    snr = sample_snr(table1, rng, size=n)
    eps = math.sqrt(math.log(2 / 0.01) / (2 * n))   # 99% DKW band
    for frac in np.geomspace(1e-5, 1e-1, 6):
        g = dist1.gamma0 * frac
        emp = float(np.mean(snr < g))
        assert abs(emp - cdf_snr(dist1, g)) <= eps


def test_sample_snr_hd_exponent(table1):
    from dataclasses import replace
    hd = replace(table1, detection="hd")
    rng = fresh_rng(9)
    snr = sample_snr(hd, rng, size=500_000)
    dist = SnrDistribution.from_scenario(hd)
    target = dist.gamma0 * combined_moment(hd.layers, hd.pointing, 1.0)
    se = snr.std(ddof=1) / math.sqrt(snr.size)
    assert abs(snr.mean() - target) <= 3.0 * se


def test_high_shape_concentration():
    # enormous d pins the gain near its mode; smoke test for stability
    rng = fresh_rng(10)
    x = sample_gg(GGLayer(a=1.0, d=5000.0, p=2.0), rng, size=10_000)
    assert np.all(np.isfinite(x))
    assert x.std() / x.mean() < 0.05


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

def test_estimate_outage_trivial_thresholds(table1):
    low = estimate_outage(table1, 1e-30, 10_000, seed=1)
    assert low.value == 0.0
    assert low.warning is not None          # zero events observed
    dist = SnrDistribution.from_scenario(table1)
    high = estimate_outage(table1, dist.gamma0 * 1e30, 10_000, seed=1)
    assert high.value == 1.0


def test_estimate_outage_brackets_exact(table1, dist1):
    est = estimate_outage(table1, 1.0, 400_000, seed=11)
    exact = metrics.outage_exact(dist1, 1.0)
    assert abs(est.value - exact) <= 3.0 * est.std_error
    assert est.warning is None


def test_estimate_rejects_tiny_budget(table1):
    with pytest.raises(ValueError):
        estimate_outage(table1, 1.0, 100, seed=1)
    with pytest.raises(ValueError):
        estimate_ber(table1, OOK, 10, seed=1)
    with pytest.raises(ValueError):
        estimate_capacity(table1, 10, seed=1)


def test_conditional_ber_is_q_function():
    gamma = np.geomspace(1e-3, 30.0, 50)
    from scipy.special import erfc
    q = 0.5 * erfc(np.sqrt(gamma / 2.0))
    assert np.allclose(conditional_ber(OOK, gamma), q, rtol=1e-12)


def test_ber_from_deterministic_samples():
    snr = np.full(5_000, 4.0)
    est = ber_from_samples(snr, OOK)
    assert est.std_error == 0.0
    assert est.value == pytest.approx(float(conditional_ber(OOK, 4.0)), rel=1e-12)
    zeros = ber_from_samples(np.zeros(5_000), OOK)
    assert zeros.value == pytest.approx(0.5, rel=1e-12)   # Q(0) = 1/2


def test_capacity_from_deterministic_samples():
    assert capacity_from_samples(np.zeros(4_000), kappa=1.0).value == 0.0
    est = capacity_from_samples(np.full(4_000, 2.0), kappa=0.5)   # kappa*snr = 1
    assert est.value == pytest.approx(1.0, rel=1e-12)
    assert est.std_error == 0.0


def test_estimate_ber_brackets_exact(table1_rho6, dist6):
    g0 = 1e9
    est = estimate_ber(table1_rho6, OOK, 400_000, seed=12, gamma0=g0)
    exact = metrics.ber_exact(
        SnrDistribution.from_scenario(table1_rho6, gamma0=g0), OOK)
    assert abs(est.value - exact) <= 3.0 * est.std_error


def test_estimate_capacity_brackets_exact(table1, dist1):
    est = estimate_capacity(table1, 400_000, seed=13)
    exact = metrics.capacity_exact(dist1)
    assert abs(est.value - exact) <= 3.0 * est.std_error


# ---------------------------------------------------------------------------
# reproducibility
# ---------------------------------------------------------------------------

def test_estimates_are_deterministic(table1):
    a = estimate_outage(table1, 1.0, 50_000, seed=77)
    b = estimate_outage(table1, 1.0, 50_000, seed=77)
    assert a == b
    c = estimate_ber(table1, OOK, 50_000, seed=77)
    d = estimate_ber(table1, OOK, 50_000, seed=77)
    assert c == d


def test_stream_layout_changes_value_not_validity(table1, dist1):
    pooled = estimate_outage(table1, 1.0, 200_000, seed=21, n_streams=4)
    single = estimate_outage(table1, 1.0, 200_000, seed=21, n_streams=1)
    assert pooled != single   # different layout, different draws
    exact = metrics.outage_exact(dist1, 1.0)
    assert abs(pooled.value - exact) <= 3.0 * pooled.std_error
    assert abs(single.value - exact) <= 3.0 * single.std_error
    again = estimate_outage(table1, 1.0, 200_000, seed=21, n_streams=4)
    assert pooled == again
