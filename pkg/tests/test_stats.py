import math

import numpy as np
import pytest
from scipy import integrate, stats as scipy_stats

from uwoclink.channel import GGLayer, LinkScenario, OOK, PointingError
from uwoclink.stats import (
    SnrDistribution,
    cascade_moment,
    cdf_snr,
    combined_moment,
    pdf_cascade,
    pdf_combined,
    pdf_snr,
)

UNIT_LAYER = GGLayer(a=1.0, d=1.0, p=1.0)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def test_cascade_moment_normalization(table1):
    assert cascade_moment(table1.layers, 0.0) == pytest.approx(1.0, rel=1e-14)


def test_cascade_moment_gamma_mean():
    # p=1 layer is Gamma(d, a): mean = shape * scale
    assert cascade_moment([GGLayer(a=1.0, d=2.0, p=1.0)], 1.0) == pytest.approx(
        2.0, rel=1e-12)


def test_cascade_moment_vs_mc(table1, h_samples_rho1):
    # the shared samples include the pointing factor; divide it back out
    # via the exact pointing moment, or sample the cascade alone
    from tests.conftest import fresh_rng
    from uwoclink import mc
    rng = fresh_rng(7)
    n = 1_000_000
    hc = np.ones(n)
    for layer in table1.layers:
        hc *= mc.sample_gg(layer, rng, size=n)
    vals = hc ** 2
    se = vals.std(ddof=1) / math.sqrt(n)
    target = cascade_moment(table1.layers, 2.0)
    assert abs(vals.mean() - target) <= 3.0 * se


def test_combined_moment_trivials():
    pe = PointingError(rho2=1.0, a0=1.0)
    assert combined_moment([UNIT_LAYER], pe, 0.0) == pytest.approx(1.0)
    # uniform pointing gain on (0,1) has mean 1/2
    assert combined_moment([UNIT_LAYER], pe, 1.0) == pytest.approx(0.5, rel=1e-12)


def test_combined_moment_vs_mc(table1, h_samples_rho1):
    target = combined_moment(table1.layers, table1.pointing, 1.0)
    se = h_samples_rho1.std(ddof=1) / math.sqrt(h_samples_rho1.size)
    assert abs(h_samples_rho1.mean() - target) <= 3.0 * se


def test_moment_rejects_negative_order(table1):
    with pytest.raises(ValueError):
        cascade_moment(table1.layers, -1.0)
    with pytest.raises(ValueError):
        combined_moment(table1.layers, table1.pointing, -0.5)


# ---------------------------------------------------------------------------
# cascade density
# ---------------------------------------------------------------------------

def test_pdf_cascade_gamma_reduction():
    layer = GGLayer(a=1.0, d=2.0, p=1.0)
    assert pdf_cascade([layer], 1.0) == pytest.approx(math.exp(-1.0), rel=1e-8)
    for h in np.geomspace(0.05, 8.0, 12):
        want = scipy_stats.gamma.pdf(h, a=2.0, scale=1.0)
        assert pdf_cascade([layer], float(h)) == pytest.approx(want, rel=1e-8)


def test_pdf_cascade_zero_below_support():
    assert pdf_cascade([UNIT_LAYER], 0.0) == 0.0
    assert pdf_cascade([UNIT_LAYER], -1.0) == 0.0


def _two_layer_closed_form(a, d, p, z):
    """Product of two iid generalized-Gamma gains, via the Bessel identity."""
    from uwoclink.specfun import bessel_k0, ln_gamma
    norm = 2.0 * p / (a ** (2 * d) * math.exp(2.0 * ln_gamma(d / p)))
    return norm * z ** (d - 1.0) * bessel_k0(2.0 * math.sqrt(z ** p / a ** (2 * p)))


def test_pdf_cascade_two_iid_layers_closed_form():
    a, d, p = 0.9, 1.7, 1.3
    layers = [GGLayer(a=a, d=d, p=p)] * 2
    for z in np.geomspace(0.1, 3.0, 8):
        assert pdf_cascade(layers, float(z)) == pytest.approx(
            _two_layer_closed_form(a, d, p, float(z)), rel=1e-8)


def test_two_layer_closed_form_vs_convolution():
    # the closed form itself is checked against the product-density integral
    # f_Z(z) = int f(x) f(z/x) dx/x, with the single-layer density spelled out
    a, d, p = 0.9, 1.7, 1.3

    def f1(x):
        return p / (a ** d * math.gamma(d / p)) * x ** (d - 1) * math.exp(
            -((x / a) ** p))

    for z in (0.3, 1.0, 2.5):
        conv, err = integrate.quad(lambda x: f1(x) * f1(z / x) / x, 0.0, np.inf,
                                   limit=200)
        assert _two_layer_closed_form(a, d, p, z) == pytest.approx(
            conv, rel=1e-6)


def test_pdf_cascade_two_table1_layers_vs_mc(table1):
    from tests.conftest import fresh_rng
    from uwoclink import mc
    layers = table1.layers[:2]
    rng = fresh_rng(42)
    n = 400_000
    prod = mc.sample_gg(layers[0], rng, size=n) * mc.sample_gg(layers[1], rng, size=n)
    edges = np.quantile(prod, np.linspace(0.02, 0.98, 9))
    counts, _ = np.histogram(prod, bins=edges)
    for lo, hi, obs in zip(edges[:-1], edges[1:], counts):
        expect, _ = integrate.quad(lambda h: pdf_cascade(layers, h), lo, hi)
        expect *= n
        assert abs(obs - expect) <= 4.0 * math.sqrt(expect) + 5.0


# ---------------------------------------------------------------------------
# combined density
# ---------------------------------------------------------------------------

def test_pdf_combined_normalizes(table1):
    layers, pe = table1.layers, table1.pointing
    scale = pe.a0 * math.prod(l.a for l in layers)
    total, _ = integrate.quad(lambda x: pdf_combined(layers, pe, x * scale) * scale,
                              0.0, np.inf, limit=200)
    assert total == pytest.approx(1.0, abs=1e-4)


def test_pdf_combined_quadrature_moments(table1):
    layers, pe = table1.layers, table1.pointing
    scale = pe.a0 * math.prod(l.a for l in layers)
    for n in (1.0, 2.0, 3.0):
        val, _ = integrate.quad(
            lambda x: (x * scale) ** n * pdf_combined(layers, pe, x * scale) * scale,
            0.0, np.inf, limit=200)
        assert val == pytest.approx(combined_moment(layers, pe, n), rel=1e-5)


def test_pdf_combined_vs_mc_histogram(table1, h_samples_rho1):
    layers, pe = table1.layers, table1.pointing
    h = h_samples_rho1[:500_000]
    edges = np.quantile(h, np.linspace(0.05, 0.95, 7))
    counts, _ = np.histogram(h, bins=edges)
    for lo, hi, obs in zip(edges[:-1], edges[1:], counts):
        expect, _ = integrate.quad(lambda x: pdf_combined(layers, pe, x), lo, hi)
        expect *= h.size
        assert abs(obs - expect) <= 4.0 * math.sqrt(expect) + 5.0


# ---------------------------------------------------------------------------
# SNR distribution
# ---------------------------------------------------------------------------

def test_from_scenario_rejects_invalid(table1):
    bad = LinkScenario(layers=(GGLayer(a=1.0, d=-1.0, p=1.0),),
                       pointing=table1.pointing, budget=table1.budget,
                       modulation=table1.modulation)
    with pytest.raises(ValueError):
        SnrDistribution.from_scenario(bad)


def test_distribution_cached_fields(table1, dist1):
    prod_a = math.prod(l.a for l in table1.layers)
    assert dist1.z_scale == pytest.approx(1.0 / (0.0032 * prod_a), rel=1e-12)
    assert dist1.snr_exponent == 2
    assert not dist1.is_extension
    override = SnrDistribution.from_scenario(table1, gamma0=1e9)
    assert override.gamma0 == 1e9


def test_pdf_snr_normalizes(dist1):
    e = dist1.snr_exponent

    def integrand(x):
        g = dist1.gamma0 * (x / dist1.z_scale) ** e
        jac = dist1.gamma0 * e * x ** (e - 1) / dist1.z_scale ** e
        return pdf_snr(dist1, g) * jac

    total, _ = integrate.quad(integrand, 0.0, np.inf, limit=200)
    assert total == pytest.approx(1.0, abs=1e-4)


def test_pdf_snr_change_of_variables(dist1):
    # the SNR density must equal the combined-gain density times |dh/dgamma|
    sc = dist1.scenario
    e = dist1.snr_exponent
    for frac in (1e-6, 1e-3, 1.0, 1e2):
        gamma = dist1.gamma0 * frac
        h = (gamma / dist1.gamma0) ** (1.0 / e)
        jac = h / (e * gamma)
        want = pdf_combined(sc.layers, sc.pointing, h) * jac
        assert pdf_snr(dist1, gamma) == pytest.approx(want, rel=1e-10)


def test_cdf_snr_endpoints(dist1):
    assert cdf_snr(dist1, 0.0) == 0.0
    assert cdf_snr(dist1, dist1.gamma0 * 1e8) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        cdf_snr(dist1, -1.0)


def test_cdf_snr_vs_empirical(dist1, h_samples_rho1):
    snr = dist1.gamma0 * h_samples_rho1 ** 2
    n = snr.size
    gamma = dist1.gamma0 * 1e-4
    f = cdf_snr(dist1, gamma)
    emp = float(np.mean(snr < gamma))
    assert abs(emp - f) <= 3.0 * math.sqrt(f * (1 - f) / n)


def test_cdf_matches_pdf_derivative(dist1):
    for gamma in np.geomspace(1e-5, 1.0, 7) * dist1.gamma0 * 1e-2:
        step = 1e-4 * gamma
        deriv = (cdf_snr(dist1, gamma + step) - cdf_snr(dist1, gamma - step)) / (2 * step)
        assert deriv == pytest.approx(pdf_snr(dist1, gamma), rel=1e-4)


def test_cdf_snr_monotone(dist1):
    grid = dist1.gamma0 * np.geomspace(1e-8, 1e2, 40)
    vals = [cdf_snr(dist1, float(g)) for g in grid]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_snr_moments_identity(dist1):
    # E[gamma^n] = gamma0^n * E[h^(e*n)] by the change of variables
    sc = dist1.scenario
    e = dist1.snr_exponent

    for order in (0.5, 1.0, 2.0, 3.0):
        def integrand(x):
            g = dist1.gamma0 * (x / dist1.z_scale) ** e
            jac = dist1.gamma0 * e * x ** (e - 1) / dist1.z_scale ** e
            return g ** order * pdf_snr(dist1, g) * jac

        val, _ = integrate.quad(integrand, 0.0, np.inf, limit=250)
        want = dist1.gamma0 ** order * combined_moment(sc.layers, sc.pointing,
                                                       e * order)
        assert val == pytest.approx(want, rel=1e-4)


def test_gamma_reduction_at_negligible_pointing():
    # N=1, p=1, a0=1, huge rho2: pointing gain pinned at 1, so the SNR CDF
    # collapses to the Gamma law of gamma0 * h**2
    layer = GGLayer(a=1.0, d=2.0, p=1.0)
    sc = LinkScenario(layers=(layer,),
                      pointing=PointingError(rho2=1e6, a0=1.0),
                      budget=__import__("uwoclink").channel.LinkBudget(
                          pt_dbm=0.0, sigma_w2=1e-6, alpha=0.0, length_m=1.0),
                      modulation=OOK)
    dist = SnrDistribution.from_scenario(sc)
    for frac in (1e-4, 1e-2, 0.5, 2.0):
        gamma = dist.gamma0 * frac
        want = scipy_stats.gamma.cdf(math.sqrt(gamma / dist.gamma0), a=2.0, scale=1.0)
        assert cdf_snr(dist, gamma) == pytest.approx(want, abs=1e-3)


def test_hd_exponent_changes_law(table1):
    hd = LinkScenario(layers=table1.layers, pointing=table1.pointing,
                      budget=table1.budget, modulation=table1.modulation,
                      detection="hd")
    dist = SnrDistribution.from_scenario(hd)
    assert dist.snr_exponent == 1
    assert dist.is_extension
    # same physical gain threshold, matching probabilities across laws
    d2 = SnrDistribution.from_scenario(table1, gamma0=1.0)
    d1 = SnrDistribution.from_scenario(hd, gamma0=1.0)
    h_th = 1e-3
    assert cdf_snr(d1, h_th) == pytest.approx(cdf_snr(d2, h_th ** 2), rel=1e-8)
