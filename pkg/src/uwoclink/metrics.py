"""Exact and asymptotic link-performance metrics.

Outage probability is the SNR CDF at the threshold; average BER and
ergodic capacity integrate the CDF/PDF against the modulation and log
weights, each collapsing to one more Fox H-function instance.  High-SNR
asymptotes come from the leading residue at every left pole of the CDF
kernel; their decay exponents are d_i/2 (per layer) and rho2/2, and the
smallest one is the diversity order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gamma as _gamma, rgamma as _rgamma

from .channel import LinkScenario, ModulationScheme
from .specfun import FoxHKernel, foxh_eval, ln_gamma
from .stats import SnrDistribution, cdf_snr

LOG2_E = math.log2(math.e)


class PoleCollisionError(ValueError):
    """Two decay exponents coincide: the simple-pole expansion is invalid
    (the exact metrics remain available)."""


@dataclass(frozen=True)
class AsymptoticTerm:
    """One term of a high-SNR expansion: value = coefficient * gamma0**(-exponent)."""
    exponent: float     # average-SNR decay exponent of this term
    coefficient: float  # gamma-factor prefactor, includes all threshold scaling
    origin: str         # which pole generated it: "d[i]" or "rho2"


# ---------------------------------------------------------------------------
# Exact metrics
# ---------------------------------------------------------------------------

def outage_exact(dist: SnrDistribution, gamma_th: float) -> float:
    """Probability that the instantaneous SNR falls below gamma_th."""
    if gamma_th <= 0.0:
        raise ValueError(f"gamma_th must be positive, got {gamma_th}")
    return cdf_snr(dist, gamma_th)


def ber_kernel(layers, pointing, phi: float) -> FoxHKernel:
    """Average-BER kernel: the CDF kernel with the extra numerator factor
    Gamma(phi - s/2) from the exponential-weight integral."""
    lower = tuple((layer.d / layer.p, 1.0 / layer.p) for layer in layers) + \
        ((pointing.rho2, 1.0), (0.0, 1.0))
    upper = ((1.0, 1.0), (1.0 - phi, 0.5), (1.0 + pointing.rho2, 1.0))
    return FoxHKernel(upper_params=upper, lower_params=lower,
                      m=len(layers) + 1, n=2)


def ber_exact(dist: SnrDistribution, modulation: ModulationScheme) -> float:
    """Average bit-error rate for the (delta, phi, q_n) modulation template."""
    if dist.snr_exponent != 2:
        raise ValueError("analytic BER is derived for the squared-gain SNR law "
                         "(direct detection); use the Monte-Carlo estimator instead")
    sc = dist.scenario
    kern = ber_kernel(sc.layers, sc.pointing, modulation.phi)
    pref = (modulation.delta * sc.pointing.rho2
            / (2.0 * math.exp(ln_gamma(modulation.phi)) * math.exp(dist._ln_gammas)))
    total = 0.0
    for qn in modulation.q:
        total += foxh_eval(kern, dist.z_scale / math.sqrt(qn * dist.gamma0))
    return pref * total


def capacity_kernel(layers, pointing) -> FoxHKernel:
    """Ergodic-capacity kernel: the PDF kernel times the Mellin transform
    of ln(1 + x), i.e. Gamma(s/2)**2 Gamma(1 - s/2) / Gamma(1 + s/2)."""
    lower = tuple((layer.d / layer.p, 1.0 / layer.p) for layer in layers) + \
        ((pointing.rho2, 1.0), (0.0, 0.5), (0.0, 0.5))
    upper = ((0.0, 0.5), (1.0, 0.5), (1.0 + pointing.rho2, 1.0))
    return FoxHKernel(upper_params=upper, lower_params=lower,
                      m=len(layers) + 2, n=1)


def capacity_exact(dist: SnrDistribution) -> float:
    """Ergodic capacity E[log2(1 + kappa * SNR)] in bits/s/Hz."""
    if dist.snr_exponent != 2:
        raise ValueError("analytic capacity is derived for the squared-gain SNR "
                         "law (direct detection); use the Monte-Carlo estimator instead")
    sc = dist.scenario
    kern = capacity_kernel(sc.layers, sc.pointing)
    pref = 0.5 * LOG2_E * sc.pointing.rho2 * math.exp(-dist._ln_gammas)
    z = dist.z_scale / math.sqrt(sc.kappa * dist.gamma0)
    return pref * foxh_eval(kern, z)


# ---------------------------------------------------------------------------
# High-SNR asymptotics
# ---------------------------------------------------------------------------

_COLLISION_TOL = 1e-9


def _pole_ratios(scenario: LinkScenario) -> list[tuple[float, float, str]]:
    """(b_k/beta_k, beta_k, origin) for every left pole family of the CDF
    kernel; raises PoleCollisionError unless all ratios are distinct."""
    ratios = [(layer.d, 1.0 / layer.p, f"d[{i}]")
              for i, layer in enumerate(scenario.layers)]
    ratios.append((scenario.pointing.rho2, 1.0, "rho2"))
    for i in range(len(ratios)):
        for j in range(i + 1, len(ratios)):
            if abs(ratios[i][0] - ratios[j][0]) < _COLLISION_TOL:
                raise PoleCollisionError(
                    f"decay exponents collide: {ratios[i][2]} and {ratios[j][2]} "
                    f"both give {ratios[i][0]}")
    return ratios


def _leading_terms(dist: SnrDistribution, modulation: ModulationScheme | None
                   ) -> list[tuple[float, float, str]]:
    """Leading-residue coefficients (ratio r_k, gamma prefactor, origin).

    The BER variant multiplies in Gamma(phi + r_k/2).  Denominator gamma
    poles zero a term (reciprocal gamma is entire); an unexpected pole in a
    numerator factor is a deeper resonance and is rejected like a collision.
    """
    sc = dist.scenario
    rho2 = sc.pointing.rho2
    ratios = _pole_ratios(sc)
    out = []
    for k, (rk, beta_k, origin) in enumerate(ratios):
        coef = 1.0
        for j, (rj, beta_j, _) in enumerate(ratios):
            if j != k:
                x = (rj - rk) * beta_j
                g = _gamma(x)
                if not math.isfinite(g):
                    raise PoleCollisionError(
                        f"gamma-factor pole in term {origin}: argument {x}")
                coef *= g
        coef *= _gamma(rk) / beta_k
        coef *= _rgamma(1.0 + rho2 - rk) * _rgamma(1.0 + rk)
        if modulation is not None:
            coef *= _gamma(modulation.phi + rk / 2.0)
        out.append((rk, coef, origin))
    out.sort(key=lambda t: t[0])
    return out


def outage_asymptotic(dist: SnrDistribution, gamma_th: float
                      ) -> tuple[float, list[AsymptoticTerm]]:
    """High-SNR outage expansion: sum over pole families of
    coefficient * (z_scale * (gamma_th/gamma0)**(1/e))**r_k."""
    if gamma_th <= 0.0:
        raise ValueError(f"gamma_th must be positive, got {gamma_th}")
    e = dist.snr_exponent
    pref = dist.scenario.pointing.rho2 * math.exp(-dist._ln_gammas)
    z = dist.z_scale * (gamma_th / dist.gamma0) ** (1.0 / e)
    terms = []
    total = 0.0
    for rk, coef, origin in _leading_terms(dist, None):
        full = pref * coef * (dist.z_scale * gamma_th ** (1.0 / e)) ** rk
        terms.append(AsymptoticTerm(exponent=rk / e, coefficient=full, origin=origin))
        total += pref * coef * z ** rk
    return total, terms


def ber_asymptotic(dist: SnrDistribution, modulation: ModulationScheme
                   ) -> tuple[float, list[AsymptoticTerm]]:
    """High-SNR average-BER expansion (same pole set as outage, with the
    modulation gamma factor folded in and a sum over the q_n)."""
    if dist.snr_exponent != 2:
        raise ValueError("analytic BER asymptote requires the squared-gain SNR law")
    sc = dist.scenario
    pref = (modulation.delta * sc.pointing.rho2
            / (2.0 * math.exp(ln_gamma(modulation.phi)) * math.exp(dist._ln_gammas)))
    terms = []
    total = 0.0
    for rk, coef, origin in _leading_terms(dist, modulation):
        q_sum = sum((dist.z_scale / math.sqrt(qn)) ** rk for qn in modulation.q)
        full = pref * coef * q_sum
        terms.append(AsymptoticTerm(exponent=rk / 2.0, coefficient=full, origin=origin))
        total += full * dist.gamma0 ** (-rk / 2.0)
    return total, terms


def diversity_order(scenario: LinkScenario) -> float:
    """Decay exponent of the dominant high-SNR term:
    min over {d_i} and rho2, divided by the SNR exponent."""
    e = 2 if scenario.detection == "imdd" else 1
    smallest = min(min(layer.d for layer in scenario.layers),
                   scenario.pointing.rho2)
    return smallest / e


def diversity_readings(scenario: LinkScenario) -> dict[str, float]:
    """The dominant-exponent diversity order next to the two aggregate
    conventions seen in the cascaded-fading literature (they coincide only
    when the pointing exponent dominates every layer)."""
    e = 2 if scenario.detection == "imdd" else 1
    ds = [layer.d for layer in scenario.layers]
    rho2 = scenario.pointing.rho2
    return {
        "dominant_exponent": min(min(ds), rho2) / e,
        "sum_of_min": sum(min(d / e, rho2 / e) for d in ds),
        "min_of_sum": min(sum(ds) / e, rho2 / e),
    }
