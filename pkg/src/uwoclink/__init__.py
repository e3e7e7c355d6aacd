"""Performance metrics for vertical underwater optical links: cascaded
generalized-Gamma turbulence layers with zero-boresight pointing errors.

Exact statistics go through a numerical Fox H-function evaluator
(:mod:`uwoclink.specfun`); independent Monte-Carlo estimators
(:mod:`uwoclink.mc`) cross-check every analytic expression.
"""

from .channel import (
    GGLayer,
    LinkBudget,
    LinkScenario,
    ModulationScheme,
    OOK,
    PointingError,
    average_snr,
    load_scenario,
    pointing_from_geometry,
    validate_scenario,
)
from .mc import MetricEstimate, estimate_ber, estimate_capacity, estimate_outage
from .metrics import (
    AsymptoticTerm,
    PoleCollisionError,
    ber_asymptotic,
    ber_exact,
    capacity_exact,
    diversity_order,
    outage_asymptotic,
    outage_exact,
)
from .specfun import FoxHConvergenceError, FoxHKernel, foxh_eval
from .stats import (
    SnrDistribution,
    cascade_moment,
    cdf_snr,
    combined_moment,
    pdf_cascade,
    pdf_combined,
    pdf_snr,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticTerm",
    "FoxHConvergenceError",
    "FoxHKernel",
    "GGLayer",
    "LinkBudget",
    "LinkScenario",
    "MetricEstimate",
    "ModulationScheme",
    "OOK",
    "PointingError",
    "PoleCollisionError",
    "SnrDistribution",
    "average_snr",
    "ber_asymptotic",
    "ber_exact",
    "capacity_exact",
    "cascade_moment",
    "cdf_snr",
    "combined_moment",
    "diversity_order",
    "estimate_ber",
    "estimate_capacity",
    "estimate_outage",
    "foxh_eval",
    "load_scenario",
    "outage_asymptotic",
    "outage_exact",
    "pdf_cascade",
    "pdf_combined",
    "pdf_snr",
    "pointing_from_geometry",
    "validate_scenario",
]
