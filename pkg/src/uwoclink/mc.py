"""Monte-Carlo sampling of the end-to-end channel and metric estimation.

These estimators are the independent cross-check for every analytic
expression in the package: they touch the channel model only through
direct sampling (numpy gamma variates plus the pointing inverse CDF) and
never call the H-function machinery.

Reproducibility contract: an estimate is a pure function of
(scenario, estimator arguments, n_samples, seed, n_streams).  Work is
split into ``n_streams`` deterministic sub-streams spawned from one seed
sequence and merged in stream order, so results do not depend on how the
streams are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc as _gammaincc

from .channel import GGLayer, LinkScenario, ModulationScheme, PointingError, average_snr

_BLOCK = 1_000_000   # per-draw memory cap inside a stream


@dataclass(frozen=True)
class MetricEstimate:
    """Point estimate with its standard error and reproducibility tuple."""
    value: float
    std_error: float
    n_samples: int
    seed: int
    warning: str | None = None


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def sample_gg(layer: GGLayer, rng: np.random.Generator, size=None):
    """Generalized-Gamma variates: a * G**(1/p) with G ~ Gamma(d/p, 1).

    The power transform maps the Gamma density exactly onto the layer
    density, for any positive shape.
    """
    g = rng.gamma(layer.d / layer.p, 1.0, size=size)
    return layer.a * g ** (1.0 / layer.p)


def sample_pointing(pe: PointingError, u):
    """Pointing gain by CDF inversion: h_p = a0 * u**(1/rho2) for u in [0, 1]."""
    return pe.a0 * np.asarray(u) ** (1.0 / pe.rho2)


def sample_snr(scenario: LinkScenario, rng: np.random.Generator, size=None,
               gamma0: float | None = None):
    """Instantaneous SNR draws gamma0 * (prod_i h_i * h_p)**e."""
    if gamma0 is None:
        gamma0 = average_snr(scenario.budget, scenario.detection)
    h = np.ones(size if size is not None else ())
    for layer in scenario.layers:
        h = h * sample_gg(layer, rng, size=size)
    h = h * sample_pointing(scenario.pointing, rng.uniform(size=size))
    return gamma0 * h ** scenario.snr_exponent


def conditional_ber(modulation: ModulationScheme, gamma):
    """Bit-error probability conditioned on the SNR:
    delta/2 * sum_n Q_reg(phi, q_n * gamma) with Q_reg the regularized
    upper incomplete gamma.  For on-off keying this is Q(sqrt(gamma))."""
    gamma = np.asarray(gamma, dtype=float)
    acc = np.zeros_like(gamma)
    for qn in modulation.q:
        acc += _gammaincc(modulation.phi, qn * gamma)
    return 0.5 * modulation.delta * acc


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------

def _stream_sizes(n_samples: int, n_streams: int) -> list[int]:
    base, extra = divmod(n_samples, n_streams)
    return [base + (1 if i < extra else 0) for i in range(n_streams)]


def _iter_snr_blocks(scenario, n_samples, seed, n_streams, gamma0):
    """Yield SNR sample blocks; the (stream, block) layout is fixed by
    (n_samples, n_streams) alone, keeping merges deterministic."""
    streams = np.random.SeedSequence(seed).spawn(n_streams)
    for ss, size in zip(streams, _stream_sizes(n_samples, n_streams)):
        rng = np.random.Generator(np.random.PCG64(ss))
        done = 0
        while done < size:
            take = min(_BLOCK, size - done)
            yield sample_snr(scenario, rng, size=take, gamma0=gamma0)
            done += take


def _mean_estimate(block_iter, n_samples: int, seed: int,
                   transform) -> MetricEstimate:
    total = 0.0
    total_sq = 0.0
    for block in block_iter:
        vals = transform(block)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    if n_samples > 1:
        var *= n_samples / (n_samples - 1)
    return MetricEstimate(value=mean, std_error=math.sqrt(var / n_samples),
                          n_samples=n_samples, seed=seed)


def estimate_outage(scenario: LinkScenario, gamma_th: float, n_samples: int,
                    seed: int, n_streams: int = 1,
                    gamma0: float | None = None) -> MetricEstimate:
    """Fraction of SNR draws below gamma_th, with binomial standard error."""
    if n_samples < 1_000:
        raise ValueError("use at least 1000 samples for a proportion estimate")
    hits = 0
    for block in _iter_snr_blocks(scenario, n_samples, seed, n_streams, gamma0):
        hits += int(np.count_nonzero(block < gamma_th))
    p_hat = hits / n_samples
    se = math.sqrt(p_hat * (1.0 - p_hat) / n_samples)
    warning = None
    if hits < 100:
        warning = (f"only {hits} outage events observed; deep-tail estimate "
                   "is unreliable at this sample budget")
    return MetricEstimate(value=p_hat, std_error=se, n_samples=n_samples,
                          seed=seed, warning=warning)


def estimate_ber(scenario: LinkScenario, modulation: ModulationScheme,
                 n_samples: int, seed: int, n_streams: int = 1,
                 gamma0: float | None = None) -> MetricEstimate:
    """Sample mean of the conditional bit-error probability."""
    if n_samples < 1_000:
        raise ValueError("use at least 1000 samples")
    blocks = _iter_snr_blocks(scenario, n_samples, seed, n_streams, gamma0)
    return _mean_estimate(blocks, n_samples, seed,
                          lambda g: conditional_ber(modulation, g))


def estimate_capacity(scenario: LinkScenario, n_samples: int, seed: int,
                      n_streams: int = 1,
                      gamma0: float | None = None) -> MetricEstimate:
    """Sample mean of log2(1 + kappa * SNR) in bits/s/Hz."""
    if n_samples < 1_000:
        raise ValueError("use at least 1000 samples")
    kappa = scenario.kappa
    blocks = _iter_snr_blocks(scenario, n_samples, seed, n_streams, gamma0)
    return _mean_estimate(blocks, n_samples, seed,
                          lambda g: np.log2(1.0 + kappa * g))


def ber_from_samples(snr, modulation: ModulationScheme, seed: int = 0) -> MetricEstimate:
    """BER estimate from externally supplied SNR samples (deterministic
    overrides, importance studies, ...)."""
    snr = np.asarray(snr, dtype=float)
    vals = conditional_ber(modulation, snr)
    n = vals.size
    se = float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MetricEstimate(value=float(vals.mean()), std_error=se,
                          n_samples=n, seed=seed)


def capacity_from_samples(snr, kappa: float, seed: int = 0) -> MetricEstimate:
    """Capacity estimate from externally supplied SNR samples."""
    vals = np.log2(1.0 + kappa * np.asarray(snr, dtype=float))
    n = vals.size
    se = float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MetricEstimate(value=float(vals.mean()), std_error=se,
                          n_samples=n, seed=seed)
