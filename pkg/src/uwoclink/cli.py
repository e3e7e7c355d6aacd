"""Command-line front end: sweeps, scenario self-checks, diversity report.

    uwoclink sweep --scenario table1 --sweep pt_dbm=-10:55:14 \
        --metrics outage,ber --modes exact,asymptotic,mc --gamma-th 1 \
        --samples 1000000 --seed 1 --out sweep.csv
    uwoclink validate --scenario table1
    uwoclink diversity --scenario table1 --rho2 6

CSV cells use shortest round-trip float formatting; identical inputs give
byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import channel, mc, metrics, stats
from .channel import LinkScenario, ScenarioFormatError
from .metrics import PoleCollisionError
from .specfun import FoxHConvergenceError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

METRIC_NAMES = ("outage", "ber", "capacity")
MODE_NAMES = ("exact", "asymptotic", "mc")


@dataclass(frozen=True)
class SweepSpec:
    variable: str                      # "pt_dbm" or "gamma0_db"
    start: float
    stop: float
    points: int
    log_spaced: bool = False
    metrics: tuple[str, ...] = ("outage",)
    modes: tuple[str, ...] = ("exact",)
    gamma_th: float | None = None      # required when outage is requested
    mc_samples: int = 1_000_000
    seed: int = 1

    def __post_init__(self):
        if self.variable not in ("pt_dbm", "gamma0_db"):
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if not self.start < self.stop:
            raise ValueError("sweep start must be below stop")
        if self.points < 2:
            raise ValueError("sweep needs at least 2 points")
        if not self.metrics or any(m not in METRIC_NAMES for m in self.metrics):
            raise ValueError(f"metrics must be a nonempty subset of {METRIC_NAMES}")
        if not self.modes or any(m not in MODE_NAMES for m in self.modes):
            raise ValueError(f"modes must be a nonempty subset of {MODE_NAMES}")
        if "outage" in self.metrics and self.gamma_th is None:
            raise ValueError("outage sweeps require --gamma-th")

    def values(self) -> np.ndarray:
        if self.log_spaced:
            if self.start <= 0:
                raise ValueError("log spacing requires positive start")
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


def _fmt(x) -> str:
    """Shortest decimal form that parses back to the same float."""
    return repr(float(x))


def _point_seed(seed: int, index: int, slot: int) -> int:
    return int(np.random.SeedSequence([seed, index, slot]).generate_state(1)[0])


def _sweep_row(scenario: LinkScenario, sweep: SweepSpec, index: int,
               value: float) -> dict[str, str]:
    if sweep.variable == "pt_dbm":
        scenario = replace(scenario, budget=replace(scenario.budget, pt_dbm=value))
        gamma0 = channel.average_snr(scenario.budget, scenario.detection)
    else:
        gamma0 = 10.0 ** (value / 10.0)
    row = {"sweep_value": _fmt(value), "gamma0_db": _fmt(10.0 * math.log10(gamma0))}
    errors = []
    dist = stats.SnrDistribution.from_scenario(scenario, gamma0=gamma0)

    for slot, metric in enumerate(m for m in METRIC_NAMES if m in sweep.metrics):
        if "exact" in sweep.modes:
            try:
                if metric == "outage":
                    v = metrics.outage_exact(dist, sweep.gamma_th)
                elif metric == "ber":
                    v = metrics.ber_exact(dist, scenario.modulation)
                else:
                    v = metrics.capacity_exact(dist)
                row[f"{metric}_exact"] = _fmt(v)
            except (ValueError, ArithmeticError, FoxHConvergenceError) as exc:
                errors.append(f"{metric}_exact: {exc}")
        if "asymptotic" in sweep.modes and metric != "capacity":
            try:
                if metric == "outage":
                    v, _ = metrics.outage_asymptotic(dist, sweep.gamma_th)
                else:
                    v, _ = metrics.ber_asymptotic(dist, scenario.modulation)
                row[f"{metric}_asymptotic"] = _fmt(v)
            except (ValueError, PoleCollisionError) as exc:
                errors.append(f"{metric}_asymptotic: {exc}")
        if "mc" in sweep.modes:
            seed = _point_seed(sweep.seed, index, slot)
            try:
                if metric == "outage":
                    est = mc.estimate_outage(scenario, sweep.gamma_th,
                                             sweep.mc_samples, seed, gamma0=gamma0)
                elif metric == "ber":
                    est = mc.estimate_ber(scenario, scenario.modulation,
                                          sweep.mc_samples, seed, gamma0=gamma0)
                else:
                    est = mc.estimate_capacity(scenario, sweep.mc_samples, seed,
                                               gamma0=gamma0)
                row[f"{metric}_mc"] = _fmt(est.value)
                row[f"{metric}_mc_stderr"] = _fmt(est.std_error)
                if est.warning:
                    errors.append(f"{metric}_mc: {est.warning}")
            except ValueError as exc:
                errors.append(f"{metric}_mc: {exc}")
    row["error"] = "; ".join(errors)
    return row


def run_sweep(scenario_file: str | Path, sweep: SweepSpec,
              out_path: str | Path) -> None:
    """Evaluate the requested metrics over the sweep grid and write one
    CSV row per point.  Per-point numerical failures land in the ``error``
    column and never abort the sweep."""
    scenario = channel.load_scenario(scenario_file)
    problems = channel.validate_scenario(scenario)
    if problems:
        raise ScenarioValidationError(problems)
    columns = ["sweep_value", "gamma0_db"]
    for metric in (m for m in METRIC_NAMES if m in sweep.metrics):
        columns += [f"{metric}_exact", f"{metric}_asymptotic",
                    f"{metric}_mc", f"{metric}_mc_stderr"]
    columns.append("error")
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, restval="",
                                lineterminator="\n")
        writer.writeheader()
        for i, value in enumerate(sweep.values()):
            writer.writerow(_sweep_row(scenario, sweep, i, float(value)))


class ScenarioValidationError(Exception):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


# ---------------------------------------------------------------------------
# validate subcommand: desk-scale self-check suite
# ---------------------------------------------------------------------------

def _check(lines: list[str], name: str, ok: bool, detail: str) -> bool:
    lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


def validate_report(scenario: LinkScenario, samples: int = 100_000,
                    seed: int = 20_260_810) -> tuple[list[str], bool]:
    """Run the reduction-identity and oracle-consistency checks on one
    scenario at a reduced sample budget; returns (report lines, all ok)."""
    from scipy import integrate
    from .specfun import FoxHKernel, foxh_eval

    lines: list[str] = []
    ok = True

    # H-function reduction identities (scenario-independent sanity)
    exp_kern = FoxHKernel((), ((0.0, 1.0),), m=1, n=0)
    worst = max(abs(foxh_eval(exp_kern, z) / math.exp(-z) - 1.0)
                for z in np.geomspace(0.01, 20.0, 9))
    ok &= _check(lines, "identity exp", worst < 1e-8, f"max rel err {worst:.2e}")
    k0_kern = FoxHKernel((), ((0.0, 1.0), (0.0, 1.0)), m=2, n=0)
    from scipy.special import k0 as _k0
    worst = max(abs(foxh_eval(k0_kern, z) / (2.0 * _k0(2.0 * math.sqrt(z))) - 1.0)
                for z in np.geomspace(0.01, 10.0, 9))
    ok &= _check(lines, "identity bessel-k0", worst < 1e-8, f"max rel err {worst:.2e}")

    dist = stats.SnrDistribution.from_scenario(scenario)
    if dist.is_extension:
        lines.append("[note] heterodyne SNR law: analytic branch is an extension")

    # density normalization via quadrature in the kernel-argument variable
    e = dist.snr_exponent
    def _pdf_x(x):
        g = dist.gamma0 * (x / dist.z_scale) ** e
        return stats.pdf_snr(dist, g) * dist.gamma0 * e * x ** (e - 1) / dist.z_scale ** e
    norm, _ = integrate.quad(_pdf_x, 0.0, np.inf, limit=200)
    ok &= _check(lines, "pdf normalization", abs(norm - 1.0) < 1e-4,
                 f"integral {norm:.6f}")

    # quadrature moments against the closed form
    for order in (1.0, 2.0):
        target = dist.gamma0 ** order * stats.combined_moment(
            scenario.layers, scenario.pointing, e * order)
        val, _ = integrate.quad(
            lambda x: _pdf_x(x) * (dist.gamma0 * (x / dist.z_scale) ** e) ** order,
            0.0, np.inf, limit=200)
        rel = abs(val / target - 1.0)
        ok &= _check(lines, f"snr moment n={order:g}", rel < 1e-4,
                     f"quadrature vs closed form rel err {rel:.2e}")

    # CDF vs PDF by central finite differences
    worst = 0.0
    for frac in (1e-4, 1e-2, 1.0):
        g = dist.gamma0 * frac * (scenario.pointing.a0 *
                                  math.prod(l.a for l in scenario.layers)) ** e
        h = 1e-4 * g
        deriv = (stats.cdf_snr(dist, g + h) - stats.cdf_snr(dist, g - h)) / (2 * h)
        worst = max(worst, abs(deriv / stats.pdf_snr(dist, g) - 1.0))
    ok &= _check(lines, "cdf/pdf consistency", worst < 1e-4,
                 f"max rel err {worst:.2e}")

    # Monte-Carlo oracle: moments and empirical CDF
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    snr = mc.sample_snr(scenario, rng, size=samples)
    for order in (1.0, 2.0):
        target = dist.gamma0 ** order * stats.combined_moment(
            scenario.layers, scenario.pointing, e * order)
        vals = snr ** order
        se = vals.std(ddof=1) / math.sqrt(samples)
        zscore = abs(vals.mean() - target) / se
        ok &= _check(lines, f"mc moment n={order:g}", zscore < 4.0,
                     f"|z| = {zscore:.2f} at {samples} samples")
    eps = math.sqrt(math.log(2.0 / 0.01) / (2.0 * samples))
    worst = 0.0
    for frac in np.geomspace(1e-4, 1.0, 5):
        g = float(np.quantile(snr, 0.5)) * frac
        emp = float(np.mean(snr < g))
        worst = max(worst, abs(emp - stats.cdf_snr(dist, g)))
    ok &= _check(lines, "mc empirical cdf", worst < eps,
                 f"max |emp - analytic| {worst:.2e} vs DKW band {eps:.2e}")

    # asymptote agreement where the exact outage is already small
    try:
        gamma_th = 1.0
        g0_hi = dist.gamma0
        p = metrics.outage_exact(dist, gamma_th)
        while p > 1e-4:
            g0_hi *= 100.0
            hi = stats.SnrDistribution.from_scenario(scenario, gamma0=g0_hi)
            p = metrics.outage_exact(hi, gamma_th)
        hi = stats.SnrDistribution.from_scenario(scenario, gamma0=g0_hi)
        asy, _ = metrics.outage_asymptotic(hi, gamma_th)
        rel = abs(asy / p - 1.0)
        ok &= _check(lines, "outage asymptote", rel < 0.05,
                     f"asym/exact - 1 = {rel:.2e} at outage {p:.2e}")
    except PoleCollisionError as exc:
        lines.append(f"[skip] outage asymptote: pole collision ({exc}); "
                     "exact metrics unaffected")

    # determinism of the estimators
    est1 = mc.estimate_outage(scenario, 1.0, 10_000, seed=seed)
    est2 = mc.estimate_outage(scenario, 1.0, 10_000, seed=seed)
    ok &= _check(lines, "mc determinism", est1 == est2,
                 "identical seed gives identical estimate")
    return lines, ok


# ---------------------------------------------------------------------------
# diversity subcommand
# ---------------------------------------------------------------------------

def diversity_report(scenario: LinkScenario, gamma_th: float = 1.0) -> list[str]:
    """Dominant-exponent diversity order, the two aggregate conventions,
    and the slope actually measured on a high-SNR outage sweep."""
    readings = metrics.diversity_readings(scenario)
    lines = [
        f"diversity order (dominant exponent): {readings['dominant_exponent']:.6g}",
        f"alternative reading, sum of per-layer minima: {readings['sum_of_min']:.6g}",
        f"alternative reading, min of layer sum vs pointing: {readings['min_of_sum']:.6g}",
    ]
    g0_lo, g0_hi = 1e14, 1e16
    lo = stats.SnrDistribution.from_scenario(scenario, gamma0=g0_lo)
    hi = stats.SnrDistribution.from_scenario(scenario, gamma0=g0_hi)
    p_lo = metrics.outage_exact(lo, gamma_th)
    p_hi = metrics.outage_exact(hi, gamma_th)
    slope = (math.log10(p_lo) - math.log10(p_hi)) / (math.log10(g0_hi) - math.log10(g0_lo))
    lines.append(f"measured outage slope over gamma0 in [1e14, 1e16] "
                 f"(gamma_th={gamma_th:g}): {slope:.4f}")
    return lines


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _parse_sweep_arg(text: str) -> tuple[str, float, float, int, bool]:
    try:
        var, rest = text.split("=", 1)
        parts = rest.split(":")
        log_spaced = False
        if len(parts) == 4:
            if parts[3] != "log":
                raise ValueError
            log_spaced = True
            parts = parts[:3]
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(
            f"expected VAR=START:STOP:POINTS[:log], got {text!r}")
    return var, start, stop, points, log_spaced


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uwoclink",
        description="Outage / BER / capacity metrics for cascaded "
                    "underwater optical links")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--scenario", required=True,
                       help="scenario file (path, name in $%s, or bundled name)"
                            % channel.SCENARIO_DIR_ENV)
        p.add_argument("--detection", choices=channel.DETECTION_MODES,
                       help="override the scenario's detection mode")
        p.add_argument("--rho2", type=float,
                       help="override the pointing-error exponent")

    p_sweep = sub.add_parser("sweep", help="evaluate metrics over a parameter grid")
    add_common(p_sweep)
    p_sweep.add_argument("--sweep", required=True, type=_parse_sweep_arg,
                         metavar="VAR=START:STOP:POINTS[:log]")
    p_sweep.add_argument("--metrics", type=_csv_list, default=("outage",),
                         help="comma list from outage,ber,capacity")
    p_sweep.add_argument("--modes", type=_csv_list, default=("exact",),
                         help="comma list from exact,asymptotic,mc")
    p_sweep.add_argument("--gamma-th", type=float, default=None)
    p_sweep.add_argument("--samples", type=int, default=1_000_000)
    p_sweep.add_argument("--seed", type=int, default=1)
    p_sweep.add_argument("--out", required=True)

    p_val = sub.add_parser("validate", help="run the scenario self-check suite")
    add_common(p_val)
    p_val.add_argument("--samples", type=int, default=100_000)
    p_val.add_argument("--seed", type=int, default=20_260_810)

    p_div = sub.add_parser("diversity", help="report diversity-order readings")
    add_common(p_div)
    p_div.add_argument("--gamma-th", type=float, default=1.0)
    return parser


def _load_cli_scenario(args) -> LinkScenario:
    scenario = channel.load_scenario(args.scenario)
    if args.detection:
        scenario = replace(scenario, detection=args.detection)
    if args.rho2 is not None:
        scenario = channel.with_rho2(scenario, args.rho2)
    return scenario


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = _load_cli_scenario(args)
    except (ScenarioFormatError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    problems = channel.validate_scenario(scenario)
    if problems:
        for p in problems:
            print(f"validation: {p}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.command == "sweep":
        var, start, stop, points, log_spaced = args.sweep
        try:
            spec = SweepSpec(variable=var, start=start, stop=stop, points=points,
                             log_spaced=log_spaced, metrics=args.metrics,
                             modes=args.modes, gamma_th=args.gamma_th,
                             mc_samples=args.samples, seed=args.seed)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        columns = ["sweep_value", "gamma0_db"]
        for metric in (m for m in METRIC_NAMES if m in spec.metrics):
            columns += [f"{metric}_exact", f"{metric}_asymptotic",
                        f"{metric}_mc", f"{metric}_mc_stderr"]
        columns.append("error")
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns, restval="",
                                    lineterminator="\n")
            writer.writeheader()
            for i, value in enumerate(spec.values()):
                writer.writerow(_sweep_row(scenario, spec, i, float(value)))
        print(f"wrote {args.out}")
        return EXIT_OK

    if args.command == "validate":
        lines, ok = validate_report(scenario, samples=args.samples, seed=args.seed)
        for line in lines:
            print(line)
        return EXIT_OK if ok else EXIT_NUMERICAL

    if args.command == "diversity":
        for line in diversity_report(scenario, gamma_th=args.gamma_th):
            print(line)
        return EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
