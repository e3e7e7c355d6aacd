"""Domain model of the vertical optical link.

A scenario bundles the stack of turbulence layers, the pointing-error
fading parameters, the link power budget, the modulation template and the
detection mode.  Everything downstream (exact statistics, metrics, Monte
Carlo) consumes a validated ``LinkScenario``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace
from sys import float_info
from importlib import resources
from pathlib import Path

from .specfun import erf

DETECTION_MODES = ("imdd", "hd")


@dataclass(frozen=True)
class GGLayer:
    """One ocean stratum's generalized-Gamma gain distribution.

    Density ~ x**(d-1) * exp(-(x/a)**p); with p = 1 this is exactly a
    Gamma(shape d, scale a) law (thermally uniform stratum).
    """
    a: float   # scale, normalized channel-gain units
    d: float   # shape
    p: float   # shape


@dataclass(frozen=True)
class PointingError:
    """Zero-boresight misalignment fading: density ~ h**(rho2 - 1) on [0, a0]."""
    rho2: float   # (equivalent beam width / twice the jitter deviation)**2
    a0: float     # maximal collected power fraction, in (0, 1]


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power, noise and path-loss parameters."""
    pt_dbm: float                              # transmit optical power [dBm]
    sigma_w2: float                            # AWGN variance [noise units]
    alpha: float                               # extinction coefficient [1/m]
    length_m: float                            # total vertical distance [m]
    pt_dbm_range: tuple[float, float] | None = None   # optional sweep bounds

    @property
    def path_gain(self) -> float:
        return math.exp(-self.alpha * self.length_m)

    @property
    def pt_watts(self) -> float:
        return 10.0 ** ((self.pt_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ModulationScheme:
    """Generic BER template (delta, phi, q_n): conditional bit-error rate
    delta/(2*Gamma(phi)) * sum_n Gamma(phi, q_n * snr)."""
    delta: float
    phi: float
    q: tuple[float, ...]


# on-off keying: conditional BER reduces to Q(sqrt(snr))
OOK = ModulationScheme(delta=1.0, phi=0.5, q=(0.5,))
MODULATION_PRESETS = {"ook": OOK}


@dataclass(frozen=True)
class LinkScenario:
    """Full input to every metric: layer stack + pointing + budget +
    modulation + detection mode."""
    layers: tuple[GGLayer, ...]
    pointing: PointingError
    budget: LinkBudget
    modulation: ModulationScheme
    detection: str = "imdd"

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def snr_exponent(self) -> int:
        """Power of the channel gain in the instantaneous SNR: 2 for
        direct detection, 1 for heterodyne."""
        return 2 if self.detection == "imdd" else 1

    @property
    def kappa(self) -> float:
        """SNR scale constant inside the capacity log."""
        return math.e / (2.0 * math.pi) if self.detection == "imdd" else 1.0


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------

def pointing_from_geometry(r: float, w_z: float, sigma_s: float) -> PointingError:
    """Build pointing parameters from receiver geometry.

    ``r`` aperture radius, ``w_z`` beam width at the receiver, ``sigma_s``
    displacement (jitter) deviation, all in meters.
    """
    if r <= 0 or w_z <= 0 or sigma_s <= 0:
        raise ValueError("r, w_z and sigma_s must all be positive")
    upsilon = math.sqrt(math.pi / 2.0) * r / w_z
    a0 = erf(upsilon) ** 2
    # equivalent beam width: w_eq^2 = w_z^2 sqrt(pi) erf(u) exp(u^2) / (2u);
    # assembled in log space because exp(u^2) overflows for wide apertures
    ln_rho2 = (2.0 * math.log(w_z) + 0.5 * math.log(math.pi)
               + math.log(erf(upsilon)) + upsilon ** 2
               - math.log(2.0 * upsilon) - math.log(4.0 * sigma_s ** 2))
    if ln_rho2 > math.log(float_info.max):
        raise ValueError("aperture/beam ratio too large: the equivalent "
                         "beam width overflows; misalignment is negligible")
    return PointingError(rho2=math.exp(ln_rho2), a0=a0)


def average_snr(budget: LinkBudget, detection: str = "imdd") -> float:
    """Average electrical SNR: (P_t * h_l)**2 / sigma_w2 for direct
    detection, P_t * h_l / sigma_w2 for heterodyne."""
    if detection not in DETECTION_MODES:
        raise ValueError(f"unknown detection mode {detection!r}")
    p_hl = budget.pt_watts * budget.path_gain
    if detection == "imdd":
        return p_hl ** 2 / budget.sigma_w2
    return p_hl / budget.sigma_w2


def validate_scenario(s: LinkScenario) -> list[str]:
    """Collect invariant violations; an empty list means the scenario is
    usable by every analytic and Monte-Carlo routine."""
    out = []
    if len(s.layers) < 1:
        out.append("layers: at least one layer is required")
    for i, layer in enumerate(s.layers):
        for name in ("a", "d", "p"):
            v = getattr(layer, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                out.append(f"layers[{i}].{name}: must be finite and > 0 (got {v!r})")
    pe = s.pointing
    if not (math.isfinite(pe.rho2) and pe.rho2 > 0):
        out.append(f"pointing.rho2: must be finite and > 0 (got {pe.rho2!r})")
    if not (math.isfinite(pe.a0) and 0 < pe.a0 <= 1):
        out.append(f"pointing.a0: must lie in (0, 1] (got {pe.a0!r})")
    b = s.budget
    if not math.isfinite(b.pt_dbm):
        out.append(f"budget.pt_dbm: must be finite (got {b.pt_dbm!r})")
    if not (math.isfinite(b.sigma_w2) and b.sigma_w2 > 0):
        out.append(f"budget.sigma_w2: must be > 0 (got {b.sigma_w2!r})")
    if not (math.isfinite(b.alpha) and b.alpha >= 0):
        out.append(f"budget.alpha: must be >= 0 (got {b.alpha!r})")
    if not (math.isfinite(b.length_m) and b.length_m > 0):
        out.append(f"budget.length_m: must be > 0 (got {b.length_m!r})")
    mod = s.modulation
    if not (math.isfinite(mod.delta) and mod.delta > 0):
        out.append(f"modulation.delta: must be > 0 (got {mod.delta!r})")
    if not (math.isfinite(mod.phi) and mod.phi > 0):
        out.append(f"modulation.phi: must be > 0 (got {mod.phi!r})")
    if len(mod.q) < 1:
        out.append("modulation.q: at least one q_n is required")
    for i, qn in enumerate(mod.q):
        if not (math.isfinite(qn) and qn > 0):
            out.append(f"modulation.q[{i}]: must be > 0 (got {qn!r})")
    if s.detection not in DETECTION_MODES:
        out.append(f"detection: must be one of {DETECTION_MODES} (got {s.detection!r})")
    return out


def with_rho2(s: LinkScenario, rho2: float) -> LinkScenario:
    return replace(s, pointing=replace(s.pointing, rho2=rho2))


# ---------------------------------------------------------------------------
# Scenario config file format (JSON)
# ---------------------------------------------------------------------------

class ScenarioFormatError(ValueError):
    """Config document is malformed (missing/unknown fields, wrong types)."""


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ScenarioFormatError(f"{where}: missing required field {key!r}")
    return mapping[key]


def parse_scenario(doc: dict) -> LinkScenario:
    """Build a scenario from a parsed config document (see file format in
    the README).  Structural problems raise ScenarioFormatError; value
    violations are left to :func:`validate_scenario`."""
    if not isinstance(doc, dict):
        raise ScenarioFormatError("top level: expected a JSON object")
    layers_doc = _require(doc, "layers", "top level")
    if not isinstance(layers_doc, list):
        raise ScenarioFormatError("layers: expected an array")
    layers = []
    for i, ld in enumerate(layers_doc):
        if not isinstance(ld, dict):
            raise ScenarioFormatError(f"layers[{i}]: expected an object")
        layers.append(GGLayer(a=float(_require(ld, "a", f"layers[{i}]")),
                              d=float(_require(ld, "d", f"layers[{i}]")),
                              p=float(_require(ld, "p", f"layers[{i}]"))))

    pd = _require(doc, "pointing", "top level")
    if not isinstance(pd, dict):
        raise ScenarioFormatError("pointing: expected an object")
    if "rho2" in pd:
        pointing = PointingError(rho2=float(pd["rho2"]), a0=float(_require(pd, "a0", "pointing")))
    elif "r" in pd:
        pointing = pointing_from_geometry(float(pd["r"]),
                                          float(_require(pd, "w_z", "pointing")),
                                          float(_require(pd, "sigma_s", "pointing")))
    else:
        raise ScenarioFormatError("pointing: need either {rho2, a0} or {r, w_z, sigma_s}")

    bd = _require(doc, "budget", "top level")
    if not isinstance(bd, dict):
        raise ScenarioFormatError("budget: expected an object")
    rng = bd.get("pt_dbm_range")
    if rng is not None:
        if not (isinstance(rng, list) and len(rng) == 2):
            raise ScenarioFormatError("budget.pt_dbm_range: expected [start, stop]")
        rng = (float(rng[0]), float(rng[1]))
    if "pt_dbm" in bd:
        pt = float(bd["pt_dbm"])
    elif rng is not None:
        pt = rng[1]   # default operating point: top of the declared sweep
    else:
        raise ScenarioFormatError("budget: need pt_dbm or pt_dbm_range")
    budget = LinkBudget(pt_dbm=pt,
                        sigma_w2=float(_require(bd, "sigma_w2", "budget")),
                        alpha=float(_require(bd, "alpha", "budget")),
                        length_m=float(_require(bd, "length_m", "budget")),
                        pt_dbm_range=rng)

    md = _require(doc, "modulation", "top level")
    if isinstance(md, str):
        if md not in MODULATION_PRESETS:
            raise ScenarioFormatError(f"modulation: unknown preset {md!r}")
        modulation = MODULATION_PRESETS[md]
    elif isinstance(md, dict):
        q = _require(md, "q", "modulation")
        if not isinstance(q, list):
            raise ScenarioFormatError("modulation.q: expected an array")
        modulation = ModulationScheme(delta=float(_require(md, "delta", "modulation")),
                                      phi=float(_require(md, "phi", "modulation")),
                                      q=tuple(float(v) for v in q))
    else:
        raise ScenarioFormatError("modulation: expected a preset name or an object")

    detection = doc.get("detection", "imdd")
    if not isinstance(detection, str):
        raise ScenarioFormatError("detection: expected a string")
    return LinkScenario(layers=tuple(layers), pointing=pointing, budget=budget,
                        modulation=modulation, detection=detection)


def scenario_to_dict(s: LinkScenario) -> dict:
    """Canonical document form; serialize -> parse is the identity."""
    doc = {
        "layers": [{"a": l.a, "d": l.d, "p": l.p} for l in s.layers],
        "pointing": {"rho2": s.pointing.rho2, "a0": s.pointing.a0},
        "budget": {"pt_dbm": s.budget.pt_dbm,
                   "sigma_w2": s.budget.sigma_w2,
                   "alpha": s.budget.alpha,
                   "length_m": s.budget.length_m},
        "modulation": {"delta": s.modulation.delta,
                       "phi": s.modulation.phi,
                       "q": list(s.modulation.q)},
        "detection": s.detection,
    }
    if s.budget.pt_dbm_range is not None:
        doc["budget"]["pt_dbm_range"] = list(s.budget.pt_dbm_range)
    return doc


def dumps_scenario(s: LinkScenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2, sort_keys=True) + "\n"


def loads_scenario(text: str) -> LinkScenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"invalid JSON: {exc}") from exc
    return parse_scenario(doc)


SCENARIO_DIR_ENV = "UWOCLINK_SCENARIO_DIR"


def resolve_scenario_path(name: str) -> Path:
    """Resolve a CLI scenario argument: literal path first, then the
    directory named by $UWOCLINK_SCENARIO_DIR, then the bundled files."""
    p = Path(name)
    if p.exists():
        return p
    candidates = [name] if name.endswith(".json") else [name + ".json", name]
    env_dir = os.environ.get(SCENARIO_DIR_ENV)
    if env_dir:
        for cand in candidates:
            q = Path(env_dir) / cand
            if q.exists():
                return q
    pkg_dir = resources.files(__package__) / "scenarios"
    for cand in candidates:
        q = Path(str(pkg_dir / cand))
        if q.exists():
            return q
    raise FileNotFoundError(f"scenario {name!r} not found (cwd, "
                            f"${SCENARIO_DIR_ENV}, bundled)")


def load_scenario(path: str | Path) -> LinkScenario:
    return loads_scenario(Path(resolve_scenario_path(str(path))).read_text())
