"""Scenario configuration: a JSON file with exact rationals as strings.

Probabilities and payoffs are parsed with Fraction, never float, so a
config round-trips through validation without losing exactness.  Every
validation failure carries the path of the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import FieldPartition, RandomQuantity, build_space
from .extensions import BoundsError
from .plans import (
    BlockAlternatingPlan,
    ConstantMixturePlan,
    CoordinatePlan,
    RegimeMixturePlan,
    Scenario,
    make_schedule,
    target_mixture_weight,
)
from .engine import DEFAULT_BUDGET, EVENT_KINDS, TargetSet


class ConfigError(ValueError):
    """Invalid configuration; `path` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


def _rational(raw: Any, path: str) -> Fraction:
    if isinstance(raw, bool) or isinstance(raw, float):
        raise ConfigError(path, f"expected an exact rational string, got {raw!r}")
    try:
        return Fraction(raw)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(path, f"not a rational: {raw!r} ({exc})") from None


def _require(mapping: dict, key: str, path: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return mapping[key]


def _int(raw: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigError(path, f"expected an integer, got {raw!r}")
    if minimum is not None and raw < minimum:
        raise ConfigError(path, f"must be at least {minimum}, got {raw}")
    return raw


@dataclass(frozen=True)
class RunSpec:
    n_max: int
    trials: int
    seed: int
    budget: int
    checkpoints: tuple[int, ...] | None


@dataclass(frozen=True)
class WeakLawSpec:
    center: Fraction
    epsilon: Fraction
    n_start: int
    n_stop: int
    include_plan: bool


@dataclass(frozen=True)
class CertifySpec:
    target: TargetSet
    off_target: Fraction | None
    kinds: tuple[str, ...]
    schedule_spec: dict | None


@dataclass(frozen=True)
class LoadedConfig:
    scenario: Scenario
    plan: CoordinatePlan | None
    run: RunSpec
    weaklaw: WeakLawSpec | None
    certify: CertifySpec | None
    normalized: dict


def _build_scenario(raw: dict) -> Scenario:
    points = _require(raw, "points", "")
    if not isinstance(points, list) or not points:
        raise ConfigError("points", "expected a nonempty list of labels")
    if len(set(points)) != len(points):
        raise ConfigError("points", "labels must be pairwise distinct")

    weights_raw = _require(raw, "weights", "")
    if not isinstance(weights_raw, list) or len(weights_raw) != len(points):
        raise ConfigError("weights", f"expected {len(points)} entries")
    weights = [_rational(w, f"weights[{i}]") for i, w in enumerate(weights_raw)]
    for i, w in enumerate(weights):
        if w <= 0:
            raise ConfigError(f"weights[{i}]", f"weight {w} is not positive")
    if sum(weights) != 1:
        raise ConfigError("weights", f"weights sum to {sum(weights)}, not 1")
    space = build_space(points, weights)

    blocks_raw = _require(raw, "field", "")
    if not isinstance(blocks_raw, list) or not blocks_raw:
        raise ConfigError("field", "expected a nonempty list of blocks")
    seen: set = set()
    for bi, block in enumerate(blocks_raw):
        if not isinstance(block, list) or not block:
            raise ConfigError(f"field[{bi}]", "expected a nonempty list of labels")
        for p in block:
            if p not in set(points):
                raise ConfigError(f"field[{bi}]", f"unknown label {p!r}")
            if p in seen:
                raise ConfigError(f"field[{bi}]", f"label {p!r} appears twice")
            seen.add(p)
    if seen != set(points):
        raise ConfigError("field", f"blocks do not cover {sorted(set(points) - seen)!r}")
    field = FieldPartition(space, tuple(tuple(b) for b in blocks_raw))

    psi_raw = _require(raw, "psi", "")
    if not isinstance(psi_raw, dict):
        raise ConfigError("psi", "expected a mapping from label to rational")
    for label in psi_raw:
        if label not in set(points):
            raise ConfigError(f"psi.{label}", "unknown label")
    missing = [p for p in points if p not in psi_raw]
    if missing:
        raise ConfigError("psi", f"no value for {missing!r}")
    psi = RandomQuantity.from_map(
        space, {p: _rational(psi_raw[p], f"psi.{p}") for p in points}
    )
    return Scenario(space, field, psi)


def _build_schedule(spec: dict, scenario: Scenario, path: str):
    kind = _require(spec, "kind", path)
    kwargs = {}
    for key in ("start", "step", "ratio0", "growth"):
        if key in spec:
            kwargs[key] = _int(spec[key], f"{path}.{key}", minimum=1)
    try:
        return make_schedule(kind, scenario, **kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def _build_plan(spec: dict, scenario: Scenario) -> CoordinatePlan:
    variant = _require(spec, "variant", "plan")
    if variant in ("constant-mixture", "regime-mixture"):
        if "weight" in spec:
            weight = _rational(spec["weight"], "plan.weight")
        elif "target" in spec:
            alpha = _rational(spec["target"], "plan.target")
            try:
                weight = target_mixture_weight(alpha, scenario.gamma, scenario.delta)
            except BoundsError as exc:
                raise ConfigError("plan.target", str(exc)) from None
        else:
            raise ConfigError("plan", "need either 'weight' or 'target'")
        try:
            cls = ConstantMixturePlan if variant == "constant-mixture" else RegimeMixturePlan
            return cls(scenario, weight)
        except BoundsError as exc:
            raise ConfigError("plan.weight", str(exc)) from None
    if variant == "block-alternating":
        sched_spec = _require(spec, "schedule", "plan")
        if not isinstance(sched_spec, dict):
            raise ConfigError("plan.schedule", "expected a mapping")
        return BlockAlternatingPlan(scenario, _build_schedule(sched_spec, scenario, "plan.schedule"))
    raise ConfigError("plan.variant", f"unknown variant {variant!r}")


def _build_run(raw: dict | None) -> RunSpec:
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("run", "expected a mapping")
    n_max = _int(raw.get("n_max", 10_000), "run.n_max", minimum=1)
    trials = _int(raw.get("trials", 100), "run.trials", minimum=1)
    seed = _int(raw.get("seed", 0), "run.seed", minimum=0)
    budget = _int(raw.get("budget", DEFAULT_BUDGET), "run.budget", minimum=1)
    checkpoints = None
    if raw.get("checkpoints") is not None:
        cps = raw["checkpoints"]
        if not isinstance(cps, list) or not cps:
            raise ConfigError("run.checkpoints", "expected a nonempty list of integers")
        vals = [_int(c, f"run.checkpoints[{i}]", minimum=1) for i, c in enumerate(cps)]
        bad = [c for c in vals if c > n_max]
        if bad:
            raise ConfigError("run.checkpoints", f"{bad} exceed n_max={n_max}")
        checkpoints = tuple(sorted(set(vals)))
    return RunSpec(n_max, trials, seed, budget, checkpoints)


def _build_weaklaw(raw: dict | None) -> WeakLawSpec | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("weaklaw", "expected a mapping")
    center = _rational(_require(raw, "center", "weaklaw"), "weaklaw.center")
    epsilon = _rational(_require(raw, "epsilon", "weaklaw"), "weaklaw.epsilon")
    if epsilon <= 0:
        raise ConfigError("weaklaw.epsilon", "must be positive")
    n_start = _int(raw.get("n_start", 2), "weaklaw.n_start", minimum=1)
    n_stop = _int(raw.get("n_stop", 12), "weaklaw.n_stop", minimum=n_start)
    include_plan = raw.get("include_plan", True)
    if not isinstance(include_plan, bool):
        raise ConfigError("weaklaw.include_plan", "expected true or false")
    return WeakLawSpec(center, epsilon, n_start, n_stop, include_plan)


def _build_certify(raw: dict | None) -> CertifySpec | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("certify", "expected a mapping")
    tgt = _require(raw, "target", "certify")
    if isinstance(tgt, list) and len(tgt) == 2:
        lo = _rational(tgt[0], "certify.target[0]")
        hi = _rational(tgt[1], "certify.target[1]")
    else:
        lo = hi = _rational(tgt, "certify.target")
    if lo > hi:
        raise ConfigError("certify.target", f"empty interval [{lo}, {hi}]")
    off = None
    if raw.get("off_target") is not None:
        off = _rational(raw["off_target"], "certify.off_target")
    kinds_raw = raw.get("kinds", list(EVENT_KINDS))
    if not isinstance(kinds_raw, list) or not kinds_raw:
        raise ConfigError("certify.kinds", "expected a nonempty list")
    for i, k in enumerate(kinds_raw):
        if k not in EVENT_KINDS:
            raise ConfigError(
                f"certify.kinds[{i}]", f"unknown kind {k!r}; choose from {list(EVENT_KINDS)}"
            )
    sched = raw.get("schedule")
    if sched is not None and not isinstance(sched, dict):
        raise ConfigError("certify.schedule", "expected a mapping")
    return CertifySpec(TargetSet(lo, hi), off, tuple(kinds_raw), sched)


def _normalize(raw: dict, cfg_parts: dict) -> dict:
    """Rebuild the config as plain JSON data with defaults filled in, in a
    fixed key order, so dumping and re-parsing yields the same scenario."""
    scenario: Scenario = cfg_parts["scenario"]
    run: RunSpec = cfg_parts["run"]
    out: dict = {
        "points": list(scenario.space.points),
        "weights": [str(w) for w in scenario.space.weights],
        "field": [list(b) for b in scenario.field.blocks],
        "psi": {p: str(scenario.psi.value(p)) for p in scenario.space.points},
    }
    if raw.get("plan") is not None:
        out["plan"] = raw["plan"]
    run_out = {
        "n_max": run.n_max,
        "trials": run.trials,
        "seed": run.seed,
        "budget": run.budget,
    }
    if run.checkpoints is not None:
        run_out["checkpoints"] = list(run.checkpoints)
    out["run"] = run_out
    wl: WeakLawSpec | None = cfg_parts["weaklaw"]
    if wl is not None:
        out["weaklaw"] = {
            "center": str(wl.center),
            "epsilon": str(wl.epsilon),
            "n_start": wl.n_start,
            "n_stop": wl.n_stop,
            "include_plan": wl.include_plan,
        }
    ct: CertifySpec | None = cfg_parts["certify"]
    if ct is not None:
        cert_out: dict = {"target": [str(ct.target.lo), str(ct.target.hi)]}
        if ct.off_target is not None:
            cert_out["off_target"] = str(ct.off_target)
        cert_out["kinds"] = list(ct.kinds)
        if ct.schedule_spec is not None:
            cert_out["schedule"] = ct.schedule_spec
        out["certify"] = cert_out
    return out


def parse_config(raw: dict, overrides: dict | None = None) -> LoadedConfig:
    if not isinstance(raw, dict):
        raise ConfigError("", "top level must be a JSON object")
    raw = dict(raw)
    if overrides:
        run_section = dict(raw.get("run") or {})
        run_section.update({k: v for k, v in overrides.items() if v is not None})
        raw["run"] = run_section
    scenario = _build_scenario(raw)
    run = _build_run(raw.get("run"))
    plan = None
    if raw.get("plan") is not None:
        if not isinstance(raw["plan"], dict):
            raise ConfigError("plan", "expected a mapping")
        plan = _build_plan(raw["plan"], scenario)
    weaklaw = _build_weaklaw(raw.get("weaklaw"))
    certify = _build_certify(raw.get("certify"))
    parts = {"scenario": scenario, "run": run, "weaklaw": weaklaw, "certify": certify}
    normalized = _normalize(raw, parts)
    return LoadedConfig(
        scenario=scenario,
        plan=plan,
        run=run,
        weaklaw=weaklaw,
        certify=certify,
        normalized=normalized,
    )


def load_config(path: str | Path, overrides: dict | None = None) -> LoadedConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"not valid JSON: {exc}") from None
    return parse_config(raw, overrides)


def dump_config(cfg: LoadedConfig) -> str:
    return json.dumps(cfg.normalized, indent=2) + "\n"
