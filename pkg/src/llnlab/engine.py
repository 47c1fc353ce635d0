"""Trajectory simulation, exact finite-horizon probabilities, and
nonmeasurability certificates.

Sampling uses seeded numpy generators and double-precision running sums
(the float error in a mean of a few-unit payoff over <= 1e7 steps is far
below every tolerance used here).  Everything labelled "exact" runs on
Fractions: event bounds on the product field, plan event probabilities via
dynamic programming over the sum distribution, expected mean profiles, and
the per-coordinate variance diagnostic.

The certificate machinery evaluates finite-horizon surrogates of limit
events on trajectories drawn under several extension plans and reports the
empirical frequency under each, mirroring the two-extension argument that
pins an event's inner probability near 0 and outer probability near 1.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Iterable, Sequence

import numpy as np

from .core import (
    FieldPartition,
    FiniteSpace,
    Rational,
    as_rational,
)
from .plans import (
    BlockAlternatingPlan,
    CoordinatePlan,
    Scenario,
    make_schedule,
    plan_for_target,
)

DEFAULT_BUDGET = 1 << 24

EVENT_KINDS = (
    "liminf-in-A",
    "limsup-in-A",
    "lim-exists-in-A",
    "lim-exists",
    "all-limit-points-in-A",
)


class BudgetExceededError(ValueError):
    """Exact enumeration would exceed the configured product-point budget."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


class HypothesisError(ValueError):
    """A certification hypothesis is violated (e.g. the target set is not a
    nonempty proper subset of the achievable mean interval)."""


@dataclass(frozen=True)
class Trajectory:
    """One simulated path: running means S_n/n recorded at checkpoints."""

    seed: int
    checkpoints: tuple[tuple[int, float], ...]
    plan: CoordinatePlan

    @property
    def means(self) -> dict[int, float]:
        return dict(self.checkpoints)

    @property
    def final_mean(self) -> float:
        return self.checkpoints[-1][1]


def derive_seeds(master_seed: int, trials: int, stream: int = 0) -> list[int]:
    """Per-trajectory 64-bit seeds derived deterministically from
    (master seed, stream); trajectory index selects the entry."""
    ss = np.random.SeedSequence([int(master_seed), int(stream)])
    return [int(s) for s in ss.generate_state(trials, dtype=np.uint64)]


def _normalize_checkpoints(checkpoints, plan: CoordinatePlan, n_max: int) -> list[int]:
    if checkpoints is None:
        cps = set(plan.default_checkpoints(n_max))
    else:
        cps = {int(c) for c in checkpoints}
    cps.add(n_max)
    bad = [c for c in cps if not 1 <= c <= n_max]
    if bad:
        raise ValueError(f"checkpoints {sorted(bad)} outside [1, {n_max}]")
    return sorted(cps)


def sample_trajectory(
    plan: CoordinatePlan,
    n_max: int,
    seed: int,
    checkpoints: Iterable[int] | None = None,
) -> Trajectory:
    """Draw one payoff per coordinate from the plan's coordinate measures,
    independently across coordinates, and record S_n/n at the checkpoints.
    Bit-identical for identical (plan, n_max, seed, checkpoints)."""
    if n_max < 1:
        raise ValueError("horizon must be at least 1")
    cps = _normalize_checkpoints(checkpoints, plan, n_max)
    rng = np.random.default_rng(int(seed))
    values = plan.sample_values(rng, n_max)
    sums = np.cumsum(values)
    recorded = tuple((n, float(sums[n - 1] / n)) for n in cps)
    return Trajectory(seed=int(seed), checkpoints=recorded, plan=plan)


def run_trajectories(
    plan: CoordinatePlan,
    n_max: int,
    trials: int,
    master_seed: int,
    checkpoints: Iterable[int] | None = None,
    stream: int = 0,
) -> list[Trajectory]:
    seeds = derive_seeds(master_seed, trials, stream=stream)
    return [sample_trajectory(plan, n_max, s, checkpoints) for s in seeds]


def clt_tolerance(scenario: Scenario, n: int) -> float:
    """Three payoff-spans over sqrt(n): the band used both for acceptance of
    steered means and for the membership surrogate in certificates."""
    return 3.0 * float(scenario.span) / math.sqrt(n)


def trajectory_within_envelope(trajectory: Trajectory, scenario: Scenario) -> bool:
    """Sure bounds: every running mean lies between the payoff minimum and
    maximum (up to float roundoff); the final mean lies within the CLT band
    around [gamma, delta]."""
    slack = 1e-9
    lo, hi = float(scenario.psi.vmin) - slack, float(scenario.psi.vmax) + slack
    if not all(lo <= m <= hi for _, m in trajectory.checkpoints):
        return False
    n_max, final = trajectory.checkpoints[-1]
    tol = clt_tolerance(scenario, n_max) + slack
    return float(scenario.gamma) - tol <= final <= float(scenario.delta) + tol


def expected_mean_profile(
    plan: CoordinatePlan,
    n_max: int,
    checkpoints: Iterable[int] | None = None,
) -> list[tuple[int, Fraction]]:
    """Exact expected running means: per-coordinate expectations accumulated
    and divided by n at each checkpoint."""
    cps = _normalize_checkpoints(checkpoints, plan, n_max)
    out = []
    acc = Fraction(0)
    covered = 0
    idx = 0
    for lo, hi, mean in plan.mean_segments(n_max):
        if lo != covered + 1:
            raise ValueError("mean segments must tile 1..n_max")
        while idx < len(cps) and cps[idx] <= hi:
            n = cps[idx]
            out.append((n, (acc + (n - lo + 1) * mean) / n))
            idx += 1
        acc += (hi - lo + 1) * mean
        covered = hi
    return out


def variance_sum_diagnostic(plan: CoordinatePlan, N: int) -> list[Fraction]:
    """Partial sums of Var[payoff at coordinate k] / k^2 for k = 1..N, exact.
    On a finite space each variance is at most the squared payoff maximum, so
    the partial sums stay below (max payoff)^2 * pi^2 / 6."""
    if N < 1:
        raise ValueError("need at least one term")
    sums = []
    acc = Fraction(0)
    for k in range(1, N + 1):
        var = plan.coordinate_variance(k)
        acc += var / (k * k)
        sums.append(acc)
    return sums


def product_space(space: FiniteSpace, n: int) -> FiniteSpace:
    """The n-fold product space: points are label tuples, weights multiply.
    Intended for oracle-scale horizons; grows as |space|^n."""
    points = []
    weights = []
    for combo in product(*[space.points] * n):
        points.append(combo)
        w = Fraction(1)
        for p in combo:
            w *= space.weight(p)
        weights.append(w)
    return FiniteSpace(tuple(points), tuple(weights))


def product_field(space: FiniteSpace, field: FieldPartition, n: int) -> FieldPartition:
    """Atoms of the n-fold product field: products of base blocks."""
    prod = product_space(space, n)
    blocks = []
    for combo in product(*[field.blocks] * n):
        blocks.append(tuple(product(*combo)))
    return FieldPartition(prod, tuple(blocks))


def _band(n: int, a: Fraction, eps: Fraction) -> tuple[Fraction, Fraction]:
    return n * (a - eps), n * (a + eps)


def _check_budget(space: FiniteSpace, n: int, budget: int) -> None:
    required = space.size ** n
    if required > budget:
        raise BudgetExceededError(
            f"exact enumeration needs a budget of {required} product points "
            f"but only {budget} is allowed; raise the budget or lower n",
            required=required,
        )


def exact_event_bounds(
    scenario: Scenario,
    n: int,
    a: Rational,
    eps: Rational,
    budget: int = DEFAULT_BUDGET,
) -> tuple[Fraction, Fraction]:
    """Exact inner and outer measure, on the n-fold product field under the
    product of base measures, of the event |S_n/n - a| > eps.

    An atom of the product field is a product of base blocks; it lies inside
    the event when every achievable payoff sum falls outside the closed band
    n*[a-eps, a+eps], and meets the event when some achievable sum does.
    Atoms with the same block multiset share both status and weight, so the
    enumeration runs over block multisets rather than the |space|^n points
    (the budget guard still uses the raw product size).
    """
    if n < 1:
        raise ValueError("horizon must be at least 1")
    a, eps = as_rational(a), as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    _check_budget(scenario.space, n, budget)
    field = scenario.field
    k = field.n_blocks
    value_sets = [
        sorted({scenario.psi.value(p) for p in block}) for block in field.blocks
    ]
    band_lo, band_hi = _band(n, a, eps)
    inner = Fraction(0)
    outer = Fraction(0)
    n_fact = math.factorial(n)
    for combo in combinations_with_replacement(range(k), n):
        counts = Counter(combo)
        sums = {Fraction(0)}
        for j, c in counts.items():
            for _ in range(c):
                sums = {s + v for s in sums for v in value_sets[j]}
        outside = [s < band_lo or s > band_hi for s in sums]
        if not any(outside):
            continue
        weight = Fraction(n_fact)
        for j, c in counts.items():
            weight = weight / math.factorial(c) * field.block_weight(j) ** c
        outer += weight
        if all(outside):
            inner += weight
    return inner, outer


def exact_plan_event_prob(
    plan: CoordinatePlan,
    n: int,
    a: Rational,
    eps: Rational,
    budget: int = DEFAULT_BUDGET,
) -> Fraction:
    """Exact probability of |S_n/n - a| > eps under the plan's product
    measure, via the exact distribution of the n-step sum."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    a, eps = as_rational(a), as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    _check_budget(plan.scenario.space, n, budget)
    band_lo, band_hi = _band(n, a, eps)
    dist = plan.exact_sum_distribution(n)
    return sum(
        (p for s, p in dist.items() if s < band_lo or s > band_hi), Fraction(0)
    )


@dataclass(frozen=True)
class TargetSet:
    """A closed rational interval of candidate limit values (a singleton
    when lo == hi)."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty target set [{self.lo}, {self.hi}]")

    def distance(self, x: float) -> float:
        return max(float(self.lo) - x, x - float(self.hi), 0.0)

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def require_proper_subset(self, gamma: Fraction, delta: Fraction) -> None:
        if not (gamma <= self.lo and self.hi <= delta):
            raise HypothesisError(
                f"target set [{self.lo}, {self.hi}] is not contained in "
                f"[{gamma}, {delta}]"
            )
        if self.lo == gamma and self.hi == delta:
            raise HypothesisError(
                f"target set equals the whole interval [{gamma}, {delta}]; "
                "a nonempty proper subset is required"
            )

    def __str__(self) -> str:
        if self.lo == self.hi:
            return f"{{{self.lo}}}"
        return f"[{self.lo}, {self.hi}]"


def standard_certify_plans(
    scenario: Scenario,
    target_set: TargetSet,
    schedule=None,
) -> tuple[tuple[str, CoordinatePlan], ...]:
    """The canonical plan triple: one plan steering means into the target
    set, one steering them to the farthest achievable point outside it, and
    one block-alternating plan that forces divergence."""
    gamma, delta = scenario.gamma, scenario.delta
    a_in = target_set.midpoint()
    dist_lo = target_set.lo - gamma
    dist_hi = delta - target_set.hi
    a_out = delta if dist_hi >= dist_lo else gamma
    if schedule is None:
        schedule = make_schedule("factorial", scenario)
    return (
        ("target-in-A", plan_for_target(scenario, a_in)),
        ("target-off-A", plan_for_target(scenario, a_out)),
        ("block-alternating", BlockAlternatingPlan(scenario, schedule)),
    )


@dataclass(frozen=True)
class CertificateReport:
    """Empirical frequencies of one limit-event surrogate under each plan,
    plus the surrogate definitions actually used."""

    event_kind: str
    target_set: TargetSet
    n_max: int
    trials: int
    master_seed: int
    tolerance: float
    osc_threshold: float
    window_start: int
    rows: tuple[tuple[str, str, float], ...]  # (plan name, description, frequency)

    @property
    def high(self) -> tuple[str, float]:
        name, _, freq = max(self.rows, key=lambda r: r[2])
        return name, freq

    @property
    def low(self) -> tuple[str, float]:
        name, _, freq = min(self.rows, key=lambda r: r[2])
        return name, freq

    def surrogate_description(self) -> str:
        if self.event_kind == "lim-exists":
            return (
                f"spread of running means over checkpoints past n={self.window_start} "
                f"stays within {self.osc_threshold:.6g}"
            )
        return (
            f"final mean at n={self.n_max} lies within {self.tolerance:.6g} "
            f"of {self.target_set}"
        )

    def conclusion(self) -> str:
        hi_name, hi = self.high
        lo_name, lo = self.low
        return (
            f"event frequency {hi:.3f} under extension plan '{hi_name}' and "
            f"{lo:.3f} under '{lo_name}': two extensions of the same base pin "
            f"the event's inner probability at or below {lo:.3f} and its outer "
            f"probability at or above {hi:.3f} at this horizon"
        )


def _evaluate_surrogates(
    kinds: Sequence[str],
    trajectory: Trajectory,
    target_set: TargetSet,
    tol: float,
    osc_threshold: float,
    window_start: int,
) -> dict[str, bool]:
    final = trajectory.final_mean
    member = target_set.distance(final) <= tol
    window = [m for n, m in trajectory.checkpoints if n > window_start]
    osc = (max(window) - min(window)) if window else 0.0
    converged = osc <= osc_threshold
    return {k: (converged if k == "lim-exists" else member) for k in kinds}


def evaluate_event_frequencies(
    scenario: Scenario,
    plans: Sequence[tuple[str, CoordinatePlan]],
    kinds: Sequence[str],
    target_set: TargetSet,
    *,
    n_max: int,
    trials: int,
    master_seed: int,
    checkpoints: Iterable[int] | None = None,
) -> tuple[dict[str, dict[str, float]], dict]:
    """Sample `trials` trajectories under each plan (streams derived from the
    master seed and the plan's position) and evaluate every requested event
    surrogate on each; returns frequencies per kind per plan plus the
    surrogate parameters used."""
    for kind in kinds:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}; choose from {EVENT_KINDS}")
    alternator = next(
        (p for _, p in plans if isinstance(p, BlockAlternatingPlan)), None
    )
    window_start = alternator.schedule.value(2) if alternator is not None else 1
    if checkpoints is None:
        cps = set(alternator.default_checkpoints(n_max)) if alternator else set()
        cps.add(n_max)
        checkpoints = sorted(cps)
    tol = clt_tolerance(scenario, n_max)
    osc_threshold = float(scenario.delta - scenario.gamma) / 2.0
    freqs: dict[str, dict[str, float]] = {k: {} for k in kinds}
    for stream, (name, plan) in enumerate(plans):
        hits = Counter()
        for seed in derive_seeds(master_seed, trials, stream=stream):
            tr = sample_trajectory(plan, n_max, seed, checkpoints)
            for kind, ok in _evaluate_surrogates(
                kinds, tr, target_set, tol, osc_threshold, window_start
            ).items():
                hits[kind] += ok
        for kind in kinds:
            freqs[kind][name] = hits[kind] / trials
    meta = {
        "tolerance": tol,
        "osc_threshold": osc_threshold,
        "window_start": window_start,
        "checkpoints": list(checkpoints),
    }
    return freqs, meta


def certify_nonmeasurable(
    scenario: Scenario,
    event_kind: str,
    target_set: TargetSet,
    plans: Sequence[tuple[str, CoordinatePlan]] | None = None,
    *,
    n_max: int = 10_000,
    trials: int = 200,
    master_seed: int = 0,
    checkpoints: Iterable[int] | None = None,
    enforce_hypothesis: bool = True,
) -> CertificateReport:
    """Monte Carlo certificate for one limit-event kind.

    With `enforce_hypothesis` the target set must be a nonempty proper
    subset of [gamma, delta]; disabling the check permits sanity runs such
    as the full interval, for which every plan's frequency is one.
    """
    if event_kind not in EVENT_KINDS:
        raise ValueError(f"unknown event kind {event_kind!r}; choose from {EVENT_KINDS}")
    if enforce_hypothesis:
        target_set.require_proper_subset(scenario.gamma, scenario.delta)
    if plans is None:
        plans = standard_certify_plans(scenario, target_set)
    freqs, meta = evaluate_event_frequencies(
        scenario,
        plans,
        [event_kind],
        target_set,
        n_max=n_max,
        trials=trials,
        master_seed=master_seed,
        checkpoints=checkpoints,
    )
    rows = tuple(
        (name, plan.describe(), freqs[event_kind][name]) for name, plan in plans
    )
    return CertificateReport(
        event_kind=event_kind,
        target_set=target_set,
        n_max=n_max,
        trials=trials,
        master_seed=master_seed,
        tolerance=meta["tolerance"],
        osc_threshold=meta["osc_threshold"],
        window_start=meta["window_start"],
        rows=rows,
    )
