"""Coordinate plans: per-coordinate measure choices on the sequence space.

A scenario bundles a finite space, a sub-field and a payoff function whose
lower and upper expectations (gamma and delta) straddle the achievable
long-run sample means.  A coordinate plan then assigns one extension
measure to every coordinate of the infinite product:

* ``ConstantMixturePlan`` uses the same min/max mixture at every
  coordinate, so sample means converge to any chosen target between gamma
  and delta (the mixture weight is the linear interpolation coefficient).
* ``BlockAlternatingPlan`` follows a block schedule whose thresholds grow
  so fast that cumulative means at block ends swing arbitrarily close to
  gamma and delta in alternation, forcing the running mean to diverge.
* ``RegimeMixturePlan`` is the literal convex combination of the two pure
  product measures: one coin flip picks the all-min or all-max regime for
  the entire sequence.  Means then converge to gamma or delta, never to an
  interior target, which is why it exists only as a contrast to the
  per-coordinate mixture.

Also here: the truncation and grid-quantization helpers used to reduce a
payoff to a bounded simple function, and the exactness threshold past
which block schedules are shifted so that both helpers act as identities
on the scheduled coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .core import (
    DomainMismatchError,
    FieldPartition,
    FiniteSpace,
    RandomQuantity,
    Rational,
    as_rational,
    lower_expectation,
    majorant,
    minorant,
    upper_expectation,
)
from .extensions import BoundsError, ExtensionMeasure, extend_max, extend_min, mix


@dataclass(frozen=True)
class Scenario:
    """A finite space, a sub-field, and the coordinate payoff function."""

    space: FiniteSpace
    field: FieldPartition
    psi: RandomQuantity

    def __post_init__(self):
        if self.field.space != self.space or self.psi.space != self.space:
            raise DomainMismatchError("field and payoff must live on the space")

    @cached_property
    def gamma(self) -> Fraction:
        """Lower expectation of the payoff: the lowest steerable mean."""
        return lower_expectation(self.space, self.field, self.psi)

    @cached_property
    def delta(self) -> Fraction:
        """Upper expectation of the payoff: the highest steerable mean."""
        return upper_expectation(self.space, self.field, self.psi)

    @cached_property
    def psi_minorant(self) -> RandomQuantity:
        return minorant(self.space, self.field, self.psi)

    @cached_property
    def psi_majorant(self) -> RandomQuantity:
        return majorant(self.space, self.field, self.psi)

    @cached_property
    def extension_min(self) -> ExtensionMeasure:
        return extend_min(self.space, self.field, self.psi)

    @cached_property
    def extension_max(self) -> ExtensionMeasure:
        return extend_max(self.space, self.field, self.psi)

    @cached_property
    def min_value_dist(self) -> tuple[tuple[Fraction, Fraction], ...]:
        d = self.extension_min.value_distribution(self.psi)
        return tuple(sorted(d.items()))

    @cached_property
    def max_value_dist(self) -> tuple[tuple[Fraction, Fraction], ...]:
        d = self.extension_max.value_distribution(self.psi)
        return tuple(sorted(d.items()))

    @property
    def span(self) -> Fraction:
        return self.psi.vmax - self.psi.vmin


def truncate(f: RandomQuantity, n: int) -> RandomQuantity:
    """Zero out the payoff wherever its magnitude exceeds n."""
    if n < 1:
        raise ValueError("truncation level must be at least 1")
    return RandomQuantity(
        f.space, tuple(v if abs(v) <= n else Fraction(0) for v in f.values)
    )


def simple_approx(f: RandomQuantity, n: int) -> RandomQuantity:
    """Quantize f downward to the grid of multiples of 1/n, clamped to
    [-n, n].  Requires |f| <= n pointwise; the result is within 1/n of f
    and still bounded by n."""
    if n < 1:
        raise ValueError("grid level must be at least 1")
    if any(abs(v) > n for v in f.values):
        raise ValueError(f"|f| exceeds {n} somewhere; truncate first")
    out = []
    for v in f.values:
        q = Fraction(math.floor(v * n), n)
        q = max(Fraction(-n), min(Fraction(n), q))
        out.append(q)
    return RandomQuantity(f.space, tuple(out))


def exactness_threshold(psi: RandomQuantity) -> int:
    """Smallest level t such that truncation at any k >= t leaves psi
    unchanged (and the 1/k grid quantization is an identity whenever psi's
    values land on it, which holds at every k for integer-valued psi).
    Beyond t the bounded-simple reduction of psi is psi itself."""
    return max(1, math.ceil(max(abs(v) for v in psi.values)))


def target_mixture_weight(alpha: Rational, gamma: Rational, delta: Rational) -> Fraction:
    """Mixture weight a with (1-a) gamma + a delta = alpha; zero when the
    interval is degenerate."""
    alpha, gamma, delta = map(as_rational, (alpha, gamma, delta))
    if gamma > delta:
        raise BoundsError(f"lower bound {gamma} exceeds upper bound {delta}")
    if not gamma <= alpha <= delta:
        raise BoundsError(f"target {alpha} outside [{gamma}, {delta}]")
    if gamma == delta:
        return Fraction(0)
    return (alpha - gamma) / (delta - gamma)


@dataclass(frozen=True)
class FactorialSchedule:
    """Block thresholds a_0 = 1 and a_n = (start + (n-1) step)! for n >= 1.

    Consecutive factorials (start=2, step=1) give 1, 2, 6, 24, 120, ...
    with threshold ratios 3, 4, 5, ... growing without bound.  A stride
    step > 1 keeps only every step-th factorial, which makes the ratios
    escalate much faster; block-end means then sit correspondingly closer
    to their gamma/delta targets at modest horizons.
    """

    start: int = 2
    step: int = 1

    def __post_init__(self):
        if self.start < 2:
            raise ValueError("start must be at least 2 so thresholds increase from 1")
        if self.step < 1:
            raise ValueError("step must be at least 1")

    def value(self, n: int) -> int:
        if n < 0:
            raise ValueError("block index must be nonnegative")
        if n == 0:
            return 1
        return math.factorial(self.start + (n - 1) * self.step)

    def describe(self) -> str:
        return f"factorial blocks (start={self.start}, step={self.step})"


@dataclass(frozen=True)
class GeometricEscalatingSchedule:
    """Block thresholds a_n = ratio0**n * growth**(n(n-1)/2): each ratio is
    `growth` times the previous one, so ratios escalate geometrically."""

    ratio0: int = 2
    growth: int = 2

    def __post_init__(self):
        if self.ratio0 < 2 or self.growth < 2:
            raise ValueError("ratio0 and growth must be at least 2")

    def value(self, n: int) -> int:
        if n < 0:
            raise ValueError("block index must be nonnegative")
        return self.ratio0 ** n * self.growth ** (n * (n - 1) // 2)

    def describe(self) -> str:
        return f"geometric-escalating blocks (ratio0={self.ratio0}, growth={self.growth})"


BlockSchedule = FactorialSchedule | GeometricEscalatingSchedule


def schedule_ends(schedule, n_max: int) -> list[int]:
    """Block-end thresholds a_1, a_2, ... up to n_max."""
    ends = []
    i = 1
    while True:
        a = schedule.value(i)
        if a > n_max:
            break
        ends.append(a)
        i += 1
    return ends


def schedule_segments(schedule, n_max: int) -> list[tuple[int, int, bool]]:
    """Cover coordinates 1..n_max with (lo, hi, is_min) runs.  Coordinate 1
    precedes the first block and is max-type; odd-indexed blocks are
    min-type, even-indexed blocks max-type."""
    if n_max < 1:
        raise ValueError("horizon must be at least 1")
    segs = [(1, 1, False)]
    i = 1
    prev = 1
    while prev < n_max:
        a = schedule.value(i)
        lo, hi = prev + 1, min(a, n_max)
        if hi >= lo:
            segs.append((lo, hi, i % 2 == 1))
        prev = a
        i += 1
    return segs


def is_min_coordinate(schedule, k: int) -> bool:
    """Whether coordinate k falls in an odd-indexed (min-type) block."""
    if k < 1:
        raise ValueError("coordinates are numbered from 1")
    if k == 1:
        return False
    i = 1
    while schedule.value(i) < k:
        i += 1
    return i % 2 == 1


def make_schedule(
    kind: str,
    scenario: Scenario | None = None,
    *,
    start: int = 2,
    step: int = 1,
    ratio0: int = 2,
    growth: int = 2,
    threshold: int | None = None,
):
    """Build a block schedule, shifting its first threshold past the payoff's
    exactness threshold when a scenario (or explicit threshold) is given, so
    every scheduled coordinate sees the payoff's bounded-simple reduction act
    as the identity."""
    if threshold is None:
        threshold = exactness_threshold(scenario.psi) if scenario is not None else 0
    if kind == "factorial":
        s = max(2, start)
        while math.factorial(s) <= threshold:
            s += 1
        return FactorialSchedule(start=s, step=step)
    if kind == "geometric-escalating":
        r = max(2, ratio0, threshold + 1)
        return GeometricEscalatingSchedule(ratio0=r, growth=growth)
    raise ValueError(f"unknown schedule kind {kind!r}")


class _FloatDist:
    """Float mirror of an exact value distribution, for sampling only."""

    def __init__(self, dist: tuple[tuple[Fraction, Fraction], ...]):
        self.values = np.array([float(v) for v, _ in dist])
        probs = np.array([float(p) for _, p in dist])
        self.probs = probs / probs.sum()


def _mixture_dist(
    lo: tuple[tuple[Fraction, Fraction], ...],
    hi: tuple[tuple[Fraction, Fraction], ...],
    a: Fraction,
) -> tuple[tuple[Fraction, Fraction], ...]:
    out: dict[Fraction, Fraction] = {}
    for v, p in lo:
        out[v] = out.get(v, Fraction(0)) + (1 - a) * p
    for v, p in hi:
        out[v] = out.get(v, Fraction(0)) + a * p
    return tuple(sorted((v, p) for v, p in out.items() if p != 0))


def _dist_mean(dist) -> Fraction:
    return sum((v * p for v, p in dist), Fraction(0))


def _dist_variance(dist) -> Fraction:
    m = _dist_mean(dist)
    return sum((p * (v - m) ** 2 for v, p in dist), Fraction(0))


class CoordinatePlan:
    """Shared behaviour of all per-coordinate measure assignments."""

    scenario: Scenario

    def coordinate_dist(self, n: int) -> tuple[tuple[Fraction, Fraction], ...]:
        raise NotImplementedError

    def coordinate_mean(self, n: int) -> Fraction:
        return _dist_mean(self.coordinate_dist(n))

    def coordinate_variance(self, n: int) -> Fraction:
        return _dist_variance(self.coordinate_dist(n))

    def mean_segments(self, n_max: int) -> list[tuple[int, int, Fraction]]:
        """(lo, hi, per-coordinate mean) runs covering 1..n_max."""
        raise NotImplementedError

    def sample_values(self, rng: np.random.Generator, n_max: int) -> np.ndarray:
        raise NotImplementedError

    def exact_sum_distribution(self, n: int) -> dict[Fraction, Fraction]:
        """Exact distribution of the n-step sum under this plan."""
        dist = {Fraction(0): Fraction(1)}
        for k in range(1, n + 1):
            step = self.coordinate_dist(k)
            nxt: dict[Fraction, Fraction] = {}
            for s, ps in dist.items():
                for v, pv in step:
                    key = s + v
                    nxt[key] = nxt.get(key, Fraction(0)) + ps * pv
            dist = nxt
        return dist

    def default_checkpoints(self, n_max: int) -> list[int]:
        cps = {n_max}
        n = 10
        while n < n_max:
            cps.add(n)
            n *= 10
        return sorted(cps)

    def describe(self) -> str:
        raise NotImplementedError


class ConstantMixturePlan(CoordinatePlan):
    """Every coordinate uses the same convex mixture of the min and max
    concentration measures; sample means converge to
    (1-a) gamma + a delta."""

    def __init__(self, scenario: Scenario, weight: Rational):
        self.scenario = scenario
        self.weight = as_rational(weight)
        if not 0 <= self.weight <= 1:
            raise BoundsError(f"mixture weight {self.weight} outside [0, 1]")
        self._dist = _mixture_dist(
            scenario.min_value_dist, scenario.max_value_dist, self.weight
        )
        self._float = _FloatDist(self._dist)

    @property
    def target_mean(self) -> Fraction:
        return (1 - self.weight) * self.scenario.gamma + self.weight * self.scenario.delta

    def coordinate_measure(self, n: int) -> ExtensionMeasure:
        return mix(self.scenario.extension_min, self.scenario.extension_max, self.weight)

    def coordinate_dist(self, n: int | None = None):
        return self._dist

    def mean_segments(self, n_max: int):
        return [(1, n_max, _dist_mean(self._dist))]

    def sample_values(self, rng, n_max):
        return rng.choice(self._float.values, size=n_max, p=self._float.probs)

    def describe(self) -> str:
        return f"constant mixture (weight {self.weight}, mean {self.target_mean})"


class BlockAlternatingPlan(CoordinatePlan):
    """Min-type extensions on odd-indexed schedule blocks, max-type elsewhere.
    Cumulative means at block ends then alternate toward gamma and delta."""

    def __init__(self, scenario: Scenario, schedule):
        self.scenario = scenario
        self.schedule = schedule
        self._min = _FloatDist(scenario.min_value_dist)
        self._max = _FloatDist(scenario.max_value_dist)
        self._gamma = _dist_mean(scenario.min_value_dist)
        self._delta = _dist_mean(scenario.max_value_dist)

    def coordinate_measure(self, n: int) -> ExtensionMeasure:
        if is_min_coordinate(self.schedule, n):
            return self.scenario.extension_min
        return self.scenario.extension_max

    def coordinate_dist(self, n: int):
        if is_min_coordinate(self.schedule, n):
            return self.scenario.min_value_dist
        return self.scenario.max_value_dist

    def mean_segments(self, n_max: int):
        return [
            (lo, hi, self._gamma if mn else self._delta)
            for lo, hi, mn in schedule_segments(self.schedule, n_max)
        ]

    def sample_values(self, rng, n_max):
        out = np.empty(n_max, dtype=np.float64)
        for lo, hi, mn in schedule_segments(self.schedule, n_max):
            d = self._min if mn else self._max
            out[lo - 1 : hi] = rng.choice(d.values, size=hi - lo + 1, p=d.probs)
        return out

    def default_checkpoints(self, n_max: int) -> list[int]:
        return sorted(set(schedule_ends(self.schedule, n_max)) | {n_max})

    def describe(self) -> str:
        return f"block alternating ({self.schedule.describe()})"


class RegimeMixturePlan(CoordinatePlan):
    """Literal convex combination of the two pure product measures: one
    Bernoulli(weight) draw selects the all-max regime for the entire
    trajectory, else the all-min regime.  Sample means land near gamma or
    delta, never near an interior target."""

    def __init__(self, scenario: Scenario, weight: Rational):
        self.scenario = scenario
        self.weight = as_rational(weight)
        if not 0 <= self.weight <= 1:
            raise BoundsError(f"regime weight {self.weight} outside [0, 1]")
        self._min = _FloatDist(scenario.min_value_dist)
        self._max = _FloatDist(scenario.max_value_dist)
        self._marginal = _mixture_dist(
            scenario.min_value_dist, scenario.max_value_dist, self.weight
        )

    def coordinate_dist(self, n: int | None = None):
        # Marginal of one coordinate; coordinates are not independent here.
        return self._marginal

    def mean_segments(self, n_max: int):
        return [(1, n_max, _dist_mean(self._marginal))]

    def sample_values(self, rng, n_max):
        use_max = rng.random() < float(self.weight)
        d = self._max if use_max else self._min
        return rng.choice(d.values, size=n_max, p=d.probs)

    def exact_sum_distribution(self, n: int) -> dict[Fraction, Fraction]:
        out: dict[Fraction, Fraction] = {}
        for w, plan in (
            (1 - self.weight, ConstantMixturePlan(self.scenario, 0)),
            (self.weight, ConstantMixturePlan(self.scenario, 1)),
        ):
            if w == 0:
                continue
            for s, p in plan.exact_sum_distribution(n).items():
                out[s] = out.get(s, Fraction(0)) + w * p
        return out

    def describe(self) -> str:
        return f"regime mixture (weight {self.weight} on the all-max regime)"


def plan_for_target(scenario: Scenario, alpha: Rational) -> ConstantMixturePlan:
    """Constant-mixture plan whose sample means converge to alpha."""
    weight = target_mixture_weight(alpha, scenario.gamma, scenario.delta)
    return ConstantMixturePlan(scenario, weight)
