"""Extensions of a base measure to a finer sub-sigma-field.

Given a space with a base field, an extension is a measure on a refined
partition that aggregates back to the base block masses.  The two corner
constructions concentrate, inside each base block, all mass on the
sub-blocks where a function attains its block minimum (or maximum); convex
mixtures of these sweep out every achievable value between the inner and
outer measure of a target set.

Unlike base spaces, extensions may put zero mass on refined blocks.  That
concentration is the whole point: it is what lets two different extensions
of the same base assign probabilities 0 and 1 to the same event.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import (
    DomainMismatchError,
    FieldPartition,
    FiniteSpace,
    Label,
    PartitionError,
    RandomQuantity,
    Rational,
    as_rational,
    inner_measure,
    outer_measure,
)


class BoundsError(ValueError):
    """A requested target value lies outside its admissible exact bounds."""


class FieldMismatchError(ValueError):
    """Measures defined on different fields (or bases) were combined."""


@dataclass(frozen=True)
class ExtensionMeasure:
    """A measure on a refined field, tagged with the base field it extends.

    Invariants checked at construction: weights are nonnegative and sum to
    one, the field refines the base field, and mass aggregated over each
    base block equals that block's mass under the space's own weights.
    """

    space: FiniteSpace
    field: FieldPartition
    weights: tuple[Fraction, ...]
    base_field: FieldPartition

    def __post_init__(self):
        weights = tuple(as_rational(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if self.field.space != self.space or self.base_field.space != self.space:
            raise DomainMismatchError("fields live on a different space")
        if len(weights) != self.field.n_blocks:
            raise FieldMismatchError(
                f"{self.field.n_blocks} blocks but {len(weights)} masses"
            )
        if any(w < 0 for w in weights):
            raise BoundsError("extension masses must be nonnegative")
        if sum(weights) != 1:
            raise BoundsError(f"extension masses sum to {sum(weights)}, not 1")
        if not self.field.is_refinement_of(self.base_field):
            raise FieldMismatchError("field does not refine the base field")
        for bi, block in enumerate(self.base_field.blocks):
            agg = sum(
                (
                    w
                    for w, sub in zip(weights, self.field.blocks)
                    if self.base_field.block_of(sub[0]) == bi
                ),
                Fraction(0),
            )
            if agg != self.base_field.block_weight(bi):
                raise FieldMismatchError(
                    f"mass {agg} inside base block {block!r} differs from "
                    f"base mass {self.base_field.block_weight(bi)}"
                )

    def block_mass(self, i: int) -> Fraction:
        return self.weights[i]

    def measure(self, H: Iterable[Label]) -> Fraction:
        """Measure of a set, which must be a union of this field's blocks."""
        h = self.space.subset(H)
        total = Fraction(0)
        seen: set = set()
        for w, block in zip(self.weights, self.field.blocks):
            inside = set(block) & h
            if inside and inside != set(block):
                raise PartitionError(
                    f"set is not measurable for this extension (splits block {block!r})"
                )
            if inside:
                total += w
                seen.update(block)
        if seen != h:
            raise PartitionError("set contains points outside covered blocks")
        return total

    def expectation(self, f: RandomQuantity) -> Fraction:
        """Expectation of a quantity that is constant on each block."""
        if f.space != self.space:
            raise DomainMismatchError("quantity lives on a different space")
        total = Fraction(0)
        for w, block in zip(self.weights, self.field.blocks):
            vals = {f.value(p) for p in block}
            if len(vals) != 1:
                raise PartitionError(
                    f"quantity is not measurable for this extension on block {block!r}"
                )
            total += w * vals.pop()
        return total

    def value_distribution(self, f: RandomQuantity) -> dict[Fraction, Fraction]:
        """Exact distribution of a block-constant quantity under this measure."""
        if f.space != self.space:
            raise DomainMismatchError("quantity lives on a different space")
        dist: dict[Fraction, Fraction] = {}
        for w, block in zip(self.weights, self.field.blocks):
            vals = {f.value(p) for p in block}
            if len(vals) != 1:
                raise PartitionError(
                    f"quantity is not measurable for this extension on block {block!r}"
                )
            v = vals.pop()
            dist[v] = dist.get(v, Fraction(0)) + w
        return dist


def base_measure(space: FiniteSpace, field: FieldPartition) -> ExtensionMeasure:
    """The space's own measure, viewed as the degenerate extension of itself."""
    return ExtensionMeasure(space, field, field.block_weights, field)


def refined_field(field: FieldPartition, f: RandomQuantity) -> FieldPartition:
    """Finest partition refining `field` on whose blocks f is constant:
    each block is split along the level sets of f."""
    space = field.space
    if f.space != space:
        raise DomainMismatchError("quantity lives on a different space")
    groups: dict[tuple, list[Label]] = {}
    for p in space.points:
        groups.setdefault((field.block_of(p), f.value(p)), []).append(p)
    return FieldPartition(space, tuple(tuple(g) for g in groups.values()))


def _extend_extremal(space, field, f, pick_max: bool) -> ExtensionMeasure:
    ref = refined_field(field, f)
    sub_value = [f.value(block[0]) for block in ref.blocks]
    sub_parent = [field.block_of(block[0]) for block in ref.blocks]
    weights = [Fraction(0)] * ref.n_blocks
    for bi in range(field.n_blocks):
        members = [j for j in range(ref.n_blocks) if sub_parent[j] == bi]
        target = max(sub_value[j] for j in members) if pick_max else min(
            sub_value[j] for j in members
        )
        winners = [j for j in members if sub_value[j] == target]
        share = field.block_weight(bi) / len(winners)
        for j in winners:
            weights[j] = share
    return ExtensionMeasure(space, ref, tuple(weights), field)


def extend_min(space: FiniteSpace, field: FieldPartition, f: RandomQuantity) -> ExtensionMeasure:
    """Extension concentrating each base block's mass on the sub-blocks where
    f attains the block minimum, split evenly among ties.  Under the result,
    f equals its measurable minorant with probability one, so its expectation
    is the lower expectation of f."""
    return _extend_extremal(space, field, f, pick_max=False)


def extend_max(space: FiniteSpace, field: FieldPartition, f: RandomQuantity) -> ExtensionMeasure:
    """Dual of extend_min: mass goes to the block maximizers of f."""
    return _extend_extremal(space, field, f, pick_max=True)


def indicator(space: FiniteSpace, H: Iterable[Label]) -> RandomQuantity:
    h = space.subset(H)
    return RandomQuantity(
        space, tuple(Fraction(1 if p in h else 0) for p in space.points)
    )


def extend_by_set(
    space: FiniteSpace,
    field: FieldPartition,
    A: Iterable[Label],
    alpha: Rational,
) -> ExtensionMeasure:
    """Extension Q of the base measure to the field generated by A, with
    Q(A) = alpha exactly, for any rational alpha between the inner and outer
    measure of A.

    The set of extensions achieving a given Q(A) is a polytope; this returns
    its simplest point, the convex combination of the two corner measures
    that concentrate mass off A and on A respectively.
    """
    a_set = space.subset(A)
    lo = inner_measure(space, field, a_set)
    hi = outer_measure(space, field, a_set)
    alpha = as_rational(alpha)
    if alpha < lo:
        raise BoundsError(f"target {alpha} below inner measure {lo}")
    if alpha > hi:
        raise BoundsError(f"target {alpha} above outer measure {hi}")
    ind = indicator(space, a_set)
    q_min = extend_min(space, field, ind)
    q_max = extend_max(space, field, ind)
    u = Fraction(0) if hi == lo else (alpha - lo) / (hi - lo)
    return mix(q_min, q_max, u)


def mix(q0: ExtensionMeasure, q1: ExtensionMeasure, a: Rational) -> ExtensionMeasure:
    """Blockwise convex combination (1-a) q0 + a q1 of two extensions on the
    same refined field with the same base."""
    a = as_rational(a)
    if not 0 <= a <= 1:
        raise BoundsError(f"mixture weight {a} outside [0, 1]")
    if q0.space != q1.space or q0.field != q1.field or q0.base_field != q1.base_field:
        raise FieldMismatchError("can only mix extensions on the same field and base")
    weights = tuple((1 - a) * w0 + a * w1 for w0, w1 in zip(q0.weights, q1.weights))
    return ExtensionMeasure(q0.space, q0.field, weights, q0.base_field)


def is_extension(q: ExtensionMeasure, base: ExtensionMeasure | None = None) -> bool:
    """True when q's mass aggregated over each base block matches the base
    measure.  With no explicit base, checks against the space's own weights
    on q.base_field (which the constructor already enforces)."""
    if base is None:
        base = base_measure(q.space, q.base_field)
    if base.space != q.space:
        raise DomainMismatchError("base lives on a different space")
    if not q.field.is_refinement_of(base.field):
        return False
    for bi in range(base.field.n_blocks):
        agg = sum(
            (
                w
                for w, sub in zip(q.weights, q.field.blocks)
                if base.field.block_of(sub[0]) == bi
            ),
            Fraction(0),
        )
        if agg != base.weights[bi]:
            return False
    return True
