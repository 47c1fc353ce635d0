"""Exact measure theory on finite probability spaces.

A sub-sigma-field of a finite space is determined by its atoms, so fields
are stored as partitions of the point set.  Inner and outer measures, the
largest measurable function below a given one (its measurable minorant),
the smallest measurable function above it (its measurable majorant), and
the induced lower and upper expectations all reduce to per-block minimum,
maximum and weight sums, computed here in exact rational arithmetic.

Base spaces deliberately ban zero-weight points: with every point carrying
positive mass, "almost everywhere" collapses to "everywhere", so each law
in this package is asserted as pointwise equality rather than equality up
to null sets.  The full sigma-field (all unions of blocks) is never
materialized; everything factors through the atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence, Union

Label = Hashable
Rational = Union[Fraction, int, str]


class ZeroWeightError(ValueError):
    """A base-space point was assigned zero or negative mass."""


class WeightSumError(ValueError):
    """Point weights do not sum exactly to one."""


class UnknownLabelError(ValueError):
    """A label was used that does not belong to the space."""


class PartitionError(ValueError):
    """Blocks do not form a partition of the point set."""


class DomainMismatchError(ValueError):
    """Objects built over different spaces were combined."""


def as_rational(value: Rational) -> Fraction:
    """Convert to an exact Fraction.  Floats are rejected: they would smuggle
    binary rounding into computations whose contract is exact equality."""
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities or payoffs")
    if isinstance(value, float):
        raise TypeError(
            f"got float {value!r}; pass a Fraction, an int, or a string like '1/3'"
        )
    return Fraction(value)


@dataclass(frozen=True)
class FiniteSpace:
    """A finite probability space: ordered point labels with positive
    rational weights summing exactly to one."""

    points: tuple[Label, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        points = tuple(self.points)
        weights = tuple(as_rational(w) for w in self.weights)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)
        if not points:
            raise PartitionError("a space needs at least one point")
        if len(set(points)) != len(points):
            raise PartitionError("point labels must be pairwise distinct")
        if len(weights) != len(points):
            raise WeightSumError(
                f"{len(points)} points but {len(weights)} weights"
            )
        for p, w in zip(points, weights):
            if w <= 0:
                raise ZeroWeightError(
                    f"point {p!r} has weight {w}; every point needs positive mass"
                )
        total = sum(weights)
        if total != 1:
            raise WeightSumError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(points)})

    @property
    def size(self) -> int:
        return len(self.points)

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(f"label {label!r} is not a point of this space") from None

    def weight(self, label: Label) -> Fraction:
        return self.weights[self.index(label)]

    def subset(self, labels: Iterable[Label]) -> frozenset:
        """Validate a collection of labels as a subset of the point set."""
        out = frozenset(labels)
        for p in out:
            self.index(p)
        return out

    def mass(self, labels: Iterable[Label]) -> Fraction:
        return sum((self.weight(p) for p in self.subset(labels)), Fraction(0))

    def complement(self, labels: Iterable[Label]) -> frozenset:
        return frozenset(self.points) - self.subset(labels)


def build_space(labels: Sequence[Label], weights: Sequence[Rational]) -> FiniteSpace:
    """Construct a validated space from labels and rational weights."""
    return FiniteSpace(tuple(labels), tuple(as_rational(w) for w in weights))


@dataclass(frozen=True)
class FieldPartition:
    """A sub-sigma-field represented by its atoms.

    Blocks are stored in canonical order (sorted by the position of their
    first point, points within a block in space order), so two partitions
    of the same space are equal exactly when they generate the same field.
    """

    space: FiniteSpace
    blocks: tuple[tuple[Label, ...], ...]

    def __post_init__(self):
        space = self.space
        canon = []
        for block in self.blocks:
            pts = tuple(sorted(block, key=space.index))
            if not pts:
                raise PartitionError("empty block")
            canon.append(pts)
        canon.sort(key=lambda b: space.index(b[0]))
        object.__setattr__(self, "blocks", tuple(canon))

        block_of: dict[Label, int] = {}
        for i, block in enumerate(self.blocks):
            for p in block:
                if p in block_of:
                    raise PartitionError(f"point {p!r} appears in two blocks")
                block_of[p] = i
        if len(block_of) != space.size:
            missing = set(space.points) - set(block_of)
            raise PartitionError(f"blocks do not cover points {sorted(map(repr, missing))}")
        object.__setattr__(self, "_block_of", block_of)
        object.__setattr__(
            self,
            "_block_weights",
            tuple(sum((space.weight(p) for p in b), Fraction(0)) for b in self.blocks),
        )

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_of(self, label: Label) -> int:
        self.space.index(label)
        return self._block_of[label]

    def block_weight(self, i: int) -> Fraction:
        return self._block_weights[i]

    @property
    def block_weights(self) -> tuple[Fraction, ...]:
        return self._block_weights

    def blocks_as_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(b) for b in self.blocks)

    def is_refinement_of(self, other: "FieldPartition") -> bool:
        """True when every block of self sits inside one block of other."""
        if self.space != other.space:
            raise DomainMismatchError("partitions live on different spaces")
        return all(
            len({other.block_of(p) for p in block}) == 1 for block in self.blocks
        )


def trivial_field(space: FiniteSpace) -> FieldPartition:
    return FieldPartition(space, (tuple(space.points),))


def discrete_field(space: FiniteSpace) -> FieldPartition:
    return FieldPartition(space, tuple((p,) for p in space.points))


def generate_field(
    space: FiniteSpace,
    generating_sets: Iterable[Iterable[Label]],
    base: "FieldPartition | None" = None,
) -> FieldPartition:
    """Atoms of the field generated by the given sets (and a base partition,
    if supplied): points share a block exactly when they agree on membership
    in every generating set and lie in the same base block."""
    sets = [space.subset(s) for s in generating_sets]
    if base is not None and base.space != space:
        raise DomainMismatchError("base partition lives on a different space")
    groups: dict[tuple, list[Label]] = {}
    for p in space.points:
        sig = tuple(p in s for s in sets)
        if base is not None:
            sig = (base.block_of(p),) + sig
        groups.setdefault(sig, []).append(p)
    return FieldPartition(space, tuple(tuple(g) for g in groups.values()))


@dataclass(frozen=True)
class RandomQuantity:
    """An exact rational-valued function on the points of a space."""

    space: FiniteSpace
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(as_rational(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != self.space.size:
            raise DomainMismatchError(
                f"{self.space.size} points but {len(vals)} values"
            )

    @classmethod
    def from_map(cls, space: FiniteSpace, mapping: Mapping[Label, Rational]) -> "RandomQuantity":
        for label in mapping:
            space.index(label)
        missing = [p for p in space.points if p not in mapping]
        if missing:
            raise DomainMismatchError(f"no value for points {missing!r}")
        return cls(space, tuple(as_rational(mapping[p]) for p in space.points))

    def value(self, label: Label) -> Fraction:
        return self.values[self.space.index(label)]

    def as_map(self) -> dict:
        return dict(zip(self.space.points, self.values))

    @property
    def vmin(self) -> Fraction:
        return min(self.values)

    @property
    def vmax(self) -> Fraction:
        return max(self.values)

    def __neg__(self) -> "RandomQuantity":
        return RandomQuantity(self.space, tuple(-v for v in self.values))


def _check_field(space: FiniteSpace, field: FieldPartition) -> None:
    if field.space != space:
        raise DomainMismatchError("field was built over a different space")


def _check_quantity(space: FiniteSpace, f: RandomQuantity) -> None:
    if f.space != space:
        raise DomainMismatchError("quantity was built over a different space")


def measurable_core(space: FiniteSpace, field: FieldPartition, H: Iterable[Label]) -> frozenset:
    """Largest union of blocks contained in H."""
    _check_field(space, field)
    h = space.subset(H)
    out: set = set()
    for block in field.blocks:
        if set(block) <= h:
            out.update(block)
    return frozenset(out)


def measurable_hull(space: FiniteSpace, field: FieldPartition, H: Iterable[Label]) -> frozenset:
    """Smallest union of blocks containing H."""
    _check_field(space, field)
    h = space.subset(H)
    out: set = set()
    for block in field.blocks:
        if h & set(block):
            out.update(block)
    return frozenset(out)


def inner_measure(space: FiniteSpace, field: FieldPartition, H: Iterable[Label]) -> Fraction:
    """Total weight of the blocks fully inside H."""
    return space.mass(measurable_core(space, field, H))


def outer_measure(space: FiniteSpace, field: FieldPartition, H: Iterable[Label]) -> Fraction:
    """Total weight of the blocks meeting H."""
    return space.mass(measurable_hull(space, field, H))


def minorant(space: FiniteSpace, field: FieldPartition, f: RandomQuantity) -> RandomQuantity:
    """Largest field-measurable function below f: on each block, the block
    minimum of f.  Exact here because every point has positive mass."""
    _check_field(space, field)
    _check_quantity(space, f)
    block_min = [min(f.value(p) for p in block) for block in field.blocks]
    return RandomQuantity(
        space, tuple(block_min[field.block_of(p)] for p in space.points)
    )


def majorant(space: FiniteSpace, field: FieldPartition, f: RandomQuantity) -> RandomQuantity:
    """Smallest field-measurable function above f (per-block maximum)."""
    _check_field(space, field)
    _check_quantity(space, f)
    block_max = [max(f.value(p) for p in block) for block in field.blocks]
    return RandomQuantity(
        space, tuple(block_max[field.block_of(p)] for p in space.points)
    )


def expectation(space: FiniteSpace, f: RandomQuantity) -> Fraction:
    _check_quantity(space, f)
    return sum((w * v for w, v in zip(space.weights, f.values)), Fraction(0))


def lower_expectation(space: FiniteSpace, field: FieldPartition, f: RandomQuantity) -> Fraction:
    """Expectation of the measurable minorant of f."""
    return expectation(space, minorant(space, field, f))


def upper_expectation(space: FiniteSpace, field: FieldPartition, f: RandomQuantity) -> Fraction:
    """Expectation of the measurable majorant of f."""
    return expectation(space, majorant(space, field, f))


def is_measurable(space: FiniteSpace, field: FieldPartition, obj) -> bool:
    """True when a set is a union of blocks, or a quantity is constant on
    every block.  For sets this agrees with inner == outer measure."""
    _check_field(space, field)
    if isinstance(obj, RandomQuantity):
        _check_quantity(space, obj)
        return all(
            len({obj.value(p) for p in block}) == 1 for block in field.blocks
        )
    h = space.subset(obj)
    for block in field.blocks:
        inside = set(block) & h
        if inside and inside != set(block):
            return False
    return True
