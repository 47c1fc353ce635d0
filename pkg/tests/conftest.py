import random
from fractions import Fraction

import pytest

from llnlab import (
    FieldPartition,
    FiniteSpace,
    RandomQuantity,
    Scenario,
    build_space,
    trivial_field,
)


@pytest.fixture
def ref_space() -> FiniteSpace:
    return build_space(["a", "b", "c", "d"], [Fraction(1, 4)] * 4)


@pytest.fixture
def ref_field(ref_space) -> FieldPartition:
    return FieldPartition(ref_space, (("a", "b"), ("c", "d")))


@pytest.fixture
def ref_psi(ref_space) -> RandomQuantity:
    return RandomQuantity(ref_space, (Fraction(0), Fraction(1), Fraction(1), Fraction(2)))


@pytest.fixture
def ref_scenario(ref_space, ref_field, ref_psi) -> Scenario:
    # Uniform four-point space, two atoms, payoff (0, 1, 1, 2):
    # lower expectation 1/2, upper expectation 3/2.
    return Scenario(ref_space, ref_field, ref_psi)


@pytest.fixture
def two_point_scenario() -> Scenario:
    space = build_space([0, 1], [Fraction(1, 2), Fraction(1, 2)])
    psi = RandomQuantity(space, (Fraction(0), Fraction(1)))
    return Scenario(space, trivial_field(space), psi)


def random_space(rng: random.Random, max_points: int = 8) -> FiniteSpace:
    m = rng.randint(1, max_points)
    raw = [rng.randint(1, 9) for _ in range(m)]
    total = sum(raw)
    return build_space(
        [f"p{i}" for i in range(m)], [Fraction(r, total) for r in raw]
    )


def random_partition(rng: random.Random, space: FiniteSpace, max_blocks: int = 6) -> FieldPartition:
    k = rng.randint(1, min(max_blocks, space.size))
    assignment = {p: rng.randrange(k) for p in space.points}
    # Guarantee no empty block label gaps by regrouping.
    groups = {}
    for p, g in assignment.items():
        groups.setdefault(g, []).append(p)
    return FieldPartition(space, tuple(tuple(g) for g in groups.values()))


def random_quantity(rng: random.Random, space: FiniteSpace, span: int = 6) -> RandomQuantity:
    return RandomQuantity(
        space,
        tuple(
            Fraction(rng.randint(-span, span), rng.randint(1, 4))
            for _ in space.points
        ),
    )


def random_subset(rng: random.Random, space: FiniteSpace) -> frozenset:
    return frozenset(p for p in space.points if rng.random() < 0.5)
