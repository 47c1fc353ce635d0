import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llnlab import (
    BlockAlternatingPlan,
    BoundsError,
    ConstantMixturePlan,
    RandomQuantity,
    RegimeMixturePlan,
    exactness_threshold,
    is_min_coordinate,
    make_schedule,
    plan_for_target,
    schedule_ends,
    schedule_segments,
    simple_approx,
    target_mixture_weight,
    truncate,
)
from conftest import random_quantity, random_space

seeds = st.integers(min_value=0, max_value=10_000)


class TestTruncate:
    def test_reference(self, ref_psi):
        assert truncate(ref_psi, 1).values == (0, 1, 1, 0)

    def test_identity_past_max(self, ref_psi):
        assert truncate(ref_psi, 2) == ref_psi
        assert truncate(ref_psi, 99) == ref_psi

    def test_zero_payoff_unchanged(self, ref_space):
        z = RandomQuantity(ref_space, (Fraction(0),) * 4)
        for n in (1, 3, 10):
            assert truncate(z, n) == z


class TestSimpleApprox:
    def test_on_grid_unchanged(self, ref_space):
        f = RandomQuantity(ref_space, (Fraction(0), Fraction(1), Fraction(1), Fraction(0)))
        assert simple_approx(f, 2) == f

    def test_floor_to_grid(self):
        from llnlab import build_space

        sp = build_space(["x"], [Fraction(1)])
        f = RandomQuantity(sp, (Fraction(7, 10),))
        assert simple_approx(f, 3).values == (Fraction(2, 3),)

    def test_precondition_enforced(self, ref_psi):
        with pytest.raises(ValueError):
            simple_approx(ref_psi, 1)  # |psi| reaches 2

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds, n=st.integers(min_value=1, max_value=9))
    def test_both_bounds(self, seed, n):
        rng = random.Random(seed)
        space = random_space(rng)
        f = random_quantity(rng, space, span=2 * n)
        f = truncate(f, n)
        g = simple_approx(f, n)
        assert all(abs(a - b) <= Fraction(1, n) for a, b in zip(f.values, g.values))
        assert all(abs(v) <= n for v in g.values)


class TestTargetMixtureWeight:
    def test_interpolation(self):
        assert target_mixture_weight(1, Fraction(1, 2), Fraction(3, 2)) == Fraction(1, 2)

    def test_endpoints(self):
        assert target_mixture_weight(Fraction(1, 2), Fraction(1, 2), Fraction(3, 2)) == 0
        assert target_mixture_weight(Fraction(3, 2), Fraction(1, 2), Fraction(3, 2)) == 1

    def test_degenerate_interval(self):
        assert target_mixture_weight(2, 2, 2) == 0

    def test_out_of_range_rejected(self):
        with pytest.raises(BoundsError):
            target_mixture_weight(2, Fraction(1, 2), Fraction(3, 2))


class TestSchedules:
    def test_consecutive_factorials(self):
        sched = make_schedule("factorial")
        assert [sched.value(i) for i in range(7)] == [1, 2, 6, 24, 120, 720, 5040]

    def test_ratio_escalates(self):
        sched = make_schedule("factorial")
        ratios = [
            Fraction(sched.value(i + 1), sched.value(i)) for i in range(1, 8)
        ]
        assert ratios == sorted(ratios)
        assert all(r2 > r1 for r1, r2 in zip(ratios, ratios[1:]))

    def test_threshold_shift(self, ref_scenario):
        # Payoff magnitude reaches 2, so the first threshold moves past 2:
        # the schedule starts at 3! = 6.
        assert exactness_threshold(ref_scenario.psi) == 2
        sched = make_schedule("factorial", ref_scenario)
        assert [sched.value(i) for i in range(4)] == [1, 6, 24, 120]

    def test_sparse_factorial(self, ref_scenario):
        sched = make_schedule("factorial", ref_scenario, start=3, step=3)
        assert [sched.value(i) for i in range(4)] == [1, 6, 720, 362880]

    def test_geometric_escalating(self):
        sched = make_schedule("geometric-escalating")
        vals = [sched.value(i) for i in range(6)]
        assert vals == [1, 2, 8, 64, 1024, 32768]
        ratios = [vals[i + 1] // vals[i] for i in range(5)]
        assert ratios == [2, 4, 8, 16, 32]

    def test_segments_tile_horizon(self, ref_scenario):
        sched = make_schedule("factorial", ref_scenario)
        segs = schedule_segments(sched, 100)
        assert segs[0] == (1, 1, False)
        covered = []
        for lo, hi, _ in segs:
            covered.extend(range(lo, hi + 1))
        assert covered == list(range(1, 101))
        for lo, hi, mn in segs:
            for k in range(lo, hi + 1):
                if k > 1:
                    assert is_min_coordinate(sched, k) == mn

    def test_first_coordinate_is_max_type(self):
        sched = make_schedule("factorial")
        assert not is_min_coordinate(sched, 1)
        # Odd-indexed blocks are min-type: coordinate 2 belongs to block 1.
        assert is_min_coordinate(sched, 2)

    def test_ends(self):
        sched = make_schedule("factorial")
        assert schedule_ends(sched, 1000) == [2, 6, 24, 120, 720]


class TestPlans:
    def test_constant_mixture_dist(self, ref_scenario):
        plan = ConstantMixturePlan(ref_scenario, Fraction(1, 2))
        assert plan.coordinate_dist() == (
            (Fraction(0), Fraction(1, 4)),
            (Fraction(1), Fraction(1, 2)),
            (Fraction(2), Fraction(1, 4)),
        )
        assert plan.target_mean == 1
        assert plan.coordinate_variance(1) == Fraction(1, 2)

    def test_plan_for_target(self, ref_scenario):
        plan = plan_for_target(ref_scenario, Fraction(5, 4))
        assert plan.weight == Fraction(3, 4)
        assert plan.target_mean == Fraction(5, 4)

    def test_alternating_coordinate_dists(self, ref_scenario):
        sched = make_schedule("factorial", ref_scenario)
        plan = BlockAlternatingPlan(ref_scenario, sched)
        assert plan.coordinate_dist(1) == ref_scenario.max_value_dist
        assert plan.coordinate_dist(2) == ref_scenario.min_value_dist  # block 1
        assert plan.coordinate_dist(7) == ref_scenario.max_value_dist  # block 2

    def test_regime_marginal_matches_constant(self, ref_scenario):
        a = Fraction(1, 3)
        regime = RegimeMixturePlan(ref_scenario, a)
        constant = ConstantMixturePlan(ref_scenario, a)
        assert regime.coordinate_dist() == constant.coordinate_dist()

    def test_regime_sum_distribution_is_mixture(self, ref_scenario):
        a = Fraction(1, 3)
        regime = RegimeMixturePlan(ref_scenario, a)
        lo = ConstantMixturePlan(ref_scenario, 0).exact_sum_distribution(3)
        hi = ConstantMixturePlan(ref_scenario, 1).exact_sum_distribution(3)
        expected = {}
        for s, p in lo.items():
            expected[s] = expected.get(s, Fraction(0)) + (1 - a) * p
        for s, p in hi.items():
            expected[s] = expected.get(s, Fraction(0)) + a * p
        assert regime.exact_sum_distribution(3) == expected

    def test_weight_out_of_range_rejected(self, ref_scenario):
        with pytest.raises(BoundsError):
            ConstantMixturePlan(ref_scenario, Fraction(3, 2))
