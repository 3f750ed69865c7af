import random

import pytest
from hypothesis import given, strategies as st

from rescuedispatch.bursttime import BurstPredictor


class TestObserve:
    def test_alpha_one_tracks_last_actual(self):
        p = BurstPredictor(54, alpha=1.0)
        assert p.observe(60) == 60

    def test_alpha_zero_is_constant(self):
        p = BurstPredictor(54, alpha=0.0)
        assert p.observe(90) == 54

    def test_half_alpha_sequence(self):
        p = BurstPredictor(54, alpha=0.5)
        assert [p.observe(x) for x in (60, 40, 70)] == [57.0, 48.5, 59.25]

    def test_rejects_non_positive(self):
        p = BurstPredictor(54)
        with pytest.raises(ValueError):
            p.observe(0)
        with pytest.raises(ValueError):
            p.observe(-5)


class TestBootstrap:
    def test_seed_is_initial_estimate(self):
        assert BurstPredictor.bootstrap(54).estimate == 54
        assert BurstPredictor.bootstrap(1).estimate == 1

    def test_rejects_bad_seed_and_alpha(self):
        with pytest.raises(ValueError):
            BurstPredictor(0)
        with pytest.raises(ValueError):
            BurstPredictor(54, alpha=1.5)

    @given(st.floats(0, 1))
    def test_constant_observations_are_a_fixed_point(self, alpha):
        p = BurstPredictor(54, alpha=alpha)
        for _ in range(5):
            assert p.observe(54) == pytest.approx(54, abs=1e-9)


class TestProperties:
    @given(st.floats(0, 1), st.lists(st.floats(1, 200), min_size=1, max_size=50))
    def test_convex_hull_bound(self, alpha, observations):
        p = BurstPredictor(54, alpha=alpha)
        seen = [54.0]
        for value in observations:
            p.observe(value)
            seen.append(value)
            assert min(seen) - 1e-9 <= p.estimate <= max(seen) + 1e-9

    @given(st.floats(0.01, 1), st.floats(1, 200))
    def test_gap_shrinks_by_one_minus_alpha(self, alpha, target):
        p = BurstPredictor(54, alpha=alpha)
        gap = abs(p.estimate - target)
        for _ in range(10):
            p.observe(target)
            new_gap = abs(p.estimate - target)
            assert new_gap == pytest.approx(gap * (1 - alpha), abs=1e-9)
            gap = new_gap

    def test_thousand_step_loop_oracle(self):
        rng = random.Random(42)
        p = BurstPredictor(54, alpha=0.3)
        expected = 54.0
        for _ in range(1000):
            actual = rng.uniform(1, 180)
            p.observe(actual)
            expected = 0.3 * actual + 0.7 * expected  # independent recurrence
            assert abs(p.estimate - expected) <= 1e-9
        assert p.replayed_estimate() == pytest.approx(p.estimate, abs=1e-9)
