import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deepopt.core import (
    BudgetAccountant,
    BudgetExhausted,
    EvaluatedSample,
    SamplePool,
    ScalingConfig,
    canonical_key,
    evaluate_candidate,
    rng_stream,
    scale_scores,
)


def sample(score, values=None, tag=0):
    if values is None:
        values = np.array([float(tag), score / 100.0 % 1.0])
    return EvaluatedSample(values=np.asarray(values, dtype=float), raw_score=float(score))


def pool_of(scores, capacity=10):
    pool = SamplePool(capacity)
    pool.insert([sample(s, values=[i / 10.0, 0.5]) for i, s in enumerate(scores)])
    return pool


class TestScaling:
    def test_unit_ceiling_endpoints(self):
        scaled = scale_scores(pool_of([2, 4, 6]), ScalingConfig(ceiling=1.0))
        assert np.allclose(scaled, [0.0, 0.5, 1.0])

    def test_half_ceiling(self):
        scaled = scale_scores(pool_of([2, 4, 6]), ScalingConfig(ceiling=0.5))
        assert np.allclose(scaled, [0.0, 0.25, 0.5])

    def test_degenerate_pool_maps_to_ceiling(self):
        scaled = scale_scores(pool_of([7, 7, 7]), ScalingConfig(ceiling=1.0))
        assert np.allclose(scaled, [1.0, 1.0, 1.0])

    def test_empty_pool_rejected(self):
        with pytest.raises(ValueError):
            scale_scores(SamplePool(4), ScalingConfig())

    def test_ceiling_validation(self):
        with pytest.raises(ValueError):
            ScalingConfig(ceiling=0.0)
        with pytest.raises(ValueError):
            ScalingConfig(ceiling=1.2)

    @given(scores=st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=30),
           ceiling=st.floats(0.05, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_order_preserved_and_argmax_invariant(self, scores, ceiling):
        pool = pool_of(scores, capacity=50)
        entries = pool.entries()
        scaled = scale_scores(pool, ScalingConfig(ceiling=ceiling))
        raw = np.array([s.raw_score for s in entries])
        order = np.argsort(raw, kind="stable")
        assert (np.diff(scaled[order]) >= -1e-12).all()
        assert np.argmax(raw) == np.argmax(scaled) or raw.max() == raw.min()


class TestSamplePool:
    def test_fifo_eviction(self):
        pool = SamplePool(3)
        pool.insert([sample(1, [0.1]), sample(2, [0.2]), sample(3, [0.3])])
        evicted = pool.insert([sample(4, [0.4])])
        assert evicted == 1
        assert [s.raw_score for s in pool.entries()] == [2, 3, 4]

    def test_duplicate_dropped(self):
        pool = SamplePool(3)
        pool.insert([sample(1, [0.1])])
        evicted = pool.insert([sample(1, [0.1])])
        assert evicted == 0 and len(pool) == 1

    def test_intra_batch_duplicates(self):
        pool = SamplePool(3)
        pool.insert([sample(1, [0.1]), sample(2, [0.2]), sample(1, [0.1])])
        assert len(pool) == 2

    def test_duplicate_uses_canonical_rounding(self):
        a = np.array([0.5, 0.25])
        assert canonical_key(a) == canonical_key(a + 1e-14)
        assert canonical_key(a) != canonical_key(a + 1e-9)

    def test_birth_ticks_increase(self):
        pool = SamplePool(10)
        pool.insert([sample(s, [s / 10.0]) for s in (1, 2, 3)])
        ticks = [s.birth_tick for s in pool.entries()]
        assert ticks == sorted(ticks) and len(set(ticks)) == 3

    def test_extremes(self):
        pool = pool_of([2, 4, 6])
        assert pool.extremes() == (2, 6)
        assert pool_of([5]).extremes() == (5, 5)
        pool.insert([sample(9, [0.9, 0.9])])
        assert pool.extremes() == (2, 9)
        with pytest.raises(ValueError):
            SamplePool(2).extremes()

    @given(st.lists(st.tuples(st.integers(0, 40), st.floats(-10, 10)),
                    min_size=1, max_size=120))
    @settings(max_examples=60, deadline=None)
    def test_capacity_never_exceeded(self, inserts):
        pool = SamplePool(7)
        for tag, score in inserts:
            pool.insert([sample(score, [tag / 41.0, 0.25])])
            assert len(pool) <= 7
        keys = [s.key() for s in pool.entries()]
        assert len(keys) == len(set(keys))


class TestBudgetAccountant:
    def test_charges_and_sources(self):
        budget = BudgetAccountant(5)
        for src in ("random-init", "nash", "nash", "validation", "generated"):
            budget.charge(src)
        assert budget.spent == 5 and budget.exhausted
        assert budget.by_source == {"random-init": 1, "nash": 2, "validation": 1,
                                    "generated": 1}
        assert sum(budget.by_source.values()) == budget.spent

    def test_charge_beyond_limit_raises(self):
        budget = BudgetAccountant(1)
        budget.charge("nash")
        with pytest.raises(BudgetExhausted):
            budget.charge("nash")

    def test_improvement_trace_starts_at_one(self):
        budget = BudgetAccountant(10)
        for score in (3.0, 2.0, 5.0, 5.0, 7.0):
            budget.charge("nash")
            budget.observe(score)
        assert budget.improvements[0] == (1, 3.0)
        assert budget.improvements == [(1, 3.0), (3, 5.0), (5, 7.0)]

    def test_limit_validation(self):
        with pytest.raises(ValueError):
            BudgetAccountant(0)


class TestRngStream:
    def test_determinism(self):
        a = rng_stream(42, 0).random(100)
        b = rng_stream(42, 0).random(100)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        a = rng_stream(42, 0).random(100)
        b = rng_stream(42, 1).random(100)
        assert not np.array_equal(a, b)

    def test_uniform_range(self):
        draws = rng_stream(42, 0).random(1000)
        assert (draws >= 0.0).all() and (draws < 1.0).all()


class TestEvaluateCandidate:
    class _Linear:
        kind = "linear"
        dimension = 3

        def evaluate(self, values, rng=None):
            return float(values.sum())

    def test_charges_and_wraps(self):
        budget = BudgetAccountant(2)
        got = evaluate_candidate(self._Linear(), [0.1, 0.2, 0.3], budget, None, "nash")
        assert got.raw_score == pytest.approx(0.6)
        assert got.source == "nash" and budget.spent == 1

    def test_non_finite_score_rejected(self):
        class Broken(self._Linear):
            def evaluate(self, values, rng=None):
                return float("nan")

        with pytest.raises(ValueError):
            evaluate_candidate(Broken(), [0.1, 0.2, 0.3], BudgetAccountant(5), None, "nash")
