"""Shared primitives: genotypes, evaluated samples, the training pool,
score scaling, evaluation-budget accounting, and deterministic RNG streams."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

# Number of decimal digits used when deciding whether two genotypes are
# duplicates.  Exact float equality is too brittle after gradient updates.
CANONICAL_DIGITS = 12

# Provenance tags for evaluated samples (also used as budget phase keys).
SOURCES = ("random-init", "nash", "generated", "ga", "validation")

# Named RNG sub-streams, one per algorithm phase, so phases can be
# reordered or disabled without perturbing each other's draws.
STREAM_INIT = 0
STREAM_NASH = 1
STREAM_TRAIN = 2
STREAM_GENERATE = 3
STREAM_GA = 4
STREAM_VALIDATION = 5
STREAM_INSTANCE = 6


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested beyond the budget limit."""


def rng_stream(seed: int, stream_id: int) -> np.random.Generator:
    """Deterministic, platform-independent RNG for (seed, stream_id).

    Identical arguments always yield identical sequences; distinct
    stream ids yield statistically independent streams.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream_id,)))


def as_genotype(values) -> np.ndarray:
    """Copy `values` into a float64 genotype vector."""
    arr = np.asarray(values, dtype=np.float64).reshape(-1).copy()
    return arr


def canonical_key(values: np.ndarray) -> bytes:
    """Hashable duplicate-detection key: values rounded to 12 decimals."""
    rounded = np.round(np.asarray(values, dtype=np.float64), CANONICAL_DIGITS) + 0.0
    return rounded.tobytes()


@dataclass(frozen=True)
class EvaluatedSample:
    """A genotype paired with its raw (maximization-sense) objective score.

    `birth_tick` is assigned by the pool at insertion time; samples that
    never enter a pool keep the default -1.
    """

    values: np.ndarray
    raw_score: float
    birth_tick: int = -1
    source: str = "random-init"

    def key(self) -> bytes:
        return canonical_key(self.values)

    @property
    def dimension(self) -> int:
        return self.values.shape[0]


class SamplePool:
    """Bounded FIFO, deduplicated collection of evaluated samples.

    Eviction removes the oldest entries first; duplicates (canonical
    rounding) are dropped both against existing entries and within an
    inserted batch.
    """

    def __init__(self, capacity: int = 10_000):
        if capacity < 1:
            raise ValueError("pool capacity must be positive")
        self.capacity = int(capacity)
        self._entries: dict[bytes, EvaluatedSample] = {}
        self._tick = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, sample: EvaluatedSample) -> bool:
        return sample.key() in self._entries

    def insert(self, batch) -> int:
        """Insert samples, dropping duplicates; returns the eviction count."""
        for sample in batch:
            key = sample.key()
            if key in self._entries:
                continue
            self._entries[key] = dataclasses.replace(sample, birth_tick=self._tick)
            self._tick += 1
        evicted = 0
        while len(self._entries) > self.capacity:
            oldest = next(iter(self._entries))
            del self._entries[oldest]
            evicted += 1
        return evicted

    def entries(self) -> list[EvaluatedSample]:
        """Entries in FIFO (birth_tick) order."""
        return list(self._entries.values())

    def extremes(self) -> tuple[float, float]:
        """(min, max) raw score over the pool; error on an empty pool."""
        if not self._entries:
            raise ValueError("extremes of an empty pool")
        scores = [s.raw_score for s in self._entries.values()]
        return (min(scores), max(scores))

    def best(self) -> EvaluatedSample:
        if not self._entries:
            raise ValueError("best of an empty pool")
        return max(self._entries.values(), key=lambda s: s.raw_score)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked (inputs, raw scores) aligned with entries() order."""
        entries = self.entries()
        if not entries:
            raise ValueError("as_arrays of an empty pool")
        X = np.stack([s.values for s in entries])
        y = np.array([s.raw_score for s in entries], dtype=np.float64)
        return X, y


@dataclass
class ScalingConfig:
    """Training targets are scaled to [0, ceiling]; a ceiling below 1.0
    makes the inversion target (1.0) demand extrapolated, strictly
    better solutions."""

    ceiling: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.ceiling <= 1.0):
            raise ValueError("scaling ceiling must lie in (0, 1]")


def scale_scores(pool: SamplePool, cfg: ScalingConfig | None = None) -> np.ndarray:
    """Affine-map pool raw scores onto [0, ceiling], aligned with entries().

    min maps to 0 and max to the ceiling.  A degenerate pool (all scores
    equal) maps every entry to the ceiling: those samples are the best
    seen so far, and training targets should reflect that.
    """
    cfg = cfg or ScalingConfig()
    if len(pool) == 0:
        raise ValueError("cannot scale an empty pool")
    scores = np.array([s.raw_score for s in pool.entries()], dtype=np.float64)
    lo, hi = scores.min(), scores.max()
    if hi == lo:
        return np.full_like(scores, cfg.ceiling)
    return cfg.ceiling * (scores - lo) / (hi - lo)


class BudgetAccountant:
    """Counts true objective evaluations against a hard limit.

    Also keeps per-phase totals (for conservation checks) and the
    best-so-far improvement trace used by the experiment reports.
    """

    def __init__(self, limit: int = 500_000):
        if limit < 1:
            raise ValueError("budget limit must be positive")
        self.limit = int(limit)
        self.spent = 0
        self.by_source: dict[str, int] = {}
        self.best_score: float | None = None
        # (eval_index, best_so_far) recorded only when the best improves.
        self.improvements: list[tuple[int, float]] = []

    @property
    def exhausted(self) -> bool:
        return self.spent >= self.limit

    @property
    def remaining(self) -> int:
        return self.limit - self.spent

    def can_afford(self, n: int) -> bool:
        return self.remaining >= n

    def charge(self, source: str) -> None:
        if self.exhausted:
            raise BudgetExhausted(f"evaluation budget of {self.limit} exhausted")
        self.spent += 1
        self.by_source[source] = self.by_source.get(source, 0) + 1

    def observe(self, raw_score: float) -> None:
        if self.best_score is None or raw_score > self.best_score:
            self.best_score = raw_score
            self.improvements.append((self.spent, raw_score))


def evaluate_candidate(problem, values, budget: BudgetAccountant,
                       rng: np.random.Generator | None, source: str) -> EvaluatedSample:
    """Charge the budget, evaluate `values` on `problem`, and wrap the result."""
    budget.charge(source)
    genotype = as_genotype(values)
    raw = float(problem.evaluate(genotype, rng))
    if not np.isfinite(raw):
        raise ValueError(f"{getattr(problem, 'kind', problem)} returned non-finite score {raw!r}")
    budget.observe(raw)
    return EvaluatedSample(values=genotype, raw_score=raw, source=source)
