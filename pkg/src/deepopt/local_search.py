"""Next-Ascent Stochastic Hillclimbing (NASH) and its three
initialization variants."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    STREAM_INIT,
    STREAM_NASH,
    BudgetAccountant,
    BudgetExhausted,
    EvaluatedSample,
    evaluate_candidate,
    rng_stream,
)


@dataclass
class NashConfig:
    """Knobs for one NASH run and for the restart drivers.

    `perturbation_fraction` (m) bounds how many positions one move may
    touch; each touched gene is redrawn within +/- `mutation_relative_range`
    of itself.  A run ends after `max_evals_per_run` evaluations or
    `stall_limit` consecutive non-accepted candidates (with
    `tie_resets_stall`, accepted ties also reset the counter).
    """

    perturbation_fraction: float = 0.02
    mutation_relative_range: float = 0.25
    max_evals_per_run: int = 10_000
    stall_limit: int = 500
    variant: str = "v1"
    presample_count: int = 50
    v3_perturbation_scale: float = 0.05
    zero_floor: float = 0.02
    tie_resets_stall: bool = True

    def __post_init__(self):
        if not (0.0 < self.perturbation_fraction <= 1.0):
            raise ValueError("perturbation_fraction must lie in (0, 1]")
        if self.mutation_relative_range <= 0.0:
            raise ValueError("mutation_relative_range must be positive")
        if self.stall_limit >= self.max_evals_per_run:
            raise ValueError("stall_limit must be below max_evals_per_run")
        self.variant = self.variant.lower().removeprefix("nash-")
        if self.variant not in ("v1", "v2", "v3"):
            raise ValueError(f"unknown NASH variant {self.variant!r}")


@dataclass
class RunTrace:
    """Unique evaluated samples from one run, its best, and evals consumed.

    GA runs additionally record the best score of each generation (NASH
    runs leave `generation_bests` empty).
    """

    visited: list[EvaluatedSample]
    best: EvaluatedSample
    evals_used: int
    generation_bests: list[float] = field(default_factory=list)


@dataclass
class RunRecord:
    """Per-run bookkeeping kept by the restart drivers (start/end snapshots
    feed the report files)."""

    index: int
    start_values: np.ndarray
    start_score: float
    best_values: np.ndarray
    best_score: float
    evals_used: int


@dataclass
class SearchResult:
    best: EvaluatedSample
    runs: list[RunRecord] = field(default_factory=list)


def perturb(values: np.ndarray, cfg: NashConfig, rng: np.random.Generator) -> np.ndarray:
    """One NASH move: redraw k ~ U[1, max(1, round(m*d))] positions (chosen
    with replacement) multiplicatively within +/- the relative range, then
    clip to [0,1].  Exact zeros are redrawn in [0, zero_floor] since the
    multiplicative rule would freeze them."""
    out = values.copy()
    d = out.size
    k_max = max(1, int(np.floor(cfg.perturbation_fraction * d + 0.5)))
    k = int(rng.integers(1, k_max + 1))
    r = cfg.mutation_relative_range
    for _ in range(k):
        i = int(rng.integers(0, d))
        p = out[i]
        if p == 0.0:
            out[i] = rng.uniform(0.0, cfg.zero_floor)
        else:
            out[i] = min(1.0, max(0.0, rng.uniform((1.0 - r) * p, (1.0 + r) * p)))
    return out


def nash_run(init, problem, cfg: NashConfig, budget: BudgetAccountant,
             rng: np.random.Generator) -> RunTrace:
    """One next-ascent run from `init` (raw genotype, or a pre-evaluated
    sample whose score is reused without another charge).

    Candidates scoring >= the current score are accepted; the trace holds
    every unique evaluated candidate.
    """
    if isinstance(init, EvaluatedSample):
        current = init
        evals_used = 0
    else:
        if budget.exhausted:
            raise BudgetExhausted("no budget left to evaluate the initial candidate")
        current = evaluate_candidate(problem, init, budget, rng, "nash")
        evals_used = 1
    visited: dict[bytes, EvaluatedSample] = {current.key(): current}
    stall = 0
    while (evals_used < cfg.max_evals_per_run and stall < cfg.stall_limit
           and not budget.exhausted):
        candidate_values = perturb(current.values, cfg, rng)
        candidate = evaluate_candidate(problem, candidate_values, budget, rng, "nash")
        evals_used += 1
        visited.setdefault(candidate.key(), candidate)
        if candidate.raw_score >= current.raw_score:
            improved = candidate.raw_score > current.raw_score
            stall = 0 if (improved or cfg.tie_resets_stall) else stall + 1
            current = candidate
        else:
            stall += 1
    return RunTrace(visited=list(visited.values()), best=current, evals_used=evals_used)


def nash_init(variant: str, best_so_far, problem, cfg: NashConfig,
              budget: BudgetAccountant, rng: np.random.Generator):
    """Produce the starting candidate for the next run.

    V1 returns an unevaluated uniform genotype.  V2 evaluates M uniform
    samples and returns the best; V3 does the same around the best solution
    from all previous runs (first run falls back to V1).  Returns None when
    no evaluation can be afforded.
    """
    variant = variant.lower().removeprefix("nash-")
    if variant == "v1" or (variant == "v3" and best_so_far is None):
        return rng.random(problem.dimension)
    count = min(cfg.presample_count, budget.remaining)
    if count == 0:
        return None
    best = None
    for _ in range(count):
        if variant == "v2":
            values = rng.random(problem.dimension)
        else:
            jitter = rng.uniform(-cfg.v3_perturbation_scale, cfg.v3_perturbation_scale,
                                 size=problem.dimension)
            values = np.clip(best_so_far.values + jitter, 0.0, 1.0)
        sample = evaluate_candidate(problem, values, budget, rng, "nash")
        if best is None or sample.raw_score > best.raw_score:
            best = sample
    return best


def nash_search(problem, cfg: NashConfig, budget: BudgetAccountant, seed: int,
                max_runs: int | None = None) -> SearchResult:
    """Standalone NASH-V1/V2/V3 trial: restart runs until the budget is
    exhausted (or `max_runs`), tracking the best solution found overall."""
    rng_init = rng_stream(seed, STREAM_INIT)
    rng_run = rng_stream(seed, STREAM_NASH)
    best: EvaluatedSample | None = None
    runs: list[RunRecord] = []
    while not budget.exhausted and (max_runs is None or len(runs) < max_runs):
        init = nash_init(cfg.variant, best, problem, cfg, budget, rng_init)
        if init is None:
            break
        if not isinstance(init, EvaluatedSample) and budget.exhausted:
            break
        trace = nash_run(init, problem, cfg, budget, rng_run)
        start = trace.visited[0]
        runs.append(RunRecord(
            index=len(runs) + 1,
            start_values=start.values,
            start_score=start.raw_score,
            best_values=trace.best.values,
            best_score=trace.best.raw_score,
            evals_used=trace.evals_used,
        ))
        if best is None or trace.best.raw_score > best.raw_score:
            best = trace.best
    if best is None:
        raise BudgetExhausted("budget too small to evaluate any candidate")
    return SearchResult(best=best, runs=runs)
