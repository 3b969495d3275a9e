"""Generational genetic algorithm: uniform crossover, per-gene mutation,
fitness-proportional selection over range-scaled scores, single-member
elitism, and periodic restarts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    STREAM_GA,
    BudgetAccountant,
    BudgetExhausted,
    EvaluatedSample,
    evaluate_candidate,
    rng_stream,
)
from .local_search import RunRecord, RunTrace, SearchResult


@dataclass
class GaConfig:
    population_size: int = 50
    mutation_rate: float = 0.02
    restart_evals: int = 10_000
    # Fitness-proportional selection runs on scores scaled to [0, 1] within
    # the generation; the floor keeps zero-fitness members selectable.
    selection_floor: float = 1e-6

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not (0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("mutation_rate must lie in [0, 1]")


def uniform_crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator):
    """Per-gene fair coin routes a's gene to child1 and b's to child2, or
    vice versa; the children are gene-wise complements of each other."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("crossover parents must share a dimension")
    mask = rng.random(a.shape) < 0.5
    return np.where(mask, a, b), np.where(mask, b, a)


def mutate(values: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Each gene is independently replaced by a fresh Uniform[0,1) draw with
    probability `rate`."""
    out = np.asarray(values, dtype=np.float64).copy()
    mask = rng.random(out.size) < rate
    if mask.any():
        out[mask] = rng.random(int(mask.sum()))
    return out


def _selection_probabilities(scores: np.ndarray, floor: float) -> np.ndarray:
    lo, hi = scores.min(), scores.max()
    scaled = np.ones_like(scores) if hi == lo else (scores - lo) / (hi - lo)
    probs = np.maximum(scaled, floor)
    return probs / probs.sum()


def ga_run(problem, cfg: GaConfig, init_population, budget: BudgetAccountant,
           rng: np.random.Generator) -> RunTrace:
    """One GA run: generational loop until `restart_evals` evaluations or
    budget exhaustion.

    `init_population` is either an array of genotypes (evaluated here) or a
    list of already-evaluated samples (reused without another charge).  The
    previous generation's best is injected over the worst offspring every
    generation, so it survives without re-evaluation.
    """
    if len(init_population) != cfg.population_size:
        raise ValueError(f"init_population must hold exactly {cfg.population_size} members")
    evals_used = 0
    population: list[EvaluatedSample] = []
    if isinstance(init_population[0], EvaluatedSample):
        population = list(init_population)
    else:
        rows = np.atleast_2d(np.asarray(init_population, dtype=np.float64))
        for row in rows:
            if budget.exhausted or evals_used >= cfg.restart_evals:
                break
            population.append(evaluate_candidate(problem, row, budget, rng, "ga"))
            evals_used += 1
    if not population:
        raise BudgetExhausted("no budget left to evaluate the initial population")
    visited: dict[bytes, EvaluatedSample] = {}
    for s in population:
        visited.setdefault(s.key(), s)
    elite = max(population, key=lambda s: s.raw_score)
    generation_bests = [elite.raw_score]

    while evals_used < cfg.restart_evals and not budget.exhausted and len(population) >= 2:
        scores = np.array([s.raw_score for s in population])
        probs = _selection_probabilities(scores, cfg.selection_floor)
        offspring: list[np.ndarray] = []
        while len(offspring) < cfg.population_size:
            i, j = rng.choice(len(population), size=2, p=probs)
            child1, child2 = uniform_crossover(population[i].values, population[j].values, rng)
            offspring.append(mutate(child1, cfg.mutation_rate, rng))
            if len(offspring) < cfg.population_size:
                offspring.append(mutate(child2, cfg.mutation_rate, rng))
        next_generation: list[EvaluatedSample] = []
        for child in offspring:
            if budget.exhausted or evals_used >= cfg.restart_evals:
                break
            sample = evaluate_candidate(problem, child, budget, rng, "ga")
            evals_used += 1
            visited.setdefault(sample.key(), sample)
            next_generation.append(sample)
        if len(next_generation) < cfg.population_size:
            break  # budget died mid-generation; keep the trace, stop the run
        worst = min(range(len(next_generation)), key=lambda k: next_generation[k].raw_score)
        next_generation[worst] = elite
        population = next_generation
        elite = max(population, key=lambda s: s.raw_score)
        generation_bests.append(elite.raw_score)

    return RunTrace(visited=list(visited.values()), best=elite, evals_used=evals_used,
                    generation_bests=generation_bests)


def ga_search(problem, cfg: GaConfig, budget: BudgetAccountant, seed: int,
              max_runs: int | None = None) -> SearchResult:
    """Standard GA trial: uniformly redrawn population on every restart."""
    rng = rng_stream(seed, STREAM_GA)
    best: EvaluatedSample | None = None
    runs: list[RunRecord] = []
    while not budget.exhausted and (max_runs is None or len(runs) < max_runs):
        init = rng.random((cfg.population_size, problem.dimension))
        trace = ga_run(problem, cfg, init, budget, rng)
        start = max(trace.visited[:cfg.population_size], key=lambda s: s.raw_score)
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
        raise RuntimeError("budget too small to evaluate any candidate")
    return SearchResult(best=best, runs=runs)
