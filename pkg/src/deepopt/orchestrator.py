"""Outer optimization loop: train the landscape model on the sample pool,
generate candidates from it, hand the best to the inner search (NASH or
GA), and fold the search trace back into the pool."""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from .core import (
    STREAM_GA,
    STREAM_GENERATE,
    STREAM_INIT,
    STREAM_NASH,
    STREAM_TRAIN,
    BudgetAccountant,
    BudgetExhausted,
    EvaluatedSample,
    SamplePool,
    ScalingConfig,
    evaluate_candidate,
    rng_stream,
)
from .ga import GaConfig, ga_run
from .generator import GeneratorConfig, generate_batch
from .local_search import NashConfig, RunTrace, nash_run
from .model import LandscapeModel, TrainConfig, TrainReport, train_cycle

logger = logging.getLogger(__name__)


@dataclass
class DeepOptConfig:
    """Configuration of one model-guided run.

    `inner_search` is "nash" or "ga".  `discrete` routes generation through
    the probability-vector inversion and samples bits for the evaluated
    candidates.  `model_free` skips training and back-driving entirely (a
    control mode: with uniform seeding it reduces to best-of-batch restarts).
    """

    inner_search: str = "nash"
    architecture: str = "deep5"
    pool_capacity: int = 10_000
    y_prime_size: int = 1_000
    y_prime_mode: str = "best"  # "best": top scorers from the trace; "last": most recent
    init_seed_points: int = 200
    neighbors_per_seed: int = 9
    init_perturbation_scale: float = 0.05
    discrete: bool = False
    include_batch_in_pool: bool = True
    model_free: bool = False
    max_cycles: int | None = None
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    scaling: ScalingConfig = field(default_factory=ScalingConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    nash: NashConfig = field(default_factory=NashConfig)
    ga: GaConfig = field(default_factory=GaConfig)

    def __post_init__(self):
        if self.y_prime_size > self.pool_capacity:
            raise ValueError("y_prime_size cannot exceed pool_capacity")
        self.inner_search = self.inner_search.lower()
        if self.inner_search.startswith("nash"):
            self.inner_search = "nash"
        if self.inner_search not in ("nash", "ga"):
            raise ValueError(f"unknown inner search {self.inner_search!r}")
        if self.y_prime_mode not in ("best", "last"):
            raise ValueError(f"unknown y_prime_mode {self.y_prime_mode!r}")


@dataclass
class CycleRecord:
    """Per-cycle history: pool extremes for convergence plots, the training
    report, and start/end snapshots of the inner run for trajectory plots."""

    cycle: int
    pool_min: float
    pool_max: float
    pool_mean: float
    train_epochs: int
    train_restarts: int
    train_stop: str
    correlations: list[float]
    batch_best_score: float
    inner_start_values: np.ndarray
    inner_start_score: float
    inner_best_values: np.ndarray
    inner_best_score: float
    inner_evals: int
    best_score: float
    spent: int


@dataclass
class DeepOptResult:
    best: EvaluatedSample
    cycles: list[CycleRecord]
    pool: SamplePool


def initialize_pool(problem, cfg: DeepOptConfig, budget: BudgetAccountant,
                    rng: np.random.Generator) -> SamplePool:
    """Seed-point initialization: random seed genotypes, each joined by
    small perturbations that sketch its local neighborhood.  A short budget
    buys proportionally fewer seeds (with a warning)."""
    pool = SamplePool(cfg.pool_capacity)
    per_seed = 1 + cfg.neighbors_per_seed
    n_seeds = min(cfg.init_seed_points, budget.remaining // per_seed)
    if n_seeds < cfg.init_seed_points:
        logger.warning("budget covers only %d of %d init seed points",
                       n_seeds, cfg.init_seed_points)
    samples = []
    for _ in range(n_seeds):
        center = rng.random(problem.dimension)
        samples.append(evaluate_candidate(problem, center, budget, rng, "random-init"))
        for _ in range(cfg.neighbors_per_seed):
            jitter = rng.uniform(-cfg.init_perturbation_scale, cfg.init_perturbation_scale,
                                 size=problem.dimension)
            neighbor = np.clip(center + jitter, 0.0, 1.0)
            samples.append(evaluate_candidate(problem, neighbor, budget, rng, "random-init"))
    pool.insert(samples)
    return pool


def select_y_prime(trace: RunTrace, size: int, mode: str) -> list[EvaluatedSample]:
    """Subset of the run trace that augments the pool: the `size` best
    scorers ("best") or the `size` most recent unique solutions ("last")."""
    if mode == "best":
        return sorted(trace.visited, key=lambda s: s.raw_score, reverse=True)[:size]
    return trace.visited[-size:]


def deepopt_run(problem, cfg: DeepOptConfig, budget: BudgetAccountant,
                seed: int) -> DeepOptResult:
    """Run the full loop until the budget (or `max_cycles`) is exhausted.

    Per cycle: scale the pool, train with validation-correlation early
    stopping, freeze, generate a batch (a fraction back-driven), evaluate
    it, start the inner search from the batch's best member, then insert
    the trace subset (and the batch) into the pool.
    """
    rng_init = rng_stream(seed, STREAM_INIT)
    rng_train = rng_stream(seed, STREAM_TRAIN)
    rng_gen = rng_stream(seed, STREAM_GENERATE)
    rng_inner = rng_stream(seed, STREAM_GA if cfg.inner_search == "ga" else STREAM_NASH)

    pool = initialize_pool(problem, cfg, budget, rng_init)
    if len(pool) == 0:
        raise BudgetExhausted("budget too small to initialize the sample pool")
    best = pool.best()

    gen_cfg = cfg.generator
    if cfg.inner_search == "ga" and gen_cfg.batch_size != cfg.ga.population_size:
        gen_cfg = dataclasses.replace(gen_cfg, batch_size=cfg.ga.population_size)
    if cfg.model_free:
        gen_cfg = dataclasses.replace(gen_cfg, backdrive_fraction=0.0)

    model = None
    if not cfg.model_free:
        model = LandscapeModel(cfg.architecture, problem.dimension, rng_train,
                               learning_rate=cfg.train.learning_rate)
    validation = None
    cycles: list[CycleRecord] = []

    while not budget.exhausted and (cfg.max_cycles is None or len(cycles) < cfg.max_cycles):
        pool_min, pool_max = pool.extremes()
        pool_mean = float(np.mean([s.raw_score for s in pool.entries()]))

        report = TrainReport(epochs=0, restarts=0, stop_reason="model-free")
        if model is not None:
            model.unfreeze()
            report = train_cycle(model, pool, cfg.scaling, best, problem, budget,
                                 cfg.train, rng_train, prev_validation=validation,
                                 discrete=cfg.discrete)
            validation = report.validation
            model.freeze()

        batch = generate_batch(model, best.values, problem.dimension, gen_cfg, rng_gen,
                               discrete=cfg.discrete)
        candidate_rows = batch.values
        if cfg.discrete:
            # bits sampled from the generated probabilities become the
            # actual evaluation candidates
            candidate_rows = (rng_gen.random(candidate_rows.shape) < candidate_rows
                              ).astype(np.float64)

        batch_samples = []
        for row in candidate_rows:
            if budget.exhausted:
                break
            batch_samples.append(evaluate_candidate(problem, row, budget, rng_gen, "generated"))
        if not batch_samples:
            break
        batch_best = max(batch_samples, key=lambda s: s.raw_score)
        if batch_best.raw_score > best.raw_score:
            best = batch_best

        if cfg.inner_search == "ga":
            if len(batch_samples) < cfg.ga.population_size:
                break  # budget died mid-batch; the best is already tracked
            trace = ga_run(problem, cfg.ga, batch_samples, budget, rng_inner)
        else:
            trace = nash_run(batch_best, problem, cfg.nash, budget, rng_inner)
        if trace.best.raw_score > best.raw_score:
            best = trace.best

        additions = select_y_prime(trace, cfg.y_prime_size, cfg.y_prime_mode)
        if cfg.include_batch_in_pool:
            additions = additions + batch_samples
        pool.insert(additions)

        cycles.append(CycleRecord(
            cycle=len(cycles) + 1,
            pool_min=pool_min,
            pool_max=pool_max,
            pool_mean=pool_mean,
            train_epochs=report.epochs,
            train_restarts=report.restarts,
            train_stop=report.stop_reason,
            correlations=list(report.correlations),
            batch_best_score=batch_best.raw_score,
            inner_start_values=batch_best.values,
            inner_start_score=batch_best.raw_score,
            inner_best_values=trace.best.values,
            inner_best_score=trace.best.raw_score,
            inner_evals=trace.evals_used,
            best_score=best.raw_score,
            spent=budget.spent,
        ))
    return DeepOptResult(best=best, cycles=cycles, pool=pool)


def deepopt_ga_run(problem, cfg: DeepOptConfig, budget: BudgetAccountant,
                   seed: int) -> DeepOptResult:
    """Model-guided GA: each restart's initial population is the generated
    batch (sized to the population, fraction F back-driven)."""
    if cfg.inner_search != "ga":
        cfg = dataclasses.replace(cfg, inner_search="ga")
    return deepopt_run(problem, cfg, budget, seed)
