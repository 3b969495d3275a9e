"""Candidate generation from the frozen landscape model: perturbation of
the incumbent best, gradient-based input back-driving toward a clamped
target of 1.0, and the probability-vector variant for binary encodings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import LandscapeModel

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class GeneratorConfig:
    """Batch-generation knobs.

    `backdrive_fraction` of each seeded batch is refined by inversion;
    inversion iterates until no gene moves more than `tolerance` in one
    step or `max_iterations` is reached.  `learning_rate_scale` exists only
    to replicate the (unsuccessful) raised-learning-rate alternative to the
    binary-sampling path; leave it at 1.
    """

    batch_size: int = 50
    backdrive_fraction: float = 0.5
    learning_rate: float = 1e-3
    learning_rate_scale: float = 1.0
    max_iterations: int = 500
    tolerance: float = 1e-4
    perturbation_scale: float = 0.05
    discrete_sample_count: int = 200
    seed_mode: str = "best"  # "best": jitter the incumbent; "uniform": fresh random seeds

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if not (0.0 <= self.backdrive_fraction <= 1.0):
            raise ValueError("backdrive_fraction must lie in [0, 1]")
        if self.discrete_sample_count < 1:
            raise ValueError("discrete_sample_count must be at least 1")
        if self.seed_mode not in ("best", "uniform"):
            raise ValueError(f"unknown seed_mode {self.seed_mode!r}")

    @property
    def effective_learning_rate(self) -> float:
        return self.learning_rate * self.learning_rate_scale


@dataclass
class GeneratedBatch:
    values: np.ndarray           # (batch, dim), order preserved from seeding
    driven: np.ndarray           # indices of members replaced by inversion


def seed_batch(best_values: np.ndarray | None, dim: int, cfg: GeneratorConfig,
               rng: np.random.Generator) -> np.ndarray:
    """Batch seeds: per-gene jitter of the best solution, or uniform draws
    when no best exists yet (first cycle) or seed_mode is "uniform"."""
    if best_values is None or cfg.seed_mode == "uniform":
        return rng.random((cfg.batch_size, dim))
    jitter = rng.uniform(-cfg.perturbation_scale, cfg.perturbation_scale,
                         size=(cfg.batch_size, dim))
    return np.clip(np.asarray(best_values)[None, :] + jitter, 0.0, 1.0)


def _adam_scale(cfg: GeneratorConfig, t: int) -> float:
    return (cfg.effective_learning_rate
            * np.sqrt(1.0 - ADAM_BETA2 ** t) / (1.0 - ADAM_BETA1 ** t))


def backdrive_batch(model: LandscapeModel, X: np.ndarray, cfg: GeneratorConfig,
                    record_trajectory: bool = False):
    """Gradient-descend every row of X on E_LMS = (1 - predicted)^2 with the
    output clamped to 1.0, clipping to [0,1] after each step.  Rows stop
    individually once their largest per-gene change falls under tolerance.

    Returns (X', predictions_before, predictions_after[, trajectory]).
    """
    X0 = np.atleast_2d(np.asarray(X, dtype=np.float64))
    X = X0.copy()
    m = np.zeros_like(X)
    v = np.zeros_like(X)
    active = np.ones(X.shape[0], dtype=bool)
    pred_before = model.forward(X)
    trajectory = [pred_before.copy()] if record_trajectory else None
    for t in range(1, cfg.max_iterations + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        grads, _ = model.input_gradients(X[idx])
        m[idx] = ADAM_BETA1 * m[idx] + (1.0 - ADAM_BETA1) * grads
        v[idx] = ADAM_BETA2 * v[idx] + (1.0 - ADAM_BETA2) * grads * grads
        step = _adam_scale(cfg, t) * m[idx] / (np.sqrt(v[idx]) + ADAM_EPS)
        moved = np.clip(X[idx] - step, 0.0, 1.0)
        delta = np.abs(moved - X[idx]).max(axis=1)
        X[idx] = moved
        active[idx[delta < cfg.tolerance]] = False
        if record_trajectory:
            trajectory.append(model.forward(X))
    pred_after = model.forward(X)
    if record_trajectory:
        return X, pred_before, pred_after, trajectory
    return X, pred_before, pred_after


def backdrive(model: LandscapeModel, values: np.ndarray, cfg: GeneratorConfig):
    """Single-candidate inversion; returns (refined values, predicted-score
    trajectory including the start and every iterate)."""
    X, _, _, trajectory = backdrive_batch(model, np.asarray(values).reshape(1, -1), cfg,
                                          record_trajectory=True)
    return X[0], [float(p[0]) for p in trajectory]


def discrete_generate_batch(model: LandscapeModel, P: np.ndarray, cfg: GeneratorConfig,
                            rng: np.random.Generator) -> np.ndarray:
    """Probability-vector inversion for binary encodings, batched over rows.

    Each iteration samples `discrete_sample_count` binary strings per row
    from Bernoulli(p), accumulates the input gradients of all strings
    (averaged, so the step size is sample-count invariant), and applies one
    adaptive-moment update to p itself.  The true objective is never
    called.
    """
    P0 = np.atleast_2d(np.asarray(P, dtype=np.float64))
    P = P0.copy()
    n_strings = cfg.discrete_sample_count
    dim = P.shape[1]
    m = np.zeros_like(P)
    v = np.zeros_like(P)
    active = np.ones(P.shape[0], dtype=bool)
    for t in range(1, cfg.max_iterations + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        draws = rng.random((idx.size, n_strings, dim), dtype=np.float32)
        strings = (draws < P[idx][:, None, :].astype(np.float32)).astype(np.float32)
        # single-precision kernel: the sampling noise dominates any
        # precision loss, and this loop is the run-time hot spot
        grads, _ = model.input_gradients(strings.reshape(idx.size * n_strings, dim),
                                         single_precision=True)
        g = grads.reshape(idx.size, n_strings, dim).mean(axis=1).astype(np.float64)
        m[idx] = ADAM_BETA1 * m[idx] + (1.0 - ADAM_BETA1) * g
        v[idx] = ADAM_BETA2 * v[idx] + (1.0 - ADAM_BETA2) * g * g
        step = _adam_scale(cfg, t) * m[idx] / (np.sqrt(v[idx]) + ADAM_EPS)
        moved = np.clip(P[idx] - step, 0.0, 1.0)
        delta = np.abs(moved - P[idx]).max(axis=1)
        P[idx] = moved
        active[idx[delta < cfg.tolerance]] = False
    return P


def discrete_generate(model: LandscapeModel, p: np.ndarray, cfg: GeneratorConfig,
                      rng: np.random.Generator) -> np.ndarray:
    """Single probability-vector inversion (see discrete_generate_batch)."""
    return discrete_generate_batch(model, np.asarray(p).reshape(1, -1), cfg, rng)[0]


def binarize(p: np.ndarray, rng: np.random.Generator | None = None,
             threshold: float | None = None) -> np.ndarray:
    """Bits from probabilities: strict `over threshold` mode (used by the
    real-coded baselines) or Bernoulli sampling (used to produce the
    evaluation candidates of the discrete path)."""
    p = np.asarray(p, dtype=np.float64)
    if (rng is None) == (threshold is None):
        raise ValueError("pass exactly one of rng (stochastic) or threshold")
    if threshold is not None:
        return (p > threshold).astype(np.float64)
    return (rng.random(p.shape) < p).astype(np.float64)


def generate_batch(model: LandscapeModel, best_values: np.ndarray | None, dim: int,
                   cfg: GeneratorConfig, rng: np.random.Generator,
                   discrete: bool = False) -> GeneratedBatch:
    """Seed a batch, back-drive a uniformly chosen floor(F*|C|) subset, and
    return the batch with order preserved (untouched members verbatim)."""
    seeds = seed_batch(best_values, dim, cfg, rng)
    n_driven = int(np.floor(cfg.backdrive_fraction * seeds.shape[0]))
    batch = seeds.copy()
    if n_driven > 0:
        driven = np.sort(rng.choice(seeds.shape[0], size=n_driven, replace=False))
        if discrete:
            batch[driven] = discrete_generate_batch(model, seeds[driven], cfg, rng)
        else:
            batch[driven], _, _ = backdrive_batch(model, seeds[driven], cfg)
    else:
        driven = np.empty(0, dtype=np.int64)
    return GeneratedBatch(values=batch, driven=driven)
