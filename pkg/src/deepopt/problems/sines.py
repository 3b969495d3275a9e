"""Sum-of-x-sin-x objectives: the smooth benchmark and its noisy variant."""
from __future__ import annotations

import numpy as np

from . import Problem

PARAM_SPAN = 100.0  # genes in [0,1] decode to parameters in [0, 100]


class SinesProblem(Problem):
    """Maximize sum(p_i * sin(p_i)); every parameter is independent."""

    kind = "sines"
    kind_id = 0

    def __init__(self, instance_seed: int = 0, dimension: int = 50):
        super().__init__(dimension, instance_seed)

    def evaluate(self, values, rng=None) -> float:
        values = self._check(values)
        p = PARAM_SPAN * values
        return float(np.sum(p * np.sin(p)))


class NoisySinesProblem(Problem):
    """Normalized sines score plus fresh additive Uniform[0, 0.5] noise per call.

    true_score() exposes the noiseless term for judging; search code must
    never call it.
    """

    kind = "noisy-sines"
    kind_id = 1

    NOISE_HIGH = 0.5

    def __init__(self, instance_seed: int = 0, dimension: int = 50):
        super().__init__(dimension, instance_seed)

    def _noiseless(self, values: np.ndarray) -> float:
        p = PARAM_SPAN * values
        return float(np.sum(p * np.sin(p)) / (self.dimension * PARAM_SPAN))

    def evaluate(self, values, rng=None) -> float:
        values = self._check(values)
        if rng is None:
            raise ValueError("noisy-sines evaluation requires an RNG handle")
        return self._noiseless(values) + float(rng.uniform(0.0, self.NOISE_HIGH))

    def true_score(self, values) -> float:
        return self._noiseless(self._check(values))
