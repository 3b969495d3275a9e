"""Benchmark objective suite.

Every problem decodes a genotype in [0,1]^dim into its native
representation and returns a raw score in maximization sense
(minimization objectives are negated or reciprocated at this boundary).
Decodes are total: no genotype is invalid.
"""
from __future__ import annotations

import numpy as np

from ..core import STREAM_INSTANCE


class Problem:
    """Base objective: dimension, decode rule, raw evaluation, instance data."""

    kind: str = "abstract"
    kind_id: int = -1

    def __init__(self, dimension: int, instance_seed: int = 0):
        self.dimension = int(dimension)
        self.instance_seed = int(instance_seed)

    def evaluate(self, values: np.ndarray, rng: np.random.Generator | None = None) -> float:
        raise NotImplementedError

    def true_score(self, values: np.ndarray) -> float:
        """Noise-free score; identical to evaluate() for deterministic problems."""
        return self.evaluate(values, None)

    def _check(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        if values.shape[0] != self.dimension:
            raise ValueError(
                f"{self.kind}: expected {self.dimension} parameters, got {values.shape[0]}")
        return values

    def instance_rng(self) -> np.random.Generator:
        """Deterministic generator for this (kind, instance_seed)."""
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.instance_seed,
                                   spawn_key=(STREAM_INSTANCE, self.kind_id)))


from .sines import SinesProblem, NoisySinesProblem  # noqa: E402
from .seating import SeatingProblem  # noqa: E402
from .graphs import (  # noqa: E402
    BandwidthProblem,
    RealConstraintsProblem,
    DiscreteConstraintsProblem,
    CrossingsProblem,
)
from .triangles import TrianglesProblem, synthetic_image  # noqa: E402
from .checkerboard import CheckerboardProblem  # noqa: E402
from .io import read_pgm, write_pgm, read_edge_list, write_edge_list  # noqa: E402

PROBLEM_KINDS = {
    "sines": SinesProblem,
    "noisy-sines": NoisySinesProblem,
    "seating": SeatingProblem,
    "bandwidth": BandwidthProblem,
    "constraints-real": RealConstraintsProblem,
    "constraints-discrete": DiscreteConstraintsProblem,
    "crossings": CrossingsProblem,
    "triangles": TrianglesProblem,
    "checkerboard": CheckerboardProblem,
}


def make_instance(kind: str, instance_seed: int = 0, **overrides) -> Problem:
    """Build a deterministic problem instance from its kind and seed."""
    try:
        cls = PROBLEM_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown problem kind {kind!r}; "
                         f"known: {', '.join(sorted(PROBLEM_KINDS))}") from None
    return cls(instance_seed=instance_seed, **overrides)


__all__ = [
    "Problem", "make_instance", "PROBLEM_KINDS",
    "SinesProblem", "NoisySinesProblem", "SeatingProblem", "BandwidthProblem",
    "RealConstraintsProblem", "DiscreteConstraintsProblem", "CrossingsProblem",
    "TrianglesProblem", "CheckerboardProblem", "synthetic_image",
    "read_pgm", "write_pgm", "read_edge_list", "write_edge_list",
]
