"""Binary checkerboard grid objective."""
from __future__ import annotations

import numpy as np

from . import Problem


class CheckerboardProblem(Problem):
    """Score each inner cell of an n x n binary grid by how many of its 4
    neighbors hold the opposite bit.  Genes over 0.5 read as 1 (genotypes
    that are already exact bits pass through unchanged)."""

    kind = "checkerboard"
    kind_id = 8

    def __init__(self, instance_seed: int = 0, side: int = 15):
        if side < 3:
            raise ValueError("checkerboard side must be at least 3")
        super().__init__(side * side, instance_seed)
        self.side = int(side)

    @property
    def max_score(self) -> int:
        return 4 * (self.side - 2) ** 2

    def decode(self, values) -> np.ndarray:
        values = self._check(values)
        return (values > 0.5).reshape(self.side, self.side)

    def score_bits(self, bits: np.ndarray) -> int:
        inner = bits[1:-1, 1:-1]
        opposite = ((bits[:-2, 1:-1] != inner).astype(np.int64)
                    + (bits[2:, 1:-1] != inner)
                    + (bits[1:-1, :-2] != inner)
                    + (bits[1:-1, 2:] != inner))
        return int(opposite.sum())

    def evaluate(self, values, rng=None) -> float:
        return float(self.score_bits(self.decode(values)))
