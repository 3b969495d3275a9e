"""Reception-party seating: pack preference-weighted groups onto tables."""
from __future__ import annotations

import numpy as np

from . import Problem


class SeatingProblem(Problem):
    """Groups bid for tables with one real parameter per (group, table) pair.

    Bids are processed from highest to lowest; a bid seats its group iff the
    group is still unseated and the table has enough remaining capacity.
    Score is the sum of directed preferences over co-seated group pairs,
    minus a per-person penalty for anyone left unseated.
    """

    kind = "seating"
    kind_id = 2

    def __init__(self, instance_seed: int = 0, groups: int = 50, tables: int = 10,
                 capacity: int = 12, preference_span: float = 100.0,
                 unseated_penalty: float = 1000.0):
        super().__init__(groups * tables, instance_seed)
        self.groups = int(groups)
        self.tables = int(tables)
        self.capacity = int(capacity)
        self.unseated_penalty = float(unseated_penalty)
        rng = self.instance_rng()
        self.group_sizes = rng.integers(1, 4, size=self.groups)
        prefs = rng.uniform(-preference_span, preference_span, size=(self.groups, self.groups))
        np.fill_diagonal(prefs, 0.0)
        self.preferences = prefs

    def decode(self, values) -> np.ndarray:
        """Table index per group; -1 marks an unseated group."""
        values = self._check(values)
        # Highest bid first; equal bids ordered by (group, table) ascending,
        # which is exactly the flat index order under a stable sort.
        order = np.lexsort((np.arange(values.size), -values))
        assignment = np.full(self.groups, -1, dtype=np.int64)
        remaining = np.full(self.tables, self.capacity, dtype=np.int64)
        for flat in order:
            g, t = divmod(int(flat), self.tables)
            if assignment[g] < 0 and remaining[t] >= self.group_sizes[g]:
                assignment[g] = t
                remaining[t] -= self.group_sizes[g]
        assert (remaining >= 0).all(), "table over capacity"
        return assignment

    def score_assignment(self, assignment: np.ndarray) -> float:
        total = 0.0
        for t in range(self.tables):
            members = np.flatnonzero(assignment == t)
            if members.size > 1:
                total += float(self.preferences[np.ix_(members, members)].sum())
        unseated = assignment < 0
        total -= self.unseated_penalty * float(self.group_sizes[unseated].sum())
        return total

    def evaluate(self, values, rng=None) -> float:
        return self.score_assignment(self.decode(values))
