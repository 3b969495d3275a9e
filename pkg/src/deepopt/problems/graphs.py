"""Graph-based objectives: bandwidth labeling, ordering-constraint
satisfaction (real and 16-letter discrete), and rectilinear crossing
minimization."""
from __future__ import annotations

import numpy as np

from . import Problem

# Crossing tests run on integer coordinates after rounding to this many
# decimals: orientation predicates stay exact in int64 (12 digits would
# overflow the cross products).
COORD_DIGITS = 6
_COORD_SCALE = 10 ** COORD_DIGITS


def _random_simple_edges(rng: np.random.Generator, vertices: int, edges: int) -> np.ndarray:
    """Undirected simple edges (no loops, no duplicates), shape (edges, 2)."""
    iu, ju = np.triu_indices(vertices, k=1)
    if edges > iu.size:
        raise ValueError(f"cannot place {edges} simple edges on {vertices} vertices")
    pick = rng.choice(iu.size, size=edges, replace=False)
    return np.stack([iu[pick], ju[pick]], axis=1).astype(np.int64)


def _random_directed_edges(rng: np.random.Generator, nodes: int, edges: int) -> np.ndarray:
    """Directed edges, no self-loops; duplicates allowed (they weight a constraint)."""
    u = rng.integers(0, nodes, size=edges)
    v = rng.integers(0, nodes, size=edges)
    loops = u == v
    while loops.any():
        v[loops] = rng.integers(0, nodes, size=int(loops.sum()))
        loops = u == v
    return np.stack([u, v], axis=1).astype(np.int64)


class BandwidthProblem(Problem):
    """Label vertices 1..V by the sort order of their genes; minimize the
    maximum label difference across edges (reported negated)."""

    kind = "bandwidth"
    kind_id = 3

    def __init__(self, instance_seed: int = 0, vertices: int = 50, edges: int = 150,
                 edge_list=None):
        super().__init__(vertices, instance_seed)
        self.vertices = int(vertices)
        if edge_list is not None:
            self.edges = np.asarray(edge_list, dtype=np.int64).reshape(-1, 2)
        else:
            self.edges = _random_simple_edges(self.instance_rng(), self.vertices, edges)

    def decode(self, values) -> np.ndarray:
        """Permutation labeling: vertex in sort position k gets label k+1.
        Equal genes are ordered by vertex index ascending."""
        values = self._check(values)
        order = np.argsort(values, kind="stable")
        labels = np.empty(self.vertices, dtype=np.int64)
        labels[order] = np.arange(1, self.vertices + 1)
        return labels

    def bandwidth(self, labels: np.ndarray) -> int:
        return int(np.abs(labels[self.edges[:, 0]] - labels[self.edges[:, 1]]).max())

    def evaluate(self, values, rng=None) -> float:
        return -float(self.bandwidth(self.decode(values)))


class RealConstraintsProblem(Problem):
    """Directed ordering constraints on node values in [0,1].

    Each edge (u, v) demands value(u) > value(v); a violated edge costs the
    absolute difference of the two values.  Total error is negated so the
    toolkit always maximizes.
    """

    kind = "constraints-real"
    kind_id = 4

    def __init__(self, instance_seed: int = 0, nodes: int = 100, edges: int = 2000,
                 edge_list=None):
        super().__init__(nodes, instance_seed)
        self.nodes = int(nodes)
        if edge_list is not None:
            self.edges = np.asarray(edge_list, dtype=np.int64).reshape(-1, 2)
        else:
            self.edges = _random_directed_edges(self.instance_rng(), self.nodes, edges)

    def total_error(self, node_values: np.ndarray) -> float:
        u = node_values[self.edges[:, 0]]
        v = node_values[self.edges[:, 1]]
        return float(np.maximum(v - u, 0.0).sum())

    def evaluate(self, values, rng=None) -> float:
        return -self.total_error(self._check(values))

    def parity_score(self, values) -> float:
        """Per-edge satisfaction margin summed over edges: |E| - total error.
        Reported alongside the raw score for table-style summaries."""
        return float(len(self.edges)) + self.evaluate(values)


class DiscreteConstraintsProblem(RealConstraintsProblem):
    """Same constraint graph, but each node selects one of 16 letters via an
    argmax over its 16-gene block; letters map to evenly spaced values."""

    kind = "constraints-discrete"
    kind_id = 5

    def __init__(self, instance_seed: int = 0, nodes: int = 100, edges: int = 2000,
                 letters: int = 16, edge_list=None):
        super().__init__(instance_seed, nodes, edges, edge_list)
        self.letters = int(letters)
        self.dimension = self.nodes * self.letters
        self._letter_values = np.linspace(0.0, 1.0, self.letters)

    def decode(self, values) -> np.ndarray:
        """Letter index per node (argmax of its block; ties pick the lowest)."""
        values = self._check(values)
        return np.argmax(values.reshape(self.nodes, self.letters), axis=1)

    def node_values(self, values) -> np.ndarray:
        return self._letter_values[self.decode(values)]

    def evaluate(self, values, rng=None) -> float:
        return -self.total_error(self.node_values(values))

    def parity_score(self, values) -> float:
        return float(len(self.edges)) + self.evaluate(values)


def _orient(p, q, r):
    """Sign area of the (p, q, r) triangle on integer coordinates; exact."""
    return ((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
            - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))


def _on_segment(p, q, r):
    """Assuming r is collinear with p-q: does r lie within the p-q box?"""
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    return ((r >= lo) & (r <= hi)).all(axis=-1)


def count_segment_crossings(points: np.ndarray, edges: np.ndarray) -> int:
    """Number of unordered edge pairs whose closed segments intersect.

    Pairs sharing a graph vertex never count; touching at an interior
    point counts; collinear overlap counts once per pair.  Coordinates
    are rounded to COORD_DIGITS decimals and tested exactly in int64.
    """
    pts = np.round(np.asarray(points, dtype=np.float64) * _COORD_SCALE).astype(np.int64)
    edges = np.asarray(edges, dtype=np.int64)
    n_edges = len(edges)
    if n_edges < 2:
        return 0
    i_idx, j_idx = np.triu_indices(n_edges, k=1)
    a, b = edges[i_idx, 0], edges[i_idx, 1]
    c, d = edges[j_idx, 0], edges[j_idx, 1]
    disjoint = (a != c) & (a != d) & (b != c) & (b != d)
    if not disjoint.any():
        return 0
    A, B = pts[a[disjoint]], pts[b[disjoint]]
    C, D = pts[c[disjoint]], pts[d[disjoint]]
    d1 = _orient(C, D, A)
    d2 = _orient(C, D, B)
    d3 = _orient(A, B, C)
    d4 = _orient(A, B, D)
    proper = (np.sign(d1) * np.sign(d2) < 0) & (np.sign(d3) * np.sign(d4) < 0)
    touching = (((d1 == 0) & _on_segment(C, D, A))
                | ((d2 == 0) & _on_segment(C, D, B))
                | ((d3 == 0) & _on_segment(A, B, C))
                | ((d4 == 0) & _on_segment(A, B, D)))
    return int((proper | touching).sum())


class CrossingsProblem(Problem):
    """Place graph vertices in the unit square to minimize straight-line
    edge crossings (reported negated)."""

    kind = "crossings"
    kind_id = 6

    def __init__(self, instance_seed: int = 0, nodes: int = 25, edges: int = 50,
                 edge_list=None):
        super().__init__(2 * nodes, instance_seed)
        self.nodes = int(nodes)
        if edge_list is not None:
            self.edges = np.asarray(edge_list, dtype=np.int64).reshape(-1, 2)
        else:
            self.edges = _random_simple_edges(self.instance_rng(), self.nodes, edges)

    def decode(self, values) -> np.ndarray:
        """(nodes, 2) point coordinates in the unit square."""
        return self._check(values).reshape(self.nodes, 2)

    def evaluate(self, values, rng=None) -> float:
        return -float(count_segment_crossings(self.decode(values), self.edges))
