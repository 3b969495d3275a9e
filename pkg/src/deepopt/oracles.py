"""Independent reference computations for small instances.

Everything here re-derives its objective from the problem statement
(enumeration, grids, scanlines, literal re-counts) without touching the
library evaluators, so the two can be cross-checked.
"""
from __future__ import annotations

import itertools

import numpy as np


# -- sines --------------------------------------------------------------------

def sines_peak(lo: float = 0.0, hi: float = 100.0, grid: int = 200_001,
               refine_steps: int = 80) -> tuple[float, float]:
    """(argmax, max) of p*sin(p) on [lo, hi]: dense grid plus golden-section
    refinement around the best grid point."""
    ps = np.linspace(lo, hi, grid)
    vals = ps * np.sin(ps)
    k = int(np.argmax(vals))
    a = ps[max(k - 1, 0)]
    b = ps[min(k + 1, grid - 1)]
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - phi * (b - a)
    x2 = a + phi * (b - a)
    f = lambda p: p * np.sin(p)
    f1, f2 = f(x1), f(x2)
    for _ in range(refine_steps):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - phi * (b - a)
            f1 = f(x1)
    p_star = (a + b) / 2.0
    return float(p_star), float(f(p_star))


def sines_optimum(dim: int = 50) -> float:
    """Global optimum of the summed objective: parameters are independent."""
    return dim * sines_peak()[1]


# -- graph bandwidth ------------------------------------------------------------

def bandwidth_of_labeling(labels, edges) -> int:
    worst = 0
    for u, v in edges:
        diff = abs(int(labels[u]) - int(labels[v]))
        if diff > worst:
            worst = diff
    return worst


def bandwidth_optimum(n_vertices: int, edges) -> int:
    """Exact minimum bandwidth by enumerating all vertex labelings."""
    best = n_vertices
    for perm in itertools.permutations(range(1, n_vertices + 1)):
        bw = bandwidth_of_labeling(perm, edges)
        if bw < best:
            best = bw
    return best


# -- seating ----------------------------------------------------------------

def seating_score(assignment, group_sizes, preferences, n_tables: int,
                  penalty: float) -> float:
    """Literal re-statement of the objective: directed preferences summed
    over co-seated pairs, minus the per-person penalty for unseated groups."""
    total = 0.0
    n = len(group_sizes)
    for a in range(n):
        for b in range(n):
            if a != b and assignment[a] >= 0 and assignment[a] == assignment[b]:
                total += preferences[a][b]
    for g in range(n):
        if assignment[g] < 0:
            total -= penalty * group_sizes[g]
    return float(total)


def seating_optimum(group_sizes, preferences, n_tables: int, capacity: int,
                    penalty: float) -> tuple[float, tuple[int, ...]]:
    """Exhaustive search over every capacity-respecting assignment
    (including leaving groups unseated)."""
    n = len(group_sizes)
    best_score = -np.inf
    best_assignment = None
    for assignment in itertools.product(range(-1, n_tables), repeat=n):
        load = [0] * n_tables
        feasible = True
        for g, t in enumerate(assignment):
            if t >= 0:
                load[t] += group_sizes[g]
                if load[t] > capacity:
                    feasible = False
                    break
        if not feasible:
            continue
        score = seating_score(assignment, group_sizes, preferences, n_tables, penalty)
        if score > best_score:
            best_score = score
            best_assignment = assignment
    return float(best_score), best_assignment


# -- ordering constraints -----------------------------------------------------

def constraints_error(node_values, edges) -> float:
    """Per-edge error summed with an explicit loop."""
    total = 0.0
    for u, v in edges:
        if node_values[u] <= node_values[v]:
            total += abs(node_values[u] - node_values[v])
    return float(total)


def discrete_constraints_optimum(n_nodes: int, edges, letters: int = 16
                                 ) -> tuple[float, tuple[int, ...]]:
    """Exact minimum total error over every letter assignment."""
    values = [i / (letters - 1) for i in range(letters)]
    best = np.inf
    best_assign = None
    for assign in itertools.product(range(letters), repeat=n_nodes):
        err = constraints_error([values[a] for a in assign], edges)
        if err < best:
            best = err
            best_assign = assign
    return float(best), best_assign


def real_constraints_grid_optimum(n_nodes: int, edges, levels=None,
                                  refine_rounds: int = 60) -> tuple[float, list[float]]:
    """Coarse grid search refined by per-coordinate descent over a fine grid."""
    if levels is None:
        levels = [0.0, 0.25, 0.5, 0.75, 1.0]
    best = np.inf
    best_x = None
    for x in itertools.product(levels, repeat=n_nodes):
        err = constraints_error(x, edges)
        if err < best:
            best = err
            best_x = list(x)
    fine = np.linspace(0.0, 1.0, 101)
    x = list(best_x)
    for _ in range(refine_rounds):
        improved = False
        for node in range(n_nodes):
            current = constraints_error(x, edges)
            for candidate in fine:
                trial = list(x)
                trial[node] = float(candidate)
                err = constraints_error(trial, edges)
                if err < current - 1e-12:
                    x = trial
                    current = err
                    improved = True
        if not improved:
            break
    return constraints_error(x, edges), x


# -- checkerboard -------------------------------------------------------------

def checkerboard_recount(bits) -> int:
    """Literal re-count: for each inner cell, how many of its 4 primary
    neighbors hold the opposite bit."""
    bits = np.asarray(bits).astype(int)
    side = bits.shape[0]
    total = 0
    for r in range(1, side - 1):
        for c in range(1, side - 1):
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                if bits[r + dr][c + dc] != bits[r][c]:
                    total += 1
    return total


def checkerboard_exhaustive_optimum(side: int) -> int:
    """Exact maximum by enumerating all 2^(side^2) grids (tiny sides only)."""
    cells = side * side
    if cells > 20:
        raise ValueError("exhaustive checkerboard search is limited to tiny grids")
    best = 0
    for code in range(1 << cells):
        bits = np.array([(code >> k) & 1 for k in range(cells)]).reshape(side, side)
        best = max(best, checkerboard_recount(bits))
    return best


# -- crossings ----------------------------------------------------------------

def crossings_float_count(points, edges, eps: float = 1e-12) -> int:
    """Independent float-arithmetic pairwise segment-intersection count
    (shared graph endpoints excluded; touch and overlap count once)."""
    points = np.asarray(points, dtype=np.float64)
    count = 0
    for (a, b), (c, d) in itertools.combinations([tuple(e) for e in edges], 2):
        if len({a, b, c, d}) < 4:
            continue
        if _segments_touch(points[a], points[b], points[c], points[d], eps):
            count += 1
    return count


def _cross(o, p, q):
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def _within(p, q, r, eps):
    return (min(p[0], q[0]) - eps <= r[0] <= max(p[0], q[0]) + eps
            and min(p[1], q[1]) - eps <= r[1] <= max(p[1], q[1]) + eps)


def _segments_touch(p1, p2, p3, p4, eps) -> bool:
    d1 = _cross(p3, p4, p1)
    d2 = _cross(p3, p4, p2)
    d3 = _cross(p1, p2, p3)
    d4 = _cross(p1, p2, p4)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and \
       ((d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)):
        return True
    if abs(d1) <= eps and _within(p3, p4, p1, eps):
        return True
    if abs(d2) <= eps and _within(p3, p4, p2, eps):
        return True
    if abs(d3) <= eps and _within(p1, p2, p3, eps):
        return True
    if abs(d4) <= eps and _within(p1, p2, p4, eps):
        return True
    return False


# -- triangles ----------------------------------------------------------------

def triangle_scanline_canvas(size: int, triangles) -> np.ndarray:
    """Independent scanline rasterizer: per pixel row, intersect the
    horizontal line through the pixel centers with each (closed, convex)
    triangle and cover the centers inside the crossing interval."""
    acc = np.zeros((size, size))
    centers = np.arange(size) + 0.5
    for x1, y1, x2, y2, x3, y3, intensity in triangles:
        area = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
        if area == 0.0:
            continue
        verts = [(x1, y1), (x2, y2), (x3, y3)]
        for row in range(size):
            y = row + 0.5
            xs = []
            for (ax, ay), (bx, by) in ((verts[0], verts[1]), (verts[1], verts[2]),
                                       (verts[2], verts[0])):
                if ay == by:
                    if ay == y:
                        xs.extend([ax, bx])
                    continue
                if min(ay, by) <= y <= max(ay, by):
                    xs.append(ax + (y - ay) * (bx - ax) / (by - ay))
            if not xs:
                continue
            lo, hi = min(xs), max(xs)
            covered = (centers >= lo) & (centers <= hi)
            acc[row, covered] += intensity
    return np.clip(acc, 0.0, 1.0) * 255.0
