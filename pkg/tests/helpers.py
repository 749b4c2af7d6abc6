"""Shared test utilities: independent oracles kept deliberately brute-force."""

from __future__ import annotations

import itertools
import math

from scenesketch.strokes import Point3


def point_segment_distance(p: Point3, a: Point3, b: Point3) -> float:
    ab = b - a
    denom = ab.dot(ab)
    if denom == 0.0:
        return p.distance_to(a)
    t = max(0.0, min(1.0, (p - a).dot(ab) / denom))
    return p.distance_to(a + ab * t)


def distance_to_polyline(p: Point3, polyline: list[Point3]) -> float:
    return min(point_segment_distance(p, a, b) for a, b in zip(polyline, polyline[1:]))


def max_removed_point_error(original: list[Point3], simplified: list[Point3]) -> float:
    """Exhaustive check: worst distance of any dropped point to the simplified
    polyline. Points are matched by identity of coordinates in order."""
    kept = set(id(p) for p in simplified)
    worst = 0.0
    for p in original:
        if id(p) in kept:
            continue
        worst = max(worst, distance_to_polyline(p, simplified))
    return worst


def brute_force_assignment(cost: list[list[float]]) -> tuple[list[tuple[int, int]], float]:
    """Minimum-cost injective assignment by permutation enumeration.

    Rows are assigned to columns; handles rectangular matrices. Totals use
    math.fsum so they are correctly rounded independent of addition order,
    which makes exact comparison against another solver meaningful."""
    n_rows = len(cost)
    n_cols = len(cost[0]) if n_rows else 0
    best_pairs: list[tuple[int, int]] = []
    best = math.inf
    if n_rows <= n_cols:
        for perm in itertools.permutations(range(n_cols), n_rows):
            total = math.fsum(cost[r][perm[r]] for r in range(n_rows))
            if total < best:
                best = total
                best_pairs = [(r, perm[r]) for r in range(n_rows)]
    else:
        for perm in itertools.permutations(range(n_rows), n_cols):
            total = math.fsum(cost[perm[c]][c] for c in range(n_cols))
            if total < best:
                best = total
                best_pairs = [(perm[c], c) for c in range(n_cols)]
    return best_pairs, best
