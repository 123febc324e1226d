"""Density-based ranking of non-dominated sets.

Two rankers order the members of a Pareto archive: crowding distance
(neighbor-gap based) and reference-direction niching (association counts
against a simplex lattice of directions).  Both are pure functions of the
stacked objective vectors and break ties deterministically so that runs
reproduce under a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class ReferenceDirectionSet:
    """Unit-simplex directions used for niching.

    ``directions`` has one row per direction; every row is nonnegative and
    sums to 1.  ``divisions`` is the lattice resolution: the row count equals
    binomial(F + divisions - 1, divisions).
    """

    directions: np.ndarray
    divisions: int


@dataclass
class DensityRank:
    """Result of a density ranking.

    ``order`` lists member indices best-first; ``scores`` holds the raw
    per-member diagnostic (crowding distance, or perpendicular distance to
    the associated direction for niching), aligned with the input order.
    """

    order: np.ndarray
    scores: np.ndarray


def crowding_rank(front) -> DensityRank:
    """Rank a mutually non-dominated set by crowding distance, best first.

    Boundary points of every objective get infinite distance; an interior
    point accumulates, per objective, the gap between its two neighbors
    normalized by that objective's range.  Larger distance ranks better.
    Ties break on larger objective sum, then lexicographically on the
    objective vector, so the order is a pure function of the set.
    """
    f = np.atleast_2d(np.asarray(front, dtype=float))
    n, m = f.shape
    if n == 0:
        raise ValueError("crowding_rank needs a non-empty front")
    dist = np.zeros(n)
    for j in range(m):
        idx = sorted(range(n), key=lambda i: (f[i, j], tuple(f[i])))
        dist[idx[0]] = math.inf
        dist[idx[-1]] = math.inf
        span = f[idx[-1], j] - f[idx[0], j]
        if span <= 0:
            continue
        for pos in range(1, n - 1):
            if not math.isinf(dist[idx[pos]]):
                dist[idx[pos]] += (f[idx[pos + 1], j] - f[idx[pos - 1], j]) / span
    order = sorted(range(n), key=lambda i: (-dist[i], -float(f[i].sum()), tuple(f[i])))
    return DensityRank(order=np.asarray(order, dtype=int), scores=dist)


def associate(normalized: np.ndarray, dirs: ReferenceDirectionSet):
    """Associate normalized points to their closest reference direction.

    Returns ``(niche_index, perpendicular_distance)`` per point.  Distance is
    measured from the point to the ray through the origin along each
    direction; ties in the argmin resolve to the lowest direction index.
    """
    p = np.atleast_2d(np.asarray(normalized, dtype=float))
    d = np.asarray(dirs.directions, dtype=float)
    unit = d / np.linalg.norm(d, axis=1, keepdims=True)
    proj = p @ unit.T
    sq = np.sum(p * p, axis=1, keepdims=True) - proj**2
    dist = np.sqrt(np.clip(sq, 0.0, None))
    niche = np.argmin(dist, axis=1)
    return niche, dist[np.arange(len(p)), niche]


def niching_rank(front, dirs: ReferenceDirectionSet) -> DensityRank:
    """Rank a mutually non-dominated set by niche occupancy, best first.

    Objectives are normalized to [0, 1] by the front's own componentwise
    min/max (a degenerate objective range collapses to coordinate 0).  Each
    point joins the direction of minimum perpendicular distance; points in
    less populated niches rank better, ties break on smaller perpendicular
    distance and then lexicographically on the objective vector.
    """
    f = np.atleast_2d(np.asarray(front, dtype=float))
    n = f.shape[0]
    if n == 0:
        raise ValueError("niching_rank needs a non-empty front")
    lo = f.min(axis=0)
    hi = f.max(axis=0)
    span = hi - lo
    normalized = np.where(span > 0, (f - lo) / np.where(span > 0, span, 1.0), 0.0)
    niche, dist = associate(normalized, dirs)
    counts = np.bincount(niche, minlength=len(dirs.directions))
    order = sorted(
        range(n), key=lambda i: (counts[niche[i]], dist[i], tuple(f[i]))
    )
    return DensityRank(order=np.asarray(order, dtype=int), scores=dist)


def das_dennis(n_obj: int, divisions: int) -> ReferenceDirectionSet:
    """Systematic simplex-lattice directions: coordinates k_i / p, sum k_i = p."""
    if n_obj < 2:
        raise ValueError("need at least 2 objectives")
    if divisions < 1:
        raise ValueError("divisions must be >= 1")
    rows: list[list[float]] = []

    def recurse(prefix: list[int], remaining: int, left: int):
        if remaining == 1:
            rows.append(prefix + [left])
            return
        for k in range(left + 1):
            recurse(prefix + [k], remaining - 1, left - k)

    recurse([], n_obj, divisions)
    directions = np.asarray(rows, dtype=float) / divisions
    return ReferenceDirectionSet(directions=directions, divisions=divisions)


def default_divisions(n_obj: int, min_count: int) -> int:
    """Smallest lattice resolution giving at least ``min_count`` directions."""
    p = 1
    while math.comb(n_obj + p - 1, p) < min_count:
        p += 1
    return p
