"""Multi-objective quality indicators and best-solution selection.

All metrics operate in minimization sense on raw objective values: the
maximization-sense internals of the reward engines are un-negated at the
reporting boundary before anything here is called.
"""

from __future__ import annotations

import bisect
import csv
import json
import math
from dataclasses import asdict, dataclass
from typing import Mapping

import numpy as np
from scipy.spatial import cKDTree

from .pareto import non_dominated_mask


def hypervolume(front, ref) -> float:
    """Exact dominated hypervolume against a reference point (minimization).

    The value is the Lebesgue measure of the union of boxes spanned between
    each front point and the reference.  Points that do not strictly
    dominate the reference contribute nothing and are filtered out.  Exact
    algorithms are provided for two objectives (dimension sweep) and three
    (sweep over slices); more are out of range.
    """
    f = np.asarray(front, dtype=float)
    r = np.asarray(ref, dtype=float)
    if f.size == 0:
        return 0.0
    f = np.atleast_2d(f)
    if f.shape[1] != r.size:
        raise ValueError("front and reference point dimensions differ")
    if f.shape[1] == 2:
        return _hv2d(f[np.all(f < r, axis=1)], r)
    if f.shape[1] == 3:
        return _hv3d(f[np.all(f < r, axis=1)], r)
    raise ValueError("hypervolume supports 2 or 3 objectives only")


def _hv2d(f: np.ndarray, ref: np.ndarray) -> float:
    if len(f) == 0:
        return 0.0
    order = np.lexsort((f[:, 1], f[:, 0]))
    total = 0.0
    ceiling = ref[1]
    for i in order:
        x, y = f[i]
        if y < ceiling:
            total += (ref[0] - x) * (ceiling - y)
            ceiling = y
    return float(total)


def _hv3d(f: np.ndarray, ref: np.ndarray) -> float:
    # Sweep slices of increasing f3; maintain the 2-D staircase of the points
    # seen so far together with its dominated area, updated incrementally.
    if len(f) == 0:
        return 0.0
    order = np.lexsort((f[:, 0], f[:, 1], f[:, 2]))
    zs = f[order, 2]
    xs: list[float] = []  # staircase x, strictly increasing
    ys: list[float] = []  # staircase y, strictly decreasing
    area = 0.0
    total = 0.0
    r0, r1, r2 = (float(v) for v in ref)
    for pos, i in enumerate(order):
        a, b = float(f[i, 0]), float(f[i, 1])
        area = _staircase_insert(xs, ys, a, b, r0, r1, area)
        depth_end = zs[pos + 1] if pos + 1 < len(order) else r2
        total += area * (depth_end - zs[pos])
    return float(total)


def _staircase_insert(xs, ys, a, b, r0, r1, area):
    i = bisect.bisect_left(xs, a)
    if i > 0 and ys[i - 1] <= b:
        return area  # dominated in the 2-D slice
    if i < len(xs) and xs[i] == a and ys[i] <= b:
        return area
    ceiling = ys[i - 1] if i > 0 else r1
    # remove the staircase points the new one dominates, fixing up the area
    j = i
    prev = ceiling
    while j < len(xs) and ys[j] >= b:
        area -= (r0 - xs[j]) * (prev - ys[j])
        prev = ys[j]
        j += 1
    if j < len(xs):
        area += (r0 - xs[j]) * (b - prev)  # survivor's ceiling drops to b
    area += (r0 - a) * (ceiling - b)
    del xs[i:j]
    del ys[i:j]
    xs.insert(i, a)
    ys.insert(i, b)
    return area


def gd(front, reference) -> float:
    """Mean distance from each front point to its nearest reference point."""
    f = np.atleast_2d(np.asarray(front, dtype=float))
    r = np.atleast_2d(np.asarray(reference, dtype=float))
    if f.size == 0 or r.size == 0:
        raise ValueError("gd needs non-empty sets")
    distances, _ = cKDTree(r).query(f)
    return float(np.mean(distances))


def igd(front, reference) -> float:
    """Mean distance from each reference point to its nearest front point."""
    return gd(reference, front)


def additive_epsilon(front, reference) -> float:
    """Smallest uniform shift making the front weakly dominate the reference.

    ``max_z min_a max_i (a_i - z_i)`` in minimization sense; negative values
    mean the front already dominates the reference with margin.
    """
    f = np.atleast_2d(np.asarray(front, dtype=float))
    z = np.atleast_2d(np.asarray(reference, dtype=float))
    if f.size == 0 or z.size == 0:
        raise ValueError("additive_epsilon needs non-empty sets")
    shifts = np.max(f[:, None, :] - z[None, :, :], axis=2)  # (front, ref)
    return float(np.max(np.min(shifts, axis=0)))


def _distinct_rows(points: np.ndarray) -> np.ndarray:
    return np.unique(np.atleast_2d(points), axis=0)


def cardinality_metrics(fronts_by_algorithm: Mapping[str, np.ndarray]):
    """Survival of each algorithm's points in the combined reference front.

    The combined front Z is the non-dominated subset of the union of every
    algorithm's (distinct) points.  For each algorithm, ``i_c`` counts its
    distinct non-dominated points that appear in Z (1e-9 tolerance) and
    ``c_metric`` is that count divided by the size of its own non-dominated
    set.  Returns ``{name: (i_c, c_metric)}``.
    """
    if not fronts_by_algorithm:
        raise ValueError("need at least one algorithm")
    own = {}
    pool = []
    for name, front in fronts_by_algorithm.items():
        f = _distinct_rows(np.asarray(front, dtype=float))
        f = f[non_dominated_mask(f, sense="min")]
        own[name] = f
        pool.append(f)
    union = np.vstack(pool)
    combined = _distinct_rows(union[non_dominated_mask(union, sense="min")])
    tree = cKDTree(combined)
    out = {}
    for name, f in own.items():
        if len(f) == 0:
            out[name] = (0, 0.0)
            continue
        dist, _ = tree.query(f, p=np.inf)
        i_c = int(np.sum(dist <= 1e-9))
        out[name] = (i_c, i_c / len(f))
    return out


def entropy_select(front, k: int) -> np.ndarray:
    """Indices of the ``k`` preferred solutions under entropy weighting.

    Column-normalizes the (distinct-row) payoff matrix, weights objectives by
    their entropy-based diversification degree ``1 - E_j``, scores each
    solution by its weighted normalized objectives, and returns the indices
    of the ``k`` lowest scores (minimization sense).  Duplicated rows do not
    affect the outcome; a constant column carries zero weight; when every
    weight degenerates the fall-back is uniform weighting with
    lexicographic tie-breaks.
    """
    f = np.atleast_2d(np.asarray(front, dtype=float))
    if k < 1:
        raise ValueError("k must be >= 1")
    distinct, first_index = np.unique(f, axis=0, return_index=True)
    m, n_obj = distinct.shape
    if m < k:
        raise ValueError(f"need at least {k} distinct solutions, have {m}")
    shifted = distinct - np.minimum(distinct.min(axis=0), 0.0)
    sums = shifted.sum(axis=0)
    p = np.divide(shifted, sums, out=np.zeros_like(shifted), where=sums > 0)
    if m == 1:
        return np.asarray([int(first_index[0])])
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(p > 0, p * np.log(p), 0.0)
    entropy = -plogp.sum(axis=0) / math.log(m)
    entropy = np.where(sums > 0, entropy, 1.0)
    diversification = 1.0 - entropy
    total = diversification.sum()
    if total > 1e-12:
        weights = diversification / total
    else:
        weights = np.full(n_obj, 1.0 / n_obj)
    scores = p @ weights
    order = sorted(range(m), key=lambda i: (scores[i], tuple(distinct[i])))
    return np.asarray([int(first_index[i]) for i in order[:k]])


@dataclass
class MetricReport:
    """One run's metric row, as serialized to the shared CSV schema."""

    run_id: str
    algorithm: str
    problem: str
    hv: float
    gd: float
    igd: float
    eps: float
    i_c: int
    c_metric: float

    def validate(self):
        if self.hv < 0:
            raise ValueError("hypervolume must be nonnegative")
        if not (0.0 <= self.c_metric <= 1.0):
            raise ValueError("c_metric must lie in [0, 1]")
        if self.i_c < 0:
            raise ValueError("i_c must be a nonnegative integer")
        return self


METRIC_FIELDS = ["run_id", "algorithm", "problem", "hv", "gd", "igd", "eps", "i_c", "c_metric"]


def write_metric_csv(reports, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(METRIC_FIELDS)
        for report in reports:
            writer.writerow([
                report.run_id, report.algorithm, report.problem,
                repr(float(report.hv)), repr(float(report.gd)),
                repr(float(report.igd)), repr(float(report.eps)),
                int(report.i_c), repr(float(report.c_metric)),
            ])


def read_metric_csv(path) -> list[MetricReport]:
    with open(path, newline="") as handle:
        rows = list(csv.DictReader(handle))
    return [
        MetricReport(
            run_id=row["run_id"], algorithm=row["algorithm"], problem=row["problem"],
            hv=float(row["hv"]), gd=float(row["gd"]), igd=float(row["igd"]),
            eps=float(row["eps"]), i_c=int(row["i_c"]), c_metric=float(row["c_metric"]),
        )
        for row in rows
    ]


def write_metric_json(reports, path):
    with open(path, "w") as handle:
        json.dump([asdict(r) for r in reports], handle, indent=2)
        handle.write("\n")
