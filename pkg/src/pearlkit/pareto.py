"""Dominance relations, non-dominated sorting, and bounded Pareto archives.

Objective vectors are handled in maximization sense throughout this module:
benchmark problems that minimize are negated at ingestion and un-negated
again at the reporting boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

# Per-constraint feasibility threshold; raw constraint values g <= tol count
# as satisfied so boundary noise does not flip feasibility.
FEASIBILITY_TOL = 1e-12


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """True if objective vector ``a`` dominates ``b`` (maximization sense).

    ``a`` dominates ``b`` when it is at least as good in every component and
    strictly better in at least one.  Equal vectors never dominate.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    return bool(np.all(a >= b) and np.any(a > b))


@dataclass
class Solution:
    """A candidate solution: decision vector, objectives, and constraint state.

    Attributes
    ----------
    x : ndarray
        Decision vector inside the problem's box.
    obj : ndarray
        Objective vector in maximization sense (length >= 2, all finite).
    g : ndarray
        Raw constraint values, violation-positive (g_i > 0 means violated).
    cv : float
        Scalar constraint violation; 0 exactly when all g_i <= FEASIBILITY_TOL.
    """

    x: np.ndarray
    obj: np.ndarray
    g: np.ndarray = field(default_factory=lambda: np.empty(0))
    cv: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.obj = np.asarray(self.obj, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if self.obj.ndim != 1 or self.obj.size < 2:
            raise ValueError("objective vector must be 1-D with at least 2 entries")
        if not np.all(np.isfinite(self.obj)):
            raise ValueError("objective vector contains non-finite entries")
        if self.cv < 0:
            raise ValueError("constraint violation must be nonnegative")
        satisfied = self.g.size == 0 or bool(np.all(self.g <= FEASIBILITY_TOL))
        if (self.cv == 0) != satisfied:
            raise ValueError(
                "cv == 0 must hold exactly when every raw constraint is satisfied"
            )

    @property
    def feasible(self) -> bool:
        return self.cv == 0.0


def constrained_dominates(a: Solution, b: Solution) -> bool:
    """Dominance with feasibility taking precedence.

    A feasible solution dominates any infeasible one; between two infeasible
    solutions the smaller violation wins; between two feasible solutions the
    plain objective dominance applies.
    """
    if a.feasible and not b.feasible:
        return True
    if not a.feasible and b.feasible:
        return False
    if not a.feasible:
        return a.cv < b.cv
    return dominates(a.obj, b.obj)


Relation = Union[str, Callable[[Solution, Solution], bool]]


def _domination_matrix(pop: Sequence[Solution], relation: Relation) -> np.ndarray:
    """D[i, j] is True when pop[i] dominates pop[j] under ``relation``."""
    n = len(pop)
    if relation in ("objectives", "plain", dominates):
        objs = np.array([s.obj for s in pop], dtype=float)
        ge = np.all(objs[:, None, :] >= objs[None, :, :], axis=2)
        gt = np.any(objs[:, None, :] > objs[None, :, :], axis=2)
        return ge & gt
    if relation in ("constrained", constrained_dominates):
        objs = np.array([s.obj for s in pop], dtype=float)
        cv = np.array([s.cv for s in pop], dtype=float)
        feas = cv == 0.0
        ge = np.all(objs[:, None, :] >= objs[None, :, :], axis=2)
        gt = np.any(objs[:, None, :] > objs[None, :, :], axis=2)
        plain = ge & gt
        d = np.zeros((n, n), dtype=bool)
        fi = feas[:, None]
        fj = feas[None, :]
        d |= fi & ~fj
        d |= (~fi & ~fj) & (cv[:, None] < cv[None, :])
        d |= (fi & fj) & plain
        return d
    # generic callable relation
    d = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = relation(pop[i], pop[j])
    return d


def non_dominated_sort(
    pop: Sequence[Solution], relation: Relation = "objectives"
) -> list[list[int]]:
    """Sort a population into non-domination fronts (indices, best front first).

    Front 0 contains the solutions dominated by nobody; each later front is
    non-dominated once earlier fronts are removed.  Every index appears in
    exactly one front.
    """
    if len(pop) == 0:
        raise ValueError("cannot sort an empty population")
    d = _domination_matrix(pop, relation)
    dominated_count = d.sum(axis=0).astype(int)
    fronts: list[list[int]] = []
    remaining = np.ones(len(pop), dtype=bool)
    while remaining.any():
        current = np.flatnonzero(remaining & (dominated_count == 0))
        if current.size == 0:  # cyclic relation; only possible for bad callables
            raise ValueError("dominance relation produced a cycle")
        fronts.append(current.tolist())
        remaining[current] = False
        dominated_count -= d[current].sum(axis=0).astype(int)
    return fronts


def non_dominated_mask(points: np.ndarray, sense: str = "min") -> np.ndarray:
    """Boolean mask of the non-dominated rows of ``points``.

    Vectorized filter meant for large sets (merged run histories).  Duplicate
    rows are all kept: equal vectors do not dominate each other.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if sense == "max":
        pts = -pts
    elif sense != "min":
        raise ValueError("sense must be 'min' or 'max'")
    n = pts.shape[0]
    mask = np.zeros(n, dtype=bool)
    if n == 0:
        return mask
    order = np.lexsort(pts.T[::-1])
    kept = np.empty((n, pts.shape[1]))
    n_kept = 0
    for i in order:
        p = pts[i]
        if n_kept:
            view = kept[:n_kept]
            dom = np.all(view <= p, axis=1) & np.any(view < p, axis=1)
            if bool(dom.any()):
                continue
        mask[i] = True
        kept[n_kept] = p
        n_kept += 1
    return mask


def best_front(solutions: Sequence[Solution]) -> list[Solution]:
    """Feasibility-first non-dominated subset of a large solution set.

    Equivalent to front 0 of the constrained sort but vectorized: when any
    feasible solution exists the front is the plain non-dominated set of the
    feasible ones, otherwise it is the least-violating group.  Duplicate
    objective vectors are collapsed to their first occurrence.
    """
    if not solutions:
        return []
    cv = np.array([s.cv for s in solutions])
    if np.any(cv == 0.0):
        pool = [s for s in solutions if s.cv == 0.0]
    else:
        pool = [s for s in solutions if s.cv == cv.min()]
    objs = np.array([s.obj for s in pool])
    mask = non_dominated_mask(-objs, sense="min")
    seen: set = set()
    front = []
    for s, keep in zip(pool, mask):
        key = tuple(s.obj)
        if keep and key not in seen:
            seen.add(key)
            front.append(s)
    return front


class ParetoArchive:
    """Bounded buffer of mutually non-dominated solutions.

    The archive is the per-worker memory used by the rank-based reward
    engines.  ``capacity=None`` gives an unbounded archive (used by the
    envelope variant, where the archive only serves reporting).  The
    dominance relation is configurable so that constrained variants can keep
    feasibility inside the buffer ordering.
    """

    def __init__(self, capacity: Optional[int] = None, relation: Relation = "objectives"):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be a positive integer or None")
        self.capacity = capacity
        self.relation = relation
        self.members: list[Solution] = []
        if relation in ("objectives", "plain"):
            self._rel = lambda a, b: dominates(a.obj, b.obj)
        elif relation == "constrained":
            self._rel = constrained_dominates
        elif callable(relation):
            self._rel = relation
        else:
            raise ValueError(f"unknown dominance relation: {relation!r}")

    def __len__(self) -> int:
        return len(self.members)

    def objectives(self) -> np.ndarray:
        return np.array([m.obj for m in self.members], dtype=float)

    def _rejects(self, sol: Solution) -> bool:
        # Rejected when dominated by a member, or when it duplicates a member
        # it does not itself beat (clone flooding guard).
        for m in self.members:
            if self._rel(m, sol):
                return True
            if np.array_equal(m.obj, sol.obj) and not self._rel(sol, m):
                return True
        return False

    def add(self, sol: Solution) -> bool:
        """Dominance-only insert (no ranking). Returns True if kept."""
        if self._rejects(sol):
            return False
        self.members = [m for m in self.members if not self._rel(sol, m)]
        self.members.append(sol)
        if self.capacity is not None and len(self.members) > self.capacity:
            raise RuntimeError("bounded archive overflow: use insert() with a ranker")
        return True

    def insert(self, sol: Solution, ranker) -> Optional[int]:
        """Ranked insert.

        Members dominated by ``sol`` are dropped; if ``sol`` is itself
        dominated the archive is left untouched and None is returned.
        Otherwise the new member set is ordered by ``ranker`` (a callable on
        the stacked objective vectors returning an object with a best-first
        ``order``), the archive is truncated to its ``capacity`` best-ranked
        members, and the rank of ``sol`` is returned.  A returned rank equal
        to or beyond the capacity means the solution was evicted right away.
        """
        if self._rejects(sol):
            return None
        self.members = [m for m in self.members if not self._rel(sol, m)]
        self.members.append(sol)
        order = np.asarray(ranker(self.objectives()).order, dtype=int)
        pos = int(np.flatnonzero(order == len(self.members) - 1)[0])
        ordered = [self.members[i] for i in order]
        if self.capacity is not None:
            ordered = ordered[: self.capacity]
        self.members = ordered
        return pos
