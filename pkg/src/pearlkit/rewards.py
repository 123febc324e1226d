"""Reward-assignment engines for single-policy Pareto-front learning.

Four engines turn an objective vector into the scalar reward an agent
trains on:

* ``PearlEnvelope`` scalarizes against Dirichlet-sampled preference rays,
  optionally adding a uniformity term (cosine alignment or a negated
  KL non-uniformity penalty).
* ``PearlEpsilon`` ranks the candidate inside a bounded archive by an
  additive-epsilon indicator fitness.
* ``PearlNds`` ranks the candidate by a density ranker (crowding or
  niching) inside a bounded archive.
* ``CurriculumConstrained`` wraps any of the above: infeasible samples are
  paid a distance-to-feasibility penalty minus a bonus gap, feasible ones
  are forwarded to the inner engine whose archive then only ever holds
  feasible solutions.  The rank-based alternative ("crowding2"/"niching2")
  is ``PearlNds`` with the constrained dominance relation.

Every engine is single-owner state: one instance per rollout worker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np

from .density import DensityRank, ReferenceDirectionSet, crowding_rank, das_dennis, default_divisions, niching_rank
from .pareto import FEASIBILITY_TOL, ParetoArchive, Solution


def constraint_violation(values, limits=None, weights=None) -> float:
    """Weighted squared distance from the feasible region.

    With ``limits`` given, entry i is violated when it exceeds its limit and
    contributes ``((v_i - c_i) / |c_i|)**2`` (absolute scale when the limit
    is zero).  Without limits the entries are raw ``g(x) <= 0`` constraint
    values and contribute ``max(0, g_i)**2``.  Contributions are weighted by
    ``weights`` (default 1) and violations below FEASIBILITY_TOL count as
    satisfied, so the result is 0 exactly for feasible inputs.
    """
    v = np.atleast_1d(np.asarray(values, dtype=float))
    if v.size == 0:
        return 0.0
    w = np.ones_like(v) if weights is None else np.atleast_1d(np.asarray(weights, dtype=float))
    if w.shape != v.shape:
        raise ValueError("weights must match the constraint vector length")
    if np.any(w <= 0):
        raise ValueError("constraint weights must be strictly positive")
    if limits is None:
        excess = np.where(v > FEASIBILITY_TOL, v, 0.0)
    else:
        c = np.atleast_1d(np.asarray(limits, dtype=float))
        if c.shape != v.shape:
            raise ValueError("limits must match the constraint vector length")
        scale = np.where(c != 0, np.abs(c), 1.0)
        excess = np.where(v - c > FEASIBILITY_TOL, (v - c) / scale, 0.0)
    return float(np.sum(w * excess**2))


def sample_preferences(alpha, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` preference vectors from Dirichlet(alpha).

    Sampling goes through normalized Gamma variates; each row is nonnegative
    and sums to 1.
    """
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    if np.any(a <= 0):
        raise ValueError("Dirichlet concentration entries must be positive")
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return np.empty((0, a.size))
    gam = rng.gamma(shape=a, size=(count, a.size))
    totals = gam.sum(axis=1, keepdims=True)
    degenerate = totals[:, 0] <= 0.0
    if np.any(degenerate):  # underflow for tiny alpha; fall back to uniform
        gam[degenerate] = 1.0
        totals = gam.sum(axis=1, keepdims=True)
    return gam / totals


def cosine_uniformity(w: np.ndarray, r: np.ndarray) -> float:
    """Cosine alignment between a preference ray and an objective profile.

    Defined as 0 when either vector has zero norm (degenerate all-zero
    rewards; removable singularity).
    """
    nw = float(np.linalg.norm(w))
    nr = float(np.linalg.norm(r))
    if nw == 0.0 or nr == 0.0:
        return 0.0
    return float(np.dot(w, r) / (nw * nr))


def kl_uniformity(w: np.ndarray, r: np.ndarray) -> float:
    """Negated KL divergence of the weighted profile from uniform.

    The profile is ``p_i = w_i r_i / sum_k w_k r_k``.  The result is 0 when
    the profile is uniform and negative otherwise, so larger always means
    better aligned.  When the profile is not a valid distribution (negative
    entries or zero total mass) the term is defined as 0.
    """
    q = np.asarray(w, dtype=float) * np.asarray(r, dtype=float)
    total = float(q.sum())
    if total <= 0.0 or np.any(q < 0):
        return 0.0
    p = q / total
    nz = p > 0
    kl = float(np.sum(p[nz] * np.log(p[nz] * p.size)))
    return -kl


_UNIFORMITY = {"cos": cosine_uniformity, "cosine": cosine_uniformity, "kl": kl_uniformity}


def pearl_e_reward(r, rays, lambda_: float, uniformity: str = "cos") -> float:
    """Envelope reward: best scalarization over the active preference rays.

    ``max_j (w_j . r + lambda * u(w_j, r))`` with ``u`` the configured
    uniformity term.
    """
    rays = np.atleast_2d(np.asarray(rays, dtype=float))
    if rays.shape[0] == 0:
        raise ValueError("need at least one preference ray")
    try:
        u = _UNIFORMITY[uniformity]
    except KeyError:
        raise ValueError(f"unknown uniformity kind: {uniformity!r}") from None
    r = np.asarray(r, dtype=float)
    best = -math.inf
    for w in rays:
        value = float(np.dot(w, r))
        if lambda_ != 0.0:
            value += lambda_ * u(w, r)
        best = max(best, value)
    return best


def epsilon_fitness(normalized: np.ndarray, nu: float) -> np.ndarray:
    """Indicator-based fitness of every member of a set (maximization sense).

    ``F(x) = sum_{y != x} -exp(-I(y, x) / nu)`` where ``I(y, x)`` is the
    smallest shift that makes ``y`` weakly dominate ``x``.  Higher fitness
    means the member is less threatened by the rest of the set.
    """
    f = np.atleast_2d(np.asarray(normalized, dtype=float))
    ind = np.max(f[None, :, :] - f[:, None, :], axis=2)  # ind[y, x] = I(y, x)
    contrib = np.exp(-ind / nu)
    return -(contrib.sum(axis=0) - 1.0)  # drop the self term exp(0)


class RunningBounds:
    """Componentwise min/max of every objective vector seen so far."""

    def __init__(self):
        self.lo: Optional[np.ndarray] = None
        self.hi: Optional[np.ndarray] = None

    def update(self, v: np.ndarray):
        v = np.asarray(v, dtype=float)
        if self.lo is None:
            self.lo = v.copy()
            self.hi = v.copy()
        else:
            np.minimum(self.lo, v, out=self.lo)
            np.maximum(self.hi, v, out=self.hi)

    def normalize(self, v: np.ndarray) -> np.ndarray:
        """Min-max map to [0, 1]; degenerate ranges collapse to 0."""
        if self.lo is None:
            return np.zeros_like(np.asarray(v, dtype=float))
        span = self.hi - self.lo
        return np.where(span > 0, (v - self.lo) / np.where(span > 0, span, 1.0), 0.0)


@dataclass
class RewardOutcome:
    """Scalar reward plus bookkeeping flags for one scored solution."""

    reward: float
    feasible: bool
    archived: bool


class PearlEnvelope:
    """Preference-conditioned scalarization engine (unbounded archive).

    The reward never consults the archive; the archive only collects the
    non-dominated solutions encountered, for reporting.  ``resample`` must
    be called before the first ``score`` and is meant to run at batch
    boundaries (one ray set per rollout segment).
    """

    reward_scale = 1.0
    # scalarization rewards stay informative everywhere, so wider action
    # noise pays off; rank rewards prefer a narrower default (see below)
    default_log_std = -0.5

    def __init__(self, n_obj: int, alpha=1.0, lambda_: float = 1.0,
                 uniformity: str = "cos", normalized_obj: bool = False, n_rays: int = 1):
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        if alpha.size == 1:
            alpha = np.full(n_obj, float(alpha[0]))
        if alpha.size != n_obj:
            raise ValueError("alpha length must match the objective count")
        if uniformity not in _UNIFORMITY:
            raise ValueError(f"unknown uniformity kind: {uniformity!r}")
        self.n_obj = n_obj
        self.alpha = alpha
        self.lambda_ = float(lambda_)
        self.uniformity = uniformity
        self.normalized_obj = normalized_obj
        self.n_rays = int(n_rays)
        self.rays: Optional[np.ndarray] = None
        self.bounds = RunningBounds()
        self.archive = ParetoArchive(capacity=None)

    def observation(self) -> np.ndarray:
        if self.rays is None:
            raise RuntimeError("resample() must run before the engine is observed")
        return self.rays.ravel().copy()

    def resample(self, rng: np.random.Generator):
        self.rays = sample_preferences(self.alpha, self.n_rays, rng)

    def score(self, sol: Solution) -> RewardOutcome:
        if self.rays is None:
            raise RuntimeError("resample() must run before scoring")
        self.bounds.update(sol.obj)
        r = self.bounds.normalize(sol.obj) if self.normalized_obj else sol.obj
        reward = pearl_e_reward(r, self.rays, self.lambda_, self.uniformity)
        archived = self.archive.add(sol)
        return RewardOutcome(reward=reward, feasible=sol.feasible, archived=archived)


class _RankedEngine:
    """Shared machinery for the archive-rank engines."""

    default_log_std = -0.75

    def __init__(self, kappa: int, relation: str = "objectives"):
        if kappa < 1:
            raise ValueError("kappa must be a positive integer")
        self.kappa = int(kappa)
        self.reward_scale = float(kappa)
        self.archive = ParetoArchive(capacity=self.kappa, relation=relation)

    def observation(self) -> np.ndarray:
        # rank engines contribute nothing to the policy observation
        return np.empty(0)

    def resample(self, rng: np.random.Generator):
        pass

    def _ranker(self, objs: np.ndarray) -> DensityRank:
        raise NotImplementedError

    def score(self, sol: Solution) -> RewardOutcome:
        rank = self.archive.insert(sol, self._ranker)
        if rank is None:
            return RewardOutcome(reward=-float(self.kappa), feasible=sol.feasible, archived=False)
        return RewardOutcome(reward=-float(rank), feasible=sol.feasible,
                             archived=rank < self.kappa)


class PearlEpsilon(_RankedEngine):
    """Additive-epsilon indicator ranking inside a bounded archive.

    Fitness is computed on objectives min-max normalized by the running
    bounds of everything the engine has seen; equal fitness breaks
    lexicographically on the raw objective vector.
    """

    def __init__(self, kappa: int, nu: float = 0.05):
        super().__init__(kappa)
        if nu <= 0:
            raise ValueError("nu must be positive")
        self.nu = float(nu)
        self.bounds = RunningBounds()

    def _ranker(self, objs: np.ndarray) -> DensityRank:
        normalized = np.vstack([self.bounds.normalize(o) for o in objs])
        fitness = epsilon_fitness(normalized, self.nu)
        order = sorted(range(len(objs)), key=lambda i: (-fitness[i], tuple(objs[i])))
        return DensityRank(order=np.asarray(order, dtype=int), scores=fitness)

    def score(self, sol: Solution) -> RewardOutcome:
        self.bounds.update(sol.obj)
        return super().score(sol)


class PearlNds(_RankedEngine):
    """Density ranking (crowding or niching) inside a bounded archive.

    ``constrained=True`` gives the rank-based constraint handling: the
    archive orders members with feasibility folded into dominance, so a
    single feasible solution displaces every infeasible one.
    """

    def __init__(self, kappa: int, ranker: str = "crowding",
                 dirs: Optional[ReferenceDirectionSet] = None, n_obj: Optional[int] = None,
                 constrained: bool = False):
        super().__init__(kappa, relation="constrained" if constrained else "objectives")
        if ranker == "crowding":
            self._rank_fn = crowding_rank
        elif ranker == "niching":
            if dirs is None:
                if n_obj is None:
                    raise ValueError("niching needs reference directions or n_obj")
                dirs = das_dennis(n_obj, default_divisions(n_obj, kappa))
            self._rank_fn = partial(niching_rank, dirs=dirs)
        else:
            raise ValueError(f"unknown ranker: {ranker!r}")
        self.ranker_name = ranker
        self.dirs = dirs

    def _ranker(self, objs: np.ndarray) -> DensityRank:
        return self._rank_fn(objs)


class CurriculumConstrained:
    """Two-stage constrained engine: reach feasibility first, then rank.

    Infeasible solutions earn ``-(sum_i gamma_i * phi_i) - bonus`` and never
    touch the archive; feasible ones are forwarded to the inner engine.  With
    ``bonus`` at least the inner buffer size, every infeasible reward sits
    strictly below every feasible one.
    """

    def __init__(self, inner, bonus: Optional[float] = None,
                 limits=None, weights=None):
        self.inner = inner
        if bonus is None:
            if not hasattr(inner, "kappa"):
                raise ValueError("bonus must be given explicitly for this inner engine")
            bonus = float(inner.kappa)
        if bonus < 0:
            raise ValueError("bonus must be nonnegative")
        self.bonus = float(bonus)
        self.limits = limits
        self.weights = weights
        self.reward_scale = (
            float(inner.reward_scale) if inner.reward_scale != 1.0 else max(1.0, self.bonus)
        )
        self.default_log_std = getattr(inner, "default_log_std", -0.75)

    @property
    def archive(self) -> ParetoArchive:
        return self.inner.archive

    def observation(self) -> np.ndarray:
        return self.inner.observation()

    def resample(self, rng: np.random.Generator):
        self.inner.resample(rng)

    def score(self, sol: Solution) -> RewardOutcome:
        if sol.feasible:
            return self.inner.score(sol)
        cv = constraint_violation(sol.g, self.limits, self.weights)
        return RewardOutcome(reward=-cv - self.bonus, feasible=False, archived=False)


def make_solution(x, objectives_min, constraints=(), limits=None, weights=None) -> Solution:
    """Build a Solution from a minimization-sense evaluation.

    Objectives are negated into the internal maximization sense.  With
    ``limits`` the constraint entries are raw metric values compared against
    their limits; the stored ``g`` is then the violation-positive excess
    ``value - limit`` while the scalar violation keeps the relative scaling.
    """
    v = np.atleast_1d(np.asarray(constraints, dtype=float)) if np.size(constraints) else np.empty(0)
    cv = constraint_violation(v, limits, weights) if v.size else 0.0
    g = v if limits is None else v - np.atleast_1d(np.asarray(limits, dtype=float))
    return Solution(x=np.asarray(x, dtype=float),
                    obj=-np.asarray(objectives_min, dtype=float),
                    g=g, cv=cv)
