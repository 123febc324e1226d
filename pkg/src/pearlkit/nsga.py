"""NSGA-II and (constrained) NSGA-III generational baselines.

Variation is a (mu, lambda) evolution strategy: blend crossover applied
with probability ``cxpb`` and per-gene Gaussian mutation applied with
probability ``mutpb``, both clamped to the box.  Survivor selection merges
parents and offspring, sorts by non-domination, and resolves the last
partial front by crowding (NSGA-II) or reference-direction niching
(NSGA-III).  The reported front is the non-dominated set of every
evaluation ever made, not just the final population.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .density import ReferenceDirectionSet, associate, crowding_rank, das_dennis, default_divisions
from .pareto import Solution, best_front, non_dominated_sort
from .problems import ProblemSpec, evaluate
from .rewards import make_solution
from .trainer import EvalLogRow, RunResult


@dataclass
class GAConfig:
    """Generational settings; defaults follow the 32-individual setup."""

    lambda_: int = 32
    mu: int = 32
    mutpb: float = 0.3
    cxpb: float = 0.65
    pop_size: int = 32
    budget: int = 10_000
    seed: int = 0
    blend_alpha: float = 0.5
    sigma_fraction: float = 0.1  # mutation sigma as a fraction of box width

    def validate(self):
        if not (0.0 <= self.mutpb <= 1.0 and 0.0 <= self.cxpb <= 1.0):
            raise ValueError("mutpb and cxpb must lie in [0, 1]")
        if self.mu > self.lambda_:
            raise ValueError("mu must not exceed lambda_")
        if self.pop_size < 2:
            raise ValueError("population must hold at least 2 individuals")
        return self


@dataclass
class Population:
    members: list[Solution]
    generation: int = 0


def _selection_order(pop: list[Solution], relation: str,
                     dirs: Optional[ReferenceDirectionSet]) -> list[int]:
    """Indices ordered best-first: by front, then density inside each front."""
    fronts = non_dominated_sort(pop, relation=relation)
    order: list[int] = []
    for front in fronts:
        objs = np.array([pop[i].obj for i in front])
        ranked = crowding_rank(objs).order
        order.extend(front[i] for i in ranked)
    return order


def _variation(parents: list[Solution], cfg: GAConfig, problem: ProblemSpec,
               rng: np.random.Generator) -> list[np.ndarray]:
    """lambda_ offspring decision vectors from the parent pool."""
    lo, hi = problem.lower, problem.upper
    sigma = cfg.sigma_fraction * (hi - lo)
    out = []
    for _ in range(cfg.lambda_):
        i, j = rng.integers(0, len(parents), size=2)
        child = parents[i].x.copy()
        if rng.random() < cfg.cxpb:
            gamma = (1.0 + 2.0 * cfg.blend_alpha) * rng.random(problem.n_x) - cfg.blend_alpha
            child = (1.0 - gamma) * parents[i].x + gamma * parents[j].x
        if rng.random() < cfg.mutpb:
            child = child + rng.normal(0.0, sigma)
        out.append(np.clip(child, lo, hi))
    return out


def _survivors_nsga2(pool: list[Solution], n: int) -> list[Solution]:
    fronts = non_dominated_sort(pool, relation="objectives")
    chosen: list[int] = []
    for front in fronts:
        if len(chosen) + len(front) <= n:
            chosen.extend(front)
            continue
        objs = np.array([pool[i].obj for i in front])
        ranked = crowding_rank(objs).order
        chosen.extend(front[i] for i in ranked[: n - len(chosen)])
        break
    return [pool[i] for i in chosen]


def _survivors_nsga3(pool: list[Solution], n: int, dirs: ReferenceDirectionSet,
                     constrained: bool) -> list[Solution]:
    relation = "constrained" if constrained else "objectives"
    fronts = non_dominated_sort(pool, relation=relation)
    chosen: list[int] = []
    last: list[int] = []
    for front in fronts:
        if len(chosen) + len(front) <= n:
            chosen.extend(front)
        else:
            last = front
            break
    need = n - len(chosen)
    if need == 0 or not last:
        return [pool[i] for i in chosen]

    considered = chosen + last
    objs = np.array([pool[i].obj for i in considered])
    lo, hi = objs.min(axis=0), objs.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    normalized = np.where(hi - lo > 0, (objs - lo) / span, 0.0)
    niche, dist = associate(normalized, dirs)
    counts = np.bincount(niche[: len(chosen)], minlength=len(dirs.directions))

    # deterministic niche filling: among the least-filled niches that still
    # have candidates, take the candidate closest to its direction
    available = list(range(len(chosen), len(considered)))
    while need > 0 and available:
        active = {int(niche[c]) for c in available}
        min_count = min(counts[a] for a in active)
        pick = min(
            (c for c in available if counts[niche[c]] == min_count),
            key=lambda c: (dist[c], tuple(pool[considered[c]].obj)),
        )
        chosen.append(considered[pick])
        counts[niche[pick]] += 1
        available.remove(pick)
        need -= 1
    return [pool[i] for i in chosen]


def nsga2_step(pop: Population, cfg: GAConfig, problem: ProblemSpec,
               rng: np.random.Generator, evaluator=None) -> Population:
    """One generation: ES variation, merge with parents, crowded selection."""
    return _step(pop, cfg, problem, rng, evaluator, use_niching=False,
                 dirs=None, constrained=False)


def nsga3_step(pop: Population, cfg: GAConfig, problem: ProblemSpec,
               dirs: ReferenceDirectionSet, constrained: bool,
               rng: np.random.Generator, evaluator=None) -> Population:
    """One generation with niching selection; constrained dominance optional."""
    return _step(pop, cfg, problem, rng, evaluator, use_niching=True,
                 dirs=dirs, constrained=constrained)


def _step(pop, cfg, problem, rng, evaluator, use_niching, dirs, constrained):
    relation = "constrained" if constrained else "objectives"
    order = _selection_order(pop.members, relation, dirs)
    parents = [pop.members[i] for i in order[: cfg.mu]]
    offspring_x = _variation(parents, cfg, problem, rng)
    offspring = [evaluator(x) if evaluator else _plain_eval(problem, x)
                 for x in offspring_x]
    pool = pop.members + offspring
    if use_niching:
        survivors = _survivors_nsga3(pool, cfg.pop_size, dirs, constrained)
    else:
        survivors = _survivors_nsga2(pool, cfg.pop_size)
    return Population(members=survivors, generation=pop.generation + 1)


def _plain_eval(problem: ProblemSpec, x: np.ndarray) -> Solution:
    record = evaluate(problem, x)
    return make_solution(record.x, record.objectives, record.constraints)


def run_nsga(problem: ProblemSpec, cfg: GAConfig, *, use_niching: bool,
             constrained: bool = False,
             dirs: Optional[ReferenceDirectionSet] = None) -> RunResult:
    """Full generational run under a shared evaluation budget.

    The initial population counts against the budget; the returned front is
    the (feasibility-first) non-dominated set over all evaluations.
    """
    cfg.validate()
    if cfg.budget < cfg.pop_size + cfg.lambda_:
        raise ValueError("budget must cover the initial population and one generation")
    start = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed)))
    if use_niching and dirs is None:
        dirs = das_dennis(problem.n_obj, default_divisions(problem.n_obj, cfg.pop_size))

    log: list[EvalLogRow] = []
    everything: list[Solution] = []

    def logged_eval(x: np.ndarray) -> Solution:
        sol = _plain_eval(problem, x)
        log.append(EvalLogRow(step=len(log), worker=0, x=sol.x.copy(),
                              f=-sol.obj, g=sol.g.copy(), cv=sol.cv,
                              reward=float("nan")))
        everything.append(sol)
        return sol

    initial = [logged_eval(rng.uniform(problem.lower, problem.upper))
               for _ in range(cfg.pop_size)]
    pop = Population(members=initial)
    generations = (cfg.budget - cfg.pop_size) // cfg.lambda_
    for _ in range(generations):
        if use_niching:
            pop = nsga3_step(pop, cfg, problem, dirs, constrained, rng,
                             evaluator=logged_eval)
        else:
            pop = nsga2_step(pop, cfg, problem, rng, evaluator=logged_eval)

    return RunResult(front=best_front(everything), log=log, config=asdict(cfg),
                     wall_time=time.perf_counter() - start,
                     n_evaluations=len(log))


def run_nsga2(problem: ProblemSpec, cfg: GAConfig) -> RunResult:
    return run_nsga(problem, cfg, use_niching=False)


def run_nsga3(problem: ProblemSpec, cfg: GAConfig, constrained: bool = False,
              dirs: Optional[ReferenceDirectionSet] = None) -> RunResult:
    return run_nsga(problem, cfg, use_niching=True, constrained=constrained, dirs=dirs)
