"""
Training a single policy to uncover a Pareto front
==================================================

One stochastic policy, eight workers, one-step episodes: each worker draws
an action (a candidate decision vector), evaluates the problem, and scores
it against its private archive.  The merged archives approximate the front.

This demo runs a reduced budget so it finishes in a few seconds; the full
benchmark setting uses budget=10000 (20000 for the harder suites).
"""

import numpy as np

from pearlkit import (
    CurriculumConstrained,
    PearlNds,
    TrainerConfig,
    get_problem,
    hypervolume,
    train,
)

problem = get_problem("dtlz2")
cfg = TrainerConfig(n_steps=32, ncores=8, budget=4096, seed=0)
result = train(problem, lambda: PearlNds(kappa=64, ranker="crowding"), cfg)

front = np.array([-s.obj for s in result.front])  # back to minimization sense
print(f"evaluations: {result.n_evaluations}, merged front: {len(front)} points")
print(f"hypervolume vs nadir {problem.nadir.tolist()}: "
      f"{hypervolume(front, problem.nadir):.3f}")
print(f"wall time: {result.wall_time:.1f}s")

# The evaluation log carries every sample: step, worker, x, f, g, cv, reward.
row = result.log[-1]
print("\nlast log row: step", row.step, "worker", row.worker,
      "reward", round(row.reward, 3))

# Constrained problems wrap the engine in the curriculum handler: the policy
# first learns to reach feasibility, then optimizes inside it.
problem = get_problem("ctp1")
cfg = TrainerConfig(n_steps=32, ncores=8, budget=4096, seed=0)
result = train(problem,
               lambda: CurriculumConstrained(PearlNds(kappa=64, ranker="crowding")),
               cfg)
front = np.array([-s.obj for s in result.front])
feasible_share = np.mean([row.cv == 0.0 for row in result.log])
print(f"\nctp1: {len(front)} feasible front points, "
      f"hypervolume {hypervolume(front, problem.nadir):.3f}, "
      f"{feasible_share:.0%} of samples feasible")
