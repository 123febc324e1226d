"""
Quality indicators and best-solution selection
==============================================

Exact hypervolume (2 and 3 objectives), generational distances, the
additive epsilon indicator, survival counts against a combined reference
front, and the entropy-weighting scheme that picks the k preferred
solutions off a front.
"""

import numpy as np

from pearlkit import (
    additive_epsilon,
    cardinality_metrics,
    entropy_select,
    gd,
    hypervolume,
    igd,
)

# Hypervolume: Lebesgue measure of the region dominated by the front and
# bounded by the reference point (minimization sense, higher is better).
print(hypervolume([[1, 2], [2, 1]], ref=[3, 3]))       # 3.0 by hand
print(hypervolume([[0, 0, 0]], ref=[3, 3, 3]))         # the full 27 box

# Distances to and from a reference front.
front = np.array([[0.1, 0.9], [0.5, 0.5], [0.9, 0.1]])
reference = np.array([[0.0, 1.0], [0.5, 0.48], [1.0, 0.0]])
print("gd:", round(gd(front, reference), 4), " igd:", round(igd(front, reference), 4))
print("additive epsilon:", round(additive_epsilon(front, reference), 4))

# Survival in the combined front across algorithms: i_c counts an
# algorithm's points that remain non-dominated once everything is pooled.
fronts = {
    "steady": np.array([[0.2, 0.8], [0.5, 0.5], [0.8, 0.2]]),
    "greedy": np.array([[0.1, 0.95], [0.45, 0.45], [0.9, 0.4]]),
}
for name, (i_c, c_metric) in cardinality_metrics(fronts).items():
    print(f"{name}: i_c={i_c} c_metric={c_metric:.2f}")

# Entropy selection: objectives with more spread earn more weight; the k
# lowest weighted-normalized scores are returned.
candidates = np.array([
    [0.30, 0.70],
    [0.50, 0.50],
    [0.70, 0.45],
    [0.90, 0.40],
])
best = entropy_select(candidates, k=2)
print("preferred solutions:", candidates[best].tolist())
