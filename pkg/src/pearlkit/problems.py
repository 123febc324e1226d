"""Benchmark problem definitions with analytic objectives and constraints.

All problems minimize on the unit hypercube.  Constraint functions return
violation-positive values (g <= 0 feasible).  Reference Pareto fronts come
from analytic generators where the front has a simple closed form
(sphere/curve families) and from versioned CSV files otherwise (the
disconnected fronts); see scripts/make_reference_fronts.py for how the
files are produced.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Optional

import numpy as np

from .pareto import non_dominated_mask


@dataclass
class ProblemSpec:
    """Registry entry: dimensions, box, evaluators, front source, nadir."""

    name: str
    n_x: int
    n_obj: int
    objectives: Callable[[np.ndarray], np.ndarray]
    # constraints(x, f) -> violation-positive raw values; None when unconstrained
    constraints: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    front: Optional[Callable[[int], np.ndarray]] = None
    front_file: Optional[str] = None
    nadir: np.ndarray = field(default_factory=lambda: np.array([3.0, 3.0, 3.0]))
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.lower is None:
            self.lower = np.zeros(self.n_x)
        if self.upper is None:
            self.upper = np.ones(self.n_x)
        self.nadir = np.asarray(self.nadir, dtype=float)

    @property
    def n_constraints(self) -> int:
        if self.constraints is None:
            return 0
        probe = 0.5 * (self.lower + self.upper)
        return len(self.constraints(probe, self.objectives(probe)))


@dataclass
class EvaluationRecord:
    """One problem evaluation: inputs, raw outputs, and a monotone index."""

    x: np.ndarray
    objectives: np.ndarray  # minimization sense, raw
    constraints: np.ndarray
    index: int


def evaluate(problem: ProblemSpec, x, index: int = 0) -> EvaluationRecord:
    """Evaluate a problem at a point of its box.

    The evaluation index is a per-worker monotone counter supplied by the
    caller; the function itself is pure.  Points outside the box (beyond a
    1e-9 slack) are a usage error: optimizers clamp before calling.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n_x,):
        raise ValueError(f"{problem.name} expects {problem.n_x} decision variables")
    if np.any(x < problem.lower - 1e-9) or np.any(x > problem.upper + 1e-9):
        raise ValueError(f"point outside the box of {problem.name}")
    f = problem.objectives(x)
    g = (problem.constraints(x, f) if problem.constraints is not None
         else np.empty(0))
    return EvaluationRecord(x=x, objectives=np.asarray(f, dtype=float),
                            constraints=np.atleast_1d(np.asarray(g, dtype=float)),
                            index=index)


def reference_front(problem: ProblemSpec, n_points: int) -> np.ndarray:
    """Return ``n_points`` mutually non-dominated points of the true front."""
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if problem.front is not None:
        return problem.front(n_points)
    if problem.front_file is not None:
        stored = _load_front_file(problem.front_file)
        return _subsample(stored, n_points)
    raise FileNotFoundError(f"no reference front registered for {problem.name}")


def _load_front_file(filename: str) -> np.ndarray:
    ref = resources.files(__package__) / "data" / filename
    if not ref.is_file():
        raise FileNotFoundError(
            f"reference front file {filename!r} is missing from the package data"
        )
    with ref.open("r") as handle:
        rows = list(csv.reader(handle))
    return np.asarray(rows[1:], dtype=float)  # skip the f1,...,fF header


def _subsample(points: np.ndarray, n: int) -> np.ndarray:
    if n >= len(points):
        return points.copy()
    idx = np.unique(np.round(np.linspace(0, len(points) - 1, n)).astype(int))
    return points[idx]


# ---------------------------------------------------------------------------
# dtlz family (scalable sphere/curve/disconnected fronts), 3 objectives here.
# ---------------------------------------------------------------------------

def _hypersphere(angles: np.ndarray, scale: float) -> np.ndarray:
    n_obj = len(angles) + 1
    f = np.full(n_obj, scale)
    for i in range(n_obj):
        f[i] *= np.prod(np.cos(angles[: n_obj - 1 - i]))
        if i > 0:
            f[i] *= np.sin(angles[n_obj - 1 - i])
    return f


def dtlz2_objectives(x, n_obj=3):
    x = np.asarray(x, dtype=float)
    xp, xm = x[: n_obj - 1], x[n_obj - 1:]
    g = float(np.sum((xm - 0.5) ** 2))
    return _hypersphere(xp * np.pi / 2, 1.0 + g)


def dtlz4_objectives(x, n_obj=3, alpha=100.0):
    x = np.asarray(x, dtype=float)
    xp, xm = x[: n_obj - 1], x[n_obj - 1:]
    g = float(np.sum((xm - 0.5) ** 2))
    return _hypersphere((xp ** alpha) * np.pi / 2, 1.0 + g)


def _dtlz5_angles(xp: np.ndarray, g: float) -> np.ndarray:
    angles = np.empty_like(xp)
    angles[0] = xp[0] * np.pi / 2
    angles[1:] = np.pi / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * xp[1:])
    return angles


def dtlz5_objectives(x, n_obj=3):
    x = np.asarray(x, dtype=float)
    xp, xm = x[: n_obj - 1], x[n_obj - 1:]
    g = float(np.sum((xm - 0.5) ** 2))
    return _hypersphere(_dtlz5_angles(xp, g), 1.0 + g)


def dtlz6_objectives(x, n_obj=3):
    x = np.asarray(x, dtype=float)
    xp, xm = x[: n_obj - 1], x[n_obj - 1:]
    g = float(np.sum(xm ** 0.1))
    return _hypersphere(_dtlz5_angles(xp, g), 1.0 + g)


def dtlz7_objectives(x, n_obj=3):
    x = np.asarray(x, dtype=float)
    xp, xm = x[: n_obj - 1], x[n_obj - 1:]
    g = 1.0 + 9.0 * float(np.mean(xm))
    f = np.empty(n_obj)
    f[: n_obj - 1] = xp
    h = n_obj - float(np.sum(xp / (1.0 + g) * (1.0 + np.sin(3.0 * np.pi * xp))))
    f[n_obj - 1] = (1.0 + g) * h
    return f


def c2dtlz2_constraint(f: np.ndarray, radius: float = 0.5) -> np.ndarray:
    """Feasible inside any of the spheres around the front corners or center."""
    f = np.asarray(f, dtype=float)
    total = float(np.sum(f**2))
    corner = np.min((f - 1.0) ** 2 + (total - f**2) - radius**2)
    center = total - 2.0 * float(np.sum(f)) / math.sqrt(f.size) + 1.0 - radius**2
    return np.array([min(corner, center)])


def c3dtlz4_constraint(f: np.ndarray) -> np.ndarray:
    """Feasible outside the union of per-objective ellipsoids."""
    f = np.asarray(f, dtype=float)
    total = np.sum(f**2)
    return 1.0 - f**2 / 4.0 - (total - f**2)


# ---------------------------------------------------------------------------
# ctp family: two objectives, two decision variables, sinusoidal or
# exponential constraint boundaries cutting into the unconstrained front.
# ---------------------------------------------------------------------------

def _ctp1_parameters(n_constraints: int = 2):
    a = [1.0]
    b = [1.0]
    delta = 1.0 / (n_constraints + 1)
    alpha = delta
    for j in range(n_constraints):
        beta = a[j] * math.exp(-b[j] * alpha)
        a.append((a[j] + beta) / 2.0)
        b.append(-math.log(beta / a[-1]) / alpha)
        alpha += delta
    return np.array(a[1:]), np.array(b[1:])


_CTP1_A, _CTP1_B = _ctp1_parameters()


def ctp1_objectives(x):
    x = np.asarray(x, dtype=float)
    f1 = x[0]
    g = 1.0 + float(np.sum(x[1:]))
    return np.array([f1, g * math.exp(-f1 / g)])


def ctp1_constraint(f: np.ndarray) -> np.ndarray:
    f1, f2 = float(f[0]), float(f[1])
    return _CTP1_A * np.exp(-_CTP1_B * f1) - f2


def _ctp_objectives(x):
    x = np.asarray(x, dtype=float)
    f1 = x[0]
    g = 1.0 + float(np.sum(x[1:]))
    return np.array([f1, g - f1])


# theta, a, b, c, d, e constants of the published constraint family
_CTP_PARAMS = {
    "ctp2": (-0.2 * np.pi, 0.2, 10.0, 1.0, 6.0, 1.0),
    "ctp3": (-0.2 * np.pi, 0.1, 10.0, 1.0, 0.5, 1.0),
    "ctp4": (-0.2 * np.pi, 0.75, 10.0, 1.0, 0.5, 1.0),
}


def ctp_constraint(f: np.ndarray, theta, a, b, c, d, e) -> np.ndarray:
    f1, f2 = float(f[0]), float(f[1])
    lhs = math.cos(theta) * (f2 - e) - math.sin(theta) * f1
    inner = math.sin(theta) * (f2 - e) + math.cos(theta) * f1
    rhs = a * abs(math.sin(b * np.pi * math.copysign(abs(inner) ** c, inner))) ** d
    return np.array([rhs - lhs])


# ---------------------------------------------------------------------------
# Analytic reference-front generators.
# ---------------------------------------------------------------------------

def sphere_front(n_points: int, n_obj: int = 3) -> np.ndarray:
    """Well-spread points on the positive unit-sphere octant."""
    from .density import das_dennis, default_divisions

    p = default_divisions(n_obj, n_points)
    dirs = das_dennis(n_obj, p).directions
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    return _subsample(dirs / norms, n_points)


def dtlz5_front(n_points: int) -> np.ndarray:
    t = np.linspace(0.0, np.pi / 2, n_points)
    c = np.cos(t) / math.sqrt(2.0)
    return np.column_stack([c, c, np.sin(t)])


def c2dtlz2_front(n_points: int) -> np.ndarray:
    count = max(4 * n_points, 64)
    for _ in range(8):
        candidates = sphere_front(count)
        feasible = candidates[
            [float(c2dtlz2_constraint(f)[0]) <= 0.0 for f in candidates]
        ]
        if len(feasible) >= n_points:
            return _subsample(feasible, n_points)
        count *= 2
    return feasible


def c3dtlz4_front(n_points: int) -> np.ndarray:
    # Scale unit-sphere directions out to the binding ellipsoid constraint.
    y = sphere_front(max(n_points, 8))
    v = y**2 / 4.0 + (np.sum(y**2, axis=1, keepdims=True) - y**2)
    f = y / np.sqrt(np.min(v, axis=1))[:, None]
    f = f[non_dominated_mask(f, sense="min")]
    return _subsample(f, n_points)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

def _registry() -> dict[str, ProblemSpec]:
    problems = {}

    def add(spec: ProblemSpec):
        problems[spec.name] = spec

    add(ProblemSpec("dtlz2", 12, 3, dtlz2_objectives,
                    front=lambda n: sphere_front(n), nadir=[3, 3, 3]))
    add(ProblemSpec("dtlz4", 12, 3, dtlz4_objectives,
                    front=lambda n: sphere_front(n), nadir=[3, 3, 3]))
    add(ProblemSpec("dtlz5", 12, 3, dtlz5_objectives,
                    front=dtlz5_front, nadir=[3, 3, 3]))
    add(ProblemSpec("dtlz6", 12, 3, dtlz6_objectives,
                    front_file="dtlz6_front.csv", nadir=[3, 3, 3]))
    add(ProblemSpec("dtlz7", 12, 3, dtlz7_objectives,
                    front_file="dtlz7_front.csv", nadir=[3, 3, 7]))
    add(ProblemSpec("c2dtlz2", 7, 3, dtlz2_objectives,
                    constraints=lambda x, f: c2dtlz2_constraint(f),
                    front=c2dtlz2_front, nadir=[3, 3, 3]))
    add(ProblemSpec("c3dtlz4", 7, 3, dtlz4_objectives,
                    constraints=lambda x, f: c3dtlz4_constraint(f),
                    front=c3dtlz4_front, nadir=[3, 3, 3]))
    add(ProblemSpec("ctp1", 2, 2, ctp1_objectives,
                    constraints=lambda x, f: ctp1_constraint(f),
                    front_file="ctp1_front.csv", nadir=[3, 3]))
    for name, params in _CTP_PARAMS.items():
        add(ProblemSpec(name, 2, 2, _ctp_objectives,
                        constraints=(lambda p: (lambda x, f: ctp_constraint(f, *p)))(params),
                        front_file=f"{name}_front.csv", nadir=[3, 3]))
    return problems


PROBLEMS = _registry()


def get_problem(name: str) -> ProblemSpec:
    """Look a problem up by name; dashes are ignored (c2-dtlz2 == c2dtlz2)."""
    key = name.lower().replace("-", "").replace("_", "")
    for candidate, spec in PROBLEMS.items():
        if candidate.replace("-", "") == key:
            return spec
    raise KeyError(f"unknown problem: {name!r} (known: {sorted(PROBLEMS)})")
