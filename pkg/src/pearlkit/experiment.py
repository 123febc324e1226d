"""Configuration-driven experiment execution and cross-run comparison.

An experiment file (JSON, ``version`` key required) names one or more
problems, one or more algorithm variants, a shared evaluation budget, and a
seed list.  ``run_experiment`` executes every (algorithm x problem x seed)
cell, writing per-cell evaluation logs, merged fronts, and JSON summaries
plus one metrics CSV for the whole experiment.  ``compare`` consumes the
outputs of several runs, rebuilds combined per-seed reference fronts,
recomputes the binary indicators against them, and applies the Friedman and
Nemenyi tests to the hypervolumes.
"""

from __future__ import annotations

import csv
import json
import os
import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import nsga, stats
from .indicators import (
    MetricReport,
    additive_epsilon,
    cardinality_metrics,
    gd,
    hypervolume,
    igd,
    read_metric_csv,
    write_metric_csv,
)
from .pareto import non_dominated_mask
from .problems import ProblemSpec, get_problem, reference_front
from .rewards import CurriculumConstrained, PearlEnvelope, PearlEpsilon, PearlNds
from .trainer import RunResult, TrainerConfig, train

OUTPUT_ROOT_ENV = "PEARLKIT_OUTPUT_ROOT"
CONFIG_VERSION = 1


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the bad key."""


@dataclass
class AlgorithmSpec:
    name: str
    params: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        if not self.label:
            suffix = self.params.get("ranker") or self.params.get("mode") or ""
            self.label = f"{self.name}-{suffix}" if suffix else self.name


@dataclass
class ExperimentConfig:
    version: int
    problems: list[str]
    algorithms: list[AlgorithmSpec]
    budget: int
    seeds: list[int]
    output_dir: str
    n_steps: int = 32
    ncores: int = 8
    raw: dict = field(default_factory=dict)


def _as_list(value):
    return value if isinstance(value, list) else [value]


def load_config(source) -> ExperimentConfig:
    """Parse and validate an experiment config (path or dict)."""
    if isinstance(source, (str, Path)):
        with open(source) as handle:
            raw = json.load(handle)
    else:
        raw = dict(source)
    if raw.get("version") != CONFIG_VERSION:
        raise ConfigError(f"key 'version' must equal {CONFIG_VERSION}")
    problems = _as_list(raw.get("problems") or raw.get("problem") or [])
    if not problems:
        raise ConfigError("key 'problems' is required")
    for name in problems:
        try:
            get_problem(name)
        except KeyError as err:
            raise ConfigError(f"key 'problems': {err.args[0]}") from None
    algo_raw = _as_list(raw.get("algorithms") or raw.get("algorithm") or [])
    if not algo_raw:
        raise ConfigError("key 'algorithms' is required")
    algorithms = []
    for entry in algo_raw:
        if isinstance(entry, str):
            entry = {"name": entry}
        name = entry.get("name")
        if name not in ALGORITHMS:
            raise ConfigError(
                f"key 'algorithms': unknown variant {name!r} (known: {sorted(ALGORITHMS)})")
        params = {k: v for k, v in entry.items() if k not in ("name", "label")}
        algorithms.append(AlgorithmSpec(name=name, params=params,
                                        label=entry.get("label", "")))
    labels = [a.label for a in algorithms]
    if len(set(labels)) != len(labels):
        raise ConfigError("key 'algorithms': labels must be unique "
                          "(set 'label' explicitly)")
    budget = raw.get("budget")
    if not isinstance(budget, int) or budget <= 0:
        raise ConfigError("key 'budget' must be a positive integer")
    seeds = raw.get("seeds")
    if not isinstance(seeds, list) or not seeds:
        raise ConfigError("key 'seeds' must be a non-empty list")
    output_dir = raw.get("output_dir")
    if not output_dir:
        raise ConfigError("key 'output_dir' is required")
    return ExperimentConfig(
        version=CONFIG_VERSION, problems=[str(p) for p in problems],
        algorithms=algorithms, budget=int(budget),
        seeds=[int(s) for s in seeds], output_dir=str(output_dir),
        n_steps=int(raw.get("n_steps", 32)), ncores=int(raw.get("ncores", 8)),
        raw=raw,
    )


# ---------------------------------------------------------------------------
# Algorithm variants
# ---------------------------------------------------------------------------

def _trainer_config(config: ExperimentConfig, seed: int, params: dict) -> TrainerConfig:
    keys = ("learning_rate", "clip_ratio", "entropy_coef", "value_coef",
            "epochs", "minibatches", "hidden", "init_log_std", "observation",
            "latent_dim", "squash", "normalize_advantages")
    overrides = {k: params[k] for k in keys if k in params}
    return TrainerConfig(n_steps=config.n_steps, ncores=config.ncores,
                         budget=config.budget, seed=seed, **overrides)


def _inner_engine(problem: ProblemSpec, params: dict):
    name = params.get("inner", "pearl-nds")
    inner_params = dict(params.get("inner_params", {}))
    inner_params.setdefault("kappa", params.get("kappa", 64))
    if "ranker" in params:
        inner_params.setdefault("ranker", params["ranker"])
    return ALGORITHMS[name].engine(problem, inner_params)


def _pearl_e_engine(problem: ProblemSpec, params: dict):
    return PearlEnvelope(
        n_obj=problem.n_obj,
        alpha=params.get("alpha", 1.0),
        lambda_=params.get("lambda", 1.0),
        uniformity=params.get("uniformity", "cos"),
        normalized_obj=params.get("normalized_obj", False),
        n_rays=params.get("n_rays", 1),
    )


def _pearl_eps_engine(problem: ProblemSpec, params: dict):
    return PearlEpsilon(kappa=params.get("kappa", 64), nu=params.get("nu", 0.05))


def _pearl_nds_engine(problem: ProblemSpec, params: dict):
    return PearlNds(kappa=params.get("kappa", 64),
                    ranker=params.get("ranker", "crowding"),
                    n_obj=problem.n_obj)


def _c_pearl_engine(problem: ProblemSpec, params: dict):
    mode = params.get("mode", "distance-cl")
    kappa = params.get("kappa", 64)
    if mode in ("crowding2", "niching2"):
        return PearlNds(kappa=kappa, ranker=mode.removesuffix("2"),
                        n_obj=problem.n_obj, constrained=True)
    if mode != "distance-cl":
        raise ConfigError(f"key 'mode': unknown constrained mode {mode!r}")
    inner = _inner_engine(problem, params)
    return CurriculumConstrained(inner, bonus=params.get("M"),
                                 weights=params.get("gammas"))


def _run_pearl(engine_builder):
    def runner(problem: ProblemSpec, config: ExperimentConfig, seed: int,
               params: dict) -> RunResult:
        cfg = _trainer_config(config, seed, params)
        return train(problem, lambda: engine_builder(problem, params), cfg)

    return runner


def _run_nsga(use_niching: bool):
    def runner(problem: ProblemSpec, config: ExperimentConfig, seed: int,
               params: dict) -> RunResult:
        ga = nsga.GAConfig(
            lambda_=params.get("lambda_", 32), mu=params.get("mu", params.get("lambda_", 32)),
            mutpb=params.get("mutpb", 0.3), cxpb=params.get("cxpb", 0.65),
            pop_size=params.get("pop_size", params.get("lambda_", 32)),
            budget=config.budget, seed=seed,
        )
        constrained = params.get("constrained", problem.constraints is not None)
        if use_niching:
            return nsga.run_nsga3(problem, ga, constrained=constrained)
        return nsga.run_nsga2(problem, ga)

    return runner


@dataclass
class _Variant:
    engine: Optional[callable]
    run: callable


ALGORITHMS = {
    "pearl-e": _Variant(_pearl_e_engine, _run_pearl(_pearl_e_engine)),
    "pearl-eps": _Variant(_pearl_eps_engine, _run_pearl(_pearl_eps_engine)),
    "pearl-nds": _Variant(_pearl_nds_engine, _run_pearl(_pearl_nds_engine)),
    "c-pearl": _Variant(_c_pearl_engine, _run_pearl(_c_pearl_engine)),
    "nsga2": _Variant(None, _run_nsga(use_niching=False)),
    "nsga3": _Variant(None, _run_nsga(use_niching=True)),
}


# ---------------------------------------------------------------------------
# Cell outputs
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return repr(float(value))


def write_evaluations_csv(result: RunResult, problem: ProblemSpec, path: Path):
    n_g = problem.n_constraints
    header = (["step", "worker"]
              + [f"x{i + 1}" for i in range(problem.n_x)]
              + [f"f{i + 1}" for i in range(problem.n_obj)]
              + [f"g{i + 1}" for i in range(n_g)]
              + ["cv", "reward"])
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in result.log:
            writer.writerow(
                [row.step, row.worker]
                + [_fmt(v) for v in row.x]
                + [_fmt(v) for v in row.f]
                + [_fmt(v) for v in row.g]
                + [_fmt(row.cv), _fmt(row.reward)])


def write_front_csv(result: RunResult, problem: ProblemSpec, path: Path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"f{i + 1}" for i in range(problem.n_obj)])
        for sol in result.front:
            writer.writerow([_fmt(v) for v in -sol.obj])


def load_front_csv(path) -> np.ndarray:
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if len(rows) <= 1:
        return np.empty((0, max(len(rows[0]), 1) if rows else 1))
    return np.asarray(rows[1:], dtype=float)


def _cell_metrics(run_id: str, label: str, problem: ProblemSpec,
                  result: RunResult) -> MetricReport:
    front = np.array([-s.obj for s in result.front])
    hv = hypervolume(front, problem.nadir) if len(front) else 0.0
    try:
        ref = reference_front(problem, 1000)
        gd_v, igd_v = gd(front, ref), igd(front, ref)
        eps_v = additive_epsilon(front, ref)
    except (FileNotFoundError, ValueError):
        gd_v = igd_v = eps_v = float("nan")
    return MetricReport(
        run_id=run_id, algorithm=label, problem=problem.name,
        hv=hv, gd=gd_v, igd=igd_v, eps=eps_v,
        i_c=len(front), c_metric=1.0 if len(front) else 0.0,
    ).validate()


def _run_cell(config: ExperimentConfig, spec: AlgorithmSpec, problem_name: str,
              seed: int, cell_dir: Path) -> MetricReport:
    problem = get_problem(problem_name)
    result = ALGORITHMS[spec.name].run(problem, config, seed, spec.params)
    cell_dir.mkdir(parents=True, exist_ok=True)
    write_evaluations_csv(result, problem, cell_dir / "evaluations.csv")
    write_front_csv(result, problem, cell_dir / "front.csv")
    run_id = f"{spec.label}-{problem.name}-seed{seed}"
    report = _cell_metrics(run_id, spec.label, problem, result)
    summary = {
        "run_id": run_id,
        "algorithm": spec.label,
        "problem": problem.name,
        "seed": seed,
        "config": config.raw,
        "wall_time": result.wall_time,
        "n_evaluations": result.n_evaluations,
        "front_size": len(result.front),
        "metrics": {"hv": report.hv, "gd": report.gd, "igd": report.igd,
                    "eps": report.eps, "i_c": report.i_c,
                    "c_metric": report.c_metric},
    }
    with open(cell_dir / "summary.json", "w") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return report


def resolve_output_dir(output_dir: str) -> Path:
    root = os.environ.get(OUTPUT_ROOT_ENV)
    path = Path(output_dir)
    if root and not path.is_absolute():
        path = Path(root) / path
    return path


def run_experiment(source, force: bool = False, parallel_cells: int = 1) -> Path:
    """Execute every cell of an experiment config; returns the output dir.

    Refuses to overwrite an existing completed experiment unless ``force``.
    A failing cell leaves a FAILED marker with the traceback and does not
    stop the remaining cells; the experiment then raises at the end.
    """
    config = load_config(source)
    out = resolve_output_dir(config.output_dir)
    if (out / "metrics.csv").exists() and not force:
        raise FileExistsError(
            f"output directory {out} already holds results (use force to overwrite)")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "config.json", "w") as handle:
        json.dump(config.raw, handle, indent=2, sort_keys=True)
        handle.write("\n")

    cells = [(spec, problem, seed)
             for spec in config.algorithms
             for problem in config.problems
             for seed in config.seeds]

    def execute(cell):
        spec, problem, seed = cell
        cell_dir = out / spec.label / problem / f"seed{seed}"
        try:
            return _run_cell(config, spec, problem, seed, cell_dir), None
        except Exception as err:  # noqa: BLE001 - marker + continue
            cell_dir.mkdir(parents=True, exist_ok=True)
            (cell_dir / "FAILED").write_text(traceback.format_exc())
            return None, (cell, err)

    reports, failures = [], []
    if parallel_cells > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=parallel_cells) as pool:
            for report, failure in pool.map(_CellTask(config, out), cells):
                (reports if report else failures).append(report or failure)
    else:
        for cell in cells:
            report, failure = execute(cell)
            (reports if report else failures).append(report or failure)

    write_metric_csv(reports, out / "metrics.csv")
    if failures:
        names = ", ".join(f"{s.label}/{p}/seed{seed}" for (s, p, seed), _ in failures)
        raise RuntimeError(f"{len(failures)} cell(s) failed: {names}")
    return out


class _CellTask:
    """Picklable cell executor for --parallel-cells."""

    def __init__(self, config: ExperimentConfig, out: Path):
        self.config = config
        self.out = out

    def __call__(self, cell):
        spec, problem, seed = cell
        cell_dir = self.out / spec.label / problem / f"seed{seed}"
        try:
            return _run_cell(self.config, spec, problem, seed, cell_dir), None
        except Exception as err:  # noqa: BLE001
            cell_dir.mkdir(parents=True, exist_ok=True)
            (cell_dir / "FAILED").write_text(traceback.format_exc())
            return None, (cell, err)


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------

@dataclass
class ComparisonResult:
    problem: str
    algorithms: list[str]
    seeds: list[int]
    table: dict            # algorithm -> metric -> (mean, std)
    hv_matrix: np.ndarray  # seeds x algorithms
    friedman: Optional[stats.FriedmanResult]
    nemenyi: Optional[stats.NemenyiResult]
    warnings: list[str]


def _seed_of(run_id: str) -> int:
    tail = run_id.rsplit("seed", 1)[-1]
    return int(tail)


def compare(run_dirs, alpha: float = 0.05) -> list[ComparisonResult]:
    """Cross-algorithm comparison over shared (problem, seed) cells.

    Hypervolumes come straight from the metric CSVs; the binary indicators
    are recomputed against the combined per-seed reference front built from
    the stored merged-front files (no problem re-evaluation).  Statistics
    run on the hypervolume matrix when at least two seeds are shared.
    """
    run_dirs = [Path(d) for d in run_dirs]
    reports = []
    for d in run_dirs:
        metrics = d / "metrics.csv"
        if not metrics.exists():
            raise FileNotFoundError(f"{d} has no metrics.csv")
        reports.extend(read_metric_csv(metrics))

    by_problem: dict = {}
    front_dir: dict = {}
    for d in run_dirs:
        for front_path in d.glob("*/*/seed*/front.csv"):
            label, problem, seed_name = front_path.parts[-4:-1]
            front_dir[(label, problem, int(seed_name.removeprefix("seed")))] = front_path
    for report in reports:
        by_problem.setdefault(report.problem, []).append(report)

    results = []
    for problem_name, rows in sorted(by_problem.items()):
        algorithms = sorted({r.algorithm for r in rows})
        if len(algorithms) < 2:
            raise ValueError(
                f"problem {problem_name}: need at least 2 algorithms to compare")
        seeds_by_algo = {
            a: {_seed_of(r.run_id) for r in rows if r.algorithm == a}
            for a in algorithms
        }
        shared = sorted(set.intersection(*seeds_by_algo.values()))
        missing = [
            f"{a}:seed{s}"
            for a in algorithms
            for s in sorted(set.union(*seeds_by_algo.values()) - seeds_by_algo[a])
        ]
        if missing:
            raise ValueError(
                f"problem {problem_name}: mismatched seed sets; missing cells: "
                + ", ".join(missing))

        hv = {(r.algorithm, _seed_of(r.run_id)): r.hv for r in rows}
        per_algo_metrics: dict = {a: {m: [] for m in ("hv", "gd", "igd", "eps", "i_c", "c_metric")}
                                  for a in algorithms}
        for seed in shared:
            fronts = {}
            for a in algorithms:
                path = front_dir.get((a, problem_name, seed))
                if path is None:
                    raise FileNotFoundError(
                        f"missing front.csv for {a}/{problem_name}/seed{seed}")
                fronts[a] = load_front_csv(path)
            pool = np.vstack([f for f in fronts.values() if len(f)])
            combined = pool[non_dominated_mask(pool, sense="min")]
            cardinality = cardinality_metrics(fronts)
            for a in algorithms:
                front = fronts[a]
                per_algo_metrics[a]["hv"].append(hv[(a, seed)])
                per_algo_metrics[a]["gd"].append(gd(front, combined) if len(front) else np.nan)
                per_algo_metrics[a]["igd"].append(igd(front, combined) if len(front) else np.nan)
                per_algo_metrics[a]["eps"].append(
                    additive_epsilon(front, combined) if len(front) else np.nan)
                i_c, c_m = cardinality[a]
                per_algo_metrics[a]["i_c"].append(i_c)
                per_algo_metrics[a]["c_metric"].append(c_m)

        table = {
            a: {m: (float(np.mean(v)), float(np.std(v)))
                for m, v in per_algo_metrics[a].items()}
            for a in algorithms
        }
        hv_matrix = np.array([[hv[(a, s)] for a in algorithms] for s in shared])
        warnings = []
        fr = nem = None
        if len(shared) >= 2:
            fr = stats.friedman(hv_matrix)
            nem = stats.nemenyi(hv_matrix, alpha=alpha)
        else:
            warnings.append("single shared seed: statistics skipped")
        results.append(ComparisonResult(
            problem=problem_name, algorithms=algorithms, seeds=shared,
            table=table, hv_matrix=hv_matrix, friedman=fr, nemenyi=nem,
            warnings=warnings))
    return results


def write_comparison(results: list[ComparisonResult], out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for res in results:
        with open(out / f"comparison_{res.problem}.csv", "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["algorithm", "metric", "mean", "std"])
            for a in res.algorithms:
                for metric, (mean, std) in res.table[a].items():
                    writer.writerow([a, metric, _fmt(mean), _fmt(std)])
        if res.nemenyi is not None:
            stats.write_significance_csv(
                res.nemenyi, res.algorithms, out / f"significance_{res.problem}.csv")
            with open(out / f"friedman_{res.problem}.csv", "w", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(["statistic", "p_value"])
                writer.writerow([_fmt(res.friedman.statistic), _fmt(res.friedman.p_value)])
    return out
