"""Experiment harness: configured runs, metric curves, rankings, summaries.

A run executes one optimizer on one problem for a repetition count,
persisting each repetition's archive as JSON lines next to its metric
curves and a manifest. Post-processing (curves, area under the curve,
cross-method rankings, summary tables) operates purely on those files and
reproduces identical outputs when re-run.
"""

from __future__ import annotations

import csv
import heapq
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .baselines import NsgaConfig, NsgaOptimizer, RandomSearch
from .dbo import (
    Agent,
    AgentConfig,
    Archive,
    Trial,
    evaluate_safely,
    run_simulated,
    run_threaded,
    save_archive,
)
from .indicators import (
    IndicatorReport,
    extract_pareto_front,
    filter_by_reference,
    gd_plus,
    hypervolume,
    igd_plus,
)
from .problems import ProblemInstance, get_problem
from .space import Configuration

OUTPUT_DIR_ENV = "MOBOKIT_OUTPUT_DIR"

OPTIMIZER_NAMES = ("d-mobo", "random", "nsga2")

_MOBO_PARAM_KEYS = {
    "n_initial",
    "upper_bounds",
    "gamma",
    "transform",
    "scalarization",
    "pbi_theta",
    "pbi_signed",
    "n_trees",
    "min_samples_split",
    "max_features",
    "bootstrap",
    "candidate_pool_size",
}
_AGENT_PARAM_KEYS = {"kappa", "decay_rate", "period"}
_NSGA_PARAM_KEYS = {
    "population_size",
    "crossover_prob",
    "mutation_prob",
    "eta_crossover",
    "eta_mutation",
}

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunRecord",
    "run_experiment",
    "resolve_reference",
    "hvi_curve",
    "gd_curve",
    "forward_fill",
    "average_ranking",
    "RankingResult",
    "auc",
    "count_trials",
    "indicator_report",
    "write_indicator_csv",
    "summarize",
    "write_summary_csv",
    "write_series_csv",
    "load_series_csv",
    "rank_from_manifests",
    "summarize_from_manifests",
]


class ConfigError(ValueError):
    """Invalid experiment configuration; raised before any run starts."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment."""

    problem: dict[str, Any]
    optimizer: dict[str, Any]
    workers: int = 1
    repetitions: int = 1
    budget: dict[str, Any] = field(default_factory=lambda: {"evaluations": 100})
    seed: int = 0
    output_dir: str = "runs"
    hvi_reference: dict[str, Any] = field(
        default_factory=lambda: {"rule": "max-of-observations"}
    )
    execution: str = "simulated"
    latency: float = 1.0
    name: str | None = None

    @property
    def label(self) -> str:
        return self.name or str(self.optimizer.get("name", "run"))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        known = {
            "problem",
            "optimizer",
            "workers",
            "repetitions",
            "budget",
            "seed",
            "output_dir",
            "hvi_reference",
            "execution",
            "latency",
            "name",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        for required in ("problem", "optimizer"):
            if required not in data or not isinstance(data[required], Mapping):
                raise ConfigError(f"config needs a {required!r} mapping with a 'name'")
            if "name" not in data[required]:
                raise ConfigError(f"{required!r} mapping needs a 'name'")
        cfg = cls(
            problem=dict(data["problem"]),
            optimizer=dict(data["optimizer"]),
            workers=int(data.get("workers", 1)),
            repetitions=int(data.get("repetitions", 1)),
            budget=dict(data.get("budget", {"evaluations": 100})),
            seed=int(data.get("seed", 0)),
            output_dir=str(data.get("output_dir", "runs")),
            hvi_reference=dict(
                data.get("hvi_reference", {"rule": "max-of-observations"})
            ),
            execution=str(data.get("execution", "simulated")),
            latency=float(data.get("latency", 1.0)),
            name=data.get("name"),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.execution not in ("simulated", "threads"):
            raise ConfigError(f"unknown execution mode {self.execution!r}")
        budget_keys = set(self.budget)
        if not budget_keys or not budget_keys <= {"evaluations", "wall_seconds"}:
            raise ConfigError("budget needs 'evaluations' and/or 'wall_seconds'")
        optimizer = str(self.optimizer.get("name", "")).lower()
        if optimizer not in OPTIMIZER_NAMES:
            raise ConfigError(
                f"unknown optimizer {self.optimizer.get('name')!r}; "
                f"choose one of {OPTIMIZER_NAMES}"
            )
        params = set(self.optimizer) - {"name"}
        if optimizer == "d-mobo":
            allowed = _MOBO_PARAM_KEYS | _AGENT_PARAM_KEYS
        elif optimizer == "nsga2":
            allowed = _NSGA_PARAM_KEYS
        else:
            allowed = set()
        bad = params - allowed
        if bad:
            raise ConfigError(f"unknown {optimizer} parameters: {sorted(bad)}")
        try:
            self.build_problem()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ref_keys = set(self.hvi_reference)
        if not (ref_keys == {"point"} or ref_keys == {"rule"}):
            raise ConfigError("hvi_reference needs exactly one of 'point' or 'rule'")
        if "rule" in self.hvi_reference and self.hvi_reference["rule"] not in (
            "max-of-observations",
            "bound-clipped",
        ):
            raise ConfigError(f"unknown reference rule {self.hvi_reference['rule']!r}")

    def build_problem(self) -> ProblemInstance:
        params = {k: v for k, v in self.problem.items() if k != "name"}
        return get_problem(self.problem["name"], **params)


@dataclass
class RunRecord:
    """Everything recorded about one repetition of a run."""

    label: str
    problem: str
    workers: int
    repetition: int
    seed: int
    archive_path: Path
    n_completed: int
    n_failed: int
    n_valid: int
    final_hvi: float
    auc_value: float
    hvi_series: np.ndarray
    gd_series: np.ndarray | None
    reference: tuple[float, ...] | None
    report: IndicatorReport | None = None
    manifest_path: Path | None = None


def resolve_reference(
    trials: Sequence[Trial],
    spec: Mapping[str, Any],
    upper_bounds: Sequence[float] | None = None,
) -> np.ndarray | None:
    """Resolve a reference-point rule against a finished archive.

    "max-of-observations" takes the componentwise maximum over finite
    trials; "bound-clipped" pins bounded components to their upper bound
    and fills the rest from the observation maximum. Returns None when no
    finite trial exists to resolve against.
    """
    if "point" in spec:
        return np.asarray(spec["point"], dtype=float)
    finite = [t.objectives for t in trials if not t.is_failure]
    if not finite:
        return None
    observed_max = np.vstack(finite).max(axis=0)
    rule = spec.get("rule", "max-of-observations")
    if rule == "max-of-observations":
        return observed_max
    if rule == "bound-clipped":
        if upper_bounds is None:
            raise ValueError("bound-clipped reference needs upper bounds")
        ub = np.asarray(upper_bounds, dtype=float)
        return np.where(np.isfinite(ub), ub, observed_max)
    raise ValueError(f"unknown reference rule {rule!r}")


def _finite_objectives(trials: Iterable[Trial]) -> np.ndarray | None:
    rows = [t.objectives for t in trials if not t.is_failure]
    if not rows:
        return None
    return np.vstack(rows)


def hvi_curve(trials: Sequence[Trial], reference: Sequence[float]) -> np.ndarray:
    """Hypervolume of the running Pareto front after each finite trial.

    Trials beyond the reference contribute nothing (they are clipped, the
    series simply repeats). The result is non-decreasing by construction.
    """
    rows = _finite_objectives(trials)
    if rows is None:
        return np.empty(0)
    ref = np.asarray(reference, dtype=float)
    front: list[np.ndarray] = []
    series = np.empty(rows.shape[0])
    value = 0.0
    for i, y in enumerate(rows):
        if np.all(y <= ref) and not any(np.all(f <= y) for f in front):
            front = [f for f in front if not np.all(y <= f)]
            front.append(y)
            value = max(value, hypervolume(np.vstack(front), ref))
        series[i] = value
    return series


def gd_curve(trials: Sequence[Trial], targets: np.ndarray) -> np.ndarray:
    """GD+ of the running Pareto front to a target set, per finite trial."""
    rows = _finite_objectives(trials)
    if rows is None:
        return np.empty(0)
    front: list[np.ndarray] = []
    series = np.empty(rows.shape[0])
    value = np.nan
    for i, y in enumerate(rows):
        if not any(np.all(f <= y) for f in front):
            front = [f for f in front if not np.all(y <= f)]
            front.append(y)
            value = gd_plus(np.vstack(front), targets)
        series[i] = value
    return series


def forward_fill(series: np.ndarray, length: int) -> np.ndarray:
    """Extend a series to `length` by repeating its last value."""
    s = np.asarray(series, dtype=float)
    if s.shape[0] >= length:
        return s[:length]
    if s.shape[0] == 0:
        return np.zeros(length)
    return np.concatenate([s, np.full(length - s.shape[0], s[-1])])


def auc(series: Sequence[float], budget: int | None = None) -> float:
    """Trapezoidal integral of a series over the normalized index [0, 1]."""
    values = np.asarray(series, dtype=float)
    if budget is not None:
        values = values[:budget]
    if values.shape[0] == 0:
        raise ValueError("auc of an empty series is undefined")
    if values.shape[0] == 1:
        return float(values[0])
    x = np.linspace(0.0, 1.0, values.shape[0])
    return float(np.sum((values[1:] + values[:-1]) / 2.0 * np.diff(x)))


def _average_ranks_desc(values: np.ndarray) -> np.ndarray:
    # Higher value -> better -> smaller rank; ties share the average rank.
    order = np.argsort(-values, kind="stable")
    ranks = np.empty(values.shape[0])
    i = 0
    while i < order.shape[0]:
        j = i
        while j + 1 < order.shape[0] and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


@dataclass(frozen=True)
class RankingResult:
    methods: tuple[str, ...]
    mean: dict[str, np.ndarray]
    stderr: dict[str, np.ndarray]
    n_runs: int
    length: int


def average_ranking(
    series_by_method: Mapping[str, Sequence[np.ndarray]],
    length: int | None = None,
) -> RankingResult:
    """Average per-run ranks of aligned metric curves across methods.

    Series are aligned by list position (one entry per task/repetition,
    consistently ordered across methods) and forward-filled to a common
    grid. At each grid point the methods are ranked per run (rank 1 best,
    ties averaged) and the ranks averaged over runs; the band half-width
    is 1.96 standard errors.
    """
    methods = tuple(series_by_method)
    if len(methods) < 2:
        raise ValueError("ranking needs at least two methods")
    run_counts = {m: len(series_by_method[m]) for m in methods}
    if len(set(run_counts.values())) != 1:
        raise ValueError(f"methods disagree on run counts: {run_counts}")
    n_runs = run_counts[methods[0]]
    if n_runs == 0:
        raise ValueError("ranking needs at least one run per method")
    grid = length or max(
        int(np.shape(s)[0]) for m in methods for s in series_by_method[m]
    )
    filled = {
        m: np.vstack([forward_fill(np.asarray(s), grid) for s in series_by_method[m]])
        for m in methods
    }
    ranks = np.empty((n_runs, len(methods), grid))
    for r in range(n_runs):
        values = np.vstack([filled[m][r] for m in methods])
        for t in range(grid):
            ranks[r, :, t] = _average_ranks_desc(values[:, t])
    mean = {m: ranks[:, i, :].mean(axis=0) for i, m in enumerate(methods)}
    if n_runs > 1:
        stderr = {
            m: ranks[:, i, :].std(axis=0, ddof=1) / np.sqrt(n_runs)
            for i, m in enumerate(methods)
        }
    else:
        stderr = {m: np.zeros(grid) for m in methods}
    return RankingResult(methods, mean, stderr, n_runs, grid)


def indicator_report(
    trials: Sequence[Trial],
    reference: Sequence[float] | None,
    targets: np.ndarray | None = None,
    reference_rule: str | None = None,
    target_source: str | None = None,
) -> IndicatorReport:
    """Final-front indicator values of an archive, with provenance."""
    rows = _finite_objectives(trials)
    if rows is None:
        return IndicatorReport(
            reference=tuple(map(float, reference)) if reference is not None else None,
            reference_rule=reference_rule,
            target_source=target_source,
        )
    front = extract_pareto_front(rows)
    hvi = None
    clipped = 0
    if reference is not None:
        _, clipped = filter_by_reference(front, reference)
        hvi = hypervolume(front, reference)
    gd = gd_plus(front, targets) if targets is not None else None
    igd = igd_plus(front, targets) if targets is not None else None
    return IndicatorReport(
        hvi=hvi,
        gd_plus=gd,
        igd_plus=igd,
        reference=tuple(map(float, reference)) if reference is not None else None,
        reference_rule=reference_rule,
        target_source=target_source,
        clipped_points=clipped,
    )


def write_indicator_csv(report: IndicatorReport, path: str | Path) -> None:
    data = report.to_dict()
    reference = data.pop("reference")
    data["reference"] = " ".join(repr(v) for v in reference) if reference else ""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(data))
        writer.writeheader()
        writer.writerow(data)


def count_trials(
    trials: Sequence[Trial], upper_bounds=None
) -> tuple[int, int, int]:
    """(completed, failed, bound-valid) counts of an archive.

    Without upper bounds every completed trial counts as valid.
    """
    finite = [t.objectives for t in trials if not t.is_failure]
    failed = sum(t.is_failure for t in trials)
    if not finite:
        return 0, failed, 0
    if upper_bounds is None:
        return len(finite), failed, len(finite)
    ub = np.asarray(upper_bounds, dtype=float)
    rows = np.vstack(finite)
    return len(finite), failed, int(np.all(rows <= ub, axis=1).sum())


def summarize(records: Sequence[RunRecord]) -> list[dict[str, Any]]:
    """Per (method, workers) means of counts, final HVI, and AUC."""
    groups: dict[tuple[str, int], list[RunRecord]] = {}
    for record in records:
        groups.setdefault((record.label, record.workers), []).append(record)
    rows = []
    for (label, workers), members in sorted(groups.items()):
        rows.append(
            {
                "method": label,
                "workers": workers,
                "n_runs": len(members),
                "completed": float(np.mean([m.n_completed for m in members])),
                "failed": float(np.mean([m.n_failed for m in members])),
                "valid": float(np.mean([m.n_valid for m in members])),
                "final_hvi": float(np.mean([m.final_hvi for m in members])),
                "auc": float(np.mean([m.auc_value for m in members])),
            }
        )
    return rows


def write_summary_csv(rows: Sequence[Mapping[str, Any]], path: str | Path) -> None:
    fields = ["method", "workers", "n_runs", "completed", "failed", "valid", "final_hvi", "auc"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def write_series_csv(
    path: str | Path, hvi: np.ndarray, gd: np.ndarray | None = None
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["eval_index", "hvi"] + (["gd_plus"] if gd is not None else [])
        writer.writerow(header)
        for i, value in enumerate(hvi):
            row = [i + 1, repr(float(value))]
            if gd is not None:
                row.append(repr(float(gd[i])))
            writer.writerow(row)


def load_series_csv(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                columns[name].append(float(value))
    return {name: np.asarray(vals) for name, vals in columns.items()}


# ---------------------------------------------------------------------------
# Execution


def _coordinator_simulated(
    optimizer,
    func,
    n_workers: int,
    archive: Archive,
    *,
    max_trials: int | None,
    max_time: float | None,
    latency: float,
) -> None:
    # Mirrors the agent scheduler with one shared ask/tell state.
    launched = 0
    steps = [0] * n_workers
    heap: list[tuple[float, int, Configuration, Any, float]] = []

    def can_launch(now: float) -> bool:
        if max_trials is not None and launched >= max_trials:
            return False
        if max_time is not None and now >= max_time:
            return False
        return True

    def launch(slot: int, now: float) -> None:
        nonlocal launched
        config = optimizer.ask()
        objectives = evaluate_safely(func, config)
        heapq.heappush(heap, (now + latency, slot, config, objectives, now))
        launched += 1

    for slot in range(n_workers):
        if can_launch(0.0):
            launch(slot, 0.0)
    while heap:
        t_complete, slot, config, objectives, t_submit = heapq.heappop(heap)
        optimizer.tell(config, objectives)
        archive.append(
            Trial(
                agent_rank=slot,
                local_step=steps[slot],
                config=config,
                objectives=objectives,
                t_submit=t_submit,
                t_complete=t_complete,
                kappa_used=None,
            )
        )
        steps[slot] += 1
        if can_launch(t_complete):
            launch(slot, t_complete)


def _coordinator_threaded(
    optimizer,
    func,
    n_workers: int,
    archive: Archive,
    *,
    max_trials: int | None,
    max_seconds: float | None,
) -> None:
    start = time.monotonic()
    launched = 0
    steps = [0] * n_workers
    lock = threading.Lock()

    def loop(slot: int) -> None:
        nonlocal launched
        while True:
            with lock:
                if max_trials is not None and launched >= max_trials:
                    return
                if max_seconds is not None and time.monotonic() - start >= max_seconds:
                    return
                launched += 1
                config = optimizer.ask()
                step = steps[slot]
                steps[slot] += 1
            t_submit = time.monotonic() - start
            objectives = evaluate_safely(func, config)
            t_complete = time.monotonic() - start
            with lock:
                optimizer.tell(config, objectives)
            archive.append(
                Trial(
                    agent_rank=slot,
                    local_step=step,
                    config=config,
                    objectives=objectives,
                    t_submit=t_submit,
                    t_complete=t_complete,
                    kappa_used=None,
                )
            )

    threads = [threading.Thread(target=loop, args=(slot,)) for slot in range(n_workers)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()


def _execute(cfg: ExperimentConfig, problem: ProblemInstance, seed: int) -> list[Trial]:
    optimizer_name = str(cfg.optimizer["name"]).lower()
    params = {k: v for k, v in cfg.optimizer.items() if k != "name"}
    max_trials = cfg.budget.get("evaluations")
    wall = cfg.budget.get("wall_seconds")

    if optimizer_name == "d-mobo":
        archive = Archive()
        agent_params = {
            "kappa_mean": params.pop("kappa", 1.96),
            "decay_rate": params.pop("decay_rate", 0.25),
            "period": params.pop("period", 25),
        }
        agents = [
            Agent(
                AgentConfig(
                    rank=rank, n_agents=cfg.workers, seed_global=seed, **agent_params
                ),
                problem.space,
                problem.n_objectives,
                archive,
                **params,
            )
            for rank in range(cfg.workers)
        ]
        if cfg.execution == "simulated":
            run_simulated(
                agents,
                problem.evaluate,
                max_trials=max_trials,
                max_time=wall,
                latency=cfg.latency,
            )
        else:
            run_threaded(
                agents, problem.evaluate, max_trials=max_trials, max_seconds=wall
            )
        return archive.snapshot()

    if optimizer_name == "random":
        optimizer = RandomSearch(problem.space, random_state=seed)
    else:
        nsga_cfg = NsgaConfig(**params)
        optimizer = NsgaOptimizer(
            problem.space, problem.n_objectives, nsga_cfg, random_state=seed
        )
    archive = Archive()
    if cfg.execution == "simulated":
        _coordinator_simulated(
            optimizer,
            problem.evaluate,
            cfg.workers,
            archive,
            max_trials=max_trials,
            max_time=wall,
            latency=cfg.latency,
        )
    else:
        _coordinator_threaded(
            optimizer,
            problem.evaluate,
            cfg.workers,
            archive,
            max_trials=max_trials,
            max_seconds=wall,
        )
    return archive.snapshot()


def run_experiment(cfg: ExperimentConfig) -> list[RunRecord]:
    """Run every repetition of an experiment and persist its artifacts.

    Each repetition r runs with seed `cfg.seed + r` and writes
    archive.jsonl, metrics.csv, and manifest.json under
    `<output_dir>/<label>/<problem>/rep-<r>/`. The output directory can
    be overridden with the MOBOKIT_OUTPUT_DIR environment variable.
    """
    cfg.validate()
    problem = cfg.build_problem()
    out_root = Path(os.environ.get(OUTPUT_DIR_ENV, cfg.output_dir))
    upper_bounds = cfg.optimizer.get("upper_bounds")
    targets = None
    if problem.true_front_sampler is not None:
        targets = problem.true_front_sampler(500, np.random.default_rng(1234567))

    records = []
    for rep in range(cfg.repetitions):
        seed = cfg.seed + rep
        trials = _execute(cfg, problem, seed)
        run_dir = out_root / cfg.label / problem.name / f"rep-{rep:03d}"
        run_dir.mkdir(parents=True, exist_ok=True)
        archive_path = run_dir / "archive.jsonl"
        save_archive(trials, archive_path)

        reference = resolve_reference(trials, cfg.hvi_reference, upper_bounds)
        if reference is None:
            hvi_series = np.empty(0)
        else:
            hvi_series = hvi_curve(trials, reference)
        gd_series = gd_curve(trials, targets) if targets is not None else None
        n_completed, n_failed, n_valid = count_trials(trials, upper_bounds)
        record = RunRecord(
            label=cfg.label,
            problem=problem.name,
            workers=cfg.workers,
            repetition=rep,
            seed=seed,
            archive_path=archive_path,
            n_completed=n_completed,
            n_failed=n_failed,
            n_valid=n_valid,
            final_hvi=float(hvi_series[-1]) if hvi_series.size else 0.0,
            auc_value=auc(hvi_series) if hvi_series.size else 0.0,
            hvi_series=hvi_series,
            gd_series=gd_series,
            reference=tuple(float(v) for v in reference) if reference is not None else None,
            report=indicator_report(
                trials,
                reference,
                targets,
                reference_rule=cfg.hvi_reference.get("rule"),
                target_source="analytic-front" if targets is not None else None,
            ),
        )
        write_series_csv(run_dir / "metrics.csv", hvi_series, gd_series)
        write_indicator_csv(record.report, run_dir / "indicators.csv")
        manifest = {
            "label": record.label,
            "problem": record.problem,
            "workers": record.workers,
            "repetition": record.repetition,
            "seed": record.seed,
            "budget": cfg.budget,
            "archive": "archive.jsonl",
            "metrics": "metrics.csv",
            "reference": list(record.reference) if record.reference else None,
            "reference_rule": cfg.hvi_reference.get("rule"),
            "n_completed": record.n_completed,
            "n_failed": record.n_failed,
            "n_valid": record.n_valid,
            "final_hvi": record.final_hvi,
            "auc": record.auc_value,
        }
        manifest_path = run_dir / "manifest.json"
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        record.manifest_path = manifest_path
        records.append(record)
    return records


# ---------------------------------------------------------------------------
# File-level post-processing used by the CLI


def _load_manifest(path: Path) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def rank_from_manifests(paths: Sequence[str | Path]) -> RankingResult:
    """Average-rank the runs behind a set of manifest files by label."""
    by_method: dict[str, dict[tuple[str, int], np.ndarray]] = {}
    for raw in paths:
        path = Path(raw)
        manifest = _load_manifest(path)
        series = load_series_csv(path.parent / manifest["metrics"])["hvi"]
        key = (manifest["problem"], manifest["repetition"])
        by_method.setdefault(manifest["label"], {})[key] = series
    if len(by_method) < 2:
        raise ValueError("ranking needs manifests from at least two run labels")
    common = set.intersection(*(set(runs) for runs in by_method.values()))
    if not common:
        raise ValueError("run labels share no (problem, repetition) pairs")
    ordered = sorted(common)
    aligned = {
        label: [runs[key] for key in ordered] for label, runs in by_method.items()
    }
    return average_ranking(aligned)


def summarize_from_manifests(paths: Sequence[str | Path]) -> list[dict[str, Any]]:
    """Rebuild the summary table from persisted manifests."""
    groups: dict[tuple[str, int], list[dict[str, Any]]] = {}
    for raw in paths:
        manifest = _load_manifest(Path(raw))
        groups.setdefault((manifest["label"], manifest["workers"]), []).append(manifest)
    rows = []
    for (label, workers), members in sorted(groups.items()):
        rows.append(
            {
                "method": label,
                "workers": workers,
                "n_runs": len(members),
                "completed": float(np.mean([m["n_completed"] for m in members])),
                "failed": float(np.mean([m["n_failed"] for m in members])),
                "valid": float(np.mean([m["n_valid"] for m in members])),
                "final_hvi": float(np.mean([m["final_hvi"] for m in members])),
                "auc": float(np.mean([m["auc"] for m in members])),
            }
        )
    return rows
