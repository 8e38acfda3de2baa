"""Command-line entry points for running and post-processing experiments."""

from __future__ import annotations

import argparse
import csv
import glob
import json
import sys
import numpy as np

from .dbo import load_archive
from .harness import (
    ConfigError,
    ExperimentConfig,
    auc,
    hvi_curve,
    rank_from_manifests,
    resolve_reference,
    run_experiment,
    summarize_from_manifests,
    write_summary_csv,
)


def _cmd_run(args: argparse.Namespace) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    cfg = ExperimentConfig.from_dict(data)
    records = run_experiment(cfg)
    for record in records:
        print(
            f"{record.label} {record.problem} rep={record.repetition} "
            f"completed={record.n_completed} failed={record.n_failed} "
            f"valid={record.n_valid} final_hvi={record.final_hvi:.6g} "
            f"auc={record.auc_value:.6g}"
        )
    return 0


def _parse_reference(spec: str, trials, upper_bounds) -> np.ndarray | None:
    if spec == "max":
        return resolve_reference(trials, {"rule": "max-of-observations"})
    if spec == "bound-clipped":
        return resolve_reference(trials, {"rule": "bound-clipped"}, upper_bounds)
    point = [float(v) for v in spec.split(",")]
    return resolve_reference(trials, {"point": point})


def _cmd_metrics(args: argparse.Namespace) -> int:
    trials = load_archive(args.archive)
    upper_bounds = (
        [float(v) for v in args.ub.split(",")] if args.ub is not None else None
    )
    reference = _parse_reference(args.ref, trials, upper_bounds)
    series = hvi_curve(trials, reference) if reference is not None else np.empty(0)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["eval_index", "hvi"])
        for i, value in enumerate(series):
            writer.writerow([i + 1, repr(float(value))])
    finally:
        if args.out:
            out.close()
    if series.size:
        print(
            f"final_hvi={series[-1]:.6g} auc={auc(series):.6g} n={series.size}",
            file=sys.stderr,
        )
    return 0


def _expand(patterns: list[str]) -> list[str]:
    paths: list[str] = []
    for pattern in patterns:
        matches = sorted(glob.glob(pattern, recursive=True))
        paths.extend(matches if matches else [pattern])
    return paths


def _cmd_rank(args: argparse.Namespace) -> int:
    result = rank_from_manifests(_expand(args.inputs))
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        header = ["eval_index"]
        for method in result.methods:
            header += [f"{method}_mean_rank", f"{method}_stderr"]
        writer.writerow(header)
        for t in range(result.length):
            row: list = [t + 1]
            for method in result.methods:
                row += [
                    repr(float(result.mean[method][t])),
                    repr(float(result.stderr[method][t])),
                ]
            writer.writerow(row)
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    rows = summarize_from_manifests(_expand(args.inputs))
    if args.out:
        write_summary_csv(rows, args.out)
    else:
        writer = csv.DictWriter(
            sys.stdout,
            fieldnames=[
                "method",
                "workers",
                "n_runs",
                "completed",
                "failed",
                "valid",
                "final_hvi",
                "auc",
            ],
        )
        writer.writeheader()
        writer.writerows(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mobokit", description="Multi-objective black-box optimization harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("--config", required=True, help="path to the experiment JSON")
    p_run.set_defaults(func=_cmd_run)

    p_metrics = sub.add_parser("metrics", help="compute the HVI curve of an archive")
    p_metrics.add_argument("--archive", required=True, help="archive.jsonl path")
    p_metrics.add_argument(
        "--ref",
        required=True,
        help="'max', 'bound-clipped', or comma-separated reference point",
    )
    p_metrics.add_argument("--ub", help="comma-separated upper bounds (bound-clipped)")
    p_metrics.add_argument("--out", help="write CSV here instead of stdout")
    p_metrics.set_defaults(func=_cmd_metrics)

    p_rank = sub.add_parser("rank", help="average-rank runs across methods")
    p_rank.add_argument("--inputs", nargs="+", required=True, help="manifest globs")
    p_rank.add_argument("--out", help="write CSV here instead of stdout")
    p_rank.set_defaults(func=_cmd_rank)

    p_sum = sub.add_parser("summarize", help="summary table from manifests")
    p_sum.add_argument("--inputs", nargs="+", required=True, help="manifest globs")
    p_sum.add_argument("--out", help="write CSV here instead of stdout")
    p_sum.set_defaults(func=_cmd_summarize)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
