"""Command-line entry point: ``elpmeans run | bench | metrics``.

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 degenerate input.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys

from .errors import ConfigError, DataError, ELPMeansError
from .graph import GroundTruth
from .metrics import evaluate
from .output import dump_json, parse_communities
from .pipeline import PRESETS, RunConfig, run_benchmark, run_pipeline

# CLI flag -> RunConfig field
RUN_FLAGS = {
    "edges": "edges_path",
    "labels": "labels_path",
    "dim": "dim",
    "num_walks": "walks_per_node",
    "walk_length": "walk_length",
    "k": "k",
    "window": "window",
    "epochs": "epochs",
    "negative": "negative",
    "lr": "lr",
    "min_lr": "min_lr",
    "sigma_mult": "sigma_multiplier",
    "max_iter": "max_iter",
    "tol": "tol",
    "seed": "seed",
    "out": "out_dir",
}


def parse_seeds(text: str) -> list[int]:
    """``"1..10"``, ``"1,2,5"`` or a mix like ``"1..3,7"``."""
    seeds: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise ConfigError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        elif re.fullmatch(r"-?\d+", part):
            seeds.append(int(part))
        else:
            raise ConfigError(f"bad seed spec {part!r}")
    if not seeds:
        raise ConfigError("seed list is empty")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elpmeans", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="detect communities in one graph")
    run.add_argument("--preset", choices=sorted(PRESETS), help="dataset fixture and its default parameters")
    run.add_argument("--config", help="replay the config echoed in a run.json")
    run.add_argument("--data-dir", action="append", default=[], help="extra directory searched for fixtures")
    run.add_argument("--edges")
    run.add_argument("--labels")
    run.add_argument("--dim", type=int)
    run.add_argument("--num-walks", type=int)
    run.add_argument("--walk-length", type=int)
    group = run.add_mutually_exclusive_group()
    group.add_argument("--k", type=int)
    group.add_argument("--auto-k", action="store_true", default=None)
    run.add_argument("--window", type=int)
    run.add_argument("--epochs", type=int)
    run.add_argument("--negative", type=int)
    run.add_argument("--lr", type=float)
    run.add_argument("--min-lr", type=float)
    run.add_argument("--sigma-mult", type=float)
    run.add_argument("--max-iter", type=int)
    run.add_argument("--tol", type=float)
    run.add_argument("--baseline", action="store_true", default=None, help="also run random-init k-means")
    run.add_argument("--no-svg", action="store_true")
    run.add_argument("--dump-walks", action="store_true", default=None)
    run.add_argument("--dump-embedding", action="store_true", default=None)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")

    bench = sub.add_parser("bench", help="multi-seed benchmark over preset datasets")
    bench.add_argument("--presets", default="all", help="'all' or comma-separated preset names")
    bench.add_argument("--seeds", default="1..10")
    bench.add_argument("--data-dir", action="append", default=[])
    bench.add_argument("--out", required=True)

    metrics = sub.add_parser("metrics", help="score a communities file against labels")
    metrics.add_argument("--pred", required=True, help="name<TAB>community file")
    metrics.add_argument("--truth", required=True, help="name<TAB>label file")
    return parser


def config_from_args(args) -> RunConfig:
    overrides = {field: getattr(args, flag) for flag, field in RUN_FLAGS.items() if getattr(args, flag) is not None}
    for flag in ("baseline", "dump_walks", "dump_embedding"):
        if getattr(args, flag):
            overrides[flag] = True
    if args.no_svg:
        overrides["svg"] = False
    if args.auto_k:
        overrides.update(auto_k=True, k=None)
    elif "k" in overrides:
        overrides["auto_k"] = False

    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            base = RunConfig.from_dict(json.load(fh)).to_dict()
        base.update(overrides)
        config = RunConfig(**base)
    elif args.preset:
        config = RunConfig.from_preset(args.preset, args.data_dir, **overrides)
    else:
        for flag in ("edges", "dim", "num_walks", "walk_length", "seed", "out"):
            if getattr(args, flag) is None:
                raise ConfigError(f"--{flag.replace('_', '-')} is required without --preset/--config")
        config = RunConfig(**overrides)
    return config.validate()


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return parse_communities(fh)


def cmd_metrics(args) -> int:
    pred = _read_lines(args.pred)
    truth = _read_lines(args.truth)
    if set(pred) != set(truth):
        missing = sorted(set(pred) ^ set(truth))
        raise DataError(f"node sets differ, e.g. {missing[:5]}")
    names = sorted(truth)
    report = evaluate(
        GroundTruth.from_labels([pred[n] for n in names]),
        GroundTruth.from_labels([truth[n] for n in names]),
    )
    sys.stdout.write(dump_json(report.to_dict()))
    return 0


def cmd_run(args) -> int:
    report = run_pipeline(config_from_args(args))
    summary = {"k": report.detection.centers.k, "centers": report.center_names, "out_dir": report.config.out_dir}
    if report.metrics:
        summary.update(acc_pairwise=report.metrics.acc, nmi=report.metrics.nmi)
    if report.baseline_metrics:
        summary["baseline_acc_pairwise"] = report.baseline_metrics.acc
    sys.stdout.write(dump_json(summary))
    return 0


def cmd_bench(args) -> int:
    seeds = parse_seeds(args.seeds)
    names = list(PRESETS) if args.presets == "all" else [p.strip() for p in args.presets.split(",") if p.strip()]
    rows = run_benchmark(names, seeds, out_dir=args.out, data_dirs=args.data_dir)
    for row in rows:
        print(f"{row['dataset']}: ACC {row['acc_median']:.4f} (IQR {row['acc_iqr']:.4f}), NMI {row['nmi_median']:.4f} (IQR {row['nmi_iqr']:.4f})")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    handler = {"run": cmd_run, "bench": cmd_bench, "metrics": cmd_metrics}[args.command]
    try:
        return handler(args)
    except ELPMeansError as exc:
        print(f"elpmeans: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"elpmeans: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
