"""Command-line entry points.

Subcommands:
  tune       run an experiment described by a JSON config file
  generate   emit a synthetic subject-structured dataset as CSV
  report     compare two finished run directories
  bench      run an optimizer against an analytic benchmark function

Exit status is 0 on success and nonzero on any abort; partial trial logs
stay valid.
"""
from __future__ import annotations

import argparse
import json
import sys

from .data import synth_generate, write_csv
from .errors import SwarmTuneError
from .experiment import OPTIMIZERS, ExperimentConfig
from .runner import render_compare_table, report_compare, run_tune


def _add_tune(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("tune", help="run an experiment config")
    p.add_argument("--config", required=True, help="path to the JSON experiment config")
    p.add_argument("--seed", type=int, default=None, help="override master_seed")
    p.add_argument("--workers", type=int, default=None, help="override parallelism degree")
    p.add_argument("--out", default=None, help="override output directory")
    p.add_argument("--optimizer", choices=OPTIMIZERS, default=None, help="override optimizer")


def _add_generate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("generate", help="emit a synthetic dataset CSV")
    p.add_argument("--out", required=True, help="destination CSV path")
    p.add_argument("--subjects", type=int, default=40)
    p.add_argument("--windows", type=int, default=20)
    p.add_argument("--features", type=int, default=30)
    p.add_argument("--informative", type=int, default=6)
    p.add_argument("--class-sep", type=float, default=1.0)
    p.add_argument("--subject-sd", type=float, default=0.5)
    p.add_argument("--positive-fraction", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)


def _add_report(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("report", help="compare two run directories")
    p.add_argument("run_a")
    p.add_argument("run_b")
    p.add_argument("--out", default=None, help="directory for compare.json/compare.txt")


def _add_bench(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("bench", help="optimize an analytic benchmark function")
    p.add_argument("--optimizer", choices=("pso", "ga", "hybrid"), default="pso")
    p.add_argument("--benchmark", choices=("sphere", "rastrigin", "rosenbrock"), default="sphere")
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory for the run")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmtune", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_tune(sub)
    _add_generate(sub)
    _add_report(sub)
    _add_bench(sub)
    return parser


def _cmd_tune(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config)
    config = config.override(
        master_seed=args.seed,
        workers=args.workers,
        out_dir=args.out,
        optimizer=args.optimizer,
    )
    summary = run_tune(config)
    best = summary["winner"]
    print(f"run complete: {config.out_dir}")
    print(f"best objective: {best['objective']}")
    print(f"best configuration: {json.dumps(best['configuration'], sort_keys=True)}")
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    dataset = synth_generate(
        n_subjects=args.subjects,
        windows_per_subject=args.windows,
        n_features=args.features,
        n_informative=args.informative,
        class_sep=args.class_sep,
        subject_effect_sd=args.subject_sd,
        positive_fraction=args.positive_fraction,
        seed=args.seed,
    )
    write_csv(dataset, args.out)
    print(f"wrote {dataset.n_rows} rows x {dataset.n_features} features to {args.out}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    comparison = report_compare(args.run_a, args.run_b)
    table = render_compare_table(comparison)
    print(table)
    if args.out:
        from pathlib import Path

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "compare.json", "w", encoding="utf-8") as fh:
            json.dump(comparison, fh, sort_keys=True, indent=2)
            fh.write("\n")
        with open(out / "compare.txt", "w", encoding="utf-8") as fh:
            fh.write(table + "\n")
        print(f"wrote comparison to {out}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_dict(
        {
            "dataset": {"benchmark": {"kind": args.benchmark, "dims": args.dims}},
            "optimizer": args.optimizer,
            "master_seed": args.seed,
            "workers": args.workers,
            "out_dir": args.out,
        }
    )
    summary = run_tune(config)
    trace = summary["trace"]
    print(f"{args.optimizer} on {args.benchmark} ({args.dims}d), best per generation:")
    for gen, value in enumerate(trace):
        print(f"  gen {gen:3d}  best {value:.3e}")
    print(f"final best value: {summary['winner']['objective']:.6e}")
    return 0


_COMMANDS = {
    "tune": _cmd_tune,
    "generate": _cmd_generate,
    "report": _cmd_report,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SwarmTuneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
