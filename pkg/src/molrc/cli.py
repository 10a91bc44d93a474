"""Command-line front end.

Subcommands: simulate (trace CSV), analyze (eigenvalue/period JSON), trial
(single-trial JSON), bench (full benchmark JSON), sweep (grid over one
config key, CSV of cell means). Every artifact embeds the resolved config
and seed so outputs are self-describing, and all numeric formatting is
locale-independent; equal inputs give byte-identical files.

Exit status: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from . import __version__
from .analysis import eigen_closed_form, sustained_substrate_level
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .reactor import write_trace_csv
from .tasks import BenchmarkStats, run_benchmark, run_trial, simulate_trial, trial_seed


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="molrc", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"molrc {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def common(p, seed=False, trials=False, mode_task=False):
        p.add_argument("--config", metavar="PATH", help="JSON config file (default: built-in)")
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        if seed:
            p.add_argument("--seed", type=int, metavar="N",
                           help="trial seed (default: config master_seed)")
        if trials:
            p.add_argument("--trials", type=int, metavar="N",
                           help="number of trials (default: config n_trials)")
        if mode_task:
            p.add_argument("--mode", choices=("product_only", "product_and_substrate"))
            p.add_argument("--task", choices=("A", "B"))

    p = sub.add_parser("simulate", help="integrate one driven trial, emit the trace CSV")
    common(p, seed=True)

    p = sub.add_parser("analyze", help="closed-form eigenvalues and period at the sustained level")
    common(p)

    p = sub.add_parser("trial", help="run one trial, emit its result JSON")
    common(p, seed=True, mode_task=True)

    p = sub.add_parser("bench", help="run the full 4-cell benchmark, emit stats JSON")
    common(p, trials=True)
    p.add_argument("--csv", metavar="PATH", help="also write per-trial results as CSV")

    p = sub.add_parser("sweep", help="grid over one config key, emit cell means CSV")
    common(p, trials=True)
    p.add_argument("--key", required=True, metavar="KEY", help="config key to sweep")
    p.add_argument("--values", required=True, metavar="V1,V2,...",
                   help="comma-separated values for the key")
    return parser


def _load(args) -> ExperimentConfig:
    if args.config:
        return load_config(args.config)
    return ExperimentConfig()


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _cmd_simulate(args) -> int:
    config = _load(args)
    seed = args.seed if args.seed is not None else config.master_seed
    trace, profile = simulate_trial(config, seed)
    buf = io.StringIO()
    write_trace_csv(trace, profile, buf, metadata={
        "config": json.dumps(config.to_dict()),
        "seed": seed,
    })
    _emit(buf.getvalue(), args.out)
    return 0


def _cmd_analyze(args) -> int:
    config = _load(args)
    s_star = sustained_substrate_level(config.reactor)
    eig = eigen_closed_form(config.reactor, (s_star, s_star, s_star))
    _emit(_json_text({
        "lambda1": eig.lambda1,
        "re23": eig.lambda23_real,
        "im23": eig.lambda23_imag,
        "period_s": eig.period,
        "regime": eig.regime,
        "sustained_substrate_nM": s_star,
        "config": config.to_dict(),
    }), args.out)
    return 0


def _cmd_trial(args) -> int:
    config = _load(args)
    overrides = {}
    if args.mode:
        overrides["mode"] = args.mode
    if args.task:
        overrides["task"] = args.task
    if overrides:
        config = config_from_dict({**config.to_dict(), **overrides})
    seed = args.seed if args.seed is not None else config.master_seed
    result = run_trial(config, seed)
    _emit(_json_text({
        "seed": result.seed,
        "mode": result.mode,
        "task": result.task,
        "nrmse_train": result.nrmse_train,
        "nrmse_test": result.nrmse_test,
        "untrained_rmse_ratio": result.untrained_rmse_ratio,
        "config": config.to_dict(),
    }), args.out)
    return 0


def _bench_payload(stats: BenchmarkStats, config: ExperimentConfig) -> dict:
    return {
        "n_trials": stats.n_trials,
        "master_seed": stats.master_seed,
        "cells": [
            {"mode": c.mode, "task": c.task, "mean": c.mean, "std": c.std,
             "per_trial": list(c.per_trial)}
            for c in stats.cells
        ],
        "config": config.to_dict(),
    }


def _cmd_bench(args) -> int:
    config = _load(args)
    stats = run_benchmark(config, args.trials)
    _emit(_json_text(_bench_payload(stats, config)), args.out)
    if args.csv:
        lines = [f"# config: {json.dumps(config.to_dict())}",
                 f"# master_seed: {config.master_seed}",
                 "seed,mode,task,nrmse_train,nrmse_test"]
        seeds = [trial_seed(config.master_seed, i) for i in range(stats.n_trials)]
        for cell in stats.cells:
            for i, (train, test) in enumerate(zip(cell.per_trial_train, cell.per_trial)):
                lines.append(
                    f"{seeds[i]},{cell.mode},{cell.task},{train:.9g},{test:.9g}")
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def _cmd_sweep(args) -> int:
    config = _load(args)
    base = config.to_dict()
    if args.key not in base or args.key in ("reactor", "initial"):
        raise ConfigError(f"cannot sweep config key {args.key!r}")
    values = []
    for raw in args.values.split(","):
        raw = raw.strip()
        try:
            values.append(json.loads(raw))
        except json.JSONDecodeError:
            values.append(raw)
    lines = [f"# config: {json.dumps(base)}",
             f"# master_seed: {config.master_seed}",
             f"{args.key},mode,task,mean_nrmse_test,std_nrmse_test"]
    for value in values:
        swept = config_from_dict({**base, args.key: value})
        stats = run_benchmark(swept, args.trials)
        for cell in stats.cells:
            lines.append(f"{value},{cell.mode},{cell.task},{cell.mean:.9g},{cell.std:.9g}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "analyze": _cmd_analyze,
    "trial": _cmd_trial,
    "bench": _cmd_bench,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
