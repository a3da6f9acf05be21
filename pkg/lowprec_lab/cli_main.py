#!/usr/bin/env python3
"""
Command-line entry point for lowprec-lab.

Commands:
    run          one quantised training run: run.csv, summary.txt, plot_run.py
    sweep        one run per mantissa length plus sweep_summary.csv
    bounds       evaluate the Adam or Muon bound from a .params file
    lemmas       randomised certification of the supporting inequalities
    dataset gen  export the synthetic classification dataset
    configs      list the bundled configurations

Exit codes: 0 ok, 1 lemma violation, 2 configuration error, 3 runtime
error, 4 violated bound precondition.

Integration points:
    - Uses RunConfigLoader for `section.key = value` files and overrides
    - Uses ConfigLibrary to resolve bare config names
"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .configs import ConfigLibrary
from .constants import EXIT_CONFIG, EXIT_LEMMA_VIOLATION, EXIT_OK, EXIT_PRECONDITION, EXIT_RUNTIME
from .errors import ConfigError, LabError, PreconditionViolated
from .problems.dataset import export_dataset, make_synthetic_dataset
from .run_config import CliConfig, dotted_overrides, load_bound_params, load_run_config
from .theory.adam_bound import adam_bound, adam_bound_detailed, adam_schedule_grid
from .theory.lemmas import LEMMAS, check_lemma_suite
from .theory.muon_bound import muon_bound, muon_schedule_grid
from .training.loop import run_training, sweep
from .training.telemetry import write_records, write_summary, write_sweep_summary

logger = logging.getLogger("lowprec_lab")

PLOT_SCRIPT = '''\
"""Plot loss and gradient norm of {records}. Requires matplotlib."""

import csv

import matplotlib.pyplot as plt

with open("{records}", newline="") as f:
    rows = list(csv.DictReader(f))

t = [int(r["t"]) for r in rows]
fig, (ax_loss, ax_grad) = plt.subplots(1, 2, figsize=(10, 4))
ax_loss.semilogy(t, [float(r["loss"]) for r in rows])
ax_loss.set_xlabel("iteration")
ax_loss.set_ylabel("loss")
ax_grad.semilogy(t, [float(r["grad_norm_F"]) for r in rows])
ax_grad.set_xlabel("iteration")
ax_grad.set_ylabel("gradient norm (Frobenius)")
fig.tight_layout()
fig.savefig("run.png", dpi=150)
'''


def _configure_logging(verbosity: int) -> None:
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbosity, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _resolve(name: str) -> Path:
    try:
        return ConfigLibrary().resolve(name)
    except FileNotFoundError as e:
        raise ConfigError(str(e)) from None


def _load_config(args: argparse.Namespace, extra: Sequence[str]) -> CliConfig:
    path = _resolve(args.config) if args.config else None
    overrides = list(args.override) + dotted_overrides(list(extra))
    config = load_run_config(path, overrides, args.seed)
    if args.out:
        config = replace(config, output_dir=args.out)
    return config


def cmd_run(args: argparse.Namespace, extra: Sequence[str]) -> int:
    config = _load_config(args, extra)
    result = run_training(config.train)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = write_records(result.records, out / f"run.{config.format}", config.format)
    write_summary(result, out / "summary.txt")
    (out / "plot_run.py").write_text(PLOT_SCRIPT.format(records=records.name))
    print(f"tail_grad_norm = {result.tail_grad_norm!r}")
    print(f"wrote {records} ({len(result.records)} rows)")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, extra: Sequence[str]) -> int:
    if args.mantissas is not None:
        args.override = list(args.override) + [f"sweep.mantissas={args.mantissas}"]
    config = _load_config(args, extra)
    results = sweep(config.train, config.mantissas, config.sweep_components, config.sweep_workers)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for M, result in zip(config.mantissas, results):
        write_records(result.records, out / f"run_M{M}.{config.format}", config.format)
        print(f"M={M:2d} tail_grad_norm = {result.tail_grad_norm!r}")
    summary = write_sweep_summary(config.mantissas, results, out / "sweep_summary.csv")
    print(f"wrote {summary}")
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace, extra: Sequence[str]) -> int:
    params = load_bound_params(_resolve(args.params), list(args.override) + dotted_overrides(list(extra)))
    if args.grid:
        Ts = params.grid or (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)
        grid = adam_schedule_grid if params.kind == "adam" else muon_schedule_grid
        print(f"{'T':>10} {'total':>24} {'normalized':>24}")
        for row in grid(Ts, params.input):
            print(f"{row['T']:>10d} {row['total']!r:>24} {row['normalized']!r:>24}")
        return EXIT_OK

    if params.kind == "adam":
        report = adam_bound_detailed(params.input) if args.detailed else adam_bound(params.input)
    else:
        report = muon_bound(params.input)
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_lemmas(args: argparse.Namespace, extra: Sequence[str]) -> int:
    report = check_lemma_suite(seed=args.seed, trials=args.trials, names=args.lemma or None)
    for r in report.results:
        print(f"{r.name:<26} trials={r.trials:<6d} max_ratio={r.max_ratio:<12.6g} violations={r.violations}")
    if not report.passed:
        failed = [r.name for r in report.results if not r.passed]
        print(f"Error: violated lemmas: {', '.join(failed)}", file=sys.stderr)
        return EXIT_LEMMA_VIOLATION
    return EXIT_OK


def cmd_dataset_gen(args: argparse.Namespace, extra: Sequence[str]) -> int:
    config = _load_config(args, extra)
    dataset = make_synthetic_dataset(config.train.problem)
    path = Path(args.path) if args.path else Path(config.output_dir) / "dataset.bin"
    path.parent.mkdir(parents=True, exist_ok=True)
    export_dataset(dataset, path)
    print(f"wrote {path} ({dataset.size} samples, {dataset.num_features} features)")
    return EXIT_OK


def cmd_configs(args: argparse.Namespace, extra: Sequence[str]) -> int:
    library = ConfigLibrary()
    for path in library.discover_files():
        print(path.stem if path.suffix == ".cfg" else path.name)
    return EXIT_OK


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, help="Config file or bundled config name")
    parser.add_argument("--out", type=str, help="Output directory (default: output.dir)")
    parser.add_argument("--seed", type=int, help="Master seed (overrides train.seed)")
    parser.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="Config override, repeatable; --section.key=value also works")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="More log output on stderr (-v info, -vv debug)")

    parser = argparse.ArgumentParser(prog="lowprec-lab",
                                     description="Low-precision Adam and Muon laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="Run one quantised training")
    _add_run_options(run)
    run.set_defaults(handler=cmd_run)

    sweep_p = sub.add_parser("sweep", parents=[common], help="Mantissa-length sweep")
    _add_run_options(sweep_p)
    sweep_p.add_argument("--mantissas", type=str, help="Comma-separated mantissa lengths, e.g. 4,8,16")
    sweep_p.set_defaults(handler=cmd_sweep)

    bounds = sub.add_parser("bounds", parents=[common], help="Evaluate a convergence bound")
    bounds.add_argument("--params", type=str, default="bounds_adam", help="Bound parameter file or name")
    bounds.add_argument("--grid", action="store_true", help="Print the bound along its rate schedule")
    bounds.add_argument("--detailed", action="store_true", help="Adam only: the unsimplified form")
    bounds.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    bounds.set_defaults(handler=cmd_bounds)

    lemmas = sub.add_parser("lemmas", parents=[common], help="Certify the supporting inequalities")
    lemmas.add_argument("--seed", type=int, default=0)
    lemmas.add_argument("--trials", type=int, default=10_000)
    lemmas.add_argument("--lemma", action="append", choices=list(LEMMAS), help="Restrict to a lemma, repeatable")
    lemmas.set_defaults(handler=cmd_lemmas)

    dataset = sub.add_parser("dataset", help="Dataset utilities")
    dataset_sub = dataset.add_subparsers(dest="dataset_command", required=True)
    gen = dataset_sub.add_parser("gen", parents=[common], help="Export the synthetic dataset")
    _add_run_options(gen)
    gen.add_argument("--path", type=str, help="Output file (default: <out>/dataset.bin)")
    gen.set_defaults(handler=cmd_dataset_gen)

    configs = sub.add_parser("configs", parents=[common], help="List bundled configurations")
    configs.set_defaults(handler=cmd_configs)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra and args.command in ("lemmas", "configs"):
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    _configure_logging(args.verbose)

    try:
        return args.handler(args, extra)
    except PreconditionViolated as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ConfigError, FileNotFoundError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (LabError, OSError, ValueError, ArithmeticError) as e:
        logger.debug("command failed", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
