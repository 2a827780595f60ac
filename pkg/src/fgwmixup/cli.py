"""Command-line front end: augmentation, pairwise distances and benchmarks.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver failure. The
FGWMIXUP_LOG environment variable (error, info or debug) sets the log level,
and every run logs its fully resolved configuration.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .augment import SIZE_POLICIES, AugmentConfig, augment_dataset
from .bench import run_infeasibility, run_timing, write_csv, write_json
from .data import load_tudataset, save_dataset
from .solver import FgwConfig, solve_fgw_relaxed, solve_fgw_strict

__all__ = ["cli_main", "main"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SOLVER = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems via exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="dataset root directory")
    parser.add_argument("--name", required=True, help="dataset name (file prefix)")
    parser.add_argument("--config", help="key=value file; flags override its values")
    parser.add_argument("--alpha", type=float, default=0.95)
    parser.add_argument("--gamma", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--max-inner-iters", type=int, default=300)
    parser.add_argument("--inner-tol", type=float, default=5e-4)


def build_parser() -> tuple[_Parser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="fgwmixup", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_aug = sub.add_parser("augment", help="synthesize mixup graphs for a dataset")
    _add_common(p_aug)
    p_aug.add_argument("--out", required=True, help="output directory")
    p_aug.add_argument("--beta-k", type=float, default=0.2)
    p_aug.add_argument("--ratio", type=float, default=0.25)
    p_aug.add_argument("--size-policy", choices=SIZE_POLICIES, default="adaptive")
    p_aug.add_argument("--solver", choices=("strict", "accel"), default="accel")
    p_aug.add_argument("--format", choices=("tud", "jsonl"), default="tud")

    p_dist = sub.add_parser("distance", help="FGW distance between two graphs")
    _add_common(p_dist)
    p_dist.add_argument("--i", type=int, required=True)
    p_dist.add_argument("--j", type=int, required=True)
    p_dist.add_argument("--solver", choices=("strict", "accel"), default="strict")

    p_inf = sub.add_parser("bench-infeasibility",
                           help="compare strict and relaxed solvers on random pairs")
    _add_common(p_inf)
    p_inf.add_argument("--pairs", type=int, default=1000)
    p_inf.add_argument("--out", default=".", help="report directory")

    p_tim = sub.add_parser("bench-timing",
                           help="compare mixup modes on identical problems")
    _add_common(p_tim)
    p_tim.add_argument("--pairs", type=int, default=50)
    p_tim.add_argument("--beta-k", type=float, default=0.2)
    p_tim.add_argument("--out", default=".", help="report directory")

    subparsers = {
        "augment": p_aug,
        "distance": p_dist,
        "bench-infeasibility": p_inf,
        "bench-timing": p_tim,
    }
    return parser, subparsers


def _load_config_file(path: str) -> dict[str, str]:
    text = Path(path).read_text()
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: _Parser, subparser: argparse.ArgumentParser,
                  argv: list[str], args: argparse.Namespace):
    """Re-parse with config-file values as defaults so flags keep priority."""
    values = _load_config_file(args.config)
    actions = {action.dest: action for action in subparser._actions}
    defaults = {}
    for key, raw in values.items():
        action = actions.get(key)
        if action is None:
            raise _UsageError(f"unknown config key {key!r} for command {args.command}")
        convert = action.type or str
        defaults[key] = convert(raw)
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _solver_config(args: argparse.Namespace) -> FgwConfig:
    return FgwConfig(alpha=args.alpha, gamma=args.gamma,
                     max_inner_iters=args.max_inner_iters, inner_tol=args.inner_tol)


def _cmd_augment(args) -> int:
    ds = load_tudataset(args.data, args.name)
    cfg = AugmentConfig(
        beta_k=args.beta_k,
        mixup_ratio=args.ratio,
        alpha=args.alpha,
        size_policy=args.size_policy,
        accelerated=args.solver == "accel",
        seed=args.seed,
        gamma=args.gamma,
        max_inner_iters=args.max_inner_iters,
        inner_tol=args.inner_tol,
        workers=args.workers,
    )
    augmented = augment_dataset(ds.graphs, cfg, num_classes=ds.class_count)
    save_dataset(augmented, args.out, fmt=args.format, name=args.name)
    logger.info("wrote %d graphs (%d originals + %d mixups) to %s",
                len(augmented), len(ds.graphs), len(augmented) - len(ds.graphs), args.out)
    print(f"graphs written: {len(augmented)}")
    return EXIT_OK


def _cmd_distance(args) -> int:
    ds = load_tudataset(args.data, args.name)
    if not (0 <= args.i < len(ds.graphs) and 0 <= args.j < len(ds.graphs)):
        raise _UsageError(f"graph index out of range for dataset of size {len(ds.graphs)}")
    solve = solve_fgw_relaxed if args.solver == "accel" else solve_fgw_strict
    value, coupling, trace = solve(ds.graphs[args.i], ds.graphs[args.j], _solver_config(args))
    print(f"fgw: {value:.10f}")
    print(f"row_marginal_error: {coupling.row_marginal_error:.3e}")
    print(f"col_marginal_error: {coupling.col_marginal_error:.3e}")
    print(f"iterations: {trace.iterations_used} converged: {trace.converged}")
    return EXIT_OK


def _cmd_bench_infeasibility(args) -> int:
    ds = load_tudataset(args.data, args.name)
    report = run_infeasibility(ds, args.pairs, _solver_config(args),
                               seed=args.seed, workers=args.workers)
    out = Path(args.out)
    write_csv(report.per_pair, out / "infeasibility.csv")
    write_json(report, out / "infeasibility.json")
    for key, value in report.summary().items():
        print(f"{key}: {value}")
    return EXIT_OK


def _cmd_bench_timing(args) -> int:
    ds = load_tudataset(args.data, args.name)
    report = run_timing(ds, args.pairs, _solver_config(args), seed=args.seed,
                        beta_k=args.beta_k, workers=args.workers)
    out = Path(args.out)
    write_csv(report.per_pair, out / "timing.csv")
    write_json(report, out / "timing.json")
    for key, value in report.summary().items():
        print(f"{key}: {value}")
    return EXIT_OK


_COMMANDS = {
    "augment": _cmd_augment,
    "distance": _cmd_distance,
    "bench-infeasibility": _cmd_bench_infeasibility,
    "bench-timing": _cmd_bench_timing,
}


def _setup_logging() -> None:
    level_name = os.environ.get("FGWMIXUP_LOG", "info").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level_name not in levels:
        raise _UsageError(f"FGWMIXUP_LOG must be one of {sorted(levels)}")
    logging.basicConfig(
        level=levels[level_name],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def cli_main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    try:
        _setup_logging()
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, subparsers[args.command], argv, args)
        logger.info("resolved configuration: %s",
                    {k: v for k, v in sorted(vars(args).items()) if k != "command"})
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except (FileNotFoundError, ValueError) as exc:
        logger.error("data error: %s", exc)
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FloatingPointError as exc:
        logger.error("solver failure: %s", exc)
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main() -> None:
    sys.exit(cli_main())
