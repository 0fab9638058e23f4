"""Batch CLI: run a named experiment recipe and write a CSV artifact.

Usage:
    qproto-bench <protocol> --recipe <name> [--seed N] [--trials N]
                 [--threads N] [--out PATH] [--config FILE]
    qproto-bench list

Exit codes: 0 success, 2 configuration error, 3 degenerate input.
CSV rows are written with lexicographically ordered columns and a
repr-exact decimal format, so a fixed seed reproduces identical bytes
regardless of the thread count.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .qds import DegenerateInputError
from .recipes import ExperimentSpec, list_recipes, run_recipe

EXIT_CONFIG_ERROR = 2
EXIT_DEGENERATE_INPUT = 3


def _format_value(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: list[str], rows: list[dict]) -> None:
    """Header plus rows, columns in lexicographic order, '.' decimals."""
    columns = sorted(header)
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_value(row[c]) for c in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def run_experiment(spec: ExperimentSpec, out: Path) -> str:
    """Run one recipe, write its CSV artifact, return the summary line."""
    result = run_recipe(spec)
    write_csv(out, result.header, result.rows)
    return result.summary


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qproto-bench",
        description="quantum-network protocol benchmarks (CSV output)",
    )
    sub = parser.add_subparsers(dest="protocol", required=True)
    sub.add_parser("list", help="list built-in recipes")
    for protocol in ("money", "anon", "vbqc", "qds", "backbench"):
        p = sub.add_parser(protocol, help=f"run a {protocol} recipe")
        p.add_argument("--recipe", required=True, help="recipe name (see `list`)")
        p.add_argument("--seed", type=int, default=None, help="master seed (required)")
        p.add_argument("--trials", type=int, default=None, help="per-recipe size override")
        p.add_argument(
            "--threads",
            type=int,
            default=os.cpu_count() or 1,
            help="worker threads (results are independent of this)",
        )
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--config", default=None, help="TOML file with parameter overrides")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.protocol == "list":
        print(list_recipes())
        return 0

    params: dict = {}
    seed = args.seed
    trials = args.trials
    threads = args.threads
    try:
        if args.config:
            config = _load_config(args.config)
            params = dict(config.get(args.protocol, config))
            seed = seed if seed is not None else params.pop("seed", None)
            trials = trials if trials is not None else params.pop("trials", None)
        if seed is None:
            raise ValueError("a seed is required for reproducible output (--seed)")
        spec = ExperimentSpec(
            protocol=args.protocol,
            recipe=args.recipe,
            seed=int(seed),
            trials=trials,
            threads=max(1, threads),
            params=params,
        )
        out = Path(args.out) if args.out else Path(f"{args.recipe}.csv")
        summary = run_experiment(spec, out)
    except DegenerateInputError as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE_INPUT
    except (KeyError, ValueError, OSError, tomllib.TOMLDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
