"""
Benchmark comparison from an experiment config

ac2cd/commands/bench.py
"""
import asyncio

from ac2cd.commands import add_run_flags, apply_overrides
from ac2cd.core.errors import ConfigError
from ac2cd.services.experiment import load_experiment_config, run_experiment
from ac2cd.services.trace_collector import format_summary_table


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="run an experiment config and write traces and summaries")
    add_run_flags(parser)
    parser.set_defaults(func=run)


def run(args) -> int:
    if not args.config:
        raise ConfigError("bench needs --config")
    config = apply_overrides(load_experiment_config(args.config), args)
    rows = asyncio.run(run_experiment(config))
    print(format_summary_table(rows, config.output.include_wall_time), end="")
    return 0
