"""
CLI commands

ac2cd/commands/__init__.py
"""
import argparse

from pydantic import ValidationError

from ac2cd.core.errors import ConfigError
from ac2cd.models.base import IndexRule, Method, StepsizeKind
from ac2cd.models.experiment import ExperimentConfig


def add_run_flags(parser: argparse.ArgumentParser) -> None:
    """Flags shared by ``solve`` and ``bench``."""
    parser.add_argument("--config", help="experiment config file")
    parser.add_argument("--seed", type=int, help="starting-point seed (first repetition)")
    parser.add_argument("--method", choices=[m.value for m in Method], help="run only this method")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--eps", type=float, help="stopping tolerance epsilon")
    parser.add_argument("--tau", type=float, help="index selection threshold")
    parser.add_argument("--stepsize", choices=[s.value for s in StepsizeKind], help="AC2CD stepsize rule, picked from the objective when unset")
    parser.add_argument("--index-rule", choices=[r.value for r in IndexRule], help="AC2CD index rule")
    parser.add_argument("--max-outer", type=int, help="outer iteration budget")


def apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """Return a validated copy of ``config`` with the command line flags applied."""
    data = config.model_dump()
    if args.seed is not None:
        data["repetitions"]["first_seed"] = args.seed
        data["repetitions"]["seeds"] = None
    if args.out:
        data["output"]["directory"] = args.out
    if args.eps is not None:
        data["stop"]["epsilon"] = args.eps
    if args.max_outer is not None:
        data["stop"]["max_outer"] = args.max_outer
    if args.method:
        chosen = [m for m in data["methods"] if m["method"] == args.method]
        data["methods"] = chosen or [{"method": args.method}]
    for method in data["methods"]:
        if args.tau is not None:
            method["tau"] = args.tau
        if args.stepsize:
            method["stepsize"] = args.stepsize
        if args.index_rule:
            method["index_rule"] = args.index_rule
    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        raise ConfigError(f"invalid command line overrides: {e}")


def register_commands(subparsers) -> None:
    from ac2cd.commands import bench, gen, solve, verify

    solve.register(subparsers)
    bench.register(subparsers)
    gen.register(subparsers)
    verify.register(subparsers)
