"""
Single run of one method

ac2cd/commands/solve.py
"""
import logging
from pathlib import Path

from ac2cd.commands import add_run_flags, apply_overrides
from ac2cd.core.errors import ConfigError
from ac2cd.models.base import TerminalStatus
from ac2cd.models.experiment import ExperimentConfig
from ac2cd.services.experiment import build_instance, load_experiment_config, run_method, summary_row
from ac2cd.services.generators import starting_point
from ac2cd.services.serialization import load_instance
from ac2cd.services.trace_collector import format_summary_table, write_trace_csv

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="run one method on one instance")
    add_run_flags(parser)
    parser.add_argument("--instance", help="serialized instance file (instead of --config)")
    parser.set_defaults(func=run)


def run(args) -> int:
    if args.config:
        config = apply_overrides(load_experiment_config(args.config), args)
        instance = build_instance(config)
    elif args.instance:
        instance = load_instance(args.instance)
        base = ExperimentConfig(
            instance={"family": instance.family, "path": args.instance},
            methods=[{"method": args.method or "ac2cd"}],
        )
        config = apply_overrides(base, args)
    else:
        raise ConfigError("solve needs --config or --instance")

    spec = config.methods[0]
    seed = config.repetitions.seed_list[0]
    trace = run_method(instance, spec, config, starting_point(instance, seed), seed)

    out = Path(config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    path = write_trace_csv(out / f"trace_{spec.method.value}.csv", trace, config.output.include_wall_time)
    logger.info(f"Trace written to {path}")
    print(format_summary_table([summary_row(spec.method, str(seed), trace)], config.output.include_wall_time), end="")
    return 4 if trace.status is TerminalStatus.NUMERICAL_FAILURE else 0
