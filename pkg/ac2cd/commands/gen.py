"""
Instance and dataset generation

ac2cd/commands/gen.py
"""
import logging

from ac2cd.core.errors import ConfigError
from ac2cd.services.datasets import make_toy_svm_dataset
from ac2cd.services.generators import gen_chebyshev, gen_logexp, gen_nonconvex
from ac2cd.services.serialization import dump_instance

logger = logging.getLogger(__name__)

FAMILIES = ["chebyshev", "logexp", "nonconvex", "svm-toy"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen", help="write a generated instance or a toy SVM dataset")
    parser.add_argument("--family", required=True, choices=FAMILIES)
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--m", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--regime", type=int, default=2, choices=[1, 2])
    parser.add_argument("--neg-fraction", type=float, default=0.5)
    parser.add_argument("--out", required=True, help="output file")
    parser.set_defaults(func=run)


def run(args) -> int:
    if args.family == "svm-toy":
        make_toy_svm_dataset(args.out, n=args.n, m=args.m, seed=args.seed)
        return 0
    if args.family == "chebyshev":
        instance = gen_chebyshev(args.n, args.m, args.seed)
    elif args.family == "logexp":
        instance = gen_logexp(args.n, args.seed, args.regime)
    elif args.family == "nonconvex":
        instance = gen_nonconvex(args.n, args.m, args.neg_fraction, args.seed)
    else:
        raise ConfigError(f"unknown family {args.family}")
    dump_instance(instance, args.out)
    return 0
