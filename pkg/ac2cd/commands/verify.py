"""
Oracle and theory checks

ac2cd/commands/verify.py
"""
from ac2cd.models.base import VerifyLevel
from ac2cd.services.experiment import verify_suite


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="run the verification suite")
    parser.add_argument("--level", choices=[v.value for v in VerifyLevel], default=VerifyLevel.FAST.value)
    parser.add_argument("--seed", type=int, default=0)
    parser.set_defaults(func=run)


def run(args) -> int:
    report = verify_suite(VerifyLevel(args.level), seed=args.seed)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status}  {check.name:<40} margin={check.margin:.3g}  {check.detail}")
    print(f"{len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed")
    return 0 if report.passed else 1
