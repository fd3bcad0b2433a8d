"""
Error hierarchy shared by the solver library and the command line.

ac2cd/core/errors.py
"""


class Ac2cdError(Exception):
    """Base error. ``exit_code`` is the process status used by the CLI."""

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def __str__(self) -> str:
        return self.detail


class FeasibilityError(Ac2cdError):
    exit_code = 3


class InfeasibleEquality(FeasibilityError):
    pass


class BoundViolation(FeasibilityError):
    pass


class EmptyIndexSet(Ac2cdError):
    """No coordinate can move up, or none can move down."""

    exit_code = 3


class DegenerateLevelSet(Ac2cdError):
    """Every coordinate sits on a finite bound (D^k = 0)."""

    exit_code = 4


class StepsizeError(Ac2cdError):
    exit_code = 4


class BacktrackOverflow(StepsizeError):
    pass


class MaxEvalsExceeded(StepsizeError):
    pass


class NumericalFailure(Ac2cdError):
    exit_code = 4


class DatasetError(Ac2cdError):
    exit_code = 2


class ParseError(DatasetError):
    pass


class LabelError(DatasetError):
    pass


class OptimumUnavailable(Ac2cdError):
    exit_code = 5


class ConfigError(Ac2cdError):
    exit_code = 2


class InstanceError(Ac2cdError):
    exit_code = 2
