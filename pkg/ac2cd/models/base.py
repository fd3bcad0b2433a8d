"""
ac2cd/models/base.py
"""


import math
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering

import numpy as np
from numpy.typing import NDArray

# A feasible point is a plain float vector; feasibility is checked at the boundary.
FeasiblePoint = NDArray[np.float64]


# Enums
class IndexRule(str, Enum):
    THRESHOLD = "threshold"
    RATE = "rate"
    FIXED = "fixed"


class StepsizeKind(str, Enum):
    ARMIJO = "armijo"
    LIPSCHITZ = "lipschitz"
    QUADRATIC = "quadratic"
    EXACT = "exact"


class TrialScale(str, Enum):
    """Which end of [A_l, A_u] the Armijo trial uses."""
    UPPER = "upper"
    LOWER = "lower"


class LipschitzSource(str, Enum):
    PAIRWISE = "pairwise"
    SEPARABLE = "separable"


class TerminalStatus(str, Enum):
    CONVERGED = "converged"
    MAX_OUTER = "max_outer"
    NUMERICAL_FAILURE = "numerical_failure"


class Family(str, Enum):
    CHEBYSHEV = "chebyshev"
    SVM_DUAL = "svm_dual"
    LOGEXP = "logexp"
    NONCONVEX = "nonconvex"


class Method(str, Enum):
    AC2CD = "ac2cd"
    RCD_UNIF = "rcd_unif"
    RCD_LIPS = "rcd_lips"
    MVP = "mvp"


class SamplerMode(str, Enum):
    UNIFORM = "uniform"
    LIPSCHITZ_WEIGHTED = "lipschitz_weighted"


class VerifyLevel(str, Enum):
    FAST = "fast"
    FULL = "full"


class Extent(str, Enum):
    NEG_INF = "-inf"
    FINITE = "finite"
    POS_INF = "+inf"


_RANK = {Extent.NEG_INF: -1, Extent.FINITE: 0, Extent.POS_INF: 1}


@total_ordering
@dataclass(frozen=True, slots=True)
class ExtendedReal:
    """
    Real number extended with -inf and +inf.

    Bound gaps and maximal stepsizes mix finite and infinite values; keeping
    the kind explicit avoids doing arithmetic on IEEE infinities.
    """
    kind: Extent
    value: float = 0.0

    @classmethod
    def finite(cls, value: float) -> "ExtendedReal":
        return cls(Extent.FINITE, float(value))

    @classmethod
    def pos_inf(cls) -> "ExtendedReal":
        return cls(Extent.POS_INF)

    @classmethod
    def neg_inf(cls) -> "ExtendedReal":
        return cls(Extent.NEG_INF)

    @classmethod
    def from_float(cls, value: float) -> "ExtendedReal":
        if math.isinf(value):
            return cls.pos_inf() if value > 0 else cls.neg_inf()
        return cls.finite(value)

    @property
    def is_finite(self) -> bool:
        return self.kind is Extent.FINITE

    @property
    def is_pos_inf(self) -> bool:
        return self.kind is Extent.POS_INF

    @property
    def is_zero(self) -> bool:
        return self.kind is Extent.FINITE and self.value == 0.0

    def scale(self, factor: float) -> "ExtendedReal":
        """Multiply by a strictly positive finite factor."""
        if not self.is_finite:
            return self
        return ExtendedReal.finite(self.value * factor)

    def cap(self, limit: float) -> float:
        """min(self, limit) for a finite limit."""
        if self.kind is Extent.POS_INF:
            return limit
        if self.kind is Extent.NEG_INF:
            raise ValueError("cannot cap -inf to a finite value")
        return min(self.value, limit)

    def __float__(self) -> float:
        if self.kind is Extent.POS_INF:
            return math.inf
        if self.kind is Extent.NEG_INF:
            return -math.inf
        return self.value

    def __lt__(self, other: "ExtendedReal") -> bool:
        if not isinstance(other, ExtendedReal):
            return NotImplemented
        return (_RANK[self.kind], self.value) < (_RANK[other.kind], other.value)

    def __str__(self) -> str:
        return repr(self.value) if self.is_finite else self.kind.value
