"""
Problem data: min f(x) s.t. sum(x) = b, l <= x <= u

ac2cd/models/problem.py
"""


from typing import Optional

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ac2cd.models.objective import Objective


def _frozen_vector(values) -> NDArray[np.float64]:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


class Bounds(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    lower: np.ndarray = Field(..., description="l_i in R or -inf")
    upper: np.ndarray = Field(..., description="u_i in R or +inf")

    @field_validator("lower", "upper", mode="before")
    @classmethod
    def to_vector(cls, v):
        return _frozen_vector(v)

    @model_validator(mode="after")
    def check_ordering(self):
        if self.lower.shape != self.upper.shape:
            raise ValueError(
                f"lower has {self.lower.size} entries, upper has {self.upper.size}"
            )
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise ValueError("bounds must not contain NaN")
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise ValueError("lower bounds cannot be +inf and upper bounds cannot be -inf")
        if not np.all(self.lower < self.upper):
            bad = int(np.argmax(~(self.lower < self.upper)))
            raise ValueError(f"l_i < u_i violated at index {bad}")
        return self

    @property
    def size(self) -> int:
        return int(self.lower.size)

    @classmethod
    def free(cls, n: int) -> "Bounds":
        return cls(lower=np.full(n, -np.inf), upper=np.full(n, np.inf))

    @classmethod
    def box(cls, lower, upper) -> "Bounds":
        return cls(lower=lower, upper=upper)

    @property
    def is_unbounded(self) -> bool:
        return bool(np.all(np.isinf(self.lower)) and np.all(np.isinf(self.upper)))


class Problem(BaseModel):
    """Immutable after construction; safe to share between concurrent runs."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    objective: Objective
    level: float = Field(..., description="right-hand side b of sum(x) = b")
    bounds: Bounds
    name: Optional[str] = None

    @model_validator(mode="after")
    def check_dimensions(self):
        if self.objective.n < 1:
            raise ValueError("dimension must be positive")
        if self.bounds.size != self.objective.n:
            raise ValueError(
                f"bounds have {self.bounds.size} entries for dimension {self.objective.n}"
            )
        lo_sum = float(np.sum(self.bounds.lower))
        hi_sum = float(np.sum(self.bounds.upper))
        if not lo_sum <= self.level <= hi_sum:
            raise ValueError(f"level {self.level} outside [{lo_sum}, {hi_sum}]: empty feasible set")
        return self

    @property
    def dimension(self) -> int:
        return self.objective.n

    @property
    def n(self) -> int:
        return self.objective.n
