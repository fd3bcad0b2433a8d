"""
ac2cd/models/instance.py
"""


from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from ac2cd.models.base import Family
from ac2cd.models.problem import Problem


class GeneratedInstance(BaseModel):
    """A reproducible problem: regenerating from (family, seed, n, m, params) is bit-identical."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    family: Family
    seed: Optional[int] = None
    n: int = Field(..., ge=1)
    m: int = Field(0, ge=0)
    problem: Problem
    params: Dict[str, Any] = Field(default_factory=dict)
    reference_optimum: Optional[float] = None
    source: Optional[str] = Field(None, description="dataset path for loaded instances")

    @property
    def is_convex(self) -> bool:
        return self.family is not Family.NONCONVEX
