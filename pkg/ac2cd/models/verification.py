"""
ac2cd/models/verification.py
"""


from typing import List, Optional

from pydantic import BaseModel, Field

from ac2cd.models.base import VerifyLevel


class CheckResult(BaseModel):
    name: str
    passed: bool
    margin: float = Field(..., description="measured value relative to its threshold")
    detail: str = ""


class RateReport(BaseModel):
    fitted_rate: float = Field(..., description="tail least-squares contraction estimate")
    bound: Optional[float] = Field(None, description="theoretical contraction constant")
    window: int
    fit_residual: float
    worst_ratio: Optional[float] = None
    violations: int = 0
    stabilized_index: Optional[int] = None
    stabilized: bool = True
    interior: Optional[bool] = None
    finding: Optional[str] = None


class EigenStatistics(BaseModel):
    n_negative: int
    n_positive: int
    n_zero: int
    min_eigenvalue: float
    max_eigenvalue: float


class VerificationReport(BaseModel):
    level: VerifyLevel
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]
