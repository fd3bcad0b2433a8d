"""
Run traces and summary rows

ac2cd/models/trace.py
"""


from dataclasses import dataclass
from typing import List, Optional

from pydantic import BaseModel, Field

from ac2cd.models.base import ExtendedReal, Method, TerminalStatus


@dataclass(frozen=True, slots=True)
class InnerStepRecord:
    """One inner iteration (k, i) with working pair (p, j)."""
    outer: int
    inner: int
    p: int
    j: int
    g: float
    alpha: float
    alpha_max: ExtendedReal
    skipped: bool = False
    noop: bool = False

    @property
    def moved(self) -> bool:
        return self.alpha * self.g != 0.0


class OuterRecord(BaseModel):
    k: int
    objective: float
    kkt_residual: Optional[float] = None
    g_min: float = float("inf")
    g_max: float = float("-inf")
    partial_count: int = Field(0, description="cumulative partial derivatives")
    pair_updates: int = Field(0, description="cumulative nonzero pair moves")
    skipped: int = Field(0, description="cumulative skipped inner iterations")
    wall_time: float = 0.0
    fixed_index: Optional[int] = None


class RunTrace(BaseModel):
    method: Method
    records: List[OuterRecord] = Field(default_factory=list)
    status: Optional[TerminalStatus] = None
    diagnostic: Optional[str] = None

    @property
    def final(self) -> OuterRecord:
        return self.records[-1]

    @property
    def outer_iterations(self) -> int:
        return self.records[-1].k if self.records else 0

    @property
    def objectives(self) -> List[float]:
        return [r.objective for r in self.records]

    def note(self, message: str) -> None:
        self.diagnostic = message if not self.diagnostic else f"{self.diagnostic}; {message}"


class SummaryRow(BaseModel):
    method: str
    repetition: str
    final_objective: float
    outer_iterations: float
    wall_time: float
    partial_count: float
    status: str


class CurvePoint(BaseModel):
    elapsed_seconds: float
    normalized_error: float
    clamped: bool = False
