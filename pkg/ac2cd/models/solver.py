"""
Solver configuration models

ac2cd/models/solver.py
"""


from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from ac2cd.core.config import settings
from ac2cd.models.base import IndexRule, LipschitzSource, TrialScale


class ArmijoRule(BaseModel):
    kind: Literal["armijo"] = "armijo"
    delta: float = Field(0.5, gt=0, lt=1, description="backtracking factor")
    gamma: float = Field(default_factory=lambda: settings.DEFAULT_GAMMA, gt=0, lt=1)
    a_lower: float = Field(1.0, gt=0)
    a_upper: float = Field(1.0, gt=0)
    trial_scale: TrialScale = TrialScale.UPPER

    @model_validator(mode="after")
    def check_range(self):
        if self.a_upper < self.a_lower:
            raise ValueError("Armijo requires 0 < a_lower <= a_upper")
        if self.a_upper == float("inf"):
            raise ValueError("a_upper must be finite")
        return self

    @property
    def trial(self) -> float:
        return self.a_upper if self.trial_scale is TrialScale.UPPER else self.a_lower


class LipschitzRule(BaseModel):
    kind: Literal["lipschitz"] = "lipschitz"
    gamma: float = Field(default_factory=lambda: settings.DEFAULT_GAMMA, gt=0, lt=1)
    source: LipschitzSource = LipschitzSource.PAIRWISE


class QuadraticRule(BaseModel):
    kind: Literal["quadratic"] = "quadratic"
    a_upper: float = Field(default_factory=lambda: settings.DEFAULT_A_UPPER, gt=0)


class ExactRule(BaseModel):
    kind: Literal["exact"] = "exact"
    tol: float = Field(default_factory=lambda: settings.EXACT_LS_TOL, gt=0)
    max_evals: int = Field(default_factory=lambda: settings.EXACT_LS_MAX_EVALS, ge=2)


StepsizeRule = Annotated[
    Union[ArmijoRule, LipschitzRule, QuadraticRule, ExactRule],
    Field(discriminator="kind"),
]


class Ac2cdConfig(BaseModel):
    tau: float = Field(default_factory=lambda: settings.DEFAULT_TAU, gt=0, le=1)
    index_rule: IndexRule = IndexRule.THRESHOLD
    fixed_index: Optional[int] = Field(None, ge=0)
    stepsize: Optional[StepsizeRule] = Field(None, description="None picks the rule from the objective")
    epsilon: float = Field(default_factory=lambda: settings.DEFAULT_EPSILON, gt=0)
    max_outer: int = Field(default_factory=lambda: settings.DEFAULT_MAX_OUTER, ge=1)
    rng_seed: int = Field(0, ge=0, lt=2**64)
    shuffle_each_outer: bool = True
    track_kkt: bool = Field(False, description="full-gradient KKT residual per record")
    stall_window: int = Field(50, ge=2)

    @model_validator(mode="after")
    def check_index_rule(self):
        if self.index_rule is IndexRule.RATE and self.tau >= 1:
            raise ValueError("rate-mode index rule requires tau < 1")
        if self.index_rule is IndexRule.FIXED and self.fixed_index is None:
            raise ValueError("fixed index rule requires fixed_index")
        return self
