"""
Experiment configuration models

ac2cd/models/experiment.py
"""


from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ac2cd.core.config import settings
from ac2cd.models.base import Family, IndexRule, Method, StepsizeKind, TrialScale
from ac2cd.models.solver import Ac2cdConfig, ArmijoRule, ExactRule, LipschitzRule, QuadraticRule

_RULES = {
    StepsizeKind.ARMIJO: ArmijoRule,
    StepsizeKind.LIPSCHITZ: LipschitzRule,
    StepsizeKind.QUADRATIC: QuadraticRule,
    StepsizeKind.EXACT: ExactRule,
}


class InstanceSpec(BaseModel):
    """A generated family with its parameters, a dataset, or a serialized instance file."""

    model_config = ConfigDict(extra="forbid")

    family: Family
    n: int = Field(100, ge=2)
    m: int = Field(10, ge=1)
    seed: int = Field(0, ge=0)
    regime: int = Field(2, ge=1, le=2)
    neg_fraction: float = Field(0.5, gt=0, lt=1)
    dataset: Optional[str] = None
    C: float = Field(1.0, gt=0)
    path: Optional[str] = Field(None, description="serialized instance file")

    @model_validator(mode="after")
    def check_source(self):
        if self.family is Family.SVM_DUAL and self.dataset is None and self.path is None:
            raise ValueError("svm_dual instances need a dataset path")
        return self


class MethodSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    method: Method
    index_rule: IndexRule = IndexRule.THRESHOLD
    tau: float = Field(default_factory=lambda: settings.DEFAULT_TAU, gt=0, le=1)
    fixed_index: Optional[int] = Field(None, ge=0)
    stepsize: Optional[StepsizeKind] = Field(None, description="unset picks the rule from the objective")
    gamma: Optional[float] = None
    delta: Optional[float] = None
    a_lower: Optional[float] = None
    a_upper: Optional[float] = None
    trial_scale: Optional[TrialScale] = None
    tol: Optional[float] = None
    max_evals: Optional[int] = None

    def stepsize_rule(self):
        if self.stepsize is None:
            return None
        rule = _RULES[self.stepsize]
        given = {
            k: v for k, v in self.model_dump().items()
            if v is not None and k in rule.model_fields and k != "kind"
        }
        return rule(**given)

    def solver_config(self, stop: "StopPolicy", seed: int) -> Ac2cdConfig:
        return Ac2cdConfig(
            tau=self.tau,
            index_rule=self.index_rule,
            fixed_index=self.fixed_index,
            stepsize=self.stepsize_rule(),
            epsilon=stop.epsilon,
            max_outer=stop.max_outer,
            rng_seed=seed,
        )


class StopPolicy(BaseModel):
    model_config = ConfigDict(extra="forbid")

    epsilon: float = Field(default_factory=lambda: settings.DEFAULT_EPSILON, gt=0)
    nu: float = Field(default_factory=lambda: settings.DEFAULT_NU, gt=0)
    mvp_epsilon: float = Field(default_factory=lambda: settings.MVP_EPSILON, gt=0)
    max_outer: int = Field(default_factory=lambda: settings.DEFAULT_MAX_OUTER, ge=1)
    inner_budget: int = Field(default_factory=lambda: settings.DEFAULT_INNER_BUDGET, ge=1)


class RepetitionPolicy(BaseModel):
    """Starting-point seeds; ``seeds`` overrides ``count`` consecutive seeds from ``first_seed``."""

    model_config = ConfigDict(extra="forbid")

    count: int = Field(1, ge=1)
    first_seed: int = Field(0, ge=0)
    seeds: Optional[List[int]] = None

    @field_validator("seeds", mode="before")
    @classmethod
    def split_seeds(cls, v):
        if isinstance(v, str):
            return [int(s) for s in v.replace(",", " ").split()]
        return v

    @property
    def seed_list(self) -> List[int]:
        if self.seeds:
            return list(self.seeds)
        return list(range(self.first_seed, self.first_seed + self.count))


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    include_wall_time: bool = True
    write_curves: bool = True


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    instance: InstanceSpec
    methods: List[MethodSpec] = Field(..., min_length=1)
    stop: StopPolicy = Field(default_factory=StopPolicy)
    repetitions: RepetitionPolicy = Field(default_factory=RepetitionPolicy)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def check_methods(self):
        names = [m.method for m in self.methods]
        if len(set(names)) != len(names):
            raise ValueError("each method may appear once")
        if self.instance.family is not Family.NONCONVEX and Method.AC2CD not in names and len(names) > 1:
            raise ValueError("convex comparisons need ac2cd to provide the target value")
        return self
