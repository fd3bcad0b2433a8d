"""

ac2cd/models/__init__.py

"""


from ac2cd.models.base import *
from ac2cd.models.objective import *
from ac2cd.models.problem import *
from ac2cd.models.solver import *
from ac2cd.models.trace import *
from ac2cd.models.instance import *
from ac2cd.models.verification import *
from ac2cd.models.experiment import *

__all__ = [
    # Base
    "FeasiblePoint",
    "IndexRule",
    "StepsizeKind",
    "TrialScale",
    "LipschitzSource",
    "TerminalStatus",
    "Family",
    "Method",
    "SamplerMode",
    "VerifyLevel",
    "Extent",
    "ExtendedReal",

    # Objectives and problems
    "PairLine",
    "ObjectiveCache",
    "Objective",
    "Bounds",
    "Problem",
    "GeneratedInstance",

    # Solver configuration
    "ArmijoRule",
    "LipschitzRule",
    "QuadraticRule",
    "ExactRule",
    "StepsizeRule",
    "Ac2cdConfig",

    # Traces
    "InnerStepRecord",
    "OuterRecord",
    "RunTrace",
    "SummaryRow",
    "CurvePoint",

    # Verification
    "CheckResult",
    "RateReport",
    "EigenStatistics",
    "VerificationReport",

    # Experiments
    "InstanceSpec",
    "MethodSpec",
    "StopPolicy",
    "RepetitionPolicy",
    "OutputSpec",
    "ExperimentConfig",
]
