"""
Seeded generators for the experiment families and their starting points

ac2cd/services/generators.py
"""


import logging
import math
from typing import Optional, Tuple

import numpy as np

from ac2cd.core.errors import InstanceError
from ac2cd.models.base import Family, FeasiblePoint
from ac2cd.models.instance import GeneratedInstance
from ac2cd.models.problem import Bounds, Problem
from ac2cd.services.objectives import QuadraticObjective, SeparableLogExp

logger = logging.getLogger(__name__)

LOGEXP_REGIMES = {
    1: {"a": (0.0, 15.0), "b": (-15.0, 15.0), "c": (-15.0, 15.0), "d": (-15.0, 15.0)},
    2: {"a": (0.0, 2.0), "b": (-2.0, 2.0), "c": (-10.0, 10.0), "d": (-10.0, 10.0)},
}


def simplex_bounds(n: int, explicit_upper: bool = False) -> Bounds:
    """x >= 0; the upper bound 1 implied by sum(x) = 1 is added only on request."""
    upper = np.ones(n) if explicit_upper else np.full(n, np.inf)
    return Bounds(lower=np.zeros(n), upper=upper)


# Chebyshev center

def chebyshev_from_points(points, seed: Optional[int] = None) -> GeneratedInstance:
    """
    Smallest enclosing ball of the columns v^1..v^n of ``points`` (m x n):
    min sum_ij v_i.v_j x_i x_j - sum_i |v_i|^2 x_i on the unit simplex.
    """
    V = np.atleast_2d(np.asarray(points, dtype=float))
    m, n = V.shape
    objective = QuadraticObjective(math.sqrt(2.0) * V, np.sum(V * V, axis=0))
    problem = Problem(objective=objective, level=1.0, bounds=simplex_bounds(n), name="chebyshev")
    return GeneratedInstance(
        family=Family.CHEBYSHEV, seed=seed, n=n, m=m, problem=problem, params={}
    )


def gen_chebyshev(n: int, m: int, seed: int) -> GeneratedInstance:
    if n < 2 or m < 1:
        raise InstanceError("Chebyshev instances need n >= 2 and m >= 1")
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((m, n))
    return chebyshev_from_points(V, seed)


def chebyshev_center_radius(instance: GeneratedInstance, x: FeasiblePoint) -> Tuple[np.ndarray, float]:
    """Center sum_i v_i x_i and radius sqrt(-f(x)) of the ball given by weights x."""
    Q = instance.problem.objective.Q
    center = np.asarray(Q @ x).reshape(-1) / math.sqrt(2.0)
    radius_sq = -instance.problem.objective.value(x)
    return center, math.sqrt(max(0.0, radius_sq))


# Separable log-exp with one equality

def logexp_from_coefficients(a, b, c, d, seed: Optional[int] = None, regime: int = 0) -> GeneratedInstance:
    objective = SeparableLogExp(a, b, c, d)
    n = objective.n
    problem = Problem(objective=objective, level=0.0, bounds=Bounds.free(n), name="logexp")
    return GeneratedInstance(
        family=Family.LOGEXP, seed=seed, n=n, m=0, problem=problem, params={"regime": regime}
    )


def gen_logexp(n: int, seed: int, regime: int = 2) -> GeneratedInstance:
    if n < 2:
        raise InstanceError("log-exp instances need n >= 2")
    if regime not in LOGEXP_REGIMES:
        raise InstanceError(f"unknown log-exp regime {regime}; expected 1 or 2")
    rng = np.random.default_rng(seed)
    ranges = LOGEXP_REGIMES[regime]
    a = rng.uniform(*ranges["a"], size=n)
    # uniform draws on [0, hi) can return exactly 0
    a = np.where(a > 0.0, a, np.nextafter(0.0, 1.0))
    b = rng.uniform(*ranges["b"], size=n)
    c = rng.uniform(*ranges["c"], size=n)
    d = rng.uniform(*ranges["d"], size=n)
    return logexp_from_coefficients(a, b, c, d, seed=seed, regime=regime)


# Non-convex simplex quadratic

def gen_nonconvex(n: int, m: int, neg_fraction: float, seed: int) -> GeneratedInstance:
    """1/2 x^T Q^T D Q x - q^T x on the unit simplex with ceil(neg_fraction m) negative D entries."""
    if not 0.0 < neg_fraction < 1.0:
        raise InstanceError("neg_fraction must lie in (0, 1)")
    if n < 2 or m < 1:
        raise InstanceError("non-convex instances need n >= 2 and m >= 1")
    rng = np.random.default_rng(seed)
    Q = rng.standard_normal((m, n))
    q = rng.uniform(0.0, 1.0, size=n)
    n_neg = min(m, math.ceil(neg_fraction * m - 1e-9))
    D = np.ones(m)
    negative = rng.choice(m, size=n_neg, replace=False)
    D[negative] = rng.uniform(-1.0, 0.0, size=n_neg)
    objective = QuadraticObjective(Q, q, D)
    problem = Problem(objective=objective, level=1.0, bounds=simplex_bounds(n), name="nonconvex")
    return GeneratedInstance(
        family=Family.NONCONVEX,
        seed=seed,
        n=n,
        m=m,
        problem=problem,
        params={"neg_fraction": neg_fraction, "n_neg": int(n_neg), "n_pos": int(m - n_neg)},
    )


# Starting points

def random_simplex_vertex(n: int, rng: np.random.Generator) -> FeasiblePoint:
    x = np.zeros(n)
    x[int(rng.integers(n))] = 1.0
    return x


def svm_start(bounds: Bounds, rng: np.random.Generator) -> FeasiblePoint:
    """
    Zeros except one positive-label and one negative-label variable set to
    C/2 and -C/2; all zeros when every label agrees.
    """
    x = np.zeros(bounds.size)
    positive = np.flatnonzero(bounds.upper > 0)
    negative = np.flatnonzero(bounds.lower < 0)
    if positive.size and negative.size:
        i = int(rng.choice(positive))
        j = int(rng.choice(negative))
        half = 0.5 * min(bounds.upper[i], -bounds.lower[j])
        x[i], x[j] = half, -half
    return x


def starting_point(instance: GeneratedInstance, seed: int) -> FeasiblePoint:
    rng = np.random.default_rng(seed)
    if instance.family in (Family.CHEBYSHEV, Family.NONCONVEX):
        return random_simplex_vertex(instance.n, rng)
    if instance.family is Family.SVM_DUAL:
        return svm_start(instance.problem.bounds, rng)
    return np.zeros(instance.n)
