"""
Stepsize rules along a two-coordinate direction d = g (e_p - e_j)

ac2cd/services/stepsize.py
"""


import logging
import math
from typing import Optional, Tuple

import numpy as np

from ac2cd.core.config import settings
from ac2cd.core.errors import BacktrackOverflow, ConfigError, MaxEvalsExceeded
from ac2cd.models.base import ExtendedReal, LipschitzSource
from ac2cd.models.objective import Objective, PairLine
from ac2cd.models.problem import Bounds
from ac2cd.models.solver import ArmijoRule, ExactRule, LipschitzRule, QuadraticRule

logger = logging.getLogger(__name__)


def max_feasible_stepsize(z, p: int, j: int, g: float, bounds: Bounds) -> ExtendedReal:
    """Largest alpha keeping z + alpha g (e_p - e_j) inside the box; 0 when g = 0."""
    if g == 0.0:
        return ExtendedReal.finite(0.0)
    lo, hi = bounds.lower, bounds.upper
    if g > 0:
        gaps = (hi[p] - z[p], z[j] - lo[j])
    else:
        gaps = (z[p] - lo[p], hi[j] - z[j])
    finite = [gap for gap in gaps if not math.isinf(gap)]
    if not finite:
        return ExtendedReal.pos_inf()
    # drift can leave a coordinate a hair outside its bound
    return ExtendedReal.finite(max(0.0, min(finite)) / abs(g))


def armijo_stepsize(line: PairLine, g: float, alpha_max: ExtendedReal, rule: ArmijoRule) -> Tuple[float, int]:
    """
    Backtrack from Delta = min(alpha_max, A) until
    phi(alpha) <= phi(0) - gamma * alpha * g^2. Returns (alpha, evaluations).
    """
    trial = alpha_max.cap(rule.trial)
    g2 = g * g
    alpha = trial
    for c in range(settings.ARMIJO_MAX_BACKTRACKS + 1):
        if line.delta(alpha) <= -rule.gamma * alpha * g2:
            return alpha, c + 1
        alpha *= rule.delta
    logger.error(f"Armijo backtracking exceeded {settings.ARMIJO_MAX_BACKTRACKS} steps (g={g:.3e})")
    raise BacktrackOverflow(
        f"no sufficient decrease after {settings.ARMIJO_MAX_BACKTRACKS} backtracks"
    )


def lipschitz_stepsize(alpha_max: ExtendedReal, gamma: float, lbar: float) -> float:
    """min(alpha_max, 2 (1 - gamma) / Lbar)."""
    if alpha_max.is_zero:
        return 0.0
    return alpha_max.cap(2.0 * (1.0 - gamma) / lbar)


def quadratic_stepsize(kappa: float, alpha_max: ExtendedReal, a_upper: float) -> float:
    """Exact step 1/kappa for positive curvature, otherwise as far as allowed."""
    if alpha_max.is_zero:
        return 0.0
    if kappa > 0:
        return alpha_max.cap(1.0 / kappa)
    return alpha_max.cap(a_upper)


def exact_line_search(
    line: PairLine,
    alpha_max: ExtendedReal,
    tol: Optional[float] = None,
    max_evals: Optional[int] = None,
) -> Tuple[float, int]:
    """
    Minimize phi over [0, alpha_max] by bisection on phi'.

    Stops when |phi'(alpha)| <= tol (1 + |phi'(0)|) or at a boundary whose
    one-sided derivative is still negative. An unbounded interval is first
    bracketed by doubling. Returns (alpha, derivative evaluations).
    """
    tol = settings.EXACT_LS_TOL if tol is None else tol
    max_evals = settings.EXACT_LS_MAX_EVALS if max_evals is None else max_evals
    if alpha_max.is_zero:
        return 0.0, 0

    d0 = float(line.slope(0.0))
    evals = 1
    if d0 >= 0:
        return 0.0, evals
    stop = tol * (1.0 + abs(d0))

    lo = 0.0
    if alpha_max.is_pos_inf:
        hi = 1.0
        while True:
            d_hi = float(line.slope(hi))
            evals += 1
            if d_hi >= 0:
                break
            if evals >= max_evals:
                raise MaxEvalsExceeded(f"no bracket found after {evals} evaluations")
            lo, hi = hi, 2.0 * hi
        if abs(d_hi) <= stop:
            return hi, evals
    else:
        hi = alpha_max.value
        d_hi = float(line.slope(hi))
        evals += 1
        if d_hi <= stop:
            return hi, evals

    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid, evals
        d_mid = float(line.slope(mid))
        evals += 1
        if abs(d_mid) <= stop:
            return mid, evals
        if d_mid < 0:
            lo = mid
        else:
            hi = mid
        if evals >= max_evals:
            logger.error(f"Exact line search used {evals} evaluations without meeting tol")
            raise MaxEvalsExceeded(f"exact line search exceeded {max_evals} evaluations")


def default_rule(objective: Objective):
    """Quadratic 1/kappa steps on quadratics, L_i + L_j steps with gamma = 1/2 when constants exist, else Armijo."""
    if objective.is_quadratic:
        return QuadraticRule()
    if objective.coordinate_lipschitz() is not None or objective.pair_lipschitz(0, min(1, objective.n - 1)) is not None:
        return LipschitzRule(gamma=0.5)
    return ArmijoRule()


class Stepper:
    """Binds a stepsize rule to one objective for the duration of a run."""

    def __init__(self, rule, objective: Objective):
        self.rule = rule
        self.objective = objective
        self.evaluations = 0
        if isinstance(rule, QuadraticRule) and not objective.is_quadratic:
            raise ConfigError("quadratic stepsize requires a quadratic objective")
        self._separable: Optional[np.ndarray] = None
        if isinstance(rule, LipschitzRule):
            self._separable = objective.coordinate_lipschitz()
            if rule.source is LipschitzSource.SEPARABLE and self._separable is None:
                raise ConfigError("objective has no coordinatewise Lipschitz constants")
            if self._separable is None and objective.pair_lipschitz(0, min(1, objective.n - 1)) is None:
                raise ConfigError("objective has no Lipschitz constants")

    def pair_constant(self, p: int, j: int) -> float:
        lbar = None
        if self.rule.source is LipschitzSource.PAIRWISE:
            lbar = self.objective.pair_lipschitz(p, j)
        if lbar is None:
            lbar = float(self._separable[p] + self._separable[j])
        return max(lbar, np.finfo(float).tiny)

    def step(self, line: PairLine, p: int, j: int, g: float, alpha_max: ExtendedReal) -> float:
        rule = self.rule
        if isinstance(rule, ArmijoRule):
            alpha, evals = armijo_stepsize(line, g, alpha_max, rule)
        elif isinstance(rule, LipschitzRule):
            alpha, evals = lipschitz_stepsize(alpha_max, rule.gamma, self.pair_constant(p, j)), 0
        elif isinstance(rule, QuadraticRule):
            alpha, evals = quadratic_stepsize(line.curvature, alpha_max, rule.a_upper), 0
        elif isinstance(rule, ExactRule):
            alpha, evals = exact_line_search(line, alpha_max, rule.tol, rule.max_evals)
        else:
            raise ConfigError(f"unknown stepsize rule {rule!r}")
        self.evaluations += evals
        return alpha
