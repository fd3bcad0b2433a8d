"""
Feasibility and stationarity primitives shared by every solver

ac2cd/services/feasibility.py
"""


import logging
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from ac2cd.core.config import settings
from ac2cd.core.errors import BoundViolation, EmptyIndexSet, InfeasibleEquality
from ac2cd.models.base import ExtendedReal, FeasiblePoint
from ac2cd.models.problem import Bounds, Problem

logger = logging.getLogger(__name__)


def equality_tolerance(level: float) -> float:
    return settings.FEASIBILITY_TOL * (1.0 + abs(level))


def project_report_feasibility(p, prob: Problem) -> FeasiblePoint:
    """
    Accept ``p`` as a feasible point or report why it is not.

    The point is never repaired: near-feasible inputs outside the tolerances
    are rejected.
    """
    x = np.array(p, dtype=float).reshape(-1)
    if x.size != prob.n:
        raise BoundViolation(f"point has {x.size} coordinates, problem has {prob.n}")

    gap = abs(float(np.sum(x)) - prob.level)
    if gap > equality_tolerance(prob.level):
        logger.error(f"Equality violated by {gap:.3e}")
        raise InfeasibleEquality(
            f"|sum(x) - b| = {gap:.3e} exceeds {equality_tolerance(prob.level):.3e}"
        )

    lo, hi = prob.bounds.lower, prob.bounds.upper
    tol = settings.BOUND_TOL
    below = x < lo - tol * np.maximum(1.0, np.abs(np.where(np.isinf(lo), 0.0, lo)))
    above = x > hi + tol * np.maximum(1.0, np.abs(np.where(np.isinf(hi), 0.0, hi)))
    if np.any(below | above):
        h = int(np.argmax(below | above))
        logger.error(f"Bound violated at coordinate {h}: {x[h]} not in [{lo[h]}, {hi[h]}]")
        raise BoundViolation(f"x[{h}] = {x[h]} outside [{lo[h]}, {hi[h]}]")
    return x


def violating_pair(
    x: NDArray[np.float64], grad: NDArray[np.float64], bounds: Bounds
) -> Tuple[int, int, float, float]:
    """
    Most violating pair (i, j): i = argmin grad over {x < u}, j = argmax grad
    over {x > l}; smallest index on ties. Returns (i, j, grad_i, grad_j).
    """
    can_increase = x < bounds.upper
    can_decrease = x > bounds.lower
    if not np.any(can_increase) or not np.any(can_decrease):
        raise EmptyIndexSet("no coordinate can move in one of the two directions")
    up = np.where(can_increase, grad, np.inf)
    down = np.where(can_decrease, grad, -np.inf)
    i = int(np.argmin(up))
    j = int(np.argmax(down))
    return i, j, float(grad[i]), float(grad[j])


def kkt_residual(x: FeasiblePoint, grad: NDArray[np.float64], bounds: Bounds) -> float:
    """max(0, max_{x_i > l_i} grad_i - min_{x_i < u_i} grad_i); zero iff x is stationary."""
    _, _, g_low, g_high = violating_pair(x, grad, bounds)
    return max(0.0, g_high - g_low)


def nearest_bound_distance(x: FeasiblePoint, h: int, bounds: Bounds) -> ExtendedReal:
    lo, hi = bounds.lower[h], bounds.upper[h]
    if np.isinf(lo) and np.isinf(hi):
        return ExtendedReal.pos_inf()
    if np.isinf(lo):
        return ExtendedReal.finite(hi - x[h])
    if np.isinf(hi):
        return ExtendedReal.finite(x[h] - lo)
    return ExtendedReal.finite(min(x[h] - lo, hi - x[h]))


def bound_distances(x: FeasiblePoint, bounds: Bounds) -> NDArray[np.float64]:
    """Vector of D_h(x); +inf marks coordinates with both bounds infinite."""
    with np.errstate(invalid="ignore"):
        below = np.where(np.isinf(bounds.lower), np.inf, x - bounds.lower)
        above = np.where(np.isinf(bounds.upper), np.inf, bounds.upper - x)
    return np.minimum(below, above)


def is_pinned(z: NDArray[np.float64], p: int, j: int, bounds: Bounds) -> bool:
    """True when neither direction +-(e_p - e_j) admits a feasible move."""
    lo, hi = bounds.lower, bounds.upper
    blocked_up = z[p] >= hi[p] or z[j] <= lo[j]
    blocked_down = z[p] <= lo[p] or z[j] >= hi[j]
    return blocked_up and blocked_down


def _snap(value: float, lo: float, hi: float) -> float:
    tol = settings.BOUND_TOL
    if not np.isinf(lo) and abs(value - lo) <= tol * max(1.0, abs(lo)):
        return float(lo)
    if not np.isinf(hi) and abs(value - hi) <= tol * max(1.0, abs(hi)):
        return float(hi)
    return value


def clamp_pair_drift(x: NDArray[np.float64], i: int, j: int, bounds: Bounds) -> bool:
    """
    Snap the two moved coordinates onto a finite bound they sit within
    BOUND_TOL of. Returns True if anything changed.
    """
    changed = False
    for h in (i, j):
        snapped = _snap(x[h], bounds.lower[h], bounds.upper[h])
        if snapped != x[h]:
            if abs(snapped - x[h]) > 0.5 * settings.BOUND_TOL * max(1.0, abs(snapped)):
                logger.warning(f"Repaired drift of {abs(snapped - x[h]):.3e} at coordinate {h}")
            x[h] = snapped
            changed = True
    return changed


def is_stationary_or_singleton(
    x: FeasiblePoint, grad: NDArray[np.float64], bounds: Bounds, tol: float
) -> bool:
    """Full stationarity check; a point with no movable pair counts as stationary."""
    try:
        return kkt_residual(x, grad, bounds) <= tol
    except EmptyIndexSet:
        return True
