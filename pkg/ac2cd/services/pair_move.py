"""
One two-coordinate update, shared by AC2CD and the random baselines

ac2cd/services/pair_move.py
"""


import math
from typing import Optional, Tuple

import numpy as np

from ac2cd.models.base import ExtendedReal
from ac2cd.models.objective import ObjectiveCache
from ac2cd.models.problem import Bounds
from ac2cd.models.trace import InnerStepRecord
from ac2cd.services.feasibility import clamp_pair_drift, is_pinned
from ac2cd.services.stepsize import Stepper, max_feasible_stepsize

_ZERO = ExtendedReal.finite(0.0)


class GradientTracker:
    """
    G_min / G_max over the partials computed during one outer iteration.

    A partial counts towards G_min only if its coordinate can still increase
    and towards G_max only if it can still decrease.
    """

    def __init__(self, bounds: Bounds):
        self.bounds = bounds
        self.evaluated = np.zeros(bounds.size, dtype=bool)
        self.g_min = math.inf
        self.g_max = -math.inf

    def reset(self) -> None:
        self.evaluated[:] = False
        self.g_min = math.inf
        self.g_max = -math.inf

    def observe(self, h: int, grad_h: float, x_h: float) -> None:
        self.evaluated[h] = True
        if x_h < self.bounds.upper[h] and grad_h < self.g_min:
            self.g_min = grad_h
        if x_h > self.bounds.lower[h] and grad_h > self.g_max:
            self.g_max = grad_h

    @property
    def gap(self) -> float:
        return self.g_min - self.g_max


def take_pair_step(
    x: np.ndarray,
    cache: ObjectiveCache,
    bounds: Bounds,
    p: int,
    j: int,
    stepper: Stepper,
    tracker: Optional[GradientTracker] = None,
    outer: int = 0,
    inner: int = 0,
) -> Tuple[InnerStepRecord, int]:
    """
    Move x in place along d = g (e_p - e_j) with g = grad_j - grad_p.

    Returns the step record and the number of partial derivatives computed
    (0 for a no-op or a pinned pair, 2 otherwise).
    """
    if p == j:
        return InnerStepRecord(outer, inner, p, j, 0.0, 0.0, _ZERO, noop=True), 0
    if is_pinned(x, p, j, bounds):
        return InnerStepRecord(outer, inner, p, j, 0.0, 0.0, _ZERO, skipped=True), 0

    grad_p = cache.partial(p, x)
    grad_j = cache.partial(j, x)
    if tracker is not None:
        tracker.observe(p, grad_p, x[p])
        tracker.observe(j, grad_j, x[j])

    g = grad_j - grad_p
    alpha_max = max_feasible_stepsize(x, p, j, g, bounds)
    if g == 0.0 or alpha_max.is_zero:
        return InnerStepRecord(outer, inner, p, j, g, 0.0, alpha_max), 2

    line = cache.line(x, p, j, g, grad_p, grad_j)
    alpha = stepper.step(line, p, j, g, alpha_max)
    t = alpha * g
    if t != 0.0:
        x[p] += t
        x[j] -= t
        cache.apply_pair_move(p, j, t)
        if alpha_max.is_finite and alpha == alpha_max.value:
            # the blocking coordinate must land exactly on its bound
            _land_on_bound(x, p, j, g, bounds)
        clamp_pair_drift(x, p, j, bounds)
    return InnerStepRecord(outer, inner, p, j, g, alpha, alpha_max), 2


def _land_on_bound(x: np.ndarray, p: int, j: int, g: float, bounds: Bounds) -> None:
    lo, hi = bounds.lower, bounds.upper
    if g > 0:
        candidates = ((p, hi[p]), (j, lo[j]))
    else:
        candidates = ((p, lo[p]), (j, hi[j]))
    h, target = min(
        (c for c in candidates if not math.isinf(c[1])),
        key=lambda c: abs(x[c[0]] - c[1]),
    )
    x[h] = target
