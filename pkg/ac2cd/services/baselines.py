"""
Comparison methods: random two-coordinate descent (uniform or Lipschitz
weighted pair sampling) and the maximal violating pair method

ac2cd/services/baselines.py
"""


import logging
import math
import time
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ac2cd.core.config import settings
from ac2cd.core.errors import ConfigError, EmptyIndexSet, StepsizeError
from ac2cd.models.base import ExtendedReal, FeasiblePoint, Method, SamplerMode, TerminalStatus
from ac2cd.models.objective import Objective, ObjectiveCache
from ac2cd.models.problem import Bounds, Problem
from ac2cd.models.solver import ExactRule
from ac2cd.models.trace import InnerStepRecord, OuterRecord, RunTrace
from ac2cd.services.feasibility import clamp_pair_drift, project_report_feasibility, violating_pair
from ac2cd.services.pair_move import GradientTracker, take_pair_step
from ac2cd.services.solver import check_termination, final_sweep
from ac2cd.services.stepsize import Stepper, default_rule, exact_line_search, max_feasible_stepsize

logger = logging.getLogger(__name__)


class BaselineStop(BaseModel):
    """Target-based stop for convex runs, gradient-extreme stop otherwise."""

    f_target: Optional[float] = None
    nu: float = Field(default_factory=lambda: settings.DEFAULT_NU, gt=0)
    epsilon: float = Field(default_factory=lambda: settings.DEFAULT_EPSILON, gt=0)
    mvp_epsilon: float = Field(default_factory=lambda: settings.MVP_EPSILON, gt=0)
    max_outer: int = Field(default_factory=lambda: settings.DEFAULT_MAX_OUTER, ge=1)
    inner_budget: int = Field(default_factory=lambda: settings.DEFAULT_INNER_BUDGET, ge=1)

    def target_reached(self, objective: float) -> bool:
        return normalized_error(objective, self.f_target) <= self.nu


def normalized_error(objective: float, f_target: float) -> float:
    return (objective - f_target) / (1.0 + abs(f_target))


# Pair sampling

def decode_pair_index(r: int) -> Tuple[int, int]:
    """
    Map r in {0, ..., n(n-1)/2 - 1} to the unordered pair (i, j), i > j,
    zero-based. Uses the triangular decoding with an exact integer square root.
    """
    i = 1 + (math.isqrt(1 + 8 * r) + 1) // 2
    j = 1 + r - (i - 2) * (i - 1) // 2
    return i - 1, j - 1


def sample_pair_uniform(rng: np.random.Generator, n: int) -> Tuple[int, int]:
    pairs = n * (n - 1) // 2
    r = min(int(rng.uniform(0.0, pairs)), pairs - 1)
    return decode_pair_index(r)


class PairSampler:
    """
    Draws unordered pairs i != j, uniformly or with probability proportional
    to 1/L_i + 1/L_j. The weighted mode keeps the cumulative weights of all
    n(n-1)/2 pairs and inverts the CDF by binary search.
    """

    MAX_WEIGHTED_DIMENSION = 20000

    def __init__(self, n: int, mode: SamplerMode = SamplerMode.UNIFORM, lipschitz=None, rng=None):
        if n < 2:
            raise ConfigError("pair sampling needs n >= 2")
        self.n = n
        self.mode = mode
        self.rng = rng if rng is not None else np.random.default_rng()
        self._cumulative = None
        if mode is SamplerMode.LIPSCHITZ_WEIGHTED:
            if lipschitz is None:
                raise ConfigError("Lipschitz-weighted sampling needs per-coordinate constants")
            if n > self.MAX_WEIGHTED_DIMENSION:
                raise ConfigError(f"Lipschitz-weighted sampling limited to n <= {self.MAX_WEIGHTED_DIMENSION}")
            inv = 1.0 / np.asarray(lipschitz, dtype=float)
            rows, cols = np.tril_indices(n, -1)
            self._rows, self._cols = rows, cols
            self._cumulative = np.cumsum(inv[rows] + inv[cols])

    def probabilities(self) -> np.ndarray:
        """Probability of each pair in decoding order."""
        pairs = self.n * (self.n - 1) // 2
        if self._cumulative is None:
            return np.full(pairs, 1.0 / pairs)
        weights = np.diff(self._cumulative, prepend=0.0)
        return weights / self._cumulative[-1]

    def sample(self) -> Tuple[int, int]:
        if self._cumulative is None:
            return sample_pair_uniform(self.rng, self.n)
        u = self.rng.uniform(0.0, self._cumulative[-1])
        idx = min(int(np.searchsorted(self._cumulative, u, side="right")), self._cumulative.size - 1)
        return int(self._rows[idx]), int(self._cols[idx])


def sampling_constants(objective: Objective) -> np.ndarray:
    """L_i for the weighted sampler; positive diagonal curvature for quadratics."""
    lipschitz = objective.coordinate_lipschitz()
    if lipschitz is not None:
        return np.asarray(lipschitz, dtype=float)
    diag = getattr(objective, "diag", None)
    if diag is None:
        raise ConfigError("objective provides no per-coordinate constants")
    return np.maximum(np.asarray(diag, dtype=float), 1e-12)


def rcd_stepper(objective: Objective) -> Stepper:
    """Quadratic-model step: exact curvature for quadratics, L_i + L_j otherwise."""
    return Stepper(default_rule(objective), objective)


def rcd_step(
    z: np.ndarray,
    pair: Tuple[int, int],
    cache: ObjectiveCache,
    bounds: Bounds,
    stepper: Stepper,
    tracker: Optional[GradientTracker] = None,
) -> Tuple[InnerStepRecord, int]:
    i, j = pair
    return take_pair_step(z, cache, bounds, i, j, stepper, tracker)


def mvp_step(
    x: np.ndarray,
    cache: ObjectiveCache,
    bounds: Bounds,
    epsilon: float,
    rule: Optional[ExactRule] = None,
) -> Tuple[bool, float, InnerStepRecord]:
    """
    One maximal violating pair iteration. Returns (stationary, violation, record);
    when ``stationary`` x is left untouched.
    """
    rule = rule or ExactRule()
    grad = cache.gradient(x)
    i, j, g_low, g_high = violating_pair(x, grad, bounds)
    violation = g_low - g_high
    if violation >= -epsilon:
        return True, violation, InnerStepRecord(0, 0, i, j, 0.0, 0.0, ExtendedReal.finite(0.0))
    g = g_high - g_low
    alpha_max = max_feasible_stepsize(x, i, j, g, bounds)
    line = cache.line(x, i, j, g, grad[i], grad[j])
    alpha, _ = exact_line_search(line, alpha_max, rule.tol, rule.max_evals)
    t = alpha * g
    if t != 0.0:
        x[i] += t
        x[j] -= t
        cache.apply_pair_move(i, j, t)
        clamp_pair_drift(x, i, j, bounds)
    return False, violation, InnerStepRecord(0, 0, i, j, g, alpha, alpha_max)


def _outer_record(k, cache, x, partials, updates, skipped, started, tracker=None) -> OuterRecord:
    return OuterRecord(
        k=k,
        objective=cache.value(x),
        g_min=tracker.g_min if tracker else math.inf,
        g_max=tracker.g_max if tracker else -math.inf,
        partial_count=partials,
        pair_updates=updates,
        skipped=skipped,
        wall_time=time.perf_counter() - started,
    )


def run_baseline(
    prob: Problem,
    x0,
    method: Method,
    stop: Optional[BaselineStop] = None,
    seed: int = 0,
) -> Tuple[FeasiblePoint, RunTrace]:
    """
    Run RCD_unif, RCD_Lips or MVP. With ``stop.f_target`` set the run ends
    once the normalized error drops to ``stop.nu``; otherwise RCD uses the
    G_min/G_max rule over each block of n samples and MVP its violation rule.
    """
    if method is Method.AC2CD:
        raise ConfigError("run_baseline does not run AC2CD; use solver.solve")
    stop = stop or BaselineStop()
    x = project_report_feasibility(x0, prob)
    n = prob.n
    cache = prob.objective.new_cache(x)
    started = time.perf_counter()
    trace = RunTrace(method=method)
    partials = updates = skipped = 0

    trace.records.append(_outer_record(0, cache, x, 0, 0, 0, started))
    if n == 1 or (stop.f_target is not None and stop.target_reached(trace.final.objective)):
        trace.status = TerminalStatus.CONVERGED
        return x, trace

    logger.info(f"{method.value} start: n={n}, target={stop.f_target}")
    inner_steps = 0
    try:
        if method is Method.MVP:
            # with a target, only exact stationarity ends the run early
            mvp_epsilon = stop.mvp_epsilon if stop.f_target is None else 0.0
            for k in range(1, stop.max_outer + 1):
                if inner_steps >= stop.inner_budget:
                    trace.status = TerminalStatus.MAX_OUTER
                    break
                try:
                    stationary, _, record = mvp_step(x, cache, prob.bounds, mvp_epsilon)
                except EmptyIndexSet:
                    stationary = True
                partials += n
                inner_steps += 1
                if stationary:
                    trace.status = TerminalStatus.CONVERGED
                    break
                updates += int(record.moved)
                if k % settings.CACHE_REFRESH_INTERVAL == 0:
                    cache.refresh(x)
                trace.records.append(_outer_record(k, cache, x, partials, updates, 0, started))
                if stop.f_target is not None and stop.target_reached(trace.final.objective):
                    trace.status = TerminalStatus.CONVERGED
                    break
            else:
                trace.status = TerminalStatus.MAX_OUTER
        else:
            mode = SamplerMode.UNIFORM if method is Method.RCD_UNIF else SamplerMode.LIPSCHITZ_WEIGHTED
            constants = sampling_constants(prob.objective) if mode is SamplerMode.LIPSCHITZ_WEIGHTED else None
            sampler = PairSampler(n, mode, constants, np.random.default_rng(seed))
            stepper = rcd_stepper(prob.objective)
            tracker = GradientTracker(prob.bounds)
            for k in range(1, stop.max_outer + 1):
                if inner_steps + n > stop.inner_budget:
                    trace.status = TerminalStatus.MAX_OUTER
                    break
                tracker.reset()
                for _ in range(n):
                    record, used = rcd_step(x, sampler.sample(), cache, prob.bounds, stepper, tracker)
                    partials += used
                    updates += int(record.moved)
                    skipped += int(record.skipped)
                inner_steps += n
                if k % settings.CACHE_REFRESH_INTERVAL == 0:
                    cache.refresh(x)
                done = False
                if stop.f_target is None and check_termination(tracker.g_min, tracker.g_max, stop.epsilon):
                    done, used = final_sweep(x, cache, tracker, stop.epsilon)
                    partials += used
                trace.records.append(
                    _outer_record(k, cache, x, partials, updates, skipped, started, tracker)
                )
                if stop.f_target is not None:
                    done = stop.target_reached(trace.final.objective)
                if done:
                    trace.status = TerminalStatus.CONVERGED
                    break
            else:
                trace.status = TerminalStatus.MAX_OUTER
    except StepsizeError as e:
        logger.error(f"{method.value} stepsize failure: {e}")
        trace.status = TerminalStatus.NUMERICAL_FAILURE
        trace.note(str(e))

    if trace.status is None:
        trace.status = TerminalStatus.MAX_OUTER
    logger.info(
        f"{method.value} finished: status={trace.status.value}, outer={trace.outer_iterations}, "
        f"f={trace.final.objective:.12g}"
    )
    return x, trace
