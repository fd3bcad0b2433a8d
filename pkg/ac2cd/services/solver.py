"""
Almost cyclic two-coordinate descent

Each outer iteration fixes an index j(k) whose coordinate is far enough from
its bounds and sweeps a permutation of all coordinates, pairing every p with
j(k). Partial derivatives are only ever computed for the two coordinates of
the working pair; termination is decided from the extremes of those partials.

ac2cd/services/solver.py
"""


import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from ac2cd.core.config import settings
from ac2cd.core.errors import DegenerateLevelSet, EmptyIndexSet, StepsizeError
from ac2cd.models.base import FeasiblePoint, IndexRule, Method, TerminalStatus
from ac2cd.models.objective import ObjectiveCache
from ac2cd.models.problem import Problem
from ac2cd.models.solver import Ac2cdConfig
from ac2cd.models.trace import InnerStepRecord, OuterRecord, RunTrace
from ac2cd.services.feasibility import is_stationary_or_singleton, kkt_residual, project_report_feasibility
from ac2cd.services.index_selection import select_index_rate_mode, select_index_threshold
from ac2cd.services.pair_move import GradientTracker, take_pair_step
from ac2cd.services.stepsize import Stepper, default_rule

logger = logging.getLogger(__name__)

StepObserver = Callable[[InnerStepRecord, np.ndarray], None]


@dataclass
class SolverState:
    x: np.ndarray
    cache: ObjectiveCache
    tracker: GradientTracker
    rng: np.random.Generator
    k: int = 0
    j: Optional[int] = None
    permutation: Optional[np.ndarray] = None
    partial_count: int = 0
    pair_updates: int = 0
    skipped: int = 0
    last_sweep: List[InnerStepRecord] = field(default_factory=list)


def run_inner_sweep(
    state: SolverState,
    prob: Problem,
    stepper: Stepper,
    observer: Optional[StepObserver] = None,
) -> List[InnerStepRecord]:
    """n inner iterations pairing every p of state.permutation with state.j."""
    records = []
    x, j = state.x, state.j
    for i, p in enumerate(state.permutation):
        record, used = take_pair_step(
            x, state.cache, prob.bounds, int(p), j, stepper, state.tracker, state.k, i
        )
        state.partial_count += used
        state.skipped += record.skipped
        state.pair_updates += record.moved
        records.append(record)
        if observer is not None:
            observer(record, x)
    state.last_sweep = records
    return records


def check_termination(g_min: float, g_max: float, epsilon: float) -> bool:
    """G_min - G_max >= -epsilon; never true before both extremes were seen."""
    if math.isinf(g_min) or math.isinf(g_max):
        return False
    return g_min - g_max >= -epsilon


def final_sweep(
    x: FeasiblePoint, cache: ObjectiveCache, tracker: GradientTracker, epsilon: float
) -> Tuple[bool, int]:
    """
    Evaluate the partials not computed during the last outer iteration and
    re-check the stop rule over all n coordinates. Returns (passed, partials used).
    """
    missing = np.flatnonzero(~tracker.evaluated)
    for h in missing:
        tracker.observe(int(h), cache.partial(int(h), x), x[h])
    return check_termination(tracker.g_min, tracker.g_max, epsilon), int(missing.size)


class StallMonitor:
    """
    Flags windows where the feasible stepsizes stay bounded away from zero
    while the directional derivatives stop shrinking. Diagnostic only.
    """

    def __init__(self, window: int):
        self.window = window
        self.history: List[Tuple[float, float]] = []
        self.fired = False

    def update(self, sweep: List[InnerStepRecord]) -> Optional[str]:
        positive = [float(r.alpha_max) for r in sweep if r.g != 0.0 and float(r.alpha_max) > 0.0]
        if not positive:
            self.history.clear()
            return None
        largest = max(r.g * r.g for r in sweep)
        self.history.append((min(positive), largest))
        if len(self.history) > self.window:
            self.history.pop(0)
        if self.fired or len(self.history) < self.window:
            return None
        floor = min(a for a, _ in self.history)
        if floor > 1e-8 and self.history[-1][1] >= self.history[0][1] > 0.0:
            self.fired = True
            return (
                f"directional derivatives did not shrink over {self.window} outer iterations "
                f"with stepsize bound {floor:.3e}"
            )
        return None


def _select_index(state: SolverState, prob: Problem, config: Ac2cdConfig) -> int:
    if config.index_rule is IndexRule.FIXED:
        return config.fixed_index
    if config.index_rule is IndexRule.RATE:
        return select_index_rate_mode(state.x, prob.bounds, config.tau, state.j)
    return select_index_threshold(state.x, prob.bounds, config.tau)


def _record(state: SolverState, config: Ac2cdConfig, prob: Problem, started: float) -> OuterRecord:
    kkt = None
    if config.track_kkt:
        try:
            kkt = kkt_residual(state.x, state.cache.gradient(state.x), prob.bounds)
        except EmptyIndexSet:
            kkt = 0.0
    return OuterRecord(
        k=state.k,
        objective=state.cache.value(state.x),
        kkt_residual=kkt,
        g_min=state.tracker.g_min,
        g_max=state.tracker.g_max,
        partial_count=state.partial_count,
        pair_updates=state.pair_updates,
        skipped=state.skipped,
        wall_time=time.perf_counter() - started,
        fixed_index=state.j,
    )


def solve(
    prob: Problem,
    x0,
    config: Optional[Ac2cdConfig] = None,
    observer: Optional[StepObserver] = None,
) -> Tuple[FeasiblePoint, RunTrace]:
    config = config or Ac2cdConfig()
    x = project_report_feasibility(x0, prob)
    started = time.perf_counter()
    trace = RunTrace(method=Method.AC2CD)
    if config.fixed_index is not None and config.fixed_index >= prob.n:
        raise DegenerateLevelSet(f"fixed index {config.fixed_index} out of range for n={prob.n}")

    state = SolverState(
        x=x,
        cache=prob.objective.new_cache(x),
        tracker=GradientTracker(prob.bounds),
        rng=np.random.default_rng(config.rng_seed),
    )
    rule = config.stepsize or default_rule(prob.objective)
    stepper = Stepper(rule, prob.objective)
    trace.records.append(_record(state, config, prob, started))

    if prob.n == 1:
        trace.status = TerminalStatus.CONVERGED
        trace.note("single variable: feasible set is one point")
        return state.x, trace

    logger.info(f"AC2CD start: n={prob.n}, rule={config.index_rule.value}, stepsize={rule.kind}")
    monitor = StallMonitor(config.stall_window)
    state.permutation = np.arange(prob.n)

    for k in range(config.max_outer):
        state.k = k
        try:
            state.j = _select_index(state, prob, config)
        except DegenerateLevelSet as e:
            grad = state.cache.gradient(state.x)
            state.partial_count += prob.n
            if is_stationary_or_singleton(state.x, grad, prob.bounds, config.epsilon):
                trace.status = TerminalStatus.CONVERGED
                trace.note("no coordinate strictly inside its bounds; point is stationary")
            else:
                logger.error(f"Degenerate level set at outer iteration {k}: {e}")
                trace.status = TerminalStatus.NUMERICAL_FAILURE
                trace.note(f"{e}")
            break

        if config.shuffle_each_outer:
            state.permutation = state.rng.permutation(prob.n)
        state.tracker.reset()

        try:
            sweep = run_inner_sweep(state, prob, stepper, observer)
        except StepsizeError as e:
            logger.error(f"Stepsize failure at outer iteration {k}: {e}")
            trace.status = TerminalStatus.NUMERICAL_FAILURE
            trace.note(str(e))
            break

        state.k = k + 1
        if (k + 1) % settings.CACHE_REFRESH_INTERVAL == 0:
            drift = state.cache.refresh(state.x)
            if drift > 1e-8:
                logger.warning(f"Residual cache drift {drift:.3e} at outer iteration {k + 1}")

        record = _record(state, config, prob, started)
        if not math.isfinite(record.objective):
            trace.records.append(record)
            trace.status = TerminalStatus.NUMERICAL_FAILURE
            trace.note("objective is not finite")
            break

        stall = monitor.update(sweep)
        if stall:
            logger.warning(f"Stall suspected: {stall}")
            trace.note(stall)

        stop = False
        if check_termination(state.tracker.g_min, state.tracker.g_max, config.epsilon):
            stop, used = final_sweep(state.x, state.cache, state.tracker, config.epsilon)
            state.partial_count += used
            record.partial_count = state.partial_count
            record.g_min, record.g_max = state.tracker.g_min, state.tracker.g_max
        trace.records.append(record)
        logger.debug(
            f"k={k + 1} f={record.objective:.12g} j={state.j} "
            f"Gmin={record.g_min:.6g} Gmax={record.g_max:.6g}"
        )
        if stop:
            trace.status = TerminalStatus.CONVERGED
            break
    else:
        trace.status = TerminalStatus.MAX_OUTER

    logger.info(
        f"AC2CD finished: status={trace.status.value}, outer={trace.outer_iterations}, "
        f"f={trace.final.objective:.12g}"
    )
    return state.x, trace
