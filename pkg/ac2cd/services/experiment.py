"""
Benchmark runner: experiment configs, repetitions, summaries, error curves
and the verification suite

ac2cd/services/experiment.py
"""


import asyncio
import configparser
import logging
import math
import tempfile
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from ac2cd.core.config import settings
from ac2cd.core.errors import ConfigError
from ac2cd.models.base import Family, Method, VerifyLevel
from ac2cd.models.experiment import ExperimentConfig, MethodSpec
from ac2cd.models.instance import GeneratedInstance
from ac2cd.models.solver import ArmijoRule, LipschitzRule
from ac2cd.models.trace import CurvePoint, RunTrace, SummaryRow
from ac2cd.models.verification import CheckResult, RateReport, VerificationReport
from ac2cd.services.baselines import BaselineStop, normalized_error, run_baseline
from ac2cd.services.datasets import load_svm_dual, make_toy_svm_dataset
from ac2cd.services.generators import (
    chebyshev_from_points,
    gen_chebyshev,
    gen_logexp,
    gen_nonconvex,
    starting_point,
)
from ac2cd.services.serialization import load_instance
from ac2cd.services.solver import solve
from ac2cd.services.trace_collector import TraceCollector
from ac2cd.services import verification

logger = logging.getLogger(__name__)

CURVE_FLOOR = 1e-16
METHOD_PREFIX = "method."


# Config file

def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ", ".join(str(v) for v in value)
    return str(value)


def dump_experiment_config(config: ExperimentConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    data = config.model_dump(mode="json", exclude_none=True)
    for section in ("instance", "stop", "repetitions", "output"):
        parser[section] = {k: _format_value(v) for k, v in data[section].items()}
    for method in data["methods"]:
        name = method.pop("method")
        parser[f"{METHOD_PREFIX}{name}"] = {k: _format_value(v) for k, v in method.items()}
    lines = []
    for section in parser.sections():
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {value}" for key, value in parser[section].items())
        lines.append("")
    return "\n".join(lines)


def parse_experiment_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed experiment config: {e}")

    data: Dict[str, object] = {"methods": []}
    for section in parser.sections():
        values = dict(parser[section])
        if section.startswith(METHOD_PREFIX):
            data["methods"].append({"method": section[len(METHOD_PREFIX):], **values})
        elif section in ("instance", "stop", "repetitions", "output"):
            data[section] = values
        else:
            raise ConfigError(f"unknown config section [{section}]")
    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        logger.error(f"Invalid experiment config: {e}")
        raise ConfigError(f"invalid experiment config: {e}")


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    return parse_experiment_config(path.read_text(encoding="utf-8"))


def save_experiment_config(config: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dump_experiment_config(config), encoding="utf-8")
    return path


# Instances and runs

def build_instance(config: ExperimentConfig) -> GeneratedInstance:
    spec = config.instance
    if spec.path is not None:
        return load_instance(spec.path)
    if spec.family is Family.CHEBYSHEV:
        return gen_chebyshev(spec.n, spec.m, spec.seed)
    if spec.family is Family.LOGEXP:
        return gen_logexp(spec.n, spec.seed, spec.regime)
    if spec.family is Family.NONCONVEX:
        return gen_nonconvex(spec.n, spec.m, spec.neg_fraction, spec.seed)
    return load_svm_dual(spec.dataset, spec.C)


def run_method(
    instance: GeneratedInstance,
    spec: MethodSpec,
    config: ExperimentConfig,
    x0,
    seed: int,
    f_target: Optional[float] = None,
) -> RunTrace:
    if spec.method is Method.AC2CD:
        _, trace = solve(instance.problem, x0, spec.solver_config(config.stop, seed))
        return trace
    stop = BaselineStop(
        f_target=f_target,
        nu=config.stop.nu,
        epsilon=config.stop.epsilon,
        mvp_epsilon=config.stop.mvp_epsilon,
        max_outer=config.stop.max_outer,
        inner_budget=config.stop.inner_budget,
    )
    _, trace = run_baseline(instance.problem, x0, spec.method, stop, seed)
    return trace


def run_repetition(
    instance: GeneratedInstance, config: ExperimentConfig, seed: int
) -> List[Tuple[Method, RunTrace]]:
    """AC2CD first; on convex families its final value is the baselines' target."""
    x0 = starting_point(instance, seed)
    ordered = sorted(config.methods, key=lambda m: m.method is not Method.AC2CD)
    f_target = None
    results = []
    for spec in ordered:
        trace = run_method(instance, spec, config, x0, seed, f_target)
        if spec.method is Method.AC2CD and instance.is_convex:
            f_target = trace.final.objective
        results.append((spec.method, trace))
    return results


def emit_error_curve(trace: RunTrace, f_target: float) -> List[CurvePoint]:
    """(elapsed seconds, normalized error) per outer record; non-positive errors clamped and flagged."""
    curve = []
    for record in trace.records:
        err = normalized_error(record.objective, f_target)
        if err <= 0.0:
            curve.append(CurvePoint(elapsed_seconds=record.wall_time, normalized_error=CURVE_FLOOR, clamped=True))
        else:
            curve.append(CurvePoint(elapsed_seconds=record.wall_time, normalized_error=err))
    return curve


def summary_row(method: Method, repetition: str, trace: RunTrace) -> SummaryRow:
    return SummaryRow(
        method=method.value,
        repetition=repetition,
        final_objective=trace.final.objective,
        outer_iterations=trace.outer_iterations,
        wall_time=trace.final.wall_time,
        partial_count=trace.final.partial_count,
        status=trace.status.value,
    )


def average_row(rows: List[SummaryRow]) -> SummaryRow:
    statuses = Counter(r.status for r in rows)
    status = rows[0].status if len(statuses) == 1 else ",".join(f"{k}:{v}" for k, v in sorted(statuses.items()))
    return SummaryRow(
        method=rows[0].method,
        repetition="avg",
        final_objective=float(np.mean([r.final_objective for r in rows])),
        outer_iterations=float(np.mean([r.outer_iterations for r in rows])),
        wall_time=float(np.mean([r.wall_time for r in rows])),
        partial_count=float(np.mean([r.partial_count for r in rows])),
        status=status,
    )


async def run_experiment(config: ExperimentConfig, collector: Optional[TraceCollector] = None) -> List[SummaryRow]:
    """
    Run every repetition (in parallel up to AC2CD_THREADS), hand traces to the
    collector and write the summary. Rows are ordered by method, then
    repetition, followed by an ``avg`` row when there is more than one
    repetition.
    """
    instance = build_instance(config)
    seeds = config.repetitions.seed_list
    collector = collector or TraceCollector(config.output.directory, include_wall_time=config.output.include_wall_time)
    await collector.start()
    logger.info(
        f"Experiment: family={instance.family.value}, n={instance.n}, m={instance.m}, "
        f"methods={[m.method.value for m in config.methods]}, repetitions={len(seeds)}"
    )

    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=settings.AC2CD_THREADS) as pool:
        futures = [loop.run_in_executor(pool, run_repetition, instance, config, seed) for seed in seeds]
        outcomes = await asyncio.gather(*futures)

    per_method: Dict[Method, List[SummaryRow]] = {}
    for r, results in enumerate(outcomes):
        f_target = next((t.final.objective for m, t in results if m is Method.AC2CD), None)
        for method, trace in results:
            curve = None
            if config.output.write_curves and instance.is_convex and f_target is not None:
                curve = emit_error_curve(trace, f_target)
            await collector.add_trace(f"{method.value}_rep{r}", trace, curve)
            per_method.setdefault(method, []).append(summary_row(method, str(r), trace))

    rows: List[SummaryRow] = []
    for spec in config.methods:
        method_rows = per_method.get(spec.method, [])
        rows.extend(method_rows)
        if len(method_rows) > 1:
            rows.append(average_row(method_rows))
    await collector.write_summary(rows)
    await collector.stop()
    return rows


# Verification suite

def _check_from_deviation(name: str, deviation: float, tol: float) -> CheckResult:
    return CheckResult(name=name, passed=deviation <= tol, margin=deviation / tol, detail=f"max deviation {deviation:.3e}")


def _rate_check(name: str, report) -> CheckResult:
    if report.bound is not None:
        passed = report.violations == 0 and report.fitted_rate <= report.bound
        detail = f"fitted {report.fitted_rate:.6g}, bound {report.bound:.12g}, {report.violations} violations"
        return CheckResult(name=name, passed=passed, margin=report.fitted_rate, detail=detail)
    if report.finding:
        return CheckResult(name=name, passed=True, margin=report.fitted_rate, detail=f"finding: {report.finding}")
    return CheckResult(
        name=name,
        passed=report.fitted_rate < 1.0,
        margin=report.fitted_rate,
        detail=f"index {report.stabilized_index}, fitted {report.fitted_rate:.6g} over {report.window}",
    )


def _rate_bound_summary(reports: List[RateReport], n: int) -> CheckResult:
    violations = sum(r.violations for r in reports)
    above = sum(1 for r in reports if r.bound is None or r.fitted_rate > r.bound)
    worst = max(reports, key=lambda r: r.fitted_rate / (r.bound or 1.0))
    return CheckResult(
        name="rate_bound",
        passed=violations == 0 and above == 0,
        margin=worst.fitted_rate / (worst.bound or 1.0),
        detail=(
            f"n={n}, {len(reports)} instances, {violations} violations, "
            f"worst fitted {worst.fitted_rate:.6g} against bound {worst.bound}"
        ),
    )


def _corrupt_cache(cache) -> None:
    if hasattr(cache, "r"):
        cache.r = cache.r + 1.0


def _reproduction_check(seed: int) -> CheckResult:
    """All methods reach normalized error <= nu against AC2CD on Chebyshev n=500, m=50."""
    config = ExperimentConfig(
        instance={"family": "chebyshev", "n": 500, "m": 50, "seed": seed},
        methods=[{"method": m.value} for m in Method],
    )
    instance = build_instance(config)
    results = run_repetition(instance, config, seed)
    f_target = results[0][1].final.objective
    worst = max(normalized_error(t.final.objective, f_target) for _, t in results)
    return CheckResult(
        name="chebyshev_reproduction",
        passed=worst <= config.stop.nu,
        margin=worst / config.stop.nu,
        detail=f"worst normalized error {worst:.3e}",
    )


def verify_suite(level: VerifyLevel = VerifyLevel.FAST, inject_cache_fault: bool = False, seed: int = 0) -> VerificationReport:
    """Run the oracle checks; ``fast`` keeps every instance at n <= 100."""
    full = level is VerifyLevel.FULL
    n = 60 if full else 30
    probes = 100 if full else 20
    steps = 10_000 if full else 2_000
    report = VerificationReport(level=level)

    with tempfile.TemporaryDirectory() as tmp:
        dataset = make_toy_svm_dataset(Path(tmp) / "toy.libsvm", n=n, m=8, seed=seed)
        instances = [
            gen_chebyshev(n, 5, seed),
            gen_logexp(n, seed, regime=2),
            gen_nonconvex(n, n, 0.5, seed),
            load_svm_dual(dataset, C=1.0),
        ]

    for instance in instances:
        family = instance.family.value
        x0 = starting_point(instance, seed)
        report.checks.append(
            verification.gradient_consistency_check(
                instance.problem, x0, seed, points=5 if not full else 20, name=f"gradient[{family}]"
            )
        )
        report.checks.append(verification.line_search_oracle_check(instance, x0, probes, seed))
        rule = LipschitzRule() if instance.family is Family.LOGEXP else ArmijoRule()
        report.checks.append(verification.stepsize_contract_check(instance, x0, rule, steps, seed))
        if instance.problem.objective.is_quadratic:
            fault = _corrupt_cache if inject_cache_fault else None
            report.checks.append(verification.cache_coherence_check(instance, x0, 10_000, seed, fault))
        if instance.family is Family.SVM_DUAL:
            x, _ = solve(instance.problem, x0)
            report.checks.append(verification.svm_transform_check(instance, x))

    # full mode checks the stated sizes: n = 50 trajectories and n = 100 rate bounds over 20 seeds
    seeds = list(range(seed, seed + 20)) if full else [seed]
    deviation = max(
        verification.trajectory_equivalence_check(gen_logexp(50, s, regime=2).problem, 0, 10, s) for s in seeds
    )
    report.checks.append(_check_from_deviation("trajectory_equivalence", deviation, 1e-9))

    rate_n = 100 if full else 20
    rate_reports = [
        verification.rate_bound_check(gen_logexp(rate_n, s, regime=2), max_outer=200 if full else 100, seed=s)
        for s in seeds
    ]
    report.checks.append(_rate_bound_summary(rate_reports, rate_n))

    small = gen_logexp(20, seed, regime=2)
    jbar = 0
    report.checks.append(
        verification.transformed_curvature_check(
            small.problem, jbar, small.problem.objective.strong_convexity, seed
        )
    )

    simplex_norm = chebyshev_from_points(np.eye(5) / math.sqrt(2.0))
    rate = verification.asymptotic_rate_check(simplex_norm, starting_point(simplex_norm, seed), seed=seed, f_star=-0.4)
    report.checks.append(_rate_check("asymptotic_rate[simplex]", rate))

    if full:
        report.checks.append(_reproduction_check(seed))

    for check in report.checks:
        log = logger.info if check.passed else logger.error
        log(f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}")
    return report
