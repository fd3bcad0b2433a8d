import math

import numpy as np
import pytest

from ac2cd.core.errors import ConfigError, OptimumUnavailable
from ac2cd.models.base import ExtendedReal
from ac2cd.models.solver import ArmijoRule, ExactRule, LipschitzRule, QuadraticRule
from ac2cd.services.datasets import load_svm_dual, make_toy_svm_dataset
from ac2cd.services.generators import chebyshev_from_points, gen_chebyshev, gen_logexp, gen_nonconvex, starting_point
from ac2cd.services.objectives import QuadraticObjective
from ac2cd.services.solver import solve
from ac2cd.services.verification import (
    TransformedProblem,
    asymptotic_rate_check,
    brute_force_line_search,
    cache_coherence_check,
    eigen_statistics,
    fitted_contraction,
    gradient_consistency_check,
    line_search_oracle_check,
    logexp_optimum,
    random_feasible_point,
    rate_bound_check,
    rate_constant,
    stepsize_contract_check,
    svm_transform_check,
    trajectory_equivalence_check,
    transformed_curvature_check,
)


def test_random_feasible_point_stays_feasible(rng):
    instance = gen_chebyshev(10, 3, seed=0)
    prob = instance.problem
    x = random_feasible_point(prob, starting_point(instance, 0), rng, moves=200)
    assert np.all(x >= 0.0)
    assert np.sum(x) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "instance",
    [gen_chebyshev(12, 4, 0), gen_logexp(12, 0), gen_nonconvex(12, 5, 0.5, 0)],
    ids=["chebyshev", "logexp", "nonconvex"],
)
def test_gradients_agree_with_finite_differences(instance):
    result = gradient_consistency_check(instance.problem, starting_point(instance, 0), seed=1, points=5)
    assert result.passed, result.detail


def test_brute_force_finds_quadratic_minimum():
    obj = QuadraticObjective(np.eye(2), np.zeros(2))
    z = np.array([0.8, 0.2])
    cache = obj.new_cache(z)
    line = cache.line(z, 0, 1, -0.6)
    assert brute_force_line_search(line, ExtendedReal.finite(4.0 / 3.0)) == pytest.approx(0.5, abs=1e-7)
    assert brute_force_line_search(line, ExtendedReal.finite(0.2)) == pytest.approx(0.2)


def test_brute_force_needs_finite_interval():
    obj = QuadraticObjective(np.eye(2), np.zeros(2))
    line = obj.new_cache(np.zeros(2)).line(np.zeros(2), 0, 1, 1.0)
    with pytest.raises(ValueError):
        brute_force_line_search(line, ExtendedReal.pos_inf())


@pytest.mark.parametrize(
    "instance",
    [gen_chebyshev(15, 4, 2), gen_logexp(15, 2), gen_nonconvex(15, 6, 0.5, 2)],
    ids=["chebyshev", "logexp", "nonconvex"],
)
def test_exact_line_search_against_brute_force(instance):
    result = line_search_oracle_check(instance, starting_point(instance, 2), probes=15, seed=2, grid=20_000)
    assert result.passed, result.detail


@pytest.mark.parametrize("rule", [ArmijoRule(), ArmijoRule(a_lower=0.5, a_upper=2.0), QuadraticRule(), ExactRule()],
                         ids=["armijo", "armijo_range", "quadratic", "exact"])
def test_stepsize_contracts_on_quadratics(rule):
    instance = gen_chebyshev(12, 4, seed=3)
    result = stepsize_contract_check(instance, starting_point(instance, 3), rule, steps=500, seed=3)
    assert result.passed, result.detail


@pytest.mark.parametrize("rule", [ArmijoRule(), LipschitzRule(), ExactRule()], ids=["armijo", "lipschitz", "exact"])
def test_stepsize_contracts_on_logexp(rule):
    instance = gen_logexp(12, seed=3)
    result = stepsize_contract_check(instance, np.zeros(12), rule, steps=500, seed=3)
    assert result.passed, result.detail


def test_cache_stays_coherent():
    instance = gen_nonconvex(20, 8, 0.5, seed=4)
    result = cache_coherence_check(instance, starting_point(instance, 4), moves=2000, seed=4)
    assert result.passed, result.detail


def test_cache_fault_is_detected(mocker):
    instance = gen_chebyshev(20, 8, seed=4)

    def corrupt(cache):
        cache.r = cache.r + 1.0

    fault = mocker.Mock(side_effect=corrupt)
    result = cache_coherence_check(instance, starting_point(instance, 4), moves=100, seed=4, fault=fault)
    fault.assert_called_once()
    assert not result.passed


class TestTransformedProblem:
    def test_round_trip(self):
        prob = gen_logexp(5, seed=0).problem
        reduced = TransformedProblem(prob, 2)
        y = np.array([1.0, -2.0, 0.5, 3.0])
        x = reduced.to_x(y)
        assert x[2] == pytest.approx(-2.5)
        np.testing.assert_array_equal(reduced.to_y(x), y)
        assert reduced.position(4) == 3
        assert reduced.position(1) == 1

    def test_gradient_is_difference_of_partials(self):
        prob = gen_logexp(5, seed=0).problem
        reduced = TransformedProblem(prob, 0)
        y = np.array([0.3, -0.1, 0.7, -0.2])
        grad = prob.objective.gradient(reduced.to_x(y))
        np.testing.assert_allclose(reduced.gradient(y), grad[1:] - grad[0])
        assert reduced.partial(3, y) == pytest.approx(grad[3] - grad[0])

    def test_curvature_at_least_strong_convexity(self):
        prob = gen_logexp(8, seed=1).problem
        result = transformed_curvature_check(prob, 3, prob.objective.strong_convexity, seed=1, probes=5)
        assert result.passed, result.detail


@pytest.mark.parametrize("jbar", [0, 7])
def test_trajectory_matches_cyclic_descent_on_reduced_problem(jbar):
    prob = gen_logexp(20, seed=6).problem
    assert trajectory_equivalence_check(prob, jbar, sweep_count=10, seed=6) <= 1e-9


def test_trajectory_check_needs_unbounded_problem():
    with pytest.raises(ConfigError):
        trajectory_equivalence_check(gen_chebyshev(5, 2, 0).problem, 0)


def test_logexp_optimum_satisfies_stationarity():
    instance = gen_logexp(40, seed=8, regime=1)
    x, f, lam = logexp_optimum(instance)
    grad = instance.problem.objective.gradient(x)
    assert abs(np.sum(x)) <= 1e-9
    np.testing.assert_allclose(grad, lam, atol=1e-8 * (1.0 + abs(lam)))
    assert f == pytest.approx(instance.problem.objective.value(x))


def test_logexp_optimum_refuses_quadratics():
    with pytest.raises(OptimumUnavailable):
        logexp_optimum(gen_chebyshev(5, 2, 0))


def test_rate_constant_is_a_contraction():
    instance = gen_logexp(10, seed=0)
    assert 0.0 < rate_constant(instance, 0) < 1.0


def test_fitted_contraction_recovers_geometric_rate():
    errors = [0.5 * 0.8 ** k for k in range(80)]
    rate, residual, used = fitted_contraction(errors, window=50)
    assert rate == pytest.approx(0.8, rel=1e-10)
    assert residual == pytest.approx(0.0, abs=1e-10)
    assert used == 50


def test_rate_bound_holds_on_logexp():
    instance = gen_logexp(10, seed=3)
    report = rate_bound_check(instance, max_outer=60, seed=3)
    assert report.violations == 0
    assert report.worst_ratio is None or report.worst_ratio <= report.bound + 1e-12


def test_rate_bound_check_needs_logexp():
    with pytest.raises(ConfigError):
        rate_bound_check(gen_chebyshev(5, 2, 0))


def test_asymptotic_rate_on_simplex_norm():
    # 1/2 |x|^2 - 1/2 sum(x) on the simplex, f* = -0.4 at the barycenter
    instance = chebyshev_from_points(np.eye(5) / math.sqrt(2.0))
    report = asymptotic_rate_check(instance, np.eye(5)[0], max_outer=500, f_star=-0.4)
    assert report.interior
    assert report.fitted_rate < 1.0


def test_eigen_statistics_counts_negative_directions():
    instance = gen_nonconvex(6, 4, 0.5, seed=0)
    stats = eigen_statistics(instance)
    assert stats.n_negative + stats.n_positive + stats.n_zero == 6
    assert stats.n_negative == 2
    assert stats.n_zero == 2
    assert stats.min_eigenvalue < 0.0 < stats.max_eigenvalue


def test_svm_violation_matches_unit_weight_residual(tmp_path):
    instance = load_svm_dual(make_toy_svm_dataset(tmp_path / "toy.libsvm", n=30, m=5, seed=1), C=1.0)
    x0 = starting_point(instance, 1)
    assert svm_transform_check(instance, x0).passed
    x, _ = solve(instance.problem, x0, None)
    result = svm_transform_check(instance, x)
    assert result.passed, result.detail
