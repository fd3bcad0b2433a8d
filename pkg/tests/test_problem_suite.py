import math
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from ac2cd.core.errors import InstanceError, LabelError, ParseError
from ac2cd.models.base import Family, TerminalStatus
from ac2cd.models.solver import Ac2cdConfig, ArmijoRule, ExactRule, QuadraticRule
from ac2cd.services.datasets import load_svm_dual, make_toy_svm_dataset, read_sparse_dataset, svm_labels
from ac2cd.services.generators import (
    chebyshev_center_radius,
    gen_chebyshev,
    gen_logexp,
    gen_nonconvex,
    logexp_from_coefficients,
    starting_point,
    svm_start,
)
from ac2cd.services.objectives import QuadraticObjective, SeparableLine, SeparableLogExp, rescale_problem
from ac2cd.services.solver import solve
from ac2cd.services.verification import finite_diff_gradient, logexp_optimum


class TestChebyshev:
    def test_generation_is_deterministic(self):
        a = gen_chebyshev(12, 3, seed=4)
        b = gen_chebyshev(12, 3, seed=4)
        np.testing.assert_array_equal(a.problem.objective.Q, b.problem.objective.Q)
        np.testing.assert_array_equal(a.problem.objective.q, b.problem.objective.q)

    def test_shape_and_feasible_set(self):
        instance = gen_chebyshev(12, 3, seed=0)
        assert instance.family is Family.CHEBYSHEV
        assert instance.problem.objective.Q.shape == (3, 12)
        assert instance.problem.level == 1.0
        assert np.all(instance.problem.bounds.lower == 0.0)
        assert np.all(np.isinf(instance.problem.bounds.upper))

    def test_radius_covers_every_point(self):
        instance = gen_chebyshev(25, 3, seed=1)
        x, _ = solve(instance.problem, starting_point(instance, 1), Ac2cdConfig(epsilon=1e-8))
        center, radius = chebyshev_center_radius(instance, x)
        points = instance.problem.objective.Q / math.sqrt(2.0)
        distances = np.linalg.norm(points - center[:, None], axis=0)
        assert radius >= 0.0
        assert np.max(distances) <= radius * (1.0 + 1e-6)

    def test_rejects_tiny_dimensions(self):
        with pytest.raises(InstanceError):
            gen_chebyshev(1, 3, seed=0)


class TestLogExp:
    def test_lipschitz_constants(self):
        instance = gen_logexp(8, seed=0)
        obj = instance.problem.objective
        np.testing.assert_allclose(obj.coordinate_lipschitz(), obj.a + obj.b ** 2 / 4.0)
        assert obj.pair_lipschitz(0, 1) == pytest.approx(obj.lipschitz[0] + obj.lipschitz[1])

    @pytest.mark.parametrize("regime, a_max, c_max", [(1, 15.0, 15.0), (2, 2.0, 10.0)])
    def test_regime_ranges(self, regime, a_max, c_max):
        obj = gen_logexp(200, seed=3, regime=regime).problem.objective
        assert np.all((obj.a > 0) & (obj.a <= a_max))
        assert np.all(np.abs(obj.c) <= c_max)

    def test_unknown_regime(self):
        with pytest.raises(InstanceError):
            gen_logexp(5, seed=0, regime=3)

    def test_non_positive_curvature_is_rejected(self):
        with pytest.raises(InstanceError):
            SeparableLogExp([1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0])

    def test_closed_form_optimum_without_log_term(self):
        instance = logexp_from_coefficients([1.0, 1.0], [0.0, 0.0], [1.0, -1.0], [0.0, 0.0])
        x, f, lam = logexp_optimum(instance)
        np.testing.assert_allclose(x, [1.0, -1.0], atol=1e-12)
        assert f == pytest.approx(2.0 * math.log(2.0))
        assert lam == pytest.approx(0.0, abs=1e-12)

    def test_quadratic_part_closed_form(self, rng):
        a = rng.uniform(0.5, 2.0, 6)
        c = rng.uniform(-3.0, 3.0, 6)
        instance = logexp_from_coefficients(a, np.zeros(6), c, np.zeros(6))
        x, _, _ = logexp_optimum(instance)
        lam = -np.sum(c) / np.sum(1.0 / a)
        np.testing.assert_allclose(x, c + lam / a, atol=1e-10)

    def test_solver_matches_multiplier_oracle(self):
        instance = gen_logexp(10, seed=5)
        _, f_star, _ = logexp_optimum(instance)
        _, trace = solve(instance.problem, np.zeros(10), Ac2cdConfig(stepsize=ExactRule(), epsilon=1e-9, max_outer=20000))
        assert trace.final.objective == pytest.approx(f_star, rel=1e-8, abs=1e-8)

    def test_coordinate_delta_matches_value_difference(self):
        obj = gen_logexp(5, seed=1).problem.objective
        for i, xi in [(0, 3.0), (2, -4.0), (4, 0.1)]:
            for t in [1e-3, 0.5, -2.0]:
                expected = obj.coordinate_value(i, xi + t) - obj.coordinate_value(i, xi)
                assert obj.coordinate_delta(i, xi, t) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_coordinate_delta_resolves_steps_below_value_precision(self):
        obj = gen_logexp(5, seed=1).problem.objective
        xi = 7.0
        for t in [1e-14, -3e-15]:
            # second-order term is below 1e-27 here
            expected = obj.coordinate_derivative(0, xi) * t
            assert obj.coordinate_delta(0, xi, t) == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("xi, t, expected", [(50.0, -800.0, 279950.0), (-50.0, 800.0, 280750.0)])
    def test_coordinate_delta_extreme_arguments(self, xi, t, expected):
        obj = SeparableLogExp([1.0, 1.0], [1.0, 1.0], [0.0, 0.0], [0.0, 0.0])
        value = obj.coordinate_delta(0, xi, t)
        assert np.isfinite(value)
        assert value == pytest.approx(expected, rel=1e-12)

    def test_pair_line_decrease_near_optimum(self):
        instance = gen_logexp(200, seed=1, regime=2)
        x = np.array(logexp_optimum(instance)[0], dtype=float)
        x[0] += 1e-7
        x[1] -= 1e-7
        obj = instance.problem.objective
        g = float(obj.coordinate_derivative(0, x[0]) - obj.coordinate_derivative(1, x[1]))
        assert g != 0.0
        line = SeparableLine(obj, x, 0, 1, g)
        for alpha in [1e-6, 1e-9]:
            assert line.delta(alpha) == pytest.approx(line.slope(0.0) * alpha, rel=1e-3, abs=1e-30)

    @pytest.mark.parametrize("regime", [1, 2])
    def test_armijo_converges_to_tight_tolerance(self, regime):
        instance = gen_logexp(100, seed=4, regime=regime)
        _, f_star, _ = logexp_optimum(instance)
        config = Ac2cdConfig(stepsize=ArmijoRule(), epsilon=1e-8, max_outer=20000)
        _, trace = solve(instance.problem, np.zeros(100), config)
        assert trace.status is TerminalStatus.CONVERGED, trace.diagnostic
        assert trace.final.objective == pytest.approx(f_star, rel=1e-9, abs=1e-9)

    def test_strong_convexity_along_pair_directions(self, rng):
        obj = gen_logexp(6, seed=2).problem.objective
        x = rng.standard_normal(6)
        h = 1e-5
        curvature = obj.second_derivative(x)
        for i in range(6):
            e = np.zeros(6)
            e[i] = h
            fd = (obj.gradient(x + e)[i] - obj.gradient(x - e)[i]) / (2.0 * h)
            assert fd == pytest.approx(curvature[i], rel=1e-5)
        for i, j in [(0, 1), (2, 5), (3, 4)]:
            # d^T H d for d = e_i - e_j
            assert curvature[i] + curvature[j] >= 2.0 * obj.strong_convexity


class TestNonconvex:
    def test_negative_entry_count(self):
        instance = gen_nonconvex(10, 4, 0.5, seed=0)
        D = instance.problem.objective.D
        assert np.sum(D < 0) == 2
        assert instance.params["n_neg"] == 2
        assert instance.params["n_pos"] == 2
        assert not instance.is_convex

    def test_bad_fraction(self):
        with pytest.raises(InstanceError):
            gen_nonconvex(10, 4, 1.0, seed=0)

    def test_diagonal_shape_mismatch(self):
        with pytest.raises(InstanceError):
            QuadraticObjective(np.ones((2, 3)), np.zeros(3), D=[1.0])


class TestQuadraticCache:
    def test_single_move_matches_recompute(self, rng):
        obj = gen_nonconvex(8, 10, 0.5, seed=1).problem.objective
        x = rng.dirichlet(np.ones(8))
        cache = obj.new_cache(x)
        t = 0.05
        x[2] += t
        x[5] -= t
        cache.apply_pair_move(2, 5, t)
        np.testing.assert_allclose(cache.gradient(x), obj.gradient(x), atol=1e-12)
        assert cache.value(x) == pytest.approx(obj.value(x), abs=1e-12)

    def test_zero_move_leaves_cache_alone(self, rng):
        obj = gen_chebyshev(6, 3, seed=0).problem.objective
        x = rng.dirichlet(np.ones(6))
        cache = obj.new_cache(x)
        before = cache.s.copy()
        cache.apply_pair_move(1, 4, 0.0)
        np.testing.assert_array_equal(cache.s, before)

    def test_refresh_reports_drift(self, rng):
        obj = gen_chebyshev(6, 3, seed=0).problem.objective
        x = rng.dirichlet(np.ones(6))
        cache = obj.new_cache(x)
        cache.s = cache.s + 1e-3
        assert cache.refresh(x) > 0.0
        assert cache.refresh(x) == 0.0

    @pytest.mark.parametrize("instance", [gen_chebyshev(7, 3, 0), gen_logexp(7, 0), gen_nonconvex(7, 4, 0.5, 0)],
                             ids=["chebyshev", "logexp", "nonconvex"])
    def test_pair_move_helpers(self, instance, rng):
        obj = instance.problem.objective
        x = rng.dirichlet(np.ones(7))
        cache = obj.new_cache(x)
        t = 0.03
        moved = x.copy()
        moved[1] += t
        moved[4] -= t
        assert cache.pair_move_delta(x, 1, 4, t) == pytest.approx(obj.value(moved) - obj.value(x), abs=1e-10)
        g = obj.gradient(moved)
        assert cache.pair_move_derivative(x, 1, 4, t) == pytest.approx(g[1] - g[4], abs=1e-10)


class TestSvmDual:
    def test_two_point_dual(self, tiny_dataset):
        instance = load_svm_dual(tiny_dataset, C=1.0)
        prob = instance.problem
        np.testing.assert_array_equal(prob.bounds.lower, [0.0, -1.0])
        np.testing.assert_array_equal(prob.bounds.upper, [1.0, 0.0])
        assert prob.level == 0.0
        x, trace = solve(prob, [0.25, -0.25], Ac2cdConfig(stepsize=QuadraticRule(), epsilon=1e-10))
        np.testing.assert_allclose(x, [0.5, -0.5], atol=1e-12)
        assert trace.final.objective == pytest.approx(-0.5)
        np.testing.assert_array_equal(svm_labels(instance), [1.0, -1.0])

    def test_start_point_uses_half_box(self, tiny_dataset):
        bounds = load_svm_dual(tiny_dataset, C=2.0).problem.bounds
        np.testing.assert_array_equal(svm_start(bounds, np.random.default_rng(0)), [1.0, -1.0])

    def test_all_positive_labels(self, tmp_path):
        path = tmp_path / "positive.libsvm"
        path.write_text("1 1:0.5\n1 2:1.5\n1 1:1.0 2:1.0\n", encoding="ascii")
        instance = load_svm_dual(path, C=1.0)
        x0 = svm_start(instance.problem.bounds, np.random.default_rng(0))
        np.testing.assert_array_equal(x0, np.zeros(3))
        x, trace = solve(instance.problem, x0)
        assert trace.status is TerminalStatus.CONVERGED
        np.testing.assert_array_equal(x, np.zeros(3))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.libsvm"
        path.write_text("# nothing here\n\n", encoding="ascii")
        with pytest.raises(ParseError):
            read_sparse_dataset(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_svm_dual(tmp_path / "missing.libsvm")

    def test_malformed_record(self, tmp_path):
        path = tmp_path / "bad.libsvm"
        path.write_text("1 1:abc\n", encoding="ascii")
        with pytest.raises(ParseError):
            read_sparse_dataset(path)

    def test_bad_label(self, tmp_path):
        path = tmp_path / "labels.libsvm"
        path.write_text("1 1:1.0\n2 1:2.0\n", encoding="ascii")
        with pytest.raises(LabelError):
            load_svm_dual(path)

    def test_toy_dataset_round_trip(self, tmp_path):
        path = make_toy_svm_dataset(tmp_path / "toy.libsvm", n=40, m=6, seed=3)
        instance = load_svm_dual(path, C=0.5)
        assert instance.n == 40
        assert instance.problem.objective.sparse
        x0 = starting_point(instance, 3)
        assert np.sum(x0) == pytest.approx(0.0)
        grad = instance.problem.objective.gradient(x0)
        np.testing.assert_allclose(grad, finite_diff_gradient(instance.problem.objective, x0), atol=1e-6)

    def test_bundled_dataset(self):
        path = Path(__file__).resolve().parent.parent / "data" / "toy_svm.libsvm"
        instance = load_svm_dual(path, C=1.0)
        assert (instance.n, instance.m) == (40, 6)
        assert instance.params["positives"] == 20
        x, trace = solve(instance.problem, starting_point(instance, 0), Ac2cdConfig(epsilon=1e-6))
        assert trace.status is TerminalStatus.CONVERGED
        assert np.sum(x) == pytest.approx(0.0, abs=1e-9)
        assert np.all(x >= instance.problem.bounds.lower) and np.all(x <= instance.problem.bounds.upper)

    def test_c_must_be_positive(self, tiny_dataset):
        with pytest.raises(ParseError):
            load_svm_dual(tiny_dataset, C=0.0)


def test_rescaled_problem_uses_unit_weights():
    # min 1/2 |s|^2 s.t. 2 s_1 - s_2 = 1 has s* = (0.4, -0.2)
    inner = QuadraticObjective(np.eye(2), np.zeros(2))
    prob = rescale_problem(inner, [2.0, -1.0], 1.0, [-np.inf, -np.inf], [np.inf, np.inf])
    x, _ = solve(prob, [1.0, 0.0], Ac2cdConfig(stepsize=ExactRule(), epsilon=1e-10))
    np.testing.assert_allclose(x / np.array([2.0, -1.0]), [0.4, -0.2], atol=1e-8)


def test_rescaled_bounds_flip_for_negative_weights():
    inner = QuadraticObjective(np.eye(2), np.zeros(2))
    prob = rescale_problem(inner, [1.0, -2.0], 0.0, [0.0, 0.0], [1.0, 1.0])
    np.testing.assert_array_equal(prob.bounds.lower, [0.0, -2.0])
    np.testing.assert_array_equal(prob.bounds.upper, [1.0, 0.0])


def test_rescale_rejects_zero_weight():
    inner = QuadraticObjective(np.eye(2), np.zeros(2))
    with pytest.raises(InstanceError):
        rescale_problem(inner, [1.0, 0.0], 0.0, [0.0, 0.0], [1.0, 1.0])


def test_instances_are_frozen():
    instance = gen_chebyshev(5, 2, seed=0)
    with pytest.raises(ValidationError):
        instance.n = 7
