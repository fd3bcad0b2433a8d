import math

import numpy as np
import pytest
from pydantic import ValidationError

from ac2cd.core.errors import BoundViolation, EmptyIndexSet, InfeasibleEquality
from ac2cd.models.base import ExtendedReal
from ac2cd.models.problem import Bounds, Problem
from ac2cd.services.feasibility import (
    bound_distances,
    clamp_pair_drift,
    is_pinned,
    is_stationary_or_singleton,
    kkt_residual,
    nearest_bound_distance,
    project_report_feasibility,
    violating_pair,
)
from ac2cd.services.objectives import QuadraticObjective


def test_feasible_point_is_returned_unchanged(unit_box):
    x = project_report_feasibility([0.5, 0.5], unit_box)
    np.testing.assert_array_equal(x, [0.5, 0.5])


def test_equality_violation_is_reported(unit_box):
    with pytest.raises(InfeasibleEquality):
        project_report_feasibility([0.6, 0.5], unit_box)


def test_bound_violation_is_reported(unit_box):
    with pytest.raises(BoundViolation):
        project_report_feasibility([1.2, -0.2], unit_box)


def test_wrong_dimension_is_reported(unit_box):
    with pytest.raises(BoundViolation):
        project_report_feasibility([1.0, 0.0, 0.0], unit_box)


def test_bounds_require_strict_ordering():
    with pytest.raises(ValidationError):
        Bounds(lower=[0.0, 1.0], upper=[1.0, 1.0])


def test_problem_rejects_unreachable_level():
    with pytest.raises(ValidationError):
        Problem(
            objective=QuadraticObjective(np.eye(2), np.zeros(2)),
            level=3.0,
            bounds=Bounds(lower=[0.0, 0.0], upper=[1.0, 1.0]),
        )


@pytest.mark.parametrize(
    "x, grad, expected",
    [
        ([1.0, 0.0], [2.0, 1.0], 1.0),
        ([0.0, 1.0], [2.0, 1.0], 0.0),
        ([0.5, 0.5], [0.5, 0.5], 0.0),
    ],
)
def test_kkt_residual_examples(x, grad, expected):
    bounds = Bounds(lower=[0.0, 0.0], upper=[1.0, 1.0])
    assert kkt_residual(np.array(x), np.array(grad), bounds) == pytest.approx(expected)


def test_kkt_residual_is_shift_invariant(rng):
    bounds = Bounds(lower=np.zeros(6), upper=np.ones(6))
    x = rng.uniform(0.0, 1.0, 6)
    grad = rng.standard_normal(6)
    base = kkt_residual(x, grad, bounds)
    for shift in (-3.0, 0.25, 100.0):
        assert kkt_residual(x, grad + shift, bounds) == pytest.approx(base, abs=1e-12)


def test_violating_pair_prefers_smallest_index():
    bounds = Bounds(lower=np.zeros(3), upper=np.full(3, np.inf))
    i, j, g_low, g_high = violating_pair(np.array([1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]), bounds)
    assert (i, j) == (1, 0)
    assert (g_low, g_high) == (0.0, 1.0)


def test_violating_pair_raises_when_nothing_can_decrease():
    bounds = Bounds(lower=[0.0, 0.0], upper=[1.0, 1.0])
    with pytest.raises(EmptyIndexSet):
        violating_pair(np.array([0.0, 0.0]), np.array([1.0, 2.0]), bounds)


def test_empty_index_set_counts_as_stationary():
    bounds = Bounds(lower=[0.0, 0.0], upper=[1.0, 1.0])
    assert is_stationary_or_singleton(np.array([1.0, 1.0]), np.array([5.0, -5.0]), bounds, 0.1)


@pytest.mark.parametrize(
    "lower, upper, x, expected",
    [
        ([0.0, 0.0], [1.0, 1.0], [0.3, 0.7], 0.3),
        ([0.0, 0.0], [1.0, 1.0], [1.0, 0.0], 0.0),
        ([-np.inf, -np.inf], [np.inf, np.inf], [5.0, -5.0], math.inf),
    ],
)
def test_nearest_bound_distance(lower, upper, x, expected):
    d = nearest_bound_distance(np.array(x), 0, Bounds(lower=lower, upper=upper))
    assert float(d) == pytest.approx(expected)


def test_nearest_bound_distance_with_one_infinite_side():
    bounds = Bounds(lower=[-np.inf, 0.0], upper=[2.0, np.inf])
    x = np.array([-3.0, 4.0])
    assert nearest_bound_distance(x, 0, bounds) == ExtendedReal.finite(5.0)
    assert nearest_bound_distance(x, 1, bounds) == ExtendedReal.finite(4.0)
    np.testing.assert_allclose(bound_distances(x, bounds), [5.0, 4.0])


def test_pair_on_lower_bounds_is_pinned():
    bounds = Bounds(lower=np.zeros(3), upper=np.ones(3))
    z = np.array([0.0, 0.0, 1.0])
    assert is_pinned(z, 0, 1, bounds)
    assert not is_pinned(z, 0, 2, bounds)


def test_clamp_pair_drift_snaps_to_bounds():
    bounds = Bounds(lower=[0.0, 0.0], upper=[1.0, 1.0])
    x = np.array([1.0 + 1e-13, -1e-13])
    assert clamp_pair_drift(x, 0, 1, bounds)
    np.testing.assert_array_equal(x, [1.0, 0.0])
    assert not clamp_pair_drift(x, 0, 1, bounds)


def test_extended_real_ordering_and_cap():
    inf = ExtendedReal.pos_inf()
    one = ExtendedReal.finite(1.0)
    assert one < inf
    assert ExtendedReal.neg_inf() < one
    assert inf.cap(2.0) == 2.0
    assert one.cap(2.0) == 1.0
    assert ExtendedReal.from_float(math.inf).is_pos_inf
    assert ExtendedReal.finite(0.0).is_zero
