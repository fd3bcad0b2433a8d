import numpy as np
import pytest

from ac2cd.core.errors import DegenerateLevelSet
from ac2cd.models.problem import Bounds
from ac2cd.services.generators import logexp_from_coefficients, simplex_bounds
from ac2cd.services.index_selection import (
    select_index_rate_mode,
    select_index_threshold,
    separable_fixed_index,
)


def test_threshold_picks_smallest_qualifying_index():
    x = np.array([0.5, 0.5])
    assert select_index_threshold(x, simplex_bounds(2), 0.9) == 0


@pytest.mark.parametrize("explicit_upper", [False, True])
def test_threshold_on_simplex_vertex_neighbourhood(explicit_upper):
    x = np.array([0.9, 0.1, 0.0])
    assert select_index_threshold(x, simplex_bounds(3, explicit_upper), 0.9) == 0


def test_threshold_prefers_unbounded_coordinates():
    bounds = Bounds(lower=[-np.inf, 0.0], upper=[np.inf, 1.0])
    assert select_index_threshold(np.array([0.5, 0.5]), bounds, 0.9) == 0
    bounds = Bounds(lower=[0.0, -np.inf], upper=[1.0, np.inf])
    assert select_index_threshold(np.array([0.5, 0.5]), bounds, 0.9) == 1


def test_threshold_with_tau_one_is_argmax():
    bounds = Bounds(lower=np.zeros(3), upper=np.ones(3))
    x = np.array([0.1, 0.4, 0.5])
    assert select_index_threshold(x, bounds, 1.0) == 2


def test_rate_mode_keeps_previous_index_while_it_qualifies():
    bounds = Bounds(lower=[0.0, 0.0], upper=[1.0, 1.0])
    x = np.array([0.5, 0.46])
    assert select_index_rate_mode(x, bounds, 0.9, j_prev=1) == 1


def test_rate_mode_switches_to_argmax_when_previous_drops_out():
    bounds = Bounds(lower=[0.0, 0.0], upper=[1.0, 1.0])
    x = np.array([0.5, 0.44])
    assert select_index_rate_mode(x, bounds, 0.9, j_prev=1) == 0


def test_rate_mode_without_history_takes_argmax():
    bounds = Bounds(lower=np.zeros(3), upper=np.ones(3))
    x = np.array([0.45, 0.5, 0.05])
    assert select_index_rate_mode(x, bounds, 0.9) == 1


def test_all_coordinates_on_bounds_is_degenerate():
    bounds = Bounds(lower=[0.0, 0.0], upper=[1.0, 1.0])
    with pytest.raises(DegenerateLevelSet):
        select_index_threshold(np.array([1.0, 0.0]), bounds, 0.9)
    with pytest.raises(DegenerateLevelSet):
        select_index_rate_mode(np.array([1.0, 0.0]), bounds, 0.9, j_prev=0)


def test_separable_fixed_index_takes_smallest_lipschitz_constant():
    # L_i = a_i + b_i^2 / 4 = (2.0, 1.25, 3.0)
    instance = logexp_from_coefficients([1.0, 1.0, 2.0], [2.0, 1.0, 2.0], np.zeros(3), np.zeros(3))
    assert separable_fixed_index(instance.problem.objective) == 1
