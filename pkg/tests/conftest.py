import numpy as np
import pytest

from ac2cd.models.problem import Bounds, Problem
from ac2cd.services.generators import simplex_bounds
from ac2cd.services.objectives import QuadraticObjective


def simplex_norm_problem(n: int, explicit_upper: bool = False) -> Problem:
    """1/2 |x|^2 on the unit simplex; optimum x_i = 1/n, f* = 1/(2n)."""
    return Problem(
        objective=QuadraticObjective(np.eye(n), np.zeros(n)),
        level=1.0,
        bounds=simplex_bounds(n, explicit_upper),
        name="simplex_norm",
    )


def box_norm_problem(lower, upper, level: float) -> Problem:
    n = len(lower)
    return Problem(
        objective=QuadraticObjective(np.eye(n), np.zeros(n)),
        level=level,
        bounds=Bounds(lower=lower, upper=upper),
    )


@pytest.fixture
def simplex_norm():
    return simplex_norm_problem


@pytest.fixture
def unit_box():
    """1/2 |x|^2 with sum(x) = 1 and 0 <= x_i <= 1, n = 2."""
    return box_norm_problem([0.0, 0.0], [1.0, 1.0], 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_dataset(tmp_path):
    """Two samples on a line with opposite labels."""
    path = tmp_path / "tiny.libsvm"
    path.write_text("+1 1:1.0\n-1 1:-1.0\n", encoding="ascii")
    return path


@pytest.fixture
def out_dir(tmp_path):
    d = tmp_path / "results"
    d.mkdir()
    return d
