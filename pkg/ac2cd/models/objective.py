"""
Objective oracle interfaces.

An objective exposes per-coordinate partial derivatives; solvers never need
the full gradient except for monitoring. Every run owns an ``ObjectiveCache``
built by ``Objective.new_cache`` that keeps whatever auxiliary vector makes
partial derivatives cheap and is updated after each pair move.

ac2cd/models/objective.py
"""


from abc import ABC, abstractmethod
from typing import Optional, Union

import numpy as np
from numpy.typing import NDArray

ScalarOrArray = Union[float, NDArray[np.float64]]


class PairLine(ABC):
    """
    Restriction of f to the segment z + alpha * g * (e_p - e_j).

    ``delta(alpha)`` is phi(alpha) - phi(0) and ``slope(alpha)`` is phi'(alpha);
    both accept a scalar or an array of stepsizes.
    """

    @abstractmethod
    def delta(self, alpha: ScalarOrArray) -> ScalarOrArray:
        ...

    @abstractmethod
    def slope(self, alpha: ScalarOrArray) -> ScalarOrArray:
        ...

    @property
    def curvature(self) -> Optional[float]:
        """kappa = H_pp + H_jj - 2 H_pj when f is quadratic, else None."""
        return None


class ObjectiveCache(ABC):
    """Per-run evaluation state for one objective."""

    @abstractmethod
    def partial(self, i: int, x: NDArray[np.float64]) -> float:
        ...

    @abstractmethod
    def gradient(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        ...

    @abstractmethod
    def value(self, x: NDArray[np.float64]) -> float:
        ...

    @abstractmethod
    def line(
        self,
        x: NDArray[np.float64],
        p: int,
        j: int,
        g: float,
        grad_p: Optional[float] = None,
        grad_j: Optional[float] = None,
    ) -> PairLine:
        """
        Scalar restriction along g * (e_p - e_j).

        Callers that already hold the two partials at x pass them in so the
        line costs no further derivative evaluations.
        """

    def pair_move_delta(
        self, x: NDArray[np.float64], i: int, j: int, t: ScalarOrArray
    ) -> ScalarOrArray:
        """f(x + t(e_i - e_j)) - f(x)."""
        return self.line(x, i, j, 1.0).delta(t)

    def pair_move_derivative(
        self, x: NDArray[np.float64], i: int, j: int, t: ScalarOrArray
    ) -> ScalarOrArray:
        """d/dt f(x + t(e_i - e_j))."""
        return self.line(x, i, j, 1.0).slope(t)

    def apply_pair_move(self, i: int, j: int, t: float) -> None:
        """Record the move x_i += t, x_j -= t. Stateless caches ignore it."""

    def refresh(self, x: NDArray[np.float64]) -> float:
        """Recompute from scratch; returns the max relative drift found."""
        return 0.0


class Objective(ABC):
    """Continuously differentiable f: R^n -> R."""

    n: int

    @abstractmethod
    def value(self, x: NDArray[np.float64]) -> float:
        ...

    @abstractmethod
    def partial(self, i: int, x: NDArray[np.float64]) -> float:
        ...

    @abstractmethod
    def new_cache(self, x: NDArray[np.float64]) -> ObjectiveCache:
        ...

    def gradient(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.array([self.partial(i, x) for i in range(self.n)])

    def pair_move_value(
        self, x: NDArray[np.float64], i: int, j: int, t: float
    ) -> float:
        y = np.array(x, dtype=float)
        y[i] += t
        y[j] -= t
        return self.value(y)

    def pair_lipschitz(self, i: int, j: int) -> Optional[float]:
        return None

    def coordinate_lipschitz(self) -> Optional[NDArray[np.float64]]:
        return None

    def pair_curvature(self, i: int, j: int) -> Optional[float]:
        return None

    @property
    def is_quadratic(self) -> bool:
        return False
