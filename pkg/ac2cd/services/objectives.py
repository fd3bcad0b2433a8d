"""
Objective families and their per-run residual caches

ac2cd/services/objectives.py
"""


import logging
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray
from scipy.special import expit

from ac2cd.core.errors import InstanceError
from ac2cd.models.objective import Objective, ObjectiveCache, PairLine, ScalarOrArray
from ac2cd.models.problem import Bounds, Problem

logger = logging.getLogger(__name__)


# Lines

class QuadraticLine(PairLine):
    """phi(alpha) - phi(0) = alpha*g*s0 + 0.5*(alpha*g)^2*kappa with s0 = grad_p - grad_j."""

    def __init__(self, g: float, first_order: float, curvature_fn):
        self._g = g
        self._first = first_order
        self._curvature_fn = curvature_fn
        self._kappa: Optional[float] = None

    @property
    def curvature(self) -> float:
        if self._kappa is None:
            self._kappa = float(self._curvature_fn())
        return self._kappa

    def delta(self, alpha: ScalarOrArray) -> ScalarOrArray:
        t = np.multiply(alpha, self._g)
        return t * self._first + 0.5 * t * t * self.curvature

    def slope(self, alpha: ScalarOrArray) -> ScalarOrArray:
        t = np.multiply(alpha, self._g)
        return self._g * (self._first + t * self.curvature)


class SeparableLine(PairLine):
    def __init__(self, obj: "SeparableLogExp", x: NDArray[np.float64], p: int, j: int, g: float):
        self._obj = obj
        self._p, self._j, self._g = p, j, g
        self._xp, self._xj = float(x[p]), float(x[j])

    def delta(self, alpha: ScalarOrArray) -> ScalarOrArray:
        t = np.multiply(alpha, self._g)
        return self._obj.coordinate_delta(self._p, self._xp, t) + self._obj.coordinate_delta(self._j, self._xj, -t)

    def slope(self, alpha: ScalarOrArray) -> ScalarOrArray:
        t = np.multiply(alpha, self._g)
        return self._g * (
            self._obj.coordinate_derivative(self._p, self._xp + t)
            - self._obj.coordinate_derivative(self._j, self._xj - t)
        )


class GenericLine(PairLine):
    """Falls back on value and partial oracles of an arbitrary objective."""

    def __init__(self, obj: Objective, x: NDArray[np.float64], p: int, j: int, g: float):
        self._obj = obj
        self._x = np.array(x, dtype=float)
        self._p, self._j, self._g = p, j, g
        self._f0 = obj.value(self._x)

    def _scalar_delta(self, alpha: float) -> float:
        return self._obj.pair_move_value(self._x, self._p, self._j, alpha * self._g) - self._f0

    def _scalar_slope(self, alpha: float) -> float:
        y = self._x.copy()
        t = alpha * self._g
        y[self._p] += t
        y[self._j] -= t
        return self._g * (self._obj.partial(self._p, y) - self._obj.partial(self._j, y))

    def delta(self, alpha: ScalarOrArray) -> ScalarOrArray:
        if np.ndim(alpha) == 0:
            return self._scalar_delta(float(alpha))
        return np.array([self._scalar_delta(a) for a in np.ravel(alpha)]).reshape(np.shape(alpha))

    def slope(self, alpha: ScalarOrArray) -> ScalarOrArray:
        if np.ndim(alpha) == 0:
            return self._scalar_slope(float(alpha))
        return np.array([self._scalar_slope(a) for a in np.ravel(alpha)]).reshape(np.shape(alpha))


# Quadratic family

class QuadraticObjective(Objective):
    """
    f(x) = 1/2 x^T Q^T D Q x - q^T x.

    Q is m x n, dense (stored column-major) or sparse (stored as CSC);
    D is a diagonal given by its m entries, identity when omitted.
    """

    def __init__(self, Q, q, D=None):
        if sp.issparse(Q):
            self.Q = sp.csc_matrix(Q, dtype=float)
            self.Q.sort_indices()
            self.sparse = True
        else:
            self.Q = np.asfortranarray(np.atleast_2d(np.asarray(Q, dtype=float)))
            self.sparse = False
        self.m, self.n = self.Q.shape
        self.q = np.array(q, dtype=float).reshape(-1)
        if self.q.size != self.n:
            raise InstanceError(f"q has {self.q.size} entries, Q has {self.n} columns")
        self.D = None if D is None else np.array(D, dtype=float).reshape(-1)
        if self.D is not None and self.D.size != self.m:
            raise InstanceError(f"D has {self.D.size} entries, Q has {self.m} rows")
        for arr in (self.q, self.D):
            if arr is not None:
                arr.setflags(write=False)
        self.diag = self._hessian_diagonal()
        self.diag.setflags(write=False)

    def _hessian_diagonal(self) -> NDArray[np.float64]:
        if self.sparse:
            sq = self.Q.multiply(self.Q)
            if self.D is not None:
                sq = sp.diags(self.D) @ sq
            return np.asarray(sq.sum(axis=0)).reshape(-1)
        weights = self.D if self.D is not None else 1.0
        return np.einsum("ij,ij->j", self.Q * np.reshape(weights, (-1, 1)), self.Q)

    @property
    def is_quadratic(self) -> bool:
        return True

    def column(self, i: int) -> Tuple[Optional[NDArray[np.intp]], NDArray[np.float64]]:
        """(row indices or None for dense, values) of column Q_i."""
        if self.sparse:
            start, stop = self.Q.indptr[i], self.Q.indptr[i + 1]
            return self.Q.indices[start:stop], self.Q.data[start:stop]
        return None, self.Q[:, i]

    def residual(self, x: NDArray[np.float64]) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        s = np.asarray(self.Q @ x, dtype=float).reshape(-1)
        r = s if self.D is None else self.D * s
        return s, r

    def value(self, x: NDArray[np.float64]) -> float:
        s, r = self.residual(x)
        return float(0.5 * s @ r - self.q @ x)

    def gradient(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        _, r = self.residual(x)
        return np.asarray(self.Q.T @ r).reshape(-1) - self.q

    def partial(self, i: int, x: NDArray[np.float64]) -> float:
        _, r = self.residual(x)
        rows, vals = self.column(i)
        r_i = r if rows is None else r[rows]
        return float(vals @ r_i - self.q[i])

    def cross(self, i: int, j: int) -> float:
        """Q_i^T D Q_j."""
        rows_i, vals_i = self.column(i)
        rows_j, vals_j = self.column(j)
        if rows_i is None:
            w = vals_j if self.D is None else self.D * vals_j
            return float(vals_i @ w)
        common, ai, aj = np.intersect1d(rows_i, rows_j, assume_unique=True, return_indices=True)
        prod = vals_i[ai] * vals_j[aj]
        if self.D is not None:
            prod = prod * self.D[common]
        return float(prod.sum())

    def pair_curvature(self, i: int, j: int) -> float:
        return float(self.diag[i] + self.diag[j] - 2.0 * self.cross(i, j))

    def pair_lipschitz(self, i: int, j: int) -> float:
        return abs(self.pair_curvature(i, j))

    def pair_move_value(self, x, i, j, t) -> float:
        g = self.gradient(x)
        return self.value(x) + t * (g[i] - g[j]) + 0.5 * t * t * self.pair_curvature(i, j)

    def hessian(self) -> NDArray[np.float64]:
        """Dense Q^T D Q; small instances only."""
        Qd = self.Q.toarray() if self.sparse else self.Q
        weights = self.D if self.D is not None else np.ones(self.m)
        return Qd.T @ (weights[:, None] * Qd)

    def new_cache(self, x: NDArray[np.float64]) -> "QuadraticCache":
        return QuadraticCache(self, x)


class QuadraticCache(ObjectiveCache):
    """Keeps s = Qx and r = DQx so that grad_i f = Q_i^T r - q_i costs O(nnz(Q_i))."""

    def __init__(self, obj: QuadraticObjective, x: NDArray[np.float64]):
        self.obj = obj
        self.s, self.r = self._fresh(x)

    def _fresh(self, x):
        s, _ = self.obj.residual(x)
        s = np.array(s, dtype=float)
        r = s if self.obj.D is None else self.obj.D * s
        return s, r

    def partial(self, i: int, x: NDArray[np.float64]) -> float:
        rows, vals = self.obj.column(i)
        if rows is None:
            return float(vals @ self.r - self.obj.q[i])
        return float(vals @ self.r[rows] - self.obj.q[i])

    def gradient(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.asarray(self.obj.Q.T @ self.r).reshape(-1) - self.obj.q

    def value(self, x: NDArray[np.float64]) -> float:
        return float(0.5 * self.s @ self.r - self.obj.q @ x)

    def curvature(self, p: int, j: int) -> float:
        return self.obj.pair_curvature(p, j)

    def line(self, x, p, j, g, grad_p=None, grad_j=None) -> QuadraticLine:
        if grad_p is None:
            grad_p = self.partial(p, x)
        if grad_j is None:
            grad_j = self.partial(j, x)
        return QuadraticLine(g, grad_p - grad_j, lambda: self.curvature(p, j))

    def apply_pair_move(self, i: int, j: int, t: float) -> None:
        if t == 0.0:
            return
        D = self.obj.D
        for h, step in ((i, t), (j, -t)):
            rows, vals = self.obj.column(h)
            if rows is None:
                self.s += step * vals
                if D is not None:
                    self.r += step * D * vals
            else:
                self.s[rows] += step * vals
                if D is not None:
                    self.r[rows] = D[rows] * self.s[rows]

    def refresh(self, x: NDArray[np.float64]) -> float:
        s, r = self._fresh(x)
        scale = max(1.0, float(np.max(np.abs(s))) if s.size else 1.0)
        drift = float(np.max(np.abs(s - self.s))) / scale if s.size else 0.0
        self.s, self.r = s, r
        return drift


# Separable log-exp family

class SeparableLogExp(Objective):
    """f(x) = sum_i 1/2 a_i (x_i - c_i)^2 + log(1 + exp(b_i (x_i - d_i))), a_i > 0."""

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = (
            np.array(v, dtype=float).reshape(-1) for v in (a, b, c, d)
        )
        self.n = self.a.size
        if not all(v.size == self.n for v in (self.b, self.c, self.d)):
            raise InstanceError("a, b, c, d must have equal length")
        if np.any(self.a <= 0):
            raise InstanceError("a_i must be strictly positive")
        self.lipschitz = self.a + 0.25 * self.b ** 2
        for arr in (self.a, self.b, self.c, self.d, self.lipschitz):
            arr.setflags(write=False)

    @property
    def strong_convexity(self) -> float:
        return float(np.min(self.a))

    def coordinate_value(self, i: int, xi: ScalarOrArray) -> ScalarOrArray:
        dx = np.subtract(xi, self.c[i])
        return 0.5 * self.a[i] * dx * dx + np.logaddexp(0.0, self.b[i] * np.subtract(xi, self.d[i]))

    def coordinate_derivative(self, i: int, xi: ScalarOrArray) -> ScalarOrArray:
        return self.a[i] * np.subtract(xi, self.c[i]) + self.b[i] * expit(
            self.b[i] * np.subtract(xi, self.d[i])
        )

    def coordinate_delta(self, i: int, xi: float, t: ScalarOrArray) -> ScalarOrArray:
        """
        h_i(xi + t) - h_i(xi) without subtracting two function values, so the
        result keeps its relative accuracy for steps far below eps * |f|.
        """
        t = np.asarray(t, dtype=float)
        a, b = self.a[i], self.b[i]
        quad = a * t * (xi - self.c[i]) + 0.5 * a * t * t
        u = b * (xi - self.d[i])
        s = b * t
        # log((1 + e^(u+s)) / (1 + e^u)) = max(s, 0) + log1p(arg), arg in (-1, 0]
        arg = np.where(
            s > 0.0,
            expit(-u) * np.expm1(-np.maximum(s, 0.0)),
            expit(u) * np.expm1(np.minimum(s, 0.0)),
        )
        with np.errstate(divide="ignore"):
            small = np.where(s > 0.0, np.maximum(s, 0.0), 0.0) + np.log1p(arg)
        # arg near -1 means |difference| >= log 2; plain subtraction is exact enough there
        large = np.logaddexp(0.0, u + s) - np.logaddexp(0.0, u)
        out = quad + np.where(arg > -0.5, small, large)
        return out if out.ndim else float(out)

    def second_derivative(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        sig = expit(self.b * (x - self.d))
        return self.a + self.b ** 2 * sig * (1.0 - sig)

    def value(self, x: NDArray[np.float64]) -> float:
        dx = x - self.c
        return float(np.sum(0.5 * self.a * dx * dx + np.logaddexp(0.0, self.b * (x - self.d))))

    def gradient(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.a * (x - self.c) + self.b * expit(self.b * (x - self.d))

    def partial(self, i: int, x: NDArray[np.float64]) -> float:
        return float(self.coordinate_derivative(i, x[i]))

    def pair_move_value(self, x, i, j, t) -> float:
        return (
            self.value(x)
            + float(self.coordinate_delta(i, float(x[i]), t))
            + float(self.coordinate_delta(j, float(x[j]), -t))
        )

    def coordinate_lipschitz(self) -> NDArray[np.float64]:
        return self.lipschitz

    def pair_lipschitz(self, i: int, j: int) -> float:
        return float(self.lipschitz[i] + self.lipschitz[j])

    def new_cache(self, x: NDArray[np.float64]) -> "SeparableCache":
        return SeparableCache(self)


class SeparableCache(ObjectiveCache):
    """Separable partials are O(1); nothing to maintain between moves."""

    def __init__(self, obj: SeparableLogExp):
        self.obj = obj

    def partial(self, i: int, x: NDArray[np.float64]) -> float:
        return self.obj.partial(i, x)

    def gradient(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.obj.gradient(x)

    def value(self, x: NDArray[np.float64]) -> float:
        return self.obj.value(x)

    def line(self, x, p, j, g, grad_p=None, grad_j=None) -> SeparableLine:
        return SeparableLine(self.obj, x, p, j, g)


# Arbitrary objectives

class GenericCache(ObjectiveCache):
    def __init__(self, obj: Objective):
        self.obj = obj

    def partial(self, i: int, x: NDArray[np.float64]) -> float:
        return self.obj.partial(i, x)

    def gradient(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.obj.gradient(x)

    def value(self, x: NDArray[np.float64]) -> float:
        return self.obj.value(x)

    def line(self, x, p, j, g, grad_p=None, grad_j=None) -> GenericLine:
        return GenericLine(self.obj, x, p, j, g)


class ScaledObjective(Objective):
    """
    f(x) = omega(x_1/a_1, ..., x_n/a_n) for an objective omega in the s variables.

    Rewrites sum_i a_i s_i = b into sum_i x_i = b.
    """

    def __init__(self, inner: Objective, scale):
        self.inner = inner
        self.scale = np.array(scale, dtype=float).reshape(-1)
        self.n = inner.n
        if self.scale.size != self.n:
            raise InstanceError("scale must have one entry per variable")
        if np.any(self.scale == 0):
            raise InstanceError("scale entries must be nonzero")
        self.scale.setflags(write=False)

    def value(self, x: NDArray[np.float64]) -> float:
        return self.inner.value(x / self.scale)

    def gradient(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.inner.gradient(x / self.scale) / self.scale

    def partial(self, i: int, x: NDArray[np.float64]) -> float:
        return self.inner.partial(i, x / self.scale) / self.scale[i]

    def coordinate_lipschitz(self) -> Optional[NDArray[np.float64]]:
        inner = self.inner.coordinate_lipschitz()
        return None if inner is None else inner / self.scale ** 2

    def new_cache(self, x: NDArray[np.float64]) -> GenericCache:
        return GenericCache(self)


def rescale_problem(objective_s: Objective, a, level: float, lower_s, upper_s, name: str = None) -> Problem:
    """
    Turn min omega(s) s.t. sum a_i s_i = b, l_s <= s <= u_s into the unit-weight
    form through x_i = a_i s_i.
    """
    a = np.array(a, dtype=float).reshape(-1)
    if np.any(a == 0):
        raise InstanceError("variable transformation needs a_i != 0 for every i")
    lower_s = np.array(lower_s, dtype=float)
    upper_s = np.array(upper_s, dtype=float)
    with np.errstate(invalid="ignore"):
        lo_pos, hi_pos = a * lower_s, a * upper_s
    lower = np.where(a > 0, lo_pos, hi_pos)
    upper = np.where(a > 0, hi_pos, lo_pos)
    return Problem(
        objective=ScaledObjective(objective_s, a),
        level=level,
        bounds=Bounds(lower=lower, upper=upper),
        name=name,
    )
