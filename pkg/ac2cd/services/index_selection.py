"""
Choice of the index j(k) kept fixed during an outer iteration

ac2cd/services/index_selection.py
"""


import logging
from typing import Optional

import numpy as np

from ac2cd.core.errors import DegenerateLevelSet
from ac2cd.models.base import FeasiblePoint
from ac2cd.models.objective import Objective
from ac2cd.models.problem import Bounds
from ac2cd.services.feasibility import bound_distances

logger = logging.getLogger(__name__)


def _max_distance(distances: np.ndarray) -> float:
    d_max = float(np.max(distances))
    if d_max <= 0.0:
        raise DegenerateLevelSet("every coordinate sits on a finite bound (D^k = 0)")
    return d_max


def _qualifies(distances: np.ndarray, d_max: float, tau: float) -> np.ndarray:
    if np.isinf(d_max):
        return np.isinf(distances)
    return distances >= tau * d_max


def select_index_threshold(x: FeasiblePoint, bounds: Bounds, tau: float) -> int:
    """Smallest j with D_j(x) >= tau * max_h D_h(x)."""
    distances = bound_distances(x, bounds)
    d_max = _max_distance(distances)
    return int(np.argmax(_qualifies(distances, d_max, tau)))


def select_index_rate_mode(
    x: FeasiblePoint, bounds: Bounds, tau: float, j_prev: Optional[int] = None
) -> int:
    """Keep j_prev while it passes the threshold, otherwise take the smallest argmax of D_h."""
    distances = bound_distances(x, bounds)
    d_max = _max_distance(distances)
    if j_prev is not None and _qualifies(distances[j_prev:j_prev + 1], d_max, tau)[0]:
        return j_prev
    return int(np.argmax(distances))


def separable_fixed_index(objective: Objective) -> int:
    """j in argmax 1/L_i, i.e. the coordinate with the smallest Lipschitz constant."""
    lipschitz = objective.coordinate_lipschitz()
    if lipschitz is None:
        return 0
    return int(np.argmin(lipschitz))
