"""
Sparse classification datasets and the linear SVM dual built from them

ac2cd/services/datasets.py
"""


import logging
from pathlib import Path
from typing import Union

import numpy as np
import scipy.sparse as sp
from sklearn.datasets import dump_svmlight_file, load_svmlight_file

from ac2cd.core.errors import LabelError, ParseError
from ac2cd.models.base import Family
from ac2cd.models.instance import GeneratedInstance
from ac2cd.models.problem import Bounds, Problem
from ac2cd.services.objectives import QuadraticObjective

logger = logging.getLogger(__name__)


def _has_records(path: Path) -> bool:
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        for line in fh:
            if line.split("#", 1)[0].strip():
                return True
    return False


def read_sparse_dataset(path: Union[str, Path]):
    """Return (X as CSR, labels) from a `<label> <index>:<value> ...` file with 1-based indices."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"dataset {path} does not exist")
    if not _has_records(path):
        logger.error(f"Dataset {path} has no records")
        raise ParseError(f"dataset {path} is empty")
    try:
        X, y = load_svmlight_file(str(path), zero_based=False, dtype=np.float64)
    except ValueError as e:
        logger.error(f"Failed to parse {path}: {e}")
        raise ParseError(f"malformed dataset {path}: {e}")
    return X, y


def load_svm_dual(path: Union[str, Path], C: float = 1.0) -> GeneratedInstance:
    """
    Linear SVM dual in unit-weight form. With x_i = y_i s_i the dual becomes

        min 1/2 |sum_i x_i v_i|^2 - sum_i y_i x_i,  sum_i x_i = 0,

    with x_i in [0, C] for y_i = +1 and in [-C, 0] for y_i = -1.
    """
    if C <= 0:
        raise ParseError("C must be positive")
    X, y = read_sparse_dataset(path)
    bad = ~np.isin(y, (-1.0, 1.0))
    if np.any(bad):
        first = int(np.argmax(bad))
        logger.error(f"Label {y[first]} on record {first + 1} of {path}")
        raise LabelError(f"label {y[first]} on record {first + 1} is not -1 or +1")

    Q = sp.csc_matrix(X.T)
    objective = QuadraticObjective(Q, y)
    lower = np.where(y > 0, 0.0, -C)
    upper = np.where(y > 0, C, 0.0)
    problem = Problem(objective=objective, level=0.0, bounds=Bounds(lower=lower, upper=upper), name="svm_dual")
    n, m = y.size, X.shape[1]
    logger.info(f"Loaded {path}: {n} samples, {m} features, C={C}")
    return GeneratedInstance(
        family=Family.SVM_DUAL,
        n=n,
        m=m,
        problem=problem,
        params={"C": C, "positives": int(np.sum(y > 0))},
        source=str(path),
    )


def svm_labels(instance: GeneratedInstance) -> np.ndarray:
    """Labels recovered from the sign pattern of the bounds."""
    return np.where(instance.problem.bounds.upper > 0, 1.0, -1.0)


def make_toy_svm_dataset(path: Union[str, Path], n: int = 200, m: int = 10, seed: int = 0) -> Path:
    """Two roughly separable Gaussian clouds, sparsified, written with 1-based indices."""
    rng = np.random.default_rng(seed)
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    shift = rng.standard_normal(m)
    X = rng.standard_normal((n, m)) + np.outer(y, shift)
    X[rng.random((n, m)) < 0.3] = 0.0
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dump_svmlight_file(sp.csr_matrix(X), y, str(path), zero_based=False)
    logger.info(f"Wrote toy dataset with {n} samples and {m} features to {path}")
    return path
