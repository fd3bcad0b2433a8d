"""
Textual instance files.

Layout: ``key = value`` header lines, then sections introduced by
``[name kind rows cols]`` followed by one float per line in column-major
order. ``kind`` is ``vector``, ``dense`` or ``csc`` (the latter expands to
``indptr``, ``indices`` and ``data`` sections). Floats are written with
``repr`` so a load reproduces every bit.

ac2cd/services/serialization.py
"""


import logging
from pathlib import Path
from typing import Dict, List, TextIO, Union

import numpy as np
import scipy.sparse as sp

from ac2cd.core.errors import InstanceError
from ac2cd.models.base import Family
from ac2cd.models.instance import GeneratedInstance
from ac2cd.models.problem import Bounds, Problem
from ac2cd.services.objectives import QuadraticObjective, SeparableLogExp

logger = logging.getLogger(__name__)

FORMAT_VERSION = "1"


def _write_vector(fh: TextIO, name: str, values) -> None:
    values = np.asarray(values).reshape(-1)
    fh.write(f"[{name} vector {values.size} 1]\n")
    fh.writelines(f"{v!r}\n" for v in values.tolist())


def _write_matrix(fh: TextIO, name: str, matrix) -> None:
    if sp.issparse(matrix):
        csc = sp.csc_matrix(matrix)
        rows, cols = csc.shape
        fh.write(f"[{name} csc {rows} {cols}]\n")
        _write_vector(fh, f"{name}.indptr", csc.indptr.astype(float))
        _write_vector(fh, f"{name}.indices", csc.indices.astype(float))
        _write_vector(fh, f"{name}.data", csc.data)
        return
    dense = np.atleast_2d(np.asarray(matrix, dtype=float))
    rows, cols = dense.shape
    fh.write(f"[{name} dense {rows} {cols}]\n")
    fh.writelines(f"{v!r}\n" for v in dense.reshape(-1, order="F").tolist())


def _bounds_mode(bounds: Bounds) -> str:
    if bounds.is_unbounded:
        return "free"
    if np.all(bounds.lower == 0) and np.all(np.isinf(bounds.upper)):
        return "simplex"
    return "box"


def dump_instance(instance: GeneratedInstance, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    problem = instance.problem
    objective = problem.objective
    bounds_mode = _bounds_mode(problem.bounds)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# ac2cd instance\nformat = {FORMAT_VERSION}\n")
        fh.write(f"family = {instance.family.value}\n")
        fh.write(f"seed = {'' if instance.seed is None else instance.seed}\n")
        fh.write(f"n = {instance.n}\nm = {instance.m}\n")
        fh.write(f"level = {problem.level!r}\nbounds = {bounds_mode}\n")
        for key, value in sorted(instance.params.items()):
            fh.write(f"param.{key} = {value!r}\n")
        if instance.reference_optimum is not None:
            fh.write(f"reference_optimum = {instance.reference_optimum!r}\n")

        if isinstance(objective, QuadraticObjective):
            _write_matrix(fh, "Q", objective.Q)
            _write_vector(fh, "q", objective.q)
            if objective.D is not None:
                _write_vector(fh, "D", objective.D)
        elif isinstance(objective, SeparableLogExp):
            for name in ("a", "b", "c", "d"):
                _write_vector(fh, name, getattr(objective, name))
        else:
            raise InstanceError(f"cannot serialize objective {type(objective).__name__}")
        if bounds_mode == "box":
            _write_vector(fh, "lower", problem.bounds.lower)
            _write_vector(fh, "upper", problem.bounds.upper)
    logger.info(f"Wrote {instance.family.value} instance (n={instance.n}) to {path}")
    return path


def _parse(lines: List[str]):
    header: Dict[str, str] = {}
    sections: Dict[str, tuple] = {}
    current = None
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            parts = line.strip("[]").split()
            if len(parts) != 4:
                raise InstanceError(f"line {number}: malformed section header {line!r}")
            name, kind, rows, cols = parts
            current = name
            sections[name] = (kind, int(rows), int(cols), [])
            continue
        if current is None:
            if "=" not in line:
                raise InstanceError(f"line {number}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            header[key] = value
        else:
            try:
                sections[current][3].append(float(line))
            except ValueError:
                raise InstanceError(f"line {number}: {line!r} is not a number")
    return header, sections


def _vector(sections, name: str) -> np.ndarray:
    if name not in sections:
        raise InstanceError(f"missing section {name}")
    kind, rows, cols, values = sections[name]
    if len(values) != rows * cols:
        raise InstanceError(f"section {name} has {len(values)} values, expected {rows * cols}")
    return np.array(values, dtype=float)


def _matrix(sections, name: str):
    if name not in sections:
        raise InstanceError(f"missing section {name}")
    kind, rows, cols, _ = sections[name]
    if kind == "dense":
        return _vector(sections, name).reshape((rows, cols), order="F")
    if kind == "csc":
        indptr = _vector(sections, f"{name}.indptr").astype(np.int64)
        indices = _vector(sections, f"{name}.indices").astype(np.int64)
        data = _vector(sections, f"{name}.data")
        return sp.csc_matrix((data, indices, indptr), shape=(rows, cols))
    raise InstanceError(f"section {name} has unknown kind {kind}")


def _param(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value.strip("'\"")


def load_instance(path: Union[str, Path]) -> GeneratedInstance:
    path = Path(path)
    if not path.exists():
        raise InstanceError(f"instance file {path} does not exist")
    with open(path, "r", encoding="ascii") as fh:
        header, sections = _parse(fh.readlines())
    try:
        family = Family(header["family"])
        n, m = int(header["n"]), int(header["m"])
        level = float(header["level"])
        mode = header["bounds"]
    except (KeyError, ValueError) as e:
        raise InstanceError(f"{path}: bad or missing header field ({e})")

    if family is Family.LOGEXP:
        objective = SeparableLogExp(*(_vector(sections, k) for k in ("a", "b", "c", "d")))
    else:
        D = _vector(sections, "D") if "D" in sections else None
        objective = QuadraticObjective(_matrix(sections, "Q"), _vector(sections, "q"), D)

    if mode == "free":
        bounds = Bounds.free(n)
    elif mode == "simplex":
        bounds = Bounds(lower=np.zeros(n), upper=np.full(n, np.inf))
    elif mode == "box":
        bounds = Bounds(lower=_vector(sections, "lower"), upper=_vector(sections, "upper"))
    else:
        raise InstanceError(f"{path}: unknown bounds mode {mode}")

    params = {k[len("param."):]: _param(v) for k, v in header.items() if k.startswith("param.")}
    seed = header.get("seed") or None
    optimum = header.get("reference_optimum")
    return GeneratedInstance(
        family=family,
        seed=int(seed) if seed is not None else None,
        n=n,
        m=m,
        problem=Problem(objective=objective, level=level, bounds=bounds, name=family.value),
        params=params,
        reference_optimum=float(optimum) if optimum is not None else None,
    )
