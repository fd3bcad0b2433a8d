import numpy as np
import pytest
import scipy.sparse as sp

from ac2cd.core.errors import InstanceError
from ac2cd.models.base import Family
from ac2cd.services.datasets import load_svm_dual, make_toy_svm_dataset
from ac2cd.services.generators import gen_chebyshev, gen_logexp, gen_nonconvex
from ac2cd.services.serialization import dump_instance, load_instance


def assert_same_problem(a, b):
    pa, pb = a.problem, b.problem
    assert a.family is b.family
    assert (a.n, a.m, a.seed) == (b.n, b.m, b.seed)
    assert pa.level == pb.level
    np.testing.assert_array_equal(pa.bounds.lower, pb.bounds.lower)
    np.testing.assert_array_equal(pa.bounds.upper, pb.bounds.upper)
    x = np.full(a.n, pa.level / a.n)
    assert pa.objective.value(x) == pb.objective.value(x)
    np.testing.assert_array_equal(pa.objective.gradient(x), pb.objective.gradient(x))


@pytest.mark.parametrize(
    "instance",
    [gen_chebyshev(9, 3, seed=1), gen_logexp(9, seed=1), gen_nonconvex(9, 4, 0.5, seed=1)],
    ids=["chebyshev", "logexp", "nonconvex"],
)
def test_generated_instances_reload_bit_for_bit(instance, tmp_path):
    path = dump_instance(instance, tmp_path / "instance.txt")
    loaded = load_instance(path)
    assert_same_problem(instance, loaded)
    assert loaded.params == instance.params


def test_sparse_svm_instance_reloads(tmp_path):
    dataset = make_toy_svm_dataset(tmp_path / "toy.libsvm", n=20, m=5, seed=2)
    instance = load_svm_dual(dataset, C=1.0)
    loaded = load_instance(dump_instance(instance, tmp_path / "svm.txt"))
    assert loaded.family is Family.SVM_DUAL
    assert sp.issparse(loaded.problem.objective.Q)
    assert_same_problem(instance, loaded)


def test_missing_file(tmp_path):
    with pytest.raises(InstanceError):
        load_instance(tmp_path / "nope.txt")


def test_missing_section(tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text(
        "family = chebyshev\nn = 2\nm = 1\nlevel = 1.0\nbounds = simplex\n[q vector 2 1]\n1.0\n2.0\n",
        encoding="ascii",
    )
    with pytest.raises(InstanceError):
        load_instance(path)


def test_non_numeric_entry(tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("family = logexp\nn = 1\nm = 0\nlevel = 0.0\nbounds = free\n[a vector 1 1]\nabc\n", encoding="ascii")
    with pytest.raises(InstanceError):
        load_instance(path)


def test_bad_header(tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("family = circle\nn = 2\n", encoding="ascii")
    with pytest.raises(InstanceError):
        load_instance(path)
