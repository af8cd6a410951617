import numpy as np
import pytest

from conftest import expm_series
from unitindex import Algebra, KernelSystem, SuperOp, check_ccpd, new_kernel_system, semigroup_eval
from unitindex.errors import (
    IncompleteTableError,
    ReferenceLabelError,
    SymmetryError,
    UnknownLabelError,
)
from unitindex.examples import random_ce_system
from unitindex.kernels import ccpd_sum, symmetry_residual


def test_single_zero_label_is_valid(zero_system):
    assert zero_system.labels == ("omega",)
    assert zero_system.kernel("omega", "omega").norm() == 0.0


def test_imaginary_identity_breaks_symmetry(m2):
    i_id = 1j * SuperOp.identity(m2)
    table = {(x, y): i_id for x in "xy" for y in "xy"}
    with pytest.raises(SymmetryError) as info:
        new_kernel_system(m2, ["x", "y"], table, "x")
    assert info.value.witness["residual"] == pytest.approx(2.0)


def test_missing_pair_is_reported(m2):
    z = SuperOp.zero(m2)
    with pytest.raises(IncompleteTableError):
        KernelSystem(m2, ["x", "y"], {("x", "x"): z, ("y", "y"): z, ("x", "y"): z}, "x")


def test_reference_must_be_a_label(m2):
    with pytest.raises(ReferenceLabelError):
        KernelSystem(m2, ["x"], {("x", "x"): SuperOp.zero(m2)}, "omega")


def test_duplicate_labels_rejected(m2):
    with pytest.raises(ValueError):
        KernelSystem(m2, ["x", "x"], {("x", "x"): SuperOp.zero(m2)}, "x")


def test_fock_table_is_symmetric_on_basis():
    sys = random_ce_system(Algebra((2, 1)), 2, 4, seed=5)
    # direct check on every matrix unit
    for x in sys.labels:
        for y in sys.labels:
            for b in sys.algebra.basis():
                lhs = sys.kernel(y, x)(b)
                rhs = sys.kernel(x, y)(b.adjoint()).adjoint()
                assert lhs.allclose(rhs, 1e-12)
            assert symmetry_residual(sys.kernel(x, y), sys.kernel(y, x)) < 1e-12
    assert sys.symmetry_report()["max_residual"] < 1e-12


def test_unknown_label_lookup(zero_system):
    with pytest.raises(UnknownLabelError):
        zero_system.kernel("omega", "nope")
    with pytest.raises(KeyError):
        semigroup_eval(zero_system, "nope", "omega", 1.0, zero_system.algebra.unit())


def test_relabel_carries_table():
    sys = random_ce_system(Algebra((2,)), 1, 3, seed=2)
    new = sys.relabel({"u1": "a", "u2": "b"})
    assert new.labels == ("omega", "a", "b")
    assert new.kernel("a", "b").distance(sys.kernel("u1", "u2")) == 0.0
    with pytest.raises(ValueError):
        sys.relabel({"u1": "u2"})


def test_semigroup_at_zero_is_identity(rng):
    sys = random_ce_system(Algebra((2,)), 2, 3, seed=0)
    b = sys.algebra.random_element(rng)
    assert semigroup_eval(sys, "u1", "u2", 0.0, b).allclose(b, 0)


def test_semigroup_scalar():
    alg = Algebra((1,))
    sys = KernelSystem(alg, ["x"], {("x", "x"): 0.3 * SuperOp.identity(alg)}, "x")
    val = semigroup_eval(sys, "x", "x", 2.0, alg.unit())
    assert val.blocks[0][0, 0] == pytest.approx(np.exp(0.6), rel=1e-14)


def test_semigroup_of_multiplication_generator(m2, rng):
    beta = m2.random_element(rng)
    gen = SuperOp.left(beta.adjoint()) + SuperOp.right(beta)
    sys = KernelSystem(m2, ["x"], {("x", "x"): gen}, "x")
    b = m2.random_element(rng)
    t = 0.7
    left = m2.element(expm_series(t * beta.adjoint().blocks[0]))
    right = m2.element(expm_series(t * beta.blocks[0]))
    assert semigroup_eval(sys, "x", "x", t, b).allclose(left @ b @ right, 1e-11)


def test_semigroup_rejects_negative_time(zero_system):
    with pytest.raises(ValueError):
        semigroup_eval(zero_system, "omega", "omega", -1.0, zero_system.algebra.unit())


def test_ccpd_zero_table_passes(zero_system):
    rep = check_ccpd(zero_system, sample_count=20)
    assert rep.passed
    assert rep.min_eigenvalue >= 0.0
    assert rep.witness is None


def _planted(m2):
    c = m2.matrix_unit(0, 0, 1)
    gen = -1.0 * SuperOp.sandwich(c.adjoint(), c)
    return KernelSystem(m2, ["x"], {("x", "x"): gen}, "x")


def test_planted_violation_value(m2):
    sys = _planted(m2)
    e11, e22 = m2.matrix_unit(0, 0, 0), m2.matrix_unit(0, 1, 1)
    # a = e11, b = e22 already has a b = 0; the sum is -(e11 c e22)*(e11 c e22) = -e22
    val = ccpd_sum(sys, ["x"], [e11], [e22])
    assert np.allclose(val.blocks[0], -e22.blocks[0])
    # here sum_i a_i c b_i cancels as well, so the value is 0
    val = ccpd_sum(sys, ["x", "x"], [e11, e11], [e22, -e22])
    assert np.allclose(val.blocks[0], 0)


def test_planted_violation_detected(m2):
    rep = check_ccpd(_planted(m2), sample_count=50, seed=3)
    assert not rep.passed
    assert rep.min_eigenvalue < -1e-8
    w = rep.witness
    assert w is not None
    # the witness reproduces its own value
    assert ccpd_sum(_planted(m2), w["labels"], w["a"], w["b"]).allclose(w["value"], 1e-12)


@pytest.mark.parametrize("sizes", [(2,), (3,), (2, 1)])
def test_random_ce_systems_pass_ccpd(sizes):
    rep = check_ccpd(random_ce_system(Algebra(sizes), 2, 4, seed=11), sample_count=200, tol=1e-8)
    assert rep.passed, rep.to_dict()


def test_ccpd_is_deterministic():
    sys = random_ce_system(Algebra((2,)), 2, 3, seed=1)
    assert check_ccpd(sys, 30, seed=9).min_eigenvalue == check_ccpd(sys, 30, seed=9).min_eigenvalue
