import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import expm_series
from unitindex import Algebra, Element, SuperOp, cstar_norm, is_positive, super_exp
from unitindex.algebra import (
    adjoint_permutation,
    min_eigenvalue,
    tensor_algebra,
    tensor_elements,
    tensor_superops,
)
from unitindex.errors import AlgebraMismatchError, NumericInputError, ShapeError


def test_descriptor_equality_and_dims():
    assert Algebra((2, 1)) == Algebra([2, 1])
    assert Algebra((2, 1)) != Algebra((1, 2))
    a = Algebra((2, 3, 1))
    assert a.dim == 4 + 9 + 1
    assert a.embedding_dim == 6
    assert a.offsets == (0, 4, 13)


@pytest.mark.parametrize("sizes", [(), (0,), (2, -1)])
def test_descriptor_rejects_bad_sizes(sizes):
    with pytest.raises(ShapeError):
        Algebra(sizes)


def test_norm_examples(m2):
    assert cstar_norm(m2.unit()) == pytest.approx(1.0)
    assert cstar_norm(m2.element(np.diag([2.0, -3.0]))) == pytest.approx(3.0)
    assert cstar_norm(m2.matrix_unit(0, 0, 1)) == pytest.approx(1.0)


def test_norm_rejects_malformed_blocks(m2):
    with pytest.raises(ShapeError):
        Element(m2, [np.eye(3)])


def test_positivity_examples(m2):
    assert is_positive(m2.unit(), 1e-12)
    assert not is_positive(-m2.unit(), 1e-12)
    assert is_positive(m2.element(np.ones((2, 2))), 1e-12)
    assert not is_positive(m2.matrix_unit(0, 0, 1), 1e-12)


def test_unit_is_neutral(rng):
    alg = Algebra((2, 3))
    a = alg.random_element(rng)
    assert (alg.unit() @ a).allclose(a)
    assert (a @ alg.unit()).allclose(a)


def test_vec_roundtrip_and_basis(rng):
    alg = Algebra((2, 1, 3))
    a = alg.random_element(rng)
    assert alg.from_vec(a.vec()).allclose(a, 0)
    basis = alg.basis()
    assert len(basis) == alg.dim
    total = alg.zero()
    for k, e in enumerate(basis):
        total = total + a.vec()[k] * e
    assert total.allclose(a)


def test_mixing_algebras_is_an_error(rng):
    a, b = Algebra((2,)).unit(), Algebra((3,)).unit()
    with pytest.raises(AlgebraMismatchError):
        a + b


def test_left_right_sandwich(rng):
    alg = Algebra((2, 3))
    a, b, c = (alg.random_element(rng) for _ in range(3))
    assert SuperOp.left(a)(b).allclose(a @ b)
    assert SuperOp.right(a)(b).allclose(b @ a)
    assert SuperOp.sandwich(a, c)(b).allclose(a @ b @ c)
    assert SuperOp.identity(alg)(b).allclose(b)


def test_composition_matches_sequential_application(rng):
    alg = Algebra((2, 2))
    p = SuperOp.sandwich(alg.random_element(rng), alg.random_element(rng))
    q = SuperOp.left(alg.random_element(rng)) + SuperOp.right(alg.random_element(rng))
    b = alg.random_element(rng)
    assert (p @ q)(b).allclose(p(q(b)))


def test_star_conjugate(rng):
    alg = Algebra((2, 1))
    a, c, b = (alg.random_element(rng) for _ in range(3))
    op = SuperOp.sandwich(a, c)
    expect = op(b.adjoint()).adjoint()
    assert op.star()(b).allclose(expect)
    perm = adjoint_permutation(alg)
    assert np.allclose(np.conj(b.vec())[perm], b.adjoint().vec())


def test_from_function_reproduces_linear_map(rng):
    alg = Algebra((2,))
    a = alg.random_element(rng)
    op = SuperOp.from_function(alg, lambda b: a @ b - b @ a)
    b = alg.random_element(rng)
    assert op(b).allclose(a @ b - b @ a)


def test_super_exp_at_zero_is_identity(rng):
    alg = Algebra((2,))
    op = SuperOp.left(alg.random_element(rng))
    assert super_exp(op, 0.0).distance(SuperOp.identity(alg)) == 0.0


def test_super_exp_scalar():
    alg = Algebra((1,))
    k = super_exp(SuperOp.identity(alg), 1.0)
    assert k(alg.unit()).blocks[0][0, 0] == pytest.approx(np.e)


@pytest.mark.parametrize("t", [0.3, 1.0, -2.5])
def test_super_exp_nilpotent_left_multiplication(m2, rng, t):
    e12 = m2.matrix_unit(0, 0, 1)
    op = SuperOp.left(e12)
    b = m2.random_element(rng)
    assert super_exp(op, t)(b).allclose(b + t * (e12 @ b), 1e-12)
    # the series oracle agrees
    assert np.allclose(expm_series(t * op.matrix), super_exp(op, t).matrix, atol=1e-13)


def test_super_exp_matches_series_oracle(rng):
    alg = Algebra((2, 1))
    op = SuperOp.sandwich(alg.random_element(rng), alg.random_element(rng)) + SuperOp.left(alg.random_element(rng))
    for t in (0.1, 0.7):
        assert np.allclose(super_exp(op, t).matrix, expm_series(t * op.matrix), atol=1e-11)


@pytest.mark.parametrize("bad", [np.nan, np.inf])
def test_super_exp_rejects_non_finite(m2, bad):
    with pytest.raises(NumericInputError):
        super_exp(SuperOp.identity(m2), bad)
    m = np.eye(4, dtype=complex)
    m[0, 1] = bad
    with pytest.raises(NumericInputError):
        super_exp(SuperOp(m2, m), 1.0)


def test_tensor_with_scalars_is_identity_map(rng):
    c, m = Algebra((1,)), Algebra((2,))
    assert tensor_algebra(c, m) == m
    a = m.random_element(rng)
    assert tensor_elements(c.unit(), a).allclose(a, 0)


def test_tensor_of_projections_is_idempotent(m2):
    e11 = m2.matrix_unit(0, 0, 0)
    p = tensor_elements(e11, e11)
    assert p.algebra == Algebra((4,))
    assert (p @ p).allclose(p, 0)


def test_tensor_elements_factor(rng):
    alg = Algebra((2, 1))
    a, b = alg.random_element(rng), alg.random_element(rng)
    lhs = tensor_elements(a, alg.unit()) @ tensor_elements(alg.unit(), b)
    # oracle: blockwise Kronecker products
    expect = [np.kron(p, q) for p in a.blocks for q in b.blocks]
    for blk, e in zip(lhs.blocks, expect):
        assert np.allclose(blk, e)


def test_tensor_superops_on_elementary_tensors(rng):
    A, B = Algebra((2, 1)), Algebra((1, 2))
    p = SuperOp.sandwich(A.random_element(rng), A.random_element(rng))
    q = SuperOp.left(B.random_element(rng)) + SuperOp.right(B.random_element(rng))
    pq = tensor_superops(p, q)
    for _ in range(3):
        a, b = A.random_element(rng), B.random_element(rng)
        assert pq(tensor_elements(a, b)).allclose(tensor_elements(p(a), q(b)), 1e-12)


block_sizes = st.lists(st.integers(1, 3), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(block_sizes, st.integers(0, 2**32 - 1))
def test_cstar_identity(sizes, seed):
    rng = np.random.default_rng(seed)
    alg = Algebra(tuple(sizes))
    a = alg.random_element(rng)
    assert a.adjoint().adjoint().allclose(a, 0)
    assert cstar_norm(a.adjoint() @ a) == pytest.approx(cstar_norm(a) ** 2, rel=1e-12)
    assert min_eigenvalue(a.adjoint() @ a) >= -1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_exp_semigroup_law(seed, s, t):
    rng = np.random.default_rng(seed)
    alg = Algebra((2,))
    op = SuperOp.sandwich(alg.random_element(rng), alg.random_element(rng)) + SuperOp.right(alg.random_element(rng))
    lhs = super_exp(op, s + t)
    rhs = super_exp(op, s) @ super_exp(op, t)
    assert lhs.distance(rhs) <= 1e-10 * max(1.0, lhs.norm())
