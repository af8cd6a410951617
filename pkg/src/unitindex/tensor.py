"""Outer tensor products of kernel systems.

Product units x (x) x' have kernels given by the Leibniz rule

    L^{x(x)x', y(x)y'}(a (x) b) = a (x) L^{x',y'}(b) + L^{x,y}(a) (x) b,

stored as full superoperators on A (x) B.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Element, SuperOp, cstar_norm, tensor_elements, tensor_superops
from .errors import AlgebraMismatchError
from .index import index_report, inner
from .reports import SuiteReport
from .kernels import KernelSystem
from .units import (
    Base,
    LeftCombo,
    RightCombo,
    Shift,
    add,
    as_expr,
    eval_kernel,
    mul_left,
    mul_right,
    random_expr,
    unit_distance,
)

SEP = "⊗"


def pair_label(x: str, y: str) -> str:
    return f"{x}{SEP}{y}"


@dataclass
class TensorSystem:
    system: KernelSystem
    left: KernelSystem
    right: KernelSystem

    @property
    def algebra(self):
        return self.system.algebra

    def label(self, x: str, y: str) -> str:
        return pair_label(x, y)

    def unit(self, x: str, y: str) -> Base:
        if x not in self.left.labels or y not in self.right.labels:
            raise KeyError(f"({x!r}, {y!r}) is not a product label")
        return Base(pair_label(x, y))

    def lift_left(self, e) -> object:
        """e (x) omega' for an expression e over the left factor."""
        one = self.right.algebra.unit()
        return _lift(as_expr(e), lambda lbl: pair_label(lbl, self.right.reference), lambda a: tensor_elements(a, one))

    def lift_right(self, e) -> object:
        """omega (x) e for an expression e over the right factor."""
        one = self.left.algebra.unit()
        return _lift(as_expr(e), lambda lbl: pair_label(self.left.reference, lbl), lambda b: tensor_elements(one, b))


def _lift(e, label_map, elem_map):
    if isinstance(e, Base):
        return Base(label_map(e.label))
    if isinstance(e, Shift):
        return Shift(_lift(e.inner, label_map, elem_map), elem_map(e.beta))
    if isinstance(e, RightCombo):
        return RightCombo(tuple((_lift(x, label_map, elem_map), elem_map(k)) for x, k in e.terms))
    if isinstance(e, LeftCombo):
        return LeftCombo(tuple((elem_map(k), _lift(x, label_map, elem_map)) for k, x in e.terms))
    raise TypeError(f"not a unit expression: {e!r}")


def tensor_system(sys_a: KernelSystem, sys_b: KernelSystem) -> TensorSystem:
    id_a, id_b = SuperOp.identity(sys_a.algebra), SuperOp.identity(sys_b.algebra)
    pairs = [(x, xp) for x in sys_a.labels for xp in sys_b.labels]
    labels = [pair_label(*p) for p in pairs]
    table = {}
    for (x, xp), lx in zip(pairs, labels):
        for (y, yp), ly in zip(pairs, labels):
            table[(lx, ly)] = tensor_superops(id_a, sys_b.kernel(xp, yp)) + tensor_superops(sys_a.kernel(x, y), id_b)
    sys = KernelSystem(
        tensor_superops(id_a, id_b).algebra, labels, table, pair_label(sys_a.reference, sys_b.reference)
    )
    return TensorSystem(sys, sys_a, sys_b)


def embed_T(ts: TensorSystem, x, beta: Element, alpha: Element, y):
    """z = (x (x) omega') . (1 (x) beta) + (alpha (x) 1') . (omega (x) y)."""
    if beta.algebra != ts.right.algebra:
        raise AlgebraMismatchError(f"beta must lie in {ts.right.algebra}")
    if alpha.algebra != ts.left.algebra:
        raise AlgebraMismatchError(f"alpha must lie in {ts.left.algebra}")
    one_a, one_b = ts.left.algebra.unit(), ts.right.algebra.unit()
    s = ts.system
    first = mul_right(s, ts.lift_left(x), tensor_elements(one_a, beta))
    second = mul_left(s, tensor_elements(alpha, one_b), ts.lift_right(y))
    return add(s, first, second)


def isometry_residual(ts: TensorSystem, x, beta: Element, alpha: Element, y) -> float:
    """|| <z,z> - (<x,x> (x) beta* beta + alpha* alpha (x) <y,y>) ||."""
    z = embed_T(ts, x, beta, alpha, y)
    lhs = inner(ts.system, z, z)
    rhs = tensor_elements(inner(ts.left, x, x), beta.adjoint() @ beta) + tensor_elements(
        alpha.adjoint() @ alpha, inner(ts.right, y, y)
    )
    return cstar_norm(lhs - rhs)


def leibniz_residual(ts: TensorSystem, x, xp, y, yp, a: Element, b: Element) -> float:
    k = ts.system.kernel(pair_label(x, xp), pair_label(y, yp))
    expect = tensor_elements(a, ts.right.kernel(xp, yp)(b)) + tensor_elements(ts.left.kernel(x, y)(a), b)
    return cstar_norm(k(tensor_elements(a, b)) - expect)


def _four_kernels(ts: TensorSystem, e1, e2):
    s = ts.system
    return [eval_kernel(s, p, q) for p in (e1, e2) for q in (e1, e2)]


def check_otimes(ts: TensorSystem, samples: int = 20, seed: int = 0, tol: float = 1e-9) -> SuiteReport:
    """Randomized verification of the product-unit calculus.

    a: Leibniz rule; b: inner products of product units; c: right module
    compatibility of lifts (against the closed-form kernel); d: x(x)y =
    x(x)w' + w(x)y; e: 1(x)beta commutes with x(x)w' (closed form); f:
    <x(x)w', w(x)y> = 0; plus the isometry of T.
    """
    rng = np.random.default_rng(seed)
    A, B = ts.left.algebra, ts.right.algebra
    one_a, one_b = A.unit(), B.unit()
    w, wp = ts.left.reference, ts.right.reference
    la, lb = ts.left.labels, ts.right.labels
    rep = SuiteReport()
    s = ts.system

    def pick(labels):
        return labels[int(rng.integers(len(labels)))]

    for _ in range(samples):
        x, y, xp, yp = pick(la), pick(la), pick(lb), pick(lb)
        a, b = A.random_element(rng), B.random_element(rng)
        alpha, beta = A.random_element(rng), B.random_element(rng)
        ab = tensor_elements(a, b)

        rep.record("a_leibniz", leibniz_residual(ts, x, xp, y, yp, a, b), tol)

        lhs = inner(s, ts.unit(x, xp), ts.unit(y, yp))
        rhs = tensor_elements(one_a, inner(ts.right, xp, yp)) + tensor_elements(inner(ts.left, x, y), one_b)
        rep.record("b_inner", cstar_norm(lhs - rhs), tol)

        # c: (x (x) w') . (alpha (x) 1') = (x . alpha) (x) w'
        lhs_e = mul_right(s, ts.unit(x, wp), tensor_elements(alpha, one_b))
        rhs_e = ts.lift_left(mul_right(ts.left, x, alpha))
        L = ts.left.kernel
        ac = alpha.adjoint()
        ma = one_a - alpha
        mac = one_a - ac
        inner_part = (
            ac @ L(x, x)(a) @ alpha + ac @ L(x, w)(a) @ ma + mac @ L(w, x)(a) @ alpha + mac @ L(w, w)(a) @ ma
        )
        closed = tensor_elements(a, ts.right.kernel(wp, wp)(b)) + tensor_elements(inner_part, b)
        res = max(cstar_norm(k(ab) - closed) for k in _four_kernels(ts, lhs_e, rhs_e))
        # mirror statement on the right factor
        lhs_e = mul_right(s, ts.unit(w, yp), tensor_elements(one_a, beta))
        rhs_e = ts.lift_right(mul_right(ts.right, yp, beta))
        res = max(res, unit_distance(s, lhs_e, rhs_e))
        rep.record("c_lift_module", res, tol)

        d = add(s, ts.unit(x, wp), ts.unit(w, yp))
        rep.record("d_sum_split", unit_distance(s, ts.unit(x, yp), d), tol)

        # e: closed form for (x (x) w') . (1 (x) beta)
        R = ts.right.kernel
        bc = beta.adjoint()
        mb = one_b - beta
        mbc = one_b - bc
        closed = (
            tensor_elements(a, R(wp, wp)(b))
            + tensor_elements(L(x, x)(a), bc @ b @ beta)
            + tensor_elements(L(w, x)(a), mbc @ b @ beta)
            + tensor_elements(L(x, w)(a), bc @ b @ mb)
            + tensor_elements(L(w, w)(a), mbc @ b @ mb)
        )
        one_beta = tensor_elements(one_a, beta)
        e1 = mul_right(s, ts.unit(x, wp), one_beta)
        e2 = mul_left(s, one_beta, ts.unit(x, wp))
        res = max(cstar_norm(k(ab) - closed) for k in _four_kernels(ts, e1, e2))
        alpha_one = tensor_elements(alpha, one_b)
        res = max(res, unit_distance(s, mul_right(s, ts.unit(w, yp), alpha_one), mul_left(s, alpha_one, ts.unit(w, yp))))
        rep.record("e_commute", res, tol)

        rep.record("f_cross", cstar_norm(inner(s, ts.unit(x, wp), ts.unit(w, yp))), tol)

        ex, ey = random_expr(ts.left, rng, depth=1), random_expr(ts.right, rng, depth=1)
        rep.record("isometry_T", isometry_residual(ts, ex, beta, alpha, ey), tol)
    return rep


def embedding_rank_gap(ts: TensorSystem, tol: float = 1e-9) -> dict:
    """Gram rank of all product units versus the image of T on generators.

    T need not be onto; a positive gap would witness that on an example.
    """
    full = index_report(ts.system, None, tol)
    A, B = ts.left.algebra, ts.right.algebra
    zero_a, zero_b = A.zero(), B.zero()
    image = [embed_T(ts, x, e, zero_a, ts.right.reference) for x in ts.left.labels for e in B.basis()]
    image += [embed_T(ts, ts.left.reference, zero_b, e, y) for y in ts.right.labels for e in A.basis()]
    img = index_report(ts.system, image, tol)
    return {"product_rank": full.numerical_rank, "image_rank": img.numerical_rank,
            "gap": full.numerical_rank - img.numerical_rank}
