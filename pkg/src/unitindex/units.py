"""Formal unit expressions and their kernels.

A unit is identified with its generator kernels against other units, so an
expression is never simplified syntactically: two expressions are the same
unit when their kernels agree. Kernels of composite expressions follow from
the table by bilinear expansion::

    L^{x^beta, w}         = L^{x,w} + beta* . id
    L^{sum x_i k_i, w}(b) = sum k_i* L^{x_i,w}(b)
    L^{sum k_i x_i, w}(b) = sum L^{x_i,w}(k_i* b)

and the mirror rules on the right argument obtained from
L^{w,z}(b) = L^{z,w}(b*)*.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .algebra import Element, SuperOp, cstar_norm, super_exp
from .errors import NormalizationError, SymmetryError, UnknownLabelError
from .kernels import KernelSystem
from .reports import SuiteReport

COEFF_TOL = 1e-12
EQUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Base:
    label: str

    def __str__(self):
        return self.label


@dataclass(frozen=True, eq=False)
class Shift:
    """x^beta, the unit with generator x_t e^{t beta}."""

    inner: "UnitExpr"
    beta: Element

    def __str__(self):
        return f"{self.inner}^beta"


def _check_coefficients(kappas: Sequence[Element]):
    if not kappas:
        raise ValueError("a box-sum needs at least one term")
    alg = kappas[0].algebra
    total = alg.zero()
    for k in kappas:
        total = total + k
    err = cstar_norm(total - alg.unit())
    if err > COEFF_TOL:
        raise NormalizationError(f"box-sum coefficients add up to an element at distance {err:.3e} from 1")


@dataclass(frozen=True, eq=False)
class RightCombo:
    """x^1 k_1 [+] ... [+] x^n k_n with sum k_j = 1."""

    terms: tuple[tuple["UnitExpr", Element], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((e, k) for e, k in self.terms))
        _check_coefficients([k for _, k in self.terms])

    def __str__(self):
        return "[+]".join(f"({e})k" for e, _ in self.terms)


@dataclass(frozen=True, eq=False)
class LeftCombo:
    """k_1 x^1 [+] ... [+] k_n x^n with sum k_j = 1."""

    terms: tuple[tuple[Element, "UnitExpr"], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((k, e) for k, e in self.terms))
        _check_coefficients([k for k, _ in self.terms])

    def __str__(self):
        return "[+]".join(f"k({e})" for _, e in self.terms)


UnitExpr = Union[Base, Shift, RightCombo, LeftCombo]


def as_expr(x: UnitExpr | str) -> UnitExpr:
    return Base(x) if isinstance(x, str) else x


def base_labels(e: UnitExpr) -> set[str]:
    if isinstance(e, Base):
        return {e.label}
    if isinstance(e, Shift):
        return base_labels(e.inner)
    if isinstance(e, RightCombo):
        return set().union(*(base_labels(x) for x, _ in e.terms))
    return set().union(*(base_labels(x) for _, x in e.terms))


# -- kernels -----------------------------------------------------------------

class _Evaluator:
    def __init__(self, sys: KernelSystem):
        self.sys = sys
        self.cache: dict[tuple[int, int], SuperOp] = {}
        self.keep: list = []  # pins ids for the lifetime of the cache

    def __call__(self, e1: UnitExpr, e2: UnitExpr) -> SuperOp:
        key = (id(e1), id(e2))
        hit = self.cache.get(key)
        if hit is None:
            hit = self._eval(e1, e2)
            self.cache[key] = hit
            self.keep.append((e1, e2))
        return hit

    def _eval(self, e1, e2) -> SuperOp:
        # peel the left argument first, then the right one
        if isinstance(e1, Shift):
            return self(e1.inner, e2) + SuperOp.left(e1.beta.adjoint())
        if isinstance(e1, RightCombo):
            return _sum(SuperOp.left(k.adjoint()) @ self(x, e2) for x, k in e1.terms)
        if isinstance(e1, LeftCombo):
            return _sum(self(x, e2) @ SuperOp.left(k.adjoint()) for k, x in e1.terms)
        if isinstance(e2, Shift):
            return self(e1, e2.inner) + SuperOp.right(e2.beta)
        if isinstance(e2, RightCombo):
            return _sum(SuperOp.right(k) @ self(e1, x) for x, k in e2.terms)
        if isinstance(e2, LeftCombo):
            return _sum(self(e1, x) @ SuperOp.right(k) for k, x in e2.terms)
        if isinstance(e1, Base) and isinstance(e2, Base):
            return self.sys.kernel(e1.label, e2.label)
        raise TypeError(f"not a unit expression: {e1!r}, {e2!r}")


def _sum(ops) -> SuperOp:
    ops = iter(ops)
    out = next(ops)
    for op in ops:
        out = out + op
    return out


def eval_kernel(sys: KernelSystem, e1: UnitExpr | str, e2: UnitExpr | str) -> SuperOp:
    """The generator L^{e1,e2} as a map on B."""
    e1, e2 = as_expr(e1), as_expr(e2)
    unknown = (base_labels(e1) | base_labels(e2)) - set(sys.labels)
    if unknown:
        raise UnknownLabelError(f"unknown label {sorted(unknown)[0]!r}")
    return _Evaluator(sys)(e1, e2)


def kernel_semigroup(sys: KernelSystem, e1, e2, t: float, b: Element) -> Element:
    """<e1_t, b e2_t> = exp(t L^{e1,e2})(b)."""
    return super_exp(eval_kernel(sys, e1, e2), t)(b)


# -- module operations -------------------------------------------------------

def _omega(sys: KernelSystem) -> Base:
    return Base(sys.reference)


def add(sys: KernelSystem, x, y) -> RightCombo:
    """x + y = x [+] y [+] (-omega)."""
    one = sys.algebra.unit()
    return RightCombo(((as_expr(x), one), (as_expr(y), one), (_omega(sys), -one)))


def neg(sys: KernelSystem, x) -> RightCombo:
    """-x = 2 omega [+] (-x)."""
    one = sys.algebra.unit()
    return RightCombo(((_omega(sys), 2 * one), (as_expr(x), -one)))


def sub(sys: KernelSystem, x, y) -> RightCombo:
    return add(sys, x, neg(sys, y))


def mul_right(sys: KernelSystem, x, a: Element) -> RightCombo:
    """x . a = x a [+] omega (1 - a)."""
    return RightCombo(((as_expr(x), a), (_omega(sys), sys.algebra.unit() - a)))


def mul_left(sys: KernelSystem, a: Element, x) -> LeftCombo:
    """a . x = a x [+] (1 - a) omega."""
    return LeftCombo(((a, as_expr(x)), (sys.algebra.unit() - a, _omega(sys))))


def translate(sys: KernelSystem, x, new_reference: str) -> RightCombo:
    """x [+] omega_hat [+] (-omega): moves x from reference omega to omega_hat."""
    one = sys.algebra.unit()
    return RightCombo(((as_expr(x), one), (Base(new_reference), one), (_omega(sys), -one)))


# -- equality, normalization, shifts -----------------------------------------

def units_equal(sys: KernelSystem, e1, e2, tol: float = EQUAL_TOL) -> bool:
    """Kernel equality: L^{e1,e1}, L^{e1,e2}, L^{e2,e1}, L^{e2,e2} coincide.

    Equality against xi = e1 and xi = e2 already forces
    <e1_t - e2_t, e1_t - e2_t> = 0, so the four kernels suffice.
    """
    e1, e2 = as_expr(e1), as_expr(e2)
    ev = _Evaluator(sys)
    ks = [ev(e1, e1), ev(e1, e2), ev(e2, e1), ev(e2, e2)]
    return max(k.distance(ks[0]) for k in ks[1:]) <= tol


def unit_distance(sys: KernelSystem, e1, e2) -> float:
    """Largest pairwise distance among the four kernels compared by units_equal."""
    e1, e2 = as_expr(e1), as_expr(e2)
    ev = _Evaluator(sys)
    ks = [ev(e1, e1), ev(e1, e2), ev(e2, e1), ev(e2, e2)]
    return max(p.distance(q) for i, p in enumerate(ks) for q in ks[i + 1:])


def normalize(sys: KernelSystem, x, tol: float = EQUAL_TOL) -> Shift:
    """x^{-beta/2} with beta = L^{x,x}(1); the result has L^{z,z}(1) = 0."""
    x = as_expr(x)
    one = sys.algebra.unit()
    beta = eval_kernel(sys, x, x)(one)
    asym = cstar_norm(beta - beta.adjoint())
    if asym > tol:
        raise SymmetryError(f"L^{{x,x}}(1) is not self-adjoint (residual {asym:.3e}); the kernel table is invalid")
    beta = 0.5 * (beta + beta.adjoint())
    return Shift(x, -0.5 * beta)


def detect_shift(sys: KernelSystem, x, y, tol: float = EQUAL_TOL) -> Element | None:
    """beta with x = y^beta, or None.

    D_xi = L^{x,xi} - L^{y,xi} must be left multiplication by one fixed beta*
    for xi in {x, y} and all base labels.
    """
    x, y = as_expr(x), as_expr(y)
    alg = sys.algebra
    ev = _Evaluator(sys)
    probes = [x, y] + [Base(lbl) for lbl in sys.labels]
    beta_star = (ev(x, y) - ev(y, y))(alg.unit())
    target = SuperOp.left(beta_star)
    for xi in probes:
        if (ev(x, xi) - ev(y, xi)).distance(target) > tol:
            return None
    beta = beta_star.adjoint()
    if not units_equal(sys, x, Shift(y, beta), tol):
        return None
    return beta


def random_expr(sys: KernelSystem, rng: np.random.Generator, depth: int = 2, scale: float = 1.0) -> UnitExpr:
    """A random unit expression built from base labels and module operations."""
    labels = sys.labels
    if depth <= 0 or rng.random() < 0.3:
        return Base(labels[int(rng.integers(len(labels)))])
    alg = sys.algebra
    kind = int(rng.integers(5))
    x = random_expr(sys, rng, depth - 1, scale)
    if kind == 0:
        return Shift(x, alg.random_element(rng, 0.5 * scale))
    if kind == 1:
        return add(sys, x, random_expr(sys, rng, depth - 1, scale))
    if kind == 2:
        return mul_right(sys, x, alg.random_element(rng, scale))
    if kind == 3:
        return mul_left(sys, alg.random_element(rng, scale), x)
    return neg(sys, x)


def check_module_axioms(sys: KernelSystem, samples: int = 50, seed: int = 0, tol: float = EQUAL_TOL) -> SuiteReport:
    """Randomized check that units form a B-B module under +, a.x, x.a,
    that x^beta is compatible with these operations, and that translating to
    another reference label is additive and right B-linear.

    Each residual is the largest kernel distance reported by unit_distance.
    """
    rng = np.random.default_rng(seed)
    alg = sys.algebra
    one = alg.unit()
    w = _omega(sys)
    rep = SuiteReport()
    for _ in range(samples):
        x, y, z = (random_expr(sys, rng, depth=1) for _ in range(3))
        a, b = alg.random_element(rng), alg.random_element(rng)
        beta, gamma = alg.random_element(rng), alg.random_element(rng)

        def rec(key, e1, e2):
            rep.record(key, unit_distance(sys, e1, e2), tol)

        rec("add_associative", add(sys, add(sys, x, y), z), add(sys, x, add(sys, y, z)))
        rec("add_neutral", add(sys, x, w), x)
        rec("add_inverse", add(sys, x, neg(sys, x)), w)
        rec("add_commutative", add(sys, x, y), add(sys, y, x))
        rec("right_associative", mul_right(sys, mul_right(sys, x, a), b), mul_right(sys, x, a @ b))
        rec("left_associative", mul_left(sys, a, mul_left(sys, b, x)), mul_left(sys, a @ b, x))
        rec("left_distributive", mul_left(sys, a, add(sys, x, y)), add(sys, mul_left(sys, a, x), mul_left(sys, a, y)))
        rec("right_distributive", mul_right(sys, add(sys, x, y), a), add(sys, mul_right(sys, x, a), mul_right(sys, y, a)))
        rep.record("unit_action", max(unit_distance(sys, mul_left(sys, one, x), x),
                                      unit_distance(sys, mul_right(sys, x, one), x)), tol)

        rec("shift_add", add(sys, Shift(x, beta), Shift(y, gamma)), Shift(add(sys, x, y), gamma + beta))
        rec("shift_right", mul_right(sys, Shift(x, beta), a), Shift(mul_right(sys, x, a), beta @ a))
        rec("shift_left", mul_left(sys, a, Shift(x, beta)), Shift(mul_left(sys, a, x), a @ beta))

        if len(sys.labels) > 1:
            other = sys.labels[int(rng.integers(len(sys.labels)))]
            hat = sys.with_reference(other)
            phi = lambda e: translate(sys, e, other)  # noqa: E731
            res = max(
                unit_distance(sys, phi(add(sys, x, y)), add(hat, phi(x), phi(y))),
                unit_distance(sys, phi(mul_right(sys, x, a)), mul_right(hat, phi(x), a)),
            )
            rep.record("translation", res, tol)
    return rep


MODULE_AXIOMS = (
    "add_associative",
    "add_neutral",
    "add_inverse",
    "add_commutative",
    "right_associative",
    "left_associative",
    "left_distributive",
    "right_distributive",
    "unit_action",
)
