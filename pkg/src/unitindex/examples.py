"""Constructors for concrete kernel systems.

* Fock-type systems: units u(zeta, beta) with zeta in B^m and kernels
  L^{u(z,b), u(z',b')}(c) = <z, c z'> + b* c + c b'.
* Twisted systems over M_n: L^{xi,eta}(c) = c (A_eta - i h) + (A_xi* + i h) c.
* Random Christensen-Evans systems for fuzzing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Algebra, Element, SuperOp, cstar_norm
from .errors import ShapeError
from .kernels import KernelSystem

REFERENCE = "omega"


@dataclass
class FockUnit:
    zeta: list[Element]
    beta: Element


@dataclass
class FockSpec:
    algebra: Algebra
    fock_dim: int
    units: dict[str, FockUnit] = field(default_factory=dict)
    reference: str = REFERENCE

    def __post_init__(self):
        if self.fock_dim < 0:
            raise ShapeError("fock_dim must be nonnegative")
        if self.reference not in self.units:
            self.units = {self.reference: self.null_unit(), **self.units}
        for name, u in self.units.items():
            if len(u.zeta) != self.fock_dim:
                raise ShapeError(f"unit {name!r}: zeta has {len(u.zeta)} components, expected {self.fock_dim}")
            for z in [*u.zeta, u.beta]:
                if z.algebra != self.algebra:
                    raise ShapeError(f"unit {name!r}: element over {z.algebra}, expected {self.algebra}")
        ref = self.units[self.reference]
        if any(cstar_norm(z) > 0 for z in [*ref.zeta, ref.beta]):
            raise ValueError("the reference unit must be u(0, 0)")

    def null_unit(self) -> FockUnit:
        return FockUnit([self.algebra.zero() for _ in range(self.fock_dim)], self.algebra.zero())

    def zeta_kernel(self, x: str, y: str) -> SuperOp:
        """c -> <zeta_x, c zeta_y>."""
        out = SuperOp.zero(self.algebra)
        for zx, zy in zip(self.units[x].zeta, self.units[y].zeta):
            out = out + SuperOp.sandwich(zx.adjoint(), zy)
        return out

    def zeta_gram(self, x: str, y: str) -> Element:
        return self.zeta_kernel(x, y)(self.algebra.unit())


def fock_system(spec: FockSpec) -> KernelSystem:
    labels = list(spec.units)
    table = {}
    for x in labels:
        for y in labels:
            table[(x, y)] = (
                spec.zeta_kernel(x, y)
                + SuperOp.left(spec.units[x].beta.adjoint())
                + SuperOp.right(spec.units[y].beta)
            )
    return KernelSystem(spec.algebra, labels, table, spec.reference)


@dataclass
class TwistedSpec:
    n: int
    h: Element
    units: dict[str, Element] = field(default_factory=dict)
    reference: str = REFERENCE

    def __post_init__(self):
        alg = Algebra((self.n,))
        if self.h.algebra != alg:
            raise ShapeError(f"h must lie in M_{self.n}")
        if cstar_norm(self.h - self.h.adjoint()) > 1e-12:
            raise ValueError("h must be self-adjoint")
        if self.reference not in self.units:
            self.units = {self.reference: alg.zero(), **self.units}
        if cstar_norm(self.units[self.reference]) > 0:
            raise ValueError("the reference unit must have A = 0")

    @property
    def algebra(self) -> Algebra:
        return Algebra((self.n,))


def twisted_system(spec: TwistedSpec) -> KernelSystem:
    ih = 1j * spec.h
    labels = list(spec.units)
    table = {
        (x, y): SuperOp.right(spec.units[y] - ih) + SuperOp.left(spec.units[x].adjoint() + ih)
        for x in labels
        for y in labels
    }
    return KernelSystem(spec.algebra, labels, table, spec.reference)


def _scaled(alg: Algebra, rng: np.random.Generator) -> Element:
    a = alg.random_element(rng)
    return (float(rng.uniform(0.1, 1.0)) / cstar_norm(a)) * a


def random_fock_spec(algebra: Algebra, fock_dim: int, unit_count: int, seed: int) -> FockSpec:
    """Reference plus ``unit_count - 1`` units with random zeta, beta of norm <= 1."""
    if unit_count < 1:
        raise ValueError("unit_count must be at least 1")
    rng = np.random.default_rng(seed)
    units = {}
    for k in range(1, unit_count):
        units[f"u{k}"] = FockUnit([_scaled(algebra, rng) for _ in range(fock_dim)], _scaled(algebra, rng))
    return FockSpec(algebra, fock_dim, units)


def random_ce_system(algebra: Algebra, fock_dim: int, unit_count: int, seed: int) -> KernelSystem:
    return fock_system(random_fock_spec(algebra, fock_dim, unit_count, seed))


def random_twisted_spec(n: int, unit_count: int, seed: int) -> TwistedSpec:
    rng = np.random.default_rng(seed)
    alg = Algebra((n,))
    h = alg.random_self_adjoint(rng)
    h = 0.5 * (h + h.adjoint())
    return TwistedSpec(n, h, {f"xi{k}": alg.random_element(rng) for k in range(1, unit_count)})
