"""Kernel systems: generators L^{x,y} of CPD semigroups on a finite label set."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import Algebra, Element, SuperOp, cstar_norm, super_exp
from .errors import (
    IncompleteTableError,
    ReferenceLabelError,
    SymmetryError,
    UnknownLabelError,
)

SYMMETRY_TOL = 1e-10
CCPD_TOL = 1e-8


def symmetry_residual(lxy: SuperOp, lyx: SuperOp) -> float:
    """max over matrix units b of ||L^{y,x}(b) - L^{x,y}(b*)*||."""
    diff = lyx.matrix - lxy.star().matrix
    alg = lxy.algebra
    return max((cstar_norm(alg.from_vec(diff[:, k])) for k in range(alg.dim)), default=0.0)


class KernelSystem:
    """Labels, a total table (x, y) -> L^{x,y}, and a reference label.

    Construction validates completeness, the reference and Hermitian
    symmetry; instances are never mutated afterwards.
    """

    def __init__(
        self,
        algebra: Algebra,
        labels: Sequence[str],
        table: Mapping[tuple[str, str], SuperOp],
        reference: str,
        symmetry_tol: float = SYMMETRY_TOL,
    ):
        labels = tuple(str(x) for x in labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")
        if reference not in labels:
            raise ReferenceLabelError(f"reference {reference!r} is not among the labels {list(labels)}")
        missing = [(x, y) for x in labels for y in labels if (x, y) not in table]
        if missing:
            raise IncompleteTableError(f"kernel table lacks pairs {missing[:5]}{'...' if len(missing) > 5 else ''}")
        tab = {}
        for x in labels:
            for y in labels:
                op = table[(x, y)]
                if op.algebra != algebra:
                    raise ValueError(f"kernel {(x, y)} lives over {op.algebra}, expected {algebra}")
                tab[(x, y)] = op
        for i, x in enumerate(labels):
            for y in labels[i:]:
                r = symmetry_residual(tab[(x, y)], tab[(y, x)])
                if r > symmetry_tol:
                    raise SymmetryError(
                        f"L^{{{y},{x}}}(b) != L^{{{x},{y}}}(b*)* (residual {r:.3e})",
                        witness={"pair": [x, y], "residual": r},
                    )
        self.algebra = algebra
        self.labels = labels
        self.reference = reference
        self._table = tab

    def __repr__(self):
        return f"KernelSystem(algebra={list(self.algebra.block_sizes)}, labels={list(self.labels)}, reference={self.reference!r})"

    def kernel(self, x: str, y: str) -> SuperOp:
        try:
            return self._table[(x, y)]
        except KeyError:
            bad = x if x not in self.labels else y
            raise UnknownLabelError(f"unknown label {bad!r}") from None

    def __getitem__(self, pair: tuple[str, str]) -> SuperOp:
        return self.kernel(*pair)

    @property
    def table(self) -> dict[tuple[str, str], SuperOp]:
        return dict(self._table)

    def with_reference(self, reference: str) -> KernelSystem:
        return KernelSystem(self.algebra, self.labels, self._table, reference)

    def relabel(self, mapping: Mapping[str, str]) -> KernelSystem:
        """Bijective renaming that carries the table verbatim."""
        new = [mapping.get(x, x) for x in self.labels]
        if len(set(new)) != len(new):
            raise ValueError("relabeling is not injective")
        m = dict(zip(self.labels, new))
        table = {(m[x], m[y]): op for (x, y), op in self._table.items()}
        return KernelSystem(self.algebra, new, table, m[self.reference])

    def symmetry_report(self) -> dict:
        worst, pair = 0.0, None
        for i, x in enumerate(self.labels):
            for y in self.labels[i:]:
                r = symmetry_residual(self._table[(x, y)], self._table[(y, x)])
                if r >= worst:
                    worst, pair = r, (x, y)
        return {"max_residual": worst, "pair": list(pair) if pair else None}


def new_kernel_system(algebra, labels, table, reference, symmetry_tol=SYMMETRY_TOL) -> KernelSystem:
    return KernelSystem(algebra, labels, table, reference, symmetry_tol=symmetry_tol)


def semigroup_eval(sys: KernelSystem, x: str, y: str, t: float, b: Element) -> Element:
    """K_t^{x,y}(b) = exp(t L^{x,y})(b)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return super_exp(sys.kernel(x, y), t)(b)


# -- conditional complete positive definiteness -----------------------------

@dataclass
class CCPDReport:
    min_eigenvalue: float
    passed: bool
    samples: int
    witness: dict | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "pass": self.passed,
            "samples": self.samples,
            "witness": self.witness,
        }


def ccpd_sum(sys: KernelSystem, labels: Sequence[str], a: Sequence[Element], b: Sequence[Element]) -> Element:
    """sum_{i,j} b_i* L^{x_i,x_j}(a_i* a_j) b_j for one tuple."""
    out = sys.algebra.zero()
    for xi, ai, bi in zip(labels, a, b):
        for xj, aj, bj in zip(labels, a, b):
            out = out + bi.adjoint() @ sys.kernel(xi, xj)(ai.adjoint() @ aj) @ bj
    return out


def _constraint_tuple(alg: Algebra, n: int, rng: np.random.Generator, max_cond: float = 1e3):
    # redraw until a_n is comfortably invertible, then solve for b_n
    while True:
        a = [alg.random_element(rng) for _ in range(n)]
        if max(np.linalg.cond(blk) for blk in a[-1].blocks) <= max_cond:
            break
    b = [alg.random_element(rng) for _ in range(n - 1)]
    rest = alg.zero()
    for aj, bj in zip(a[:-1], b):
        rest = rest + aj @ bj
    b.append(-(a[-1].inverse() @ rest))
    # common rescaling keeps sum a_j b_j = 0 and the sign of the quadratic form
    s = max(cstar_norm(x) for x in b)
    if s > 0:
        b = [x / s for x in b]
    return a, b


def check_ccpd(sys: KernelSystem, sample_count: int = 200, tol: float = CCPD_TOL, seed: int = 0) -> CCPDReport:
    """Randomized test of the CCPD condition on the kernel table.

    Each sample draws n in {2, 3} labels (with repetition) and elements with
    sum_j a_j b_j = 0; the smallest eigenvalue of the resulting sum must be
    at least -tol.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    rng = np.random.default_rng(seed)
    worst, witness = np.inf, None
    for k in range(sample_count):
        n = int(rng.integers(2, 4))
        xs = [sys.labels[i] for i in rng.integers(0, len(sys.labels), size=n)]
        a, b = _constraint_tuple(sys.algebra, n, rng)
        s = ccpd_sum(sys, xs, a, b)
        lam = min(float(np.linalg.eigvalsh(0.5 * (blk + blk.conj().T))[0]) for blk in s.blocks)
        if lam < worst:
            worst = lam
            if lam < -tol:
                witness = {"sample": k, "labels": xs, "a": a, "b": b, "value": s, "min_eigenvalue": lam}
    return CCPDReport(min_eigenvalue=float(worst), passed=worst >= -tol, samples=sample_count, witness=witness)
