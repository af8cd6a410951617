"""Finite-dimensional C*-algebras B = M_{n_1} (+) ... (+) M_{n_k} and maps B -> B.

Elements are stored block by block. Coordinates stack the columns of each
block, blocks in descriptor order, so that for ``a`` with blocks ``a_i``::

    vec(a) = (vec_F(a_1), ..., vec_F(a_k))

Under this convention left multiplication by ``a`` has matrix
``(+)_i kron(I, a_i)`` and right multiplication ``(+)_i kron(a_i^T, I)``, and
composing maps is plain matrix multiplication.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import AlgebraMismatchError, NumericInputError, ShapeError

DEFAULT_POSITIVITY_TOL = 1e-9


@dataclass(frozen=True)
class Algebra:
    """Descriptor of a direct sum of full matrix algebras."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise ShapeError(f"block sizes must be a nonempty list of positive integers, got {self.block_sizes!r}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def embedding_dim(self) -> int:
        return sum(self.block_sizes)

    @property
    def dim(self) -> int:
        """Complex dimension (length of the coordinate vector)."""
        return sum(n * n for n in self.block_sizes)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for n in self.block_sizes:
            out.append(acc)
            acc += n * n
        return tuple(out)

    def zero(self) -> Element:
        return Element(self, [np.zeros((n, n), complex) for n in self.block_sizes])

    def unit(self) -> Element:
        return Element(self, [np.eye(n, dtype=complex) for n in self.block_sizes])

    def scalar(self, c: complex) -> Element:
        return complex(c) * self.unit()

    def from_vec(self, v) -> Element:
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.size != self.dim:
            raise ShapeError(f"coordinate vector of length {v.size}, expected {self.dim}")
        blocks = [v[o:o + n * n].reshape((n, n), order="F") for o, n in zip(self.offsets, self.block_sizes)]
        return Element(self, blocks)

    def basis(self) -> list[Element]:
        """Matrix units, in coordinate order."""
        eye = np.eye(self.dim, dtype=complex)
        return [self.from_vec(eye[k]) for k in range(self.dim)]

    def matrix_unit(self, block: int, row: int, col: int) -> Element:
        a = self.zero()
        blocks = [b.copy() for b in a.blocks]
        blocks[block][row, col] = 1.0
        return Element(self, blocks)

    def element(self, *blocks) -> Element:
        return Element(self, blocks)

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> Element:
        """Element with independent standard complex Gaussian entries."""
        blocks = [
            scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
            for n in self.block_sizes
        ]
        return Element(self, blocks)

    def random_positive(self, rng: np.random.Generator, max_norm: float | None = None) -> Element:
        c = self.random_element(rng)
        p = c.adjoint() @ c
        if max_norm is not None:
            p = (max_norm / max(cstar_norm(p), 1e-300)) * p
        return p

    def random_self_adjoint(self, rng: np.random.Generator) -> Element:
        c = self.random_element(rng)
        return 0.5 * (c + c.adjoint())


class Element:
    """An element of a finite-dimensional C*-algebra.

    ``a @ b`` is the algebra product; ``*`` is reserved for complex scalars.
    """

    __slots__ = ("algebra", "blocks")
    __array_ufunc__ = None

    def __init__(self, algebra: Algebra, blocks: Iterable):
        blocks = tuple(np.array(b, dtype=complex) for b in blocks)
        if len(blocks) != len(algebra.block_sizes):
            raise ShapeError(f"expected {len(algebra.block_sizes)} blocks, got {len(blocks)}")
        for b, n in zip(blocks, algebra.block_sizes):
            if b.shape != (n, n):
                raise ShapeError(f"block of shape {b.shape}, expected {(n, n)}")
            b.setflags(write=False)
        self.algebra = algebra
        self.blocks = blocks

    def __repr__(self):
        return f"Element({list(self.algebra.block_sizes)}, {[b.tolist() for b in self.blocks]})"

    def _check(self, other: Element):
        if not isinstance(other, Element):
            return NotImplemented
        if other.algebra != self.algebra:
            raise AlgebraMismatchError(f"{self.algebra} vs {other.algebra}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return Element(self.algebra, [-a for a in self.blocks])

    def __mul__(self, c):
        if isinstance(c, Element) or not np.isscalar(c):
            return NotImplemented
        return Element(self.algebra, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def adjoint(self) -> Element:
        return Element(self.algebra, [a.conj().T for a in self.blocks])

    @property
    def H(self) -> Element:
        return self.adjoint()

    def vec(self) -> np.ndarray:
        return np.concatenate([b.reshape(-1, order="F") for b in self.blocks])

    def dense(self) -> np.ndarray:
        """Block-diagonal matrix of size N x N (the embedding B in M_N)."""
        return scipy.linalg.block_diag(*self.blocks)

    def norm(self) -> float:
        return cstar_norm(self)

    def inverse(self) -> Element:
        return Element(self.algebra, [np.linalg.inv(b) for b in self.blocks])

    def allclose(self, other: Element, atol: float = 1e-10) -> bool:
        return cstar_norm(self - other) <= atol


def cstar_norm(a: Element) -> float:
    """Largest singular value over all blocks."""
    for b, n in zip(a.blocks, a.algebra.block_sizes):
        if b.shape != (n, n):
            raise ShapeError(f"block of shape {b.shape}, expected {(n, n)}")
    return max(float(np.linalg.norm(b, 2)) for b in a.blocks)


def is_positive(a: Element, tol: float = DEFAULT_POSITIVITY_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if cstar_norm(a - a.adjoint()) > tol:
        return False
    return min_eigenvalue(a) >= -tol


def min_eigenvalue(a: Element) -> float:
    """Smallest eigenvalue of the Hermitian part of ``a``."""
    return min(float(np.linalg.eigvalsh(0.5 * (b + b.conj().T))[0]) for b in a.blocks)


def _block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
    return scipy.linalg.block_diag(*mats).astype(complex)


class SuperOp:
    """A C-linear map B -> B acting on coordinate vectors."""

    __slots__ = ("algebra", "matrix")
    __array_ufunc__ = None

    def __init__(self, algebra: Algebra, matrix):
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (algebra.dim, algebra.dim):
            raise ShapeError(f"superoperator matrix of shape {matrix.shape}, expected {(algebra.dim,) * 2}")
        matrix.setflags(write=False)
        self.algebra = algebra
        self.matrix = matrix

    def __repr__(self):
        return f"SuperOp({list(self.algebra.block_sizes)}, dim={self.algebra.dim})"

    @classmethod
    def identity(cls, algebra: Algebra) -> SuperOp:
        return cls(algebra, np.eye(algebra.dim))

    @classmethod
    def zero(cls, algebra: Algebra) -> SuperOp:
        return cls(algebra, np.zeros((algebra.dim, algebra.dim)))

    @classmethod
    def left(cls, a: Element) -> SuperOp:
        """b -> a b"""
        return cls(a.algebra, _block_diag([np.kron(np.eye(n), x) for x, n in zip(a.blocks, a.algebra.block_sizes)]))

    @classmethod
    def right(cls, a: Element) -> SuperOp:
        """b -> b a"""
        return cls(a.algebra, _block_diag([np.kron(x.T, np.eye(n)) for x, n in zip(a.blocks, a.algebra.block_sizes)]))

    @classmethod
    def sandwich(cls, a: Element, c: Element) -> SuperOp:
        """b -> a b c"""
        return cls(a.algebra, _block_diag([np.kron(z.T, x) for x, z in zip(a.blocks, c.blocks)]))

    @classmethod
    def from_function(cls, algebra: Algebra, fn) -> SuperOp:
        cols = [fn(e).vec() for e in algebra.basis()]
        return cls(algebra, np.column_stack(cols))

    def __call__(self, a: Element) -> Element:
        if a.algebra != self.algebra:
            raise AlgebraMismatchError(f"{self.algebra} vs {a.algebra}")
        return self.algebra.from_vec(self.matrix @ a.vec())

    apply = __call__

    def _check(self, other):
        if not isinstance(other, SuperOp):
            return NotImplemented
        if other.algebra != self.algebra:
            raise AlgebraMismatchError(f"{self.algebra} vs {other.algebra}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SuperOp(self.algebra, self.matrix + other.matrix)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SuperOp(self.algebra, self.matrix - other.matrix)

    def __neg__(self):
        return SuperOp(self.algebra, -self.matrix)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return SuperOp(self.algebra, c * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Composition: (P @ Q)(b) = P(Q(b))."""
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SuperOp(self.algebra, self.matrix @ other.matrix)

    def star(self) -> SuperOp:
        """The map b -> (L(b*))*."""
        p = adjoint_permutation(self.algebra)
        return SuperOp(self.algebra, self.matrix.conj()[np.ix_(p, p)])

    def distance(self, other: SuperOp) -> float:
        """Spectral norm of the matrix difference in the coordinate basis."""
        if self._check(other) is NotImplemented:
            raise TypeError("distance needs a SuperOp")
        return float(np.linalg.norm(self.matrix - other.matrix, 2))

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def compose(p: SuperOp, q: SuperOp) -> SuperOp:
    return p @ q


def adjoint_permutation(algebra: Algebra) -> np.ndarray:
    """Index map with vec(b*) = conj(vec(b))[perm]."""
    perm = []
    for o, n in zip(algebra.offsets, algebra.block_sizes):
        # coordinate of (i, j) is o + i + n*j; (b*)_{ij} = conj(b_{ji})
        for j in range(n):
            for i in range(n):
                perm.append(o + j + n * i)
    return np.array(perm, dtype=int)


def super_exp(op: SuperOp, t: float) -> SuperOp:
    """exp(t L) as a map on B.

    Scaling and squaring with a Pade core (scipy.linalg.expm).
    """
    t = float(t)
    if not np.isfinite(t) or not np.all(np.isfinite(op.matrix)):
        raise NumericInputError("super_exp needs finite t and a finite generator")
    if t == 0.0:
        return SuperOp.identity(op.algebra)
    return SuperOp(op.algebra, scipy.linalg.expm(t * op.matrix))


# -- tensor products ---------------------------------------------------------

def tensor_algebra(a: Algebra, b: Algebra) -> Algebra:
    """Blocks n_i * m_j in row-major pair order."""
    return Algebra(tuple(n * m for n in a.block_sizes for m in b.block_sizes))


def tensor_elements(x: Element, y: Element) -> Element:
    alg = tensor_algebra(x.algebra, y.algebra)
    return Element(alg, [np.kron(p, q) for p in x.blocks for q in y.blocks])


def _tensor_coordinate_map(a: Algebra, b: Algebra) -> np.ndarray:
    """perm[ka * d_B + kb] = coordinate of (matrix unit ka) (x) (matrix unit kb)."""
    ab = tensor_algebra(a, b)
    perm = np.empty(a.dim * b.dim, dtype=int)
    for i, (oa, n) in enumerate(zip(a.offsets, a.block_sizes)):
        for j, (ob, m) in enumerate(zip(b.offsets, b.block_sizes)):
            o = ab.offsets[i * len(b.block_sizes) + j]
            nm = n * m
            for q in range(n):
                for p in range(n):
                    ka = oa + p + n * q
                    for s in range(m):
                        for r in range(m):
                            kb = ob + r + m * s
                            perm[ka * b.dim + kb] = o + (p * m + r) + nm * (q * m + s)
    return perm


def tensor_superops(p: SuperOp, q: SuperOp) -> SuperOp:
    """The map acting as p (x) q on elementary tensors."""
    ab = tensor_algebra(p.algebra, q.algebra)
    perm = _tensor_coordinate_map(p.algebra, q.algebra)
    m = np.zeros((ab.dim, ab.dim), dtype=complex)
    m[np.ix_(perm, perm)] = np.kron(p.matrix, q.matrix)
    return SuperOp(ab, m)
