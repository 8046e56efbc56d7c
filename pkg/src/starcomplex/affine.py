"""Invertible affine maps x -> A x + b with exactly stored inverses.

These play the role of the diffeomorphism group: pullbacks of polynomials
stay polynomial, the Jacobian is the constant matrix A, and the inverse
pair (A^-1, -A^-1 b) is computed exactly at construction and verified.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence, Tuple

from .errors import DimensionMismatch, SingularMatrix
from .polynomials import PolyFunction
from .scalars import GaussianRational, ONE, ZERO

Row = Tuple[GaussianRational, ...]


def _as_scalar(v) -> GaussianRational:
    return v if isinstance(v, GaussianRational) else GaussianRational(v)


def _invert_matrix(rows: Tuple[Row, ...]) -> Tuple[Row, ...]:
    """Exact inverse by Gauss-Jordan elimination; raises SingularMatrix."""
    d = len(rows)
    aug = [list(rows[i]) + [ONE if i == j else ZERO for j in range(d)] for i in range(d)]
    for col in range(d):
        pivot_row = next((r for r in range(col, d) if aug[r][col]), None)
        if pivot_row is None:
            raise SingularMatrix(f"matrix is singular (no pivot in column {col + 1})")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        inv_pivot = ONE / aug[col][col]
        aug[col] = [entry * inv_pivot for entry in aug[col]]
        for r in range(d):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * p for a, p in zip(aug[r], aug[col])]
    return tuple(tuple(row[d:]) for row in aug)


def _mat_mul(a, b):
    d = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(d)), ZERO) for j in range(d))
        for i in range(d)
    )


def _mat_vec(a, v):
    return tuple(sum((row[k] * v[k] for k in range(len(v))), ZERO) for row in a)


class AffineDiffeo:
    """x -> A x + b with A invertible over the Gaussian rationals."""

    __slots__ = ("dimension", "matrix", "offset", "inverse_matrix", "inverse_offset", "_pow_cache")

    def __init__(self, matrix: Sequence[Sequence], offset: Sequence):
        d = len(offset)
        rows = tuple(tuple(_as_scalar(v) for v in row) for row in matrix)
        if len(rows) != d or any(len(row) != d for row in rows):
            raise DimensionMismatch("matrix shape does not match offset length")
        b = tuple(_as_scalar(v) for v in offset)
        inv = _invert_matrix(rows)
        identity = tuple(tuple(ONE if i == j else ZERO for j in range(d)) for i in range(d))
        if _mat_mul(rows, inv) != identity:
            raise SingularMatrix("inverse verification failed")  # pragma: no cover
        inv_offset = tuple(-c for c in _mat_vec(inv, b))
        object.__setattr__(self, "dimension", d)
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "offset", b)
        object.__setattr__(self, "inverse_matrix", inv)
        object.__setattr__(self, "inverse_offset", inv_offset)
        object.__setattr__(self, "_pow_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("AffineDiffeo is immutable")

    @classmethod
    def identity(cls, dimension: int) -> "AffineDiffeo":
        return _identity(dimension)

    def is_identity(self) -> bool:
        d = self.dimension
        return all(not c for c in self.offset) and all(
            self.matrix[i][j] == (ONE if i == j else ZERO) for i in range(d) for j in range(d)
        )

    def apply(self, point: Sequence) -> Tuple[GaussianRational, ...]:
        v = tuple(_as_scalar(p) for p in point)
        if len(v) != self.dimension:
            raise DimensionMismatch("point has wrong length")
        return tuple(c + o for c, o in zip(_mat_vec(self.matrix, v), self.offset))

    def coordinate_image(self, axis: int) -> PolyFunction:
        """The i-th component of A x + b as a degree <= 1 polynomial."""
        d = self.dimension
        i = axis - 1
        terms = {}
        for j in range(d):
            if self.matrix[i][j]:
                beta = [0] * d
                beta[j] = 1
                terms[tuple(beta)] = self.matrix[i][j]
        if self.offset[i]:
            terms[(0,) * d] = self.offset[i]
        return PolyFunction(d, terms)

    def _image_power(self, axis: int, power: int) -> PolyFunction:
        key = (axis, power)
        cached = self._pow_cache.get(key)
        if cached is None:
            cached = self.coordinate_image(axis) ** power
            self._pow_cache[key] = cached
        return cached

    def __eq__(self, other):
        if not isinstance(other, AffineDiffeo):
            return NotImplemented
        return self.matrix == other.matrix and self.offset == other.offset

    def __hash__(self):
        return hash((self.matrix, self.offset))

    def __str__(self):
        return f"AffineDiffeo(A={self.matrix}, b={self.offset})"

    __repr__ = __str__


def poly_compose_affine(f: PolyFunction, phi: AffineDiffeo) -> PolyFunction:
    """Exact substitution (f o phi)(x) = f(A x + b); total degree preserved."""
    if f.dimension != phi.dimension:
        raise DimensionMismatch("polynomial and affine map dimensions differ")
    if phi.is_identity():
        return f
    out = PolyFunction.zero(f.dimension)
    for beta, coeff in f.terms.items():
        term = PolyFunction.constant(f.dimension, coeff)
        for axis0, e in enumerate(beta):
            if e:
                term = term * phi._image_power(axis0 + 1, e)
        out = out + term
    return out


@lru_cache(maxsize=None)
def _identity(dimension: int) -> AffineDiffeo:
    return AffineDiffeo(
        [[1 if i == j else 0 for j in range(dimension)] for i in range(dimension)],
        [0] * dimension,
    )


@lru_cache(maxsize=None)
def affine_compose(first: AffineDiffeo, second: AffineDiffeo) -> AffineDiffeo:
    """(first o second)(x) = first(second(x)).

    Results are interned: repeated compositions of the same pair return the
    same object, so its pullback power cache keeps paying off.
    """
    if first.dimension != second.dimension:
        raise DimensionMismatch("affine maps over different dimensions")
    matrix = _mat_mul(first.matrix, second.matrix)
    offset = tuple(
        c + o for c, o in zip(_mat_vec(first.matrix, second.offset), first.offset)
    )
    return AffineDiffeo(matrix, offset)


@lru_cache(maxsize=None)
def affine_invert(phi: AffineDiffeo) -> AffineDiffeo:
    """The exact inverse map; involutive by construction.  Interned."""
    return AffineDiffeo(phi.inverse_matrix, phi.inverse_offset)
