"""Multivariate polynomials in x over Gaussian rationals.

A PolyFunction is a sparse dict from exponent multi-indices (one int per
coordinate) to nonzero GaussianRational coefficients.  These stand in for
the smooth coefficient functions of the operator calculus; restricting to
polynomials keeps every identity in the package exactly decidable.

Terms are kept with no zero coefficients; serialization and string output
use graded lexicographic order so equal polynomials always print and dump
identically.
"""

from __future__ import annotations

from typing import Dict, Iterable, Tuple

from .errors import DimensionMismatch
from .scalars import GaussianRational, ZERO, ONE

Exponent = Tuple[int, ...]


def grlex_key(beta: Exponent):
    """Sort key for graded lexicographic term order."""
    return (sum(beta), beta)


class PolyFunction:
    """Exact polynomial in x_1..x_d with GaussianRational coefficients."""

    __slots__ = ("dimension", "terms", "_hash")

    def __init__(self, dimension: int, terms: Dict[Exponent, GaussianRational] = None):
        if dimension < 1:
            raise ValueError("dimension must be a positive integer")
        clean = {}
        for beta, coeff in (terms or {}).items():
            beta = tuple(int(b) for b in beta)
            if len(beta) != dimension or any(b < 0 for b in beta):
                raise ValueError(f"bad exponent {beta} for dimension {dimension}")
            if not isinstance(coeff, GaussianRational):
                coeff = GaussianRational(coeff)
            if coeff:
                clean[beta] = clean.get(beta, ZERO) + coeff
                if not clean[beta]:
                    del clean[beta]
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("PolyFunction is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def _make(cls, dimension: int, terms: Dict[Exponent, GaussianRational]) -> "PolyFunction":
        """Fast path for internal arithmetic; terms must be canonical and nonzero."""
        self = object.__new__(cls)
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_hash", None)
        return self

    @classmethod
    def zero(cls, dimension: int) -> "PolyFunction":
        return cls(dimension, {})

    @classmethod
    def constant(cls, dimension: int, value) -> "PolyFunction":
        return cls(dimension, {(0,) * dimension: value})

    @classmethod
    def variable(cls, dimension: int, axis: int) -> "PolyFunction":
        """The coordinate function x_axis, with axis in 1..d."""
        if not 1 <= axis <= dimension:
            raise ValueError(f"axis {axis} out of range 1..{dimension}")
        beta = [0] * dimension
        beta[axis - 1] = 1
        return cls(dimension, {tuple(beta): ONE})

    @classmethod
    def monomial(cls, dimension: int, beta: Exponent, coeff=ONE) -> "PolyFunction":
        return cls(dimension, {tuple(beta): coeff})

    # -- ring operations ----------------------------------------------------

    def _check_dim(self, other: "PolyFunction"):
        if self.dimension != other.dimension:
            raise DimensionMismatch(
                f"polynomials over R^{self.dimension} and R^{other.dimension}"
            )

    def __add__(self, other: "PolyFunction") -> "PolyFunction":
        self._check_dim(other)
        out = dict(self.terms)
        for beta, coeff in other.terms.items():
            acc = out.get(beta)
            merged = coeff if acc is None else acc + coeff
            if merged:
                out[beta] = merged
            elif acc is not None:
                del out[beta]
        return PolyFunction._make(self.dimension, out)

    def __neg__(self) -> "PolyFunction":
        return PolyFunction._make(self.dimension, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other: "PolyFunction") -> "PolyFunction":
        return self + (-other)

    def __mul__(self, other: "PolyFunction") -> "PolyFunction":
        self._check_dim(other)
        out: Dict[Exponent, GaussianRational] = {}
        for b1, c1 in self.terms.items():
            for b2, c2 in other.terms.items():
                beta = tuple(i + j for i, j in zip(b1, b2))
                prod = c1 * c2
                acc = out.get(beta)
                out[beta] = prod if acc is None else acc + prod
        return PolyFunction._make(self.dimension, {b: c for b, c in out.items() if c})

    def scale(self, scalar) -> "PolyFunction":
        if not isinstance(scalar, GaussianRational):
            scalar = GaussianRational(scalar)
        if not scalar:
            return PolyFunction.zero(self.dimension)
        return PolyFunction._make(self.dimension, {b: scalar * c for b, c in self.terms.items()})

    def __pow__(self, n: int) -> "PolyFunction":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = PolyFunction.constant(self.dimension, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus -----------------------------------------------------------

    def partial(self, axis: int) -> "PolyFunction":
        """Exact partial derivative with respect to x_axis (1-based)."""
        if not 1 <= axis <= self.dimension:
            raise ValueError(f"axis {axis} out of range 1..{self.dimension}")
        j = axis - 1
        out = {}
        for beta, coeff in self.terms.items():
            if beta[j] == 0:
                continue
            lowered = beta[:j] + (beta[j] - 1,) + beta[j + 1 :]
            out[lowered] = out.get(lowered, ZERO) + coeff * GaussianRational(beta[j])
        return PolyFunction._make(self.dimension, {b: c for b, c in out.items() if c})

    def evaluate(self, point: Iterable) -> GaussianRational:
        values = [v if isinstance(v, GaussianRational) else GaussianRational(v) for v in point]
        if len(values) != self.dimension:
            raise DimensionMismatch("evaluation point has wrong length")
        total = ZERO
        for beta, coeff in self.terms.items():
            term = coeff
            for v, e in zip(values, beta):
                if e:
                    term = term * v**e
            total = total + term
        return total

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(b) == 0 for b in self.terms)

    def constant_value(self) -> GaussianRational:
        return self.terms.get((0,) * self.dimension, ZERO)

    def total_degree(self) -> int:
        """Total degree; the zero polynomial reports 0."""
        return max((sum(b) for b in self.terms), default=0)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    def __eq__(self, other):
        if not isinstance(other, PolyFunction):
            return NotImplemented
        return self.dimension == other.dimension and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            h = hash((self.dimension, tuple(self.sorted_terms())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for beta, coeff in self.sorted_terms():
            factors = [f"x{i+1}^{e}" if e > 1 else f"x{i+1}" for i, e in enumerate(beta) if e]
            body = "*".join(factors)
            parts.append(f"({coeff})" + ("*" + body if body else ""))
        return " + ".join(parts)

    __repr__ = __str__
