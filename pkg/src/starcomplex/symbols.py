"""Truncated symbol calculus for formal differential operators.

A symbol level is a polynomial in the dual variables xi with PolyFunction
coefficients.  A FormalSymbol stacks levels P^0..P^N along powers of the
deformation parameter hbar, subject to the grading rule that the level-n
polynomial has xi-degree at most n (so level 0 is xi-free).

The operator realization uses the convention D_j = -i d/dx_j.  A symbol P
together with an affine map phi acts on formal functions by

    (P, phi) . psi  =  sum_alpha  f_alpha(x) * ((D^alpha psi) o phi^-1)(x)

per hbar level; note that only the differentiated function is pulled back,
the coefficients f_alpha are not.  Composition of two such operators is
again one of them; star_compose computes the composite's symbol and the
tests certify it against direct nested application on monomials.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Tuple

from .affine import AffineDiffeo, affine_compose, affine_invert, poly_compose_affine
from .errors import (
    DimensionMismatch,
    GradingViolation,
    NotInvertible,
    TruncationMismatch,
)
from .polynomials import PolyFunction, grlex_key
from .scalars import GaussianRational, ONE, minus_i_power

MultiIndex = Tuple[int, ...]


def _iter_sub_indices(alpha: MultiIndex):
    """All gamma with 0 <= gamma <= alpha componentwise, lexicographically."""
    if not alpha:
        yield ()
        return
    head, rest = alpha[0], alpha[1:]
    for tail in _iter_sub_indices(rest):
        for k in range(head + 1):
            yield (k,) + tail


def _multi_factorial(alpha: MultiIndex) -> int:
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


def _falling(alpha: MultiIndex, gamma: MultiIndex) -> int:
    """alpha! / (alpha - gamma)! componentwise, zero if gamma exceeds alpha."""
    out = 1
    for a, g in zip(alpha, gamma):
        if g > a:
            return 0
        for k in range(a, a - g, -1):
            out *= k
    return out


class XiPolynomial:
    """Polynomial in xi with PolyFunction coefficients (joint (x, xi) data)."""

    __slots__ = ("dimension", "terms")

    def __init__(self, dimension: int, terms: Dict[MultiIndex, PolyFunction] = None):
        clean = {}
        for alpha, poly in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dimension or any(a < 0 for a in alpha):
                raise ValueError(f"bad xi exponent {alpha} for dimension {dimension}")
            if poly.dimension != dimension:
                raise DimensionMismatch("coefficient dimension differs from xi dimension")
            if poly:
                acc = clean.get(alpha)
                clean[alpha] = poly if acc is None else acc + poly
                if not clean[alpha]:
                    del clean[alpha]
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("XiPolynomial is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def _make(cls, dimension: int, terms: Dict[MultiIndex, PolyFunction]) -> "XiPolynomial":
        """Fast path for internal arithmetic; terms must be canonical and nonzero."""
        self = object.__new__(cls)
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "terms", terms)
        return self

    @classmethod
    def zero(cls, dimension: int) -> "XiPolynomial":
        return cls(dimension, {})

    @classmethod
    def from_poly(cls, poly: PolyFunction) -> "XiPolynomial":
        return cls(poly.dimension, {(0,) * poly.dimension: poly})

    @classmethod
    def constant(cls, dimension: int, value) -> "XiPolynomial":
        return cls.from_poly(PolyFunction.constant(dimension, value))

    @classmethod
    def xi_variable(cls, dimension: int, axis: int) -> "XiPolynomial":
        if not 1 <= axis <= dimension:
            raise ValueError(f"axis {axis} out of range 1..{dimension}")
        alpha = [0] * dimension
        alpha[axis - 1] = 1
        return cls(dimension, {tuple(alpha): PolyFunction.constant(dimension, 1)})

    @classmethod
    def monomial(cls, dimension: int, beta, alpha, coeff=1) -> "XiPolynomial":
        return cls(dimension, {tuple(alpha): PolyFunction.monomial(dimension, beta, GaussianRational(coeff))})

    # -- linear structure ---------------------------------------------------

    def __add__(self, other: "XiPolynomial") -> "XiPolynomial":
        if self.dimension != other.dimension:
            raise DimensionMismatch("xi polynomials over different dimensions")
        out = dict(self.terms)
        for alpha, poly in other.terms.items():
            acc = out.get(alpha)
            merged = poly if acc is None else acc + poly
            if merged:
                out[alpha] = merged
            elif acc is not None:
                del out[alpha]
        return XiPolynomial._make(self.dimension, out)

    def __neg__(self) -> "XiPolynomial":
        return XiPolynomial._make(self.dimension, {a: -p for a, p in self.terms.items()})

    def __sub__(self, other: "XiPolynomial") -> "XiPolynomial":
        return self + (-other)

    def scale(self, scalar) -> "XiPolynomial":
        if not isinstance(scalar, GaussianRational):
            scalar = GaussianRational(scalar)
        if not scalar:
            return XiPolynomial.zero(self.dimension)
        return XiPolynomial._make(self.dimension, {a: p.scale(scalar) for a, p in self.terms.items()})

    def __mul__(self, other: "XiPolynomial") -> "XiPolynomial":
        """Commutative product, treating x and xi as plain variables."""
        if self.dimension != other.dimension:
            raise DimensionMismatch("xi polynomials over different dimensions")
        out: Dict[MultiIndex, PolyFunction] = {}
        for a1, p1 in self.terms.items():
            for a2, p2 in other.terms.items():
                alpha = tuple(i + j for i, j in zip(a1, a2))
                prod = p1 * p2
                acc = out.get(alpha)
                out[alpha] = prod if acc is None else acc + prod
        return XiPolynomial._make(self.dimension, {a: p for a, p in out.items() if p})

    # -- calculus -----------------------------------------------------------

    def xi_partial(self, axis: int) -> "XiPolynomial":
        j = axis - 1
        out = {}
        for alpha, poly in self.terms.items():
            if alpha[j] == 0:
                continue
            lowered = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1 :]
            scaled = poly.scale(alpha[j])
            acc = out.get(lowered)
            out[lowered] = scaled if acc is None else acc + scaled
        return XiPolynomial._make(self.dimension, {a: p for a, p in out.items() if p})

    def x_partial(self, axis: int) -> "XiPolynomial":
        out = {}
        for alpha, poly in self.terms.items():
            dp = poly.partial(axis)
            if dp:
                out[alpha] = dp
        return XiPolynomial._make(self.dimension, out)

    def compose_x(self, phi: AffineDiffeo) -> "XiPolynomial":
        """Substitute x -> phi(x) in every coefficient; xi untouched."""
        if phi.is_identity():
            return self
        return XiPolynomial._make(
            self.dimension,
            {a: poly_compose_affine(p, phi) for a, p in self.terms.items()},
        )

    # -- queries ------------------------------------------------------------

    def xi_degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def x_degree(self) -> int:
        return max((p.total_degree() for p in self.terms.values()), default=0)

    def coefficient(self, alpha: MultiIndex) -> PolyFunction:
        return self.terms.get(tuple(alpha), PolyFunction.zero(self.dimension))

    def is_zero(self) -> bool:
        return not self.terms

    def is_xi_free(self) -> bool:
        return all(sum(a) == 0 for a in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    def __eq__(self, other):
        if not isinstance(other, XiPolynomial):
            return NotImplemented
        return self.dimension == other.dimension and self.terms == other.terms

    def __hash__(self):
        return hash((self.dimension, tuple(self.sorted_terms())))

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for alpha, poly in self.sorted_terms():
            body = "*".join(f"xi{i+1}^{e}" if e > 1 else f"xi{i+1}" for i, e in enumerate(alpha) if e)
            parts.append(f"[{poly}]" + ("*" + body if body else ""))
        return " + ".join(parts)

    __repr__ = __str__


@lru_cache(maxsize=None)
def _xi_substitution_powers(columns, alpha):
    """Expansion of prod_j (sum_k columns[j][k] xi_k)^alpha_j.

    columns[j] is the image of xi_j as a row of scalars; returns a tuple of
    (multi-index, scalar) pairs.  Cached: the same group elements conjugate
    many symbols.
    """
    d = len(columns)
    acc = {(0,) * d: ONE}
    for j, power in enumerate(alpha):
        for _ in range(power):
            nxt = {}
            for mono, coeff in acc.items():
                for k, entry in enumerate(columns[j]):
                    if not entry:
                        continue
                    raised = mono[:k] + (mono[k] + 1,) + mono[k + 1 :]
                    prev = nxt.get(raised)
                    val = coeff * entry
                    nxt[raised] = val if prev is None else prev + val
            acc = nxt
    return tuple((mono, coeff) for mono, coeff in acc.items() if coeff)


def substitute_xi_linear(p: XiPolynomial, columns) -> XiPolynomial:
    """Substitute xi_j -> sum_k columns[j][k] xi_k, exactly."""
    d = p.dimension
    out: Dict[MultiIndex, PolyFunction] = {}
    for alpha, poly in p.terms.items():
        for mono, coeff in _xi_substitution_powers(columns, alpha):
            scaled = poly.scale(coeff)
            acc = out.get(mono)
            out[mono] = scaled if acc is None else acc + scaled
    return XiPolynomial._make(d, {a: p2 for a, p2 in out.items() if p2})


# ---------------------------------------------------------------------------
# Single-level operator calculus
# ---------------------------------------------------------------------------


def diff_op_apply(p: XiPolynomial, f: PolyFunction) -> PolyFunction:
    """P(x, D) f with D_j = -i d/dx_j:  sum_alpha f_alpha * (-i)^|alpha| d^alpha f."""
    if p.dimension != f.dimension:
        raise DimensionMismatch("operator and function dimensions differ")
    out = PolyFunction.zero(f.dimension)
    for alpha, coeff_poly in p.terms.items():
        g = f
        for axis0, e in enumerate(alpha):
            for _ in range(e):
                g = g.partial(axis0 + 1)
            if g.is_zero():
                break
        if g.is_zero():
            continue
        out = out + (coeff_poly * g).scale(minus_i_power(sum(alpha)))
    return out


def apply_level_with_pullback(p: XiPolynomial, f: PolyFunction, phi: AffineDiffeo) -> PolyFunction:
    """sum_alpha f_alpha(x) * ((D^alpha f) o phi^-1)(x).

    The coefficients stay at x; only the differentiated function is composed
    with the inverse map.
    """
    if p.dimension != f.dimension or p.dimension != phi.dimension:
        raise DimensionMismatch("operator, function and map dimensions differ")
    inv = affine_invert(phi)
    out = PolyFunction.zero(f.dimension)
    for alpha, coeff_poly in p.terms.items():
        g = f
        for axis0, e in enumerate(alpha):
            for _ in range(e):
                g = g.partial(axis0 + 1)
            if g.is_zero():
                break
        if g.is_zero():
            continue
        pulled = poly_compose_affine(g, inv).scale(minus_i_power(sum(alpha)))
        out = out + coeff_poly * pulled
    return out


def conjugate_by_diffeo(p: XiPolynomial, phi: AffineDiffeo) -> XiPolynomial:
    """The symbol Q with P(x, D) o (pullback by phi^-1) = (pullback by phi^-1) o Q(x, D).

    For affine phi the chain rule has a constant Jacobian, so Q(y, xi) =
    P(phi(y), C^T xi) with C the inverse Jacobian; the xi-degree is preserved.
    """
    if p.dimension != phi.dimension:
        raise DimensionMismatch("symbol and map dimensions differ")
    if phi.is_identity():
        return p
    c = phi.inverse_matrix
    d = phi.dimension
    # xi_j picks up the j-th column of C as its image coefficients.
    columns = tuple(tuple(c[k][j] for k in range(d)) for j in range(d))
    return substitute_xi_linear(p.compose_x(phi), columns)


def diffop_symbol_compose(p: XiPolynomial, k: XiPolynomial) -> XiPolynomial:
    """Symbol of P(x, D) o K(x, D) in the D = -i d/dx convention.

    sum_gamma (1/gamma!) (d_xi^gamma P) * ((-i)^|gamma| d_x^gamma K), exact.
    """
    if p.dimension != k.dimension:
        raise DimensionMismatch("symbols over different dimensions")
    d = p.dimension
    max_alpha = [0] * d
    for alpha in p.terms:
        for j, a in enumerate(alpha):
            max_alpha[j] = max(max_alpha[j], a)
    out = XiPolynomial.zero(d)
    for gamma in _iter_sub_indices(tuple(max_alpha)):
        # d_xi^gamma P
        dp_terms: Dict[MultiIndex, PolyFunction] = {}
        for alpha, poly in p.terms.items():
            fall = _falling(alpha, gamma)
            if fall == 0:
                continue
            lowered = tuple(a - g for a, g in zip(alpha, gamma))
            scaled = poly.scale(fall)
            acc = dp_terms.get(lowered)
            dp_terms[lowered] = scaled if acc is None else acc + scaled
        dp_terms = {a: q for a, q in dp_terms.items() if q}
        if not dp_terms:
            continue
        dk = k
        for axis0, g in enumerate(gamma):
            for _ in range(g):
                dk = dk.x_partial(axis0 + 1)
            if dk.is_zero():
                break
        if dk.is_zero():
            continue
        weight = minus_i_power(sum(gamma)) * GaussianRational(Fraction(1, _multi_factorial(gamma)))
        out = out + (XiPolynomial._make(d, dp_terms) * dk).scale(weight)
    return out


def star_pair(p: XiPolynomial, phi1: AffineDiffeo, k: XiPolynomial, phi2: AffineDiffeo) -> XiPolynomial:
    """Composite symbol of the pair (p at phi1) o (k at phi2), single level.

    Moves both pullbacks to the right through exact affine conjugation, takes
    the standard composition of the transported symbols, and transports the
    result back to sit at phi1 o phi2.
    """
    left = conjugate_by_diffeo(p.compose_x(phi1), phi2)
    right = k.compose_x(phi2)
    both = affine_compose(phi1, phi2)
    return diffop_symbol_compose(left, right).compose_x(affine_invert(both))


# ---------------------------------------------------------------------------
# Truncated stacks
# ---------------------------------------------------------------------------


class FormalSymbol:
    """Levels P^0..P^N with the grading xi-degree(P^n) <= n."""

    __slots__ = ("dimension", "order", "levels")

    def __init__(self, dimension: int, order: int, levels):
        levels = tuple(levels)
        if order < 0 or len(levels) != order + 1:
            raise ValueError("levels must run 0..order inclusive")
        for n, lvl in enumerate(levels):
            if lvl.dimension != dimension:
                raise DimensionMismatch("level dimension differs from symbol dimension")
            if lvl.xi_degree() > n and not lvl.is_zero():
                raise GradingViolation(
                    f"level {n} has xi-degree {lvl.xi_degree()} > {n}"
                )
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "levels", levels)

    def __setattr__(self, name, value):
        raise AttributeError("FormalSymbol is immutable")

    @classmethod
    def zero(cls, dimension: int, order: int) -> "FormalSymbol":
        return cls(dimension, order, [XiPolynomial.zero(dimension)] * (order + 1))

    @classmethod
    def one(cls, dimension: int, order: int) -> "FormalSymbol":
        levels = [XiPolynomial.constant(dimension, 1)] + [
            XiPolynomial.zero(dimension)
        ] * order
        return cls(dimension, order, levels)

    @classmethod
    def constant(cls, dimension: int, order: int, value) -> "FormalSymbol":
        levels = [XiPolynomial.constant(dimension, value)] + [
            XiPolynomial.zero(dimension)
        ] * order
        return cls(dimension, order, levels)

    @classmethod
    def from_level(cls, level: XiPolynomial, n: int, order: int) -> "FormalSymbol":
        """hbar^n * level, zero elsewhere."""
        levels = [XiPolynomial.zero(level.dimension) for _ in range(order + 1)]
        levels[n] = level
        return cls(level.dimension, order, levels)

    def level(self, n: int) -> XiPolynomial:
        return self.levels[n]

    def _check(self, other: "FormalSymbol"):
        if self.dimension != other.dimension:
            raise DimensionMismatch("symbols over different dimensions")
        if self.order != other.order:
            raise TruncationMismatch(
                f"truncation orders differ: {self.order} vs {other.order}"
            )

    def __add__(self, other: "FormalSymbol") -> "FormalSymbol":
        self._check(other)
        return FormalSymbol(
            self.dimension, self.order,
            [a + b for a, b in zip(self.levels, other.levels)],
        )

    def __neg__(self) -> "FormalSymbol":
        return FormalSymbol(self.dimension, self.order, [-lvl for lvl in self.levels])

    def __sub__(self, other: "FormalSymbol") -> "FormalSymbol":
        return self + (-other)

    def scale(self, scalar) -> "FormalSymbol":
        return FormalSymbol(self.dimension, self.order, [lvl.scale(scalar) for lvl in self.levels])

    def is_zero(self) -> bool:
        return all(lvl.is_zero() for lvl in self.levels)

    def x_degree(self) -> int:
        return max((lvl.x_degree() for lvl in self.levels), default=0)

    def __eq__(self, other):
        if not isinstance(other, FormalSymbol):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.order == other.order
            and self.levels == other.levels
        )

    def __hash__(self):
        return hash((self.dimension, self.order, self.levels))

    def __str__(self):
        return " + ".join(f"h^{n}*({lvl})" for n, lvl in enumerate(self.levels) if lvl) or "0"

    __repr__ = __str__


class FormalFunction:
    """A truncated series of plain polynomials, psi^0 + h psi^1 + ..."""

    __slots__ = ("dimension", "order", "levels")

    def __init__(self, dimension: int, order: int, levels):
        levels = tuple(levels)
        if order < 0 or len(levels) != order + 1:
            raise ValueError("levels must run 0..order inclusive")
        for lvl in levels:
            if lvl.dimension != dimension:
                raise DimensionMismatch("level dimension differs")
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "levels", levels)

    def __setattr__(self, name, value):
        raise AttributeError("FormalFunction is immutable")

    @classmethod
    def from_poly(cls, poly: PolyFunction, order: int) -> "FormalFunction":
        return cls(
            poly.dimension, order,
            [poly] + [PolyFunction.zero(poly.dimension)] * order,
        )

    def level(self, n: int) -> PolyFunction:
        return self.levels[n]

    def __eq__(self, other):
        if not isinstance(other, FormalFunction):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.order == other.order
            and self.levels == other.levels
        )

    def __hash__(self):
        return hash((self.dimension, self.order, self.levels))

    def __str__(self):
        return " + ".join(f"h^{n}*({lvl})" for n, lvl in enumerate(self.levels) if lvl) or "0"

    __repr__ = __str__


class Amplitude:
    """Unrestricted (x, xi) levels a^0..a^M; the grading is not imposed."""

    __slots__ = ("dimension", "order", "levels")

    def __init__(self, dimension: int, order: int, levels):
        levels = tuple(levels)
        if order < 0 or len(levels) != order + 1:
            raise ValueError("levels must run 0..order inclusive")
        for lvl in levels:
            if lvl.dimension != dimension:
                raise DimensionMismatch("level dimension differs")
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "levels", levels)

    def __setattr__(self, name, value):
        raise AttributeError("Amplitude is immutable")

    def level(self, n: int) -> XiPolynomial:
        if 0 <= n <= self.order:
            return self.levels[n]
        return XiPolynomial.zero(self.dimension)

    def __eq__(self, other):
        if not isinstance(other, Amplitude):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.order == other.order
            and self.levels == other.levels
        )


# ---------------------------------------------------------------------------
# Stack-level operations
# ---------------------------------------------------------------------------


def op_apply(p: FormalSymbol, phi: AffineDiffeo, psi: FormalFunction) -> FormalFunction:
    """Apply the formal operator (p, phi) to psi, truncated at min(orders)."""
    if p.dimension != psi.dimension or p.dimension != phi.dimension:
        raise DimensionMismatch("operator and argument dimensions differ")
    order = min(p.order, psi.order)
    out = []
    for m in range(order + 1):
        acc = PolyFunction.zero(p.dimension)
        for n in range(m + 1):
            acc = acc + apply_level_with_pullback(p.level(n), psi.level(m - n), phi)
        out.append(acc)
    return FormalFunction(p.dimension, order, out)


def star_compose(
    p: FormalSymbol, phi1: AffineDiffeo, k: FormalSymbol, phi2: AffineDiffeo
) -> FormalSymbol:
    """The symbol of (p at phi1) composed with (k at phi2), at phi1 o phi2.

    Level by level this is the bilinear extension of star_pair; the output
    keeps the grading because conjugation preserves xi-degree and symbol
    composition adds it.
    """
    p._check(k)
    if p.dimension != phi1.dimension or p.dimension != phi2.dimension:
        raise DimensionMismatch("symbols and maps over different dimensions")
    both = affine_compose(phi1, phi2)
    inv_both = affine_invert(both)
    d = p.dimension
    out = []
    for m in range(p.order + 1):
        acc = XiPolynomial.zero(d)
        for n in range(m + 1):
            left_lvl = p.level(n)
            right_lvl = k.level(m - n)
            if left_lvl.is_zero() or right_lvl.is_zero():
                continue
            left = conjugate_by_diffeo(left_lvl.compose_x(phi1), phi2)
            right = right_lvl.compose_x(phi2)
            acc = acc + diffop_symbol_compose(left, right)
        out.append(acc.compose_x(inv_both))
    return FormalSymbol(d, p.order, out)


def invert_unit(u: FormalSymbol) -> FormalSymbol:
    """Two-sided star inverse of u (at the identity map), order by order.

    Requires the leading level to be a nonzero constant, the only units in
    the polynomial model.  The result is verified by multiplying back on
    both sides.
    """
    # level 0 is xi-free by the grading, so its only coefficient sits at alpha = 0
    lead_poly = u.level(0).coefficient((0,) * u.dimension)
    if not lead_poly.is_constant() or lead_poly.is_zero():
        raise NotInvertible("leading level is not a nonzero constant")
    c = lead_poly.constant_value()
    inv_c = ONE / c
    d = u.dimension
    inv_levels = [XiPolynomial.constant(d, 1).scale(inv_c)]
    for m in range(1, u.order + 1):
        acc = XiPolynomial.zero(d)
        for n in range(1, m + 1):
            if u.level(n).is_zero():
                continue
            acc = acc + diffop_symbol_compose(u.level(n), inv_levels[m - n])
        inv_levels.append(acc.scale(-inv_c))
    inv = FormalSymbol(d, u.order, inv_levels)
    ident = AffineDiffeo.identity(d)
    one = FormalSymbol.one(d, u.order)
    if star_compose(u, ident, inv, ident) != one or star_compose(inv, ident, u, ident) != one:
        raise NotInvertible("inverse verification failed")  # pragma: no cover
    return inv


def asymptotic_symbol(a: Amplitude, order: int) -> FormalSymbol:
    """Graded symbol of an amplitude: each xi^alpha in a^m lands at level m + |alpha|.

    This is the Taylor expansion at xi = 0 with the componentwise 1/alpha!
    weights, which for polynomial data is plain coefficient extraction.
    Levels of `a` above its stored order are taken to be zero.
    """
    d = a.dimension
    out = []
    for n in range(order + 1):
        terms: Dict[MultiIndex, PolyFunction] = {}
        for j in range(n + 1):
            source = a.level(n - j)
            for alpha, poly in source.terms.items():
                if sum(alpha) == j:
                    acc = terms.get(alpha)
                    terms[alpha] = poly if acc is None else acc + poly
        out.append(XiPolynomial(d, terms))
    return FormalSymbol(d, order, out)


def amplitude_of_symbol(p: FormalSymbol) -> Amplitude:
    """Inverse reindexing of asymptotic_symbol on graded data.

    Each xi^alpha term of level n is filed at amplitude level n - |alpha|,
    where it carries the same hbar weight once every xi absorbs one power.
    """
    d = p.dimension
    levels = [dict() for _ in range(p.order + 1)]
    for n in range(p.order + 1):
        for alpha, poly in p.level(n).terms.items():
            m = n - sum(alpha)
            acc = levels[m].get(alpha)
            levels[m][alpha] = poly if acc is None else acc + poly
    return Amplitude(d, p.order, [XiPolynomial(d, t) for t in levels])
