"""JSON codecs for every value type that crosses a file boundary.

Scalars travel as "p/q" strings so no float can enter the pipeline; term
lists are emitted in graded-lex order so equal objects always serialize to
identical bytes.  Loaders re-run the domain validators: affine inverses are
recomputed rather than read, group tables are re-checked axiom by axiom,
symbol gradings are enforced, and cochain tables must be normalized at the
identity tuple.
"""

from __future__ import annotations

from typing import Dict

from .affine import AffineDiffeo
from .cochains import Cochain
from .errors import GradingViolation, ValidationError
from .groups import AffineAction, FiniteGroup
from .polynomials import PolyFunction
from .scalars import GaussianRational
from .symbols import FormalSymbol, XiPolynomial


def _expect(obj, typ, what, location=None):
    if not isinstance(obj, typ):
        raise ValidationError(f"{what} must be {typ.__name__}, got {type(obj).__name__}", location)
    return obj


# -- polynomials -------------------------------------------------------------


def poly_to_json(p: PolyFunction) -> list:
    return [
        {"beta": list(beta), **coeff.to_json()}
        for beta, coeff in p.sorted_terms()
    ]


def poly_from_json(obj, dimension: int, location=None) -> PolyFunction:
    _expect(obj, list, "polynomial", location)
    terms = {}
    for i, item in enumerate(obj):
        _expect(item, dict, f"polynomial term {i}", location)
        beta = tuple(_expect(item.get("beta"), list, f"term {i} beta", location))
        try:
            coeff = GaussianRational.from_json({"re": item.get("re", "0"), "im": item.get("im", "0")})
        except ValueError as exc:
            raise ValidationError(str(exc), location) from None
        terms[beta] = terms.get(beta, GaussianRational(0)) + coeff
    try:
        return PolyFunction(dimension, terms)
    except ValueError as exc:
        raise ValidationError(str(exc), location) from None


# -- affine maps --------------------------------------------------------------


def affine_to_json(phi: AffineDiffeo) -> dict:
    return {
        "A": [[entry.to_json() for entry in row] for row in phi.matrix],
        "b": [entry.to_json() for entry in phi.offset],
    }


def affine_from_json(obj, dimension: int, location=None) -> AffineDiffeo:
    _expect(obj, dict, "affine map", location)
    a = _expect(obj.get("A"), list, "matrix A", location)
    b = _expect(obj.get("b"), list, "offset b", location)
    if len(b) != dimension or len(a) != dimension:
        raise ValidationError(f"affine map is not {dimension}-dimensional", location)
    try:
        matrix = [[GaussianRational.from_json(e) for e in row] for row in a]
        offset = [GaussianRational.from_json(e) for e in b]
        return AffineDiffeo(matrix, offset)  # recomputes and verifies the inverse
    except ValueError as exc:
        raise ValidationError(str(exc), location) from None


# -- symbols ------------------------------------------------------------------


def xi_polynomial_to_json(p: XiPolynomial) -> list:
    return [
        {"alpha": list(alpha), "poly": poly_to_json(poly)}
        for alpha, poly in p.sorted_terms()
    ]


def xi_polynomial_from_json(obj, dimension: int, location=None) -> XiPolynomial:
    _expect(obj, list, "xi polynomial", location)
    terms = {}
    for i, item in enumerate(obj):
        _expect(item, dict, f"xi term {i}", location)
        alpha = tuple(_expect(item.get("alpha"), list, f"xi term {i} alpha", location))
        poly = poly_from_json(item.get("poly"), dimension, location)
        if alpha in terms:
            terms[alpha] = terms[alpha] + poly
        else:
            terms[alpha] = poly
    try:
        return XiPolynomial(dimension, terms)
    except ValueError as exc:
        raise ValidationError(str(exc), location) from None


def symbol_to_json(sym: FormalSymbol) -> dict:
    return {
        "order": sym.order,
        "levels": [
            {"n": n, "terms": xi_polynomial_to_json(lvl)}
            for n, lvl in enumerate(sym.levels)
            if not lvl.is_zero()
        ],
    }


def symbol_from_json(obj, dimension: int, order=None, location=None) -> FormalSymbol:
    _expect(obj, dict, "formal symbol", location)
    stored = obj.get("order")
    if order is None:
        order = stored
    if not isinstance(order, int) or order < 0:
        raise ValidationError("symbol order missing or invalid", location)
    if stored is not None and stored != order:
        raise ValidationError(f"symbol order {stored} does not match expected {order}", location)
    levels = [XiPolynomial.zero(dimension) for _ in range(order + 1)]
    for item in _expect(obj.get("levels", []), list, "levels", location):
        _expect(item, dict, "level", location)
        n = item.get("n")
        if not isinstance(n, int) or not 0 <= n <= order:
            raise ValidationError(f"level index {n!r} outside 0..{order}", location)
        levels[n] = levels[n] + xi_polynomial_from_json(item.get("terms", []), dimension, location)
    try:
        return FormalSymbol(dimension, order, levels)
    except GradingViolation as exc:
        raise ValidationError(f"grading violated: {exc}", location) from None


# -- groups and actions --------------------------------------------------------


def group_to_json(group: FiniteGroup) -> dict:
    return {
        "elements": list(group.elements),
        "table": {f"{g},{h}": group.table[(g, h)] for g in group.elements for h in group.elements},
    }


def group_from_json(obj, location=None) -> FiniteGroup:
    _expect(obj, dict, "group", location)
    elements = _expect(obj.get("elements"), list, "group elements", location)
    for g in elements:
        if not isinstance(g, str) or not g or "," in g:
            raise ValidationError(f"bad element label {g!r} (labels are nonempty, comma-free strings)", location)
    table_obj = _expect(obj.get("table"), dict, "group table", location)
    table = {}
    for key, value in table_obj.items():
        parts = key.split(",")
        if len(parts) != 2:
            raise ValidationError(f"bad table key {key!r}", location)
        table[(parts[0], parts[1])] = value
    try:
        return FiniteGroup(elements, table)  # re-runs the axiom checks
    except ValueError as exc:
        raise ValidationError(str(exc), location) from None


def action_to_json(action: AffineAction) -> dict:
    return {g: affine_to_json(action.maps[g]) for g in action.group.elements}


def action_from_json(obj, group: FiniteGroup, dimension: int, location=None) -> AffineAction:
    _expect(obj, dict, "action", location)
    maps = {}
    for g in group.elements:
        if g not in obj:
            raise ValidationError(f"action is missing the map for element {g!r}", location)
        maps[g] = affine_from_json(obj[g], dimension, location)
    try:
        return AffineAction(group, maps)
    except ValueError as exc:
        raise ValidationError(str(exc), location) from None


# -- cochains -------------------------------------------------------------------


def _tuple_key(t) -> str:
    return ",".join(t)


def _parse_tuple_key(key: str, degree: int, location=None):
    parts = tuple(p for p in key.split(",") if p) if key else ()
    if len(parts) != degree:
        raise ValidationError(f"key {key!r} does not name a {degree}-tuple", location)
    return parts


def cochain_to_json(c: Cochain) -> dict:
    return {
        "degree": c.degree,
        "values": {_tuple_key(t): symbol_to_json(v) for t, v in sorted(c.values.items())},
    }


def cochain_from_json(obj, action: AffineAction, order: int, location=None) -> Cochain:
    _expect(obj, dict, "cochain", location)
    degree = obj.get("degree")
    if not isinstance(degree, int) or degree < 0:
        raise ValidationError("cochain degree missing or invalid", location)
    values_obj = _expect(obj.get("values"), dict, "cochain values", location)
    values = {}
    for key, sym_obj in values_obj.items():
        t = _parse_tuple_key(key, degree, location)
        for g in t:
            if g not in action.group.elements:
                raise ValidationError(f"unknown group element {g!r} in key {key!r}", location)
        values[t] = symbol_from_json(sym_obj, action.dimension, order, location)
    try:
        cochain = Cochain(action, degree, order, values)
    except ValueError as exc:
        raise ValidationError(str(exc), location) from None
    if degree >= 1 and not cochain.is_normalized():
        raise ValidationError(
            "cochain is not normalized: value at the identity tuple must be 1", location
        )
    return cochain


# -- solver slice tables ---------------------------------------------------------


def slice_to_json(table: Dict, degree: int) -> dict:
    return {
        "degree": degree,
        "values": {_tuple_key(t): xi_polynomial_to_json(v) for t, v in sorted(table.items())},
    }


def slice_from_json(obj, action: AffineAction, location=None):
    _expect(obj, dict, "slice table", location)
    degree = obj.get("degree")
    if not isinstance(degree, int) or degree < 0:
        raise ValidationError("slice degree missing or invalid", location)
    values_obj = _expect(obj.get("values"), dict, "slice values", location)
    table = {}
    for key, val in values_obj.items():
        t = _parse_tuple_key(key, degree, location)
        for g in t:
            if g not in action.group.elements:
                raise ValidationError(f"unknown group element {g!r} in key {key!r}", location)
        table[t] = xi_polynomial_from_json(val, action.dimension, location)
    return degree, table
