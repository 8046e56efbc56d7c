"""Finite groups acting on R^d by exact affine maps.

Groups are given by explicit multiplication tables over string labels; the
constructor brute-forces every axiom and names a witness on failure.  An
action assigns an AffineDiffeo to each element and is validated to be a
left action: phi_e = id and phi_{g h} = phi_g o phi_h for every pair.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Sequence, Tuple

from .affine import AffineDiffeo, affine_compose
from .errors import ContextMismatch, GroupAxiomError


class FiniteGroup:
    """Validated finite group over ordered string labels."""

    __slots__ = ("elements", "table", "identity", "inverses", "_index")

    def __init__(self, elements: Sequence[str], table: Dict[Tuple[str, str], str]):
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            raise GroupAxiomError("closure", elements, "duplicate element labels")
        index = {g: i for i, g in enumerate(elements)}
        for g in elements:
            for h in elements:
                prod = table.get((g, h))
                if prod is None:
                    raise GroupAxiomError(
                        "closure", (g, h), f"table is missing entry ({g},{h})"
                    )
                if prod not in index:
                    raise GroupAxiomError(
                        "closure", (g, h), f"product {prod!r} of ({g},{h}) is not an element"
                    )
        identity = None
        for e in elements:
            if all(table[(e, g)] == g and table[(g, e)] == g for g in elements):
                identity = e
                break
        if identity is None:
            raise GroupAxiomError("identity", (), "no two-sided identity element")
        inverses = {}
        for g in elements:
            inv = next(
                (h for h in elements if table[(g, h)] == identity and table[(h, g)] == identity),
                None,
            )
            if inv is None:
                raise GroupAxiomError("inverse", (g,), f"element {g!r} has no inverse")
            inverses[g] = inv
        for a in elements:
            for b in elements:
                for c in elements:
                    if table[(table[(a, b)], c)] != table[(a, table[(b, c)])]:
                        raise GroupAxiomError(
                            "associativity",
                            (a, b, c),
                            f"({a}*{b})*{c} != {a}*({b}*{c})",
                        )
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "table", dict(table))
        object.__setattr__(self, "identity", identity)
        object.__setattr__(self, "inverses", inverses)
        object.__setattr__(self, "_index", index)

    def __setattr__(self, name, value):
        raise AttributeError("FiniteGroup is immutable")

    def multiply(self, g: str, h: str) -> str:
        return self.table[(g, h)]

    def product(self, labels: Sequence[str]) -> str:
        """Product of a word of elements; the empty word is the identity."""
        out = self.identity
        for g in labels:
            out = self.table[(out, g)]
        return out

    def inverse(self, g: str) -> str:
        return self.inverses[g]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.elements == other.elements and self.table == other.table

    def __hash__(self):
        return hash((self.elements, tuple(sorted(self.table.items()))))

    def __str__(self):
        return f"FiniteGroup({', '.join(self.elements)})"

    __repr__ = __str__


def build_group(elements: Sequence[str], table: Dict[Tuple[str, str], str]) -> FiniteGroup:
    """Validate a multiplication table into a group; raises GroupAxiomError."""
    return FiniteGroup(elements, table)


def enumerate_tuples(group: FiniteGroup, k: int) -> List[Tuple[str, ...]]:
    """All of G^k in lexicographic order of the element list; G^0 = [()]."""
    if k < 0:
        raise ValueError("tuple length must be nonnegative")
    return list(itertools.product(group.elements, repeat=k))


class ActionReport:
    """Outcome of validating an affine action; failures carry witnesses."""

    def __init__(self, passed: bool, failures):
        self.passed = passed
        self.failures = list(failures)

    def __bool__(self):
        return self.passed

    def __str__(self):
        if self.passed:
            return "action valid"
        lines = [f"action invalid ({len(self.failures)} failures):"]
        lines += [f"  {kind} at {witness}" for kind, witness in self.failures]
        return "\n".join(lines)


class AffineAction:
    """Map from group elements to affine diffeos; validate before use."""

    __slots__ = ("group", "maps", "dimension")

    def __init__(self, group: FiniteGroup, maps: Dict[str, AffineDiffeo]):
        missing = [g for g in group.elements if g not in maps]
        if missing:
            raise ContextMismatch(f"action missing maps for elements {missing}")
        dims = {maps[g].dimension for g in group.elements}
        if len(dims) != 1:
            raise ContextMismatch(f"action maps live in mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "maps", {g: maps[g] for g in group.elements})
        object.__setattr__(self, "dimension", dims.pop())

    def __setattr__(self, name, value):
        raise AttributeError("AffineAction is immutable")

    def map_of(self, g: str) -> AffineDiffeo:
        return self.maps[g]

    def map_of_word(self, labels: Sequence[str]) -> AffineDiffeo:
        """phi of the product of a word; empty word gives the identity map."""
        return self.maps[self.group.product(labels)]

    def is_trivial(self) -> bool:
        return all(self.maps[g].is_identity() for g in self.group.elements)

    def __eq__(self, other):
        if not isinstance(other, AffineAction):
            return NotImplemented
        return self.group == other.group and self.maps == other.maps

    def __hash__(self):
        return hash((self.group, tuple(sorted((g, m) for g, m in self.maps.items()))))


def action_validate(action: AffineAction) -> ActionReport:
    """Check phi_e = id and phi_{g h} = phi_g o phi_h exactly, all pairs."""
    failures = []
    group = action.group
    if not action.maps[group.identity].is_identity():
        failures.append(("identity_not_id", (group.identity,)))
    for g in group.elements:
        for h in group.elements:
            composed = affine_compose(action.maps[g], action.maps[h])
            if composed != action.maps[group.multiply(g, h)]:
                failures.append(("not_homomorphism", (g, h)))
    return ActionReport(not failures, failures)


# ---------------------------------------------------------------------------
# Stock groups and actions used by scenarios and tests
# ---------------------------------------------------------------------------


def cyclic_group(n: int) -> FiniteGroup:
    """Z/n with labels g0..g{n-1}; g0 is the identity."""
    labels = [f"g{i}" for i in range(n)]
    table = {
        (labels[i], labels[j]): labels[(i + j) % n] for i in range(n) for j in range(n)
    }
    return FiniteGroup(labels, table)


def z2_group() -> FiniteGroup:
    return FiniteGroup(
        ["e", "s"],
        {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"},
    )


def symmetric3_group() -> FiniteGroup:
    """S3 as permutations of {1,2,3}; labels are one-line notations."""
    perms = list(itertools.permutations((1, 2, 3)))
    label = {p: "".join(map(str, p)) for p in perms}
    table = {}
    for p in perms:
        for q in perms:
            composed = tuple(p[q[i] - 1] for i in range(3))  # (p o q)(i) = p(q(i))
            table[(label[p], label[q])] = label[composed]
    return FiniteGroup([label[p] for p in perms], table)


def sign_action_z2() -> AffineAction:
    """Z/2 on R^1 with the nontrivial element acting by x -> -x."""
    group = z2_group()
    return AffineAction(
        group,
        {"e": AffineDiffeo.identity(1), "s": AffineDiffeo([[-1]], [0])},
    )


def rotation_action_z3() -> AffineAction:
    """Z/3 on R^2 through the order-3 integer matrix [[0,-1],[1,-1]]."""
    group = cyclic_group(3)
    a = AffineDiffeo([[0, -1], [1, -1]], [0, 0])
    a2 = affine_compose(a, a)
    return AffineAction(group, {"g0": AffineDiffeo.identity(2), "g1": a, "g2": a2})


def permutation_action_s3() -> AffineAction:
    """S3 on R^3 permuting coordinates: phi_p sends e_j to e_{p(j)}."""
    group = symmetric3_group()
    maps = {}
    for lbl in group.elements:
        p = tuple(int(ch) for ch in lbl)
        matrix = [[1 if p[j] == i + 1 else 0 for j in range(3)] for i in range(3)]
        maps[lbl] = AffineDiffeo(matrix, [0, 0, 0])
    return AffineAction(group, maps)


def trivial_action(group: FiniteGroup, dimension: int) -> AffineAction:
    ident = AffineDiffeo.identity(dimension)
    return AffineAction(group, {g: ident for g in group.elements})
