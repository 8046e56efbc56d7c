"""Exact linear algebra over the Gaussian rationals.

Elimination is genuinely fraction-free: every row is first scaled by the
lcm of its denominators, after which the Bareiss single-step scheme runs on
Gaussian-integer pairs with exact divisions only (the quotients are minors,
so divisibility is guaranteed over Z[i]).  Pivots are chosen by position
(leftmost column, first usable row), never by magnitude, so ranks and
solutions are reproducible across runs and platforms.  Row scaling leaves
row space, rank, kernels and solution sets untouched.
"""

from __future__ import annotations

from math import lcm
from typing import List, Optional, Sequence, Tuple

from .scalars import GaussianRational, ONE, ZERO

Matrix = List[List[GaussianRational]]
_GInt = Tuple[int, int]

_GI_ZERO: _GInt = (0, 0)
_GI_ONE: _GInt = (1, 0)


def mat_vec(rows: Sequence[Sequence[GaussianRational]], vec: Sequence[GaussianRational]):
    return [sum((r[j] * vec[j] for j in range(len(vec)) if vec[j]), ZERO) for r in rows]


def mat_mul(a: Sequence[Sequence[GaussianRational]], b: Sequence[Sequence[GaussianRational]]):
    cols = len(b[0]) if b else 0
    return [
        [sum((ra[k] * b[k][j] for k in range(len(b)) if ra[k]), ZERO) for j in range(cols)]
        for ra in a
    ]


# -- Gaussian-integer kernel of the elimination -------------------------------


def _gi_mul(a: _GInt, b: _GInt) -> _GInt:
    ar, ai = a
    br, bi = b
    return (ar * br - ai * bi, ar * bi + ai * br)


def _gi_div_exact(a: _GInt, b: _GInt) -> _GInt:
    """a / b in Z[i]; callers guarantee exactness (Bareiss quotients are minors)."""
    ar, ai = a
    br, bi = b
    norm = br * br + bi * bi
    return ((ar * br + ai * bi) // norm, (ai * br - ar * bi) // norm)


def _clear_row(row: Sequence[GaussianRational]) -> List[_GInt]:
    denom = 1
    for v in row:
        denom = lcm(denom, v.re.denominator, v.im.denominator)
    return [(int(v.re * denom), int(v.im * denom)) for v in row]


def _from_gi(v: _GInt) -> GaussianRational:
    return GaussianRational(v[0], v[1])


def _bareiss(int_rows: List[List[_GInt]]) -> Tuple[List[List[_GInt]], List[int]]:
    """Forward elimination; returns (echelon rows, pivot column list)."""
    m = int_rows
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots: List[int] = []
    prev: _GInt = _GI_ONE
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot_row = next((i for i in range(r, nrows) if m[i][c] != _GI_ZERO), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[r], m[pivot_row] = m[pivot_row], m[r]
        pivot = m[r][c]
        base = m[r]
        pr, pi = pivot
        qr, qi = prev
        norm = qr * qr + qi * qi
        for i in range(r + 1, nrows):
            row = m[i]
            mic = row[c]
            if mic == _GI_ZERO:
                if pivot != prev:
                    m[i] = [
                        _gi_div_exact(_gi_mul(pivot, v), prev) if v != _GI_ZERO else _GI_ZERO
                        for v in row
                    ]
                continue
            cr, ci = mic
            new_row = []
            for j in range(ncols):
                ar, ai = row[j]
                br, bi = base[j]
                if (ar or ai) or (br or bi):
                    tr = (pr * ar - pi * ai) - (cr * br - ci * bi)
                    ti = (pr * ai + pi * ar) - (cr * bi + ci * br)
                    new_row.append(((tr * qr + ti * qi) // norm, (ti * qr - tr * qi) // norm))
                else:
                    new_row.append(_GI_ZERO)
            m[i] = new_row
        prev = pivot
        pivots.append(c)
        r += 1
    return m, pivots


def _echelon_int(rows: Sequence[Sequence[GaussianRational]]):
    return _bareiss([_clear_row(r) for r in rows])


def fraction_free_echelon(rows: Sequence[Sequence[GaussianRational]]) -> Tuple[Matrix, List[int]]:
    """Row echelon form by denominator clearing plus integer Bareiss steps."""
    m, pivots = _echelon_int(rows)
    return [[_from_gi(v) for v in row] for row in m], pivots


def rank(rows: Sequence[Sequence[GaussianRational]]) -> int:
    return len(_echelon_int(rows)[1])


def _back_substitute(m: List[List[_GInt]], pivots: List[int], target: List[GaussianRational], ncols: int) -> List[GaussianRational]:
    """Solve the echelon system for the pivot variables, given the non-pivot
    coordinates already filled into `target` (everything else zero)."""
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        acc = _from_gi(m[r][ncols]) if len(m[r]) > ncols else ZERO
        for j in range(c + 1, ncols):
            entry = m[r][j]
            if entry != _GI_ZERO and target[j]:
                acc = acc - _from_gi(entry) * target[j]
        target[c] = acc / _from_gi(m[r][c])
    return target


def solve(rows: Sequence[Sequence[GaussianRational]], rhs: Sequence[GaussianRational]) -> Optional[List[GaussianRational]]:
    """One exact solution of A x = rhs with every free coordinate set to zero,
    or None when the system is inconsistent."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    if len(rhs) != nrows:
        raise ValueError("right-hand side length does not match matrix")
    augmented = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    m, pivots = _echelon_int(augmented)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    return _back_substitute(m, pivots, x, ncols)


def kernel_basis(rows: Sequence[Sequence[GaussianRational]], ncols: Optional[int] = None) -> List[List[GaussianRational]]:
    """Basis of the null space, one vector per free column, in column order."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[ONE if i == j else ZERO for j in range(ncols)] for i in range(ncols)]
    m, pivots = _echelon_int(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [ZERO] * ncols
        v[free] = ONE
        # pivot rows have zero right-hand side here; solve the homogeneous system
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            acc = ZERO
            for j in range(c + 1, ncols):
                entry = m[r][j]
                if entry != _GI_ZERO and v[j]:
                    acc = acc - _from_gi(entry) * v[j]
            v[c] = acc / _from_gi(m[r][c])
        basis.append(v)
    return basis


def row_reduce(rows: Sequence[Sequence[GaussianRational]]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form over the field (used for small matrices)."""
    echelon, pivots = fraction_free_echelon(rows)
    ncols = len(echelon[0]) if echelon else 0
    m = [list(r) for r in echelon]
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        inv = ONE / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(r):
            factor = m[i][c]
            if factor:
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
    return [m[r] for r in range(len(pivots))] + [
        [ZERO] * ncols for _ in range(len(m) - len(pivots))
    ], pivots
