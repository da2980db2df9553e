"""Exact linear algebra over Q and GF(p) on lists of lists."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Matrix = list[list[Fraction]]


def to_fractions(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def transpose(rows: Sequence[Sequence], ncols: Optional[int] = None) -> list[list]:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def rref(rows: Sequence[Sequence], ncols: Optional[int] = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = to_fractions(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], ncols: Optional[int] = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of {x : A x = 0} as a list of vectors."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int) -> Optional[list[Fraction]]:
    """One solution of A x = b (free variables set to zero), or None."""
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    if not aug:
        return [Fraction(0)] * ncols
    reduced, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[ncols]
    return x


def in_span(vectors: Sequence[Sequence], target: Sequence) -> bool:
    if not any(x != 0 for x in target):
        return True
    if not vectors:
        return False
    return rank(list(vectors) + [list(target)]) == rank(vectors)


def rank_mod_p(rows: Sequence[Sequence[int]], p: int = 2) -> int:
    m = [[int(x) % p for x in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def rank_over(rows: Sequence[Sequence], field: str = "Q") -> int:
    """Rank over ``"Q"`` or ``"F2"`` (integer entries required for F2)."""
    if field == "Q":
        return rank(rows)
    if field == "F2":
        for row in rows:
            for x in row:
                if Fraction(x).denominator != 1:
                    raise ValueError("F2 rank needs integer entries")
        return rank_mod_p([[int(Fraction(x)) for x in row] for row in rows], 2)
    raise ValueError(f"unknown coefficient field {field!r}")


def determinant(rows: Sequence[Sequence]) -> Fraction:
    m = to_fractions(rows)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def inverse(rows: Sequence[Sequence]) -> Matrix:
    n = len(rows)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    reduced, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(reduced) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in reduced]
