"""Integer lattices: Hermite and Smith normal forms, kernels, basis completion."""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

from .linalg import inverse, nullspace

IntMatrix = list[list[int]]


def _as_int(x) -> int:
    x = Fraction(x)
    if x.denominator != 1:
        raise ValueError(f"{x} is not an integer")
    return x.numerator


def int_matrix(rows: Sequence[Sequence]) -> IntMatrix:
    return [[_as_int(x) for x in row] for row in rows]


def content(vector: Sequence[int]) -> int:
    return reduce(gcd, (abs(int(x)) for x in vector), 0)


def primitive(vector: Sequence) -> tuple[int, ...]:
    """Primitive integer vector on the ray through a rational vector."""
    fr = [Fraction(x) for x in vector]
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = content(ints)
    if g == 0:
        raise ValueError("the zero vector has no primitive direction")
    return tuple(x // g for x in ints)


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a x + b y = g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def row_hnf(rows: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U A = H``.  Nonzero rows of
    ``H`` come first, pivots are positive and entries above a pivot are reduced
    into ``[0, pivot)``.
    """
    a = [list(map(int, row)) for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        # gcd-combine every entry of column c (rows r..m-1) into row r
        for i in range(r + 1, m):
            if a[i][c] == 0:
                continue
            g, x, y = extended_gcd(a[r][c], a[i][c])
            p, q = a[r][c] // g, a[i][c] // g
            a[r], a[i] = (
                [x * s + y * t for s, t in zip(a[r], a[i])],
                [-q * s + p * t for s, t in zip(a[r], a[i])],
            )
            u[r], u[i] = (
                [x * s + y * t for s, t in zip(u[r], u[i])],
                [-q * s + p * t for s, t in zip(u[r], u[i])],
            )
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-s for s in a[r]]
            u[r] = [-s for s in u[r]]
        for i in range(r):
            f = a[i][c] // a[r][c]
            if f:
                a[i] = [s - f * t for s, t in zip(a[i], a[r])]
                u[i] = [s - f * t for s, t in zip(u[i], u[r])]
        r += 1
    return a, u


def integer_kernel(rows: Sequence[Sequence], ncols: int) -> IntMatrix:
    """Saturated integer basis of {x in Z^n : A x = 0} (rational A allowed)."""
    scaled = []
    for row in rows:
        fr = [Fraction(x) for x in row]
        den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in fr), 1)
        scaled.append([int(x * den) for x in fr])
    if not scaled:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    at = [list(col) for col in zip(*scaled)]  # n x m
    h, u = row_hnf(at)
    basis = [u[i] for i in range(ncols) if not any(h[i])]
    return row_hnf(basis)[0] if basis else []


def smith_invariants(rows: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    a = [list(map(int, row)) for row in rows]
    if not a or not a[0]:
        return []
    m, n = len(a), len(a[0])
    invariants = []
    t = 0
    while t < min(m, n):
        nonzero = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            changed = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        changed = True
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        changed = True
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        invariants.append(abs(a[t][t]))
        t += 1
    return invariants


def is_saturated(rows: Sequence[Sequence[int]]) -> bool:
    """True when the row lattice equals its rational span intersected with Z^n."""
    return all(d == 1 for d in smith_invariants(rows))


def complete_basis(rows: Sequence[Sequence[int]], n: int) -> IntMatrix:
    """Extend the rows (a basis of a saturated lattice) to a basis of Z^n."""
    rows = int_matrix(rows)
    if not is_saturated(rows) or len(smith_invariants(rows)) != len(rows):
        raise ValueError("rows must be a basis of a saturated sublattice")
    if rows:
        _, u = row_hnf([list(col) for col in zip(*rows)])
    else:
        u = [[int(i == j) for j in range(n)] for i in range(n)]
    # u A^T = H with H = [I; 0] for a saturated basis, so A^T is the first
    # columns of u^{-1} and the remaining columns complete it
    uinv = inverse([[Fraction(x) for x in row] for row in u])
    k = len(rows)
    extra = [[int(uinv[i][j]) for i in range(n)] for j in range(k, n)]
    return rows + extra


class Lattice:
    """Sublattice of Z^n stored as the nonzero rows of its row HNF."""

    __slots__ = ("n", "basis")

    def __init__(self, generators: Sequence[Sequence], n: int):
        gens = int_matrix(generators) if generators else []
        h = row_hnf(gens)[0] if gens else []
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "basis", tuple(tuple(r) for r in h if any(r)))

    def __setattr__(self, name, value):
        raise AttributeError("Lattice is immutable")

    @classmethod
    def saturated_span(cls, vectors: Sequence[Sequence], n: int) -> "Lattice":
        """Z^n intersected with the rational span of ``vectors``."""
        vectors = [list(v) for v in vectors if any(Fraction(x) != 0 for x in v)]
        if not vectors:
            return cls([], n)
        annihilator = nullspace(vectors, n)
        return cls(integer_kernel(annihilator, n), n)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __contains__(self, vector) -> bool:
        return not any(self.reduce(vector))

    def reduce(self, vector) -> tuple[int, ...]:
        """Canonical representative of ``vector`` modulo the lattice."""
        v = [_as_int(x) for x in vector]
        for row in self.basis:
            c = next(i for i, x in enumerate(row) if x)
            q = v[c] // row[c]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.n == other.n and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, self.basis))

    def __repr__(self):
        return f"Lattice(n={self.n}, basis={list(self.basis)})"
