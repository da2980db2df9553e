"""Cohomology of the Lagrangian lift of a smooth tropical curve.

Each vertex contributes a piece homotopic to (pair of pants) x T^{n-2} and each
bounded edge a torus T^{n-1} where two pieces overlap.  First cohomology of a
piece is identified with Z^n, the first cohomology of the torus over an edge
with direction ``u`` with the quotient Z^n / Z u, and restriction is the
quotient map.  Higher degrees are exterior powers; in a piece, wedges that
contain both pants classes vanish.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lattice import complete_basis, integer_kernel
from .linalg import inverse, rank_over, determinant
from .tropical import TropicalCurve, genus, is_smooth_curve


class NotSmooth(ValueError):
    pass


class NotAnEnd(ValueError):
    pass


IntMatrix = list[list[int]]


@dataclass(frozen=True)
class LiftModel:
    curve: TropicalCurve
    piece_bases: tuple[tuple[tuple[int, ...], ...], ...]
    edge_bases: dict
    restrictions: dict

    @property
    def n(self) -> int:
        return self.curve.n


def _coordinates_mod(u: Sequence[int], frame: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    """Coordinates of ``x`` modulo ``u`` in the basis ``frame`` of Z^n / Z u."""
    n = len(u)
    cols = [list(u)] + [list(f) for f in frame]
    mat = [[Fraction(cols[j][i]) for j in range(n)] for i in range(n)]
    inv = inverse(mat)
    coords = [sum(inv[r][i] * x[i] for i in range(n)) for r in range(n)]
    out = []
    for value in coords[1:]:
        if value.denominator != 1:
            raise ArithmeticError("edge frame is not a lattice basis")
        out.append(int(value))
    return out


def build_lift_model(c: TropicalCurve) -> LiftModel:
    verdict = is_smooth_curve(c)
    if not verdict.ok:
        raise NotSmooth(f"curve is not smooth at {verdict.offending}")
    n = c.n
    piece_bases = []
    leg_generators: dict[tuple[int, int], tuple[int, ...]] = {}
    for v in range(len(c.vertices)):
        (e1, d1, _), (e2, d2, _), (e3, _, _) = c.outgoing(v)
        b = complete_basis([list(d1), list(d2)], n)
        b1, b2, rest = tuple(b[0]), tuple(b[1]), [tuple(r) for r in b[2:]]
        piece_bases.append((b2, tuple(-x for x in b1), *rest))
        leg_generators[(v, e1)] = b2
        leg_generators[(v, e2)] = tuple(-x for x in b1)
        leg_generators[(v, e3)] = b1
        for e in (e1, e2, e3):
            leg_generators[(v, e, "rest")] = tuple(rest)
    edge_bases = {}
    for i, e in enumerate(c.edges):
        owner = e.tail
        frame = (leg_generators[(owner, i)],) + leg_generators[(owner, i, "rest")]
        edge_bases[i] = (e.direction, frame)
    restrictions = {}
    for i, e in enumerate(c.edges):
        u, frame = edge_bases[i]
        for v in {e.tail, e.head} - {None}:
            columns = [_coordinates_mod(u, frame, x) for x in piece_bases[v]]
            restrictions[(v, i)] = [[col[r] for col in columns] for r in range(n - 1)]
    return LiftModel(c, tuple(piece_bases), edge_bases, restrictions)


def piece_degree_basis(n: int, q: int) -> list[tuple[int, ...]]:
    """Index sets of degree-q wedges surviving in a piece (not both pants classes)."""
    return [s for s in itertools.combinations(range(n), q) if not (0 in s and 1 in s)]


def torus_degree_basis(n: int, q: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(n - 1), q))


def exterior_power(matrix: IntMatrix, rows: Sequence[tuple], cols: Sequence[tuple]) -> IntMatrix:
    """Matrix of the induced map on wedges, entries are minors."""
    out = []
    for t in rows:
        line = []
        for s in cols:
            if not t and not s:
                line.append(1)
                continue
            sub = [[matrix[i][j] for j in s] for i in t]
            line.append(int(determinant(sub)))
        out.append(line)
    return out


def restriction_in_degree(m: LiftModel, vertex: int, edge: int, q: int) -> IntMatrix:
    n = m.n
    return exterior_power(
        m.restrictions[(vertex, edge)], torus_degree_basis(n, q), piece_degree_basis(n, q)
    )


def cech_differential(m: LiftModel, q: int) -> tuple[IntMatrix, int, int]:
    """Difference-of-restrictions map C0^q -> C1^q with its dimensions."""
    c = m.curve
    n = m.n
    pdim = len(piece_degree_basis(n, q))
    tdim = len(torus_degree_basis(n, q))
    nv = len(c.vertices)
    bounded = c.bounded_edges()
    rows = []
    for i in bounded:
        e = c.edges[i]
        tail = restriction_in_degree(m, e.tail, i, q)
        head = restriction_in_degree(m, e.head, i, q)
        for r in range(tdim):
            row = [0] * (nv * pdim)
            for j in range(pdim):
                row[e.tail * pdim + j] += tail[r][j]
                row[e.head * pdim + j] -= head[r][j]
            rows.append(row)
    return rows, nv * pdim, len(bounded) * tdim


def _rank(rows: IntMatrix, field: str) -> int:
    return rank_over(rows, field) if rows else 0


def lift_cohomology(m: LiftModel, coefficients: str = "Q") -> tuple[int, ...]:
    n = m.n
    betti = []
    prev = None
    for q in range(n + 1):
        rows, c0, c1 = cech_differential(m, q)
        r = _rank(rows, coefficients)
        kernel = c0 - r
        coker_prev = 0 if prev is None else prev[1] - prev[0]
        betti.append(kernel + coker_prev)
        prev = (r, c1)
    return tuple(betti)


def euler_characteristic_expected(m: LiftModel) -> int:
    """Sum over pieces minus sum over overlap tori of Euler characteristics."""
    n = m.n
    piece = -1 if n == 2 else 0
    torus = 1 if n == 1 else 0
    return len(m.curve.vertices) * piece - len(m.curve.bounded_edges()) * torus


def _kernel_basis(rows: IntMatrix, ncols: int, field: str) -> list[list[int]]:
    if field == "Q":
        return integer_kernel(rows, ncols) if rows else [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    if field == "F2":
        return _kernel_mod2(rows, ncols)
    raise ValueError(f"unknown coefficient field {field!r}")


def _kernel_mod2(rows: IntMatrix, ncols: int) -> list[list[int]]:
    m = [[x % 2 for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                m[i] = [(x + y) % 2 for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    basis = []
    for f in (c for c in range(ncols) if c not in pivots):
        v = [0] * ncols
        v[f] = 1
        for row, p in zip(m, pivots):
            v[p] = row[f] % 2
        basis.append(v)
    return basis


def _check_end(m: LiftModel, end: int) -> None:
    if not 0 <= end < len(m.curve.edges) or not m.curve.edges[end].is_ray:
        raise NotAnEnd(f"edge {end} is not a ray of the curve")


def end_restriction(m: LiftModel, end: int, q: int, coefficients: str = "Q") -> IntMatrix:
    """Restriction H^q(L_V) -> H^q(T_end) on the basis (cokernel part, cocycle part)."""
    _check_end(m, end)
    n = m.n
    rows, c0, _ = cech_differential(m, q)
    cocycles = _kernel_basis(rows, c0, coefficients)
    if q == 0:
        coker_dim = 0
    else:
        prev, _, c1_prev = cech_differential(m, q - 1)
        coker_dim = c1_prev - _rank(prev, coefficients)
    v = m.curve.edges[end].tail
    pdim = len(piece_degree_basis(n, q))
    res = restriction_in_degree(m, v, end, q)
    tdim = len(res)
    out = [[0] * coker_dim for _ in range(tdim)]
    for z in cocycles:
        local = z[v * pdim:(v + 1) * pdim]
        image = [sum(res[r][j] * local[j] for j in range(pdim)) for r in range(tdim)]
        for r in range(tdim):
            out[r].append(image[r])
    return out


@dataclass(frozen=True)
class LiftVerdict:
    ok: bool
    rank: int
    expected: int
    note: str = ""

    def __bool__(self):
        return self.ok


def _warn_genus(m: LiftModel) -> str:
    if genus(m.curve) > 0:
        msg = "curve has positive genus; the tree hypothesis is not verified"
        warnings.warn(msg, stacklevel=3)
        return msg
    return ""


def check_h1_surjection(m: LiftModel, end: int, coefficients: str = "Q") -> LiftVerdict:
    note = _warn_genus(m)
    mat = end_restriction(m, end, 1, coefficients)
    r = _rank(mat, coefficients)
    return LiftVerdict(r == m.n - 1, r, m.n - 1, note)


def check_h2_injection(m: LiftModel, end: int, coefficients: str = "Q") -> LiftVerdict:
    _check_end(m, end)
    note = _warn_genus(m)
    b2 = lift_cohomology(m, coefficients)[2] if m.n >= 2 else 0
    stacked: IntMatrix = []
    for g in m.curve.rays():
        if g != end:
            stacked.extend(end_restriction(m, g, 2, coefficients))
    r = _rank(stacked, coefficients) if stacked and stacked[0] else 0
    return LiftVerdict(r == b2, r, b2, note)


def unobstructedness_criterion(m: LiftModel, end: int, coefficients: str = "Q") -> LiftVerdict:
    """H^1(M) -> H^2(L, M) onto, with M the ends other than ``end``; equivalent to H^2 injectivity."""
    return check_h2_injection(m, end, coefficients)
