"""Independent reference computations used to cross-check the library.

Nothing here imports the code under test except plain data types, so every
oracle is a second route to the same number.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import sympy
from scipy.optimize import linprog


def sympy_rank(rows, ncols=None) -> int:
    if not rows:
        return 0
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x for x in r] for r in rows]).rank()


def sympy_nullity(rows, ncols: int) -> int:
    if not rows:
        return ncols
    m = sympy.Matrix([[sympy.Rational(str(x)) for x in r] for r in rows])
    return len(m.nullspace())


def rank_mod2(rows) -> int:
    m = [[int(x) % 2 for x in r] for r in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                m[i] = [(a ^ b) for a, b in zip(m[i], m[r])]
        r += 1
    return r


def float_dimension(n: int, inequalities, equalities) -> int:
    """Dimension of {x : a.x >= r, b.x = s}: an inequality is implicit when its LP minimum equals rhs."""
    a_ub = [[-float(x) for x in a] for a, _ in inequalities]
    b_ub = [-float(r) for _, r in inequalities]
    a_eq = [[float(x) for x in a] for a, _ in equalities] or None
    b_eq = [float(r) for _, r in equalities] or None
    bounds = [(None, None)] * n
    feas = linprog(np.zeros(n), A_ub=a_ub or None, b_ub=b_ub or None, A_eq=a_eq, b_eq=b_eq, bounds=bounds)
    if feas.status == 2:
        return -1
    tight = [list(map(float, a)) for a, _ in equalities]
    for a, r in inequalities:
        res = linprog(
            [-float(x) for x in a],
            A_ub=a_ub or None,
            b_ub=b_ub or None,
            A_eq=a_eq,
            b_eq=b_eq,
            bounds=bounds,
        )
        if res.status == 0 and abs(-res.fun - float(r)) < 1e-9:
            tight.append([float(x) for x in a])
    rank = np.linalg.matrix_rank(np.array(tight)) if tight else 0
    return n - int(rank)


def brute_min_achievers(coefficients: dict, q) -> tuple[Fraction, set]:
    vals = {a: Fraction(c) + sum(Fraction(x) * y for x, y in zip(a, q)) for a, c in coefficients.items()}
    low = min(vals.values())
    return low, {a for a, v in vals.items() if v == low}


# truncated series as dicts exponent -> coefficient


def series_mul(a: dict, b: dict, cap) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            if e < cap:
                out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def series_add(*parts: dict) -> dict:
    out: dict = {}
    for p in parts:
        for e, c in p.items():
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c != 0}


def series_inverse_unit(a: dict, cap) -> dict:
    """Inverse of a valuation-zero series by solving coefficient by coefficient."""
    c0 = a[Fraction(0)]
    exps = sorted(set(a))
    # exponents of the inverse lie in the monoid generated by the positive exponents
    gens = [e for e in exps if e > 0]
    levels = {Fraction(0)}
    frontier = [Fraction(0)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y < cap and y not in levels:
                    levels.add(y)
                    nxt.append(y)
        frontier = nxt
    inv: dict = {}
    for lvl in sorted(levels):
        acc = Fraction(1) if lvl == 0 else Fraction(0)
        for e, c in a.items():
            if 0 < e <= lvl and (lvl - e) in inv:
                acc -= c * inv[lvl - e]
        inv[lvl] = acc / c0
    return {e: c for e, c in inv.items() if c != 0}


def evaluate_laurent(coefficients: dict, point: list[tuple[Fraction, dict]], cap) -> dict:
    """``sum c_alpha prod z_j^alpha_j`` with ``z_j = T^{q_j} u_j``, modulo ``T^cap``.

    ``coefficients`` maps exponents to (valuation, unit series) and ``point``
    lists (q_j, unit series u_j).
    """
    total: dict = {}
    low = min(v + sum(a * q for a, (q, _) in zip(alpha, point)) for alpha, (v, _) in coefficients.items())
    rel = cap - low
    for alpha, (v, unit) in coefficients.items():
        shift = v + sum(a * q for a, (q, _) in zip(alpha, point))
        term = dict(unit)
        for k, (_, u) in zip(alpha, point):
            base = u if k >= 0 else series_inverse_unit(u, rel)
            for _ in range(abs(k)):
                term = series_mul(term, base, rel)
        total = series_add(total, {e + shift: c for e, c in term.items()})
    return {e: c for e, c in total.items() if e < cap}


# classical DGA identities, written with unshifted signs


def dga_defects(basis: dict, d: dict, prod: dict, curvature: dict) -> list[str]:
    """Check d^2 = -[w, .] style identities of a curved DGA with central curvature.

    ``d`` maps a name to {name: coeff}; ``prod`` maps (x, y) to {name: coeff};
    ``curvature`` is {name: coeff} (a single energy level assumed).
    """

    def apply_d(vec):
        out: dict = {}
        for n, c in vec.items():
            for t, v in d.get(n, {}).items():
                out[t] = out.get(t, 0) + c * v
        return {k: v for k, v in out.items() if v != 0}

    def mult(u, v):
        out: dict = {}
        for a, ca in u.items():
            for b, cb in v.items():
                for t, w in prod.get((a, b), {}).items():
                    out[t] = out.get(t, 0) + ca * cb * w
        return {k: v for k, v in out.items() if v != 0}

    problems = []
    names = list(basis)
    for x in names:
        if apply_d(apply_d({x: 1})):
            problems.append(f"d^2({x}) != 0")
    for x, y in itertools.product(names, repeat=2):
        lhs = apply_d(mult({x: 1}, {y: 1}))
        sign = -1 if basis[x] % 2 else 1
        rhs = series_add(mult(apply_d({x: 1}), {y: 1}), {k: sign * v for k, v in mult({x: 1}, apply_d({y: 1})).items()})
        if series_add(lhs, {k: -v for k, v in rhs.items()}):
            problems.append(f"Leibniz fails on {x},{y}")
    for x, y, z in itertools.product(names, repeat=3):
        a = mult(mult({x: 1}, {y: 1}), {z: 1})
        b = mult({x: 1}, mult({y: 1}, {z: 1}))
        if series_add(a, {k: -v for k, v in b.items()}):
            problems.append(f"associativity fails on {x},{y},{z}")
    if curvature:
        if apply_d(curvature):
            problems.append("curvature not closed")
        for x in names:
            if series_add(mult(curvature, {x: 1}), {k: -v for k, v in mult({x: 1}, curvature).items()}):
                problems.append(f"curvature not central against {x}")
    return problems


def mayer_vietoris_betti_vc() -> tuple[int, ...]:
    """Hand count for the lifted line in R^3 with one bounded edge.

    Pieces: two copies of (pants x S^1), Betti (1, 3, 2, 0) each.
    Overlap: one T^2, Betti (1, 2, 1).
    Restrictions in degree 1 are the quotients Z^3 -> Z^3 / Z u, onto, so the
    difference map H^1 + H^1 -> H^1(T^2) has rank 2, and in degree 2 the
    image is the full H^2(T^2) (rank 1).  Degree 0 difference has rank 1.
    b0 = 2 - 1 = 1, b1 = (6 - 2) + (1 - 1) = 4, b2 = (4 - 1) + (2 - 2) = 3,
    b3 = 0 + (1 - 1) = 0.
    """
    return (1, 4, 3, 0)


# lift cohomology without the library's frames: piece = exterior algebra on Q^n
# modulo the wedge of its pants plane, edge torus = exterior algebra on Q^n / Q u


def _annihilator(u) -> sympy.Matrix:
    rows = sympy.Matrix([list(u)]).nullspace()
    return sympy.Matrix.hstack(*rows).T


def _wedge_map(mat: sympy.Matrix, q: int) -> sympy.Matrix:
    rows_idx = list(itertools.combinations(range(mat.rows), q))
    cols_idx = list(itertools.combinations(range(mat.cols), q))
    if q == 0:
        return sympy.Matrix([[1]])
    return sympy.Matrix(
        len(rows_idx), len(cols_idx), lambda i, j: mat.extract(list(rows_idx[i]), list(cols_idx[j])).det()
    )


def _comb(n: int, k: int) -> int:
    from math import comb

    return comb(n, k) if 0 <= k <= n else 0


def lift_oracle(vertices: int, bounded: list[tuple[int, int, tuple]], rays: list[tuple[int, tuple]], n: int):
    """Betti numbers, end-restriction ranks in degree 1 and H^2 injectivity per excluded end."""

    def delta(q):
        pdim = _comb(n, q)
        blocks = []
        for tail, head, u in bounded:
            w = _wedge_map(_annihilator(u), q)
            row = [sympy.zeros(w.rows, pdim) for _ in range(vertices)]
            row[tail] = row[tail] + w
            row[head] = row[head] - w
            blocks.append(sympy.Matrix.hstack(*row))
        if not blocks:
            return sympy.zeros(0, vertices * pdim)
        return sympy.Matrix.vstack(*blocks)

    deltas = [delta(q) for q in range(n + 1)]
    betti = []
    for q in range(n + 1):
        quotient_dim = vertices * (_comb(n, q) - _comb(n - 2, q - 2))
        r = deltas[q].rank() if deltas[q].rows else 0
        coker = 0
        if q > 0:
            prev = deltas[q - 1]
            coker = prev.rows - (prev.rank() if prev.rows else 0)
        betti.append(quotient_dim - r + coker)

    def kernel(q):
        d = deltas[q]
        if d.rows == 0:
            return sympy.eye(d.cols)
        basis = d.nullspace()
        return sympy.Matrix.hstack(*basis) if basis else sympy.zeros(d.cols, 0)

    def end_map(tail, u, q):
        pdim = _comb(n, q)
        w = _wedge_map(_annihilator(u), q)
        blocks = [sympy.zeros(w.rows, pdim) for _ in range(vertices)]
        blocks[tail] = w
        return sympy.Matrix.hstack(*blocks)

    k1 = kernel(1)
    h1_ranks = [(end_map(t, u, 1) * k1).rank() if k1.cols else 0 for t, u in rays]
    k2 = kernel(2)
    plane_dim = vertices * _comb(n - 2, 0)
    injective = []
    for skip in range(len(rays)):
        maps = [end_map(t, u, 2) for i, (t, u) in enumerate(rays) if i != skip]
        stack = sympy.Matrix.vstack(*maps) * k2 if maps and k2.cols else sympy.zeros(0, 0)
        r = stack.rank() if stack.rows and stack.cols else 0
        injective.append(r == betti[2] and betti[2] == k2.cols - plane_dim)
    return tuple(betti), h1_ranks, injective


def shortest_exit_oracle(c, normal, rhs):
    """Floyd-Warshall over edges inside the hyperplane, independent of the library search."""
    inside = [sum(a * x for a, x in zip(normal, v)) == rhs for v in c.vertices]
    nv = len(c.vertices)
    inf = None
    dist = [[inf] * nv for _ in range(nv)]
    for v in range(nv):
        dist[v][v] = Fraction(0)
    for e in c.edges:
        if e.head is None or not (inside[e.tail] and inside[e.head]):
            continue
        diff = [y - x for x, y in zip(c.vertices[e.tail], c.vertices[e.head])]
        k = next(i for i, d in enumerate(e.direction) if d)
        length = diff[k] / e.direction[k]
        for a, b in ((e.tail, e.head), (e.head, e.tail)):
            if dist[a][b] is None or length < dist[a][b]:
                dist[a][b] = length
    for k in range(nv):
        for i in range(nv):
            for j in range(nv):
                if dist[i][k] is not None and dist[k][j] is not None:
                    cand = dist[i][k] + dist[k][j]
                    if dist[i][j] is None or cand < dist[i][j]:
                        dist[i][j] = cand
    return dist
