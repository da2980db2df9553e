"""Exact two-phase simplex over the rationals with Bland's anti-cycling rule."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LPResult:
    status: str
    point: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, c: int) -> None:
        rows, rhs = self.rows, self.rhs
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        rhs[r] *= inv
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                rhs[i] -= f * rhs[r]
        self.basis[r] = c

    def optimize(self, cost: list[Fraction], allowed: int) -> str:
        """Maximize ``cost . x`` over columns ``< allowed`` entering the basis."""
        while True:
            # reduced costs: cost_j - sum_i cost_{basis i} * a_ij
            entering = None
            for j in range(allowed):
                if j in self.basis:
                    continue
                reduced = cost[j] - sum(
                    (cost[b] * self.rows[i][j] for i, b in enumerate(self.basis)), Fraction(0)
                )
                if reduced > 0:
                    entering = j
                    break
            if entering is None:
                return OPTIMAL
            leaving = None
            best = None
            for i, row in enumerate(self.rows):
                if row[entering] > 0:
                    ratio = self.rhs[i] / row[entering]
                    key = (ratio, self.basis[i])
                    if best is None or key < best:
                        best, leaving = key, i
            if leaving is None:
                return UNBOUNDED
            self.pivot(leaving, entering)


def maximize(
    objective: Sequence,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    nvars: Optional[int] = None,
) -> LPResult:
    """Maximize ``objective . x`` subject to ``a_ub x <= b_ub`` and ``a_eq x = b_eq``.

    Variables are free (unrestricted in sign).
    """
    n = nvars if nvars is not None else len(objective)
    obj = [Fraction(x) for x in objective] if objective else [Fraction(0)] * n
    constraints: list[tuple[list[Fraction], Fraction, bool]] = []
    for row, b in zip(a_ub, b_ub):
        constraints.append(([Fraction(x) for x in row], Fraction(b), True))
    for row, b in zip(a_eq, b_eq):
        constraints.append(([Fraction(x) for x in row], Fraction(b), False))
    m = len(constraints)
    n_slack = sum(1 for _, _, ub in constraints if ub)
    # columns: x+ (n), x- (n), slacks, artificials (m)
    width = 2 * n + n_slack + m
    rows, rhs, basis = [], [], []
    slack = 0
    for i, (row, b, ub) in enumerate(constraints):
        full = row + [-x for x in row] + [Fraction(0)] * (n_slack + m)
        if ub:
            full[2 * n + slack] = Fraction(1)
            slack += 1
        if b < 0:
            full = [-x for x in full]
            b = -b
        full[2 * n + n_slack + i] = Fraction(1)
        rows.append(full)
        rhs.append(b)
        basis.append(2 * n + n_slack + i)
    tab = _Tableau(rows, rhs, basis)
    phase1 = [Fraction(0)] * (2 * n + n_slack) + [Fraction(-1)] * m
    tab.optimize(phase1, width)
    infeasibility = sum((rhs[i] for i, b in enumerate(tab.basis) if b >= 2 * n + n_slack), Fraction(0))
    if infeasibility > 0:
        return LPResult(INFEASIBLE)
    # drive degenerate artificials out of the basis where possible
    real = 2 * n + n_slack
    for i, b in enumerate(list(tab.basis)):
        if b >= real:
            col = next((j for j in range(real) if tab.rows[i][j] != 0), None)
            if col is not None:
                tab.pivot(i, col)
    keep = [i for i, b in enumerate(tab.basis) if b < real]
    tab.rows = [tab.rows[i][:real] for i in keep]
    tab.rhs = [tab.rhs[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]
    phase2 = obj + [-x for x in obj] + [Fraction(0)] * n_slack
    status = tab.optimize(phase2, real)
    values = [Fraction(0)] * real
    for i, b in enumerate(tab.basis):
        values[b] = tab.rhs[i]
    point = tuple(values[j] - values[n + j] for j in range(n))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, point)
    value = sum((c * x for c, x in zip(obj, point)), Fraction(0))
    return LPResult(OPTIMAL, point, value)


def feasible_point(a_ub=(), b_ub=(), a_eq=(), b_eq=(), nvars: int = 0) -> Optional[tuple[Fraction, ...]]:
    result = maximize([0] * nvars, a_ub, b_ub, a_eq, b_eq, nvars)
    return None if result.status == INFEASIBLE else result.point
