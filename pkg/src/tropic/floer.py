"""Novikov cochain complexes between fibers and lifted tropical subvarieties.

Fiber points are pairs ``(q, z)`` with ``q`` rational and ``z`` a tuple of
unitary holonomies; the corresponding point of the mirror torus has
coordinates ``T^{q_i} z_i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .ainfinity import GappedAlgebra, GappedBimodule, solve_module_element
from .novikov import (
    INF,
    NovikovSeries,
    UnitaryElement,
    exp_positive,
    format_rational,
    log_one_plus,
    mul,
)

DEFAULT_EMAX = Fraction(10)


class ThresholdViolated(ValueError):
    pass


class PrecisionExhausted(ArithmeticError):
    pass


@dataclass(frozen=True)
class LocalSystem:
    holonomies: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "holonomies", tuple(UnitaryElement.of(NovikovSeries.coerce(z)) for z in self.holonomies)
        )

    @classmethod
    def trivial(cls, n: int) -> "LocalSystem":
        return cls(tuple(NovikovSeries.constant(1) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.holonomies)


@dataclass(frozen=True)
class FiberPoint:
    q: tuple
    local_system: LocalSystem

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(Fraction(x) for x in self.q))
        if len(self.q) != self.local_system.n:
            raise ValueError("fiber point and local system dimensions differ")


class NovikovCochainComplex:
    """Generators with degrees and a differential ``d[target][source]``."""

    def __init__(self, generators: Sequence[tuple[str, int]], differential, emax=DEFAULT_EMAX, check: bool = True):
        self.generators = [(str(name), int(deg)) for name, deg in generators]
        self.emax = Fraction(emax)
        size = len(self.generators)
        self.differential = [[NovikovSeries.coerce(x) for x in row] for row in differential]
        if len(self.differential) != size or any(len(row) != size for row in self.differential):
            raise ValueError("differential must be a square matrix over the generators")
        for i, (_, deg_t) in enumerate(self.generators):
            for j, (_, deg_s) in enumerate(self.generators):
                if not self.differential[i][j].is_zero() and deg_t != deg_s + 1:
                    raise ValueError("differential must raise degree by one")
        if check and not self.squares_to_zero():
            raise ValueError("differential does not square to zero")

    def squares_to_zero(self) -> bool:
        size = len(self.generators)
        for i in range(size):
            for j in range(size):
                acc = NovikovSeries.zero()
                for k in range(size):
                    a, b = self.differential[i][k], self.differential[k][j]
                    if a.is_zero() and b.is_zero():
                        continue
                    acc = acc + mul(a, b)
                if acc.order() < self.emax:
                    return False
        return True

    def degrees(self) -> list[int]:
        return sorted({d for _, d in self.generators})

    def entry(self, target: str, source: str) -> NovikovSeries:
        names = [n for n, _ in self.generators]
        return self.differential[names.index(target)][names.index(source)]


def _index_sign(subset: Sequence[int], j: int) -> int:
    return -1 if sum(1 for i in subset if i < j) % 2 else 1


def _subset_name(subset: Sequence[int]) -> str:
    return "x" + "".join(f"_{i + 1}" for i in subset) if subset else "x_empty"


def conormal_fiber_complex(n: int, k: int, lam0, nabla: LocalSystem, emax=DEFAULT_EMAX) -> NovikovCochainComplex:
    """Complex of the conormal lift of a codimension-(n-k) subspace against a fiber."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    lam0 = Fraction(lam0)
    if lam0 <= 0:
        raise ValueError("strip energy must be positive")
    if nabla.n != n:
        raise ValueError("local system has the wrong dimension")
    m = n - k
    subsets = [s for r in range(m + 1) for s in itertools.combinations(range(m), r)]
    position = {s: i for i, s in enumerate(subsets)}
    size = len(subsets)
    diff = [[NovikovSeries.zero() for _ in range(size)] for _ in range(size)]
    for s in subsets:
        for j in range(m):
            if j in s:
                continue
            target = tuple(sorted(s + (j,)))
            weight = (1 - nabla.holonomies[j]).shift(lam0)
            diff[position[target]][position[s]] = weight.scale(_index_sign(s, j))
    gens = [(_subset_name(s), len(s)) for s in subsets]
    return NovikovCochainComplex(gens, diff, emax)


def energy_threshold(R, C_inj, primitive_norm=None) -> Fraction:
    """Energy below which small strips are separated from large ones in a radius-R chart."""
    R, C_inj = Fraction(R), Fraction(C_inj)
    if R <= 0:
        raise ValueError("radius must be positive")
    C = min(R / 4, C_inj)
    if primitive_norm is not None:
        return (R - C) / Fraction(primitive_norm)
    return 2 * C * (R - C)


def pants_energy_threshold(a) -> Fraction:
    """Threshold for the chart of radius ``a + 1`` around ``(-a, -a)``, injectivity radius 1/2."""
    return energy_threshold(Fraction(a) + 1, Fraction(1, 2))


def default_strip_energy(a) -> Fraction:
    return min(Fraction(1), pants_energy_threshold(a)) / 2


def pants_coefficient(a, u1, u2, emax=DEFAULT_EMAX) -> NovikovSeries:
    a = Fraction(a)
    u1, u2 = NovikovSeries.coerce(u1), NovikovSeries.coerce(u2)
    return (u1 - u2 + NovikovSeries.monomial(1, a)).truncate(emax)


def pants_fiber_complex(a, lam0=None, u1=1, u2=1, emax=DEFAULT_EMAX) -> NovikovCochainComplex:
    """Two-generator complex of the pants lift against the fiber over ``(-a, -a)``."""
    a = Fraction(a)
    if a < 0:
        raise ValueError("a must be nonnegative")
    threshold = pants_energy_threshold(a)
    lam0 = default_strip_energy(a) if lam0 is None else Fraction(lam0)
    if lam0 >= threshold:
        raise ThresholdViolated(
            f"strip energy {format_rational(lam0)} is not below {format_rational(threshold)}"
        )
    u1, u2 = UnitaryElement.of(NovikovSeries.coerce(u1)), UnitaryElement.of(NovikovSeries.coerce(u2))
    coeff = pants_coefficient(a, u1, u2, emax).shift(lam0)
    zero = NovikovSeries.zero()
    return NovikovCochainComplex([("x_empty", 0), ("x_1", 1)], [[zero, zero], [coeff, zero]], emax)


def _entry_is_zero(x: NovikovSeries, shift, emax) -> bool:
    if x.terms:
        return False
    if x.precision - shift >= emax:
        return True
    raise PrecisionExhausted(
        f"entry is zero only modulo T^{format_rational(x.precision)}, pivot undetermined"
    )


def _matrix_rank(rows: list[list[NovikovSeries]], emax) -> int:
    """Rank over the Novikov field, fraction free, pivoting on least valuation."""
    rows = [list(r) for r in rows]
    shifts = [Fraction(0)] * len(rows)
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    active = list(range(len(rows)))
    cols = list(range(ncols))
    while active and cols:
        best = None
        for i in active:
            for c in cols:
                x = rows[i][c]
                if _entry_is_zero(x, shifts[i], emax):
                    continue
                if best is None or x.valuation() < rows[best[0]][best[1]].valuation():
                    best = (i, c)
        if best is None:
            break
        p, pc = best
        pivot = rows[p][pc]
        active.remove(p)
        cols.remove(pc)
        for i in active:
            factor = rows[i][pc]
            if factor.is_zero():
                continue
            rows[i] = [mul(pivot, x) - mul(factor, y) for x, y in zip(rows[i], rows[p])]
            shifts[i] += pivot.valuation()
        rank += 1
    return rank


def cohomology_rank(C: NovikovCochainComplex, degree: Optional[int] = None) -> int:
    names = C.generators
    degrees = C.degrees()

    def block(q):
        src = [j for j, (_, d) in enumerate(names) if d == q]
        tgt = [i for i, (_, d) in enumerate(names) if d == q + 1]
        return [[C.differential[i][j] for j in src] for i in tgt], len(src)

    def rank_from(q):
        rows, width = block(q)
        return _matrix_rank(rows, C.emax) if rows and width else 0

    wanted = degrees if degree is None else [degree]
    total = 0
    for q in wanted:
        dim = sum(1 for _, d in names if d == q)
        total += dim - rank_from(q) - rank_from(q - 1)
    return total


# A-support


@dataclass(frozen=True)
class Conormal:
    """Conormal lift of the subspace where the first ``n-k`` coordinates vanish."""

    n: int
    k: int
    lam0: Fraction = Fraction(1)


@dataclass(frozen=True)
class Pants:
    """Lift of the tropical pants with legs (1,0), (0,1), (-1,-1) from the origin."""

    lam0: Optional[Fraction] = None


@dataclass(frozen=True)
class SupportVerdict:
    in_support: bool
    witness: Optional[LocalSystem]
    rank: int
    reason: str

    def __bool__(self):
        return self.in_support


def _complete(holonomies: Sequence, n: int) -> list:
    hol = list(holonomies) if holonomies is not None else [None] * n
    if len(hol) != n:
        raise ValueError("holonomy count does not match dimension")
    return hol


def _unitary_or_none(x: NovikovSeries) -> Optional[UnitaryElement]:
    if x.is_zero() or x.valuation() != 0:
        return None
    return UnitaryElement.of(x)


def a_support_query(
    kind, q: Sequence, holonomies: Optional[Sequence] = None, emax=DEFAULT_EMAX, construct: bool = False
) -> SupportVerdict:
    """Decide whether the fiber over ``q`` with the given holonomies pairs nontrivially.

    Entries of ``holonomies`` given as None are solved for; the witness is the
    completed local system.  With ``construct`` the pants witness is built by
    the module solver rather than the closed form.
    """
    q = tuple(Fraction(x) for x in q)
    emax = Fraction(emax)
    if isinstance(kind, Conormal):
        return _conormal_support(kind, q, _complete(holonomies, kind.n), emax)
    if isinstance(kind, Pants):
        return _pants_support(kind, q, _complete(holonomies, 2), emax, construct)
    raise TypeError(f"unknown lift {kind!r}")


def _conormal_support(kind: Conormal, q, hol, emax) -> SupportVerdict:
    if len(q) != kind.n:
        raise ValueError("point has the wrong dimension")
    m = kind.n - kind.k
    if any(q[j] != 0 for j in range(m)):
        return SupportVerdict(False, None, 0, "fiber is disjoint from the lift")
    filled = [
        (NovikovSeries.constant(1) if (z is None) else NovikovSeries.coerce(z)) for z in hol
    ]
    nabla = LocalSystem(tuple(filled))
    rank = cohomology_rank(conormal_fiber_complex(kind.n, kind.k, kind.lam0, nabla, emax))
    if rank == 0:
        return SupportVerdict(False, None, 0, "a holonomy along the subspace directions is nontrivial")
    return SupportVerdict(True, nabla, rank, "holonomy trivial along the subspace directions")


def _pants_support(kind: Pants, q, hol, emax, construct) -> SupportVerdict:
    if len(q) != 2:
        raise ValueError("pants lives in dimension 2")
    q1, q2 = q
    u1, u2 = (None if z is None else NovikovSeries.coerce(z) for z in hol)
    if q1 == q2 and q1 <= 0:
        a = -q1
        if u2 is None:
            u2 = NovikovSeries.constant(1) if (a > 0 or u1 is not None) else NovikovSeries.constant(2)
            if u1 is not None:
                u2 = (u1 + NovikovSeries.monomial(1, a)).truncate(emax)
        if u1 is None:
            if construct:
                witness = pants_witness(a, u2, emax=emax)
                u1 = witness
            else:
                u1 = (u2 - NovikovSeries.monomial(1, a)).truncate(emax)
        u1u, u2u = _unitary_or_none(u1), _unitary_or_none(u2)
        if u1u is None or u2u is None:
            return SupportVerdict(False, None, 0, "no unitary holonomy solves the vanishing condition")
        rank = cohomology_rank(pants_fiber_complex(a, kind.lam0, u1u, u2u, emax))
        if rank == 0:
            return SupportVerdict(False, None, 0, "strip contributions do not cancel")
        return SupportVerdict(True, LocalSystem((u1u, u2u)), rank, "strip contributions cancel")
    if q2 == 0 and q1 > 0:
        return _leg_support(q1, u1, u2, emax, first_leg=True)
    if q1 == 0 and q2 > 0:
        return _leg_support(q2, u2, u1, emax, first_leg=False)
    return SupportVerdict(False, None, 0, "fiber is disjoint from the lift")


def _leg_support(t, moving, fixed, emax, first_leg: bool) -> SupportVerdict:
    """On a horizontal or vertical leg the relation reads ``T^t moving - fixed + 1 = 0`` up to the leg's orientation."""
    one = NovikovSeries.constant(1)
    # first leg: T^t u1 - u2 + 1 = 0; second leg: u1 - T^t u2 + 1 = 0
    if fixed is None:
        moving = one if moving is None else moving
        fixed = (moving.shift(t) + 1).truncate(emax) if first_leg else (moving.shift(t) - 1).truncate(emax)
    if moving is None:
        residual_target = (fixed - 1) if first_leg else (fixed + 1)
        if residual_target.order() < t:
            return SupportVerdict(False, None, 0, "no unitary holonomy solves the leg relation")
        moving = residual_target.shift(-t).truncate(emax)
    mu, fu = _unitary_or_none(moving), _unitary_or_none(fixed)
    if mu is None or fu is None:
        return SupportVerdict(False, None, 0, "no unitary holonomy solves the leg relation")
    residual = (mu.shift(t) - fu + 1) if first_leg else (fu - mu.shift(t) + 1)
    if residual.truncate(emax).order() < emax:
        return SupportVerdict(False, None, 0, "leg relation fails")
    witness = LocalSystem((mu, fu)) if first_leg else LocalSystem((fu, mu))
    return SupportVerdict(True, witness, 2, "leg relation holds")


# pants bimodule fixture and module-solver witness


def pants_bimodule(a, u2, lam0=None, emax=DEFAULT_EMAX) -> tuple[GappedBimodule, Fraction]:
    """Bimodule whose deformed differential is ``T^lam0 (base * exp(b) - u2 + T^a)``.

    The left algebra has one degree-one generator ``y`` and no products; the
    deforming cochain ``b * y`` acts through ``m^{k|1|0}(y^k, x_empty) =
    T^lam0 base / k! x_1``.  Returns the bimodule and the base constant.
    """
    a = Fraction(a)
    lam0 = default_strip_energy(a) if lam0 is None else Fraction(lam0)
    u2 = NovikovSeries.coerce(u2).truncate(emax)
    base = u2.coefficient(0) - (1 if a == 0 else 0)
    if base == 0:
        raise ValueError("no unitary solution: constant term cancels")
    module_emax = Fraction(emax) + lam0
    left = GappedAlgebra({"y": 1}, {}, emax)
    right = GappedAlgebra({}, {}, emax)
    target = (NovikovSeries.constant(base) - u2 + NovikovSeries.monomial(1, a)).truncate(emax)
    terms = {}
    for e, c in target.terms:
        key = (0, 0, lam0 + e, (), "x_empty", ())
        terms[key] = {"x_1": c}
    positive = [e for e, _ in u2.terms if e > 0] + ([a] if a > 0 else [])
    gap = min(positive, default=Fraction(1))
    arity = max(1, math.ceil((Fraction(emax) - lam0) / gap) if gap > 0 else 1)
    factorial = 1
    for k in range(1, arity + 1):
        factorial *= k
        terms[(k, 0, lam0, ("y",) * k, "x_empty", ())] = {"x_1": Fraction(base) / factorial}
    M = GappedBimodule(left, right, {"x_empty": 0, "x_1": 1}, terms, module_emax)
    return M, Fraction(base)


def pants_witness(a, u2, lam0=None, emax=DEFAULT_EMAX, trace: Optional[list] = None) -> UnitaryElement:
    """Left holonomy ``base * exp(b)`` from the bounding pair built by the module solver."""
    M, base = pants_bimodule(a, u2, lam0, emax)
    cochain, _ = solve_module_element(M, "x_empty", trace=trace)
    b = NovikovSeries([(lvl, c) for (lvl, name), c in cochain.items() if name == "y"], Fraction(emax))
    return UnitaryElement.of(exp_positive(b, precision=emax).scale(base))


# obstructed line


@dataclass(frozen=True)
class LineSolution:
    t: NovikovSeries
    u2: NovikovSeries
    w1: NovikovSeries
    w2: NovikovSeries
    disk_energy: Fraction


def solve_line(c, u1=1, emax=DEFAULT_EMAX) -> LineSolution:
    """Solve ``(1-t)(0,1,1) + t(u1, 0, u2) = (T^-c w1, T^-c w2, 0)`` with unitary ``u2, w1, w2``.

    The third coordinate forces ``t = (1 - u2)^-1``; unitarity of ``w1`` forces
    ``val(1 - u2) = c``.  Takes ``u2 = 1 - T^c`` and returns the energy
    ``val(log u2)``.
    """
    c = Fraction(c)
    if c <= 0:
        raise ValueError("edge length must be positive")
    emax = Fraction(emax)
    u1 = UnitaryElement.of(NovikovSeries.coerce(u1))
    u2 = NovikovSeries([(0, 1), (c, -1)])
    t = NovikovSeries.monomial(1, -c)
    w1 = mul(t, u1).shift(c)
    w2 = (1 - t).shift(c)
    for w in (w1, w2):
        UnitaryElement.of(w)
    first = mul(t, u1) - w1.shift(-c)
    second = (1 - t) - w2.shift(-c)
    third = (1 - t) + mul(t, u2)
    for residual in (first, second, third):
        if not residual.truncate(emax).is_zero_mod(emax):
            raise ArithmeticError("collinearity equations fail")
    b2 = log_one_plus(u2 - 1, precision=emax + c)
    return LineSolution(t, u2, w1, w2, b2.valuation())


def line_backsolve(c, u1=1, emax=DEFAULT_EMAX) -> Fraction:
    """Energy of the disk forced on the lifted line with internal edge length ``c``."""
    return solve_line(c, u1, emax).disk_energy
