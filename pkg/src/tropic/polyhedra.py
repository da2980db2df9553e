"""Rational polyhedra, weighted polyhedral complexes and the balancing condition."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from . import lp
from .lattice import Lattice, extended_gcd, integer_kernel, primitive
from .linalg import rank, solve


class NotAFacet(ValueError):
    """The given polyhedron is not a codimension-one face of the cell."""


class _EmptyType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Empty"


Empty = _EmptyType()

Constraint = tuple[tuple[int, ...], Fraction]


def _normalize(normal: Sequence, rhs, equality: bool) -> Constraint:
    fr = [Fraction(x) for x in normal]
    if not any(fr):
        raise ValueError("constraint normals must be nonzero")
    prim = primitive(fr)
    # scale factor s > 0 with prim = s * normal
    idx = next(i for i, x in enumerate(fr) if x)
    s = Fraction(prim[idx]) / fr[idx]
    rhs = Fraction(rhs) * s
    if equality and prim[idx] < 0:
        prim = tuple(-x for x in prim)
        rhs = -rhs
    return prim, rhs


class RationalPolyhedron:
    """Polyhedron ``{q : <q, a> >= r for inequalities, <q, a> = r for equalities}``."""

    def __init__(self, n: int, inequalities: Sequence = (), equalities: Sequence = ()):
        self.n = n
        ineq = []
        for normal, rhs in inequalities:
            if len(normal) != n:
                raise ValueError("normal has wrong length")
            c = _normalize(normal, rhs, False)
            if c not in ineq:
                ineq.append(c)
        eq = []
        for normal, rhs in equalities:
            if len(normal) != n:
                raise ValueError("normal has wrong length")
            c = _normalize(normal, rhs, True)
            if c not in eq:
                eq.append(c)
        self.inequalities: tuple[Constraint, ...] = tuple(ineq)
        self.equalities: tuple[Constraint, ...] = tuple(eq)

    def __repr__(self):
        return f"RationalPolyhedron(n={self.n}, inequalities={self.inequalities}, equalities={self.equalities})"

    # LP plumbing
    def _system(self):
        a_ub = [[-x for x in a] for a, _ in self.inequalities]
        b_ub = [-r for _, r in self.inequalities]
        a_eq = [list(a) for a, _ in self.equalities]
        b_eq = [r for _, r in self.equalities]
        return a_ub, b_ub, a_eq, b_eq

    def optimize(self, objective: Sequence) -> lp.LPResult:
        a_ub, b_ub, a_eq, b_eq = self._system()
        return lp.maximize(objective, a_ub, b_ub, a_eq, b_eq, self.n)

    def minimum(self, objective: Sequence) -> Optional[Fraction]:
        """Minimum of a linear form, ``None`` if unbounded below (raises if empty)."""
        res = self.optimize([-Fraction(x) for x in objective])
        if res.status == lp.INFEASIBLE:
            raise ValueError("empty polyhedron")
        return None if res.status == lp.UNBOUNDED else -res.value

    def maximum(self, objective: Sequence) -> Optional[Fraction]:
        res = self.optimize(objective)
        if res.status == lp.INFEASIBLE:
            raise ValueError("empty polyhedron")
        return None if res.status == lp.UNBOUNDED else res.value

    @cached_property
    def is_empty(self) -> bool:
        return self.optimize([0] * self.n).status == lp.INFEASIBLE

    @cached_property
    def implicit_equalities(self) -> tuple[int, ...]:
        """Indices of inequalities that hold with equality on the whole polyhedron."""
        if self.is_empty:
            return tuple(range(len(self.inequalities)))
        tight = []
        for i, (a, r) in enumerate(self.inequalities):
            top = self.maximum(a)
            if top is not None and top == r:
                tight.append(i)
        return tuple(tight)

    @cached_property
    def hull_normals(self) -> tuple[tuple[int, ...], ...]:
        normals = [a for a, _ in self.equalities]
        normals += [self.inequalities[i][0] for i in self.implicit_equalities]
        return tuple(normals)

    @cached_property
    def dimension(self):
        if self.is_empty:
            return Empty
        normals = self.hull_normals
        return self.n - (rank(normals, self.n) if normals else 0)

    @cached_property
    def tangent_lattice(self) -> Lattice:
        """Integer points of the linear space parallel to the affine hull."""
        if not self.hull_normals:
            return Lattice([[int(i == j) for j in range(self.n)] for i in range(self.n)], self.n)
        return Lattice(integer_kernel(self.hull_normals, self.n), self.n)

    @cached_property
    def relative_interior_point(self) -> tuple[Fraction, ...]:
        if self.is_empty:
            raise ValueError("empty polyhedron")
        implicit = set(self.implicit_equalities)
        # variables (q, t): maximize t with <a,q> - r >= t on the loose inequalities, t <= 1
        n = self.n
        a_ub, b_ub = [], []
        for i, (a, r) in enumerate(self.inequalities):
            if i in implicit:
                continue
            a_ub.append([-x for x in a] + [1])
            b_ub.append(-r)
        a_ub.append([0] * n + [1])
        b_ub.append(1)
        a_eq = [list(a) + [0] for a in self.hull_normals]
        b_eq = [r for _, r in self.equalities] + [self.inequalities[i][1] for i in self.implicit_equalities]
        res = lp.maximize([0] * n + [1], a_ub, b_ub, a_eq, b_eq, n + 1)
        if res.status != lp.OPTIMAL or res.value <= 0 and len(a_ub) > 1:
            raise ArithmeticError("failed to locate a relative interior point")
        return res.point[:n]

    # set operations
    def contains_point(self, q: Sequence) -> bool:
        q = [Fraction(x) for x in q]
        ok = all(sum((x * y for x, y in zip(a, q)), Fraction(0)) >= r for a, r in self.inequalities)
        return ok and all(sum((x * y for x, y in zip(a, q)), Fraction(0)) == r for a, r in self.equalities)

    def contains(self, other: "RationalPolyhedron") -> bool:
        if other.is_empty:
            return True
        for a, r in self.inequalities:
            low = other.minimum(a)
            if low is None or low < r:
                return False
        for a, r in self.equalities:
            low, high = other.minimum(a), other.maximum(a)
            if low is None or high is None or low != r or high != r:
                return False
        return True

    def same_set(self, other: "RationalPolyhedron") -> bool:
        return self.contains(other) and other.contains(self)

    def intersection(self, other: "RationalPolyhedron") -> "RationalPolyhedron":
        return RationalPolyhedron(
            self.n, self.inequalities + other.inequalities, self.equalities + other.equalities
        )

    def tighten(self, indices: Sequence[int]) -> "RationalPolyhedron":
        """Face obtained by turning the listed inequalities into equalities."""
        chosen = set(indices)
        ineq = [c for i, c in enumerate(self.inequalities) if i not in chosen]
        eq = list(self.equalities) + [self.inequalities[i] for i in sorted(chosen)]
        return RationalPolyhedron(self.n, ineq, eq)

    def recession_cone(self) -> "RationalPolyhedron":
        return RationalPolyhedron(
            self.n, [(a, 0) for a, _ in self.inequalities], [(a, 0) for a, _ in self.equalities]
        )

    def is_bounded(self) -> bool:
        return self.recession_cone().dimension == 0

    def is_face_of(self, cell: "RationalPolyhedron") -> bool:
        """True when this nonempty subset of ``cell`` is a face of ``cell``."""
        if self.is_empty or not cell.contains(self):
            return False
        tight = [i for i, (a, r) in enumerate(cell.inequalities) if self.maximum(a) == r]
        return self.contains(cell.tighten(tight))

    def facets(self) -> list["RationalPolyhedron"]:
        if self.is_empty:
            return []
        d = self.dimension
        implicit = set(self.implicit_equalities)
        found: list[RationalPolyhedron] = []
        for i in range(len(self.inequalities)):
            if i in implicit:
                continue
            face = self.tighten([i])
            if face.dimension == Empty or face.dimension != d - 1:
                continue
            if not any(face.same_set(other) for other in found):
                found.append(face)
        return found

    def reduced(self) -> "RationalPolyhedron":
        """Drop inequalities implied by the remaining constraints."""
        kept = list(self.inequalities)
        i = 0
        while i < len(kept):
            rest = RationalPolyhedron(self.n, kept[:i] + kept[i + 1:], self.equalities)
            a, r = kept[i]
            low = rest.minimum(a) if not rest.is_empty else r
            if low is not None and low >= r:
                kept.pop(i)
            else:
                i += 1
        return RationalPolyhedron(self.n, kept, self.equalities)


def dimension(p: RationalPolyhedron):
    return p.dimension


@dataclass(frozen=True)
class Cell:
    polyhedron: RationalPolyhedron
    weight: int = 1

    def __post_init__(self):
        if not isinstance(self.weight, int) or self.weight <= 0:
            raise ValueError("weights must be positive integers")

    @property
    def dimension(self):
        return self.polyhedron.dimension


@dataclass
class WeightedPolyhedralComplex:
    n: int
    cells: list[Cell] = field(default_factory=list)

    def top_dimension(self) -> int:
        dims = [c.dimension for c in self.cells if c.dimension is not Empty]
        return max(dims) if dims else -1

    def top_cells(self) -> list[int]:
        d = self.top_dimension()
        return [i for i, c in enumerate(self.cells) if c.dimension == d]

    def codim_one_facets(self) -> list[tuple[RationalPolyhedron, list[int]]]:
        """Facets of top cells, each with the indices of the top cells containing it."""
        groups: list[tuple[RationalPolyhedron, list[int]]] = []
        for i in self.top_cells():
            for face in self.cells[i].polyhedron.facets():
                for rep, members in groups:
                    if rep.same_set(face):
                        members.append(i)
                        break
                else:
                    groups.append((face, [i]))
        return groups


@dataclass(frozen=True)
class ComplexVerdict:
    valid: bool
    violations: tuple[tuple[int, int, str], ...] = ()


def validate_complex(c: WeightedPolyhedralComplex) -> ComplexVerdict:
    violations = []
    for i in range(len(c.cells)):
        for j in range(i + 1, len(c.cells)):
            p, q = c.cells[i].polyhedron, c.cells[j].polyhedron
            meet = p.intersection(q)
            if meet.is_empty:
                continue
            if p.same_set(q):
                violations.append((i, j, "duplicate cell"))
            elif not meet.is_face_of(p) or not meet.is_face_of(q):
                violations.append((i, j, "intersection is not a common face"))
    return ComplexVerdict(not violations, tuple(violations))


def _lattice_coordinates(basis: Sequence[Sequence[int]], vector: Sequence) -> list[Fraction]:
    rows = [[Fraction(b[k]) for b in basis] for k in range(len(vector))]
    coords = solve(rows, [Fraction(x) for x in vector], len(basis))
    if coords is None:
        raise ValueError("vector is not in the span of the basis")
    return coords


def _solve_unit(phi: Sequence[int]) -> list[int]:
    """Integer c with phi . c = 1 (phi primitive)."""
    coeffs = [0] * len(phi)
    g = 0
    for i, x in enumerate(phi):
        if x == 0:
            continue
        if g == 0:
            g = abs(x)
            coeffs[i] = 1 if x > 0 else -1
            continue
        g2, s, t = extended_gcd(g, x)
        coeffs = [s * c for c in coeffs]
        coeffs[i] = t
        g = g2
    if g != 1:
        raise ValueError("functional is not primitive")
    return coeffs


def primitive_transverse_vectors(
    facet: RationalPolyhedron, cells: Sequence[RationalPolyhedron]
) -> list[tuple[int, ...]]:
    """Generator of T_Z(V) / T_Z(W) pointing from the facet into each cell."""
    out = []
    w_lattice = facet.tangent_lattice
    if facet.is_empty:
        raise NotAFacet("empty facet")
    for cell in cells:
        if cell.is_empty or facet.dimension != cell.dimension - 1 or not facet.is_face_of(cell):
            raise NotAFacet(f"{facet!r} is not a facet of {cell!r}")
        v_basis = [list(b) for b in cell.tangent_lattice.basis]
        k = len(v_basis)
        coords_w = [_lattice_coordinates(v_basis, b) for b in w_lattice.basis]
        phi_candidates = integer_kernel(coords_w, k) if coords_w else integer_kernel([], k)
        if len(phi_candidates) != 1:
            raise NotAFacet("facet lattice does not have corank one")
        phi = phi_candidates[0]
        c = _solve_unit(phi)
        v = [sum(ci * b[t] for ci, b in zip(c, v_basis)) for t in range(cell.n)]
        inward = [x - y for x, y in zip(cell.relative_interior_point, facet.relative_interior_point)]
        side = sum(p * x for p, x in zip(phi, _lattice_coordinates(v_basis, inward)))
        if side < 0:
            v = [-x for x in v]
        out.append(w_lattice.reduce(v))
    return out


@dataclass(frozen=True)
class BalancingVerdict:
    balanced: bool
    defects: tuple[tuple[RationalPolyhedron, tuple[int, ...]], ...] = ()


def balancing_check(c: WeightedPolyhedralComplex) -> BalancingVerdict:
    defects = []
    for facet, members in c.codim_one_facets():
        vectors = primitive_transverse_vectors(facet, [c.cells[i].polyhedron for i in members])
        total = [0] * c.n
        for i, v in zip(members, vectors):
            total = [t + c.cells[i].weight * x for t, x in zip(total, v)]
        reduced = facet.tangent_lattice.reduce(total)
        if any(reduced):
            defects.append((facet, reduced))
    return BalancingVerdict(not defects, tuple(defects))


def ray(base: Sequence, direction: Sequence) -> RationalPolyhedron:
    """The ray ``base + t * direction`` (t >= 0) as a polyhedron."""
    n = len(base)
    base = [Fraction(x) for x in base]
    d = primitive(direction)
    normals = integer_kernel([d], n)
    eqs = [(a, sum(x * y for x, y in zip(a, base))) for a in normals]
    return RationalPolyhedron(n, [(d, sum(x * y for x, y in zip(d, base)))], eqs)


def segment(start: Sequence, end: Sequence) -> RationalPolyhedron:
    n = len(start)
    start = [Fraction(x) for x in start]
    end = [Fraction(x) for x in end]
    d = primitive([y - x for x, y in zip(start, end)])
    normals = integer_kernel([d], n)
    eqs = [(a, sum(x * y for x, y in zip(a, start))) for a in normals]
    lo = sum(x * y for x, y in zip(d, start))
    hi = sum(x * y for x, y in zip(d, end))
    return RationalPolyhedron(n, [(d, lo), ([-x for x in d], -hi)], eqs)


def point(coords: Sequence) -> RationalPolyhedron:
    n = len(coords)
    return RationalPolyhedron(
        n, [], [([int(i == j) for j in range(n)], Fraction(coords[i])) for i in range(n)]
    )
