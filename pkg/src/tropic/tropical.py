"""Min-plus tropical polynomials, corner loci and embedded tropical curves."""

from __future__ import annotations

import heapq
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional, Sequence

from .lattice import content, integer_kernel, primitive
from .linalg import rank
from .polyhedra import Cell, Empty, RationalPolyhedron, WeightedPolyhedralComplex, ray, segment

Vector = tuple[Fraction, ...]
Exponent = tuple[int, ...]


class ConstantPolynomial(ValueError):
    """A single-term polynomial has an empty corner locus."""

    def __init__(self, n: int):
        super().__init__("polynomial has a single term, its hypersurface is empty")
        self.hypersurface = WeightedPolyhedralComplex(n, [])


class InvalidCurve(ValueError):
    pass


class DisconnectedPath(ValueError):
    pass


class UnboundedEdgeInPath(ValueError):
    pass


class GenusNotOne(ValueError):
    pass


class AmbiguousCurve(ValueError):
    """A one-dimensional complex that cannot be read as a graph (e.g. a full line)."""


def _vec(values: Sequence) -> Vector:
    return tuple(Fraction(x) for x in values)


def _dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


class TropicalPolynomial:
    """``f(q) = min_alpha (a_alpha + <alpha, q>)`` with finite support."""

    def __init__(self, coefficients: Mapping[Sequence[int], object]):
        if not coefficients:
            raise ValueError("a tropical polynomial needs nonempty support")
        terms: dict[Exponent, Fraction] = {}
        for alpha, a in coefficients.items():
            key = tuple(int(x) for x in alpha)
            if key in terms:
                raise ValueError(f"duplicate exponent {key}")
            terms[key] = Fraction(a)
        lengths = {len(k) for k in terms}
        if len(lengths) != 1:
            raise ValueError("exponents must share one length")
        self.n = lengths.pop()
        self.coefficients: dict[Exponent, Fraction] = dict(sorted(terms.items()))

    @property
    def support(self) -> list[Exponent]:
        return list(self.coefficients)

    def __repr__(self):
        return f"TropicalPolynomial({self.coefficients})"

    def __eq__(self, other):
        return isinstance(other, TropicalPolynomial) and self.coefficients == other.coefficients


def trop_eval(f: TropicalPolynomial, q: Sequence) -> tuple[Fraction, frozenset[Exponent]]:
    values = {alpha: a + _dot(alpha, q) for alpha, a in f.coefficients.items()}
    best = min(values.values())
    return best, frozenset(alpha for alpha, v in values.items() if v == best)


def _achiever_cell(f: TropicalPolynomial, achievers: Sequence[Exponent]) -> RationalPolyhedron:
    base = achievers[0]
    a0 = f.coefficients[base]
    eqs = []
    for s in achievers[1:]:
        eqs.append(([x - y for x, y in zip(s, base)], a0 - f.coefficients[s]))
    ineqs = []
    for beta, b in f.coefficients.items():
        if beta in achievers:
            continue
        ineqs.append(([x - y for x, y in zip(beta, base)], a0 - b))
    return RationalPolyhedron(f.n, ineqs, eqs)


def dual_edge_length(points: Sequence[Exponent]) -> int:
    """Lattice length of the segment spanned by collinear lattice points."""
    best = 0
    for p, r in itertools.combinations(points, 2):
        best = max(best, content([x - y for x, y in zip(p, r)]))
    return best


@dataclass(frozen=True)
class HypersurfaceCell:
    achievers: frozenset
    polyhedron: RationalPolyhedron
    weight: int


def hypersurface_cells(f: TropicalPolynomial) -> list[HypersurfaceCell]:
    if len(f.coefficients) == 1:
        raise ConstantPolynomial(f.n)
    seen: dict[frozenset, HypersurfaceCell] = {}
    for alpha, beta in itertools.combinations(f.support, 2):
        cell = _achiever_cell(f, [alpha, beta])
        if cell.dimension is Empty or cell.dimension != f.n - 1:
            continue
        _, achievers = trop_eval(f, cell.relative_interior_point)
        if achievers in seen:
            continue
        ordered = sorted(achievers)
        poly = _achiever_cell(f, ordered).reduced()
        seen[achievers] = HypersurfaceCell(achievers, poly, dual_edge_length(ordered))
    return [seen[k] for k in sorted(seen, key=sorted)]


def hypersurface(f: TropicalPolynomial) -> WeightedPolyhedralComplex:
    """Corner locus of ``f`` with lattice-length weights on its facets."""
    cells = hypersurface_cells(f)
    return WeightedPolyhedralComplex(f.n, [Cell(c.polyhedron, c.weight) for c in cells])


# curves


@dataclass(frozen=True)
class Edge:
    """Bounded edge when ``head`` is set, otherwise a ray from ``tail``."""

    tail: int
    head: Optional[int]
    direction: tuple[int, ...]
    weight: int = 1

    @property
    def is_ray(self) -> bool:
        return self.head is None


@dataclass(frozen=True)
class Fan:
    rays: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        prims = tuple(tuple(primitive(r)) for r in self.rays)
        if len(set(prims)) != len(prims):
            raise ValueError("fan rays must be distinct")
        object.__setattr__(self, "rays", prims)


@dataclass(frozen=True)
class TropicalCurve:
    vertices: tuple[Vector, ...]
    edges: tuple[Edge, ...]

    def __init__(self, vertices: Sequence[Sequence], edges: Sequence):
        verts = tuple(_vec(v) for v in vertices)
        if not verts:
            raise InvalidCurve("a curve needs at least one vertex")
        n = len(verts[0])
        if any(len(v) != n for v in verts):
            raise InvalidCurve("vertex coordinates have mixed dimensions")
        clean = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            direction = tuple(int(Fraction(x)) for x in e.direction)
            if len(direction) != n or not any(direction) or content(direction) != 1:
                raise InvalidCurve(f"edge direction {e.direction} is not primitive")
            if not isinstance(e.weight, int) or e.weight <= 0:
                raise InvalidCurve("edge weights must be positive integers")
            if not 0 <= e.tail < len(verts) or (e.head is not None and not 0 <= e.head < len(verts)):
                raise InvalidCurve("edge references a missing vertex")
            if e.head is not None:
                if _stretch(verts[e.tail], verts[e.head], direction) is None:
                    raise InvalidCurve(
                        f"edge {e.tail}->{e.head} is not a positive multiple of {direction}"
                    )
            clean.append(Edge(e.tail, e.head, direction, e.weight))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(clean))
        if not self._connected():
            raise InvalidCurve("curve graph is disconnected")

    @property
    def n(self) -> int:
        return len(self.vertices[0])

    def bounded_edges(self) -> list[int]:
        return [i for i, e in enumerate(self.edges) if not e.is_ray]

    def rays(self) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.is_ray]

    def outgoing(self, v: int) -> list[tuple[int, tuple[int, ...], int]]:
        """(edge index, outgoing primitive direction, weight) at vertex ``v``."""
        out = []
        for i, e in enumerate(self.edges):
            if e.tail == v:
                out.append((i, e.direction, e.weight))
            if e.head == v:
                out.append((i, tuple(-x for x in e.direction), e.weight))
        return out

    def _connected(self) -> bool:
        adj = defaultdict(set)
        for e in self.edges:
            if e.head is not None:
                adj[e.tail].add(e.head)
                adj[e.head].add(e.tail)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == len(self.vertices)


def _stretch(start: Vector, end: Vector, direction: Sequence[int]) -> Optional[Fraction]:
    diff = [y - x for x, y in zip(start, end)]
    idx = next(i for i, d in enumerate(direction) if d)
    t = diff[idx] / direction[idx]
    if t <= 0 or any(dx != t * d for dx, d in zip(diff, direction)):
        return None
    return t


@dataclass(frozen=True)
class CurveVerdict:
    ok: bool
    offending: tuple = ()

    def __bool__(self):
        return self.ok


def is_balanced_curve(c: TropicalCurve) -> CurveVerdict:
    bad = []
    for v in range(len(c.vertices)):
        total = [0] * c.n
        for _, d, w in c.outgoing(v):
            total = [t + w * x for t, x in zip(total, d)]
        if any(total):
            bad.append((v, tuple(total)))
    return CurveVerdict(not bad, tuple(bad))


def minor_gcd(u: Sequence[int], v: Sequence[int]) -> int:
    g = 0
    for i, j in itertools.combinations(range(len(u)), 2):
        g = gcd(g, abs(u[i] * v[j] - u[j] * v[i]))
    return g


def is_smooth_curve(c: TropicalCurve) -> CurveVerdict:
    bad = []
    for v in range(len(c.vertices)):
        out = c.outgoing(v)
        if len(out) != 3:
            bad.append((v, f"valence {len(out)}"))
            continue
        reasons = []
        if any(w != 1 for _, _, w in out):
            reasons.append("weight other than 1")
        d1, d2, d3 = (tuple(w * x for x in d) for _, d, w in out)
        if any(a + b + x for a, b, x in zip(d1, d2, d3)):
            reasons.append("directions do not sum to zero")
        g = minor_gcd(d1, d2)
        if g != 1:
            reasons.append(f"lattice index {g}")
        if reasons:
            bad.append((v, "; ".join(reasons)))
    return CurveVerdict(not bad, tuple(bad))


def genus(c: TropicalCurve) -> int:
    return len(c.bounded_edges()) - len(c.vertices) + 1


def adapted_to_fan(c: TropicalCurve, fan: Fan) -> CurveVerdict:
    rays = set(fan.rays)
    bad = tuple(i for i in c.rays() if c.edges[i].direction not in rays)
    return CurveVerdict(not bad, bad)


def edge_length(c: TropicalCurve, index: int) -> Fraction:
    e = c.edges[index]
    if e.is_ray:
        raise UnboundedEdgeInPath(f"edge {index} is a ray")
    return _stretch(c.vertices[e.tail], c.vertices[e.head], e.direction)


def affine_length(c: TropicalCurve, path: Sequence[int]) -> Fraction:
    """Sum of lattice stretch factors along a connected path of bounded edges."""
    if not path:
        return Fraction(0)
    for i in path:
        if c.edges[i].is_ray:
            raise UnboundedEdgeInPath(f"edge {i} is a ray")
    total = Fraction(0)
    first = c.edges[path[0]]
    if len(path) == 1:
        return edge_length(c, path[0])
    nxt = c.edges[path[1]]
    shared = {first.tail, first.head} & {nxt.tail, nxt.head}
    if not shared:
        raise DisconnectedPath(f"edges {path[0]} and {path[1]} do not meet")
    end = min(shared)
    current = first.tail if end == first.head else first.head
    for i in path:
        e = c.edges[i]
        if current == e.tail:
            current = e.head
        elif current == e.head:
            current = e.tail
        else:
            raise DisconnectedPath(f"edge {i} does not continue the path")
        total += edge_length(c, i)
    return total


class Spacing(Enum):
    WELL_SPACED = "WellSpaced"
    NOT_WELL_SPACED = "NotWellSpaced"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class SpacingVerdict:
    status: Spacing
    distances: tuple[tuple[int, Fraction], ...] = ()
    cycle: tuple[int, ...] = ()
    reason: str = ""


def cycle_edges(c: TropicalCurve) -> list[int]:
    """Bounded edges on cycles (the 2-core of the bounded-edge graph)."""
    alive = set(c.bounded_edges())
    while True:
        degree = defaultdict(int)
        for i in alive:
            degree[c.edges[i].tail] += 1
            degree[c.edges[i].head] += 1
        leaves = {i for i in alive if degree[c.edges[i].tail] == 1 or degree[c.edges[i].head] == 1}
        if not leaves:
            return sorted(alive)
        alive -= leaves


def well_spaced(c: TropicalCurve, normal: Sequence, rhs) -> SpacingVerdict:
    """Exit-distance test for a genus-one curve whose cycle lies in ``<normal, q> = rhs``."""
    g = genus(c)
    if g != 1:
        raise GenusNotOne(f"curve has genus {g}")
    rhs = Fraction(rhs)
    in_h = [(_dot(normal, p) == rhs) for p in c.vertices]

    def edge_in_h(e: Edge) -> bool:
        if e.is_ray:
            return in_h[e.tail] and _dot(normal, e.direction) == 0
        return in_h[e.tail] and in_h[e.head]

    cyc = cycle_edges(c)
    cycle_vertices = sorted({c.edges[i].tail for i in cyc} | {c.edges[i].head for i in cyc})
    if not all(in_h[v] for v in cycle_vertices):
        return SpacingVerdict(Spacing.NOT_APPLICABLE, cycle=tuple(cyc), reason="cycle not in hyperplane")
    # Dijkstra from the cycle inside V intersect H
    dist: dict[int, Fraction] = {v: Fraction(0) for v in cycle_vertices}
    heap = [(Fraction(0), v) for v in cycle_vertices]
    heapq.heapify(heap)
    done = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for i, _, _ in sorted(c.outgoing(v)):
            e = c.edges[i]
            if e.is_ray or not edge_in_h(e):
                continue
            w = e.head if e.tail == v else e.tail
            nd = d + edge_length(c, i)
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    exits = []
    for v in sorted(done):
        if any(not edge_in_h(c.edges[i]) for i, _, _ in c.outgoing(v)):
            exits.append((v, dist[v]))
    if not exits:
        return SpacingVerdict(
            Spacing.NOT_APPLICABLE, cycle=tuple(cyc), reason="component never leaves the hyperplane"
        )
    low = min(d for _, d in exits)
    hits = sum(1 for _, d in exits if d == low)
    status = Spacing.WELL_SPACED if hits >= 2 else Spacing.NOT_WELL_SPACED
    return SpacingVerdict(status, tuple(exits), tuple(cyc))


def deformation_matrix(c: TropicalCurve) -> tuple[list[list[Fraction]], int]:
    """Matrix of the deformation map and its domain dimension.

    Domain: R^n per vertex, then (n-1) normal coordinates per ray leaf.
    Codomain: (n-1) normal coordinates per edge (bounded or ray).
    """
    n = c.n
    nv = len(c.vertices)
    ray_list = c.rays()
    leaf_offset = {r: nv * n + k * (n - 1) for k, r in enumerate(ray_list)}
    domain = nv * n + len(ray_list) * (n - 1)
    rows = []
    for i, e in enumerate(c.edges):
        normals = integer_kernel([e.direction], n)
        for k, a in enumerate(normals):
            row = [Fraction(0)] * domain
            for j in range(n):
                row[e.tail * n + j] += a[j]
            if e.is_ray:
                row[leaf_offset[i] + k] -= 1
            else:
                for j in range(n):
                    row[e.head * n + j] -= a[j]
            rows.append(row)
    return rows, domain


def deformation_ranks(c: TropicalCurve) -> tuple[int, int]:
    rows, domain = deformation_matrix(c)
    return domain - (rank(rows, domain) if rows else 0), genus(c)


def curve_from_complex(c: WeightedPolyhedralComplex) -> TropicalCurve:
    """Read a complex of one-dimensional cells as an embedded graph."""
    if c.top_dimension() != 1:
        raise AmbiguousCurve("complex is not one-dimensional")
    vertices: list[Vector] = []

    def vertex_index(p: Vector) -> int:
        if p not in vertices:
            vertices.append(p)
        return vertices.index(p)

    pending = []
    for i in c.top_cells():
        cell = c.cells[i]
        poly = cell.polyhedron
        (d,) = poly.tangent_lattice.basis
        base = poly.relative_interior_point
        lo, hi = None, None
        for a, r in poly.inequalities:
            slope = _dot(a, d)
            if slope == 0:
                continue
            t = (r - _dot(a, base)) / slope
            if slope > 0:
                lo = t if lo is None else max(lo, t)
            else:
                hi = t if hi is None else min(hi, t)
        if lo is None and hi is None:
            raise AmbiguousCurve(f"cell {i} is a full line without vertices")
        if lo is not None and hi is not None:
            start = tuple(x + lo * y for x, y in zip(base, d))
            end = tuple(x + hi * y for x, y in zip(base, d))
            pending.append((vertex_index(start), vertex_index(end), tuple(d), cell.weight))
        elif lo is not None:
            start = tuple(x + lo * y for x, y in zip(base, d))
            pending.append((vertex_index(start), None, tuple(d), cell.weight))
        else:
            start = tuple(x + hi * y for x, y in zip(base, d))
            pending.append((vertex_index(start), None, tuple(-x for x in d), cell.weight))
    return TropicalCurve(vertices, [Edge(*p) for p in pending])


def curve_to_complex(c: TropicalCurve) -> WeightedPolyhedralComplex:
    """Edges as weighted segments and rays."""
    cells = []
    for e in c.edges:
        if e.is_ray:
            poly = ray(c.vertices[e.tail], e.direction)
        else:
            poly = segment(c.vertices[e.tail], c.vertices[e.head])
        cells.append(Cell(poly, e.weight))
    return WeightedPolyhedralComplex(c.n, cells)
