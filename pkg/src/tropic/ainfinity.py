"""Gapped filtered A-infinity algebras and bimodules with exact coefficients.

Structure maps are stored sparsely as ``(arity, level, inputs) -> combination``
where ``level`` is the energy of the term (the exponent of ``T``) and
``combination`` maps output basis names to rationals.  Elements of the
algebra tensored with the Novikov ring are dictionaries ``(level, name) ->
coefficient``.  Everything is truncated modulo ``T^emax``: levels ``>= emax``
are discarded.

Signs follow the shifted-degree convention: applying an inner operation after
the inputs ``x_1..x_j`` costs ``(-1)^(j + deg x_1 + ... + deg x_j)``.
"""

from __future__ import annotations

import itertools
import re
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .linalg import nullspace, rank, solve
from .novikov import format_rational

Combination = dict[str, Fraction]
Element = dict[tuple[Fraction, str], Fraction]
AlgebraKey = tuple[int, Fraction, tuple[str, ...]]
ModuleKey = tuple[int, int, Fraction, tuple[str, ...], str, tuple[str, ...]]

DEFAULT_EMAX = Fraction(10)
DEFAULT_ARITY_BOUND = 4

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class HypothesisFailed(ValueError):
    def __init__(self, hypothesis: str, detail: str = ""):
        super().__init__(f"hypothesis {hypothesis} failed: {detail}" if detail else f"hypothesis {hypothesis} failed")
        self.hypothesis = hypothesis
        self.detail = detail


class NotAnIdeal(ValueError):
    pass


class NotDeforming(ValueError):
    """A cochain that is not of degree one with positive valuation."""


@dataclass(frozen=True)
class ObstructionReport:
    level: Fraction
    defect: tuple[tuple[str, Fraction], ...]
    closed: bool


class Obstructed(ArithmeticError):
    def __init__(self, report: ObstructionReport):
        names = " + ".join(f"{format_rational(c)}*{n}" for n, c in report.defect)
        super().__init__(f"obstruction at level {format_rational(report.level)}: class of {names}")
        self.report = report


# elements


def basis_element(name: str, level=0, coeff=1) -> Element:
    return {(Fraction(level), name): Fraction(coeff)}


def add_elements(*elements: Element, emax=None) -> Element:
    out: dict[tuple[Fraction, str], Fraction] = defaultdict(Fraction)
    for el in elements:
        for key, c in el.items():
            out[key] += c
    return {k: v for k, v in sorted(out.items()) if v != 0 and (emax is None or k[0] < emax)}


def scale_element(el: Element, factor) -> Element:
    factor = Fraction(factor)
    return {k: v * factor for k, v in el.items() if v * factor != 0}


def shift_element(el: Element, level) -> Element:
    level = Fraction(level)
    return {(lvl + level, n): c for (lvl, n), c in el.items()}


def element_valuation(el: Element):
    return min((lvl for (lvl, _), c in el.items() if c != 0), default=None)


def element_level(el: Element, level) -> Combination:
    level = Fraction(level)
    return {n: c for (lvl, n), c in el.items() if lvl == level and c != 0}


def _clean(comb: Mapping[str, object]) -> Combination:
    return {n: Fraction(c) for n, c in sorted(comb.items()) if Fraction(c) != 0}


@dataclass(frozen=True)
class EnergyMonoid:
    """Monoid of energies generated by finitely many positive rationals."""

    generators: tuple[Fraction, ...]

    def __post_init__(self):
        gens = tuple(sorted({Fraction(g) for g in self.generators}))
        if any(g <= 0 for g in gens):
            raise ValueError("energy generators must be positive")
        object.__setattr__(self, "generators", gens)

    def levels(self, emax) -> list[Fraction]:
        emax = Fraction(emax)
        found = {Fraction(0)}
        frontier = [Fraction(0)]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = x + g
                    if y < emax and y not in found:
                        found.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(found)


class GappedAlgebra:
    def __init__(
        self,
        basis: Mapping[str, int],
        terms: Mapping[Sequence, Mapping[str, object]] = (),
        emax=DEFAULT_EMAX,
    ):
        self.emax = Fraction(emax)
        self.basis: dict[str, int] = {}
        for name, deg in basis.items():
            if not _NAME.match(name):
                raise ValueError(f"invalid basis name {name!r}")
            self.basis[name] = int(deg)
        store: dict[AlgebraKey, Combination] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, comb in items:
            k, level, inputs = key
            k, level, inputs = int(k), Fraction(level), tuple(inputs)
            if len(inputs) != k:
                raise ValueError(f"term {key} has arity {k} but {len(inputs)} inputs")
            if level < 0:
                raise ValueError("energy levels are nonnegative")
            if k == 0 and level == 0:
                raise ValueError("a gapped algebra has no level-0 curvature")
            if level >= self.emax:
                continue
            comb = _clean(comb)
            expected = sum(self.basis[x] for x in inputs) + 2 - k
            for out in comb:
                if self.basis[out] != expected:
                    raise ValueError(f"term {key} -> {out} breaks the degree rule")
            if comb:
                merged = add_elements(
                    {(Fraction(0), n): c for n, c in store.get((k, level, inputs), {}).items()},
                    {(Fraction(0), n): c for n, c in comb.items()},
                )
                store[(k, level, inputs)] = {n: c for (_, n), c in merged.items()}
                if not store[(k, level, inputs)]:
                    del store[(k, level, inputs)]
        self.terms: dict[AlgebraKey, Combination] = dict(sorted(store.items()))
        index: dict[tuple[int, tuple[str, ...]], list[tuple[Fraction, Combination]]] = defaultdict(list)
        for (k, level, inputs), comb in self.terms.items():
            index[(k, inputs)].append((level, comb))
        self._index = dict(index)
        self.max_arity = max((k for k, _, _ in self.terms), default=0)

    def __eq__(self, other):
        return (
            isinstance(other, GappedAlgebra)
            and self.basis == other.basis
            and self.terms == other.terms
            and self.emax == other.emax
        )

    def __repr__(self):
        return f"GappedAlgebra(basis={self.basis}, terms={len(self.terms)}, emax={self.emax})"

    def degree_part(self, degree: int) -> list[str]:
        return [n for n, d in self.basis.items() if d == degree]

    def apply(self, elements: Sequence[Element]) -> Element:
        """``m^k(x_1, ..., x_k)`` on elements, truncated at ``emax``."""
        k = len(elements)
        out: dict[tuple[Fraction, str], Fraction] = defaultdict(Fraction)
        supports = [list(el.items()) for el in elements]
        for combo in itertools.product(*supports):
            names = tuple(n for (_, n), _ in combo)
            stored = self._index.get((k, names))
            if not stored:
                continue
            base_level = sum((lvl for (lvl, _), _ in combo), Fraction(0))
            coeff = Fraction(1)
            for _, c in combo:
                coeff *= c
            for level, comb in stored:
                total = base_level + level
                if total >= self.emax:
                    continue
                for name, c in comb.items():
                    out[(total, name)] += coeff * c
        return {key: v for key, v in sorted(out.items()) if v != 0}

    def level_zero_matrix(self, source_degree: int) -> tuple[list[list[Fraction]], list[str], list[str]]:
        """Matrix of ``m^{1,0}`` from degree ``d`` to ``d+1`` (rows: targets)."""
        src = self.degree_part(source_degree)
        tgt = self.degree_part(source_degree + 1)
        mat = [[Fraction(0)] * len(src) for _ in tgt]
        for j, s in enumerate(src):
            for name, c in self.terms.get((1, Fraction(0), (s,)), {}).items():
                mat[tgt.index(name)][j] += c
        return mat, src, tgt


def curvature(A: GappedAlgebra) -> Element:
    return A.apply([])


def _sign(inputs_degrees: Sequence[int]) -> int:
    return -1 if (len(inputs_degrees) + sum(inputs_degrees)) % 2 else 1


@dataclass(frozen=True)
class Violation:
    arity: int
    inputs: tuple[str, ...]
    defect: tuple[tuple[Fraction, str, Fraction], ...]


def relation_defect(A: GappedAlgebra, inputs: Sequence[str]) -> Element:
    k = len(inputs)
    els = [basis_element(x) for x in inputs]
    degs = [A.basis[x] for x in inputs]
    total: list[Element] = []
    for j1 in range(k + 1):
        for j in range(k - j1 + 1):
            inner = A.apply(els[j1:j1 + j])
            if not inner:
                continue
            outer = A.apply(els[:j1] + [inner] + els[j1 + j:])
            if outer:
                total.append(scale_element(outer, _sign(degs[:j1])))
    return add_elements(*total, emax=A.emax)


def check_relations(A: GappedAlgebra, arity_bound: int = DEFAULT_ARITY_BOUND) -> list[Violation]:
    violations = []
    names = list(A.basis)
    for k in range(arity_bound + 1):
        for inputs in itertools.product(names, repeat=k):
            defect = relation_defect(A, inputs)
            if defect:
                violations.append(
                    Violation(k, tuple(inputs), tuple((lvl, n, c) for (lvl, n), c in defect.items()))
                )
    return violations


def validate_cochain(A: GappedAlgebra, d: Element) -> Element:
    cleaned = add_elements(d, emax=A.emax)
    for (level, name), _ in cleaned.items():
        if name not in A.basis:
            raise NotDeforming(f"unknown basis element {name}")
        if A.basis[name] != 1:
            raise NotDeforming(f"{name} has degree {A.basis[name]}, not 1")
        if level <= 0:
            raise NotDeforming("a deforming cochain needs positive valuation")
    return cleaned


def _convolve_step(
    partial: Mapping[Fraction, Fraction], entries: Sequence[tuple[Fraction, Fraction]], bound
) -> dict[Fraction, Fraction]:
    nxt: dict[Fraction, Fraction] = defaultdict(Fraction)
    entries = sorted(entries)
    for lvl, c in partial.items():
        room = bound - lvl
        for lvl2, c2 in entries:
            if lvl2 >= room:
                break
            nxt[lvl + lvl2] += c * c2
    return {k: v for k, v in nxt.items() if v != 0}


def _convolve_levels(
    names: Sequence[str], by_name: Mapping[str, list[tuple[Fraction, Fraction]]], bound
) -> dict[Fraction, Fraction]:
    """Level distribution of the product of cochain coefficients along ``names``, below ``bound``."""
    partial = {Fraction(0): Fraction(1)}
    for x in names:
        partial = _convolve_step(partial, by_name[x], bound)
        if not partial:
            break
    return partial


def deform(A: GappedAlgebra, d: Element) -> GappedAlgebra:
    """Algebra with products ``m^k_d = sum m^{k+l}(d..d, x_1, d..d, ..., x_k, d..d)``."""
    d = validate_cochain(A, d)
    by_name: dict[str, list[tuple[Fraction, Fraction]]] = defaultdict(list)
    for (level, name), c in d.items():
        by_name[name].append((level, c))
    new_terms: dict[AlgebraKey, dict[str, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    for (k_total, level, inputs), comb in A.terms.items():
        positions = range(k_total)
        for k in range(k_total + 1):
            for kept in itertools.combinations(positions, k):
                filled = [inputs[p] for p in positions if p not in kept]
                if any(x not in by_name for x in filled):
                    continue
                weights = _convolve_levels(filled, by_name, A.emax - level)
                key_inputs = tuple(inputs[p] for p in kept)
                for extra, coeff in weights.items():
                    key = (k, level + extra, key_inputs)
                    for name, c in comb.items():
                        new_terms[key][name] += coeff * c
    terms = {key: {n: c for n, c in comb.items() if c != 0} for key, comb in new_terms.items()}
    return GappedAlgebra(A.basis, {k: v for k, v in terms.items() if v}, A.emax)


# ideals and quotients


class IdealKind(Enum):
    NOT_IDEAL = "NotIdeal"
    WEAK = "WeakIdeal"
    STRONG = "StrongIdeal"


@dataclass(frozen=True)
class Ideal:
    """Span of ``generators`` plus, when ``positive``, every element of positive energy."""

    generators: frozenset = frozenset()
    positive: bool = False

    def __post_init__(self):
        object.__setattr__(self, "generators", frozenset(self.generators))

    def contains(self, level, name: str) -> bool:
        return name in self.generators or (self.positive and Fraction(level) > 0)


def positive_part() -> Ideal:
    return Ideal(frozenset(), True)


def ideal_check(ideal: Ideal, B: GappedAlgebra) -> IdealKind:
    unknown = ideal.generators - set(B.basis)
    if unknown:
        raise ValueError(f"unknown basis elements {sorted(unknown)}")
    for (k, level, inputs), comb in B.terms.items():
        if k == 0 or not any(x in ideal.generators for x in inputs):
            continue
        if any(not ideal.contains(level, out) for out in comb):
            return IdealKind.NOT_IDEAL
    for (level, name), _ in curvature(B).items():
        if not ideal.contains(level, name):
            return IdealKind.WEAK
    return IdealKind.STRONG


def quotient(B: GappedAlgebra, ideal: Ideal) -> GappedAlgebra:
    if ideal_check(ideal, B) is IdealKind.NOT_IDEAL:
        raise NotAnIdeal("subspace is not closed under the products")
    keep = [n for n in B.basis if n not in ideal.generators]
    terms = {}
    for (k, level, inputs), comb in B.terms.items():
        if ideal.positive and level > 0:
            continue
        if any(x not in keep for x in inputs):
            continue
        projected = {n: c for n, c in comb.items() if n in keep}
        if projected:
            terms[(k, level, inputs)] = projected
    return GappedAlgebra({n: B.basis[n] for n in keep}, terms, B.emax)


# bounding cochains


class SolveMode(Enum):
    LEMMA = "LemmaB"
    GENERIC = "Generic"


def _vector(comb: Combination, names: Sequence[str]) -> list[Fraction]:
    return [Fraction(comb.get(n, 0)) for n in names]


def _is_dga(C: GappedAlgebra) -> Optional[str]:
    for (k, level, inputs), comb in C.terms.items():
        if k >= 3:
            return f"nonzero higher product m^{k}"
        if k == 0:
            return "nonzero curvature"
        if k == 1 and level != 0:
            return "differential has energy corrections"
        if k == 2:
            x, y = inputs
            dx, dy = C.basis[x], C.basis[y]
            sign = -1 if (dx * dy + dx + dy) % 2 else 1
            swapped = C.terms.get((2, level, (y, x)), {})
            for name in set(comb) | set(swapped):
                if comb.get(name, 0) != sign * swapped.get(name, 0):
                    return f"product of {x} and {y} is not graded commutative"
    return None


def connecting_map_surjects(B: GappedAlgebra, ideal: Ideal) -> bool:
    """H^1 of the level-0 quotient complex onto H^2 of the level-0 ideal complex."""
    if ideal.positive:
        return True
    a1 = [n for n in B.degree_part(1) if n in ideal.generators]
    a2 = [n for n in B.degree_part(2) if n in ideal.generators]
    c1 = [n for n in B.degree_part(1) if n not in ideal.generators]
    c2 = [n for n in B.degree_part(2) if n not in ideal.generators]
    b3 = B.degree_part(3)

    def d(name: str) -> Combination:
        return B.terms.get((1, Fraction(0), (name,)), {})

    # closed quotient cochains: C-components of d(c) vanish
    if c1:
        z_rows = [[d(c).get(t, Fraction(0)) for c in c1] for t in c2]
        closed = nullspace(z_rows, len(c1)) if z_rows else [
            [Fraction(int(i == j)) for j in range(len(c1))] for i in range(len(c1))
        ]
    else:
        closed = []
    images = []
    for z in closed:
        image = defaultdict(Fraction)
        for coeff, c in zip(z, c1):
            for t, v in d(c).items():
                image[t] += coeff * v
        images.append([image.get(t, Fraction(0)) for t in a2])
    for a in a1:
        images.append([d(a).get(t, Fraction(0)) for t in a2])
    d2_rows = [[d(a).get(t, Fraction(0)) for a in a2] for t in b3]
    cocycle_dim = len(a2) - (rank(d2_rows, len(a2)) if d2_rows and a2 else 0)
    span = rank(images, len(a2)) if images and a2 else 0
    return span == cocycle_dim


def solve_bounding_cochain(
    B: GappedAlgebra,
    ideal: Optional[Ideal] = None,
    mode: SolveMode = SolveMode.GENERIC,
    trace: Optional[list] = None,
    max_steps: int = 1000,
) -> Element:
    """Degree-one ``b`` of positive valuation with ``curvature(deform(B, b)) = 0 mod T^emax``."""
    if mode is SolveMode.LEMMA:
        if ideal is None:
            raise HypothesisFailed("(i)", "an ideal is required")
        if ideal_check(ideal, B) is not IdealKind.STRONG:
            raise HypothesisFailed("(i)", "the subspace is not a strong ideal")
        problem = _is_dga(quotient(B, ideal))
        if problem:
            raise HypothesisFailed("(ii)", f"quotient is not a graded commutative DGA: {problem}")
        if not connecting_map_surjects(B, ideal):
            raise HypothesisFailed("(iii)", "connecting map H^1 -> H^2 does not surject")
    mat, src, tgt = B.level_zero_matrix(1)
    b: Element = {}
    processed = None
    for _ in range(max_steps):
        kappa = curvature(deform(B, b)) if b else curvature(B)
        lam = element_valuation(kappa)
        if processed is not None and trace is not None:
            trace.append((processed, lam))
        if lam is None:
            return b
        if processed is not None and lam <= processed:
            raise ArithmeticError("curvature valuation failed to increase")
        defect = element_level(kappa, lam)
        if mode is SolveMode.LEMMA and any(not ideal.contains(lam, n) for n in defect):
            raise HypothesisFailed("(ii)", f"curvature left the ideal at level {lam}")
        rhs = [-c for c in _vector(defect, tgt)]
        x = solve(mat, rhs, len(src)) if tgt else [Fraction(0)] * len(src)
        if x is None or any(n not in tgt for n in defect):
            closed = all(v == 0 for v in _apply_level_zero_d(B, defect).values())
            raise Obstructed(ObstructionReport(lam, tuple(sorted(defect.items())), closed))
        b = add_elements(b, {(lam, n): c for n, c in zip(src, x) if c != 0}, emax=B.emax)
        processed = lam
    raise ArithmeticError("bounding cochain solver did not terminate")


def _apply_level_zero_d(B: GappedAlgebra, comb: Combination) -> Combination:
    out = defaultdict(Fraction)
    for name, c in comb.items():
        for t, v in B.terms.get((1, Fraction(0), (name,)), {}).items():
            out[t] += c * v
    return {n: v for n, v in out.items() if v != 0}


# bimodules


class GappedBimodule:
    """Module maps ``m^{k1|1|k2}(a_1..a_k1, m, b_1..b_k2)`` over a left and a right algebra."""

    def __init__(
        self,
        left: GappedAlgebra,
        right: GappedAlgebra,
        basis: Mapping[str, int],
        terms: Mapping[Sequence, Mapping[str, object]] = (),
        emax=None,
    ):
        self.left = left
        self.right = right
        self.emax = Fraction(emax) if emax is not None else min(left.emax, right.emax)
        self.basis = {n: int(d) for n, d in basis.items()}
        for n in self.basis:
            if not _NAME.match(n):
                raise ValueError(f"invalid basis name {n!r}")
        store: dict[ModuleKey, Combination] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, comb in items:
            k1, k2, level, a_in, m_in, b_in = key
            k1, k2, level = int(k1), int(k2), Fraction(level)
            a_in, b_in = tuple(a_in), tuple(b_in)
            if len(a_in) != k1 or len(b_in) != k2:
                raise ValueError(f"term {key} has inconsistent arity")
            if level < 0:
                raise ValueError("energy levels are nonnegative")
            if level >= self.emax:
                continue
            comb = _clean(comb)
            expected = (
                sum(left.basis[x] for x in a_in)
                + self.basis[m_in]
                + sum(right.basis[x] for x in b_in)
                + 1
                - k1
                - k2
            )
            for out in comb:
                if self.basis[out] != expected:
                    raise ValueError(f"module term {key} -> {out} breaks the degree rule")
            if comb:
                store[(k1, k2, level, a_in, m_in, b_in)] = comb
        self.terms: dict[ModuleKey, Combination] = dict(sorted(store.items()))
        index = defaultdict(list)
        for (k1, k2, level, a_in, m_in, b_in), comb in self.terms.items():
            index[(a_in, m_in, b_in)].append((level, comb))
        self._index = dict(index)

    def __eq__(self, other):
        return (
            isinstance(other, GappedBimodule)
            and self.left == other.left
            and self.right == other.right
            and self.basis == other.basis
            and self.terms == other.terms
            and self.emax == other.emax
        )

    def apply(self, left_inputs: Sequence[Element], m: Element, right_inputs: Sequence[Element]) -> Element:
        out: dict[tuple[Fraction, str], Fraction] = defaultdict(Fraction)
        supports = [list(el.items()) for el in left_inputs] + [list(m.items())] + [
            list(el.items()) for el in right_inputs
        ]
        k1 = len(left_inputs)
        for combo in itertools.product(*supports):
            names = tuple(n for (_, n), _ in combo)
            key = (names[:k1], names[k1], names[k1 + 1:])
            stored = self._index.get(key)
            if not stored:
                continue
            base_level = sum((lvl for (lvl, _), _ in combo), Fraction(0))
            coeff = Fraction(1)
            for _, c in combo:
                coeff *= c
            for level, comb in stored:
                total = base_level + level
                if total >= self.emax:
                    continue
                for name, c in comb.items():
                    out[(total, name)] += coeff * c
        return {k: v for k, v in sorted(out.items()) if v != 0}


def bimodule_relation_defect(
    M: GappedBimodule, left_inputs: Sequence[str], m: str, right_inputs: Sequence[str]
) -> Element:
    k1 = len(left_inputs)
    seq = [basis_element(x) for x in left_inputs] + [basis_element(m)] + [
        basis_element(x) for x in right_inputs
    ]
    degs = (
        [M.left.basis[x] for x in left_inputs]
        + [M.basis[m]]
        + [M.right.basis[x] for x in right_inputs]
    )
    n = len(seq)
    total = []
    for s in range(n + 1):
        for j in range(n - s + 1):
            block = seq[s:s + j]
            if s <= k1 < s + j:
                inner = M.apply(block[: k1 - s], block[k1 - s], block[k1 - s + 1:])
                if not inner:
                    continue
                outer = M.apply(seq[:s], inner, seq[s + j:])
            elif s + j <= k1:
                inner = M.left.apply(block)
                if not inner:
                    continue
                new_left = seq[:s] + [inner] + seq[s + j:k1]
                outer = M.apply(new_left, seq[k1], seq[k1 + 1:])
            else:
                inner = M.right.apply(block)
                if not inner:
                    continue
                new_right = seq[k1 + 1:s] + [inner] + seq[s + j:]
                outer = M.apply(seq[:k1], seq[k1], new_right)
            if outer:
                total.append(scale_element(outer, _sign(degs[:s])))
    return add_elements(*total, emax=M.emax)


@dataclass(frozen=True)
class ModuleViolation:
    left_inputs: tuple[str, ...]
    module_input: str
    right_inputs: tuple[str, ...]
    defect: tuple[tuple[Fraction, str, Fraction], ...]


def check_bimodule_relations(M: GappedBimodule, arity_bound: int = 3) -> list[ModuleViolation]:
    violations = []
    for k1 in range(arity_bound + 1):
        for k2 in range(arity_bound + 1 - k1):
            for a_in in itertools.product(list(M.left.basis), repeat=k1):
                for b_in in itertools.product(list(M.right.basis), repeat=k2):
                    for m in M.basis:
                        defect = bimodule_relation_defect(M, a_in, m, b_in)
                        if defect:
                            violations.append(
                                ModuleViolation(
                                    tuple(a_in), m, tuple(b_in),
                                    tuple((lvl, n, c) for (lvl, n), c in defect.items()),
                                )
                            )
    return violations


def deformed_module_differential(M: GappedBimodule, a: Element, e: Element, bound=None) -> Element:
    """``m^{0|1|0}_{(A,a)|M|B}(e) = sum_k m^{k|1|0}(a, ..., a, e)`` below ``bound`` (default emax)."""
    bound = M.emax if bound is None else min(Fraction(bound), M.emax)
    a = validate_cochain(M.left, a) if a else {}
    by_name: dict[str, list[tuple[Fraction, Fraction]]] = defaultdict(list)
    for (level, name), c in a.items():
        by_name[name].append((level, c))
    cache: dict[tuple[str, ...], dict[Fraction, Fraction]] = {(): {Fraction(0): Fraction(1)}}

    def prefix_weights(names: tuple[str, ...]) -> dict[Fraction, Fraction]:
        if names not in cache:
            cache[names] = _convolve_step(prefix_weights(names[:-1]), by_name[names[-1]], bound)
        return cache[names]

    out: dict[tuple[Fraction, str], Fraction] = defaultdict(Fraction)
    for (k1, k2, level, a_in, m_in, b_in), comb in M.terms.items():
        if k2 != 0 or any(x not in by_name for x in a_in):
            continue
        for (e_level, e_name), e_coeff in e.items():
            if e_name != m_in:
                continue
            for extra, coeff in prefix_weights(a_in).items():
                total = level + e_level + extra
                if total >= bound:
                    continue
                for name, c in comb.items():
                    out[(total, name)] += e_coeff * coeff * c
    return {k: v for k, v in sorted(out.items()) if v != 0}


def _lowest_module_defect(M: GappedBimodule, a: Element, e: Element, start) -> Element:
    """Deformed differential below a window that widens until a nonzero level shows up."""
    width = Fraction(1)
    while True:
        bound = start + width
        defect = deformed_module_differential(M, a, e, bound)
        if defect or bound >= M.emax:
            return defect
        width *= 2


def solve_module_element(
    M: GappedBimodule, seed: str, trace: Optional[list] = None, max_steps: int = 1000
) -> tuple[Element, Element]:
    """Pair ``(a, e)`` with ``a`` bounding on the left algebra and ``m^{0|1|0}_{(A,a)}(e) = 0``."""
    A = M.left
    if curvature(A):
        raise HypothesisFailed("(ii)", "left algebra is curved")
    left_levels = [lvl for (k1, k2, lvl, _, _, _) in M.terms if k2 == 0]
    if not left_levels:
        return {}, basis_element(seed)
    lam0 = min(left_levels)
    if lam0 <= 0:
        raise HypothesisFailed("(i)", "module maps have a level-0 component")
    d_seed = M.basis[seed]
    targets = [n for n, d in M.basis.items() if d == d_seed + 1]
    sources = [n for n, d in M.basis.items() if d == d_seed]
    after = [n for n, d in M.basis.items() if d == d_seed + 2]
    a1 = A.degree_part(1)
    # leading maps at level lam0
    hook = [[Fraction(0)] * len(a1) for _ in targets]
    for j, y in enumerate(a1):
        for name, c in M.terms.get((1, 0, lam0, (y,), seed, ()), {}).items():
            hook[targets.index(name)][j] += c
    d0 = [[Fraction(0)] * len(sources) for _ in targets]
    for j, s in enumerate(sources):
        for name, c in M.terms.get((0, 0, lam0, (), s, ()), {}).items():
            d0[targets.index(name)][j] += c
    d1 = [[Fraction(0)] * len(targets) for _ in after]
    for j, s in enumerate(targets):
        for name, c in M.terms.get((0, 0, lam0, (), s, ()), {}).items():
            d1[after.index(name)][j] += c
    # closed left cochains at level zero
    da, _, _ = A.level_zero_matrix(1)
    closed_a = nullspace(da, len(a1)) if da and a1 else [
        [Fraction(int(i == j)) for j in range(len(a1))] for i in range(len(a1))
    ]
    hook_closed = [[sum(row[j] * z[j] for j in range(len(a1))) for z in closed_a] for row in hook]
    # hypothesis (ii): hook image plus leading boundaries cover leading cocycles
    cocycles = len(targets) - (rank(d1, len(targets)) if d1 and targets else 0)
    combined = [h + r for h, r in zip(hook_closed, d0)]
    span = rank([list(col) for col in zip(*combined)], len(targets)) if combined and combined[0] else 0
    if span < cocycles:
        raise HypothesisFailed("(ii)", "H^1 of the algebra does not surject onto the leading module cohomology")
    a: Element = {}
    e: Element = basis_element(seed)
    processed = None
    for _ in range(max_steps):
        defect = _lowest_module_defect(M, a, e, processed if processed is not None else lam0)
        level = element_valuation(defect)
        if processed is not None and trace is not None:
            trace.append((processed, level))
        if level is None:
            return a, e
        if processed is not None and level <= processed:
            raise ArithmeticError("module defect valuation failed to increase")
        comb = element_level(defect, level)
        vec = _vector(comb, targets)
        closed = not d1 or all(
            sum(row[j] * vec[j] for j in range(len(targets))) == 0 for row in d1
        )
        step = level - lam0
        if step <= 0 or not closed or any(n not in targets for n in comb):
            raise Obstructed(ObstructionReport(level, tuple(sorted(comb.items())), closed))
        x = solve(hook_closed, vec, len(closed_a)) if hook_closed else None
        e_corr = [Fraction(0)] * len(sources)
        if x is None:
            joint = solve(combined, vec, len(closed_a) + len(sources))
            if joint is None:
                raise Obstructed(ObstructionReport(level, tuple(sorted(comb.items())), closed))
            x, e_corr = joint[: len(closed_a)], joint[len(closed_a):]
        a_vec = [sum(x[i] * closed_a[i][j] for i in range(len(closed_a))) for j in range(len(a1))]
        a = add_elements(a, {(step, n): -c for n, c in zip(a1, a_vec) if c != 0}, emax=A.emax)
        e = add_elements(e, {(step, n): -c for n, c in zip(sources, e_corr) if c != 0}, emax=M.emax)
        if curvature(deform(A, a)):
            raise HypothesisFailed("(ii)", "left cochain is not bounding")
        processed = level
    raise ArithmeticError("module solver did not terminate")


# helpers building A-infinity structures from classical graded data


def from_dga(
    basis: Mapping[str, int],
    differential: Mapping[tuple[Fraction, str], Mapping[str, object]] = (),
    product: Mapping[tuple[Fraction, str, str], Mapping[str, object]] = (),
    curvature_terms: Mapping[Fraction, Mapping[str, object]] = (),
    emax=DEFAULT_EMAX,
) -> GappedAlgebra:
    """Shifted-sign structure from a curved DGA.

    ``m^1(x) = (-1)^{|x|} dx`` and ``m^2(x, y) = (-1)^{|x|(|y|+1)} xy``.
    """
    terms: dict[AlgebraKey, dict[str, Fraction]] = {}
    diff_items = differential.items() if isinstance(differential, Mapping) else differential
    for (level, x), comb in diff_items:
        sign = -1 if basis[x] % 2 else 1
        terms[(1, Fraction(level), (x,))] = {n: sign * Fraction(c) for n, c in comb.items()}
    prod_items = product.items() if isinstance(product, Mapping) else product
    for (level, x, y), comb in prod_items:
        sign = -1 if (basis[x] * (basis[y] + 1)) % 2 else 1
        terms[(2, Fraction(level), (x, y))] = {n: sign * Fraction(c) for n, c in comb.items()}
    curv_items = curvature_terms.items() if isinstance(curvature_terms, Mapping) else curvature_terms
    for level, comb in curv_items:
        terms[(0, Fraction(level), ())] = {n: Fraction(c) for n, c in comb.items()}
    return GappedAlgebra(basis, terms, emax)


def exterior_algebra(generators: Sequence[str], emax=DEFAULT_EMAX, unit: str = "one") -> GappedAlgebra:
    """Exterior algebra on degree-one generators, basis named by sorted index sets."""
    gens = list(generators)
    basis: dict[str, int] = {}
    names = {}
    for r in range(len(gens) + 1):
        for subset in itertools.combinations(range(len(gens)), r):
            name = unit if not subset else "_".join(gens[i] for i in subset)
            names[subset] = name
            basis[name] = r
    product = {}
    for s in names:
        for t in names:
            if set(s) & set(t):
                continue
            merged = s + t
            inversions = sum(1 for i in range(len(merged)) for j in range(i + 1, len(merged)) if merged[i] > merged[j])
            sign = -1 if inversions % 2 else 1
            product[(Fraction(0), names[s], names[t])] = {names[tuple(sorted(merged))]: sign}
    return from_dga(basis, {}, product, {}, emax)


# text format

_ALG_TERM = re.compile(r"^\(\s*(\d+)\s*,\s*([^,]+?)\s*,\s*\((.*?)\)\s*\)\s*->\s*(.+)$")
_MOD_TERM = re.compile(
    r"^\(\s*(\d+)\s*\|\s*(\d+)\s*,\s*([^,]+?)\s*,\s*\((.*?)\)\s*,\s*([A-Za-z_][A-Za-z0-9_]*)\s*,\s*\((.*?)\)\s*\)\s*->\s*(.+)$"
)


def _format_combination(comb: Combination) -> str:
    return " + ".join(f"{format_rational(c)}*{n}" for n, c in sorted(comb.items()))


def _parse_combination(text: str) -> Combination:
    out: dict[str, Fraction] = {}
    for chunk in text.split(" + "):
        chunk = chunk.strip()
        coeff, _, name = chunk.partition("*")
        if not name or not _NAME.match(name):
            raise ValueError(f"malformed combination term {chunk!r}")
        out[name] = out.get(name, Fraction(0)) + Fraction(coeff)
    return out


def _names(text: str) -> tuple[str, ...]:
    text = text.strip()
    return tuple(x.strip() for x in text.split(",")) if text else ()


def _algebra_lines(A: GappedAlgebra) -> list[str]:
    lines = [f"basis {n} {d}" for n, d in A.basis.items()]
    for (k, level, inputs), comb in A.terms.items():
        lines.append(f"({k}, {format_rational(level)}, ({', '.join(inputs)})) -> {_format_combination(comb)}")
    return lines


def algebra_to_text(A: GappedAlgebra) -> str:
    return "\n".join([f"emax {format_rational(A.emax)}"] + _algebra_lines(A)) + "\n"


def _parse_algebra_lines(lines: Iterable[tuple[int, str]], emax) -> GappedAlgebra:
    basis: dict[str, int] = {}
    terms = []
    for lineno, line in lines:
        if line.startswith("basis "):
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: malformed basis line")
            basis[parts[1]] = int(parts[2])
            continue
        match = _ALG_TERM.match(line)
        if not match:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
        k, level, inputs, comb = match.groups()
        terms.append(((int(k), Fraction(level), _names(inputs)), _parse_combination(comb)))
    return GappedAlgebra(basis, terms, emax)


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def algebra_from_text(text: str) -> GappedAlgebra:
    lines = _content_lines(text)
    emax = DEFAULT_EMAX
    if lines and lines[0][1].startswith("emax "):
        emax = Fraction(lines[0][1].split()[1])
        lines = lines[1:]
    return _parse_algebra_lines(lines, emax)


def bimodule_to_text(M: GappedBimodule) -> str:
    lines = [f"emax {format_rational(M.emax)}", "[left]"]
    lines += [f"emax {format_rational(M.left.emax)}"] + _algebra_lines(M.left)
    lines += ["[right]", f"emax {format_rational(M.right.emax)}"] + _algebra_lines(M.right)
    lines.append("[module]")
    lines += [f"basis {n} {d}" for n, d in M.basis.items()]
    for (k1, k2, level, a_in, m_in, b_in), comb in M.terms.items():
        lines.append(
            f"({k1}|{k2}, {format_rational(level)}, ({', '.join(a_in)}), {m_in}, ({', '.join(b_in)}))"
            f" -> {_format_combination(comb)}"
        )
    return "\n".join(lines) + "\n"


def bimodule_from_text(text: str) -> GappedBimodule:
    lines = _content_lines(text)
    if not lines or not lines[0][1].startswith("emax "):
        raise ValueError("bimodule text must start with an emax line")
    emax = Fraction(lines[0][1].split()[1])
    sections: dict[str, list[tuple[int, str]]] = {"[left]": [], "[right]": [], "[module]": []}
    current = None
    for lineno, line in lines[1:]:
        if line in sections:
            current = line
            continue
        if current is None:
            raise ValueError(f"line {lineno}: content outside a section")
        sections[current].append((lineno, line))

    def algebra(section):
        body = sections[section]
        sub_emax = DEFAULT_EMAX
        if body and body[0][1].startswith("emax "):
            sub_emax = Fraction(body[0][1].split()[1])
            body = body[1:]
        return _parse_algebra_lines(body, sub_emax)

    left, right = algebra("[left]"), algebra("[right]")
    basis: dict[str, int] = {}
    terms = []
    for lineno, line in sections["[module]"]:
        if line.startswith("basis "):
            parts = line.split()
            basis[parts[1]] = int(parts[2])
            continue
        match = _MOD_TERM.match(line)
        if not match:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
        k1, k2, level, a_in, m_in, b_in, comb = match.groups()
        terms.append(
            ((int(k1), int(k2), Fraction(level), _names(a_in), m_in, _names(b_in)), _parse_combination(comb))
        )
    return GappedBimodule(left, right, basis, terms, emax)


def element_to_text(el: Element) -> str:
    if not el:
        return "0"
    return " + ".join(
        f"{format_rational(c)}*T^{format_rational(lvl)}*{n}" for (lvl, n), c in sorted(el.items())
    )


def element_from_text(text: str) -> Element:
    text = text.strip()
    if text == "0" or not text:
        return {}
    out: dict[tuple[Fraction, str], Fraction] = defaultdict(Fraction)
    for chunk in text.split(" + "):
        parts = chunk.strip().split("*")
        if len(parts) != 3 or not parts[1].startswith("T^") or not _NAME.match(parts[2]):
            raise ValueError(f"malformed element term {chunk!r}")
        out[(Fraction(parts[1][2:]), parts[2])] += Fraction(parts[0])
    return {k: v for k, v in sorted(out.items()) if v != 0}
