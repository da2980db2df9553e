"""Command-line front end: ``tropic check|hypersurface|realize|pipeline|ainf|wellspaced|support``.

Exit codes: 0 success, 1 a check failed, 2 the input could not be read or parsed.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import random
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import ainfinity as ainf
from .documents import (
    DocumentError,
    Report,
    complex_to_document,
    curve_from_document,
    dump_json,
    load_json,
    parse_rational,
    polynomial_from_document,
)
from .floer import Conormal, Pants, a_support_query
from .lattice import extended_gcd
from .lifts import (
    build_lift_model,
    check_h1_surjection,
    check_h2_injection,
    lift_cohomology,
    unobstructedness_criterion,
)
from .linalg import solve
from .novikov import NovikovSeries, format_rational, from_text, to_text
from .polyhedra import RationalPolyhedron, WeightedPolyhedralComplex, balancing_check, validate_complex
from .realization import (
    NoRationalRoot,
    NotOnTropicalization,
    SingularInitialTerm,
    VertexPoint,
    kapranov_check,
    lift_coefficients,
    realize_point,
)
from .tropical import (
    ConstantPolynomial,
    InvalidCurve,
    Spacing,
    TropicalCurve,
    TropicalPolynomial,
    adapted_to_fan,
    curve_to_complex,
    deformation_ranks,
    genus,
    hypersurface,
    hypersurface_cells,
    is_balanced_curve,
    is_smooth_curve,
    trop_eval,
    well_spaced,
)

log = logging.getLogger("tropic")

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2
DEFAULT_RADIUS = Fraction(5)
DEFAULT_SAMPLES = 10


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as err:
        raise InputError(f"{path}: {err.strerror}") from None


def _load(path: str):
    try:
        return load_json(_read(path))
    except DocumentError as err:
        raise InputError(f"{path}: {err}") from None


def _rationals(text: str, where: str) -> list[Fraction]:
    try:
        return [parse_rational(x, where) for x in text.split(",")]
    except DocumentError as err:
        raise InputError(str(err)) from None


def _emit(report: Report, args) -> int:
    for line in report.lines():
        print(line)
    if getattr(args, "json", None):
        Path(args.json).write_text(dump_json(report.to_document()))
    return EXIT_OK if report.ok else EXIT_FAILED


def _negate_polynomial(f: TropicalPolynomial) -> TropicalPolynomial:
    return TropicalPolynomial({a: -c for a, c in f.coefficients.items()})


def _negate_complex(c: WeightedPolyhedralComplex) -> WeightedPolyhedralComplex:
    from .polyhedra import Cell

    cells = []
    for cell in c.cells:
        p = cell.polyhedron
        flipped = RationalPolyhedron(
            p.n,
            [([-x for x in a], r) for a, r in p.inequalities],
            [([-x for x in a], r) for a, r in p.equalities],
        )
        cells.append(Cell(flipped, cell.weight))
    return WeightedPolyhedralComplex(c.n, cells)


# geometry of one-dimensional cells


def _line_parameters(p: RationalPolyhedron):
    """Base point, primitive direction and parameter bounds (None when unbounded)."""
    (d,) = p.tangent_lattice.basis
    base = p.relative_interior_point
    lo = hi = None
    for a, r in p.inequalities:
        slope = sum(x * y for x, y in zip(a, d))
        if slope == 0:
            continue
        t = (r - sum(x * y for x, y in zip(a, base))) / slope
        if slope > 0:
            lo = t if lo is None else max(lo, t)
        else:
            hi = t if hi is None else min(hi, t)
    return base, tuple(d), lo, hi


def _clip(base, d, lo, hi, radius):
    for b, x in zip(base, d):
        if x == 0:
            continue
        t1, t2 = sorted(((-radius - b) / x, (radius - b) / x))
        lo = t1 if lo is None else max(lo, t1)
        hi = t2 if hi is None else min(hi, t2)
    if lo is None or hi is None or lo > hi:
        return None
    return [b + lo * x for b, x in zip(base, d)], [b + hi * x for b, x in zip(base, d)]


def render_svg(c: WeightedPolyhedralComplex, radius=DEFAULT_RADIUS, scale: int = 40) -> str:
    """Deterministic drawing of a planar one-dimensional complex clipped to a box."""
    radius = Fraction(radius)
    size = int(2 * radius * scale) + 2 * scale
    centre = size / 2

    def px(p):
        return f"{float(centre + p[0] * scale):.4f}", f"{float(centre - p[1] * scale):.4f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]
    for cell in c.cells:
        if cell.polyhedron.dimension != 1:
            continue
        base, d, lo, hi = _line_parameters(cell.polyhedron)
        clipped = _clip(base, d, lo, hi, radius)
        if clipped is None:
            continue
        (x1, y1), (x2, y2) = px(clipped[0]), px(clipped[1])
        dashed = ' stroke-dasharray="4 3"' if (lo is None or hi is None) else ""
        parts.append(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black" stroke-width="{1 + cell.weight}"{dashed}/>'
        )
        if cell.weight != 1:
            mid = [(a + b) / 2 for a, b in zip(*clipped)]
            mx, my = px(mid)
            parts.append(f'<text x="{mx}" y="{my}" font-size="12" fill="blue">{cell.weight}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# commands


def cmd_check(args) -> int:
    c, fan, _ = _curve(args.curve)
    report = Report("check")
    cx = curve_to_complex(c)
    verdict = validate_complex(cx)
    report.check("complex", verdict.valid, "; ".join(f"cells {i},{j}: {why}" for i, j, why in verdict.violations))
    bal = balancing_check(cx)
    report.check(
        "balancing",
        bal.balanced,
        "; ".join(f"defect {list(v)}" for _, v in bal.defects),
    )
    curve_bal = is_balanced_curve(c)
    report.check("balanced vertices", curve_bal.ok, _offending(curve_bal.offending))
    smooth = is_smooth_curve(c)
    report.check("smooth", smooth.ok, _offending(smooth.offending))
    report.witness("genus", genus(c))
    if fan is not None:
        adapted = adapted_to_fan(c, fan)
        report.check("adapted to fan", adapted.ok, _offending(adapted.offending))
    return _emit(report, args)


def _offending(items) -> str:
    return "; ".join(str(x) for x in items)


def _curve(path: str):
    doc = _load(path)
    try:
        return curve_from_document(doc)
    except (DocumentError, InvalidCurve) as err:
        raise InputError(f"{path}: {err}") from None


def _polynomial(path: str, convention: str):
    doc = _load(path)
    try:
        f, units = polynomial_from_document(doc)
    except (DocumentError, ValueError) as err:
        raise InputError(f"{path}: {err}") from None
    if convention == "max":
        f = _negate_polynomial(f)
    return f, units


def cmd_hypersurface(args) -> int:
    f, _ = _polynomial(args.polynomial, args.convention)
    try:
        cx = hypersurface(f)
    except ConstantPolynomial:
        print("FAIL constant polynomial: empty hypersurface")
        return EXIT_FAILED
    if args.convention == "max":
        cx = _negate_complex(cx)
    doc = complex_to_document(cx)
    text = dump_json(doc)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.svg:
        if f.n != 2:
            print("FAIL svg output needs a planar polynomial", file=sys.stderr)
            return EXIT_FAILED
        Path(args.svg).write_text(render_svg(cx, args.radius))
    report = Report("hypersurface")
    report.check("balancing", balancing_check(cx).balanced)
    if args.json:
        Path(args.json).write_text(dump_json(report.to_document()))
    return EXIT_OK if report.ok else EXIT_FAILED


def _seed() -> int:
    return int(os.environ.get("TROPIC_SEED", "0"))


def facet_samples(f: TropicalPolynomial, count: int, rng: random.Random) -> list[tuple[Fraction, ...]]:
    """Points in facet interiors, cycling through facets, jittered inside each facet."""
    cells = hypersurface_cells(f)
    anchors = []
    for cell in cells:
        p = cell.polyhedron
        if p.dimension == 1:
            base, d, lo, hi = _line_parameters(p)
            if lo is not None and hi is not None:
                anchor = [b + (lo + hi) / 2 * x for b, x in zip(base, d)]
            elif lo is not None:
                anchor = [b + (lo + 1) * x for b, x in zip(base, d)]
            elif hi is not None:
                anchor = [b + (hi - 1) * x for b, x in zip(base, d)]
            else:
                anchor = list(base)
        else:
            anchor = list(p.relative_interior_point)
        anchors.append((cell, anchor))
    out = []
    for index in range(count):
        cell, anchor = anchors[index % len(anchors)]
        out.append(_coarse_point(f, cell, anchor, rng))
    return out


def _lattice_point_on_facet(f: TropicalPolynomial, cell) -> list[Fraction]:
    """A point of the facet's hyperplane whose denominators divide the hyperplane offset's."""
    alpha, beta = sorted(cell.achievers)[:2]
    a = [x - y for x, y in zip(alpha, beta)]
    rhs = f.coefficients[beta] - f.coefficients[alpha]
    g, x = 0, [0] * len(a)
    for j, aj in enumerate(a):
        if aj == 0:
            continue
        g, s, t = extended_gcd(g, aj)
        x = [s * c for c in x]
        x[j] = t
    return [Fraction(rhs, g) * c for c in x]


def _coarse_point(f: TropicalPolynomial, cell, anchor, rng: random.Random) -> tuple[Fraction, ...]:
    """Random facet point on the grid ``base + (1/D) * tangent lattice`` for the smallest workable D.

    Small denominators keep the lifted series short.
    """
    tangents = cell.polyhedron.tangent_lattice.basis
    base = _lattice_point_on_facet(f, cell)
    coords = solve([list(col) for col in zip(*tangents)], [x - b for x, b in zip(anchor, base)], len(tangents))
    if coords is not None:
        for denominator in (1, 2, 4, 8, 16, 32, 64):
            for _ in range(12):
                t = [Fraction(round(c * denominator) + rng.randint(-2, 2), denominator) for c in coords]
                point = list(base)
                for ti, v in zip(t, tangents):
                    point = [x + ti * y for x, y in zip(point, v)]
                if trop_eval(f, point)[1] == cell.achievers:
                    return tuple(point)
    # fall back to jitter around the anchor
    jitter = Fraction(1)
    while True:
        point = list(anchor)
        for v in tangents:
            r = Fraction(rng.randint(-4, 4), 8) * jitter
            point = [x + r * y for x, y in zip(point, v)]
        if trop_eval(f, point)[1] == cell.achievers:
            return tuple(point)
        jitter /= 2


def vertex_samples(f: TropicalPolynomial) -> list[tuple[Fraction, ...]]:
    """Points where the minimum is attained at least three times."""
    out = []
    for combo in itertools.combinations(f.support, f.n + 1):
        base = combo[0]
        rows = [[Fraction(x - y) for x, y in zip(g, base)] for g in combo[1:]]
        rhs = [f.coefficients[base] - f.coefficients[g] for g in combo[1:]]
        q = solve(rows, rhs, f.n)
        if q is None:
            continue
        _, achievers = trop_eval(f, q)
        if set(combo) <= achievers and tuple(q) not in out:
            out.append(tuple(q))
    return out


def cmd_realize(args) -> int:
    f, units = _polynomial(args.polynomial, args.convention)
    emax = Fraction(args.emax)
    report = Report("realize")
    if emax <= 0:
        warnings.warn("E_max <= 0: every residual condition holds vacuously", stacklevel=1)
        report.note("E_max <= 0, nothing to check")
        return _emit(report, args)
    rng = random.Random(_seed())
    F = lift_coefficients(f, units, emax)
    if len(f.coefficients) == 1:
        print("FAIL constant polynomial: empty hypersurface")
        return EXIT_FAILED
    points = vertex_samples(f) if args.vertices else facet_samples(f, args.samples, rng)
    for q in points:
        label = "(" + ", ".join(format_rational(-x if args.convention == "max" else x) for x in q) + ")"
        start = time.perf_counter()
        try:
            z = realize_point(F, q, emax)
            verdict = kapranov_check(F, z)
        except (VertexPoint, NotOnTropicalization, NoRationalRoot, SingularInitialTerm) as err:
            report.check("realize", False, f"{type(err).__name__}: {err}", label)
            continue
        report.check("realize", verdict.ok, f"residual valuation {format_rational(verdict.residual_order)}", label)
        for j, zj in enumerate(z.coordinates):
            report.witness(f"{label} z{j + 1}", to_text(zj))
        report.timing(label, time.perf_counter() - start)
    return _emit(report, args)


def cmd_pipeline(args) -> int:
    c, _, _ = _curve(args.curve)
    report = Report("pipeline")
    g = genus(c)
    report.witness("genus", g)
    smooth = is_smooth_curve(c)
    report.check("smooth", smooth.ok, _offending(smooth.offending))
    h0, h1 = deformation_ranks(c)
    report.witness("h0_def", h0)
    report.witness("h1_def", h1)
    if args.expected_dim is not None:
        report.check(
            "expected dimension",
            h0 == args.expected_dim,
            "superabundant" if h0 > args.expected_dim else "",
        )
    if not smooth.ok:
        return _emit(report, args)
    if g != 0:
        warnings.warn("positive genus: lift criteria are skipped", stacklevel=1)
        report.note("positive genus: lift criteria skipped; try `tropic wellspaced`")
        return _emit(report, args)
    model = build_lift_model(c)
    betti = lift_cohomology(model, args.coefficients)
    report.witness("betti", list(betti))
    if args.end is not None and args.end not in c.rays():
        raise InputError(f"edge {args.end} is not an unbounded end")
    ends = c.rays() if args.end is None else [args.end]
    for end in ends:
        subject = f"end {end}"
        report.check("H1 surjection", check_h1_surjection(model, end, args.coefficients).ok, subject=subject)
        report.check("H2 injection", check_h2_injection(model, end, args.coefficients).ok, subject=subject)
        report.check(
            "unobstructedness criterion",
            unobstructedness_criterion(model, end, args.coefficients).ok,
            subject=subject,
        )
    report.note("chain: geometric -> unobstructed-criterion -> support-template")
    report.note("Floer-analytic and mirror-symmetry steps are assumptions, not computed")
    return _emit(report, args)


def _algebra(path: str) -> ainf.GappedAlgebra:
    try:
        return ainf.algebra_from_text(_read(path))
    except (ValueError, KeyError) as err:
        raise InputError(f"{path}: {err}") from None


def cmd_ainf(args) -> int:
    A = _algebra(args.algebra)
    if args.emax is not None:
        A = ainf.GappedAlgebra(A.basis, A.terms, Fraction(args.emax))
    report = Report(f"ainf {args.action}")
    if args.action == "check":
        violations = ainf.check_relations(A, args.arity)
        for v in violations:
            report.check("relation", False, ainf.element_to_text({(lvl, n): c for lvl, n, c in v.defect}), f"k={v.arity} {v.inputs}")
        if not violations:
            report.check("relations", True, f"arity <= {args.arity}")
        return _emit(report, args)
    if args.action == "deform":
        try:
            d = ainf.element_from_text(args.cochain or "0")
            D = ainf.deform(A, d)
        except (ValueError, ainf.NotDeforming) as err:
            raise InputError(str(err)) from None
        sys.stdout.write(ainf.algebra_to_text(D))
        return EXIT_OK
    ideal = None
    if args.ideal is not None:
        names = [x for x in args.ideal.split(",") if x]
        ideal = ainf.Ideal(frozenset(n for n in names if n != "+"), "+" in names)
    mode = ainf.SolveMode.LEMMA if args.mode == "lemma" else ainf.SolveMode.GENERIC
    try:
        b = ainf.solve_bounding_cochain(A, ideal, mode)
    except ainf.Obstructed as err:
        report.check("bounding cochain", False, str(err))
        report.witness("obstruction level", format_rational(err.report.level))
        return _emit(report, args)
    except ainf.HypothesisFailed as err:
        report.check("hypotheses", False, str(err))
        return _emit(report, args)
    report.check("bounding cochain", True)
    report.witness("b", ainf.element_to_text(b))
    return _emit(report, args)


def cmd_wellspaced(args) -> int:
    c, _, _ = _curve(args.curve)
    normal = _rationals(args.normal, "--normal")
    report = Report("wellspaced")
    try:
        verdict = well_spaced(c, normal, parse_rational(args.rhs, "--rhs"))
    except (ValueError, DocumentError) as err:
        report.check("genus one", False, str(err))
        return _emit(report, args)
    for v, d in verdict.distances:
        report.witness(f"exit vertex {v}", format_rational(d))
    report.check("well spaced", verdict.status is Spacing.WELL_SPACED, verdict.status.value)
    return _emit(report, args)


def _holonomies(text: Optional[str], n: int) -> list:
    if text is None:
        return [None] * n
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if chunk == "?":
            out.append(None)
            continue
        try:
            out.append(from_text(chunk) if "T" in chunk else NovikovSeries.constant(Fraction(chunk)))
        except (ValueError, ZeroDivisionError) as err:
            raise InputError(f"holonomy {chunk!r}: {err}") from None
    if len(out) != n:
        raise InputError(f"expected {n} holonomies")
    return out


def cmd_support(args) -> int:
    q = _rationals(args.q, "--q")
    if args.convention == "max":
        q = [-x for x in q]
    if args.lift == "conormal":
        kind = Conormal(args.n, args.k)
        n = args.n
    else:
        kind = Pants()
        n = 2
    emax = Fraction(args.emax) if args.emax is not None else Fraction(10)
    verdict = a_support_query(kind, q, _holonomies(args.z, n), emax, construct=args.construct)
    report = Report("support")
    report.check("in support", verdict.in_support, verdict.reason)
    if verdict.witness is not None:
        for j, z in enumerate(verdict.witness.holonomies):
            report.witness(f"z{j + 1}", to_text(z))
    return _emit(report, args)


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--convention", choices=("min", "max"), default="min")
    common.add_argument("--emax", default=None, help="truncation exponent (rational)")
    common.add_argument("--json", default=None, help="write the report document here")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="tropic", description="Tropical curves, lifts and Floer-style checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a curve document")
    p.add_argument("curve")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("hypersurface", parents=[common], help="corner locus of a polynomial")
    p.add_argument("polynomial")
    p.add_argument("--svg", default=None)
    p.add_argument("--radius", type=Fraction, default=DEFAULT_RADIUS)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_hypersurface)

    p = sub.add_parser("realize", parents=[common], help="lift facet points and check residuals")
    p.add_argument("polynomial")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--vertices", action="store_true", help="sample vertices instead of facets")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("pipeline", parents=[common], help="lift topology and deformation checks")
    p.add_argument("curve")
    p.add_argument("--end", type=int, default=None)
    p.add_argument("--expected-dim", type=int, default=None)
    p.add_argument("--coefficients", choices=("Q", "F2"), default="Q")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("ainf", parents=[common], help="gapped A-infinity algebras")
    p.add_argument("action", choices=("check", "deform", "solve"))
    p.add_argument("algebra")
    p.add_argument("--arity", type=int, default=ainf.DEFAULT_ARITY_BOUND)
    p.add_argument("--cochain", default=None, help='e.g. "1*T^1*e"')
    p.add_argument("--ideal", default=None, help="comma-separated basis names, '+' for positive energy")
    p.add_argument("--mode", choices=("generic", "lemma"), default="generic")
    p.set_defaults(func=cmd_ainf)

    p = sub.add_parser("wellspaced", parents=[common], help="genus-one exit distance test")
    p.add_argument("curve")
    p.add_argument("--normal", required=True, help="hyperplane normal, comma separated")
    p.add_argument("--rhs", default="0")
    p.set_defaults(func=cmd_wellspaced)

    p = sub.add_parser("support", parents=[common], help="fiber support query")
    p.add_argument("lift", choices=("conormal", "pants"))
    p.add_argument("--q", required=True, help="base point, comma separated rationals")
    p.add_argument("--z", default=None, help="holonomies, comma separated series or '?'")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--construct", action="store_true", help="build the witness with the module solver")
    p.set_defaults(func=cmd_support)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "realize" and args.emax is None:
        args.emax = "10"
    try:
        return args.func(args)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
