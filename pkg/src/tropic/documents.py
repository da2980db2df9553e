"""JSON documents for curves, polynomials, complexes and reports.

Rationals are always written as strings ``"p/q"`` (or ``"p"``) so documents
survive a round trip exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional, Sequence

from .novikov import NovikovSeries, format_rational, from_text, to_text
from .polyhedra import Cell, RationalPolyhedron, WeightedPolyhedralComplex
from .tropical import Edge, Fan, TropicalCurve, TropicalPolynomial


class DocumentError(ValueError):
    """Malformed document; ``where`` locates the problem."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def parse_rational(text: Any, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise DocumentError(f"expected a rational string, got {text!r}", where)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise DocumentError(f"malformed rational {text!r}", where) from None


def parse_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"expected an integer, got {value!r}", where)
    return value


def _field(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise DocumentError("expected an object", where)
    if key not in doc:
        raise DocumentError(f"missing field {key!r}", where)
    return doc[key]


def _list(value, where: str) -> list:
    if not isinstance(value, list):
        raise DocumentError("expected a list", where)
    return value


def load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise DocumentError(err.msg, f"line {err.lineno} column {err.colno}") from None


def dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _vector_doc(v: Sequence) -> list[str]:
    return [format_rational(Fraction(x)) for x in v]


# curves


def curve_to_document(c: TropicalCurve, fan: Optional[Fan] = None, metadata: Optional[dict] = None) -> dict:
    doc: dict[str, Any] = {
        "n": c.n,
        "vertices": [_vector_doc(v) for v in c.vertices],
        "edges": [
            {"tail": e.tail, "head": e.head, "direction": list(e.direction), "weight": e.weight} for e in c.edges
        ],
    }
    if fan is not None:
        doc["fan"] = [list(r) for r in fan.rays]
    if metadata:
        doc["metadata"] = metadata
    return doc


def curve_from_document(doc: dict) -> tuple[TropicalCurve, Optional[Fan], dict]:
    n = parse_int(_field(doc, "n", "curve"), "curve.n")
    vertices = []
    for i, v in enumerate(_list(_field(doc, "vertices", "curve"), "curve.vertices")):
        coords = [parse_rational(x, f"curve.vertices[{i}][{j}]") for j, x in enumerate(_list(v, f"curve.vertices[{i}]"))]
        if len(coords) != n:
            raise DocumentError(f"expected {n} coordinates", f"curve.vertices[{i}]")
        vertices.append(coords)
    edges = []
    for i, e in enumerate(_list(_field(doc, "edges", "curve"), "curve.edges")):
        where = f"curve.edges[{i}]"
        tail = parse_int(_field(e, "tail", where), where + ".tail")
        head = _field(e, "head", where)
        head = None if head is None else parse_int(head, where + ".head")
        direction = [parse_int(x, where + ".direction") for x in _list(_field(e, "direction", where), where)]
        weight = parse_int(e.get("weight", 1), where + ".weight")
        edges.append(Edge(tail, head, tuple(direction), weight))
    fan = None
    if "fan" in doc:
        rays = [tuple(parse_int(x, "curve.fan") for x in _list(r, "curve.fan")) for r in _list(doc["fan"], "curve.fan")]
        fan = Fan(tuple(rays))
    return TropicalCurve(vertices, edges), fan, dict(doc.get("metadata", {}))


# polynomials


def polynomial_to_document(f: TropicalPolynomial, units: Optional[dict] = None) -> dict:
    terms = []
    for alpha, a in f.coefficients.items():
        term: dict[str, Any] = {"exponent": list(alpha), "coefficient": format_rational(a)}
        if units and alpha in units:
            term["unit"] = to_text(units[alpha])
        terms.append(term)
    return {"n": f.n, "terms": terms}


def polynomial_from_document(doc: dict) -> tuple[TropicalPolynomial, dict]:
    n = parse_int(_field(doc, "n", "polynomial"), "polynomial.n")
    coeffs = {}
    units: dict[tuple[int, ...], NovikovSeries] = {}
    for i, t in enumerate(_list(_field(doc, "terms", "polynomial"), "polynomial.terms")):
        where = f"polynomial.terms[{i}]"
        alpha = tuple(parse_int(x, where + ".exponent") for x in _list(_field(t, "exponent", where), where))
        if len(alpha) != n:
            raise DocumentError(f"expected {n} exponents", where)
        if alpha in coeffs:
            raise DocumentError(f"duplicate exponent {list(alpha)}", where)
        coeffs[alpha] = parse_rational(_field(t, "coefficient", where), where + ".coefficient")
        if "unit" in t:
            try:
                units[alpha] = from_text(str(t["unit"]))
            except ValueError as err:
                raise DocumentError(str(err), where + ".unit") from None
    if not coeffs:
        raise DocumentError("no terms", "polynomial.terms")
    return TropicalPolynomial(coeffs), units


# complexes


def complex_to_document(c: WeightedPolyhedralComplex) -> dict:
    cells = []
    for cell in c.cells:
        p = cell.polyhedron
        cells.append(
            {
                "weight": cell.weight,
                "equalities": [{"normal": _vector_doc(a), "rhs": format_rational(r)} for a, r in p.equalities],
                "inequalities": [{"normal": _vector_doc(a), "rhs": format_rational(r)} for a, r in p.inequalities],
            }
        )
    return {"n": c.n, "cells": cells}


def complex_from_document(doc: dict) -> WeightedPolyhedralComplex:
    n = parse_int(_field(doc, "n", "complex"), "complex.n")
    cells = []
    for i, cell in enumerate(_list(_field(doc, "cells", "complex"), "complex.cells")):
        where = f"complex.cells[{i}]"

        def constraints(key):
            out = []
            for j, row in enumerate(_list(cell.get(key, []), f"{where}.{key}")):
                normal = [parse_rational(x, f"{where}.{key}[{j}]") for x in _list(_field(row, "normal", where), where)]
                out.append((normal, parse_rational(_field(row, "rhs", where), f"{where}.{key}[{j}].rhs")))
            return out

        poly = RationalPolyhedron(n, constraints("inequalities"), constraints("equalities"))
        cells.append(Cell(poly, parse_int(cell.get("weight", 1), where + ".weight")))
    return WeightedPolyhedralComplex(n, cells)


# reports


class Report:
    """Ordered list of named verdicts plus witnesses and timings."""

    def __init__(self, command: str):
        self.command = command
        self.checks: list[dict] = []
        self.witnesses: list[dict] = []
        self.notes: list[str] = []
        self.timings: list[dict] = []

    def check(self, name: str, ok: bool, detail: str = "", subject: str = "") -> bool:
        entry = {"name": name, "ok": bool(ok)}
        if subject:
            entry["subject"] = subject
        if detail:
            entry["detail"] = detail
        self.checks.append(entry)
        return ok

    def witness(self, name: str, value) -> None:
        if isinstance(value, NovikovSeries):
            value = to_text(value)
        self.witnesses.append({"name": name, "value": value})

    def note(self, text: str) -> None:
        self.notes.append(text)

    def timing(self, name: str, seconds: float) -> None:
        self.timings.append({"name": name, "seconds": round(seconds, 6)})

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_document(self) -> dict:
        return {
            "command": self.command,
            "ok": self.ok,
            "checks": self.checks,
            "witnesses": self.witnesses,
            "notes": self.notes,
            "timings": self.timings,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "Report":
        r = cls(doc["command"])
        r.checks = list(doc.get("checks", []))
        r.witnesses = list(doc.get("witnesses", []))
        r.notes = list(doc.get("notes", []))
        r.timings = list(doc.get("timings", []))
        return r

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            mark = "ok  " if c["ok"] else "FAIL"
            label = c["name"] + (f" [{c['subject']}]" if "subject" in c else "")
            out.append(f"{mark} {label}" + (f": {c['detail']}" if "detail" in c else ""))
        for w in self.witnesses:
            out.append(f"     {w['name']} = {w['value']}")
        for n in self.notes:
            out.append(f"note {n}")
        return out
