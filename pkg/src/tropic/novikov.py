"""Truncated Novikov series with exact rational coefficients and exponents.

A series is a finite sum ``sum c_i T^{e_i}`` together with a precision ``P``:
every term with exponent ``>= P`` is unknown.  Exponents and coefficients are
:class:`fractions.Fraction`; the distinguished exponent ``INF`` (``math.inf``)
stands for an exact series (no truncation) and for the valuation of zero.

Precision propagates by the usual interval rules and is never extended
silently.  Operations that would produce an infinite expansion from an exact
input (inversion of a non-monomial, ``exp``, ``log``) need a finite cap; when
the caller gives none, ``DEFAULT_RELATIVE_PRECISION`` is used relative to the
valuation of the result.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Union

INF = math.inf
DEFAULT_RELATIVE_PRECISION = Fraction(10)

Exponent = Union[Fraction, float]
Scalar = Union[int, Fraction]


class NotPositiveValuation(ValueError):
    """Raised when exp/log is asked for an argument of valuation <= 0."""


class NotUnitary(ValueError):
    """Raised when a series is not of valuation 0 with nonzero constant term."""


def as_exponent(value) -> Exponent:
    if isinstance(value, float):
        if value == INF:
            return INF
        raise TypeError("float exponents other than +inf are not exact")
    if isinstance(value, str):
        text = value.strip()
        if text in ("inf", "+inf", "oo"):
            return INF
        return Fraction(text)
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_exponent(value: Exponent) -> str:
    return "inf" if value == INF else format_rational(value)


class NovikovSeries:
    """Immutable truncated series; ``terms`` is a tuple of (exponent, coefficient)."""

    __slots__ = ("terms", "precision")

    def __init__(self, terms: Iterable = (), precision=INF):
        precision = as_exponent(precision)
        acc: dict[Fraction, Fraction] = {}
        for exponent, coeff in terms:
            exponent = Fraction(exponent)
            coeff = Fraction(coeff)
            if coeff == 0 or exponent >= precision:
                continue
            acc[exponent] = acc.get(exponent, Fraction(0)) + coeff
        cleaned = tuple(sorted((e, c) for e, c in acc.items() if c != 0))
        object.__setattr__(self, "terms", cleaned)
        object.__setattr__(self, "precision", precision)

    def __setattr__(self, name, value):
        raise AttributeError("NovikovSeries is immutable")

    @classmethod
    def _from_sorted(cls, terms: tuple, precision) -> "NovikovSeries":
        """Build from already sorted, nonzero, in-precision (Fraction, Fraction) pairs."""
        out = object.__new__(cls)
        object.__setattr__(out, "terms", terms)
        object.__setattr__(out, "precision", precision)
        return out

    # construction helpers
    @classmethod
    def monomial(cls, coeff: Scalar = 1, exponent=0, precision=INF) -> "NovikovSeries":
        return cls([(Fraction(exponent), Fraction(coeff))], precision)

    @classmethod
    def constant(cls, coeff: Scalar, precision=INF) -> "NovikovSeries":
        return cls.monomial(coeff, 0, precision)

    @classmethod
    def zero(cls, precision=INF) -> "NovikovSeries":
        return cls((), precision)

    @classmethod
    def coerce(cls, value) -> "NovikovSeries":
        if isinstance(value, NovikovSeries):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.constant(value)
        raise TypeError(f"cannot interpret {value!r} as a Novikov series")

    # basic queries
    def valuation(self) -> Exponent:
        return self.terms[0][0] if self.terms else INF

    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            raise ValueError("the zero series has no leading coefficient")
        return self.terms[0][1]

    def coefficient(self, exponent) -> Fraction:
        exponent = Fraction(exponent)
        if exponent >= self.precision:
            raise ValueError(f"coefficient of T^{exponent} is beyond precision")
        for e, c in self.terms:
            if e == exponent:
                return c
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return self.precision == INF

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def order(self) -> Exponent:
        """Smallest exponent at which the series is known to be nonzero or unknown."""
        return min(self.valuation(), self.precision)

    def is_zero_mod(self, bound) -> bool:
        """True when every term below ``bound`` is known and vanishes."""
        return self.order() >= as_exponent(bound)

    def truncate(self, precision) -> "NovikovSeries":
        precision = as_exponent(precision)
        if precision >= self.precision:
            return self
        return NovikovSeries(self.terms, precision)

    def shift(self, exponent) -> "NovikovSeries":
        """Multiply by ``T^exponent``."""
        exponent = Fraction(exponent)
        return NovikovSeries(((e + exponent, c) for e, c in self.terms), self.precision + exponent)

    def scale(self, factor: Scalar) -> "NovikovSeries":
        factor = Fraction(factor)
        if factor == 0:
            return NovikovSeries((), self.precision)
        return NovikovSeries(((e, c * factor) for e, c in self.terms), self.precision)

    # arithmetic
    def __add__(self, other):
        try:
            other = NovikovSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        try:
            other = NovikovSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        try:
            other = NovikovSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return add(other, -self)

    def __mul__(self, other):
        try:
            other = NovikovSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = NovikovSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return mul(self, invert(other))

    def __rtruediv__(self, other):
        try:
            other = NovikovSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return mul(other, invert(self))

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return invert(self) ** (-k)
        result = NovikovSeries.constant(1)
        base = self
        while k:
            if k & 1:
                result = mul(result, base)
            base = mul(base, base)
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = NovikovSeries.constant(other)
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        return self.terms == other.terms and self.precision == other.precision

    def __hash__(self):
        return hash((self.terms, self.precision))

    def agrees_with(self, other, bound=None) -> bool:
        """Equality of the known parts, up to the common precision (or ``bound``)."""
        other = NovikovSeries.coerce(other)
        limit = min(self.precision, other.precision)
        if bound is not None:
            limit = min(limit, as_exponent(bound))
        return (self - other).is_zero_mod(limit)

    def __repr__(self):
        return f"NovikovSeries({to_text(self)!r})"

    def __str__(self):
        return to_text(self)


class UnitaryElement(NovikovSeries):
    """A series of valuation exactly 0 with nonzero constant term."""

    __slots__ = ()

    def __init__(self, terms: Iterable = (), precision=INF):
        super().__init__(terms, precision)
        if not self.terms or self.terms[0][0] != 0:
            raise NotUnitary(f"{to_text(self)} does not have valuation 0")

    @classmethod
    def of(cls, series: NovikovSeries) -> "UnitaryElement":
        series = NovikovSeries.coerce(series)
        return cls(series.terms, series.precision)


def valuation(a: NovikovSeries) -> Exponent:
    return a.valuation()


def add(a: NovikovSeries, b: NovikovSeries) -> NovikovSeries:
    precision = min(a.precision, b.precision)
    return NovikovSeries(a.terms + b.terms, precision)


def mul(a: NovikovSeries, b: NovikovSeries) -> NovikovSeries:
    precision = min(a.valuation() + b.precision, b.valuation() + a.precision)
    if precision != precision:  # inf - inf cannot occur, but guard NaN anyway
        raise ArithmeticError("undefined precision")
    if not a.terms or not b.terms:
        return NovikovSeries._from_sorted((), precision)
    # integer exponents and numerators over common denominators keep Fraction out of the inner loop
    den = math.lcm(*(e.denominator for e, _ in a.terms), *(e.denominator for e, _ in b.terms))
    da = math.lcm(*(c.denominator for _, c in a.terms))
    db = math.lcm(*(c.denominator for _, c in b.terms))
    ia = [(e.numerator * (den // e.denominator), c.numerator * (da // c.denominator)) for e, c in a.terms]
    ib = [(e.numerator * (den // e.denominator), c.numerator * (db // c.denominator)) for e, c in b.terms]
    cap = None if precision == INF else math.ceil(precision * den)
    out: dict[int, int] = {}
    for ea, ca in ia:
        for eb, cb in ib:
            e = ea + eb
            if cap is not None and e >= cap:
                break
            out[e] = out.get(e, 0) + ca * cb
    scale = da * db
    terms = tuple((Fraction(e, den), Fraction(c, scale)) for e, c in sorted(out.items()) if c)
    return NovikovSeries._from_sorted(terms, precision)


def _default_cap(result_valuation: Fraction, precision) -> Exponent:
    if precision is not None:
        return as_exponent(precision)
    return result_valuation + DEFAULT_RELATIVE_PRECISION


def invert(a: NovikovSeries, precision=None) -> NovikovSeries:
    """Inverse ``T^{-v} u^{-1}`` of ``a = T^v u``; ``precision`` caps the result."""
    a = NovikovSeries.coerce(a)
    if a.is_zero():
        raise ZeroDivisionError("the zero series is not invertible")
    v = a.valuation()
    natural = a.precision - 2 * v
    if a.is_monomial() and a.is_exact():
        target = natural if precision is None else as_exponent(precision)
        (e, c), = a.terms
        return NovikovSeries([(-e, 1 / c)], target)
    if natural == INF:
        target = _default_cap(-v, precision)
    else:
        target = natural if precision is None else min(natural, as_exponent(precision))
    relative = target + v
    unit = a.shift(-v)
    c0 = unit.terms[0][1]
    # Newton step w <- w (2 - unit w) doubles the order of 1 - unit w, so work at twice the known order
    unit = unit.truncate(relative)
    w = NovikovSeries.constant(1 / c0)
    known = (unit.scale(1 / c0) - 1).order()
    while known < relative:
        cap = min(relative, 2 * known)
        w = NovikovSeries(mul(w, 2 - mul(unit.truncate(cap), w)).truncate(cap).terms)
        known = cap
    w = w.truncate(relative)
    return w.shift(-v).truncate(target)


def _series_cap(a: NovikovSeries, precision) -> Exponent:
    if a.precision != INF:
        return a.precision if precision is None else min(a.precision, as_exponent(precision))
    return _default_cap(Fraction(0), precision)


def exp_positive(a: NovikovSeries, precision=None) -> UnitaryElement:
    """Formal ``exp(a)`` for ``val(a) > 0``."""
    a = NovikovSeries.coerce(a)
    v = a.valuation()
    if v <= 0:
        raise NotPositiveValuation(f"exp needs positive valuation, got {format_exponent(v)}")
    cap = _series_cap(a, precision)
    total = NovikovSeries.constant(1, cap)
    if v == INF:
        return UnitaryElement.of(total)
    power = NovikovSeries.constant(1, cap)
    k = 1
    while k * v < cap:
        power = mul(power, a).truncate(cap).scale(Fraction(1, k))
        total = add(total, power)
        k += 1
    return UnitaryElement.of(total)


def log_one_plus(x: NovikovSeries, precision=None) -> NovikovSeries:
    """Formal ``log(1 + x)`` for ``val(x) > 0``."""
    x = NovikovSeries.coerce(x)
    v = x.valuation()
    if v <= 0:
        raise NotPositiveValuation(f"log needs positive valuation, got {format_exponent(v)}")
    cap = _series_cap(x, precision)
    total = NovikovSeries.zero(cap)
    if v == INF:
        return total
    power = NovikovSeries.constant(1, cap)
    k = 1
    while k * v < cap:
        power = mul(power, x).truncate(cap)
        sign = 1 if k % 2 else -1
        total = add(total, power.scale(Fraction(sign, k)))
        k += 1
    return total


# text encoding

_TERM = re.compile(r"^(-?\d+(?:/\d+)?)\*T\^(-?\d+(?:/\d+)?)$")
_BIG_O = re.compile(r"^O\(T\^(-?\d+(?:/\d+)?)\)$")


def to_text(a: NovikovSeries) -> str:
    parts = [f"{format_rational(c)}*T^{format_rational(e)}" for e, c in a.terms]
    if a.precision != INF:
        parts.append(f"O(T^{format_rational(a.precision)})")
    return " + ".join(parts) if parts else "0"


def from_text(text: str) -> NovikovSeries:
    text = text.strip()
    if text == "0":
        return NovikovSeries()
    terms = []
    precision: Exponent = INF
    chunks = [chunk.strip() for chunk in text.split(" + ")]
    for index, chunk in enumerate(chunks):
        big_o = _BIG_O.match(chunk)
        if big_o:
            if index != len(chunks) - 1:
                raise ValueError(f"precision term must come last in {text!r}")
            precision = Fraction(big_o.group(1))
            continue
        term = _TERM.match(chunk)
        if not term:
            raise ValueError(f"malformed series term {chunk!r}")
        terms.append((Fraction(term.group(2)), Fraction(term.group(1))))
    exps = [e for e, _ in terms]
    if exps != sorted(set(exps)) or any(c == 0 for _, c in terms):
        raise ValueError(f"series terms are not canonical in {text!r}")
    if any(e >= precision for e in exps):
        raise ValueError(f"term beyond precision in {text!r}")
    return NovikovSeries(terms, precision)


T = NovikovSeries.monomial(1, 1)
