"""Lifting tropical data to the Novikov field and checking it against tropicalization."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .lattice import extended_gcd, primitive
from .novikov import INF, NovikovSeries, UnitaryElement, format_rational, invert, mul
from .tropical import TropicalPolynomial

log = logging.getLogger(__name__)

DEFAULT_EMAX = Fraction(10)


class NotAZero(ValueError):
    pass


class SingularInitialTerm(ValueError):
    pass


class NotAnInitialRoot(ValueError):
    """The starting value does not solve the leading-term equation."""


class NotOnTropicalization(ValueError):
    pass


class VertexPoint(ValueError):
    pass


class NoRationalRoot(ValueError):
    """The leading-term equation has no solution with rational coefficients."""


class NovikovLaurentPolynomial:
    """``F(z) = sum c_alpha z^alpha`` with Novikov coefficients."""

    def __init__(self, coefficients: Mapping[Sequence[int], NovikovSeries], emax=DEFAULT_EMAX):
        if not coefficients:
            raise ValueError("empty support")
        self.emax = Fraction(emax)
        terms = {}
        for alpha, c in coefficients.items():
            c = NovikovSeries.coerce(c)
            if c.is_zero():
                raise ValueError("coefficients must be nonzero")
            if c.precision < self.emax:
                raise ValueError(f"coefficient precision {c.precision} is below E_max {self.emax}")
            terms[tuple(int(x) for x in alpha)] = c
        self.n = len(next(iter(terms)))
        self.coefficients: dict[tuple[int, ...], NovikovSeries] = dict(sorted(terms.items()))

    def tropicalization(self) -> TropicalPolynomial:
        return TropicalPolynomial({a: c.valuation() for a, c in self.coefficients.items()})

    def __repr__(self):
        return f"NovikovLaurentPolynomial({self.coefficients}, emax={self.emax})"


@dataclass(frozen=True)
class AnalyticPoint:
    coordinates: tuple[NovikovSeries, ...]

    def __post_init__(self):
        coords = tuple(NovikovSeries.coerce(z) for z in self.coordinates)
        if any(z.is_zero() for z in coords):
            raise ValueError("analytic point coordinates must be nonzero")
        object.__setattr__(self, "coordinates", coords)


def lift_coefficients(
    f: TropicalPolynomial, seed: Optional[Mapping[Sequence[int], NovikovSeries]] = None, emax=DEFAULT_EMAX
) -> NovikovLaurentPolynomial:
    seed = {tuple(k): v for k, v in (seed or {}).items()}
    coeffs = {}
    for alpha, a in f.coefficients.items():
        unit = UnitaryElement.of(seed.get(alpha, NovikovSeries.constant(1)))
        coeffs[alpha] = unit.shift(a)
    return NovikovLaurentPolynomial(coeffs, emax)


def tropicalize_point(z: AnalyticPoint) -> tuple[Fraction, ...]:
    return tuple(c.valuation() for c in z.coordinates)


def _power(z: NovikovSeries, k: int) -> NovikovSeries:
    if k >= 0:
        return z**k
    return invert(z) ** (-k)


def evaluate(F: NovikovLaurentPolynomial, z: AnalyticPoint, precision=None) -> NovikovSeries:
    """``F(z)`` known modulo ``T^precision`` when the inputs carry enough precision."""
    target = F.emax if precision is None else Fraction(precision)
    q = tropicalize_point(z)
    lowest = min(c.valuation() + sum(a * x for a, x in zip(alpha, q)) for alpha, c in F.coefficients.items())
    relative = target - lowest
    if relative <= 0:
        # every term already vanishes modulo T^target
        return NovikovSeries.zero(target)
    coords = [c.truncate(c.valuation() + relative) for c in z.coordinates]
    total = NovikovSeries.zero(target)
    for alpha, c in F.coefficients.items():
        term = c.truncate(c.valuation() + relative)
        for zj, k in zip(coords, alpha):
            if k:
                term = mul(term, _power(zj, k))
        total = total + term
    return total.truncate(target)


@dataclass(frozen=True)
class KapranovVerdict:
    ok: bool
    residual_order: object
    minimum: Fraction
    achievers: tuple[tuple[int, ...], ...]


def kapranov_check(F: NovikovLaurentPolynomial, z: AnalyticPoint) -> KapranovVerdict:
    residual = evaluate(F, z)
    order = residual.order()
    if order < F.emax:
        raise NotAZero(f"residual valuation {order} is below E_max {F.emax}")
    q = tropicalize_point(z)
    values = {
        alpha: c.valuation() + sum(a * x for a, x in zip(alpha, q)) for alpha, c in F.coefficients.items()
    }
    low = min(values.values())
    achievers = tuple(sorted(a for a, v in values.items() if v == low))
    return KapranovVerdict(len(achievers) >= 2, order, low, achievers)


def _poly_eval(coeffs: Sequence[NovikovSeries], w: NovikovSeries, cap) -> NovikovSeries:
    acc = NovikovSeries.zero(cap)
    for c in reversed(coeffs):
        acc = (mul(acc, w) + c).truncate(cap)
    return acc


def newton_lift_root(
    p: Sequence, w0, emax=DEFAULT_EMAX, trace: Optional[list] = None, max_iterations: int = 64
) -> NovikovSeries:
    """Root of ``sum p[k] w^k`` congruent to ``w0`` at order zero, modulo ``T^emax``."""
    emax = Fraction(emax)
    coeffs = [NovikovSeries.coerce(c) for c in p]
    deriv = [c.scale(k) for k, c in enumerate(coeffs)][1:]
    w = NovikovSeries(NovikovSeries.coerce(w0).truncate(emax).terms)
    d0 = _poly_eval(deriv, w, emax)
    if d0.valuation() != 0:
        raise SingularInitialTerm("derivative at the initial term is not a unit")
    r = _poly_eval(coeffs, w, emax)
    if r.order() <= 0:
        raise NotAnInitialRoot("initial term does not solve the leading equation")
    # precision doubling: each step works modulo T^(2 * current residual order);
    # the derivative inverse is refined alongside by one Newton-Schulz step per iteration
    order = r.order()
    inverse = NovikovSeries.constant(1 / d0.leading_coefficient())
    for _ in range(max_iterations):
        cap = min(emax, 2 * order)
        r = _poly_eval(coeffs, w, cap)
        order = r.order()
        if trace is not None:
            trace.append(order)
        log.debug("newton residual order %s at working precision %s", order, cap)
        if order >= emax:
            return w.truncate(emax)
        if order >= cap:
            order = cap
            continue
        d = _poly_eval(deriv, w, cap)
        inverse = NovikovSeries(mul(inverse, 2 - mul(d, inverse)).truncate(cap).terms)
        # the iterate is an exact approximant; only the residual carries a precision
        w = NovikovSeries((w - mul(r, inverse)).truncate(cap).terms)
        order = min(cap, 2 * order)
    raise ArithmeticError("Newton iteration did not converge")


def rational_root(value: Fraction, k: int) -> Optional[Fraction]:
    """Rational ``x`` with ``x**k == value`` (k >= 1), or None."""
    value = Fraction(value)
    if value == 0:
        return Fraction(0)
    if value < 0 and k % 2 == 0:
        return None
    sign = -1 if value < 0 else 1
    num = _int_root(abs(value.numerator), k)
    den = _int_root(value.denominator, k)
    if num is None or den is None:
        return None
    return sign * Fraction(num, den)


def _int_root(n: int, k: int) -> Optional[int]:
    lo, hi = 0, 1
    while hi**k < n:
        hi *= 2
    while lo <= hi:
        mid = (lo + hi) // 2
        v = mid**k
        if v == n:
            return mid
        if v < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def _coordinate_constants(diff: Sequence[int], ratio: Fraction, distinguished: int) -> list[Fraction]:
    """Constants t with prod t_j^{diff_j} = ratio, preferring t_j = 1 off the distinguished slot."""
    k = diff[distinguished]
    root = rational_root(ratio if k > 0 else 1 / ratio, abs(k))
    consts = [Fraction(1)] * len(diff)
    if root is not None:
        consts[distinguished] = root
        return consts
    g = 0
    coeffs = [0] * len(diff)
    for j, x in enumerate(diff):
        if x == 0:
            continue
        if g == 0:
            g, coeffs[j] = abs(x), (1 if x > 0 else -1)
            continue
        g2, s, t = extended_gcd(g, x)
        coeffs = [s * c for c in coeffs]
        coeffs[j] = t
        g = g2
    sigma = rational_root(ratio, g)
    if sigma is None:
        raise NoRationalRoot(
            f"leading equation needs a rational {g}-th root of {ratio}"
        )
    return [sigma**c for c in coeffs]


def _multiple_of(step: Sequence[int], v: Sequence[int]) -> Optional[int]:
    idx = next(j for j, d in enumerate(step) if d)
    k = Fraction(v[idx], step[idx])
    if k.denominator != 1 or any(x != k * d for x, d in zip(v, step)):
        return None
    return int(k)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def simple_rational_root(coeffs: Sequence[Fraction]) -> Fraction:
    """A rational root of ``sum coeffs[k] s^k`` that is not a root of the derivative."""
    scale = math.lcm(*(Fraction(c).denominator for c in coeffs))
    ints = [int(Fraction(c) * scale) for c in coeffs]
    if ints[0] == 0 or ints[-1] == 0:
        raise ValueError("leading equation must have nonzero extreme coefficients")

    def value(poly, s):
        acc = Fraction(0)
        for c in reversed(poly):
            acc = acc * s + c
        return acc

    deriv = [k * c for k, c in enumerate(ints)][1:]
    found_multiple = False
    for p in _divisors(ints[0]):
        for r in _divisors(ints[-1]):
            for s in (Fraction(p, r), Fraction(-p, r)):
                if value(ints, s) == 0:
                    if value(deriv, s) != 0:
                        return s
                    found_multiple = True
    if found_multiple:
        raise SingularInitialTerm("leading equation has only repeated rational roots")
    raise NoRationalRoot("leading equation has no rational root")


def _point_text(q: Sequence[Fraction]) -> str:
    return "(" + ", ".join(format_rational(x) for x in q) + ")"


def realize_point(F: NovikovLaurentPolynomial, q: Sequence, emax=None) -> AnalyticPoint:
    """Analytic zero of ``F`` tropicalizing to a facet point ``q``."""
    emax = F.emax if emax is None else Fraction(emax)
    q = tuple(Fraction(x) for x in q)
    values = {
        alpha: c.valuation() + sum(a * x for a, x in zip(alpha, q)) for alpha, c in F.coefficients.items()
    }
    low = min(values.values())
    achievers = sorted(a for a, v in values.items() if v == low)
    if len(achievers) < 2:
        raise NotOnTropicalization(f"minimum at {_point_text(q)} is achieved once")
    base = achievers[0]
    step = primitive([x - y for x, y in zip(achievers[1], base)])
    powers = {}
    for gamma in achievers:
        k = _multiple_of(step, [x - y for x, y in zip(gamma, base)])
        if k is None:
            raise VertexPoint(f"minimum at {_point_text(q)} is achieved by non-collinear exponents")
        powers[k] = F.coefficients[gamma].leading_coefficient()
    leading = [powers.get(k, Fraction(0)) for k in range(max(powers) + 1)]
    root = simple_rational_root(leading)
    i = max(j for j, d in enumerate(step) if d)
    consts = _coordinate_constants(step, root, i)
    # univariate polynomial in the distinguished unitary w, scaled by T^{-low}
    by_power: dict[int, NovikovSeries] = {}
    for gamma, c in F.coefficients.items():
        coeff = c.shift(sum(a * x for a, x in zip(gamma, q)) - low)
        factor = Fraction(1)
        for j, (a, t) in enumerate(zip(gamma, consts)):
            if j != i:
                factor *= t**a
        coeff = coeff.scale(factor)
        by_power[gamma[i]] = by_power.get(gamma[i], NovikovSeries.zero()) + coeff
    shift = min(by_power)
    degree = max(by_power) - shift
    poly = [by_power.get(k + shift, NovikovSeries.zero()) for k in range(degree + 1)]
    # F(z) = T^low P(w): solving P to relative order emax - low gives F(z) = 0 mod T^emax;
    # never solve to less than emax so the residual stays meaningful when low >= emax
    w = newton_lift_root(poly, NovikovSeries.constant(consts[i]), max(emax - low, emax))
    coords = []
    for j in range(F.n):
        if j == i:
            coords.append(w.shift(q[j]))
        else:
            coords.append(NovikovSeries.monomial(consts[j], q[j]))
    return AnalyticPoint(tuple(coords))
