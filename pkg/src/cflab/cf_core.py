"""Exact continued-fraction arithmetic.

Expansions, convergents, Gauss-map orbits and the classical approximation
inequalities, all over exact rationals or certified rational intervals.
Terminating expansions are canonical (final digit >= 2), which makes
``expand_rational`` and ``convergents`` mutually inverse on reduced
fractions.  Every emitted digit of an interval-valued input is certified:
a digit is produced only when the whole current interval shares it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import mpmath

from .constants import (
    DEFAULT_PREC_BITS,
    InvalidInputError,
    PrecisionExhaustedError,
)

MAX_TERMS_DEFAULT = 10_000

#: Hard cap on interval refinement requests before giving up.
_MAX_REFINE_BITS = 1 << 20


@dataclass(frozen=True)
class PartialQuotients:
    """A finite digit sequence (a_1, ..., a_n); the address of a cylinder."""

    digits: tuple[int, ...]

    def __post_init__(self):
        if any((not isinstance(a, int)) or a < 1 for a in self.digits):
            raise InvalidInputError("all partial quotients must be integers >= 1")

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    @property
    def n(self) -> int:
        return len(self.digits)

    @classmethod
    def of(cls, *digits: int) -> "PartialQuotients":
        return cls(tuple(digits))


def as_digits(value: Union["PartialQuotients", Sequence[int]]) -> PartialQuotients:
    if isinstance(value, PartialQuotients):
        return value
    return PartialQuotients(tuple(value))


@dataclass(frozen=True)
class Convergent:
    """Exact convergent numerator/denominator pair at a given index."""

    p: int
    q: int
    index: int


@dataclass(frozen=True)
class LevyStatistic:
    """Finite-level statistic log(q_n)/n in nats per step."""

    n: int
    value: mpmath.mpf
    prec_bits: int


class PrecisionReal:
    """A point of [0,1): exact rational, or a rational interval [lo, hi].

    Interval values may carry a ``refine`` callback mapping a bit count to a
    fresh enclosure of width <= 2**-bits; digit extraction calls it on demand.
    """

    __slots__ = ("kind", "value", "lo", "hi", "refine", "_bits")

    def __init__(self, kind, value=None, lo=None, hi=None, refine=None, bits=0):
        self.kind = kind
        self.value = value
        self.lo = lo
        self.hi = hi
        self.refine = refine
        self._bits = bits
        if kind == "rational":
            if not (0 <= value < 1):
                raise InvalidInputError("rational point must lie in [0, 1)")
        elif kind == "interval":
            if not (0 <= lo < hi <= 1):
                raise InvalidInputError("interval must satisfy 0 <= lo < hi <= 1")
        else:
            raise InvalidInputError("kind must be 'rational' or 'interval'")

    @classmethod
    def rational(cls, p, q=None) -> "PrecisionReal":
        value = Fraction(p) if q is None else Fraction(p, q)
        return cls("rational", value=value)

    @classmethod
    def interval(
        cls,
        lo,
        hi,
        refine: Optional[Callable[[int], tuple[Fraction, Fraction]]] = None,
        bits: int = 0,
    ) -> "PrecisionReal":
        return cls("interval", lo=Fraction(lo), hi=Fraction(hi), refine=refine, bits=bits)

    @classmethod
    def golden_ratio(cls, bits: int = 166) -> "PrecisionReal":
        """(sqrt(5)-1)/2 as a self-refining interval of width 2**-(bits+1)."""

        def bounds(nbits: int) -> tuple[Fraction, Fraction]:
            s = math.isqrt(5 << (2 * nbits))  # floor(sqrt(5) * 2**nbits)
            den = 1 << (nbits + 1)
            return Fraction(s - (1 << nbits), den), Fraction(s + 1 - (1 << nbits), den)

        lo, hi = bounds(bits)
        return cls("interval", lo=lo, hi=hi, refine=bounds, bits=bits)

    def midpoint(self) -> Fraction:
        if self.kind == "rational":
            return self.value
        return (self.lo + self.hi) / 2

    def width(self) -> Fraction:
        return Fraction(0) if self.kind == "rational" else self.hi - self.lo

    def __repr__(self):
        if self.kind == "rational":
            return f"PrecisionReal({self.value})"
        return f"PrecisionReal([{self.lo}, {self.hi}])"


def expand_rational(p: int, q: int, max_terms: int = MAX_TERMS_DEFAULT) -> PartialQuotients:
    """Digits of p/q in [0,1) by Euclidean division, truncated at max_terms.

    The terminating expansion never ends in 1 (the division algorithm cannot
    produce it for arguments in (0,1)), so the canonical form is automatic.
    """
    if q == 0:
        raise InvalidInputError("denominator must be nonzero")
    if p < 0 or p >= q:
        raise InvalidInputError("need 0 <= p < q")
    digits = []
    a, b = p, q  # expanding a/b
    while a != 0 and len(digits) < max_terms:
        d, r = divmod(b, a)
        digits.append(d)
        a, b = r, a
    return PartialQuotients(tuple(digits))


def _certified_digits_once(lo: Fraction, hi: Fraction, n: int) -> list[int]:
    """Digits shared by the whole interval [lo, hi]; stops at the first straddle."""
    digits: list[int] = []
    while len(digits) < n:
        if lo <= 0:
            break  # 1/x unbounded over the interval: digit undecidable
        inv_hi, inv_lo = 1 / hi, 1 / lo  # exact Fraction reciprocals
        d = inv_hi.numerator // inv_hi.denominator
        if d != inv_lo.numerator // inv_lo.denominator or d < 1:
            break
        digits.append(d)
        lo, hi = inv_hi - d, inv_lo - d
    return digits


def _interval_digits(x: PrecisionReal, n: int) -> tuple[list[int], Fraction, Fraction]:
    """Certified first-n digits and the enclosure that certifies them."""
    bits = max(x._bits, 32)
    lo, hi = x.lo, x.hi
    while True:
        digits = _certified_digits_once(lo, hi, n)
        if len(digits) >= n:
            return digits, lo, hi
        if x.refine is None or bits >= _MAX_REFINE_BITS:
            raise PrecisionExhaustedError(
                "interval refinement exhausted after %d certified digits" % len(digits),
                certified_digits=len(digits),
            )
        bits *= 2
        lo, hi = x.refine(bits)


def expand_real(x: PrecisionReal, n: int) -> PartialQuotients:
    """First n certified digits of x; fewer only for terminating rationals."""
    if n < 0:
        raise InvalidInputError("digit count must be >= 0")
    if x.kind == "rational":
        v = x.value
        return expand_rational(v.numerator, v.denominator, max_terms=n)
    digits, _, _ = _interval_digits(x, n)
    return PartialQuotients(tuple(digits))


def convergents(pq: Union[PartialQuotients, Sequence[int]]) -> list[Convergent]:
    """(p_1,q_1)..(p_n,q_n) from p_k = a_k p_{k-1} + p_{k-2}, q_k likewise.

    Seeds p_{-1}=1, q_{-1}=0, p_0=0, q_0=1; exact arbitrary-size integers.
    """
    pq = as_digits(pq)
    out = []
    p_prev, p_cur = 1, 0
    q_prev, q_cur = 0, 1
    for i, a in enumerate(pq, start=1):
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        out.append(Convergent(p=p_cur, q=q_cur, index=i))
    return out


def continuant_pair(pq: Union[PartialQuotients, Sequence[int]]) -> tuple[int, int, int, int]:
    """(p_{n-1}, q_{n-1}, p_n, q_n) for the digit sequence; seeds for n=0."""
    p_prev, p_cur = 1, 0
    q_prev, q_cur = 0, 1
    for a in as_digits(pq):
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return p_prev, q_prev, p_cur, q_cur


def _gauss_step_rational(v: Fraction) -> Fraction:
    if v == 0:
        return Fraction(0)
    r = 1 / v
    return r - (r.numerator // r.denominator)


def gauss_orbit(x: PrecisionReal, n: int) -> list[PrecisionReal]:
    """(x, Tx, ..., T^{n-1}x) for T(x) = 1/x - floor(1/x), T(0) = 0."""
    if n < 0:
        raise InvalidInputError("orbit length must be >= 0")
    if x.kind == "rational":
        out = []
        v = x.value
        for _ in range(n):
            out.append(PrecisionReal.rational(v))
            v = _gauss_step_rational(v)
        return out
    if n == 0:
        return []
    digits, lo, hi = _interval_digits(x, n - 1)
    out = []
    for k in range(n):
        out.append(PrecisionReal.interval(lo, hi))
        if k < n - 1:
            a = digits[k]
            lo, hi = 1 / hi - a, 1 / lo - a
    return out


@dataclass(frozen=True)
class DiophantineLevel:
    """Truth of the four-link approximation chain at one level.

    Links: 1/(2 q_{n+1}^2) <= 1/(2 q_n q_{n+1}) <= |x - p_n/q_n|
           <= 1/(q_n q_{n+1}) <= 1/q_n^2.
    For interval x a link is reported True only when certified.
    """

    n: int
    links: tuple[bool, bool, bool, bool]

    @property
    def all_hold(self) -> bool:
        return all(self.links)


def verify_diophantine(
    x: PrecisionReal, pq: Union[PartialQuotients, Sequence[int]]
) -> list[DiophantineLevel]:
    """Check the approximation chain for n = 1 .. len(pq)-1."""
    pq = as_digits(pq)
    if len(pq) < 2:
        raise InvalidInputError("need at least 2 digits to form q_{n+1}")
    expanded = expand_real(x, len(pq))
    if tuple(expanded.digits[: len(pq)]) != pq.digits:
        raise InvalidInputError("digit sequence is not the expansion of x")

    convs = convergents(pq)
    out = []
    for idx in range(len(convs) - 1):
        c, c_next = convs[idx], convs[idx + 1]
        lo_lo = Fraction(1, 2 * c_next.q * c_next.q)
        lo = Fraction(1, 2 * c.q * c_next.q)
        hi = Fraction(1, c.q * c_next.q)
        hi_hi = Fraction(1, c.q * c.q)
        approx = Fraction(c.p, c.q)
        if x.kind == "rational":
            dist_lo = dist_hi = abs(x.value - approx)
        else:
            if approx < x.lo:
                dist_lo, dist_hi = x.lo - approx, x.hi - approx
            elif approx > x.hi:
                dist_lo, dist_hi = approx - x.hi, approx - x.lo
            else:
                dist_lo, dist_hi = Fraction(0), max(x.hi - approx, approx - x.lo)
        out.append(
            DiophantineLevel(
                n=c.index,
                links=(lo_lo <= lo, lo <= dist_lo, dist_hi <= hi, hi <= hi_hi),
            )
        )
    return out


def levy_statistic(
    pq: Union[PartialQuotients, Sequence[int]], prec_bits: int = DEFAULT_PREC_BITS
) -> LevyStatistic:
    """log(q_n)/n from the exact denominator, at the stated working precision."""
    pq = as_digits(pq)
    if len(pq) == 0:
        raise InvalidInputError("empty digit sequence has no statistic")
    q = continuant_pair(pq)[3]
    with mpmath.workprec(prec_bits):
        value = mpmath.log(q) / len(pq)
    return LevyStatistic(n=len(pq), value=value, prec_bits=prec_bits)
