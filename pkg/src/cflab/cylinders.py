"""Exact cylinder-interval calculus for continued-fraction digit prefixes.

A prefix (a_1..a_n) addresses the interval with endpoints p_n/q_n and
(p_n+p_{n-1})/(q_n+q_{n-1}); its length is 1/(q_n (q_n+q_{n-1})) exactly.
Tail masses (all children with next digit >= M) come from endpoint geometry
in closed form, never from series summation.  The Lebesgue digit sampler
compares exact rational cumulative sums against a lazily extended dyadic
uniform, so the sampled law is exactly the Lebesgue law of the digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

import mpmath
import numpy as np

from .cf_core import PartialQuotients, as_digits, continuant_pair
from .constants import (
    DEFAULT_PREC_BITS,
    BudgetExceededError,
    InvalidInputError,
)

DEFAULT_NODE_BUDGET = 100_000_000

#: Bits drawn per refinement of the sampler's lazy uniform variate.
_UNIFORM_BLOCK_BITS = 64
#: A digit draw consuming this many bits indicates a broken RNG, not bad luck.
_MAX_UNIFORM_BITS = 4096


@dataclass(frozen=True)
class Cylinder:
    """Exact interval of all points whose expansion starts with ``prefix``."""

    prefix: PartialQuotients
    endpoint_a: Fraction
    endpoint_b: Fraction
    length: Fraction
    p: int
    q: int


@dataclass(frozen=True)
class TailMass:
    """Exact Lebesgue mass of the children of ``prefix`` with digit >= digit_floor."""

    prefix: PartialQuotients
    digit_floor: int
    mass: Fraction


@dataclass(frozen=True)
class ChildRatio:
    """Exact child/parent length ratio with its universal two-sided bounds."""

    ratio: Fraction
    above_lower: bool  # ratio >= 1/(3 a^2)
    below_upper: bool  # ratio <= 2/a^2


def cylinder(prefix: Union[PartialQuotients, Sequence[int]]) -> Cylinder:
    """Exact endpoints and length; the empty prefix gives [0, 1)."""
    prefix = as_digits(prefix)
    p_prev, q_prev, p_cur, q_cur = continuant_pair(prefix)
    e1 = Fraction(p_cur, q_cur)
    e2 = Fraction(p_cur + p_prev, q_cur + q_prev)
    lo, hi = (e1, e2) if e1 < e2 else (e2, e1)
    return Cylinder(
        prefix=prefix,
        endpoint_a=lo,
        endpoint_b=hi,
        length=Fraction(1, q_cur * (q_cur + q_prev)),
        p=p_cur,
        q=q_cur,
    )


def child_ratio(prefix: Union[PartialQuotients, Sequence[int]], a: int) -> ChildRatio:
    """|child with next digit a| / |parent|, checked against [1/(3a^2), 2/a^2]."""
    if a < 1:
        raise InvalidInputError("child digit must be >= 1")
    prefix = as_digits(prefix)
    _, q_prev, _, q_cur = continuant_pair(prefix)
    q_child = a * q_cur + q_prev
    ratio = Fraction(q_cur * (q_cur + q_prev), q_child * (q_child + q_cur))
    return ChildRatio(
        ratio=ratio,
        above_lower=ratio >= Fraction(1, 3 * a * a),
        below_upper=ratio <= Fraction(2, a * a),
    )


def tail_mass(prefix: Union[PartialQuotients, Sequence[int]], digit_floor: int) -> TailMass:
    """Mass of the union over a >= digit_floor of the child cylinders.

    The union is the interval between the limit point p_n/q_n and the far
    endpoint of the digit_floor child, so the mass is
    1/(q_n (digit_floor*q_n + q_{n-1})) exactly.
    """
    if digit_floor < 1:
        raise InvalidInputError("digit floor must be >= 1")
    prefix = as_digits(prefix)
    _, q_prev, _, q_cur = continuant_pair(prefix)
    mass = Fraction(1, q_cur * (digit_floor * q_cur + q_prev))
    return TailMass(prefix=prefix, digit_floor=digit_floor, mass=mass)


def enumerate_level(
    n: int, A: int, budget: int = DEFAULT_NODE_BUDGET
) -> Iterator[Union[Cylinder, TailMass]]:
    """Depth-first walk of the digit tree {1..A}^n with closed-form tails.

    Emits one TailMass(prefix, A+1) at every internal node and one Cylinder
    at every depth-n node, so emitted lengths plus tails sum to exactly 1.
    Digits ascend within each node; the budget counts emitted items.
    """
    if n < 1 or A < 1:
        raise InvalidInputError("need n >= 1 and A >= 1")
    accounted = Fraction(0)
    emitted = 0

    def walk(digits: tuple[int, ...]) -> Iterator[Union[Cylinder, TailMass]]:
        nonlocal accounted, emitted
        if len(digits) == n:
            item: Union[Cylinder, TailMass] = cylinder(digits)
            mass = item.length
        else:
            item = tail_mass(digits, A + 1)
            mass = item.mass
        if emitted >= budget:
            raise BudgetExceededError(
                "node budget %d exhausted" % budget,
                mass_accounted=accounted,
                nodes_visited=emitted,
            )
        emitted += 1
        accounted += mass
        yield item
        if len(digits) < n:
            for a in range(1, A + 1):
                yield from walk(digits + (a,))

    return walk(())


class _LazyUniform:
    """A uniform variate on [0,1) known through a growing dyadic bracket."""

    __slots__ = ("rng", "numerator", "bits")

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.numerator = 0
        self.bits = 0
        self.extend()

    def extend(self) -> None:
        if self.bits >= _MAX_UNIFORM_BITS:
            raise RuntimeError("uniform variate refinement ran away")
        block = int(self.rng.integers(0, 1 << _UNIFORM_BLOCK_BITS, dtype=np.uint64))
        self.numerator = (self.numerator << _UNIFORM_BLOCK_BITS) | block
        self.bits += _UNIFORM_BLOCK_BITS


def _draw_digit(q_prev: int, q_cur: int, u: _LazyUniform) -> int:
    """Next digit under the exact conditional law given the prefix state.

    The conditional CDF after digit j is S_j = 1 - (q+q')/( (j+1) q + q' );
    the digit is the unique a with S_{a-1} <= u < S_a, decided by exact
    integer comparisons against the dyadic bracket [U/2^m, (U+1)/2^m).
    """
    s = q_cur + q_prev
    while True:
        U, m = u.numerator, u.bits
        pow2 = 1 << m
        # candidate from the bracket's left endpoint
        a = (s * U) // (q_cur * (pow2 - U)) + 1
        ok_left = pow2 * s >= (pow2 - U) * (a * q_cur + q_prev)
        ok_right = (pow2 - U - 1) * ((a + 1) * q_cur + q_prev) >= pow2 * s
        if ok_left and ok_right:
            return a
        u.extend()


def sample_digits_lebesgue(n: int, rng: np.random.Generator) -> PartialQuotients:
    """n digits whose joint law is exactly Lebesgue; deterministic per rng state."""
    if n < 1:
        raise InvalidInputError("need n >= 1")
    q_prev, q_cur = 0, 1
    digits = []
    for _ in range(n):
        a = _draw_digit(q_prev, q_cur, _LazyUniform(rng))
        digits.append(a)
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return PartialQuotients(tuple(digits))


def gauss_measure(a, b, prec_bits: int = DEFAULT_PREC_BITS) -> mpmath.mpf:
    """Invariant measure of [a, b]: log((1+b)/(1+a)) / log 2."""
    a, b = Fraction(a), Fraction(b)
    if not (0 <= a < b <= 1):
        raise InvalidInputError("need 0 <= a < b <= 1")
    fa, fb = 1 + a, 1 + b
    with mpmath.workprec(prec_bits):
        num = mpmath.log(fb.numerator) - mpmath.log(fb.denominator)
        num -= mpmath.log(fa.numerator) - mpmath.log(fa.denominator)
        return num / mpmath.log(2)
