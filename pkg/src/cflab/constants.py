"""Frozen numerical constants and certified integer thresholds.

All module-level constants are evaluated once at 128-bit precision and kept
as mpmath values; float shadows are provided for fast paths.  Threshold
helpers return integers certified by interval evaluation with escalating
precision, so no deviation-set membership test ever depends on an uncertified
rounding.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

CONSTANT_PREC_BITS = 128
DEFAULT_PREC_BITS = 64

_MAX_THRESHOLD_PREC = 8192


class InvalidInputError(ValueError):
    """An argument violates an operation's documented preconditions."""


class OutOfDomainError(InvalidInputError):
    """A parameter lies outside the mathematical domain of the operation."""


class PrecisionExhaustedError(ArithmeticError):
    """An interval could not be refined enough to certify a result.

    ``certified_digits`` carries how many leading digits were certified
    before refinement ran out.
    """

    def __init__(self, message: str, certified_digits: int = 0):
        super().__init__(message)
        self.certified_digits = certified_digits


class BudgetExceededError(RuntimeError):
    """A node/resource budget ran out before an enumeration completed."""

    def __init__(self, message: str, mass_accounted=None, nodes_visited: int = 0):
        super().__init__(message)
        self.mass_accounted = mass_accounted
        self.nodes_visited = nodes_visited


class BoundaryHitError(RuntimeError):
    """A minimizer was pinned at the edge of its search interval."""


def _at_const_prec(fn):
    with mpmath.workprec(CONSTANT_PREC_BITS):
        return fn()


#: Almost-everywhere limit of log(q_n)/n (pi^2 / (12 log 2)).
LEVY_CONSTANT = _at_const_prec(lambda: mpmath.pi**2 / (12 * mpmath.log(2)))

#: Smallest possible value of the statistic: log of the golden ratio.
MIN_LEVY_CONSTANT = _at_const_prec(lambda: mpmath.log((mpmath.sqrt(5) + 1) / 2))

#: Almost-everywhere Lyapunov exponent of the Gauss map (2 * LEVY_CONSTANT).
LYAPUNOV_CONSTANT = _at_const_prec(lambda: mpmath.pi**2 / (6 * mpmath.log(2)))

#: Validity edge for the lower-tail integer constant: LEVY_CONSTANT - log 2.
LEVY_MINUS_LOG2 = _at_const_prec(lambda: LEVY_CONSTANT - mpmath.log(2))

#: Validity edge for the lower-tail spectral identity.
LEVY_MINUS_MIN = _at_const_prec(lambda: LEVY_CONSTANT - MIN_LEVY_CONSTANT)

LEVY_FLOAT = float(LEVY_CONSTANT)
MIN_LEVY_FLOAT = float(MIN_LEVY_CONSTANT)
LYAPUNOV_FLOAT = float(LYAPUNOV_CONSTANT)

#: 0.995 quantile of the standard normal, for two-sided 99% intervals.
Z_99 = 2.5758293035489004


def _exp_levy_enclosure(n: int, eps: Fraction, sign: int, prec: int):
    """Interval enclosure of exp(n * (LEVY_CONSTANT + sign*eps)) at ``prec`` bits."""
    old = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        b = mpmath.iv.pi**2 / (12 * mpmath.iv.log(2))
        e = mpmath.iv.mpf(eps.numerator) / eps.denominator
        return mpmath.iv.exp(n * (b + sign * e))
    finally:
        mpmath.iv.prec = old


def _stable_int(n: int, eps: Fraction, sign: int, offset: int, round_up: bool) -> int:
    for prec in (64, 128, 256, 512, 1024, 2048, 4096, _MAX_THRESHOLD_PREC):
        enc = _exp_levy_enclosure(n, eps, sign, prec)
        lo, hi = mpmath.mpf(enc.a) + offset, mpmath.mpf(enc.b) + offset
        f = mpmath.ceil if round_up else mpmath.floor
        a, b = int(f(lo)), int(f(hi))
        if a == b:
            return a
    raise PrecisionExhaustedError(
        "threshold straddles an integer at %d bits" % _MAX_THRESHOLD_PREC
    )


def upper_threshold(n: int, eps) -> int:
    """Smallest integer q with log(q)/n >= LEVY_CONSTANT + eps."""
    if n < 1 or eps <= 0:
        raise InvalidInputError("need n >= 1 and eps > 0")
    return _stable_int(n, Fraction(eps), +1, 0, round_up=True)


def lower_threshold(n: int, eps) -> int:
    """Largest integer q with log(q)/n <= LEVY_CONSTANT - eps (0 if none)."""
    if n < 1 or eps <= 0:
        raise InvalidInputError("need n >= 1 and eps > 0")
    return max(_stable_int(n, Fraction(eps), -1, 0, round_up=False), 0)


def ensure_eps_le_levy(eps) -> None:
    """Reject eps beyond the a.e. limit; exact dyadic-vs-constant comparison."""
    e = Fraction(eps)
    with mpmath.workprec(CONSTANT_PREC_BITS):
        if mpmath.mpf(e.numerator) / e.denominator > LEVY_CONSTANT:
            raise OutOfDomainError("eps=%s exceeds the a.e. limit of log(q_n)/n" % eps)


def upper_integer_constant(eps) -> int:
    """Smallest integer >= exp(LEVY_CONSTANT + eps)."""
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    return _stable_int(1, Fraction(eps), +1, 0, round_up=True)


def lower_integer_constant(eps) -> int:
    """Largest integer <= exp(LEVY_CONSTANT - eps) - 1; needs eps <= b - log 2."""
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    eps_f = Fraction(eps)
    with mpmath.workprec(CONSTANT_PREC_BITS):
        edge = LEVY_MINUS_LOG2
        if mpmath.mpf(eps_f.numerator) / eps_f.denominator > edge:
            raise OutOfDomainError(
                "eps=%s exceeds %s; the integer constant would vanish"
                % (eps, mpmath.nstr(edge, 10))
            )
    return _stable_int(1, eps_f, -1, -1, round_up=False)
