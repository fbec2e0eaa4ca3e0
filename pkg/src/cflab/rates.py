"""Deviation rate functions and the explicit finite-level lower-bound constants.

theta1(eps) and theta2(eps) are the exponential decay exponents of the
upper/lower deviation sets of log(q_n)/n, computed as infima of convex
objectives built on a shared pressure table.  Each also has a spectral form
2*gamma*(tau(gamma) - 1) evaluated through the same table, which serves as a
Legendre-duality cross-check rather than an independent estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .constants import (
    CONSTANT_PREC_BITS,
    LEVY_FLOAT,
    LEVY_MINUS_MIN,
    BoundaryHitError,
    InvalidInputError,
    OutOfDomainError,
    lower_integer_constant,
    upper_integer_constant,
)
from .pressure import as_table, minimize_convex, tau_spectrum

#: Numerical-zero tolerance for the strict negativity postcondition: the
#: objective at vanishing eps is an O(eps^2) dip resolved through bracket
#: midpoints, so exact sign checks would be noise-limited.
_NEGATIVITY_TOL = 1e-6

#: Keep t away from the open right endpoint, where the pressure argument
#: approaches its singular edge.
_UPPER_T_EDGE = 1e-3


class RateComputationError(RuntimeError):
    """A rate-function postcondition failed (diagnostic, not averaged away)."""


@dataclass(frozen=True)
class RateResult:
    """One rate-function value in nats per step (negative by the theory)."""

    epsilon: float
    side: str  # "upper" | "lower"
    value: float
    minimizer_t: float
    method: str  # "direct-inf" | "via-tau"


@dataclass(frozen=True)
class LowerBoundConstant:
    """Integer constant and the finite-level bound -2 log(c) - log 3."""

    epsilon: float
    side: str
    integer_constant: int
    bound: float


def theta1(epsilon: float, pressure=None) -> RateResult:
    """Upper-tail rate: inf over 0 < t < 1 of -t(b+eps) + P(1 - t/2)."""
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")
    table = as_table(pressure)
    target = LEVY_FLOAT + epsilon

    def objective(t: float) -> float:
        return -t * target + table.midpoint(1.0 - t / 2.0)

    t_star, value = minimize_convex(
        objective, 1e-9, 1.0 - _UPPER_T_EDGE, table.config.search_tol
    )
    if value >= _NEGATIVITY_TOL:
        raise RateComputationError(
            "upper rate not negative: %g at eps=%g" % (value, epsilon)
        )
    if value <= -target:
        raise RateComputationError(
            "upper rate below -(b+eps): %g at eps=%g" % (value, epsilon)
        )
    return RateResult(
        epsilon=epsilon, side="upper", value=value, minimizer_t=t_star,
        method="direct-inf",
    )


def theta2(epsilon: float, pressure=None, t_max: float = 8.0) -> RateResult:
    """Lower-tail rate: inf over t > 0 of t(b-eps) + P(1 + t/2).

    A minimizer pinned at t_max is retried once with the window enlarged,
    then reported as an error.
    """
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")
    if epsilon > LEVY_FLOAT:
        raise OutOfDomainError("epsilon exceeds the a.e. limit")
    table = as_table(pressure)
    target = LEVY_FLOAT - epsilon

    def objective(t: float) -> float:
        return t * target + table.midpoint(1.0 + t / 2.0)

    tol = table.config.search_tol
    try:
        t_star, value = minimize_convex(objective, 1e-9, t_max, tol)
    except BoundaryHitError:
        t_star, value = minimize_convex(objective, 1e-9, 4.0 * t_max, tol)
    if value >= _NEGATIVITY_TOL:
        raise RateComputationError(
            "lower rate not negative: %g at eps=%g" % (value, epsilon)
        )
    return RateResult(
        epsilon=epsilon, side="lower", value=value, minimizer_t=t_star,
        method="direct-inf",
    )


def theta_via_tau(epsilon: float, side: str, pressure=None) -> RateResult:
    """Spectral form 2*gamma*(tau(gamma) - 1) with gamma = b +/- eps.

    The lower-tail form is only valid while gamma stays above the minimal
    growth rate, i.e. eps <= b - log((sqrt 5 + 1)/2).
    """
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")
    table = as_table(pressure)
    if side == "upper":
        gamma = LEVY_FLOAT + epsilon
    elif side == "lower":
        with mpmath.workprec(CONSTANT_PREC_BITS):
            if epsilon > LEVY_MINUS_MIN:
                raise OutOfDomainError(
                    "spectral identity invalid for eps > b - log(golden)"
                )
        gamma = LEVY_FLOAT - epsilon
    else:
        raise InvalidInputError("side must be 'upper' or 'lower'")
    sv = tau_spectrum(gamma, table)
    value = 2.0 * gamma * (sv.tau - 1.0)
    t_star = 2.0 * abs(1.0 - sv.minimizer_theta)
    return RateResult(
        epsilon=epsilon, side=side, value=value, minimizer_t=t_star,
        method="via-tau",
    )


def lower_bound_constant(epsilon: float, side: str) -> LowerBoundConstant:
    """Integer constant c and the finite-level decay bound -2 log c - log 3."""
    if side == "upper":
        c = upper_integer_constant(epsilon)
    elif side == "lower":
        c = lower_integer_constant(epsilon)
    else:
        raise InvalidInputError("side must be 'upper' or 'lower'")
    return LowerBoundConstant(
        epsilon=epsilon,
        side=side,
        integer_constant=c,
        bound=-2.0 * math.log(c) - math.log(3.0),
    )
