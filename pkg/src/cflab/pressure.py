"""Finite-level pressure brackets, expectation brackets, and the spectrum.

The level-n pressure sum is evaluated by a certified dynamic program on the
one-dimensional state y = q_{k-1}/q_k in [0,1]: every per-digit weight is a
monotone function of y, so binning y and propagating lower/upper envelopes
yields rigorous two-sided bounds at cost O(n * A * bins) instead of the A^n
cost of enumerating digit words.  Digits above the truncation A are absorbed
by integral tail bounds at every level, on both sides of the bracket.

Two normalizations of the same growth rate are reported:

* primary ``lower``/``upper``: (1/n) log of the sum of cylinder-length
  powers  sum |I(w)|^theta.  At theta = 1 this sum is exactly 1 for every n,
  so the level-n bracket pins the P(1) = 0 anchor tightly.
* ``power_sum_lower``/``power_sum_upper``: (1/n) log of the plain
  denominator power sum  sum q_n(w)^{-2 theta}, which differs from the
  primary by at most (theta log 2)/n and has the same n -> infinity limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import (
    MIN_LEVY_FLOAT,
    Z_99,
    BoundaryHitError,
    InvalidInputError,
    OutOfDomainError,
)
from .cylinders import sample_digits_lebesgue
from .cf_core import continuant_pair

DEFAULT_BINS = 2048

#: Per-level multiplicative slack absorbing float rounding in the DP.
_LEVEL_ROUNDING = 1e-11


@dataclass(frozen=True)
class PressureEstimate:
    """Certified bracket of the level-n pressure at one exponent theta."""

    theta: float
    level_n: int
    truncation_a: int
    lower: float
    upper: float
    power_sum_lower: float
    power_sum_upper: float
    bins: int

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class SpectrumValue:
    """Value of the concentration spectrum at one growth rate gamma."""

    gamma: float
    tau: float
    minimizer_theta: float
    level_n: int
    truncation_a: int


@dataclass(frozen=True)
class ExpectationEstimate:
    """Bracket or confidence interval for E(q_n^{2 theta})."""

    theta: float
    level_n: int
    value_lower: float
    value_upper: float
    method: str  # "exact-cylinder" | "monte-carlo"
    samples: int = 0


@dataclass(frozen=True)
class SlopeEstimate:
    """Central-difference slope of the pressure at theta = 1."""

    value: float
    error: float
    level_n: int
    truncation_a: int
    h: float


def _weight_bounds(kind: str, theta: float, a: int, ylo, yhi):
    """Outward bounds of the per-digit weight over a y-interval (vectorized)."""
    if kind == "length":
        tlo = (1.0 + ylo) / ((a + yhi) * (a + 1.0 + yhi))
        thi = (1.0 + yhi) / ((a + ylo) * (a + 1.0 + ylo))
        return tlo**theta, thi**theta
    if kind == "denominator":
        e = -2.0 * theta
        return (a + yhi) ** e, (a + ylo) ** e
    if kind == "expectation":
        s = 2.0 * theta - 1.0  # negative on the valid domain theta < 1/2
        lo = (1.0 + ylo) * (a + yhi) ** s / (a + 1.0 + yhi)
        hi = (1.0 + yhi) * (a + ylo) ** s / (a + 1.0 + ylo)
        return lo, hi
    raise InvalidInputError("unknown weight kind %r" % kind)


def _tail_bounds(kind: str, theta: float, A: int, ylo, yhi):
    """Outward bounds of the summed weight of all digits a > A (vectorized).

    Integral comparisons: a decreasing positive f has
    integral_{A+1}^{inf} f <= sum_{a>A} f(a) <= integral_{A}^{inf} f.
    """
    if kind == "length":
        if theta == 1.0:
            # telescoping closed form (1+y)/(A+1+y)
            return (1.0 + ylo) / (A + 1.0 + yhi), (1.0 + yhi) / (A + 1.0 + ylo)
        c = 2.0 * theta - 1.0
        lo = (1.0 + ylo) ** theta * (A + 2.0 + yhi) ** (-c) / c
        hi = (1.0 + yhi) ** theta * (A + ylo) ** (-c) / c
        return lo, hi
    if kind == "denominator":
        c = 2.0 * theta - 1.0
        return (A + 1.0 + yhi) ** (-c) / c, (A + ylo) ** (-c) / c
    if kind == "expectation":
        c = 1.0 - 2.0 * theta
        lo = (1.0 + ylo) * (A + 2.0 + yhi) ** (-c) / c
        hi = (1.0 + yhi) * (A + ylo) ** (-c) / c
        return lo, hi
    raise InvalidInputError("unknown weight kind %r" % kind)


def _log_level_sum(kind: str, theta: float, n: int, A: int, bins: int):
    """Certified (log_lower, log_upper) of the full-alphabet level-n sum."""
    ylo = np.arange(bins, dtype=float) / bins
    yhi = ylo + 1.0 / bins
    glo = np.ones(bins)
    ghi = np.ones(bins)
    log_scale = 0.0
    jt = min(bins // (A + 1) + 1, bins)  # bins reachable by pruned digits

    digits = range(1, A + 1)
    for _ in range(n - 1):
        new_lo = np.zeros(bins)
        new_hi = np.zeros(bins)
        tail_glo = glo[:jt].min()
        tail_ghi = ghi[:jt].max()
        for a in digits:
            wlo, whi = _weight_bounds(kind, theta, a, ylo, yhi)
            s_lo = 1.0 / (a + yhi)
            s_hi = 1.0 / (a + ylo)
            i0 = np.clip((s_lo * bins).astype(int) - 1, 0, bins - 1)
            i1 = np.clip((s_hi * bins).astype(int) + 1, 0, bins - 1)
            img_lo = glo[i0]
            img_hi = ghi[i0]
            for k in (1, 2, 3):
                idx = np.minimum(i0 + k, i1)
                img_lo = np.minimum(img_lo, glo[idx])
                img_hi = np.maximum(img_hi, ghi[idx])
            new_lo += wlo * img_lo
            new_hi += whi * img_hi
        tlo, thi = _tail_bounds(kind, theta, A, ylo, yhi)
        new_lo += tlo * tail_glo
        new_hi += thi * tail_ghi
        new_lo *= 1.0 - _LEVEL_ROUNDING
        new_hi *= 1.0 + _LEVEL_ROUNDING
        scale = 2.0 ** round(math.log2(new_hi.max()))
        glo, ghi = new_lo / scale, new_hi / scale
        log_scale += math.log(scale)

    # final step at the exact root state y = 0
    zero = np.zeros(1)
    s_lo = s_hi = 0.0
    total_lo = 0.0
    total_hi = 0.0
    for a in digits:
        wlo, whi = _weight_bounds(kind, theta, a, zero, zero)
        j = bins // a
        cover = (max(j - 1, 0), min(j, bins - 1))
        total_lo += wlo[0] * min(glo[cover[0]], glo[cover[1]])
        total_hi += whi[0] * max(ghi[cover[0]], ghi[cover[1]])
    tlo, thi = _tail_bounds(kind, theta, A, zero, zero)
    total_lo += tlo[0] * glo[:jt].min()
    total_hi += thi[0] * ghi[:jt].max()
    total_lo *= 1.0 - _LEVEL_ROUNDING
    total_hi *= 1.0 + _LEVEL_ROUNDING
    return log_scale + math.log(total_lo), log_scale + math.log(total_hi)


def pressure_partial(
    theta: float,
    n: int,
    A: int,
    bins: int = DEFAULT_BINS,
    with_power_sum: bool = True,
) -> PressureEstimate:
    """Certified bracket of the level-n pressure at exponent theta > 1/2."""
    if theta <= 0.5:
        raise OutOfDomainError("pressure exponent must exceed 1/2")
    if n < 1:
        raise InvalidInputError("level must be >= 1")
    if A < 2:
        raise InvalidInputError("digit truncation must be >= 2")
    len_lo, len_hi = _log_level_sum("length", theta, n, A, bins)
    if with_power_sum:
        pow_lo, pow_hi = _log_level_sum("denominator", theta, n, A, bins)
    else:
        pow_lo, pow_hi = math.nan, math.nan
    return PressureEstimate(
        theta=theta,
        level_n=n,
        truncation_a=A,
        lower=len_lo / n,
        upper=len_hi / n,
        power_sum_lower=pow_lo / n,
        power_sum_upper=pow_hi / n,
        bins=bins,
    )


@dataclass(frozen=True)
class PressureConfig:
    """Shared evaluation parameters for pressure-driven searches."""

    level_n: int = 10
    truncation_a: int = 60
    bins: int = DEFAULT_BINS
    theta_margin: float = 1e-3
    theta_max: float = 8.0
    gamma_margin: float = 0.1
    search_tol: float = 1e-4


class PressureTable:
    """Memoized pressure evaluations at fixed (level, truncation, bins)."""

    def __init__(self, config: Optional[PressureConfig] = None):
        self.config = config or PressureConfig()
        self._cache: dict[float, PressureEstimate] = {}

    def estimate(self, theta: float) -> PressureEstimate:
        got = self._cache.get(theta)
        if got is None:
            c = self.config
            got = pressure_partial(
                theta, c.level_n, c.truncation_a, c.bins, with_power_sum=False
            )
            self._cache[theta] = got
        return got

    def midpoint(self, theta: float) -> float:
        return self.estimate(theta).midpoint


def as_table(pressure) -> PressureTable:
    if pressure is None:
        return PressureTable()
    if isinstance(pressure, PressureTable):
        return pressure
    if isinstance(pressure, PressureConfig):
        return PressureTable(pressure)
    raise InvalidInputError("expected a PressureConfig or PressureTable")


def minimize_convex(f, lo: float, hi: float, tol: float, coarse: int = 33):
    """Coarse grid scan followed by golden-section refinement.

    Returns (argmin, min).  Raises BoundaryHitError when the coarse minimum
    sits at the right edge (the search window was too small).
    """
    xs = [lo + (hi - lo) * i / (coarse - 1) for i in range(coarse)]
    vals = [f(x) for x in xs]
    i = min(range(coarse), key=vals.__getitem__)
    if i == coarse - 1:
        raise BoundaryHitError("minimizer pinned at the search boundary")
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, coarse - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def tau_spectrum(gamma: float, pressure=None) -> SpectrumValue:
    """Spectrum value tau(gamma) = inf_theta {2 gamma theta + P(theta)} / (2 gamma).

    The infimum over the computable domain theta > 1/2 is taken; gamma must
    stay a configured margin above the minimal growth rate, where the
    minimizing theta diverges.
    """
    table = as_table(pressure)
    cfg = table.config
    if gamma < MIN_LEVY_FLOAT + cfg.gamma_margin:
        raise OutOfDomainError(
            "gamma=%g is below the minimal growth rate plus margin" % gamma
        )
    lo = 0.5 + cfg.theta_margin

    def objective(theta: float) -> float:
        return 2.0 * gamma * theta + table.midpoint(theta)

    theta_star, value = minimize_convex(objective, lo, cfg.theta_max, cfg.search_tol)
    return SpectrumValue(
        gamma=gamma,
        tau=value / (2.0 * gamma),
        minimizer_theta=theta_star,
        level_n=cfg.level_n,
        truncation_a=cfg.truncation_a,
    )


def pressure_slope_at_one(
    n: int, A: int, h: float, bins: int = DEFAULT_BINS
) -> SlopeEstimate:
    """Central difference (P_n(1+h) - P_n(1-h)) / (2h) from bracket midpoints.

    The error estimate combines the bracket half-widths with a Richardson
    comparison against the half-step difference (truncation in h^2).
    """
    if not (0.0 < h <= 0.25):
        raise InvalidInputError("need 0 < h <= 1/4")
    plus = pressure_partial(1.0 + h, n, A, bins)
    minus = pressure_partial(1.0 - h, n, A, bins)
    slope = (plus.midpoint - minus.midpoint) / (2.0 * h)
    plus_half = pressure_partial(1.0 + h / 2, n, A, bins)
    minus_half = pressure_partial(1.0 - h / 2, n, A, bins)
    slope_half = (plus_half.midpoint - minus_half.midpoint) / h
    bracket_term = (plus.width + minus.width) / (4.0 * h)
    trunc_term = abs(slope - slope_half) * (4.0 / 3.0)
    return SlopeEstimate(
        value=slope,
        error=bracket_term + trunc_term,
        level_n=n,
        truncation_a=A,
        h=h,
    )


def expectation_qn(
    theta: float,
    n: int,
    method: str = "exact-cylinder",
    A: int = 60,
    bins: int = DEFAULT_BINS,
    mc_samples: int = 10_000,
    rng=None,
) -> ExpectationEstimate:
    """Bracket or Monte Carlo estimate of E(q_n^{2 theta}) for theta < 1/2.

    The exact method sums q_n^{2 theta} * |I(w)| over the truncated digit
    tree with two-sided tail bounds; Monte Carlo averages q_n^{2 theta} over
    exact-Lebesgue digit samples with a 99% CLT interval.
    """
    if theta >= 0.5:
        raise OutOfDomainError("expectation exponent must satisfy theta < 1/2")
    if n < 1:
        raise InvalidInputError("level must be >= 1")
    if method == "exact-cylinder":
        log_lo, log_hi = _log_level_sum("expectation", theta, n, A, bins)
        return ExpectationEstimate(
            theta=theta,
            level_n=n,
            value_lower=math.exp(log_lo),
            value_upper=math.exp(log_hi),
            method=method,
        )
    if method == "monte-carlo":
        if rng is None:
            raise InvalidInputError("monte-carlo method needs an rng")
        if mc_samples < 2:
            raise InvalidInputError("need at least 2 samples")
        vals = np.empty(mc_samples)
        for i in range(mc_samples):
            digits = sample_digits_lebesgue(n, rng)
            q = continuant_pair(digits)[3]
            vals[i] = math.exp(2.0 * theta * math.log(q))
        mean = float(vals.mean())
        half = Z_99 * float(vals.std(ddof=1)) / math.sqrt(mc_samples)
        return ExpectationEstimate(
            theta=theta,
            level_n=n,
            value_lower=mean - half,
            value_upper=mean + half,
            method=method,
            samples=mc_samples,
        )
    raise InvalidInputError("unknown method %r" % method)
