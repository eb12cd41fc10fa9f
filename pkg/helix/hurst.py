"""
Rescaled-range (R/S) analysis and the Hurst exponent.

For a series T_1 .. T_N and every prefix length t = 2 .. N:

    m   = mean of the series            (or of the prefix, window centering)
    Z_t = sum_{i<=t} (T_i - m)
    R_t = max(Z_1..Z_t) - min(Z_1..Z_t)
    S_t = population standard deviation of T_1 .. T_t
    (R/S)_t = R_t / S_t ~ C t^H

H is the slope of log(R/S) against log(t).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DegenerateSeriesError, InvalidDistributionError, SeriesTooShortError
from .spectral import TimeSeries, polyfit

# Relative size below which a standard deviation or range counts as zero.
FLAT_TOLERANCE = 1e-12


class Centering(str, Enum):
    SERIES = "series"
    WINDOW = "window"


class Regime(str, Enum):
    ANTI_PERSISTENT = "anti-persistent"
    RANDOM = "random"
    PERSISTENT = "persistent"


@dataclass(frozen=True)
class HurstResult:
    h: float
    intercept: float
    points: tuple
    classification: Regime
    r_squared: float
    centering: Centering

    @property
    def constant(self):
        """C of (R/S)_t = C t^H (natural-log intercept exponentiated)."""
        return float(np.exp(self.intercept))


def _values(series):
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=float).ravel()


def rescaled_range(series, centering=Centering.SERIES):
    """
    (t, (R/S)_t) for t = 2 .. N. Prefixes with S_t = 0 (and R_t = 0, which
    has no logarithm) are skipped.
    """
    x = _values(series)
    centering = Centering(centering)
    n = x.size
    if n < 3:
        raise SeriesTooShortError(f"R/S analysis needs at least 3 values, got {n}")
    if not np.all(np.isfinite(x)):
        raise InvalidDistributionError("series values must be finite")

    scale = max(float(np.abs(x).max()), 1.0) * FLAT_TOLERANCE
    points = []
    z_full = np.cumsum(x - x.mean())
    running_max = np.maximum.accumulate(z_full)
    running_min = np.minimum.accumulate(z_full)
    for t in range(2, n + 1):
        prefix = x[:t]
        s = float(prefix.std())
        if centering is Centering.SERIES:
            r = float(running_max[t - 1] - running_min[t - 1])
        else:
            z = np.cumsum(prefix - prefix.mean())
            r = float(z.max() - z.min())
        if s <= scale or r <= scale * t:
            continue
        points.append((t, r / s))

    if len(points) < 2:
        raise DegenerateSeriesError(
            f"only {len(points)} usable R/S point(s); the series is (nearly) constant"
        )
    return points


def classify(h, band=0.05):
    if h < 0.5 - band:
        return Regime.ANTI_PERSISTENT
    if h > 0.5 + band:
        return Regime.PERSISTENT
    return Regime.RANDOM


def hurst_exponent(series, centering=Centering.SERIES, band=0.05):
    """OLS slope of ln (R/S)_t against ln t."""
    centering = Centering(centering)
    points = rescaled_range(series, centering)
    t, rs = np.array(points, dtype=float).T
    fit = polyfit(np.log(t), np.log(rs), degree=1)
    intercept, h = fit.coefficients
    return HurstResult(
        h=h,
        intercept=intercept,
        points=tuple((int(step), float(value)) for step, value in points),
        classification=classify(h, band),
        r_squared=fit.r_squared,
        centering=centering,
    )
