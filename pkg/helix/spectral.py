"""
Discrete Fourier decomposition of synergy series, per-group spectra and
polynomial fits of amplitudes against synergy.

Coefficient convention for a series x_0 .. x_{L-1}:

    A   = (1/L) sum x_w
    B_l = (2/L) sum x_w cos(2 pi l w / L)      0 < l < L/2
    D_l = (2/L) sum x_w sin(2 pi l w / L)
    B_{L/2} = (1/L) sum x_w cos(pi w),  D_{L/2} = 0   (even L)

so that x_w = A + sum_l [B_l cos(2 pi l w / L) + D_l sin(2 pi l w / L)].
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .decomposition import decompose_panel
from .exceptions import (
    InsufficientPointsError,
    InvalidDistributionError,
    SeriesTooShortError,
    ShapeMismatchError,
    SingularFitError,
)
from .tensor import AXES, resolve_axis

logger = logging.getLogger(__name__)


def _readonly(values):
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class TimeSeries:
    start_year: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size < 2:
            raise SeriesTooShortError(f"a series needs at least 2 values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise InvalidDistributionError("series values must be finite")
        object.__setattr__(self, "values", _readonly(values))

    def __len__(self):
        return self.values.size

    @property
    def years(self):
        return tuple(range(self.start_year, self.start_year + len(self)))


@dataclass(frozen=True)
class SpectrumResult:
    """Constant A and coefficient pairs (B_l, D_l) for l = 1 .. floor(L/2)."""

    constant: float
    b: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    length: int
    start_year: int = 0

    def __post_init__(self):
        object.__setattr__(self, "b", _readonly(self.b))
        object.__setattr__(self, "d", _readonly(self.d))
        if self.b.shape != self.d.shape or self.b.size != self.length // 2:
            raise ShapeMismatchError(
                f"{self.b.size} cosine and {self.d.size} sine coefficients do not fit length {self.length}"
            )

    @property
    def frequencies(self):
        return np.arange(1, self.b.size + 1)

    @property
    def moduli(self):
        return np.hypot(self.b, self.d)

    @property
    def periods(self):
        """Period of each component in samples (years for annual data)."""
        return self.length / self.frequencies

    def relative_inputs(self):
        """Each component's share of the summed moduli."""
        moduli = self.moduli
        total = moduli.sum()
        return moduli / total if total > 0 else np.zeros_like(moduli)

    def components(self):
        return [
            {
                "l": int(l),
                "period": float(period),
                "b": float(b),
                "d": float(d),
                "c": float(c),
            }
            for l, period, b, d, c in zip(self.frequencies, self.periods, self.b, self.d, self.moduli)
        ]


def _basis(length):
    w = np.arange(length)
    l = np.arange(1, length // 2 + 1)
    angle = 2.0 * np.pi * np.outer(l, w) / length
    return np.cos(angle), np.sin(angle)


def dft(series):
    """Naive O(L^2) real DFT; exact for any length, prime lengths included."""
    if not isinstance(series, TimeSeries):
        series = TimeSeries(start_year=0, values=series)
    x = series.values
    length = x.size
    cos, sin = _basis(length)
    b = (2.0 / length) * (cos @ x)
    d = (2.0 / length) * (sin @ x)
    if length % 2 == 0:
        b[-1] = (1.0 / length) * (cos[-1] @ x)
        d[-1] = 0.0
    return SpectrumResult(
        constant=float(x.mean()),
        b=b,
        d=d,
        length=length,
        start_year=series.start_year,
    )


def inverse_dft(spectrum, length):
    """Evaluate A + sum_l F_l(w) at w = 0 .. length-1."""
    if spectrum.b.size != length // 2 or spectrum.d.size != length // 2:
        raise ShapeMismatchError(
            f"spectrum with {spectrum.b.size} components cannot describe a length-{length} series"
        )
    cos, sin = _basis(length)
    values = spectrum.constant + spectrum.b @ cos + spectrum.d @ sin
    return TimeSeries(start_year=spectrum.start_year, values=values)


# ---------------------------------------------------------------------------
# Panel spectra
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class GroupSpectra:
    axis: str
    groups: dict
    aggregate: SpectrumResult

    def additivity_residual(self):
        """Largest coefficient-wise gap between the aggregate and the group sum."""
        spectra = list(self.groups.values())
        constant = abs(sum(spectrum.constant for spectrum in spectra) - self.aggregate.constant)
        b = np.abs(np.sum([spectrum.b for spectrum in spectra], axis=0) - self.aggregate.b).max(initial=0.0)
        d = np.abs(np.sum([spectrum.d for spectrum in spectra], axis=0) - self.aggregate.d).max(initial=0.0)
        return float(max(constant, b, d))


def contribution_matrix(panel, axis):
    """Years x groups matrix of per-group contributions, plus the per-year totals."""
    results = decompose_panel(panel, axis)
    contributions = np.array([result.contributions for result in results])
    totals = np.array([result.total for result in results])
    return contributions, totals


def group_spectra(panel, axis):
    axis = resolve_axis(axis)
    if len(panel) < 2:
        raise SeriesTooShortError(f"spectra need at least 2 years, the panel has {len(panel)}")
    contributions, totals = contribution_matrix(panel, axis)
    labels = panel.labels[axis]
    groups = {
        label: dft(TimeSeries(start_year=panel.start_year, values=contributions[:, column]))
        for column, label in enumerate(labels)
    }
    aggregate = dft(TimeSeries(start_year=panel.start_year, values=totals))
    spectra = GroupSpectra(axis=AXES[axis], groups=groups, aggregate=aggregate)
    logger.debug("Spectra for %d group(s), additivity residual %.3g", len(groups), spectra.additivity_residual())
    return spectra


def line_specter(panel, axis):
    """Per-group mean contribution over all years (the DFT constant of each group)."""
    contributions, _ = contribution_matrix(panel, resolve_axis(axis))
    labels = panel.labels[resolve_axis(axis)]
    return dict(zip(labels, (float(value) for value in contributions.mean(axis=0))))


# ---------------------------------------------------------------------------
# Polynomial fits
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PolyFit:
    degree: int
    coefficients: tuple
    r_squared: float

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.coefficients)


def polyfit(x, y, degree=2):
    """
    Least-squares polynomial with ascending-power coefficients and
    R^2 = 1 - SS_res / SS_tot (1 when both vanish).
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if degree < 1:
        raise InsufficientPointsError(f"degree must be at least 1, got {degree}")
    if x.size != y.size:
        raise ShapeMismatchError(f"x has {x.size} values, y has {y.size}")
    if x.size <= degree:
        raise InsufficientPointsError(f"a degree-{degree} fit needs at least {degree + 1} points, got {x.size}")

    design = np.vander(x, degree + 1, increasing=True)
    coefficients, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < degree + 1:
        raise SingularFitError(f"only {rank} independent columns for a degree-{degree} fit")

    residuals = y - design @ coefficients
    ss_res = float(residuals @ residuals)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    scale = max(1.0, float(y @ y))
    if ss_tot <= 1e-24 * scale:
        r_squared = 1.0 if ss_res <= 1e-20 * scale else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return PolyFit(degree=degree, coefficients=tuple(float(value) for value in coefficients), r_squared=r_squared)


@dataclass(frozen=True)
class AmplitudeFit:
    frequency: int
    fit: PolyFit
    x: tuple
    y: tuple


def amplitude_fits(spectra, degree=2):
    """
    For every frequency l, fit the group amplitudes C_l (y) against the
    absolute line-specter values |A_g| (x).
    """
    labels = list(spectra.groups)
    x = np.abs([spectra.groups[label].constant for label in labels])
    moduli = np.array([spectra.groups[label].moduli for label in labels])
    fits = []
    for column, frequency in enumerate(spectra.aggregate.frequencies):
        y = moduli[:, column]
        fits.append(AmplitudeFit(
            frequency=int(frequency),
            fit=polyfit(x, y, degree),
            x=tuple(float(value) for value in x),
            y=tuple(float(value) for value in y),
        ))
    return fits
