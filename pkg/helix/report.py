"""
The full analysis report: pydantic schema, assembly from a panel and
deterministic writers for report.json and series.csv.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field

from . import __version__
from .decomposition import decompose_panel, deviations, national_series
from .exceptions import DegeneracyError, HelixError
from .helper import to_mbits
from .hurst import Centering, hurst_exponent
from .plots import render_figures
from .spectral import TimeSeries, amplitude_fits, group_spectra
from .tensor import AXES, pairwise_informations, probabilities, resolve_axis

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 12


class Metadata(BaseModel):
    input: str
    axis: str
    tool_version: str = __version__
    crosswalk: Optional[str] = None
    fit_degree: int
    hurst_centering: str
    years: list[int]
    labels: dict[str, list[str]]
    units: dict[str, str] = Field(default_factory=lambda: {
        "synergy": "bits",
        "entropy": "bits",
        "tau": "relative units",
        "k_p": "percent",
        "period": "years",
    })


class YearRow(BaseModel):
    year: int
    total_count: int
    synergy_bits: float
    tau: float
    tau_branch: str
    entropies_bits: dict[str, float]
    mutual_information_bits: dict[str, float]


class GroupSeries(BaseModel):
    label: str
    contributions_bits: list[float]
    # None where the group share has a degenerate denominator in that year
    tau: list[Optional[float]]


class DecompositionSection(BaseModel):
    axis: str
    groups: list[GroupSeries]
    checksum_bits: list[float]


class DeviationRow(BaseModel):
    label: str
    years_used: int
    tau_mean: float
    synergy_mean_bits: float
    k_percent: float
    p_percent: float


class DeviationSection(BaseModel):
    tau_overall: float
    synergy_overall_bits: float
    rows: list[DeviationRow]


class Component(BaseModel):
    l: int
    period_years: float
    b_bits: float
    d_bits: float
    c_bits: float
    relative_input: float


class Spectrum(BaseModel):
    constant_bits: float
    components: list[Component]


class GroupSpectrum(BaseModel):
    label: str
    spectrum: Spectrum


class SpectraSection(BaseModel):
    aggregate: Spectrum
    groups: list[GroupSpectrum]
    additivity_residual_bits: float


class RSPoint(BaseModel):
    t: int
    rs: float


class HurstSection(BaseModel):
    series: str = "national synergy"
    h: float
    intercept: float
    constant: float
    r_squared: float
    classification: str
    centering: str
    points: list[RSPoint]


class FitSection(BaseModel):
    frequency: int
    degree: int
    coefficients: list[float]
    r_squared: float
    abs_mean_synergy_bits: list[float]
    modulus_bits: list[float]


class AnalysisReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    metadata: Metadata
    national: list[YearRow]
    decomposition: DecompositionSection
    deviations: Optional[DeviationSection] = None
    spectra: Optional[SpectraSection] = None
    hurst: Optional[HurstSection] = None
    fits: list[FitSection] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)


def _spectrum_model(spectrum):
    return Spectrum(
        constant_bits=spectrum.constant,
        components=[
            Component(
                l=item["l"],
                period_years=item["period"],
                b_bits=item["b"],
                d_bits=item["d"],
                c_bits=item["c"],
                relative_input=float(share),
            )
            for item, share in zip(spectrum.components(), spectrum.relative_inputs())
        ],
    )


def _group_taus(years, results, column, label, warnings):
    taus = []
    for year, result in zip(years, results):
        try:
            taus.append(result.shares[column].transmission_power().tau)
        except DegeneracyError as exc:
            taus.append(None)
            warnings.append(f"tau of {label} in {year} skipped: {exc.code}: {exc}")
    return taus


def build_report(panel, *, input_name, axis="geo", degree=2, centering=Centering.SERIES, band=0.05, crosswalk=None):
    axis_index = resolve_axis(axis)
    warnings = []

    national = []
    for (year, tensor), (entropies, power) in zip(panel, national_series(panel)):
        national.append(YearRow(
            year=year,
            total_count=tensor.total,
            synergy_bits=entropies.synergy,
            tau=power.tau,
            tau_branch=power.branch.value,
            entropies_bits={
                "h1": entropies.h1, "h2": entropies.h2, "h3": entropies.h3,
                "h12": entropies.h12, "h13": entropies.h13, "h23": entropies.h23,
                "h123": entropies.h123,
            },
            mutual_information_bits=pairwise_informations(probabilities(tensor)),
        ))

    results = decompose_panel(panel, axis_index)
    labels = panel.labels[axis_index]
    decomposition = DecompositionSection(
        axis=AXES[axis_index],
        groups=[
            GroupSeries(
                label=label,
                contributions_bits=[float(result.contributions[column]) for result in results],
                tau=_group_taus(panel.years, results, column, label, warnings),
            )
            for column, label in enumerate(labels)
        ],
        checksum_bits=[result.residual for result in results],
    )

    deviation_section = None
    try:
        deviation = deviations(panel, axis_index)
    except DegeneracyError as exc:
        warnings.append(f"deviations skipped: {exc.code}: {exc}")
    else:
        deviation_section = DeviationSection(
            tau_overall=deviation.tau_overall,
            synergy_overall_bits=deviation.synergy_overall,
            rows=[
                DeviationRow(
                    label=row["label"],
                    years_used=row["years_used"],
                    tau_mean=row["tau_mean"],
                    synergy_mean_bits=row["synergy_mean"],
                    k_percent=row["k_percent"],
                    p_percent=row["p_percent"],
                )
                for row in deviation.rows()
            ],
        )

    spectra_section = None
    fits = []
    if len(panel) >= 2:
        spectra = group_spectra(panel, axis_index)
        spectra_section = SpectraSection(
            aggregate=_spectrum_model(spectra.aggregate),
            groups=[GroupSpectrum(label=label, spectrum=_spectrum_model(spectrum)) for label, spectrum in spectra.groups.items()],
            additivity_residual_bits=spectra.additivity_residual(),
        )
        try:
            amplitude = amplitude_fits(spectra, degree)
        except HelixError as exc:
            warnings.append(f"amplitude fits skipped: {exc.code}: {exc}")
        else:
            fits = [
                FitSection(
                    frequency=item.frequency,
                    degree=item.fit.degree,
                    coefficients=list(item.fit.coefficients),
                    r_squared=item.fit.r_squared,
                    abs_mean_synergy_bits=list(item.x),
                    modulus_bits=list(item.y),
                )
                for item in amplitude
            ]
    else:
        warnings.append("spectra skipped: series-too-short: a spectrum needs at least 2 years")

    hurst_section = None
    try:
        series = TimeSeries(start_year=panel.start_year, values=[row.synergy_bits for row in national])
        result = hurst_exponent(series, centering=centering, band=band)
    except HelixError as exc:
        warnings.append(f"hurst skipped: {exc.code}: {exc}")
    else:
        hurst_section = HurstSection(
            h=result.h,
            intercept=result.intercept,
            constant=result.constant,
            r_squared=result.r_squared,
            classification=result.classification.value,
            centering=result.centering.value,
            points=[RSPoint(t=t, rs=rs) for t, rs in result.points],
        )

    for warning in warnings:
        logger.warning(warning)

    return AnalysisReport(
        metadata=Metadata(
            input=input_name,
            axis=AXES[axis_index],
            crosswalk=crosswalk,
            fit_degree=degree,
            hurst_centering=Centering(centering).value,
            years=list(panel.years),
            labels={name: list(axis_labels) for name, axis_labels in zip(AXES, panel.labels)},
        ),
        national=national,
        decomposition=decomposition,
        deviations=deviation_section,
        spectra=spectra_section,
        hurst=hurst_section,
        fits=fits,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# Deterministic output
# ---------------------------------------------------------------------------
def round_floats(value, digits=SIGNIFICANT_DIGITS):
    """Round every float in a JSON-like structure to ``digits`` significant digits."""
    if isinstance(value, float):
        rounded = float(f"{value:.{digits}g}")
        return rounded + 0.0 if rounded == 0 else rounded
    if isinstance(value, dict):
        return {key: round_floats(item, digits) for key, item in value.items()}
    if isinstance(value, list):
        return [round_floats(item, digits) for item in value]
    return value


def report_payload(report, digits=SIGNIFICANT_DIGITS):
    return round_floats(report.model_dump(mode="json"), digits)


def dumps_report(report, digits=SIGNIFICANT_DIGITS):
    return json.dumps(report_payload(report, digits), indent=2, ensure_ascii=False) + "\n"


def report_schema():
    return json.dumps(AnalysisReport.model_json_schema(), indent=2, sort_keys=True) + "\n"


def _cell(value, digits=SIGNIFICANT_DIGITS):
    return format(value, f".{digits}g") if isinstance(value, float) else str(value)


def write_series_csv(report, path, digits=SIGNIFICANT_DIGITS):
    groups = report.decomposition.groups
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["year", "total_count", "synergy_bits", "synergy_mbits", "tau", "tau_x100"]
            + [f"{group.label} (bits)" for group in groups]
        )
        for position, row in enumerate(report.national):
            values = [
                row.year, row.total_count, row.synergy_bits, to_mbits(row.synergy_bits), row.tau, row.tau * 100.0,
            ] + [group.contributions_bits[position] for group in groups]
            writer.writerow([_cell(value, digits) for value in values])


def write_report(report, out_dir, plots=False, digits=SIGNIFICANT_DIGITS):
    """Write report.json, series.csv and, optionally, the SVG figures. Returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    report_path = out_dir / "report.json"
    report_path.write_text(dumps_report(report, digits), encoding="utf-8")
    written.append(report_path)

    series_path = out_dir / "series.csv"
    write_series_csv(report, series_path, digits)
    written.append(series_path)

    if plots:
        for name, svg in render_figures(report).items():
            path = out_dir / name
            path.write_text(svg, encoding="utf-8")
            written.append(path)

    logger.info("Wrote %d file(s) to %s", len(written), out_dir)
    return written
