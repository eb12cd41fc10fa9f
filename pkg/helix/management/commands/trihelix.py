"""
Management command exposing the synergy analytics as a command-line tool.

Synergy values are printed in mbits (millibits, 10^-3 bit); transmission
power is printed x 100. report.json keeps bits.

Usage:
    python manage.py trihelix synergy   --input panel.csv
    python manage.py trihelix decompose --input panel.csv --axis geo
    python manage.py trihelix power     --input panel.csv --axis geo
    python manage.py trihelix deviation --input panel.csv --axis geo
    python manage.py trihelix spectrum  --input panel.csv [--group Oslo]
    python manage.py trihelix hurst     --input panel.csv [--centering window]
    python manage.py trihelix fit       --input panel.csv --degree 2
    python manage.py trihelix fit       --xy points.csv --degree 1
    python manage.py trihelix crosswalk [--input panel.csv --out mapped.csv]
    python manage.py trihelix report    --input panel.csv --out results/ --plots
    python manage.py trihelix validate  --input panel.csv
    python manage.py trihelix schema

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric degeneracy.
"""

import csv
import logging
import sys
from pathlib import Path

import numpy as np
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError, CommandParser

from helix.decomposition import decompose_panel, deviations, national_series
from helix.exceptions import EXIT_DATA, EXIT_USAGE, DegeneracyError, HelixError, SchemaError
from helix.helper import format_number, format_table, humanize_compact, to_mbits
from helix.hurst import Centering, hurst_exponent
from helix.ingest import (
    apply_crosswalk,
    build_crosswalks,
    read_crosswalk_entries,
    read_panel,
    select_crosswalk,
    validate_panel,
    write_panel,
)
from helix.report import build_report, report_schema, write_report
from helix.spectral import TimeSeries, amplitude_fits, group_spectra, polyfit
from helix.tensor import AXES, resolve_axis

logger = logging.getLogger(__name__)

# Components below this modulus (bits) are numerically absent.
SPECTRUM_FLOOR = 1e-12


class HelixParser(CommandParser):
    """Argument errors exit with status 1 instead of argparse's 2."""

    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=EXIT_USAGE)


class Command(BaseCommand):
    help = "Triple-Helix synergy analytics: entropies, decomposition, spectra, R/S analysis and reports."
    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.__class__ = HelixParser
        return parser

    def add_arguments(self, parser):
        defaults = settings.TRIHELIX
        subparsers = parser.add_subparsers(dest="action", required=True, parser_class=HelixParser)

        def panel_command(name, help_text, axis=True):
            sub = subparsers.add_parser(name, help=help_text)
            sub.add_argument("--input", required=True, help="Long-format CSV: year,geo,org,tech,count")
            sub.add_argument(
                "--crosswalk",
                help="Crosswalk CSV; maps the tech axis onto target classes before analysis",
            )
            sub.add_argument("--revision", help="Crosswalk revision to use (default: by year)")
            sub.add_argument(
                "--switch-year",
                type=int,
                default=defaults["REVISION_SWITCH_YEAR"],
                help="First year coded in the newer revision",
            )
            if axis:
                sub.add_argument("--axis", choices=AXES, default=defaults["DEFAULT_AXIS"])
            return sub

        panel_command("synergy", "Per-year national synergy and transmission power", axis=False)
        panel_command("decompose", "Per-group synergy contributions with a checksum row")
        panel_command("power", "National and per-group transmission power")
        panel_command("deviation", "K and P percent deviations of period averages")

        spectrum = panel_command("spectrum", "Fourier coefficients of the synergy series")
        spectrum.add_argument("--group", help="Category of --axis to analyse (default: the aggregate)")

        hurst = panel_command("hurst", "R/S analysis of the national (or one group's) synergy series")
        hurst.add_argument("--group", help="Category of --axis to analyse (default: national)")
        hurst.add_argument("--centering", choices=[item.value for item in Centering], default=defaults["HURST_CENTERING"])

        fit = subparsers.add_parser("fit", help="Polynomial fits of amplitudes against mean synergy")
        source = fit.add_mutually_exclusive_group(required=True)
        source.add_argument("--input", help="Long-format CSV panel")
        source.add_argument("--xy", help="CSV with two numeric columns x,y")
        fit.add_argument("--crosswalk")
        fit.add_argument("--revision")
        fit.add_argument("--switch-year", type=int, default=defaults["REVISION_SWITCH_YEAR"])
        fit.add_argument("--axis", choices=AXES, default=defaults["DEFAULT_AXIS"])
        fit.add_argument("--degree", type=int, default=defaults["FIT_DEGREE"])

        crosswalk = subparsers.add_parser("crosswalk", help="List the crosswalk or map a panel through it")
        crosswalk.add_argument("--crosswalk", default=str(defaults["CROSSWALK_PATH"]))
        crosswalk.add_argument("--input", help="Panel to map; without it the entries are listed")
        crosswalk.add_argument("--revision")
        crosswalk.add_argument("--switch-year", type=int, default=defaults["REVISION_SWITCH_YEAR"])
        crosswalk.add_argument("--out", help="Write the mapped panel to this CSV")

        report = panel_command("report", "Full analysis written to report.json and series.csv")
        report.add_argument("--out", required=True, help="Output directory")
        report.add_argument("--degree", type=int, default=defaults["FIT_DEGREE"])
        report.add_argument("--centering", choices=[item.value for item in Centering], default=defaults["HURST_CENTERING"])
        report.add_argument("--plots", action="store_true", default=False, help="Also write SVG figures")

        panel_command("validate", "Per-year totals, sparsity and consistency checks", axis=False)
        subparsers.add_parser("schema", help="Print the JSON schema of report.json")

    def handle(self, *args, **options):
        action = options["action"]
        handler = getattr(self, f"handle_{action}")
        try:
            handler(options)
        except HelixError as exc:
            logger.debug("trihelix %s failed: %s", action, exc, exc_info=True)
            raise CommandError(f"{exc.code}: {exc}", returncode=exc.exit_code)
        except OSError as exc:
            raise CommandError(f"io-error: {exc}", returncode=EXIT_DATA)

    # ------------------------------------------------------------------
    # Inputs
    # ------------------------------------------------------------------
    def load_crosswalk(self, options):
        crosswalks = build_crosswalks(read_crosswalk_entries(options["crosswalk"]))
        return select_crosswalk(crosswalks, revision=options.get("revision"), switch_year=options.get("switch_year"))

    def load_panel(self, options):
        panel = read_panel(options["input"])
        if options.get("crosswalk"):
            panel = apply_crosswalk(panel, self.load_crosswalk(options))
        return panel

    def write_table(self, headers, rows, title=None):
        if title:
            self.stdout.write(title)
        self.stdout.write(format_table(headers, rows))

    # ------------------------------------------------------------------
    # Sub-commands
    # ------------------------------------------------------------------
    def handle_synergy(self, options):
        panel = self.load_panel(options)
        rows = [
            [str(year), tensor.total, to_mbits(entropies.synergy), power.percent]
            for (year, tensor), (entropies, power) in zip(panel, national_series(panel))
        ]
        self.write_table(["year", "N", "T (mbits)", "tau x100"], rows)

    def handle_decompose(self, options):
        panel = self.load_panel(options)
        results = decompose_panel(panel, options["axis"])
        headers = [options["axis"]] + [str(year) for year in panel.years]
        rows = [
            [label] + [to_mbits(float(result.contributions[column])) for result in results]
            for column, label in enumerate(panel.labels[resolve_axis(options["axis"])])
        ]
        rows.append(["total"] + [to_mbits(result.total) for result in results])
        rows.append(["checksum"] + [to_mbits(result.residual) for result in results])
        self.write_table(headers, rows, title="Synergy contributions (mbits)")

    def handle_power(self, options):
        panel = self.load_panel(options)
        axis = options["axis"]
        labels = panel.labels[resolve_axis(axis)]
        results = decompose_panel(panel, axis)
        rows, skipped = [], []
        for year, (_, power), result in zip(panel.years, national_series(panel), results):
            row = [str(year), power.percent]
            for label, share in zip(result.group_labels, result.shares):
                try:
                    row.append(share.transmission_power().percent)
                except DegeneracyError as exc:
                    row.append(None)
                    skipped.append(f"{label} in {year}: {exc.code}")
            rows.append(row)
        self.write_table(["year", "national"] + list(labels), rows, title="Transmission power (tau x100)")
        for cell in skipped:
            logger.warning("tau skipped for %s", cell)
            self.stdout.write(self.style.WARNING(f"  skipped {cell}"))

    def handle_deviation(self, options):
        panel = self.load_panel(options)
        report = deviations(panel, options["axis"])
        rows = [
            [
                row["label"], row["years_used"], row["tau_mean"] * 100.0, to_mbits(row["synergy_mean"]),
                row["k_percent"], row["p_percent"],
            ]
            for row in report.rows()
        ]
        self.write_table(
            [options["axis"], "years", "mean tau x100", "mean T (mbits)", "K (%)", "P (%)"],
            rows,
        )
        self.stdout.write(
            f"\nAverage over groups: tau x100 = {format_number(report.tau_overall * 100.0)}, "
            f"T = {format_number(to_mbits(report.synergy_overall))} mbits"
        )

    def handle_spectrum(self, options):
        panel = self.load_panel(options)
        spectra = group_spectra(panel, options["axis"])
        if options.get("group"):
            try:
                spectrum = spectra.groups[options["group"]]
            except KeyError:
                raise SchemaError(f"no {options['axis']} category {options['group']!r}")
            title = f"Spectrum of {options['group']} ({len(panel)} years)"
        else:
            spectrum = spectra.aggregate
            title = f"Spectrum of the national synergy ({len(panel)} years)"

        rows = [["A", "-", "-", "-", to_mbits(spectrum.constant), "-"]]
        for item, share in zip(spectrum.components(), spectrum.relative_inputs()):
            if item["c"] <= SPECTRUM_FLOOR:
                continue
            rows.append([
                str(item["l"]), item["period"], to_mbits(item["b"]), to_mbits(item["d"]), to_mbits(item["c"]), float(share),
            ])
        self.write_table(["l", "period (years)", "B (mbits)", "D (mbits)", "C (mbits)", "relative input"], rows, title=title)

    def handle_hurst(self, options):
        panel = self.load_panel(options)
        if options.get("group"):
            axis_index = resolve_axis(options["axis"])
            labels = panel.labels[axis_index]
            if options["group"] not in labels:
                raise SchemaError(f"no {options['axis']} category {options['group']!r}")
            column = labels.index(options["group"])
            values = [float(result.contributions[column]) for result in decompose_panel(panel, axis_index)]
            name = options["group"]
        else:
            values = [entropies.synergy for entropies, _ in national_series(panel)]
            name = "national synergy"

        series = TimeSeries(start_year=panel.start_year, values=values)
        result = hurst_exponent(series, centering=options["centering"], band=settings.TRIHELIX["HURST_RANDOM_BAND"])
        self.write_table(["t", "R/S", "ln t", "ln R/S"], [
            [t, rs, float(np.log(t)), float(np.log(rs))] for t, rs in result.points
        ], title=f"R/S analysis of {name} ({result.centering.value} centering)")
        self.stdout.write(
            f"\nH = {result.h:.4f}  C = {result.constant:.4f}  R^2 = {result.r_squared:.4f}  "
            f"-> {result.classification.value}"
        )

    def handle_fit(self, options):
        degree = options["degree"]
        if options.get("xy"):
            x, y = read_xy(options["xy"])
            fit = polyfit(x, y, degree)
            self.write_table(
                ["term", "coefficient"],
                [[f"a{power}", float(value)] for power, value in enumerate(fit.coefficients)],
                title=f"Degree-{degree} fit of {len(x)} points",
            )
            self.stdout.write(f"\nR^2 = {fit.r_squared:.6f}")
            return

        panel = self.load_panel(options)
        spectra = group_spectra(panel, options["axis"])
        rows = [
            [item.frequency] + [float(value) for value in item.fit.coefficients] + [item.fit.r_squared]
            for item in amplitude_fits(spectra, degree)
        ]
        self.write_table(
            ["l"] + [f"a{power}" for power in range(degree + 1)] + ["R^2"],
            rows,
            title=f"C_l against |mean synergy| over {options['axis']} groups (bits)",
        )

    def handle_crosswalk(self, options):
        if not options.get("input"):
            entries = read_crosswalk_entries(options["crosswalk"])
            if options.get("revision"):
                entries = [entry for entry in entries if entry.source_revision == options["revision"]]
            self.write_table(
                ["revision", "code", "class", "note"],
                [[entry.source_revision, entry.source_code, entry.target_class, entry.note] for entry in entries],
            )
            return

        panel = read_panel(options["input"])
        mapped = apply_crosswalk(panel, self.load_crosswalk(options))
        rows = [
            [str(year), len(panel.labels[2]), len(mapped.labels[2]), panel.totals()[year], mapped.totals()[year]]
            for year in panel.years
        ]
        self.write_table(["year", "codes", "classes", "N before", "N after"], rows)
        if options.get("out"):
            write_panel(mapped, options["out"])
            self.stdout.write(self.style.SUCCESS(f"\nMapped panel written to {options['out']}"))

    def handle_report(self, options):
        panel = self.load_panel(options)
        report = build_report(
            panel,
            input_name=Path(options["input"]).name,
            axis=options["axis"],
            degree=options["degree"],
            centering=options["centering"],
            band=settings.TRIHELIX["HURST_RANDOM_BAND"],
            crosswalk=Path(options["crosswalk"]).name if options.get("crosswalk") else None,
        )
        written = write_report(
            report, options["out"], plots=options["plots"], digits=settings.TRIHELIX["SIGNIFICANT_DIGITS"],
        )

        self.stdout.write("=" * 60)
        self.stdout.write(self.style.SUCCESS(f"  Report for {len(panel)} year(s) written to {options['out']}"))
        for path in written:
            self.stdout.write(f"  {path.name}")
        for warning in report.warnings:
            self.stdout.write(self.style.WARNING(f"  {warning}"))
        self.stdout.write("=" * 60)

    def handle_validate(self, options):
        panel = self.load_panel(options)
        result = validate_panel(panel)
        self.write_table(
            ["year", "N", "N (compact)", "zero cells"],
            [[str(summary.year), summary.total, humanize_compact(summary.total), summary.zero_fraction] for summary in result.years],
        )
        self.stdout.write("")
        if not result.issues:
            self.stdout.write(self.style.SUCCESS("No issues found."))
        for issue in result.issues:
            style = self.style.ERROR if issue.severity == "error" else self.style.WARNING
            self.stdout.write(style(f"{issue.severity.upper()} {issue.code}: {issue.message}"))
        if not result.ok:
            raise CommandError("panel has validation errors", returncode=EXIT_DATA)

    def handle_schema(self, options):
        self.stdout.write(report_schema(), ending="")


def read_xy(path):
    """Two numeric columns; a non-numeric first row is taken as a header."""
    try:
        with Path(path).open(newline="", encoding="utf-8-sig") as handle:
            records = list(csv.reader(handle))
    except UnicodeDecodeError as exc:
        raise SchemaError(f"{path}: not UTF-8 encoded (byte {exc.start})") from exc
    except csv.Error as exc:
        raise SchemaError(f"{path}: malformed CSV ({exc})") from exc
    x, y = [], []
    for line, record in enumerate(records, start=1):
        if not any(cell.strip() for cell in record):
            continue
        if len(record) != 2:
            raise SchemaError(f"{path} line {line}: expected 2 columns, got {len(record)}")
        try:
            a, b = float(record[0]), float(record[1])
        except ValueError:
            if line == 1:
                continue
            raise SchemaError(f"{path} line {line}: {record!r} is not numeric")
        x.append(a)
        y.append(b)
    return x, y
