"""
Reading long-format count data into year-indexed contingency tensors,
sector crosswalks and panel validation.

Input CSV: ``year,geo,org,tech,count`` (UTF-8, comma separated, quoted
fields allowed). Crosswalk CSV: ``source_revision,source_code,target_class``
with an optional ``note`` column.
"""

import csv
import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import singledispatch
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict

from .exceptions import (
    BadCountError,
    CrosswalkError,
    EmptyDataError,
    PanelInconsistentError,
    SchemaError,
    UnmappedCodeError,
)
from .tensor import AXES, ContingencyTensor

logger = logging.getLogger(__name__)


class ColumnMapping(BaseModel):
    """Which CSV columns hold the year, the three categories and the count."""

    model_config = ConfigDict(frozen=True)

    year: str = "year"
    geo: str = "geo"
    org: str = "org"
    tech: str = "tech"
    count: str = "count"

    def required(self):
        return [self.year, self.geo, self.org, self.tech, self.count]


DEFAULT_SCHEMA = ColumnMapping()

# The eight establishment-size bands of the Norwegian business register.
# Shipped as an example vocabulary; organization labels are free strings.
ORGANIZATION_BANDS = (
    "0",
    "1-4",
    "5-9",
    "10-19",
    "20-49",
    "50-99",
    "100-249",
    "250+",
)


def natural_key(label):
    """Sort key ordering "2" before "10" and "1-4" before "10-19"."""
    return [int(part) if part.isdigit() else part.lower() for part in re.split(r"(\d+)", label)]


def _sorted_labels(labels):
    return tuple(sorted(set(labels), key=natural_key))


# ---------------------------------------------------------------------------
# Panel
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PanelSeries:
    """One contingency tensor per year; all tensors share labels."""

    years: tuple
    tensors: tuple = field(repr=False)

    def __post_init__(self):
        years = tuple(int(year) for year in self.years)
        tensors = tuple(self.tensors)
        if not years:
            raise EmptyDataError("a panel needs at least one year")
        if len(years) != len(tensors):
            raise PanelInconsistentError(f"{len(years)} years but {len(tensors)} tensors")
        if any(later <= earlier for earlier, later in zip(years, years[1:])):
            raise PanelInconsistentError("panel years must be strictly increasing")
        first = tensors[0].labels
        for year, tensor in zip(years, tensors):
            if tensor.labels != first:
                raise PanelInconsistentError(f"year {year} has different axis labels")
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "tensors", tensors)

    def __len__(self):
        return len(self.years)

    def __iter__(self):
        return iter(zip(self.years, self.tensors))

    @property
    def labels(self):
        return self.tensors[0].labels

    @property
    def start_year(self):
        return self.years[0]

    def totals(self):
        return {year: tensor.total for year, tensor in self}

    def tensor_for(self, year):
        return self.tensors[self.years.index(int(year))]


def assemble_panel(cells):
    """
    Build a panel from a mapping (year, geo, org, tech) -> count.
    Category universes are the union over years; absent cells are zero.
    """
    if not cells:
        raise EmptyDataError("no data rows")
    years = sorted({key[0] for key in cells})
    labels = tuple(_sorted_labels(key[axis + 1] for key in cells) for axis in range(3))
    index = [{label: position for position, label in enumerate(axis_labels)} for axis_labels in labels]
    shape = tuple(len(axis_labels) for axis_labels in labels)
    year_index = {year: position for position, year in enumerate(years)}

    counts = np.zeros((len(years),) + shape, dtype=np.int64)
    for (year, geo, org, tech), count in cells.items():
        counts[year_index[year], index[0][geo], index[1][org], index[2][tech]] += count

    return PanelSeries(
        years=tuple(years),
        tensors=tuple(ContingencyTensor(labels=labels, counts=counts[position]) for position in range(len(years))),
    )


def _parse_count(text, row):
    value = (text or "").strip()
    try:
        count = int(value)
    except ValueError:
        raise BadCountError(f"row {row}: count {text!r} is not an integer", row=row)
    if count < 0:
        raise BadCountError(f"row {row}: count {count} is negative", row=row)
    return count


def parse_panel(lines, schema=DEFAULT_SCHEMA, source="<stream>"):
    """Parse long-format CSV lines (any iterable of strings) into a PanelSeries."""
    try:
        return _parse_rows(csv.DictReader(lines), schema, source)
    except csv.Error as exc:
        raise SchemaError(f"{source}: malformed CSV ({exc})") from exc


def _parse_rows(reader, schema, source):
    header = [name.strip() for name in (reader.fieldnames or [])]
    if not header:
        raise EmptyDataError(f"{source} is empty")
    reader.fieldnames = header
    missing = [column for column in schema.required() if column not in header]
    if missing:
        raise SchemaError(f"{source}: missing column(s) {', '.join(missing)}", missing=missing)

    cells = defaultdict(int)
    rows = 0
    # Row numbers are file line numbers; the header is line 1.
    for row, record in enumerate(reader, start=2):
        if not any((value or "").strip() for value in record.values()):
            continue
        year_text = (record[schema.year] or "").strip()
        try:
            year = int(year_text)
        except ValueError:
            raise SchemaError(f"row {row}: year {year_text!r} is not an integer", row=row)
        key = [year]
        for axis in AXES:
            label = (record[getattr(schema, axis)] or "").strip()
            if not label:
                raise SchemaError(f"row {row}: empty {axis} category", row=row)
            key.append(label)
        cells[tuple(key)] += _parse_count(record[schema.count], row)
        rows += 1

    if not rows:
        raise EmptyDataError(f"{source} has no data rows")
    panel = assemble_panel(dict(cells))
    logger.info(
        "Read %d rows from %s: %d year(s), %s categories",
        rows, source, len(panel), "x".join(str(len(axis_labels)) for axis_labels in panel.labels),
    )
    return panel


def read_panel(path, schema=DEFAULT_SCHEMA):
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8-sig") as handle:
            return parse_panel(handle, schema=schema, source=str(path))
    except UnicodeDecodeError as exc:
        raise SchemaError(f"{path}: not UTF-8 encoded (byte {exc.start})") from exc


def write_panel(panel, path, schema=DEFAULT_SCHEMA):
    """
    Write a panel as long-format CSV. Non-zero cells are written; a category
    that is zero in every year gets one zero row so it survives a re-read.
    """
    labels = panel.labels
    stacked = np.stack([tensor.counts for _, tensor in panel])
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(schema.required())
        for year, tensor in panel:
            if not tensor.counts.any():
                writer.writerow([year, labels[0][0], labels[1][0], labels[2][0], 0])
            for geo, org, tech in zip(*np.nonzero(tensor.counts)):
                writer.writerow([year, labels[0][geo], labels[1][org], labels[2][tech], int(tensor.counts[geo, org, tech])])
        for axis in range(3):
            others = tuple(other for other in range(3) if other != axis)
            used = stacked.sum(axis=(0,) + tuple(other + 1 for other in others)) > 0
            for position in np.flatnonzero(~used):
                cell = [labels[0][0], labels[1][0], labels[2][0]]
                cell[axis] = labels[axis][position]
                writer.writerow([panel.years[0], *cell, 0])


# ---------------------------------------------------------------------------
# Crosswalk
# ---------------------------------------------------------------------------
def normalize_code(code):
    """Zero-pad the division part of a classification code: "1" -> "01", "1.13" -> "01.13"."""
    code = str(code).strip()
    head, dot, tail = code.partition(".")
    if head.isdigit() and len(head) == 1:
        head = "0" + head
    return head + dot + tail


def expand_code(code):
    """Expand a division range such as "1-5" or "10-41" into its division codes."""
    code = code.strip()
    match = re.fullmatch(r"(\d{1,2})\s*-\s*(\d{1,2})", code)
    if not match:
        return [normalize_code(code)]
    low, high = int(match.group(1)), int(match.group(2))
    if low > high:
        raise CrosswalkError(f"range {code!r} runs backwards")
    return [f"{division:02d}" for division in range(low, high + 1)]


@dataclass(frozen=True)
class CrosswalkEntry:
    source_revision: str
    source_code: str
    target_class: str
    note: str = ""


@dataclass(frozen=True)
class Crosswalk:
    """Source classification codes of one revision mapped onto target classes."""

    revision: str
    mapping: dict = field(repr=False)

    @property
    def targets(self):
        return _sorted_labels(self.mapping.values())

    def resolve(self, code):
        """
        Longest-prefix lookup: "74.14" matches an exact "74.14" entry before
        the division "74". Returns None when nothing matches.
        """
        candidate = normalize_code(code)
        while candidate:
            if candidate in self.mapping:
                return self.mapping[candidate]
            candidate = candidate[:-1].rstrip(".")
        return None

    def for_year(self, year):
        return self


@dataclass(frozen=True)
class RevisionSchedule:
    """Use ``before`` for years earlier than ``switch_year`` and ``after`` from then on."""

    before: Crosswalk
    after: Crosswalk
    switch_year: int

    def for_year(self, year):
        return self.after if year >= self.switch_year else self.before


def read_crosswalk_entries(path):
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8-sig") as handle:
            rows = [line for line in handle if line.strip() and not line.lstrip().startswith("#")]
    except UnicodeDecodeError as exc:
        raise SchemaError(f"{path}: not UTF-8 encoded (byte {exc.start})") from exc
    reader = csv.DictReader(rows)
    header = [name.strip() for name in (reader.fieldnames or [])]
    reader.fieldnames = header
    missing = [column for column in ("source_revision", "source_code", "target_class") if column not in header]
    if missing:
        raise SchemaError(f"{path}: missing crosswalk column(s) {', '.join(missing)}")
    return [
        CrosswalkEntry(
            source_revision=record["source_revision"].strip(),
            source_code=record["source_code"].strip(),
            target_class=record["target_class"].strip(),
            note=(record.get("note") or "").strip(),
        )
        for record in reader
    ]


def build_crosswalks(entries):
    """Group entries by revision; every expanded code must map to one class only."""
    mappings = defaultdict(dict)
    for entry in entries:
        if not entry.source_code or not entry.target_class:
            raise CrosswalkError(f"incomplete crosswalk entry {entry}")
        mapping = mappings[entry.source_revision]
        for code in expand_code(entry.source_code):
            if code in mapping and mapping[code] != entry.target_class:
                raise CrosswalkError(
                    f"{entry.source_revision} code {code} maps to both "
                    f"{mapping[code]} and {entry.target_class}"
                )
            mapping[code] = entry.target_class
    return {revision: Crosswalk(revision=revision, mapping=dict(mapping)) for revision, mapping in mappings.items()}


def load_crosswalks(path):
    return build_crosswalks(read_crosswalk_entries(path))


def load_crosswalk(path, revision):
    crosswalks = load_crosswalks(path)
    try:
        return crosswalks[revision]
    except KeyError:
        raise CrosswalkError(f"{path} has no revision {revision!r}; found {', '.join(sorted(crosswalks))}")


def select_crosswalk(crosswalks, revision=None, switch_year=None, before="rev1.1", after="rev2"):
    """
    Pick the crosswalk for a panel: the named ``revision``, the only revision
    on offer, or a RevisionSchedule over ``before``/``after`` at ``switch_year``.
    """
    if revision is not None:
        try:
            return crosswalks[revision]
        except KeyError:
            raise CrosswalkError(f"no revision {revision!r}; found {', '.join(sorted(crosswalks))}")
    if len(crosswalks) == 1:
        return next(iter(crosswalks.values()))
    if before in crosswalks and after in crosswalks and switch_year is not None:
        return RevisionSchedule(before=crosswalks[before], after=crosswalks[after], switch_year=int(switch_year))
    raise CrosswalkError(
        f"several revisions ({', '.join(sorted(crosswalks))}); name one or give a switch year"
    )


def _unmapped_codes(tensor, crosswalk):
    # Codes with no events in this tensor need no mapping.
    return {
        code for column, code in enumerate(tensor.labels[2])
        if crosswalk.resolve(code) is None and tensor.counts[:, :, column].any()
    }


def _map_tech_axis(tensor, crosswalk, targets):
    counts = np.zeros(tensor.shape[:2] + (len(targets),), dtype=np.int64)
    position = {target: index for index, target in enumerate(targets)}
    for column, code in enumerate(tensor.labels[2]):
        target = crosswalk.resolve(code)
        if target is not None:
            counts[:, :, position[target]] += tensor.counts[:, :, column]
    return ContingencyTensor(labels=(tensor.labels[0], tensor.labels[1], targets), counts=counts)


@singledispatch
def apply_crosswalk(data, crosswalk, year=None):
    """
    Replace the technology axis by crosswalk target classes, summing counts.
    ``crosswalk`` is a Crosswalk or a RevisionSchedule; a single tensor
    mapped through a schedule needs its ``year``.
    """
    raise TypeError(f"cannot apply a crosswalk to {type(data).__name__}")


@apply_crosswalk.register
def _(data: ContingencyTensor, crosswalk, year=None):
    if isinstance(crosswalk, RevisionSchedule) and year is None:
        raise CrosswalkError("a revision schedule needs the year of the tensor")
    cw = crosswalk.for_year(year)
    unmapped = _unmapped_codes(data, cw)
    if unmapped:
        raise UnmappedCodeError(unmapped)
    return _map_tech_axis(data, cw, cw.targets)


@apply_crosswalk.register
def _(data: PanelSeries, crosswalk, year=None):
    yearly = [crosswalk.for_year(year) for year in data.years]
    unmapped = set()
    for (_, tensor), cw in zip(data, yearly):
        unmapped |= _unmapped_codes(tensor, cw)
    if unmapped:
        raise UnmappedCodeError(unmapped)

    targets = _sorted_labels(target for cw in {id(cw): cw for cw in yearly}.values() for target in cw.targets)
    tensors = tuple(_map_tech_axis(tensor, cw, targets) for (_, tensor), cw in zip(data, yearly))
    mapped = PanelSeries(years=data.years, tensors=tensors)
    logger.info(
        "Mapped %d sector code(s) onto %d class(es) for %d year(s)",
        len(data.labels[2]), len(targets), len(data),
    )
    return mapped


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Issue:
    code: str
    severity: str
    message: str
    year: int = None


@dataclass(frozen=True)
class YearSummary:
    year: int
    total: int
    zero_fraction: float


@dataclass(frozen=True)
class ValidationReport:
    years: tuple
    issues: tuple

    @property
    def ok(self):
        return not any(issue.severity == "error" for issue in self.issues)


def validate_panel(panel):
    """Report per-year totals, sparsity, label consistency and year gaps. Never mutates."""
    summaries = []
    issues = []
    first_labels = panel.tensors[0].labels
    for year, tensor in zip(panel.years, panel.tensors):
        total = tensor.total
        summaries.append(YearSummary(year=year, total=total, zero_fraction=float(np.mean(tensor.counts == 0))))
        if total == 0:
            issues.append(Issue("empty-year", "error", f"{year} holds no events", year))
        if tensor.labels != first_labels:
            issues.append(Issue("label-mismatch", "error", f"{year} has different axis labels", year))

    for earlier, later in zip(panel.years, panel.years[1:]):
        if later - earlier > 1:
            issues.append(Issue(
                "year-gap", "warning",
                f"no data between {earlier} and {later}; spectra treat samples as equally spaced",
                later,
            ))

    stacked = np.stack([tensor.counts for tensor in panel.tensors])
    for axis, name in enumerate(AXES):
        others = tuple(other + 1 for other in range(3) if other != axis)
        used = stacked.sum(axis=(0,) + others) > 0
        for position in np.flatnonzero(~used):
            issues.append(Issue(
                "unused-category", "warning",
                f"{name} category {first_labels[axis][position]!r} is zero in every year",
            ))
    return ValidationReport(years=tuple(summaries), issues=tuple(issues))
