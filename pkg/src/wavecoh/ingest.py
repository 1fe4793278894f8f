"""Time series ingestion: parsing, validation, annual aggregation and alignment.

Time axes are integer ordinals. Monthly series count months as
``year * 12 + (month - 1)``; annual series count years. Consecutive samples
always differ by exactly one ordinal unit.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import AlignmentError, GapError, ParseError, SeriesValueError, StepError

MONTHLY = "monthly"
ANNUAL = "annual"
STEPS = (MONTHLY, ANNUAL)
MONTH_NAMES = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
MAX_FILL_GAP = 3


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled real series on a calendar axis.

    ``start`` is the ordinal of the first sample (see module docstring).
    ``meta`` carries provenance notes such as dropped partial years.
    """

    values: np.ndarray
    start: int
    step: str
    label: str = ""
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 1:
            raise SeriesValueError("series values must be one-dimensional")
        if self.step not in STEPS:
            raise StepError(f"unknown step {self.step!r}")
        if len(values) < 1:
            raise SeriesValueError(f"series {self.label!r} is empty")
        if not np.all(np.isfinite(values)):
            raise SeriesValueError(f"series {self.label!r} contains missing or non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "meta", dict(self.meta))

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (self.start == other.start and self.step == other.step
                and self.label == other.label
                and np.array_equal(self.values, other.values))

    __hash__ = None

    @property
    def end(self) -> int:
        return self.start + len(self.values) - 1

    @property
    def ordinals(self) -> np.ndarray:
        return np.arange(self.start, self.end + 1)

    @property
    def dt(self) -> float:
        """Sampling interval in the series' native unit (months or years)."""
        return 1.0

    @property
    def unit(self) -> str:
        return "months" if self.step == MONTHLY else "years"

    def time_labels(self) -> list[str]:
        return [format_ordinal(o, self.step) for o in self.ordinals]

    def decimal_years(self) -> np.ndarray:
        o = self.ordinals.astype(float)
        if self.step == MONTHLY:
            return o / 12.0 + 1.0 / 24.0
        return o + 0.5

    def with_values(self, values, label=None, meta=None) -> "TimeSeries":
        return TimeSeries(values, self.start, self.step,
                          self.label if label is None else label,
                          self.meta if meta is None else meta)

    def slice_ordinals(self, first: int, last: int) -> "TimeSeries":
        i0 = first - self.start
        i1 = last - self.start + 1
        return TimeSeries(self.values[i0:i1], first, self.step, self.label, self.meta)


def month_ordinal(year: int, month: int) -> int:
    return year * 12 + (month - 1)


def format_ordinal(ordinal: int, step: str) -> str:
    if step == MONTHLY:
        year, m = divmod(int(ordinal), 12)
        return f"{year:04d}-{m + 1:02d}"
    return f"{int(ordinal):04d}"


def parse_time_label(text: str) -> tuple[int, str]:
    """Parse ``YYYY-MM`` or ``YYYY`` into ``(ordinal, step)``."""
    m = re.fullmatch(r"(\d{4})-(\d{2})", text)
    if m:
        month = int(m.group(2))
        if not 1 <= month <= 12:
            raise ValueError(f"month out of range in {text!r}")
        return month_ordinal(int(m.group(1)), month), MONTHLY
    if re.fullmatch(r"\d{4}", text):
        return int(text), ANNUAL
    raise ValueError(f"unrecognised time label {text!r}")


class SourceKind(str, Enum):
    SIDC_SUNSPOTS = "SIDC_sunspots"
    GISS_TEMPERATURE = "GISS_temperature"
    CDIAC_CO2 = "CDIAC_co2"
    GENERIC_CSV = "generic_csv"


@dataclass(frozen=True)
class SeriesFormat:
    """Column-mapping preset for one source family.

    ``columns`` maps roles (``time``, ``year``, ``month``, ``value``) to a
    header name or a zero-based column index. Exactly one column carries the
    ``value`` role; for the wide GISS layout the value role is the twelve
    month columns taken together and is given as ``"Jan..Dec"``.
    """

    kind: SourceKind
    columns: Mapping[str, object] = field(default_factory=dict)
    missing: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", SourceKind(self.kind))
        if not self.columns:
            object.__setattr__(self, "columns", dict(_DEFAULT_COLUMNS[self.kind]))
        if not self.missing:
            object.__setattr__(self, "missing", _DEFAULT_MISSING[self.kind])
        if "value" not in self.columns:
            raise ParseError(f"format {self.kind.value}: no column mapped to the value role")
        if self.kind is SourceKind.GENERIC_CSV and "time" not in self.columns:
            raise ParseError("generic_csv format needs a time column")

    @classmethod
    def named(cls, name: str) -> "SeriesFormat":
        aliases = {"sidc": SourceKind.SIDC_SUNSPOTS, "giss": SourceKind.GISS_TEMPERATURE,
                   "cdiac": SourceKind.CDIAC_CO2, "generic": SourceKind.GENERIC_CSV,
                   "csv": SourceKind.GENERIC_CSV}
        kind = aliases.get(name.lower()) or SourceKind(name)
        return cls(kind)


_DEFAULT_COLUMNS = {
    SourceKind.SIDC_SUNSPOTS: {"year": 0, "month": 1, "value": 3},
    SourceKind.GISS_TEMPERATURE: {"year": "Year", "value": "Jan..Dec"},
    SourceKind.CDIAC_CO2: {"year": 0, "value": 1},
    SourceKind.GENERIC_CSV: {"time": "time", "value": "value"},
}
_DEFAULT_MISSING = {
    SourceKind.SIDC_SUNSPOTS: ("-1", "-1.0"),
    SourceKind.GISS_TEMPERATURE: ("*", "**", "***", "****", "*****", ""),
    SourceKind.CDIAC_CO2: ("", "NaN", "nan"),
    SourceKind.GENERIC_CSV: ("",),
}


def _to_float(text: str, line: int, path) -> float:
    try:
        v = float(text)
    except ValueError:
        raise SeriesValueError(f"non-numeric value {text!r}", line=line, path=path) from None
    if not math.isfinite(v):
        raise SeriesValueError(f"non-finite value {text!r}", line=line, path=path)
    return v


def _split(line: str, delimiter=None) -> list[str]:
    if delimiter is None:
        if ";" in line:
            delimiter = ";"
        elif "," in line:
            delimiter = ","
    if delimiter is None:
        return line.split()
    return [f.strip().strip('"') for f in next(csv.reader([line], delimiter=delimiter))]


def _column_index(spec, header: list[str] | None, line: int, path) -> int:
    if isinstance(spec, int):
        return spec
    if header is None or spec not in header:
        raise ParseError(f"column {spec!r} not found in header", line=line, path=path)
    return header.index(spec)


def _read_generic(text: str, fmt: SeriesFormat, path):
    lines = [(i, raw) for i, raw in enumerate(text.split("\n"), start=1)
             if not raw.lstrip().startswith("#")]
    if not lines or not lines[0][1].strip():
        raise ParseError("empty file", line=lines[0][0] if lines else 1, path=path)
    head_line, head = lines[0]
    header = _split(head, ",")
    ti = _column_index(fmt.columns["time"], header, head_line, path)
    vi = _column_index(fmt.columns["value"], header, head_line, path)
    records = []
    step = None
    for lineno, raw in lines[1:]:
        if not raw.strip():
            continue
        fields = _split(raw.rstrip("\r"), ",")
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(fields)}",
                             line=lineno, path=path)
        try:
            ordinal, row_step = parse_time_label(fields[ti].strip())
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, path=path) from None
        if step is None:
            step = row_step
        elif row_step != step:
            raise ParseError("time labels mix monthly and annual forms", line=lineno, path=path)
        token = fields[vi].strip()
        value = None if token in fmt.missing else _to_float(token, lineno, path)
        records.append((ordinal, value, lineno))
    return records, step


def _read_sidc(text: str, fmt: SeriesFormat, path):
    yi, mi, vi = fmt.columns["year"], fmt.columns["month"], fmt.columns["value"]
    records = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = _split(line)
        try:
            year, month = int(fields[yi]), int(fields[mi])
        except (ValueError, IndexError):
            raise ParseError(f"malformed row {line!r}", line=lineno, path=path) from None
        if not 1 <= month <= 12:
            raise ParseError(f"month {month} out of range", line=lineno, path=path)
        try:
            token = fields[vi].strip()
        except IndexError:
            raise ParseError("missing value column", line=lineno, path=path) from None
        value = None if token in fmt.missing else _to_float(token, lineno, path)
        records.append((month_ordinal(year, month), value, lineno))
    return records, MONTHLY


def _read_giss(text: str, fmt: SeriesFormat, path):
    year_col = fmt.columns["year"]
    header = None
    records = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = _split(line)
        if fields and fields[0] == year_col:
            header = fields
            continue
        if header is None or not re.fullmatch(r"\d{4}", fields[0]):
            continue
        if len(fields) < 13:
            raise ParseError(f"expected at least 13 fields, got {len(fields)}",
                             line=lineno, path=path)
        year = int(fields[0])
        for m, name in enumerate(MONTH_NAMES, start=1):
            idx = header.index(name) if name in header else m
            token = fields[idx].strip()
            value = None if token in fmt.missing else _to_float(token, lineno, path)
            records.append((month_ordinal(year, m), value, lineno))
    if header is None:
        raise ParseError(f"no header row starting with {year_col!r}", path=path)
    return records, MONTHLY


def _read_cdiac(text: str, fmt: SeriesFormat, path):
    yi, vi = fmt.columns["year"], fmt.columns["value"]
    header = None
    records = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = _split(line, ",")
        if not fields or not re.fullmatch(r"\d{4}", fields[0 if isinstance(yi, str) else yi]):
            if header is None:
                header = fields
            continue
        y_idx = _column_index(yi, header, lineno, path)
        v_idx = _column_index(vi, header, lineno, path)
        year = int(fields[y_idx])
        token = fields[v_idx].strip() if v_idx < len(fields) else ""
        value = None if token in fmt.missing else _to_float(token, lineno, path)
        records.append((year, value, lineno))
    return records, ANNUAL


_READERS = {
    SourceKind.GENERIC_CSV: _read_generic,
    SourceKind.SIDC_SUNSPOTS: _read_sidc,
    SourceKind.GISS_TEMPERATURE: _read_giss,
    SourceKind.CDIAC_CO2: _read_cdiac,
}


def _trim_missing(records):
    lo, hi = 0, len(records)
    while lo < hi and records[lo][1] is None:
        lo += 1
    while hi > lo and records[hi - 1][1] is None:
        hi -= 1
    return records[lo:hi]


def _assemble(records, step, path, fill, label):
    # Leading/trailing missing entries (e.g. unfilled months of the current
    # year in GISS tables) mark the series ends, not gaps.
    records = _trim_missing(records)
    if len(records) < 2:
        raise ParseError("fewer than 2 observations", path=path)
    prev = None
    for ordinal, _, lineno in records:
        if prev is not None and ordinal <= prev:
            raise ParseError("time axis not strictly increasing", line=lineno, path=path)
        prev = ordinal
    first, last = records[0][0], records[-1][0]
    values = np.full(last - first + 1, np.nan)
    for ordinal, value, _ in records:
        if value is not None:
            values[ordinal - first] = value
    missing = np.flatnonzero(np.isnan(values))
    meta = {}
    if missing.size:
        if fill != "linear":
            raise GapError([format_ordinal(first + i, step) for i in missing], path=path)
        runs = np.split(missing, np.flatnonzero(np.diff(missing) > 1) + 1)
        too_long = [r for r in runs if len(r) > MAX_FILL_GAP]
        if too_long:
            raise GapError([format_ordinal(first + i, step) for r in too_long for i in r],
                           path=path)
        ok = ~np.isnan(values)
        idx = np.arange(len(values))
        values[missing] = np.interp(missing, idx[ok], values[ok])
        meta["filled"] = [format_ordinal(first + i, step) for i in missing]
    return TimeSeries(values, first, step, label, meta)


def parse_series(path, format: SeriesFormat | str = "generic_csv", label: str | None = None,
                 fill: str | None = None) -> TimeSeries:
    """Read and validate a series file.

    Gaps in the time axis raise :class:`GapError` unless ``fill="linear"``,
    which interpolates runs of at most three missing samples.
    """
    if isinstance(format, str):
        format = SeriesFormat.named(format)
    if fill not in (None, "none", "linear"):
        raise ParseError(f"unknown fill mode {fill!r}")
    path = Path(path)
    text = path.read_text(encoding="utf-8").replace("\r\n", "\n")
    records, step = _READERS[format.kind](text, format, str(path))
    if step is None:
        raise ParseError("no data rows", path=str(path))
    return _assemble(records, step, str(path), fill, label or path.stem)


def to_csv_text(series: TimeSeries, comments=()) -> str:
    """Serialise to the generic ``time,value`` CSV (shortest round-trip repr).

    ``comments`` become leading ``#`` lines, which the reader skips.
    """
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write("time,value\n")
    for label, v in zip(series.time_labels(), series.values):
        buf.write(f"{label},{float(v)!r}\n")
    return buf.getvalue()


def write_csv(series: TimeSeries, path) -> None:
    Path(path).write_text(to_csv_text(series), encoding="utf-8", newline="\n")


def annual_mean(series: TimeSeries) -> TimeSeries:
    """Calendar-year means of a monthly series; partial years are dropped."""
    if series.step != MONTHLY:
        raise StepError(f"annual_mean needs a monthly series, got {series.step}")
    ords = series.ordinals
    years = ords // 12
    first_full = years[0] if ords[0] % 12 == 0 else years[0] + 1
    last_full = years[-1] if ords[-1] % 12 == 11 else years[-1] - 1
    if last_full < first_full:
        raise StepError(f"series {series.label!r} contains no complete calendar year")
    i0 = month_ordinal(first_full, 1) - series.start
    i1 = month_ordinal(last_full, 12) - series.start + 1
    means = series.values[i0:i1].reshape(-1, 12).mean(axis=1)
    dropped = sorted({int(y) for y in years if y < first_full or y > last_full})
    meta = dict(series.meta)
    meta["annual_mean"] = {"dropped_partial_years": dropped}
    return TimeSeries(means, int(first_full), ANNUAL, series.label, meta)


def align(a: TimeSeries, b: TimeSeries) -> tuple[TimeSeries, TimeSeries]:
    """Restrict both series to their common time range."""
    if a.step != b.step:
        raise AlignmentError(f"cannot align {a.step} with {b.step} series")
    first = max(a.start, b.start)
    last = min(a.end, b.end)
    if last < first:
        raise AlignmentError(f"series {a.label!r} and {b.label!r} do not overlap")
    if (first, last) == (a.start, a.end) and (first, last) == (b.start, b.end):
        return a, b
    return a.slice_ordinals(first, last), b.slice_ordinals(first, last)
