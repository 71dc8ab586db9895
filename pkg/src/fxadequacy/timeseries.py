"""Quarterly time series containers and the CSV reader/writer."""

from __future__ import annotations

import csv
import io
import math
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .errors import AlignmentError, DataValueError, DomainError, IntegrityError, ParseError

_PERIOD_RE = re.compile(r"^(\d{4})Q([1-4])$")


def parse_period(label: str) -> tuple[int, int]:
    """``"2012Q3"`` -> ``(2012, 3)``."""
    m = _PERIOD_RE.match(label.strip())
    if m is None:
        raise DataValueError(f"bad period label {label!r}, expected YYYYQn")
    return int(m.group(1)), int(m.group(2))


def period_range(start: str, count: int) -> tuple[str, ...]:
    year, quarter = parse_period(start)
    out = []
    for _ in range(count):
        out.append(f"{year}Q{quarter}")
        quarter += 1
        if quarter == 5:
            year, quarter = year + 1, 1
    return tuple(out)


def _check_periods(periods: Sequence[str]) -> None:
    keys = [parse_period(p) for p in periods]
    seen: set[tuple[int, int]] = set()
    for label, key in zip(periods, keys):
        if key in seen:
            raise IntegrityError(f"duplicate period {label}")
        seen.add(key)
    for prev, cur, label in zip(keys, keys[1:], periods[1:]):
        if cur <= prev:
            raise IntegrityError(f"periods not increasing at {label}")


def _frozen(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Series:
    name: str
    periods: tuple[str, ...]
    values: np.ndarray
    unit: str = ""

    def __post_init__(self):
        periods = tuple(str(p) for p in self.periods)
        values = _frozen(self.values)
        if values.ndim != 1 or len(values) != len(periods):
            raise IntegrityError(
                f"series {self.name!r}: {len(values)} values for {len(periods)} periods"
            )
        if not np.all(np.isfinite(values)):
            bad = periods[int(np.flatnonzero(~np.isfinite(values))[0])]
            raise DataValueError(f"series {self.name!r}: non-finite value at {bad}")
        _check_periods(periods)
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def renamed(self, name: str, unit: str | None = None) -> Series:
        return Series(name, self.periods, self.values, self.unit if unit is None else unit)

    def slice(self, start: int | None = None, stop: int | None = None) -> Series:
        return Series(self.name, self.periods[start:stop], self.values[start:stop], self.unit)


@dataclass(frozen=True)
class FactorPanel:
    """Several series sharing one period axis."""

    series: tuple[Series, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        series = tuple(self.series)
        if not series:
            raise IntegrityError("panel needs at least one series")
        axis = series[0].periods
        for s in series[1:]:
            if s.periods != axis:
                raise AlignmentError(
                    f"series {s.name!r} is not aligned with {series[0].name!r}"
                )
        if len(axis) < 2:
            raise IntegrityError(f"panel needs at least 2 periods, got {len(axis)}")
        names = [s.name for s in series]
        if len(set(names)) != len(names):
            raise IntegrityError(f"duplicate column names in {names}")
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "_index", {s.name: s for s in series})

    @property
    def periods(self) -> tuple[str, ...]:
        return self.series[0].periods

    @property
    def n(self) -> int:
        return len(self.periods)

    @property
    def k(self) -> int:
        return len(self.series)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.series]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __getitem__(self, name: str) -> Series:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no column {name!r} in panel (have {self.names})") from None

    def column(self, i: int) -> Series:
        """1-based column access, matching the factor numbering X_1..X_k."""
        if not 1 <= i <= self.k:
            raise IndexError(f"column {i} out of range 1..{self.k}")
        return self.series[i - 1]

    def matrix(self, names: Sequence[str] | None = None) -> np.ndarray:
        names = self.names if names is None else list(names)
        return np.column_stack([self[name].values for name in names])

    def select(self, names: Sequence[str]) -> FactorPanel:
        return FactorPanel(tuple(self[name] for name in names))

    def slice(self, start: int | None = None, stop: int | None = None) -> FactorPanel:
        return FactorPanel(tuple(s.slice(start, stop) for s in self.series))

    def with_series(self, *extra: Series) -> FactorPanel:
        return FactorPanel(self.series + tuple(extra))


def _as_text(source) -> str:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def load_panel(
    source: str | Path | IO,
    schema: Mapping[str, str] | Sequence[str] | None = None,
) -> FactorPanel:
    """Read a period-indexed CSV into a :class:`FactorPanel`.

    ``schema`` maps column name to unit; a plain sequence of names means no
    units. ``None`` takes every column after ``period``. Lines starting with
    ``#`` are comments. Rows with an empty cell in any requested column are
    dropped with a warning.
    """
    text = _as_text(source)
    lines = [(i, line) for i, line in enumerate(text.splitlines(), start=1)
             if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise ParseError("no header row", line=1)

    try:
        rows = list(csv.reader([line for _, line in lines], strict=True))
    except csv.Error as exc:
        raise ParseError(str(exc)) from exc

    header_line, header = lines[0][0], [h.strip() for h in rows[0]]
    if not header or header[0] != "period":
        raise ParseError("first column must be 'period'", line=header_line)
    if len(header) < 2:
        raise ParseError("need at least one data column", line=header_line)

    if schema is None:
        schema = {name: "" for name in header[1:]}
    elif not isinstance(schema, Mapping):
        schema = {name: "" for name in schema}
    missing = [name for name in schema if name not in header]
    if missing:
        raise ParseError(f"columns {missing} not in header {header}", line=header_line)
    positions = {name: header.index(name) for name in schema}

    periods: list[str] = []
    columns: dict[str, list[float]] = {name: [] for name in schema}
    for (line_no, _), row in zip(lines[1:], rows[1:]):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line=line_no)
        label = row[0].strip()
        try:
            parse_period(label)
        except DataValueError as exc:
            raise ParseError(str(exc), line=line_no) from None
        cells = {name: row[pos].strip() for name, pos in positions.items()}
        if any(cell == "" for cell in cells.values()):
            warnings.warn(f"line {line_no}: dropping incomplete row {label}", stacklevel=2)
            continue
        parsed = {}
        for name, cell in cells.items():
            try:
                value = float(cell)
            except ValueError:
                raise DataValueError(
                    f"column {name!r}, row {label} (line {line_no}): not a number: {cell!r}"
                ) from None
            if not math.isfinite(value):
                raise DataValueError(
                    f"column {name!r}, row {label} (line {line_no}): non-finite value {cell!r}"
                )
            parsed[name] = value
        periods.append(label)
        for name, value in parsed.items():
            columns[name].append(value)

    if len(periods) < 2:
        raise IntegrityError(f"need at least 2 data rows, got {len(periods)}")
    _check_periods(periods)
    return FactorPanel(tuple(
        Series(name, tuple(periods), columns[name], unit) for name, unit in schema.items()
    ))


def dump_panel(panel: FactorPanel, target: str | Path | IO | None = None) -> str:
    """Write ``panel`` as CSV; floats use their shortest round-trip repr."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["period", *panel.names])
    matrix = panel.matrix()
    for label, row in zip(panel.periods, matrix):
        writer.writerow([label, *(repr(float(v)) for v in row)])
    text = buf.getvalue()
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    elif target is not None:
        target.write(text)
    return text


def parse_schema(text: str) -> dict[str, str]:
    """``"fx:UAH/100USD,inflation:%"`` -> ``{"fx": "UAH/100USD", "inflation": "%"}``."""
    schema = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        name, _, unit = item.partition(":")
        schema[name.strip()] = unit.strip()
    return schema


def _require_positive(s: Series) -> None:
    bad = np.flatnonzero(s.values <= 0)
    if bad.size:
        i = int(bad[0])
        raise DomainError(
            f"series {s.name!r}: non-positive value {s.values[i]!r} at {s.periods[i]}"
        )


def _require_aligned(a: Series, b: Series) -> None:
    if a.periods != b.periods:
        raise AlignmentError(f"series {a.name!r} and {b.name!r} have different periods")


def log_series(s: Series) -> Series:
    _require_positive(s)
    return Series(f"log({s.name})", s.periods, np.log(s.values), f"log {s.unit}".strip())


def exp_series(s: Series) -> Series:
    return Series(f"exp({s.name})", s.periods, np.exp(s.values))


def diff_series(a: Series, b: Series) -> Series:
    _require_aligned(a, b)
    return Series(f"{a.name}-{b.name}", a.periods, a.values - b.values, a.unit)


def scale_product_log(y: Series, w: Series) -> Series:
    """Elementwise ``log(y * w)``, e.g. a foreign aggregate converted at rate ``y``."""
    _require_aligned(y, w)
    _require_positive(y)
    _require_positive(w)
    return Series(f"log({y.name}*{w.name})", y.periods, np.log(y.values * w.values))
