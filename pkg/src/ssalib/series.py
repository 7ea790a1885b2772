"""Equidistant time series container and CSV / plain-text I/O."""

from __future__ import annotations

import csv
import io
import math
import os
import warnings
from dataclasses import dataclass
from typing import IO, Mapping, Sequence, Union

import numpy as np

from .errors import FormatError, IoError, ValidationError

__all__ = ["TimeIndex", "TimeSeries", "load_series", "write_series"]

#: relative tolerance used to decide whether a time column is equidistant
EQUIDISTANT_RTOL = 1e-9


@dataclass(frozen=True)
class TimeIndex:
    """Regular time axis ``start + k * step``."""

    start: float
    step: float
    unit: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.step)):
            raise ValidationError("time index start/step must be finite")
        if self.step <= 0:
            raise ValidationError("time index step must be positive")

    def times(self, n, offset=0):
        return self.start + (offset + np.arange(n)) * self.step

    def shifted(self, k):
        """Index of the same axis starting ``k`` steps later."""
        return TimeIndex(self.start + k * self.step, self.step, self.unit)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Immutable real-valued equidistant series.

    ``values`` is stored as a read-only float64 array. ``index`` and ``name``
    are optional metadata carried through reconstruction and forecasting.
    """

    values: np.ndarray
    index: TimeIndex | None = None
    name: str | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True).ravel()
        if vals.size < 3:
            raise ValidationError(f"series has {vals.size} points, at least 3 are required")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise ValidationError(f"non-finite value {vals[bad]!r} at position {bad}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def times(self):
        if self.index is None:
            return None
        return self.index.times(len(self))

    def with_values(self, values, name=None):
        """New series sharing this series' index metadata."""
        return TimeSeries(values, self.index, self.name if name is None else name)


PathOrStream = Union[str, os.PathLike, IO]


def _read_text(source):
    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise IoError(f"cannot read {os.fspath(source)!r}: {exc}") from exc
    else:
        raw = source.read()
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise FormatError(f"input is not valid UTF-8 text: {exc}") from exc
    return raw


def _parse_float(token, lineno):
    try:
        return float(token)
    except ValueError:
        raise FormatError(f"cannot parse {token!r} as a number", lineno) from None


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_series(
    source: PathOrStream,
    format: str = "csv",
    value_column: Union[int, str, None] = None,
    name: str | None = None,
) -> TimeSeries:
    """Read a series from a CSV or plain text file.

    Parameters
    ----------
    source : path or file object
        Text or binary stream, or a path.
    format : {"csv", "plain"}
        ``plain`` expects one number per line. ``csv`` accepts an optional
        header row and either one value column or ``time,value`` columns.
    value_column : int or str, optional
        Column holding the values when the CSV has more than two columns.
        Defaults to the last column.
    name : str, optional
        Series name; defaults to the header of the value column.

    Raises
    ------
    FormatError
        Unparseable content (the message carries the line number).
    ValidationError
        Non-finite values or fewer than 3 points.
    """
    if format not in ("csv", "plain"):
        raise ValueError(f"unknown format {format!r}")
    text = _read_text(source)
    lines = text.splitlines()

    if format == "plain":
        values = []
        for lineno, line in enumerate(lines, 1):
            token = line.strip()
            if token:
                values.append(_parse_float(token, lineno))
        return TimeSeries(np.array(values, dtype=float), name=name)

    rows = [
        (lineno, [tok.strip() for tok in row])
        for lineno, row in enumerate(csv.reader(lines), 1)
        if row and any(tok.strip() for tok in row)
    ]
    if not rows:
        raise ValidationError("empty input")
    header = None
    if not all(_is_number(tok) for tok in rows[0][1]):
        header = rows[0][1]
        rows = rows[1:]
    ncol = len(header) if header is not None else len(rows[0][1]) if rows else 1

    if value_column is None:
        vcol = ncol - 1
    elif isinstance(value_column, str):
        if header is None or value_column not in header:
            raise FormatError(f"no column named {value_column!r}")
        vcol = header.index(value_column)
    else:
        vcol = int(value_column)
    tcol = 0 if ncol == 2 and vcol == 1 else None

    values = np.empty(len(rows))
    tokens_t = []
    for k, (lineno, row) in enumerate(rows):
        if len(row) != ncol:
            raise FormatError(f"expected {ncol} fields, found {len(row)}", lineno)
        values[k] = _parse_float(row[vcol], lineno)
        if tcol is not None:
            tokens_t.append(row[tcol])

    index = None
    if tcol is not None:
        index = _equidistant_index(tokens_t, header[tcol] if header else "")
    if name is None and header is not None:
        name = header[vcol] or None
    return TimeSeries(values, index=index, name=name)


def _equidistant_index(tokens, unit):
    try:
        t = np.array([float(tok) for tok in tokens])
    except ValueError:
        warnings.warn("time column is not numeric; index dropped", stacklevel=3)
        return None
    if t.size < 2 or not np.all(np.isfinite(t)):
        warnings.warn("time column unusable; index dropped", stacklevel=3)
        return None
    step = (t[-1] - t[0]) / (t.size - 1)
    expected = t[0] + np.arange(t.size) * step
    if step <= 0 or np.max(np.abs(t - expected)) > EQUIDISTANT_RTOL * abs(step):
        warnings.warn("time column is not equidistant; index dropped", stacklevel=3)
        return None
    return TimeIndex(float(t[0]), float(step), unit)


def _fmt(x):
    return format(float(x), ".17g")


def write_series(
    series: Union[TimeSeries, Mapping[str, TimeSeries], Sequence[TimeSeries]],
    sink: PathOrStream,
    format: str = "csv",
) -> None:
    """Write one series or a labelled collection as a single CSV.

    Values are printed with 17 significant digits so that :func:`load_series`
    reproduces them bit for bit. A collection must share length and index;
    the index (if any) becomes a leading ``time`` column.
    """
    if format != "csv":
        raise ValueError(f"unknown format {format!r}")
    if isinstance(series, TimeSeries):
        columns = {series.name or "value": series}
    elif isinstance(series, Mapping):
        columns = dict(series)
    else:
        columns = {s.name or f"F{k + 1}": s for k, s in enumerate(series)}
    if not columns:
        raise ValidationError("nothing to write: empty collection")
    items = list(columns.values())
    n = len(items[0])
    index = items[0].index
    for s in items[1:]:
        if len(s) != n:
            raise ValidationError("series in a collection must have equal length")
        if s.index != index:
            raise ValidationError("series in a collection must share the time index")

    buf = io.StringIO()
    header = (["time"] if index is not None else []) + [str(k) for k in columns]
    buf.write(",".join(header) + "\n")
    times = index.times(n) if index is not None else None
    data = np.column_stack([s.values for s in items])
    for k in range(n):
        fields = [_fmt(v) for v in data[k]]
        if times is not None:
            fields.insert(0, _fmt(times[k]))
        buf.write(",".join(fields) + "\n")

    text = buf.getvalue()
    if isinstance(sink, (str, os.PathLike)):
        try:
            with open(sink, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(f"cannot write {os.fspath(sink)!r}: {exc}") from exc
    else:
        try:
            sink.write(text)
        except TypeError:
            sink.write(text.encode())
