"""Symbolization, window counting and multinomial model fitting.

The pipeline is: real-valued series -> per-variable symbol series ->
lag-strided window counts -> maximum-likelihood window distribution.
Each stage is a plain function over immutable inputs; counts from disjoint
segments of a long recording merge by summation.
"""

from __future__ import annotations

import csv
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConstantSeries, InputDataError, SeriesTooShort, ShapeMismatch
from .flows import Conditioning, InfoNetwork, ProcessModel, build_network, window_axes
from .table import normalize


@dataclass(frozen=True)
class RealSeries:
    """Multivariate real-valued recording, one row per variable."""

    values: np.ndarray
    sample_interval: float | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeMismatch(f"values must be 2-d (vars x time), got {arr.ndim}-d")
        if arr.shape[1] < 2:
            raise InputDataError("series needs at least 2 time steps")
        if not np.all(np.isfinite(arr)):
            raise InputDataError("series contains NaN or Inf")
        object.__setattr__(self, "values", arr)

    @property
    def n_vars(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SymbolSeries:
    """Discrete symbol matrix with a per-variable alphabet size."""

    symbols: np.ndarray
    arities: tuple[int, ...]

    def __post_init__(self) -> None:
        arr = np.asarray(self.symbols)
        if arr.ndim != 2:
            raise ShapeMismatch(f"symbols must be 2-d (vars x time), got {arr.ndim}-d")
        if arr.shape[0] != len(self.arities):
            raise ShapeMismatch(
                f"{arr.shape[0]} symbol rows but {len(self.arities)} arities"
            )
        arr = arr.astype(np.int64, copy=False)
        for v, m in enumerate(self.arities):
            if m < 1:
                raise ShapeMismatch(f"arity of variable {v} must be >= 1")
            row = arr[v]
            if row.size and (row.min() < 0 or row.max() >= m):
                raise InputDataError(
                    f"variable {v} has symbols outside 0..{m - 1}"
                )
        object.__setattr__(self, "symbols", arr)
        object.__setattr__(self, "arities", tuple(int(m) for m in self.arities))

    @property
    def n_vars(self) -> int:
        return self.symbols.shape[0]

    @property
    def length(self) -> int:
        return self.symbols.shape[1]


@dataclass(frozen=True)
class WindowCounts:
    """Frequencies of lag-strided windows, presents first then deeper lags."""

    order: int
    lag: int
    counts: dict[tuple[int, ...], int]
    total_windows: int


def _constant_rows(values: np.ndarray) -> list[int]:
    return [v for v in range(values.shape[0]) if values[v].min() == values[v].max()]


def symbolize_median(series: RealSeries) -> SymbolSeries:
    """Split each variable at its own median; value >= median maps to 1.

    A constant variable triggers a ConstantSeries warning and, by the tie
    rule, comes out as all ones.
    """
    flat = _constant_rows(series.values)
    if flat:
        warnings.warn(
            f"constant variable(s) {flat}: median split is degenerate",
            ConstantSeries,
            stacklevel=2,
        )
    med = np.median(series.values, axis=1, keepdims=True)
    symbols = (series.values >= med).astype(np.int64)
    return SymbolSeries(symbols, (2,) * series.n_vars)


def symbolize_quantile(series: RealSeries, m: int) -> SymbolSeries:
    """Equal-frequency binning into m symbols; m=2 reduces to the median split."""
    if m < 2:
        raise ShapeMismatch(f"need at least 2 bins, got {m}")
    flat = _constant_rows(series.values)
    if flat:
        warnings.warn(
            f"constant variable(s) {flat}: quantile split is degenerate",
            ConstantSeries,
            stacklevel=2,
        )
    symbols = np.empty(series.values.shape, dtype=np.int64)
    qs = np.arange(1, m) / m
    for v in range(series.n_vars):
        edges = np.quantile(series.values[v], qs)
        # side='right' sends a value equal to an edge into the upper bin,
        # matching the >= tie rule of the median split
        symbols[v] = np.searchsorted(edges, series.values[v], side="right")
    return SymbolSeries(symbols, (m,) * series.n_vars)


def window_codes(
    symbols: np.ndarray, arities: Sequence[int], order: int, lag: int
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Encode every complete window as one integer.

    Returns the code array (one entry per window start) and the mixed-radix
    digit sizes in window order: all variables at the present step, then all
    at lag, then 2*lag, up to order*lag.
    """
    n, length = symbols.shape
    span = order * lag
    if length <= span:
        raise SeriesTooShort(
            f"length {length} admits no window of order {order} at lag {lag}"
        )
    layers = [symbols[:, span - d * lag : length - d * lag] for d in range(order + 1)]
    stacked = np.concatenate(layers, axis=0)
    dims = tuple(int(arities[v]) for _ in range(order + 1) for v in range(n))
    codes = np.ravel_multi_index(stacked, dims)
    return codes, dims


def count_windows(symbols: SymbolSeries, order: int, lag: int) -> WindowCounts:
    """Count all maximally overlapping windows of the given order and lag."""
    if order < 0 or lag < 1:
        raise ShapeMismatch(f"need order >= 0 and lag >= 1, got {order}, {lag}")
    codes, dims = window_codes(symbols.symbols, symbols.arities, order, lag)
    freq = np.bincount(codes, minlength=int(np.prod(dims)))
    occupied = np.flatnonzero(freq)
    keys = np.unravel_index(occupied, dims)
    counts = {
        tuple(int(k[idx]) for k in keys): int(freq[cell])
        for idx, cell in enumerate(occupied)
    }
    return WindowCounts(order, lag, counts, int(codes.size))


def merge_counts(*parts: WindowCounts) -> WindowCounts:
    """Sum window counts from disjoint segments of one process."""
    if not parts:
        raise ShapeMismatch("nothing to merge")
    first = parts[0]
    merged: dict[tuple[int, ...], int] = {}
    total = 0
    for part in parts:
        if (part.order, part.lag) != (first.order, first.lag):
            raise ShapeMismatch("segments counted with different order or lag")
        for key, c in part.counts.items():
            merged[key] = merged.get(key, 0) + c
        total += part.total_windows
    return WindowCounts(first.order, first.lag, merged, total)


def fit_mle(counts: WindowCounts, arities: Sequence[int]) -> ProcessModel:
    """Multinomial maximum-likelihood window distribution."""
    n = len(arities)
    axes = window_axes(n, counts.order, counts.lag)
    dims = tuple(int(arities[v]) for _ in range(counts.order + 1) for v in range(n))
    table = normalize(counts.counts, axes, dims)
    return ProcessModel(n, counts.order, counts.lag, table)


def estimate_network(
    series: RealSeries | SymbolSeries,
    order: int,
    lag: int,
    bins: int = 2,
    mode: Conditioning = Conditioning.MULTIVARIATE,
) -> InfoNetwork:
    """Full pipeline: symbolize if needed, count, fit, evaluate all flows."""
    if isinstance(series, RealSeries):
        symbols = (
            symbolize_median(series) if bins == 2 else symbolize_quantile(series, bins)
        )
    else:
        symbols = series
    counts = count_windows(symbols, order, lag)
    model = fit_mle(counts, symbols.arities)
    return build_network(model, mode)


# -- CSV forms ---------------------------------------------------------------


def read_series_csv(path: str | Path) -> tuple[RealSeries, tuple[str, ...]]:
    """Read the time-series form: header of names, one row per time step."""
    rows, names = _read_csv_rows(path)
    try:
        values = np.array(rows, dtype=np.float64)
    except ValueError as exc:
        raise InputDataError(f"{path}: non-numeric cell ({exc})") from exc
    if not np.all(np.isfinite(values)):
        raise InputDataError(f"{path}: NaN or Inf entries")
    try:
        return RealSeries(values.T), names
    except (InputDataError, ShapeMismatch) as exc:
        raise InputDataError(f"{path}: {exc}") from exc


def read_symbols_csv(path: str | Path) -> tuple[SymbolSeries, tuple[str, ...]]:
    """Read the pre-symbolized integer form; arities from per-column maxima."""
    rows, names = _read_csv_rows(path)
    try:
        values = np.array(rows, dtype=np.int64)
    except (ValueError, OverflowError) as exc:
        raise InputDataError(f"{path}: non-integer cell ({exc})") from exc
    if values.size and values.min() < 0:
        raise InputDataError(f"{path}: negative symbols")
    arities = tuple(int(m) + 1 for m in values.max(axis=0))
    try:
        return SymbolSeries(values.T, arities), names
    except (InputDataError, ShapeMismatch) as exc:
        raise InputDataError(f"{path}: {exc}") from exc


def _read_csv_rows(path: str | Path) -> tuple[list[list[str]], tuple[str, ...]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            names: tuple[str, ...] | None = None
            rows = []
            for lineno, row in enumerate(reader, start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if row[0].lstrip().startswith("#"):
                    continue
                if names is None:
                    names = tuple(name.strip() for name in row)
                    continue
                if len(row) != len(names):
                    raise InputDataError(
                        f"{path}:{lineno}: {len(row)} cells, expected {len(names)}"
                    )
                rows.append([cell.strip() for cell in row])
    except OSError as exc:
        raise InputDataError(f"cannot read {path}: {exc}") from exc
    if names is None:
        raise InputDataError(f"{path}: empty file")
    if not rows:
        raise InputDataError(f"{path}: no data rows")
    return rows, names


def write_series_csv(
    path: str | Path,
    series: RealSeries,
    names: Sequence[str] | None = None,
    comments: Sequence[str] = (),
) -> None:
    """Write the time-series form; optional leading '#' comment lines."""
    _write_csv(
        path,
        names or [f"v{i}" for i in range(series.n_vars)],
        series.values.T,
        "{:.17g}".format,
        comments,
    )


def write_symbols_csv(
    path: str | Path,
    symbols: SymbolSeries,
    names: Sequence[str] | None = None,
    comments: Sequence[str] = (),
) -> None:
    _write_csv(
        path,
        names or [f"v{i}" for i in range(symbols.n_vars)],
        symbols.symbols.T,
        str,
        comments,
    )


def _write_csv(path, names, matrix, fmt, comments) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in matrix:
            writer.writerow([fmt(cell) for cell in row])
