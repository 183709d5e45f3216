"""Daily price series: CSV ingestion, chronological splits, horizon pairs, scaling."""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from decompfnn.exceptions import (
    DataError,
    DataOrderError,
    DegenerateScaleError,
    SchemaError,
    TooShortError,
)

__all__ = [
    "TimeSeries",
    "MinMaxScaler",
    "load_csv",
    "split_chronological",
    "make_pairs",
    "minmax_scaler",
    "describe",
    "INDEX_SPLITS",
    "INDEX_STATS",
    "matches_stats",
]

logger = logging.getLogger(__name__)

MISSING_TOKENS = {"", "null", "nan", "na", "n/a", "none"}

# (train, val, test) sample counts used for the three index series
INDEX_SPLITS = {
    "hsi": (1509, 376, 376),
    "sse": (1478, 370, 370),
    "spx": (1845, 462, 462),
}

# reference descriptive statistics of the three index close series
INDEX_STATS = {
    "hsi": {"samples": 2261, "min": 16250.27, "max": 33154.12, "mean": 23418.23, "std": 3097.44},
    "sse": {"samples": 2218, "min": 1950.01, "max": 5166.35, "mean": 2798.88, "std": 550.70},
    "spx": {"samples": 2769, "min": 1022.58, "max": 3756.07, "mean": 2077.30, "std": 674.72},
}


@dataclass(frozen=True)
class TimeSeries:
    """Univariate price series with optional train/validation split markers.

    ``split`` is ``(train_end, val_end)``: training covers ``[0, train_end)``,
    validation ``[train_end, val_end)`` and test ``[val_end, len)``.
    """

    dates: tuple
    values: np.ndarray
    split: tuple[int, int] | None = None
    dropped_rows: int = field(default=0, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("values must be 1-D")
        if len(self.dates) != values.size:
            raise ValueError("dates and values differ in length")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise DataError("prices must be finite and positive")
        for i in range(1, len(self.dates)):
            if not self.dates[i] > self.dates[i - 1]:
                raise DataOrderError(
                    f"dates not strictly increasing at row {i}: {self.dates[i - 1]} -> {self.dates[i]}"
                )
        if self.split is not None:
            train_end, val_end = self.split
            if not 0 < train_end < val_end < values.size:
                raise ValueError(f"invalid split {self.split} for length {values.size}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(self.dates))

    def __len__(self):
        return self.values.size

    @classmethod
    def from_values(cls, values, start: dt.date = dt.date(2000, 1, 3), split=None) -> "TimeSeries":
        """Wrap a bare array with consecutive daily dates (handy for synthetic data)."""
        values = np.asarray(values, dtype=float)
        dates = tuple(start + dt.timedelta(days=i) for i in range(values.size))
        return cls(dates, values, split)

    def _require_split(self) -> tuple[int, int]:
        if self.split is None:
            raise ValueError("series has no train/val/test split")
        return self.split

    @property
    def train(self) -> np.ndarray:
        return self.values[: self._require_split()[0]]

    @property
    def val(self) -> np.ndarray:
        a, b = self._require_split()
        return self.values[a:b]

    @property
    def test(self) -> np.ndarray:
        return self.values[self._require_split()[1] :]


def _parse_date(text: str, row: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError as exc:
        raise DataError(f"row {row}: cannot parse date {text!r} (expected YYYY-MM-DD)") from exc


def load_csv(path, column: str = "Close", min_rows: int = 10) -> TimeSeries:
    """Read a Yahoo-style daily export.

    Only ``Date`` and ``column`` are read. Rows whose price is empty or
    ``null`` are dropped; the count is stored in ``dropped_rows`` and
    reported through :mod:`warnings`.

    Raises
    ------
    SchemaError
        The header lacks ``Date`` or ``column``.
    DataOrderError
        Dates are not strictly increasing.
    TooShortError
        Fewer than ``min_rows`` usable rows remain.
    """
    path = Path(path)
    dates, values = [], []
    dropped = 0
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in ("Date", column) if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {missing}; header is {header}")
        for i, row in enumerate(reader, start=2):
            raw = (row.get(column) or "").strip()
            if raw.lower() in MISSING_TOKENS:
                dropped += 1
                continue
            try:
                price = float(raw)
            except ValueError as exc:
                raise DataError(f"{path} line {i}: bad price {raw!r}") from exc
            if not math.isfinite(price):
                dropped += 1
                continue
            dates.append(_parse_date(row["Date"], i))
            values.append(price)
    if dropped:
        warnings.warn(f"{path}: dropped {dropped} row(s) with missing {column!r}", stacklevel=2)
    if len(values) < min_rows:
        raise TooShortError(f"{path}: only {len(values)} usable rows (need {min_rows})")
    return TimeSeries(tuple(dates), np.array(values), None, dropped)


def split_chronological(ts: TimeSeries, n_train: int, n_val: int, n_test: int) -> TimeSeries:
    """Attach contiguous train/val/test splits; trailing excess samples are dropped."""
    if min(n_train, n_val, n_test) < 1:
        raise ValueError("each split needs at least one sample")
    total = n_train + n_val + n_test
    if total > len(ts):
        raise ValueError(f"splits need {total} samples, series has {len(ts)}")
    if total < len(ts):
        warnings.warn(f"dropping {len(ts) - total} trailing sample(s) beyond the test split", stacklevel=2)
    return replace(
        ts,
        dates=ts.dates[:total],
        values=ts.values[:total],
        split=(n_train, n_train + n_val),
    )


def make_pairs(values, h: int) -> tuple[np.ndarray, np.ndarray]:
    """Direct-strategy pairs ``(x[t], x[t + h])``.

    Returns ``(inputs, targets)``, each of length ``len(values) - h``.
    """
    values = np.asarray(values, dtype=float)
    if h < 1:
        raise ValueError("horizon must be >= 1")
    if values.size <= h:
        raise ValueError(f"series of length {values.size} is too short for horizon {h}")
    return values[:-h].copy(), values[h:].copy()


@dataclass(frozen=True)
class MinMaxScaler:
    """Affine map sending ``lo -> 0`` and ``hi -> 1``; no clamping."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise DegenerateScaleError(f"cannot scale a constant slice (min = max = {self.lo})")

    @property
    def span(self) -> float:
        return self.hi - self.lo

    def transform(self, x):
        return (np.asarray(x, dtype=float) - self.lo) / self.span

    def inverse(self, z):
        return np.asarray(z, dtype=float) * self.span + self.lo

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


def minmax_scaler(train_values, allow_degenerate: bool = False) -> MinMaxScaler:
    """Fit a min-max scaler to a training slice.

    With ``allow_degenerate`` a constant slice gets a unit-span scaler
    centred on its value instead of raising.
    """
    train_values = np.asarray(train_values, dtype=float)
    if train_values.size == 0:
        raise ValueError("empty training slice")
    lo, hi = float(train_values.min()), float(train_values.max())
    if hi <= lo and allow_degenerate:
        logger.warning("constant training slice (value %g); using unit span", lo)
        return MinMaxScaler(lo - 0.5, lo + 0.5)
    return MinMaxScaler(lo, hi)


def describe(values) -> dict:
    """Sample count, min, max, mean and sample standard deviation."""
    values = np.asarray(values, dtype=float)
    return {
        "samples": int(values.size),
        "min": float(values.min()),
        "max": float(values.max()),
        "mean": float(values.mean()),
        "std": float(values.std(ddof=1)) if values.size > 1 else 0.0,
    }


def matches_stats(values, expected: dict, rel_tol: float = 0.01) -> list[str]:
    """Names of statistics in ``expected`` that differ from ``values`` by more than ``rel_tol``."""
    got = describe(values)
    return [k for k, v in expected.items() if abs(got[k] - v) > rel_tol * abs(v)]
