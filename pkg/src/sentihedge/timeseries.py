"""Date-indexed series, trading-day alignment, window aggregation and lagging.

Everything downstream (sentiment features, market features, statistics)
runs on these containers.  All types are immutable after construction and
all operations are pure functions.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from datetime import date
from typing import Sequence

import numpy as np

from .errors import DataError

#: Named aggregation windows, in trading days.  Market series exist only on
#: trading days, so "weekly" is 5 bars, not 7 calendar days.
NAMED_WINDOWS = {
    "daily": 1,
    "weekly": 5,
    "biweekly": 10,
    "triweekly": 15,
    "monthly": 21,
    "fiveweekly": 25,
    "sixweekly": 30,
}


@dataclass(frozen=True)
class DateIndex:
    """Strictly increasing calendar dates with a trading-day flag per date."""

    dates: tuple[date, ...]
    trading: tuple[bool, ...]

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.trading):
            raise DataError("DateIndex: dates and trading flags differ in length")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise DataError(f"DateIndex: dates not strictly increasing at {b}")

    @classmethod
    def from_dates(cls, dates: Sequence[date], trading: Sequence[bool] | None = None) -> "DateIndex":
        if trading is None:
            trading = [True] * len(dates)
        return cls(tuple(dates), tuple(bool(t) for t in trading))

    def __len__(self) -> int:
        return len(self.dates)

    def trading_dates(self) -> tuple[date, ...]:
        return tuple(d for d, t in zip(self.dates, self.trading) if t)


class Series:
    """A named real-valued series over a DateIndex.

    Missing values are tracked with an explicit boolean mask (``True`` =
    present); the value slots under missing positions are NaN but the mask
    is the source of truth.  Instances are immutable: the backing arrays
    are frozen after construction.
    """

    __slots__ = ("name", "index", "values", "mask")

    def __init__(
        self,
        name: str,
        index: DateIndex,
        values: Sequence[float] | np.ndarray,
        mask: Sequence[bool] | np.ndarray | None = None,
    ) -> None:
        vals = np.array(values, dtype=float)
        if mask is None:
            msk = ~np.isnan(vals)
        else:
            msk = np.array(mask, dtype=bool)
        if vals.shape != (len(index),) or msk.shape != vals.shape:
            raise DataError(f"Series {name!r}: length {vals.shape} does not match index {len(index)}")
        vals = vals.copy()
        vals[~msk] = np.nan
        if not np.isfinite(vals[msk]).all():
            raise DataError(f"Series {name!r}: non-finite value marked as present")
        vals.setflags(write=False)
        msk.setflags(write=False)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mask", msk)

    def __setattr__(self, key, value):  # immutability guard
        raise AttributeError("Series is immutable")

    @classmethod
    def from_pairs(cls, name: str, index: DateIndex, values: Sequence[float | None]) -> "Series":
        vals = np.array([np.nan if v is None else float(v) for v in values])
        mask = np.array([v is not None for v in values])
        return cls(name, index, vals, mask)

    def __len__(self) -> int:
        return len(self.index)

    def present_count(self) -> int:
        return int(self.mask.sum())

    def to_list(self) -> list[float | None]:
        return [float(v) if m else None for v, m in zip(self.values, self.mask)]

    def rename(self, name: str) -> "Series":
        return Series(name, self.index, self.values, self.mask)

    def __repr__(self) -> str:
        return f"Series({self.name!r}, n={len(self)}, present={self.present_count()})"


@dataclass(frozen=True)
class WindowSpec:
    """Aggregation window width in trading days; named windows are fixed counts."""

    width: int

    def __post_init__(self) -> None:
        if self.width < 1:
            raise DataError(f"window width must be >= 1, got {self.width}")

    @classmethod
    def named(cls, name: str) -> "WindowSpec":
        try:
            return cls(NAMED_WINDOWS[name])
        except KeyError:
            raise DataError(
                f"unknown window {name!r}; choices: {', '.join(NAMED_WINDOWS)}"
            ) from None

    @classmethod
    def of(cls, spec: "WindowSpec | int | str") -> "WindowSpec":
        if isinstance(spec, WindowSpec):
            return spec
        if isinstance(spec, int):
            return cls(spec)
        return cls.named(spec)


def align(
    tweet_days: DateIndex,
    trading_days: DateIndex,
    policy: str = "next-trading-day",
) -> tuple[dict[date, date], int]:
    """Map every tweet calendar day onto a trading day.

    ``next-trading-day`` maps non-trading dates forward to the first
    following trading day; ``drop`` discards them.  Dates falling after the
    last trading day cannot be mapped and are dropped under either policy;
    the count of dropped dates is returned alongside the mapping.
    """
    if policy not in ("next-trading-day", "drop"):
        raise DataError(f"unknown alignment policy {policy!r}")
    open_days = sorted(trading_days.trading_dates())
    if not open_days:
        raise DataError("align: no trading days supplied")
    open_set = set(open_days)
    mapping: dict[date, date] = {}
    dropped = 0
    for d in tweet_days.dates:
        if d in open_set:
            mapping[d] = d
            continue
        if policy == "drop":
            dropped += 1
            continue
        pos = bisect_left(open_days, d)
        if pos == len(open_days):
            dropped += 1  # after the last trading day: nowhere to land
            continue
        mapping[d] = open_days[pos]
    return mapping, dropped


def aggregate(series: Series, window: WindowSpec | int | str, reducer: str = "mean") -> Series:
    """Reduce fixed non-overlapping windows (anchored at the series start).

    A trailing partial window is dropped.  ``mean`` and ``sum`` ignore
    missing values; ``last`` takes the last present value.  A window with
    no present values yields missing.
    """
    spec = WindowSpec.of(window)
    if reducer not in ("mean", "sum", "last"):
        raise DataError(f"unknown reducer {reducer!r}")
    w = spec.width
    n_windows = len(series) // w
    out_vals: list[float | None] = []
    out_dates: list[date] = []
    out_trading: list[bool] = []
    for i in range(n_windows):
        sl = slice(i * w, (i + 1) * w)
        vals = series.values[sl]
        msk = series.mask[sl]
        if not msk.any():
            out_vals.append(None)
        elif reducer == "mean":
            out_vals.append(float(vals[msk].mean()))
        elif reducer == "sum":
            out_vals.append(float(vals[msk].sum()))
        else:  # last present value in the window
            out_vals.append(float(vals[msk][-1]))
        out_dates.append(series.index.dates[sl.stop - 1])
        out_trading.append(series.index.trading[sl.stop - 1])
    idx = DateIndex(tuple(out_dates), tuple(out_trading))
    return Series.from_pairs(series.name, idx, out_vals)


def lag(series: Series, k: int) -> Series:
    """Shift the series back by ``k`` positions; the first ``k`` become missing."""
    if k < 1:
        raise DataError(f"lag requires k >= 1, got {k}")
    n = len(series)
    vals = np.full(n, np.nan)
    mask = np.zeros(n, dtype=bool)
    if k < n:
        vals[k:] = series.values[:-k]
        mask[k:] = series.mask[:-k]
    return Series(series.name, series.index, vals, mask)


def pairwise_complete(x: Series, y: Series) -> tuple[np.ndarray, np.ndarray]:
    """Values of ``x`` and ``y`` at positions where both are present."""
    if x.index != y.index:
        raise DataError(f"series {x.name!r} and {y.name!r} are on different indexes")
    both = x.mask & y.mask
    return x.values[both], y.values[both]
