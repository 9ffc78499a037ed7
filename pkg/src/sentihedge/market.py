"""Market features from OHLCV bars: log returns, log volume, Garman-Klass volatility."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from typing import Sequence

import numpy as np

from .errors import DataError
from .timeseries import DateIndex, Series

GK_CLOSE_OPEN_WEIGHT = 2.0 * math.log(2.0) - 1.0


@dataclass(frozen=True)
class OhlcvBar:
    date: date
    open: float
    high: float
    low: float
    close: float
    volume: int

    def __post_init__(self) -> None:
        if min(self.open, self.high, self.low, self.close) <= 0:
            raise DataError(f"{self.date}: prices must be strictly positive")
        if self.low > min(self.open, self.close) or self.high < max(self.open, self.close):
            raise DataError(
                f"{self.date}: OHLC ordering violated "
                f"(O={self.open} H={self.high} L={self.low} C={self.close})"
            )
        if self.volume < 0:
            raise DataError(f"{self.date}: negative volume")


def _index_of(bars: Sequence[OhlcvBar]) -> DateIndex:
    return DateIndex.from_dates([b.date for b in bars])


def _check_increasing(bars: Sequence[OhlcvBar]) -> None:
    for a, b in zip(bars, bars[1:]):
        if a.date >= b.date:
            raise DataError(f"bars not strictly increasing at {b.date}")


def returns(bars: Sequence[OhlcvBar]) -> Series:
    """Close-over-close log return in percent; the first bar is missing."""
    if len(bars) < 2:
        raise DataError("returns: need at least two bars")
    _check_increasing(bars)
    closes = np.array([b.close for b in bars])
    vals = np.full(len(bars), np.nan)
    vals[1:] = (np.log(closes[1:]) - np.log(closes[:-1])) * 100.0
    return Series("return", _index_of(bars), vals)


def gk_volatility(bars: Sequence[OhlcvBar], window: int = 1, floor_negative: bool = True) -> Series:
    """Garman-Klass range volatility over a trailing window of ``window`` bars.

    Per-bar variance term: 0.5*ln(H/L)^2 - (2 ln 2 - 1)*ln(C/O)^2.  The term
    can go negative for a large close-to-open move inside a narrow range;
    by default each term is floored at 0 before averaging so the square
    root is defined (pass ``floor_negative=False`` for the raw estimator).
    The first ``window - 1`` positions are missing.
    """
    if window < 1:
        raise DataError(f"gk_volatility: window must be >= 1, got {window}")
    if not bars:
        raise DataError("gk_volatility: no bars")
    _check_increasing(bars)
    hl = np.array([math.log(b.high / b.low) for b in bars])
    co = np.array([math.log(b.close / b.open) for b in bars])
    terms = 0.5 * hl**2 - GK_CLOSE_OPEN_WEIGHT * co**2
    if floor_negative:
        terms = np.maximum(terms, 0.0)
    n = len(bars)
    vals = np.full(n, np.nan)
    for t in range(window - 1, n):
        mean_term = terms[t - window + 1 : t + 1].mean()
        vals[t] = math.sqrt(mean_term) if mean_term >= 0 else np.nan
    mask = ~np.isnan(vals)
    return Series("volatility", _index_of(bars), vals, mask)


def log_volume(bars: Sequence[OhlcvBar]) -> Series:
    """log(1 + traded shares); zero-volume halt days map to 0."""
    if not bars:
        raise DataError("log_volume: no bars")
    _check_increasing(bars)
    vals = np.log1p(np.array([float(b.volume) for b in bars]))
    return Series("log_volume", _index_of(bars), vals)


def market_features(bars: Sequence[OhlcvBar], volatility_window: int = 1) -> dict[str, Series]:
    """The standard market feature set on a shared index: return, log_volume, volatility."""
    return {
        "return": returns(bars),
        "log_volume": log_volume(bars),
        "volatility": gk_volatility(bars, volatility_window),
    }
