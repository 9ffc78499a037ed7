"""Dataset assembly: ingest raw CSVs into canonical feature frames, derive
windowed feature sets, and run the window R-squared sweep."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError
from .io import (
    Frame,
    read_daily_counts_csv,
    read_frame_csv,
    read_market_csv,
    read_tweets_csv,
    write_daily_counts_csv,
    write_frame_csv,
    write_market_csv,
)
from .market import OhlcvBar, market_features
from .sentiment import DailySentiment, NaiveBayesModel, daily_counts, features
from .stats import ols
from .timeseries import DateIndex, Series, WindowSpec, aggregate, align, lag

SENTIMENT_COLUMNS = ("positive", "negative", "bullishness", "agreement", "msg_volume")
CARRIED_COLUMNS = tuple(f"carried_{name}" for name in ("pos", "neg", "bullishness", "agreement", "msg_volume"))
MARKET_COLUMNS = ("return", "log_volume", "volatility")

BARS_FILE = "bars.csv"
COUNTS_FILE = "daily_counts.csv"
SENTIMENT_FILE = "sentiment_features.csv"
MARKET_FILE = "market_features.csv"
FEATURES_FILE = "features.csv"


@dataclass(frozen=True)
class Dataset:
    bars: list[OhlcvBar]
    counts: list[DailySentiment]
    frame: Frame
    dropped_tweets: int


def build_frame(bars: Sequence[OhlcvBar], counts: Sequence[DailySentiment]) -> Frame:
    """Merge sentiment and market features onto the trading-day index.

    Trading days inside the tweet span with no tweets are silent days
    (zero counts); trading days outside the tweet span have missing
    sentiment features.
    """
    if not bars:
        raise DataError("build_frame: no market bars")
    index = DateIndex.from_dates([b.date for b in bars])
    count_map = {c.date: c for c in counts}
    if counts:
        first, last = counts[0].date, counts[-1].date
        filled = [
            count_map.get(d, DailySentiment(d, 0, 0))  # silent trading day
            for d in index.dates
            if first <= d <= last
        ]
    else:
        filled = []
    feats = features(filled)
    feat_map = {f.date: f for f in feats}
    filled_map = {c.date: c for c in filled}

    def sentiment_series(name: str, getter) -> Series:
        vals = []
        for d in index.dates:
            f = feat_map.get(d)
            vals.append(None if f is None else getter(f))
        return Series.from_pairs(name, index, vals)

    count_cols = [
        sentiment_series("positive", lambda f: float(filled_map[f.date].m_pos)),
        sentiment_series("negative", lambda f: float(filled_map[f.date].m_neg)),
        sentiment_series("bullishness", lambda f: f.bullishness),
        sentiment_series("agreement", lambda f: f.agreement),
        sentiment_series("msg_volume", lambda f: f.message_volume),
        sentiment_series("carried_pos", lambda f: f.carried_pos),
        sentiment_series("carried_neg", lambda f: f.carried_neg),
        sentiment_series("carried_bullishness", lambda f: f.carried_bullishness),
        sentiment_series("carried_agreement", lambda f: f.carried_agreement),
        sentiment_series("carried_msg_volume", lambda f: f.carried_msg_volume),
    ]
    market = market_features(bars)
    closes = Series("close", index, [b.close for b in bars])
    return Frame.from_series(count_cols + [market["return"], market["log_volume"], market["volatility"], closes])


def ingest(
    tweet_csv: str | Path,
    market_csv: str | Path,
    out_dir: str | Path,
    policy: str = "next-trading-day",
    model: NaiveBayesModel | None = None,
) -> Dataset:
    """Parse, align and validate the raw corpus; persist the canonical bundle."""
    bars = read_market_csv(market_csv)
    if len(bars) < 2:
        raise DataError("ingest: need at least two market bars")
    tweets = read_tweets_csv(tweet_csv)
    trading = DateIndex.from_dates([b.date for b in bars])
    tweet_days = sorted({t.date for t in tweets})
    dropped = 0
    if tweet_days:
        tweet_index = DateIndex.from_dates(tweet_days)
        mapping, dropped = align(tweet_index, trading, policy)
    else:
        mapping = {}
    counts = daily_counts(tweets, model=model, alignment=mapping)
    frame = build_frame(bars, counts)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_market_csv(out / BARS_FILE, bars)
    write_daily_counts_csv(out / COUNTS_FILE, counts)
    sentiment_frame = Frame.from_series(
        [frame.series[name] for name in SENTIMENT_COLUMNS + CARRIED_COLUMNS]
    )
    market_frame = Frame.from_series([frame.series[name] for name in MARKET_COLUMNS])
    write_frame_csv(sentiment_frame, out / SENTIMENT_FILE)
    write_frame_csv(market_frame, out / MARKET_FILE)
    write_frame_csv(frame, out / FEATURES_FILE)
    return Dataset(bars, counts, frame, dropped)


def rebuild_features(data_dir: str | Path) -> Frame:
    """Recompute and rewrite the feature frames from a canonical bundle."""
    data = Path(data_dir)
    bars = read_market_csv(data / BARS_FILE)
    counts = read_daily_counts_csv(data / COUNTS_FILE)
    frame = build_frame(bars, counts)
    sentiment_frame = Frame.from_series(
        [frame.series[name] for name in SENTIMENT_COLUMNS + CARRIED_COLUMNS]
    )
    market_frame = Frame.from_series([frame.series[name] for name in MARKET_COLUMNS])
    write_frame_csv(sentiment_frame, data / SENTIMENT_FILE)
    write_frame_csv(market_frame, data / MARKET_FILE)
    write_frame_csv(frame, data / FEATURES_FILE)
    return frame


def load_features(data_dir: str | Path) -> Frame:
    return read_frame_csv(Path(data_dir) / FEATURES_FILE)


def windowed_features(frame: Frame, window: WindowSpec | int | str) -> dict[str, Series]:
    """Aggregate the frame to a window: means for features and returns, last
    for the close; carried features are the one-window lag of the aggregated
    same-window features."""
    spec = WindowSpec.of(window)
    out: dict[str, Series] = {}
    for name in SENTIMENT_COLUMNS:
        out[name] = aggregate(frame.column(name), spec, "mean")
    for name in SENTIMENT_COLUMNS:
        carried_name = "carried_" + ("pos" if name == "positive" else "neg" if name == "negative" else name)
        out[carried_name] = lag(out[name], 1).rename(carried_name)
    for name in MARKET_COLUMNS:
        if name in frame.columns:
            out[name] = aggregate(frame.column(name), spec, "mean")
    if "close" in frame.columns:
        out["close"] = aggregate(frame.column("close"), spec, "last")
    return out


@dataclass(frozen=True)
class SweepRow:
    window: str
    width: int
    r2: float | None
    n: int
    note: str


def sweep_windows(frame: Frame, windows: Sequence[str] | None = None) -> list[SweepRow]:
    """R-squared of regressing windowed returns on the five tweet features
    (same window and carried) for each window width.

    Zero-variance or collinear regressors are dropped before fitting (a
    constant feature set degenerates to the intercept-only fit, R² = 0);
    windows with too few complete rows are skipped with a note.
    """
    from .timeseries import NAMED_WINDOWS

    names = list(windows) if windows is not None else list(NAMED_WINDOWS)
    rows: list[SweepRow] = []
    for name in names:
        spec = WindowSpec.named(name)
        feats = windowed_features(frame, spec)
        target = feats["return"]
        regressors = [feats[c] for c in SENTIMENT_COLUMNS + CARRIED_COLUMNS]
        mask = target.mask.copy()
        for s in regressors:
            mask &= s.mask
        n = int(mask.sum())
        yv = target.values[mask]
        notes = []
        kept: list[np.ndarray] = []
        kept_names: list[str] = []
        design = [np.ones(n)]
        for s in regressors:
            col = s.values[mask]
            if n == 0 or np.ptp(col) == 0.0:
                notes.append(f"dropped {s.name} (constant)")
                continue
            trial = np.column_stack(design + [col])
            if np.linalg.matrix_rank(trial) == trial.shape[1]:
                design.append(col)
                kept.append(col)
                kept_names.append(s.name)
            else:
                notes.append(f"dropped {s.name} (collinear)")
        if n < len(kept) + 2:
            rows.append(SweepRow(name, spec.width, None, n, "skipped: too few complete windows"))
            continue
        if not kept:
            rows.append(SweepRow(name, spec.width, 0.0, n, "; ".join(notes) or "intercept only"))
            continue
        fit = ols(yv, kept, intercept=True, names=kept_names)
        rows.append(SweepRow(name, spec.width, fit.r2, n, "; ".join(notes)))
    return rows
