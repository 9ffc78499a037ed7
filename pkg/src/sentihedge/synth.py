"""Reproducible synthetic corpora for tests and demos.

Generators: ar1 (autocorrelated returns, unrelated tweets), lagged-cause
(yesterday's bullishness drives today's return), separable-weeks (prior-week
sentiment linearly separates next week's direction), crash-path (a 30%
drawdown for hedging scenarios).  Everything derives from one seed.
"""

from __future__ import annotations

import math
from datetime import date, timedelta

import numpy as np

from .errors import DataError
from .market import OhlcvBar
from .sentiment import DailySentiment, TweetRecord, bullishness
from .timeseries import DateIndex, Series

GENERATORS = ("ar1", "lagged-cause", "separable-weeks", "crash-path")

_POS_WORDS = ["gain", "rally", "strong", "bullish", "upbeat", "growth", "beat", "surge"]
_NEG_WORDS = ["loss", "selloff", "weak", "bearish", "downbeat", "miss", "drop", "slump"]

START_DATE = date(2020, 1, 6)  # a Monday


def trading_calendar(n_days: int, start: date = START_DATE) -> list[date]:
    """n_days consecutive weekdays (no holiday calendar)."""
    days: list[date] = []
    d = start
    while len(days) < n_days:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return days


def calendar_days(first: date, last: date) -> list[date]:
    out = []
    d = first
    while d <= last:
        out.append(d)
        d += timedelta(days=1)
    return out


def _bars_from_closes(days: list[date], closes: np.ndarray, rng: np.random.Generator) -> list[OhlcvBar]:
    bars = []
    prev_close = closes[0] * (1.0 + rng.normal(0, 0.002))
    for day, close in zip(days, closes):
        open_ = prev_close
        hi_pad = 1.0 + abs(rng.normal(0, 0.004))
        lo_pad = 1.0 - abs(rng.normal(0, 0.004))
        high = max(open_, close) * hi_pad
        low = min(open_, close) * lo_pad
        volume = int(rng.integers(100_000, 1_000_000))
        bars.append(OhlcvBar(day, float(open_), float(high), float(low), float(close), volume))
        prev_close = close
    return bars


def _counts_for_target(target_bullishness: float, total: int) -> tuple[int, int]:
    """Integer (m_pos, m_neg) whose realized log count ratio approximates the target."""
    share = 1.0 / (1.0 + math.exp(-target_bullishness))
    m_pos = round(share * (total + 2) - 1)
    m_pos = min(max(m_pos, 0), total)
    return m_pos, total - m_pos


def _tweets_for_counts(
    day: date, m_pos: int, m_neg: int, rng: np.random.Generator, counter: list[int]
) -> list[TweetRecord]:
    """Labeled tweets realizing the daily counts; a serial token keeps texts
    unique so duplicate dropping cannot change the counts."""
    tweets = []
    for label, pool, n in (("pos", _POS_WORDS, m_pos), ("neg", _NEG_WORDS, m_neg)):
        for _ in range(n):
            words = list(rng.choice(pool, size=rng.integers(2, 5), replace=True))
            counter[0] += 1
            text = " ".join(words) + f" m{counter[0]:07d}"
            tweets.append(TweetRecord(f"t{counter[0]:07d}", day, text, label))
    return tweets


def _spread_counts_over_calendar(
    trading_days: list[date],
    daily_bull: np.ndarray,
    totals: np.ndarray,
    rng: np.random.Generator,
) -> list[TweetRecord]:
    """Tweets on every calendar day; weekend tweets carry the bullishness of
    the trading day they will align onto."""
    counter = [0]
    tweets: list[TweetRecord] = []
    trade_pos = {d: i for i, d in enumerate(trading_days)}
    for day in calendar_days(trading_days[0], trading_days[-1]):
        if day in trade_pos:
            i = trade_pos[day]
            total = int(totals[i])
        else:
            nxt = day
            while nxt not in trade_pos:
                nxt += timedelta(days=1)
            i = trade_pos[nxt]
            total = max(4, int(totals[i] // 6))  # light weekend chatter
        m_pos, m_neg = _counts_for_target(float(daily_bull[i]), total)
        tweets.extend(_tweets_for_counts(day, m_pos, m_neg, rng, counter))
    return tweets


def generate(generator: str, seed: int, size: int) -> tuple[list[TweetRecord], list[OhlcvBar]]:
    """Build one synthetic corpus (tweets + market bars) of ``size`` trading days."""
    if generator not in GENERATORS:
        raise DataError(f"unknown generator {generator!r}; choices: {', '.join(GENERATORS)}")
    if size < 30:
        raise DataError(f"size must be at least 30 trading days, got {size}")
    rng = np.random.default_rng(seed)
    days = trading_calendar(size)
    if generator == "ar1":
        return _gen_ar1(days, rng)
    if generator == "lagged-cause":
        return _gen_lagged_cause(days, rng)
    if generator == "separable-weeks":
        return _gen_separable_weeks(days, rng)
    return _gen_crash_path(days, rng)


def _gen_ar1(days: list[date], rng: np.random.Generator) -> tuple[list[TweetRecord], list[OhlcvBar]]:
    n = len(days)
    rets = np.empty(n)
    rets[0] = rng.normal(0, 1.0)
    for t in range(1, n):
        rets[t] = 0.7 * rets[t - 1] + rng.normal(0, 1.0)
    closes = 100.0 * np.exp(np.cumsum(rets) / 100.0)
    bars = _bars_from_closes(days, closes, rng)

    latent = np.empty(n)
    latent[0] = rng.normal(0, 0.4)
    for t in range(1, n):
        latent[t] = 0.5 * latent[t - 1] + rng.normal(0, 0.4)
    totals = 30 + rng.poisson(20, size=n)
    tweets = _spread_counts_over_calendar(days, latent, totals, rng)
    return tweets, bars


def _gen_lagged_cause(days: list[date], rng: np.random.Generator) -> tuple[list[TweetRecord], list[OhlcvBar]]:
    n = len(days)
    latent = np.empty(n)
    latent[0] = rng.normal(0, 0.5)
    for t in range(1, n):
        latent[t] = 0.5 * latent[t - 1] + rng.normal(0, 0.5)
    latent = np.clip(latent, -1.5, 1.5)
    totals = 50 + rng.poisson(20, size=n)
    realized = np.array(
        [bullishness(*_counts_for_target(float(b), int(T))) for b, T in zip(latent, totals)]
    )
    rets = np.empty(n)
    rets[0] = rng.normal(0, 0.5)
    rets[1:] = 3.0 * realized[:-1] + rng.normal(0, 0.5, size=n - 1)
    closes = 100.0 * np.exp(np.cumsum(rets) / 100.0)
    bars = _bars_from_closes(days, closes, rng)
    tweets = _spread_counts_over_calendar(days, latent, totals, rng)
    return tweets, bars


def _gen_separable_weeks(days: list[date], rng: np.random.Generator) -> tuple[list[TweetRecord], list[OhlcvBar]]:
    n = len(days)
    n_weeks = n // 5 + 1
    mood = np.empty(n_weeks)
    mood[0] = 1.0
    for w in range(1, n_weeks):
        # flip often enough that any split sees both classes
        mood[w] = -mood[w - 1] if rng.random() < 0.45 or w % 4 == 0 else mood[w - 1]
    daily_bull = np.array([0.9 * mood[t // 5] + rng.normal(0, 0.05) for t in range(n)])
    rets = np.empty(n)
    for t in range(n):
        week = t // 5
        prior = mood[week - 1] if week > 0 else mood[0]
        rets[t] = prior * (0.35 + abs(rng.normal(0, 0.1)))  # same-sign week return
    closes = 100.0 * np.exp(np.cumsum(rets) / 100.0)
    bars = _bars_from_closes(days, closes, rng)
    totals = 40 + rng.poisson(15, size=n)
    tweets = _spread_counts_over_calendar(days, daily_bull, totals, rng)
    return tweets, bars


def _gen_crash_path(days: list[date], rng: np.random.Generator) -> tuple[list[TweetRecord], list[OhlcvBar]]:
    n = len(days)
    calm = int(n * 0.4)
    rets = np.empty(n)
    rets[:calm] = rng.normal(0.05, 0.3, size=calm)
    crash_total = -30.0  # percent log-return over the tail
    rets[calm:] = crash_total / (n - calm) + rng.normal(0, 0.4, size=n - calm)
    closes = 100.0 * np.exp(np.cumsum(rets) / 100.0)
    bars = _bars_from_closes(days, closes, rng)

    latent = np.where(np.arange(n) < calm, 0.4, -0.8) + rng.normal(0, 0.2, size=n)
    totals = 40 + rng.poisson(15, size=n)
    tweets = _spread_counts_over_calendar(days, latent, totals, rng)
    return tweets, bars


# ---------------------------------------------------------------------------
# in-memory oracle datasets (not file generators)


def monthly_signal_frame(
    seed: int,
    n_days: int = 1050,
    signal_scale: float = 0.8,
    daily_noise: float = 2.0,
    return_coef: float = 2.0,
    return_noise: float = 5.0,
):
    """A feature frame whose feature-return relation lives at the monthly window.

    A fresh signal level is drawn per 21-trading-day block; daily bullishness
    is the block level plus heavy daily noise, and returns follow the block
    level plus independent noise.  Sub-monthly windows are attenuated by the
    daily noise; windows beyond a month mix independent block levels, so the
    R-squared of the feature regression peaks at the monthly window.
    """
    from .io import Frame
    from .sentiment import features

    rng = np.random.default_rng(seed)
    days = trading_calendar(n_days)
    n_blocks = n_days // 21 + 1
    block_level = rng.normal(0, signal_scale, size=n_blocks)
    level = np.array([block_level[t // 21] for t in range(n_days)])
    bull_target = np.clip(level + rng.normal(0, daily_noise, size=n_days), -3.5, 3.5)
    totals = 50 + rng.poisson(20, size=n_days)
    counts = []
    for day, b, total in zip(days, bull_target, totals):
        m_pos, m_neg = _counts_for_target(float(b), int(total))
        counts.append(DailySentiment(day, m_pos, m_neg))
    rets = return_coef * level + rng.normal(0, return_noise, size=n_days)
    index = DateIndex.from_dates(days)

    feats = features(counts)
    cols = [
        Series("positive", index, [float(c.m_pos) for c in counts]),
        Series("negative", index, [float(c.m_neg) for c in counts]),
        Series.from_pairs("bullishness", index, [f.bullishness for f in feats]),
        Series.from_pairs("agreement", index, [f.agreement for f in feats]),
        Series.from_pairs("msg_volume", index, [f.message_volume for f in feats]),
        Series("return", index, rets),
    ]
    return Frame.from_series(cols)
