"""CSV ingestion and emission.

Input schemas:
    tweets:  id,date,text,label      (label: pos | neg | empty)
    market:  date,open,high,low,close,volume

Canonical intermediate frames are one CSV per feature frame: a date column
followed by feature columns, decimals at 6 significant digits, empty cell
for missing.  Emitted files re-ingest losslessly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .market import OhlcvBar
from .sentiment import DailySentiment, TweetRecord
from .timeseries import DateIndex, Series

TWEET_COLUMNS = ["id", "date", "text", "label"]
MARKET_COLUMNS = ["date", "open", "high", "low", "close", "volume"]


def format_number(value: float | None) -> str:
    """Canonical cell format: 6 significant digits, empty for missing."""
    if value is None:
        return ""
    return f"{value:.6g}"


def _parse_date(raw: str, where: str) -> date:
    try:
        return datetime.strptime(raw.strip(), "%Y-%m-%d").date()
    except ValueError:
        raise DataError(f"{where}: bad date {raw!r} (expected YYYY-MM-DD)") from None


def _parse_float(raw: str, what: str, where: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise DataError(f"{where}: bad {what} {raw!r}") from None


def read_tweets_csv(path: str | Path) -> list[TweetRecord]:
    path = Path(path)
    tweets: list[TweetRecord] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != TWEET_COLUMNS:
            raise DataError(f"{path}, line 1: expected header {','.join(TWEET_COLUMNS)!r}")
        for line_no, row in enumerate(reader, start=2):
            where = f"{path}, line {line_no}"
            if len(row) != 4:
                raise DataError(f"{where}: expected 4 columns, got {len(row)}")
            tweet_id, raw_date, text, raw_label = row
            label = raw_label.strip() or None
            if label is not None and label not in ("pos", "neg"):
                raise DataError(f"{where}: label must be 'pos', 'neg' or empty, got {raw_label!r}")
            tweets.append(TweetRecord(tweet_id, _parse_date(raw_date, where), text, label))
    return tweets


def write_tweets_csv(path: str | Path, tweets: Iterable[TweetRecord]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TWEET_COLUMNS)
        for t in tweets:
            writer.writerow([t.id, t.date.isoformat(), t.text, t.label or ""])


def read_market_csv(path: str | Path) -> list[OhlcvBar]:
    path = Path(path)
    bars: list[OhlcvBar] = []
    prev: date | None = None
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != MARKET_COLUMNS:
            raise DataError(f"{path}, line 1: expected header {','.join(MARKET_COLUMNS)!r}")
        for line_no, row in enumerate(reader, start=2):
            where = f"{path}, line {line_no}"
            if len(row) != 6:
                raise DataError(f"{where}: expected 6 columns, got {len(row)}")
            day = _parse_date(row[0], where)
            if prev is not None and day <= prev:
                raise DataError(f"{where}: dates must be strictly increasing ({day} after {prev})")
            prev = day
            raw_volume = row[5].strip()
            try:
                volume = int(float(raw_volume))
            except ValueError:
                raise DataError(f"{where}: bad volume {raw_volume!r}") from None
            bars.append(
                OhlcvBar(  # OHLC invariants checked by the bar itself, naming the date
                    date=day,
                    open=_parse_float(row[1], "open", where),
                    high=_parse_float(row[2], "high", where),
                    low=_parse_float(row[3], "low", where),
                    close=_parse_float(row[4], "close", where),
                    volume=volume,
                )
            )
    return bars


def write_market_csv(path: str | Path, bars: Iterable[OhlcvBar]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MARKET_COLUMNS)
        for b in bars:
            writer.writerow(
                [
                    b.date.isoformat(),
                    format_number(b.open),
                    format_number(b.high),
                    format_number(b.low),
                    format_number(b.close),
                    str(b.volume),
                ]
            )


def write_daily_counts_csv(path: str | Path, counts: Iterable[DailySentiment]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "m_pos", "m_neg"])
        for c in counts:
            writer.writerow([c.date.isoformat(), str(c.m_pos), str(c.m_neg)])


def read_daily_counts_csv(path: str | Path) -> list[DailySentiment]:
    path = Path(path)
    out: list[DailySentiment] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["date", "m_pos", "m_neg"]:
            raise DataError(f"{path}, line 1: expected header 'date,m_pos,m_neg'")
        for line_no, row in enumerate(reader, start=2):
            where = f"{path}, line {line_no}"
            if len(row) != 3:
                raise DataError(f"{where}: expected 3 columns")
            out.append(
                DailySentiment(
                    _parse_date(row[0], where),
                    int(_parse_float(row[1], "m_pos", where)),
                    int(_parse_float(row[2], "m_neg", where)),
                )
            )
    return out


# ---------------------------------------------------------------------------
# feature frames


@dataclass(frozen=True)
class Frame:
    """Date-indexed feature columns sharing one index."""

    index: DateIndex
    columns: tuple[str, ...]
    series: dict[str, Series]

    def __post_init__(self) -> None:
        for name in self.columns:
            s = self.series[name]
            if s.index != self.index:
                raise DataError(f"frame column {name!r} is on a different index")

    @classmethod
    def from_series(cls, series: Sequence[Series]) -> "Frame":
        if not series:
            raise DataError("Frame.from_series: no columns")
        return cls(series[0].index, tuple(s.name for s in series), {s.name: s for s in series})

    def column(self, name: str) -> Series:
        if name not in self.series:
            raise DataError(f"frame has no column {name!r}; available: {', '.join(self.columns)}")
        return self.series[name]


def write_frame_csv(frame: Frame, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", *frame.columns])
        for i, day in enumerate(frame.index.dates):
            row = [day.isoformat()]
            for name in frame.columns:
                s = frame.series[name]
                row.append(format_number(float(s.values[i]) if s.mask[i] else None))
            writer.writerow(row)


def read_frame_csv(path: str | Path) -> Frame:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "date":
            raise DataError(f"{path}, line 1: expected a 'date' first column")
        columns = tuple(header[1:])
        dates: list[date] = []
        cells: list[list[float | None]] = []
        for line_no, row in enumerate(reader, start=2):
            where = f"{path}, line {line_no}"
            if len(row) != len(columns) + 1:
                raise DataError(f"{where}: expected {len(columns) + 1} columns, got {len(row)}")
            dates.append(_parse_date(row[0], where))
            cells.append(
                [None if cell == "" else _parse_float(cell, "value", where) for cell in row[1:]]
            )
    index = DateIndex.from_dates(dates)
    series = {
        name: Series.from_pairs(name, index, [cells[i][j] for i in range(len(dates))])
        for j, name in enumerate(columns)
    }
    return Frame(index, columns, series)
