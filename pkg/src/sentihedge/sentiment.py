"""Tweet polarity classification and daily tweet-board features.

Features per day: positive/negative counts, bullishness (log count ratio),
agreement (consensus in [0,1]), message volume (log total), and the
carried (previous-day) variant of each.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError, DegenerateDataError

POSITIVE = "pos"
NEGATIVE = "neg"

# Fixed English stop-word list; kept small and bundled so tokenization is
# reproducible without external downloads.
STOPWORDS = frozenset(
    """a about above after again all am an and any are as at be because been
    before being below between both but by can did do does doing down during
    each few for from further had has have having he her here hers herself him
    himself his how i if in into is it its itself just me more most my myself
    no nor not now of off on once only or other our ours ourselves out over
    own same she should so some such than that the their theirs them
    themselves then there these they this those through to too under until up
    very was we were what when where which while who whom why will with you
    your yours yourself yourselves""".split()
)

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop 1-char tokens and stop words."""
    return [
        tok
        for tok in _TOKEN_SPLIT.split(text.lower())
        if len(tok) > 1 and tok not in STOPWORDS
    ]


@dataclass(frozen=True)
class TweetRecord:
    id: str
    date: date
    text: str
    label: str | None = None  # POSITIVE / NEGATIVE / None

    def __post_init__(self) -> None:
        if self.label is not None and self.label not in (POSITIVE, NEGATIVE):
            raise DataError(f"tweet {self.id}: label must be {POSITIVE!r} or {NEGATIVE!r}, got {self.label!r}")


@dataclass(frozen=True)
class DailySentiment:
    date: date
    m_pos: int
    m_neg: int

    def __post_init__(self) -> None:
        if self.m_pos < 0 or self.m_neg < 0:
            raise DataError(f"{self.date}: negative message count")


@dataclass(frozen=True)
class SentimentFeatures:
    """Per-day tweet-board features; carried_* are the previous day's values."""

    date: date
    bullishness: float
    agreement: float | None  # undefined on silent days
    message_volume: float
    carried_pos: float | None
    carried_neg: float | None
    carried_bullishness: float | None
    carried_agreement: float | None
    carried_msg_volume: float | None


@dataclass(frozen=True)
class NaiveBayesModel:
    """Multinomial Naive Bayes over unigrams with Laplace smoothing."""

    vocabulary: Mapping[str, int]
    log_prob_pos: np.ndarray  # per-token log P(token | positive)
    log_prob_neg: np.ndarray
    log_prior_pos: float
    log_prior_neg: float
    log_unseen_pos: float  # smoothing-only mass for out-of-vocabulary tokens
    log_unseen_neg: float
    smoothing: float


def train_nb(corpus: Sequence[TweetRecord], smoothing: float = 1.0) -> NaiveBayesModel:
    """Train the polarity classifier on labeled tweets.

    Tokens are Laplace-smoothed with ``smoothing`` (alpha); smoothed
    per-class probabilities over the vocabulary sum to 1 exactly.
    """
    if smoothing <= 0:
        raise DataError(f"smoothing must be positive, got {smoothing}")
    docs = [(tokenize(t.text), t.label) for t in corpus if t.label is not None]
    n_pos = sum(1 for _, lab in docs if lab == POSITIVE)
    n_neg = len(docs) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateDataError("degenerate training set: need at least one document of each class")

    vocab_tokens = sorted({tok for toks, _ in docs for tok in toks})
    vocabulary = {tok: i for i, tok in enumerate(vocab_tokens)}
    v = len(vocabulary)
    counts = {POSITIVE: np.zeros(v), NEGATIVE: np.zeros(v)}
    for toks, lab in docs:
        c = counts[lab]
        for tok in toks:
            c[vocabulary[tok]] += 1

    def log_probs(c: np.ndarray) -> tuple[np.ndarray, float]:
        denom = c.sum() + smoothing * v
        if denom == 0:  # empty vocabulary: every token is out-of-vocabulary
            return np.zeros(0), 0.0
        return np.log((c + smoothing) / denom), math.log(smoothing / denom)

    lp_pos, unseen_pos = log_probs(counts[POSITIVE])
    lp_neg, unseen_neg = log_probs(counts[NEGATIVE])
    return NaiveBayesModel(
        vocabulary=vocabulary,
        log_prob_pos=lp_pos,
        log_prob_neg=lp_neg,
        log_prior_pos=math.log(n_pos / len(docs)),
        log_prior_neg=math.log(n_neg / len(docs)),
        log_unseen_pos=unseen_pos,
        log_unseen_neg=unseen_neg,
        smoothing=smoothing,
    )


def classify_nb(model: NaiveBayesModel, text: str) -> tuple[str, float]:
    """Classify text; returns (label, log-odds of positive over negative).

    Out-of-vocabulary tokens contribute only their smoothing mass.  A zero
    log-odds tie goes to positive.
    """
    log_odds = model.log_prior_pos - model.log_prior_neg
    for tok in tokenize(text):
        idx = model.vocabulary.get(tok)
        if idx is None:
            log_odds += model.log_unseen_pos - model.log_unseen_neg
        else:
            log_odds += model.log_prob_pos[idx] - model.log_prob_neg[idx]
    return (POSITIVE if log_odds >= 0 else NEGATIVE), log_odds


def daily_counts(
    tweets: Iterable[TweetRecord],
    model: NaiveBayesModel | None = None,
    alignment: Mapping[date, date] | None = None,
    drop_duplicate_text: bool = True,
) -> list[DailySentiment]:
    """Count positive/negative tweets per (aligned) day.

    Unlabeled tweets are classified with ``model``; tweets whose date is
    absent from ``alignment`` (dropped by the policy) are skipped.  Exact
    duplicate texts within one calendar day are counted once.
    """
    counts: dict[date, list[int]] = {}
    seen: set[tuple[date, str]] = set()
    for tw in tweets:
        if drop_duplicate_text:
            key = (tw.date, tw.text)
            if key in seen:
                continue
            seen.add(key)
        if alignment is not None:
            day = alignment.get(tw.date)
            if day is None:
                continue
        else:
            day = tw.date
        label = tw.label
        if label is None:
            if model is None:
                raise DataError(f"tweet {tw.id} on {tw.date} is unlabeled and no classifier was supplied")
            label, _ = classify_nb(model, tw.text)
        slot = counts.setdefault(day, [0, 0])
        slot[0 if label == POSITIVE else 1] += 1
    return [DailySentiment(d, c[0], c[1]) for d, c in sorted(counts.items())]


def bullishness(m_pos: int, m_neg: int) -> float:
    """Log-ratio of (1 + positive) to (1 + negative) message counts."""
    return math.log((1.0 + m_pos) / (1.0 + m_neg))


def agreement(m_pos: int, m_neg: int) -> float | None:
    """Consensus in [0,1]: 1 when one-sided, 0 when evenly split, missing on silent days."""
    total = m_pos + m_neg
    if total == 0:
        return None
    ratio = (m_pos - m_neg) / total
    return 1.0 - math.sqrt(max(0.0, 1.0 - ratio * ratio))


def message_volume(m_pos: int, m_neg: int) -> float:
    """log(1 + total count); silent days map to 0."""
    return math.log1p(m_pos + m_neg)


def features(daily: Sequence[DailySentiment]) -> list[SentimentFeatures]:
    """Compute the per-day feature set with carried (lag-1) variants."""
    for a, b in zip(daily, daily[1:]):
        if a.date >= b.date:
            raise DataError(f"daily sentiment dates not strictly increasing at {b.date}")
    out: list[SentimentFeatures] = []
    prev: DailySentiment | None = None
    for day in daily:
        if prev is None:
            carried = (None, None, None, None, None)
        else:
            carried = (
                float(prev.m_pos),
                float(prev.m_neg),
                bullishness(prev.m_pos, prev.m_neg),
                agreement(prev.m_pos, prev.m_neg),
                message_volume(prev.m_pos, prev.m_neg),
            )
        out.append(
            SentimentFeatures(
                date=day.date,
                bullishness=bullishness(day.m_pos, day.m_neg),
                agreement=agreement(day.m_pos, day.m_neg),
                message_volume=message_volume(day.m_pos, day.m_neg),
                carried_pos=carried[0],
                carried_neg=carried[1],
                carried_bullishness=carried[2],
                carried_agreement=carried[3],
                carried_msg_volume=carried[4],
            )
        )
        prev = day
    return out
