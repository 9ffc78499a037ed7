"""Weekly market-direction classification: linear soft-margin SVM on the
prior week's sentiment features, with confusion matrix, ROC curve and AUC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from typing import Sequence

import numpy as np

from .errors import DataError, DegenerateDataError
from .timeseries import Series, aggregate

UP = 1
DOWN = 0

WEEKLY_FEATURES = ("positive", "negative", "bullishness", "agreement", "msg_volume")


@dataclass(frozen=True)
class LabeledWeek:
    """One training/test row: prior-week feature vector and this week's direction."""

    week_end: date
    features: tuple[float, ...]
    label: int  # UP / DOWN


@dataclass(frozen=True)
class SvmModel:
    weights: np.ndarray  # on standardized features
    bias: float
    c: float
    feature_means: np.ndarray
    feature_stds: np.ndarray
    n_support: int
    objective: float  # solver objective (negated dual), mirrors packaged-SVM reports
    dual_objective_history: tuple[float, ...]  # per sweep; non-decreasing

    def decision_value(self, features: Sequence[float]) -> float:
        x = np.asarray(features, dtype=float)
        if x.shape != self.feature_means.shape:
            raise DataError(
                f"feature vector of length {x.shape[0]} does not match model ({self.feature_means.shape[0]})"
            )
        z = (x - self.feature_means) / self.feature_stds
        return float(self.weights @ z + self.bias)


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]  # (false positive rate, true positive rate)
    auc: float


def train_svm(
    data: Sequence[LabeledWeek],
    c: float = 1.0,
    max_sweeps: int = 2000,
    tol: float = 1e-6,
) -> SvmModel:
    """Train a linear soft-margin SVM by deterministic dual coordinate ascent.

    Features are standardized with training-set statistics.  The bias is
    learned through an appended constant column, examples are visited in a
    fixed order each sweep, and the solver stops when the dual objective
    changes by less than ``tol`` between sweeps.
    """
    if c <= 0:
        raise DataError(f"train_svm: C must be positive, got {c}")
    if not data:
        raise DegenerateDataError("train_svm: empty training set")
    x = np.array([row.features for row in data], dtype=float)
    labels = np.array([row.label for row in data], dtype=int)
    for i, row in enumerate(data):
        if not np.isfinite(x[i]).all():
            raise DataError(f"train_svm: non-finite feature in row {i} (week ending {row.week_end})")
    n_up = int((labels == UP).sum())
    n_down = len(labels) - n_up
    if n_up < 2 or n_down < 2:
        raise DegenerateDataError(
            f"train_svm: need at least 2 examples per class, got up={n_up}, down={n_down}"
        )

    means = x.mean(axis=0)
    stds = x.std(axis=0)
    stds = np.where(stds > 0, stds, 1.0)  # constant features carry no signal after centering
    z = (x - means) / stds
    z = np.hstack([z, np.ones((len(z), 1))])  # bias column
    signs = np.where(labels == UP, 1.0, -1.0)

    n, _ = z.shape
    q_diag = (z**2).sum(axis=1)
    alpha = np.zeros(n)
    w = np.zeros(z.shape[1])
    history: list[float] = []
    prev_obj = -math.inf
    for _ in range(max_sweeps):
        for i in range(n):
            gradient = signs[i] * (w @ z[i]) - 1.0
            new_alpha = min(max(alpha[i] - gradient / q_diag[i], 0.0), c)
            delta = new_alpha - alpha[i]
            if delta != 0.0:
                alpha[i] = new_alpha
                w += delta * signs[i] * z[i]
        dual = float(alpha.sum() - 0.5 * (w @ w))
        history.append(dual)
        if dual - prev_obj < tol:
            break
        prev_obj = dual

    return SvmModel(
        weights=w[:-1].copy(),
        bias=float(w[-1]),
        c=c,
        feature_means=means,
        feature_stds=stds,
        n_support=int((alpha > 1e-12).sum()),
        objective=-history[-1],
        dual_objective_history=tuple(history),
    )


def predict(model: SvmModel, features: Sequence[float]) -> tuple[int, float]:
    """(label, margin) for one feature vector; a zero margin maps to up."""
    value = model.decision_value(features)
    return (UP if value >= 0.0 else DOWN), value


def confusion_and_roc(
    model: SvmModel, test: Sequence[LabeledWeek]
) -> tuple[np.ndarray, float, RocCurve]:
    """Confusion matrix (percent of test count, rows=actual down/up,
    cols=predicted down/up), accuracy percent, and the ROC curve with AUC."""
    if not test:
        raise DataError("confusion_and_roc: empty test set")
    labels = np.array([row.label for row in test], dtype=int)
    if labels.min() == labels.max():
        raise DegenerateDataError("confusion_and_roc: test set has a single class; ROC undefined")
    margins = np.array([model.decision_value(row.features) for row in test])
    if not np.isfinite(margins).all():
        raise DataError("confusion_and_roc: non-finite decision value")

    predicted = np.where(margins >= 0.0, UP, DOWN)
    confusion = np.zeros((2, 2))
    for actual, pred in zip(labels, predicted):
        confusion[actual, pred] += 1
    accuracy = float(np.trace(confusion) / len(test) * 100.0)
    confusion = confusion / len(test) * 100.0

    return confusion, accuracy, roc_curve(margins, labels)


def roc_curve(margins: np.ndarray, labels: np.ndarray) -> RocCurve:
    """ROC by sweeping the decision threshold over the distinct margins
    (descending); tied margins move as one block, and AUC is the trapezoid
    area, which matches the rank-statistic definition with ties at half
    credit."""
    n_pos = int((labels == UP).sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateDataError("roc_curve: need both classes")
    order = np.argsort(-margins, kind="stable")
    sorted_margins = margins[order]
    sorted_labels = labels[order]
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    n = len(labels)
    while i < n:
        j = i
        while j < n and sorted_margins[j] == sorted_margins[i]:
            j += 1
        tp += int((sorted_labels[i:j] == UP).sum())
        fp += (j - i) - int((sorted_labels[i:j] == UP).sum())
        points.append((fp / n_neg, tp / n_pos))
        i = j
    auc = 0.0
    for (fx, fy), (sx, sy) in zip(points, points[1:]):
        auc += (sx - fx) * (fy + sy) / 2.0
    return RocCurve(tuple(points), auc)


def build_labeled_weeks(
    feature_series: dict[str, Series],
    closes: Series,
    week: int = 5,
) -> list[LabeledWeek]:
    """Assemble weekly classification rows from daily series.

    The five sentiment features are averaged per week; each row pairs the
    PRIOR week's feature vector with the current week's direction (weekly
    close at or above the previous weekly close = up).  Weeks with any
    missing feature are skipped.
    """
    missing = [name for name in WEEKLY_FEATURES if name not in feature_series]
    if missing:
        raise DataError(f"build_labeled_weeks: missing feature series: {', '.join(missing)}")
    weekly = {name: aggregate(feature_series[name], week, "mean") for name in WEEKLY_FEATURES}
    weekly_close = aggregate(closes, week, "last")
    n = len(weekly_close)
    rows: list[LabeledWeek] = []
    for t in range(1, n):
        if not weekly_close.mask[t] or not weekly_close.mask[t - 1]:
            continue
        if not all(weekly[name].mask[t - 1] for name in WEEKLY_FEATURES):
            continue
        vector = tuple(float(weekly[name].values[t - 1]) for name in WEEKLY_FEATURES)
        label = UP if weekly_close.values[t] >= weekly_close.values[t - 1] else DOWN
        rows.append(LabeledWeek(weekly_close.index.dates[t], vector, label))
    return rows
