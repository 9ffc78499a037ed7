"""Correlation, OLS, bivariate Granger causality, Ljung-Box, and the CDFs they need."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .errors import DataError, DegenerateDataError
from .timeseries import Series, pairwise_complete

MIN_PAIRS = 3


# ---------------------------------------------------------------------------
# distribution plumbing


def f_cdf(x: float, d1: int, d2: int) -> float:
    """CDF of the F distribution via the regularized incomplete beta function."""
    if d1 < 1 or d2 < 1:
        raise DataError(f"f_cdf: degrees of freedom must be >= 1, got ({d1}, {d2})")
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    z = d1 * x / (d1 * x + d2)
    return float(special.betainc(d1 / 2.0, d2 / 2.0, z))


def chi2_cdf(x: float, k: int) -> float:
    """CDF of the chi-square distribution via the regularized incomplete gamma function."""
    if k < 1:
        raise DataError(f"chi2_cdf: degrees of freedom must be >= 1, got {k}")
    if x <= 0:
        return 0.0
    return float(special.gammainc(k / 2.0, x / 2.0))


# ---------------------------------------------------------------------------
# correlation


@dataclass(frozen=True)
class PearsonResult:
    r: float | None
    n: int
    reason: str | None = None  # why r is missing, if it is


def pearson(x: Series, y: Series) -> PearsonResult:
    """Pearson product-moment correlation over pairwise-complete observations."""
    xv, yv = pairwise_complete(x, y)
    n = len(xv)
    if n < MIN_PAIRS:
        return PearsonResult(None, n, "insufficient-pairs")
    xd = xv - xv.mean()
    yd = yv - yv.mean()
    sx = float(np.sqrt((xd**2).sum()))
    sy = float(np.sqrt((yd**2).sum()))
    if sx == 0.0:
        return PearsonResult(None, n, "zero-variance-x")
    if sy == 0.0:
        return PearsonResult(None, n, "zero-variance-y")
    r = float((xd * yd).sum() / (sx * sy))
    return PearsonResult(max(-1.0, min(1.0, r)), n)


@dataclass(frozen=True)
class CorrelationMatrix:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: tuple[tuple[PearsonResult, ...], ...]  # rows x cols

    def get(self, row: str, col: str) -> PearsonResult:
        return self.cells[self.row_labels.index(row)][self.col_labels.index(col)]


def correlation_matrix(rows: dict[str, Series], cols: dict[str, Series]) -> CorrelationMatrix:
    """Pairwise-complete Pearson r for the full (row feature) x (col feature) grid."""
    cells = tuple(
        tuple(pearson(rs, cs) for cs in cols.values()) for rs in rows.values()
    )
    return CorrelationMatrix(tuple(rows), tuple(cols), cells)


# ---------------------------------------------------------------------------
# least squares


@dataclass(frozen=True)
class OlsFit:
    coef: np.ndarray  # intercept first when fitted with one
    residuals: np.ndarray
    fitted: np.ndarray
    r2: float
    adj_r2: float
    resid_var: float
    n: int
    k: int  # number of estimated coefficients
    rss: float
    intercept: bool


def _design(y: np.ndarray, x_cols: Sequence[np.ndarray], intercept: bool) -> np.ndarray:
    cols = []
    if intercept:
        cols.append(np.ones(len(y)))
    cols.extend(np.asarray(c, dtype=float) for c in x_cols)
    if not cols:
        raise DataError("ols: no regressors and no intercept")
    return np.column_stack(cols)


def _collinear_columns(design: np.ndarray, names: Sequence[str]) -> list[str]:
    """Columns that add nothing to the column space of their predecessors."""
    bad = []
    rank = 0
    for j in range(design.shape[1]):
        new_rank = np.linalg.matrix_rank(design[:, : j + 1])
        if new_rank == rank:
            bad.append(names[j])
        rank = new_rank
    return bad


def ols(
    y: Series | np.ndarray,
    regressors: Sequence[Series] | Sequence[np.ndarray],
    intercept: bool = True,
    names: Sequence[str] | None = None,
) -> OlsFit:
    """Ordinary least squares on complete-case rows.

    Requires a full-column-rank design; rank deficiency raises an error
    naming the collinear columns.  R-squared is 1 - RSS/TSS with centered
    TSS when an intercept is included.
    """
    if isinstance(y, Series):
        series_x = [r for r in regressors if isinstance(r, Series)]
        mask = y.mask.copy()
        for s in series_x:
            if s.index != y.index:
                raise DataError(f"ols: regressor {s.name!r} is on a different index")
            mask &= s.mask
        yv = y.values[mask]
        x_cols = [s.values[mask] for s in series_x]
        if names is None:
            names = [s.name for s in series_x]
    else:
        yv = np.asarray(y, dtype=float)
        x_cols = [np.asarray(r, dtype=float) for r in regressors]
        if names is None:
            names = [f"x{i}" for i in range(len(x_cols))]
    k = len(x_cols) + (1 if intercept else 0)
    if len(yv) < len(x_cols) + 2:
        raise DataError(f"ols: {len(yv)} complete rows for {len(x_cols)} regressors; need at least regressors + 2")
    design = _design(yv, x_cols, intercept)
    col_names = (["intercept"] if intercept else []) + list(names)
    if np.linalg.matrix_rank(design) < design.shape[1]:
        bad = _collinear_columns(design, col_names)
        raise DataError(f"ols: design matrix is rank deficient; collinear columns: {', '.join(bad)}")
    coef, _, _, _ = np.linalg.lstsq(design, yv, rcond=None)
    fitted = design @ coef
    resid = yv - fitted
    rss = float((resid**2).sum())
    tss = float(((yv - yv.mean()) ** 2).sum()) if intercept else float((yv**2).sum())
    if tss == 0.0:
        r2 = 1.0  # constant target fitted exactly by the intercept
    else:
        r2 = 1.0 - rss / tss
    n = len(yv)
    dof = n - k
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / dof if (intercept and dof > 0 and tss > 0) else r2
    resid_var = rss / dof if dof > 0 else float("nan")
    return OlsFit(coef, resid, fitted, r2, adj_r2, resid_var, n, k, rss, intercept)


# ---------------------------------------------------------------------------
# Granger causality


@dataclass(frozen=True)
class GrangerResult:
    lag: int
    rss_restricted: float | None
    rss_unrestricted: float | None
    f_stat: float | None
    p_value: float | None
    n: int
    reason: str | None = None

    @property
    def stars(self) -> str:
        """Table-style significance marker: ** at 0.05, * at 0.10 (formatting only)."""
        if self.p_value is None:
            return ""
        if self.p_value < 0.05:
            return "**"
        if self.p_value < 0.10:
            return "*"
        return ""


def _lag_matrix(v: np.ndarray, m: np.ndarray, n_lags: int) -> tuple[np.ndarray, np.ndarray]:
    """Columns of v lagged 1..n_lags with a combined presence mask per row."""
    n = len(v)
    cols = np.full((n, n_lags), np.nan)
    ok = np.zeros((n, n_lags), dtype=bool)
    for j in range(1, n_lags + 1):
        cols[j:, j - 1] = v[:-j]
        ok[j:, j - 1] = m[:-j]
    return cols, ok.all(axis=1)


def granger(target: Series, cause: Series, max_lag: int) -> list[GrangerResult]:
    """Bivariate Granger causality of ``cause`` on ``target`` for lags 1..max_lag.

    Per lag n the restricted model regresses the target on its own n lags;
    the unrestricted model adds n lags of the cause.  Both are fitted on
    the identical complete-case row set so the F test nesting is exact:
    F = ((RSS_r - RSS_u)/n) / (RSS_u/(T - 2n - 1)).
    """
    if max_lag < 1:
        raise DataError(f"granger: max_lag must be >= 1, got {max_lag}")
    if target.index != cause.index:
        raise DataError("granger: series are on different indexes")
    tv, tm = target.values, target.mask
    cv, cm = cause.values, cause.mask
    results: list[GrangerResult] = []
    for n_lag in range(1, max_lag + 1):
        own, own_ok = _lag_matrix(tv, tm, n_lag)
        oth, oth_ok = _lag_matrix(cv, cm, n_lag)
        rows = tm & own_ok & oth_ok
        t_rows = int(rows.sum())
        if t_rows < 2 * n_lag + 3:
            results.append(GrangerResult(n_lag, None, None, None, None, t_rows, "insufficient-rows"))
            continue
        yv = tv[rows]
        own_x = own[rows]
        oth_x = oth[rows]
        degenerate = None
        if any(np.ptp(own_x[:, j]) == 0.0 for j in range(n_lag)):
            degenerate = "zero-variance-target-lag"
        elif any(np.ptp(oth_x[:, j]) == 0.0 for j in range(n_lag)):
            degenerate = "zero-variance-cause-lag"
        if degenerate:
            results.append(GrangerResult(n_lag, None, None, None, None, t_rows, degenerate))
            continue
        ones = np.ones((t_rows, 1))
        d_r = np.hstack([ones, own_x])
        d_u = np.hstack([ones, own_x, oth_x])
        rss_r = _lstsq_rss(d_r, yv)
        rss_u = _lstsq_rss(d_u, yv)
        dof = t_rows - 2 * n_lag - 1
        if rss_u <= 0.0:
            results.append(GrangerResult(n_lag, rss_r, rss_u, float("inf"), 0.0, t_rows))
            continue
        f_stat = ((rss_r - rss_u) / n_lag) / (rss_u / dof)
        f_stat = max(f_stat, 0.0)  # guard tiny negative rounding
        p_value = 1.0 - f_cdf(f_stat, n_lag, dof)
        results.append(GrangerResult(n_lag, rss_r, rss_u, f_stat, p_value, t_rows))
    return results


def _lstsq_rss(design: np.ndarray, y: np.ndarray) -> float:
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return float((resid**2).sum())


# ---------------------------------------------------------------------------
# Ljung-Box


@dataclass(frozen=True)
class LjungBoxResult:
    q: float
    dof: int
    p_value: float


def ljung_box(residuals: Series | np.ndarray, lags: int, fitted_params: int = 0) -> LjungBoxResult:
    """Portmanteau test for residual autocorrelation up to ``lags``.

    Q = T(T+2) * sum_k acf_k^2 / (T-k); degrees of freedom are reduced by
    ``fitted_params`` (the number of ARMA parameters of the model that
    produced the residuals).
    """
    if isinstance(residuals, Series):
        x = residuals.values[residuals.mask]
    else:
        x = np.asarray(residuals, dtype=float)
        x = x[~np.isnan(x)]
    t = len(x)
    if lags < 1:
        raise DataError(f"ljung_box: lags must be >= 1, got {lags}")
    if fitted_params < 0:
        raise DataError("ljung_box: fitted_params must be >= 0")
    if t <= lags + 1:
        raise DataError(f"ljung_box: need more than lags + 1 = {lags + 1} residuals, got {t}")
    dof = lags - fitted_params
    if dof <= 0:
        raise DataError("over-parameterized diagnostic: lags must exceed fitted parameter count")
    xd = x - x.mean()
    denom = float((xd**2).sum())
    if denom == 0.0:
        raise DegenerateDataError("ljung_box: residuals have zero variance; autocorrelations undefined")
    q = 0.0
    for k in range(1, lags + 1):
        acf_k = float((xd[k:] * xd[:-k]).sum()) / denom
        q += acf_k**2 / (t - k)
    q *= t * (t + 2.0)
    return LjungBoxResult(q, dof, 1.0 - chi2_cdf(q, dof))
