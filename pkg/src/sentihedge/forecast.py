"""Expert time-series forecasting: ARIMA (conditional sum of squares) with
optional exogenous predictors, simple/Holt exponential smoothing, automatic
model selection, and rolling one-step evaluation over a train/test split.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.signal import lfilter

from .errors import DataError, DegenerateDataError, FitError
from .stats import LjungBoxResult, ljung_box
from .timeseries import Series

#: Two candidate fits whose selection R-squared differs by less than this are
#: treated as tied and resolved by parsimony (paper-style R-squared is only
#: reported to two decimals; within-noise gaps must not reward extra terms).
R2_TIE_TOL = 0.02

_COEF_BOUND = 3.0  # AR/MA coefficients are box-bounded during optimization
_BIG_OBJECTIVE = 1e12


@dataclass(frozen=True)
class ArimaOrder:
    """Non-seasonal (p, d, q); seasonal (P, D, Q) is stored but not estimated."""

    p: int
    d: int
    q: int
    seasonal: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self) -> None:
        if min(self.p, self.d, self.q) < 0 or min(self.seasonal) < 0:
            raise DataError(f"negative ARIMA order: {self}")
        if self.p > 5 or self.q > 5:
            raise DataError(f"AR/MA order capped at 5: {self}")
        if self.d > 2:
            raise DataError(f"differencing order capped at 2: {self}")

    def __str__(self) -> str:
        base = f"({self.p},{self.d},{self.q})"
        if any(self.seasonal):
            base += f"({self.seasonal[0]},{self.seasonal[1]},{self.seasonal[2]})"
        return base


@dataclass(frozen=True)
class ForecastModel:
    """A fitted forecasting model (ARIMA family or exponential smoothing)."""

    kind: str  # "arima" | "ses" | "holt"
    order: ArimaOrder | None
    ar: np.ndarray
    ma: np.ndarray
    exog_coef: np.ndarray
    exog_names: tuple[str, ...]
    exog_tstats: np.ndarray
    mean: float  # innovation-process mean in the differenced space
    sigma2: float
    smoothing: dict[str, float]
    observed: np.ndarray
    fitted: np.ndarray  # level space; NaN where undefined
    residuals: np.ndarray  # observed - fitted, exactly
    r2: float  # squared Pearson r of fitted vs observed (reporting definition)
    mape: float
    maxape: float
    css: float
    css_at_init: float
    n_params: int

    @property
    def n_arma_params(self) -> int:
        return len(self.ar) + len(self.ma)


@dataclass(frozen=True)
class EvaluationReport:
    """One-step-ahead performance of a frozen model over the test span."""

    r2: float
    mape: float
    maxape: float
    direction_accuracy: float  # percent
    ljung_box: LjungBoxResult | None
    forecasts: np.ndarray
    ucl: np.ndarray
    lcl: np.ndarray
    observed_test: np.ndarray
    model: ForecastModel
    n_train: int
    n_test: int


# ---------------------------------------------------------------------------
# helpers


def _as_array(y: Series | np.ndarray | Sequence[float], what: str) -> np.ndarray:
    if isinstance(y, Series):
        if not y.mask.all():
            raise DataError(f"{what}: series {y.name!r} has missing values; trim or fill before fitting")
        return y.values.astype(float)
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise DataError(f"{what}: expected a 1-d series")
    if np.isnan(arr).any():
        raise DataError(f"{what}: input contains missing values")
    return arr


def _exog_matrix(
    exog, n: int, names: Sequence[str] | None = None
) -> tuple[np.ndarray | None, tuple[str, ...]]:
    """Normalize predictors (None, an (n, m) array, or a list of Series/1-d
    arrays) to a column matrix plus unique column names."""
    if exog is None or (hasattr(exog, "__len__") and len(exog) == 0):
        return None, ()
    if isinstance(exog, np.ndarray):
        mat = exog.reshape(len(exog), -1).astype(float)
        out_names = tuple(names) if names else tuple(f"x{i}" for i in range(mat.shape[1]))
    else:
        cols = []
        out = []
        for i, item in enumerate(exog):
            if isinstance(item, Series):
                cols.append(_as_array(item, "exog"))
                out.append(item.name)
            else:
                cols.append(np.asarray(item, dtype=float))
                out.append(f"x{i}")
        mat = np.column_stack(cols)
        out_names = tuple(names) if names else tuple(out)
    if mat.shape[0] != n:
        raise DataError(f"exogenous length {mat.shape[0]} does not match target length {n}")
    if np.isnan(mat).any():
        raise DataError("exogenous predictors contain missing values")
    if len(out_names) != mat.shape[1] or len(set(out_names)) != len(out_names):
        raise DataError("exogenous predictor names must be unique and match the column count")
    return mat, out_names


def _pearson_r2(a: np.ndarray, b: np.ndarray) -> float:
    ok = ~(np.isnan(a) | np.isnan(b))
    x, y = a[ok], b[ok]
    if len(x) < 3:
        return 0.0
    xd, yd = x - x.mean(), y - y.mean()
    den = math.sqrt(float((xd**2).sum()) * float((yd**2).sum()))
    if den == 0.0:
        return 0.0
    r = float((xd * yd).sum()) / den
    return min(1.0, r * r)


def _ape_stats(observed: np.ndarray, fitted: np.ndarray) -> tuple[float, float]:
    """(MAPE, MaxAPE) in percent over rows where both are defined; NaN if any observed is 0."""
    ok = ~(np.isnan(observed) | np.isnan(fitted))
    obs, fit = observed[ok], fitted[ok]
    if len(obs) == 0:
        return float("nan"), float("nan")
    if (obs == 0.0).any():
        return float("nan"), float("nan")
    ape = np.abs((obs - fit) / obs) * 100.0
    return float(ape.mean()), float(ape.max())


def selection_r2(model: ForecastModel) -> float:
    """1 - RSS/TSS over the model's fitted span (the model-selection metric)."""
    ok = ~np.isnan(model.residuals)
    resid = model.residuals[ok]
    obs = model.observed[ok]
    rss = float((resid**2).sum())
    tss = float(((obs - obs.mean()) ** 2).sum())
    if tss == 0.0:
        return 1.0  # constant target fitted exactly: zero-TSS convention
    return 1.0 - rss / tss


def bic(model: ForecastModel) -> float:
    ok = ~np.isnan(model.residuals)
    n = int(ok.sum())
    rss = float((model.residuals[ok] ** 2).sum())
    return n * math.log(max(rss, 1e-300) / n) + model.n_params * math.log(n)


# ---------------------------------------------------------------------------
# ARIMA by conditional sum of squares


def _css_errors(w: np.ndarray, x_mat: np.ndarray | None, params: np.ndarray, p: int, q: int) -> np.ndarray:
    """One-step innovations with pre-sample errors set to zero."""
    m = 0 if x_mat is None else x_mat.shape[1]
    mu = params[0]
    beta = params[1 : 1 + m]
    ar = params[1 + m : 1 + m + p]
    ma = params[1 + m + p :]
    u = w - mu
    if x_mat is not None:
        u = u - x_mat @ beta
    if p == 0 and q == 0:
        return u
    b_poly = np.concatenate(([1.0], -ar))
    a_poly = np.concatenate(([1.0], ma))
    return lfilter(b_poly, a_poly, u)


def fit_arima(
    y: Series | np.ndarray | Sequence[float],
    order: ArimaOrder,
    exog: Sequence[Series] | np.ndarray | None = None,
    exog_names: Sequence[str] | None = None,
    max_iterations: int = 500,
) -> ForecastModel:
    """Fit ARIMA(p,d,q) with optional exogenous regressors by minimizing the
    conditional sum of squared innovations (pre-sample errors zero).

    The differenced target is modeled as mean + exog effects + ARMA noise;
    exogenous columns are differenced alongside the target.  Optimization is
    deterministic: all coefficients start at 0 and the mean at the sample
    mean of the differenced target.
    """
    yv = _as_array(y, "fit_arima")
    x_mat, exog_names = _exog_matrix(exog, len(yv), exog_names)
    if any(order.seasonal):
        warnings.warn(f"seasonal orders {order.seasonal} are stored but not estimated", stacklevel=2)
    p, d, q = order.p, order.d, order.q
    w = np.diff(yv, d) if d > 0 else yv.copy()
    xd = None
    if x_mat is not None:
        xd = np.diff(x_mat, d, axis=0) if d > 0 else x_mat
    m = 0 if xd is None else xd.shape[1]
    if len(w) < 10 + p + q + m:
        raise DataError(
            f"fit_arima{order}: {len(w)} observations after differencing; need at least {10 + p + q + m}"
        )
    if np.ptp(w) == 0.0:
        raise DegenerateDataError(f"fit_arima{order}: target has degenerate variance after differencing")

    n_params = 1 + m + p + q
    x0 = np.zeros(n_params)
    x0[0] = w.mean()

    def objective(params: np.ndarray) -> float:
        e = _css_errors(w, xd, params, p, q)
        sse = float(e @ e)
        return sse if math.isfinite(sse) else _BIG_OBJECTIVE

    css_at_init = objective(x0)
    if p + q + m == 0:
        res_x, css_final, converged = x0, css_at_init, True
    else:
        bounds = [(None, None)] * (1 + m) + [(-_COEF_BOUND, _COEF_BOUND)] * (p + q)
        res = minimize(
            objective,
            x0,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": max_iterations},
        )
        res_x, css_final = res.x, float(res.fun)
        converged = res.status != 1  # status 1 = iteration limit
        if not converged:
            raise FitError(
                f"fit_arima{order}: optimizer hit the iteration cap; best objective {css_final:.6g}"
            )
        if css_final > css_at_init:  # L-BFGS-B never accepts an ascent step; guard anyway
            res_x, css_final = x0, css_at_init

    mu = float(res_x[0])
    beta = res_x[1 : 1 + m].copy()
    ar = res_x[1 + m : 1 + m + p].copy()
    ma = res_x[1 + m + p :].copy()

    if p > 0:
        roots = np.roots(np.concatenate((-ar[::-1], [1.0])))
        if len(roots) and np.abs(roots).min() < 1.0 + 1e-6:
            warnings.warn(
                f"fit_arima{order}: AR polynomial root inside/on the unit circle; "
                "estimates are non-stationary but usable",
                stacklevel=2,
            )

    e = _css_errors(w, xd, res_x, p, q)
    n = len(yv)
    residuals = np.full(n, np.nan)
    residuals[d:] = e  # one-step error is identical in level and differenced space
    fitted = yv - residuals
    dof = len(w) - n_params
    sigma2 = css_final / dof if dof > 0 else css_final / len(w)

    tstats = np.full(m, np.nan)
    if m > 0:
        tstats = _exog_tstats(w, xd, res_x, p, q, css_final)

    mape, maxape = _ape_stats(yv, fitted)
    return ForecastModel(
        kind="arima",
        order=order,
        ar=ar,
        ma=ma,
        exog_coef=beta,
        exog_names=exog_names,
        exog_tstats=tstats,
        mean=mu,
        sigma2=float(sigma2),
        smoothing={},
        observed=yv,
        fitted=fitted,
        residuals=residuals,
        r2=_pearson_r2(fitted, yv),
        mape=mape,
        maxape=maxape,
        css=css_final,
        css_at_init=css_at_init,
        n_params=n_params,
    )


def _exog_tstats(w, xd, params, p, q, sse) -> np.ndarray:
    """Gauss-Newton t statistics for the exogenous coefficients."""
    m = xd.shape[1]
    k = len(params)
    n = len(w)
    jac = np.empty((n, k))
    base = _css_errors(w, xd, params, p, q)
    for j in range(k):
        step = 1e-6 * max(1.0, abs(params[j]))
        bumped = params.copy()
        bumped[j] += step
        jac[:, j] = (_css_errors(w, xd, bumped, p, q) - base) / step
    dof = max(n - k, 1)
    sigma2 = sse / dof
    try:
        cov = sigma2 * np.linalg.pinv(jac.T @ jac)
    except np.linalg.LinAlgError:
        return np.full(m, np.nan)
    se = np.sqrt(np.maximum(np.diag(cov)[1 : 1 + m], 0.0))
    beta = params[1 : 1 + m]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(se > 0, beta / se, np.inf * np.sign(beta))


# ---------------------------------------------------------------------------
# exponential smoothing


def _ses_level(y: np.ndarray, lam: float) -> np.ndarray:
    """Smoothed level l_t with l_0 = y_0."""
    zi = np.array([(1.0 - lam) * y[0]])
    level, _ = lfilter([lam], [1.0, -(1.0 - lam)], y, zi=zi)
    return level


def fit_ses(y: Series | np.ndarray | Sequence[float]) -> ForecastModel:
    """Simple (level-only) exponential smoothing; the smoothing weight is
    chosen by deterministic bounded minimization of one-step squared error."""
    yv = _as_array(y, "fit_ses")
    if len(yv) < 5:
        raise DataError("fit_ses: need at least 5 observations")

    def sse(lam: float) -> float:
        level = _ses_level(yv, lam)
        err = yv[1:] - level[:-1]
        return float(err @ err)

    res = minimize_scalar(sse, bounds=(1e-4, 1.0 - 1e-4), method="bounded")
    lam = float(res.x)
    level = _ses_level(yv, lam)
    fitted = np.full(len(yv), np.nan)
    fitted[1:] = level[:-1]
    residuals = yv - fitted
    return _es_model("ses", {"level_weight": lam}, yv, fitted, residuals, n_params=2)


def fit_holt(y: Series | np.ndarray | Sequence[float]) -> ForecastModel:
    """Holt (level + trend) exponential smoothing, deterministic fit."""
    yv = _as_array(y, "fit_holt")
    if len(yv) < 6:
        raise DataError("fit_holt: need at least 6 observations")

    def run(lam: float, gam: float) -> tuple[np.ndarray, np.ndarray]:
        n = len(yv)
        level = np.empty(n)
        trend = np.empty(n)
        level[0] = yv[0]
        trend[0] = yv[1] - yv[0]
        for t in range(1, n):
            level[t] = lam * yv[t] + (1.0 - lam) * (level[t - 1] + trend[t - 1])
            trend[t] = gam * (level[t] - level[t - 1]) + (1.0 - gam) * trend[t - 1]
        return level, trend

    def sse(params: np.ndarray) -> float:
        level, trend = run(params[0], params[1])
        err = yv[1:] - (level[:-1] + trend[:-1])
        val = float(err @ err)
        return val if math.isfinite(val) else _BIG_OBJECTIVE

    res = minimize(
        sse,
        np.array([0.3, 0.1]),
        method="L-BFGS-B",
        bounds=[(1e-4, 1.0 - 1e-4)] * 2,
    )
    lam, gam = float(res.x[0]), float(res.x[1])
    level, trend = run(lam, gam)
    fitted = np.full(len(yv), np.nan)
    fitted[1:] = level[:-1] + trend[:-1]
    residuals = yv - fitted
    return _es_model(
        "holt", {"level_weight": lam, "trend_weight": gam}, yv, fitted, residuals, n_params=4
    )


def _es_model(kind, smoothing, observed, fitted, residuals, n_params) -> ForecastModel:
    ok = ~np.isnan(residuals)
    sse = float((residuals[ok] ** 2).sum())
    dof = max(int(ok.sum()) - n_params, 1)
    mape, maxape = _ape_stats(observed, fitted)
    return ForecastModel(
        kind=kind,
        order=None,
        ar=np.zeros(0),
        ma=np.zeros(0),
        exog_coef=np.zeros(0),
        exog_names=(),
        exog_tstats=np.zeros(0),
        mean=float("nan"),
        sigma2=sse / dof,
        smoothing=smoothing,
        observed=observed,
        fitted=fitted,
        residuals=residuals,
        r2=_pearson_r2(fitted, observed),
        mape=mape,
        maxape=maxape,
        css=sse,
        css_at_init=sse,
        n_params=n_params,
    )


# ---------------------------------------------------------------------------
# one-step forecasting


def forecast_one_step(
    model: ForecastModel,
    history: Series | np.ndarray | Sequence[float],
    exog_history: np.ndarray | None = None,
    exog_next: np.ndarray | Sequence[float] | None = None,
) -> tuple[float, float, float]:
    """One-step-ahead conditional mean with symmetric 95% bounds.

    For exogenous models, ``exog_history`` must align with ``history`` and
    ``exog_next`` supplies the next step's raw predictor values.
    """
    hist = _as_array(history, "forecast_one_step")
    half_width = 1.96 * math.sqrt(max(model.sigma2, 0.0))

    if model.kind == "ses":
        level = _ses_level(hist, model.smoothing["level_weight"])
        point = float(level[-1])
        return point, point + half_width, point - half_width
    if model.kind == "holt":
        lam = model.smoothing["level_weight"]
        gam = model.smoothing["trend_weight"]
        level, trend = hist[0], hist[1] - hist[0] if len(hist) > 1 else 0.0
        for t in range(1, len(hist)):
            new_level = lam * hist[t] + (1.0 - lam) * (level + trend)
            trend = gam * (new_level - level) + (1.0 - gam) * trend
            level = new_level
        point = float(level + trend)
        return point, point + half_width, point - half_width

    order = model.order
    assert order is not None
    p, d, q = order.p, order.d, order.q
    if len(hist) < max(p, q) + d + 1:
        raise DataError(f"forecast_one_step: history of {len(hist)} too short for {order}")
    m = len(model.exog_coef)
    if m > 0:
        if exog_history is None or exog_next is None:
            raise DataError("forecast_one_step: model has exogenous predictors; history and next values required")
        x_hist = np.asarray(exog_history, dtype=float)
        x_next = np.asarray(exog_next, dtype=float).reshape(-1)
        if x_hist.shape != (len(hist), m) or x_next.shape != (m,):
            raise DataError("forecast_one_step: exogenous shapes do not match the model")
        if np.isnan(x_hist).any() or np.isnan(x_next).any():
            raise DataError("forecast_one_step: missing exogenous value")
        full_x = np.vstack([x_hist, x_next])
        xd_full = np.diff(full_x, d, axis=0) if d > 0 else full_x
        xd_hist, xd_next = xd_full[:-1], xd_full[-1]
    else:
        xd_hist = xd_next = None

    w = np.diff(hist, d) if d > 0 else hist
    params = np.concatenate(([model.mean], model.exog_coef, model.ar, model.ma))
    e = _css_errors(w, xd_hist, params, p, q)
    u = w - model.mean
    if xd_hist is not None:
        u = u - xd_hist @ model.exog_coef

    w_next = model.mean
    if xd_next is not None:
        w_next += float(xd_next @ model.exog_coef)
    for i in range(1, p + 1):
        w_next += model.ar[i - 1] * (u[-i] if i <= len(u) else 0.0)
    for j in range(1, q + 1):
        w_next += model.ma[j - 1] * (e[-j] if j <= len(e) else 0.0)

    point = w_next
    cur = hist
    tails = []
    for _ in range(d):
        tails.append(cur[-1])
        cur = np.diff(cur)
    for tail in tails:  # integrate the differenced forecast back to levels
        point += tail
    point = float(point)
    return point, point + half_width, point - half_width


# ---------------------------------------------------------------------------
# expert selection


def default_candidate_orders() -> list[ArimaOrder]:
    """The selection grid: p, d, q in {0,1,2}, excluding the null (0,0,0)."""
    return [
        ArimaOrder(p, d, q)
        for p, d, q in itertools.product(range(3), range(3), range(3))
        if (p, d, q) != (0, 0, 0)
    ]


def expert_select(
    y: Series | np.ndarray | Sequence[float],
    candidate_orders: Sequence[ArimaOrder] | None = None,
    exog: Sequence[Series] | np.ndarray | None = None,
    exog_names: Sequence[str] | None = None,
    include_es: bool = True,
    prune_tstat: float = 1.0,
) -> ForecastModel:
    """Fit the candidate family and pick the best training fit.

    Selection maximizes 1 - RSS/TSS; candidates within ``R2_TIE_TOL`` of the
    best are tied and resolved by fewer parameters, then lower BIC, then
    candidate order.  When exogenous predictors are supplied, predictors of
    the winning model with |t| below ``prune_tstat`` are pruned and the
    model refitted.
    """
    yv = _as_array(y, "expert_select")
    x_mat, exog_names = _exog_matrix(exog, len(yv), exog_names)
    orders = list(candidate_orders) if candidate_orders is not None else default_candidate_orders()

    fits: list[tuple[ForecastModel, float, float]] = []  # model, selection r2, bic
    failures: list[str] = []
    for order in orders:
        try:
            model = fit_arima(yv, order, exog=x_mat, exog_names=exog_names or None)
        except (DataError, DegenerateDataError, FitError) as exc:
            failures.append(str(exc))
            continue
        fits.append((model, selection_r2(model), bic(model)))
    if include_es:
        for fitter in (fit_ses, fit_holt):
            try:
                model = fitter(yv)
            except (DataError, DegenerateDataError, FitError) as exc:
                failures.append(str(exc))
                continue
            fits.append((model, selection_r2(model), bic(model)))

    if not fits:
        raise FitError("expert_select: every candidate failed: " + "; ".join(failures))

    best_r2 = max(f[1] for f in fits)
    tied = [(i, f) for i, f in enumerate(fits) if f[1] >= best_r2 - R2_TIE_TOL]
    tied.sort(key=lambda item: (item[1][0].n_params, item[1][2], item[0]))
    winner = tied[0][1][0]

    if winner.kind == "arima" and len(winner.exog_coef) > 0:
        keep = [i for i, t in enumerate(winner.exog_tstats) if abs(t) >= prune_tstat]
        if len(keep) < len(winner.exog_coef):
            kept_names = tuple(exog_names[i] for i in keep)
            pruned_x = x_mat[:, keep] if keep else None
            winner = fit_arima(yv, winner.order, exog=pruned_x, exog_names=kept_names or None)
    return winner


# ---------------------------------------------------------------------------
# rolling evaluation


def evaluate(
    y: Series | np.ndarray | Sequence[float],
    exog: Sequence[Series] | np.ndarray | None = None,
    train_frac: float = 0.75,
    candidate_orders: Sequence[ArimaOrder] | None = None,
    include_es: bool = True,
    lb_lags: int = 18,
) -> EvaluationReport:
    """Train on the leading ``train_frac`` of the sample, freeze the selected
    model, and roll one-step-ahead forecasts over the test span (the history
    window slides; parameters are never refitted)."""
    yv = _as_array(y, "evaluate")
    x_mat, x_names = _exog_matrix(exog, len(yv))
    return _evaluate_arrays(yv, x_mat, x_names, train_frac, candidate_orders, include_es, lb_lags)


def _evaluate_arrays(yv, x_mat, x_names, train_frac, candidate_orders, include_es, lb_lags) -> EvaluationReport:
    n = len(yv)
    split = int(math.floor(n * train_frac))
    n_test = n - split
    if n_test < 10:
        raise DataError(f"evaluate: split leaves {n_test} test points; need at least 10")
    if (yv[split:] == 0.0).any():
        raise DataError(
            "evaluate: test span contains zero values so MAPE is undefined; "
            "forecast levels (e.g. prices) rather than returns, or shift the target"
        )

    model = expert_select(
        yv[:split],
        candidate_orders=candidate_orders,
        exog=x_mat[:split] if x_mat is not None else None,
        exog_names=x_names or None,
        include_es=include_es,
    )

    points = np.empty(n_test)
    ucl = np.empty(n_test)
    lcl = np.empty(n_test)
    uses_exog = model.kind == "arima" and len(model.exog_coef) > 0
    x_used = None
    if uses_exog:
        # the winner may have pruned predictors; map the survivors back by name
        kept_cols = [x_names.index(name) for name in model.exog_names]
        x_used = x_mat[:, kept_cols]
    for step, t in enumerate(range(split, n)):
        if uses_exog:
            points[step], ucl[step], lcl[step] = forecast_one_step(
                model, yv[:t], exog_history=x_used[:t], exog_next=x_used[t]
            )
        else:
            points[step], ucl[step], lcl[step] = forecast_one_step(model, yv[:t])

    observed_test = yv[split:]
    mape, maxape = _ape_stats(observed_test, points)
    prev = yv[split - 1 : n - 1]
    correct = ((points - prev) * (observed_test - prev)) > 0.0  # ties count as wrong
    direction = float(correct.mean() * 100.0)

    lb: LjungBoxResult | None = None
    resid = model.residuals[~np.isnan(model.residuals)]
    m_params = model.n_arma_params
    if len(resid) > lb_lags + 1 and lb_lags - m_params > 0 and np.ptp(resid) > 0:
        lb = ljung_box(resid, lb_lags, m_params)

    return EvaluationReport(
        r2=_pearson_r2(points, observed_test),
        mape=mape,
        maxape=maxape,
        direction_accuracy=direction,
        ljung_box=lb,
        forecasts=points,
        ucl=ucl,
        lcl=lcl,
        observed_test=observed_test,
        model=model,
        n_train=split,
        n_test=n_test,
    )


def compare_with_without(
    y: Series | np.ndarray | Sequence[float],
    exog: Sequence[Series] | np.ndarray,
    train_frac: float = 0.75,
    candidate_orders: Sequence[ArimaOrder] | None = None,
    include_es: bool = True,
    lb_lags: int = 18,
) -> tuple[EvaluationReport, EvaluationReport]:
    """Evaluate twice on the identical train/test rows: with the exogenous
    predictors and without them."""
    yv = _as_array(y, "compare_with_without")
    x_mat, x_names = _exog_matrix(exog, len(yv))
    if x_mat is None:
        raise DataError("compare_with_without: no exogenous predictors supplied")
    with_report = _evaluate_arrays(yv, x_mat, x_names, train_frac, candidate_orders, include_es, lb_lags)
    without_report = _evaluate_arrays(yv, None, (), train_frac, candidate_orders, include_es, lb_lags)
    return with_report, without_report
