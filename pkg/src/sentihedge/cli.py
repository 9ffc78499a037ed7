"""Command-line front end.

Every subcommand is deterministic given its inputs, flags and seed; errors
are emitted as one JSON record per line on stderr with a nonzero exit code.
Options may also come from a key=value config file (section-prefixed, e.g.
``granger.max-lag = 5``); explicit flags win over the file.
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from datetime import datetime
from pathlib import Path

import click
import numpy as np

from . import classify as classify_mod
from . import forecast as forecast_mod
from . import hedge as hedge_mod
from . import pipeline, synth
from .errors import DataError, DegenerateDataError, FitError
from .io import Frame, format_number, read_market_csv, write_market_csv, write_tweets_csv
from .market import gk_volatility
from .stats import correlation_matrix, granger
from .timeseries import NAMED_WINDOWS, Series, aggregate

PIPELINE_ERRORS = (DataError, DegenerateDataError, FitError, OSError)


def fail(exc: Exception) -> None:
    record = {"error": type(exc).__name__, "detail": str(exc)}
    click.echo(json.dumps(record), err=True)
    sys.exit(1)


def pipeline_command(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except PIPELINE_ERRORS as exc:
            fail(exc)

    return wrapper


def read_config_file(path: str) -> dict:
    """Section-prefixed key=value lines -> click default map."""
    defaults: dict[str, dict[str, str]] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line or "." not in line.split("=", 1)[0]:
            raise DataError(f"{path}, line {line_no}: expected 'command.option = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        command, option = key.split(".", 1)
        defaults.setdefault(command, {})[option.replace("-", "_")] = value
    return defaults


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="key=value config file; flags win over file values.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Tweet-sentiment market analytics and hedging backtests."""
    if config_path:
        try:
            ctx.default_map = read_config_file(config_path)
        except PIPELINE_ERRORS as exc:
            fail(exc)


def _parse_day(raw: str, what: str):
    try:
        return datetime.strptime(raw, "%Y-%m-%d").date()
    except ValueError:
        raise DataError(f"bad {what} {raw!r} (expected YYYY-MM-DD)") from None


def _write_rows(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------


@main.command(name="synth")
@click.option("--generator", required=True, help=f"one of: {', '.join(synth.GENERATORS)}")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--size", type=int, default=250, show_default=True, help="trading days")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@pipeline_command
def synth_cmd(generator: str, seed: int, size: int, out_dir: str) -> None:
    """Generate a synthetic tweet + market corpus."""
    tweets, bars = synth.generate(generator, seed, size)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_tweets_csv(out / "tweets.csv", tweets)
    write_market_csv(out / "market.csv", bars)
    click.echo(f"wrote {len(tweets)} tweets and {len(bars)} bars to {out}")


@main.command()
@click.option("--tweets", "tweet_csv", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--market", "market_csv", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--policy", type=click.Choice(["next-trading-day", "drop"]), default="next-trading-day",
              show_default=True, help="weekend/holiday tweet alignment")
@pipeline_command
def ingest(tweet_csv: str, market_csv: str, out_dir: str, policy: str) -> None:
    """Validate and align raw CSVs into the canonical bundle."""
    dataset = pipeline.ingest(tweet_csv, market_csv, out_dir, policy=policy)
    click.echo(
        f"ingested {len(dataset.bars)} bars, {len(dataset.counts)} tweet days "
        f"({dataset.dropped_tweets} tweet dates dropped) into {out_dir}"
    )


@main.command()
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), required=True)
@pipeline_command
def features(data_dir: str) -> None:
    """Recompute feature frames from a canonical bundle."""
    frame = pipeline.rebuild_features(data_dir)
    click.echo(f"rebuilt feature frames over {len(frame.index)} trading days in {data_dir}")


@main.command()
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--window", type=click.Choice(list(NAMED_WINDOWS)), default="monthly", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--long-out", type=click.Path(dir_okay=False), default=None,
              help="also write a heatmap-ready (row,col,value) CSV")
@pipeline_command
def correlate(data_dir: str, window: str, out: str, long_out: str | None) -> None:
    """Correlation matrix of market features against tweet features."""
    frame = pipeline.load_features(data_dir)
    feats = pipeline.windowed_features(frame, window)
    market_rows = {name: feats[name] for name in pipeline.MARKET_COLUMNS}
    tweet_cols = {name: feats[name] for name in pipeline.SENTIMENT_COLUMNS + pipeline.CARRIED_COLUMNS}
    matrix = correlation_matrix(market_rows, tweet_cols)
    header = ["feature", *matrix.col_labels]
    rows = []
    for i, row_name in enumerate(matrix.row_labels):
        cells = [format_number(c.r) for c in matrix.cells[i]]
        rows.append([row_name, *cells])
    _write_rows(Path(out), header, rows)
    if long_out:
        long_rows = [
            [row_name, col_name, format_number(matrix.cells[i][j].r)]
            for i, row_name in enumerate(matrix.row_labels)
            for j, col_name in enumerate(matrix.col_labels)
        ]
        _write_rows(Path(long_out), ["row", "col", "value"], long_rows)
    click.echo(f"wrote {len(matrix.row_labels)}x{len(matrix.col_labels)} correlation matrix to {out}")


@main.command(name="granger")
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--target", default="return", show_default=True)
@click.option("--max-lag", type=int, default=7, show_default=True)
@click.option("--window", type=click.Choice(list(NAMED_WINDOWS)), default="weekly", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--long-out", type=click.Path(dir_okay=False), default=None)
@pipeline_command
def granger_cmd(data_dir: str, target: str, max_lag: int, window: str, out: str, long_out: str | None) -> None:
    """Per-lag Granger p-values of each tweet feature on the target."""
    frame = pipeline.load_features(data_dir)
    feats = pipeline.windowed_features(frame, window)
    if target not in feats:
        raise DataError(f"unknown target {target!r}; available: {', '.join(sorted(feats))}")
    target_series = feats[target]
    feature_names = [n for n in pipeline.SENTIMENT_COLUMNS + pipeline.CARRIED_COLUMNS]
    table: dict[str, list] = {}
    for name in feature_names:
        table[name] = granger(target_series, feats[name], max_lag)
    header = ["lag", *feature_names]
    rows = []
    pretty = [f"{'lag':>4} " + " ".join(f"{n:>22}" for n in feature_names)]
    for lag_i in range(1, max_lag + 1):
        row = [str(lag_i)]
        shown = []
        for name in feature_names:
            res = table[name][lag_i - 1]
            row.append(format_number(res.p_value))
            shown.append(
                f"{format_number(res.p_value) + res.stars:>22}" if res.p_value is not None else f"{'-':>22}"
            )
        rows.append(row)
        pretty.append(f"{lag_i:>4} " + " ".join(shown))
    _write_rows(Path(out), header, rows)
    if long_out:
        long_rows = [
            [name, str(res.lag), format_number(res.p_value)]
            for name in feature_names
            for res in table[name]
        ]
        _write_rows(Path(long_out), ["feature", "lag", "p_value"], long_rows)
    click.echo("\n".join(pretty))
    click.echo(f"(** p<0.05, * p<0.10) written to {out}")


@main.command(name="forecast")
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--target", default="close", show_default=True)
@click.option("--predictors", default=",".join(pipeline.CARRIED_COLUMNS), show_default=True,
              help="comma-separated feature columns; empty string = none")
@click.option("--window", type=click.Choice(list(NAMED_WINDOWS)), default="weekly", show_default=True)
@click.option("--train-frac", type=float, default=0.75, show_default=True)
@click.option("--orders", default=None, help="explicit candidates 'p,d,q[;p,d,q...]' (default: grid)")
@click.option("--seasonal", default=None, help="seasonal P,D,Q (accepted, not estimated)")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@pipeline_command
def forecast_cmd(
    data_dir: str,
    target: str,
    predictors: str,
    window: str,
    train_frac: float,
    orders: str | None,
    seasonal: str | None,
    out_dir: str,
) -> None:
    """Expert-select a model and report one-step test accuracy with and
    without tweet predictors."""
    if seasonal:
        click.echo(f"warning: seasonal orders ({seasonal}) are accepted but not estimated", err=True)
    frame = pipeline.load_features(data_dir)
    feats = pipeline.windowed_features(frame, window)
    if target not in feats:
        raise DataError(f"unknown target {target!r}; available: {', '.join(sorted(feats))}")
    predictor_names = [p.strip() for p in predictors.split(",") if p.strip()]
    for p in predictor_names:
        if p not in feats:
            raise DataError(f"unknown predictor {p!r}; available: {', '.join(sorted(feats))}")
    candidate_orders = _parse_orders(orders, seasonal)

    y = feats[target]
    exogs = [feats[p] for p in predictor_names]
    mask = y.mask.copy()
    for s in exogs:
        mask &= s.mask
    start = int(np.argmax(mask))  # trim leading incomplete rows
    if not mask[start:].all():
        raise DataError("forecast: interior missing values in the selected columns")
    yv = y.values[start:]
    dates = y.index.dates[start:]
    x_mat = np.column_stack([s.values[start:] for s in exogs]) if exogs else None

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if x_mat is not None:
        with_report, without_report = forecast_mod.compare_with_without(
            yv, x_mat, train_frac=train_frac, candidate_orders=candidate_orders
        )
        reports = [("with_predictors", with_report), ("without_predictors", without_report)]
    else:
        reports = [("without_predictors", forecast_mod.evaluate(yv, None, train_frac, candidate_orders))]

    summary_rows = []
    for label, report in reports:
        lb = report.ljung_box
        summary_rows.append(
            [
                label,
                str(report.model.order) if report.model.order else report.model.kind,
                format_number(report.r2),
                format_number(report.mape),
                format_number(report.maxape),
                format_number(report.direction_accuracy),
                format_number(lb.q) if lb else "",
                str(lb.dof) if lb else "",
                format_number(lb.p_value) if lb else "",
            ]
        )
        plot_rows = []
        n_train = report.n_train
        for i in range(report.n_test):
            plot_rows.append(
                [
                    dates[n_train + i].isoformat(),
                    format_number(float(report.observed_test[i])),
                    format_number(float(report.forecasts[i])),
                    format_number(float(report.ucl[i])),
                    format_number(float(report.lcl[i])),
                ]
            )
        _write_rows(out / f"forecast_{label}.csv", ["date", "observed", "fit", "ucl", "lcl"], plot_rows)
    _write_rows(
        out / "forecast_report.csv",
        ["variant", "model", "r2", "mape", "maxape", "direction_accuracy", "ljung_box_q", "ljung_box_dof", "ljung_box_p"],
        summary_rows,
    )
    for row in summary_rows:
        click.echo(
            f"{row[0]}: model {row[1]} R2={row[2]} MAPE={row[3]} MaxAPE={row[4]} direction={row[5]}%"
        )


def _parse_orders(orders: str | None, seasonal: str | None):
    if orders is None:
        return None
    seasonal_tuple = (0, 0, 0)
    if seasonal:
        parts = [int(x) for x in seasonal.split(",")]
        if len(parts) != 3:
            raise DataError(f"bad seasonal spec {seasonal!r}; expected P,D,Q")
        seasonal_tuple = tuple(parts)  # type: ignore[assignment]
    out = []
    for chunk in orders.split(";"):
        parts = [int(x) for x in chunk.split(",")]
        if len(parts) != 3:
            raise DataError(f"bad order spec {chunk!r}; expected p,d,q")
        out.append(forecast_mod.ArimaOrder(parts[0], parts[1], parts[2], seasonal_tuple))
    return out


@main.command(name="classify")
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--train-through", required=True, help="last week-end date (YYYY-MM-DD) in the training split")
@click.option("--c", "-C", "cost", type=float, default=1.0, show_default=True, help="soft-margin C")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@pipeline_command
def classify_cmd(data_dir: str, train_through: str, cost: float, out_dir: str) -> None:
    """Weekly direction SVM: train/test split by date, confusion matrix, ROC, AUC."""
    split_day = _parse_day(train_through, "--train-through")
    frame = pipeline.load_features(data_dir)
    feature_series = {name: frame.column(name) for name in pipeline.SENTIMENT_COLUMNS}
    rows = classify_mod.build_labeled_weeks(feature_series, frame.column("close"))
    train = [r for r in rows if r.week_end <= split_day]
    test = [r for r in rows if r.week_end > split_day]
    if not train or not test:
        raise DataError(
            f"split at {split_day} leaves {len(train)} training and {len(test)} test weeks"
        )
    model = classify_mod.train_svm(train, c=cost)
    confusion, accuracy, roc = classify_mod.confusion_and_roc(model, test)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_rows(
        out / "confusion.csv",
        ["actual\\predicted", "down", "up"],
        [
            ["down", format_number(confusion[0, 0]), format_number(confusion[0, 1])],
            ["up", format_number(confusion[1, 0]), format_number(confusion[1, 1])],
        ],
    )
    _write_rows(
        out / "roc.csv",
        ["false_positive_rate", "true_positive_rate"],
        [[format_number(fpr), format_number(tpr)] for fpr, tpr in roc.points],
    )
    _write_rows(
        out / "classifier_metrics.csv",
        ["accuracy_pct", "auc", "n_train", "n_test", "support_vectors", "objective"],
        [[
            format_number(accuracy),
            format_number(roc.auc),
            str(len(train)),
            str(len(test)),
            str(model.n_support),
            format_number(model.objective),
        ]],
    )
    predictions_rows = []
    for row in rows:
        label, margin = classify_mod.predict(model, row.features)
        predictions_rows.append(
            [row.week_end.isoformat(), "up" if label == classify_mod.UP else "down", format_number(margin)]
        )
    _write_rows(out / "predictions.csv", ["date", "prediction", "margin"], predictions_rows)
    click.echo(f"accuracy {accuracy:.2f}% AUC {roc.auc:.3f} over {len(test)} test weeks; outputs in {out}")


@main.command(name="backtest")
@click.option("--index-csv", type=click.Path(exists=True, dir_okay=False), required=True,
              help="daily OHLCV market CSV for the hedged index")
@click.option("--predictions-csv", type=click.Path(exists=True, dir_okay=False), default=None,
              help="date,prediction rows; mutually exclusive with --from-classifier")
@click.option("--from-classifier", type=click.Path(exists=True, dir_okay=False), default=None,
              help="predictions.csv emitted by the classify subcommand")
@click.option("--start", default=None, help="first week-end date to trade (YYYY-MM-DD)")
@click.option("--shares", type=int, default=1000, show_default=True)
@click.option("--block", type=int, default=500, show_default=True)
@click.option("--rate", type=float, default=0.0, show_default=True)
@click.option("--expiry-weeks", type=int, default=8, show_default=True)
@click.option("--vol", type=float, default=None, help="annualized volatility (default: from the bars)")
@click.option("--haircut", type=float, default=0.0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@pipeline_command
def backtest_cmd(
    index_csv: str,
    predictions_csv: str | None,
    from_classifier: str | None,
    start: str | None,
    shares: int,
    block: int,
    rate: float,
    expiry_weeks: int,
    vol: float | None,
    haircut: float,
    out_dir: str,
) -> None:
    """Married-put backtest driven by weekly direction predictions."""
    if (predictions_csv is None) == (from_classifier is None):
        raise DataError("supply exactly one of --predictions-csv or --from-classifier")
    bars = read_market_csv(index_csv)
    if vol is None:
        gk = gk_volatility(bars, window=len(bars))
        daily_sigma = float(gk.values[-1]) if gk.mask[-1] else 0.0
        vol = daily_sigma * np.sqrt(252.0)
    closes = Series("close", _index_from_bars(bars), [b.close for b in bars])
    weekly_close = aggregate(closes, "weekly", "last")

    source = predictions_csv or from_classifier
    prediction_map = _read_predictions(Path(source))
    first = _parse_day(start, "--start") if start else None
    weeks = []
    for i, day in enumerate(weekly_close.index.dates):
        if first is not None and day < first:
            continue
        if day in prediction_map:
            weeks.append((day, float(weekly_close.values[i]), prediction_map[day]))
    if len(weeks) < 2:
        raise DataError("backtest: fewer than two weeks have both an index level and a prediction")
    from .timeseries import DateIndex

    index_series = Series("close", DateIndex.from_dates([w[0] for w in weeks]), [w[1] for w in weeks])
    predictions = [w[2] for w in weeks]
    config = hedge_mod.BacktestConfig(
        shares=shares,
        block=block,
        vol=float(vol),
        rate=rate,
        expiry_weeks=expiry_weeks,
        haircut=haircut,
    )
    ledger = hedge_mod.run_backtest(index_series, predictions, config)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for row in ledger.rows:
        rows.append(
            [
                str(row.week),
                row.date.isoformat() if row.date else "",
                row.prediction,
                row.hedge_mode,
                format_number(row.spot),
                format_number(row.equity),
                format_number(row.cash),
                format_number(row.put_book_value),
                format_number(row.share_pnl),
                format_number(row.option_value_change),
                format_number(row.transition_cash),
                row.note,
            ]
        )
    _write_rows(
        out / "ledger.csv",
        ["week", "date", "prediction", "hedge_mode", "spot", "equity", "cash",
         "put_book_value", "share_pnl", "option_value_change", "transition_cash", "note"],
        rows,
    )
    plot_rows = [
        [row.date.isoformat() if row.date else str(row.week), format_number(row.spot),
         format_number(row.equity - ledger.initial_equity)]
        for row in ledger.rows
    ]
    _write_rows(out / "pnl.csv", ["date", "index_level", "pnl"], plot_rows)
    click.echo(
        f"backtest over {len(ledger.rows)} weeks: equity {ledger.initial_equity:,.2f} -> "
        f"{ledger.final_equity:,.2f} (premiums paid {ledger.total_premiums_paid:,.2f}); ledger in {out}"
    )


def _index_from_bars(bars):
    from .timeseries import DateIndex

    return DateIndex.from_dates([b.date for b in bars])


def _read_predictions(path: Path) -> dict:
    out = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "date" or "prediction" not in header:
            raise DataError(f"{path}: expected a header starting 'date,prediction'")
        pred_col = header.index("prediction")
        for line_no, row in enumerate(reader, start=2):
            day = datetime.strptime(row[0], "%Y-%m-%d").date()
            value = row[pred_col].strip().lower()
            if value not in ("up", "down"):
                raise DataError(f"{path}, line {line_no}: prediction must be 'up' or 'down', got {row[pred_col]!r}")
            out[day] = value
    return out


@main.command(name="sweep-windows")
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--windows", default=",".join(NAMED_WINDOWS), show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@pipeline_command
def sweep_windows_cmd(data_dir: str, windows: str, out: str) -> None:
    """R-squared of the tweet-feature regression across aggregation windows."""
    frame = pipeline.load_features(data_dir)
    names = [w.strip() for w in windows.split(",") if w.strip()]
    rows = pipeline.sweep_windows(frame, names)
    _write_rows(
        Path(out),
        ["window", "width", "r2", "n", "note"],
        [[r.window, str(r.width), format_number(r.r2), str(r.n), r.note] for r in rows],
    )
    for r in rows:
        click.echo(f"{r.window:>11}: R2={format_number(r.r2) or 'n/a':>9} n={r.n} {r.note}")


if __name__ == "__main__":
    main()
