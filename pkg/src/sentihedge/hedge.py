"""Married-put hedging backtest.

The portfolio holds a fixed share position plus protective puts and
switches between partially hedged (half the shares covered, bullish) and
fully hedged (all shares covered, bearish) on weekly direction calls.
Puts are priced with the standard lognormal closed form so the backtest is
self-contained; all trades clear at model value (optional haircut).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date
from typing import Sequence

import numpy as np
from scipy.stats import norm

from .errors import DataError
from .timeseries import Series

PARTIAL = "partial"
FULL = "full"


def put_value(strike: float, spot: float, time_to_expiry: float, vol: float, rate: float = 0.0) -> float:
    """European put value per share (lognormal closed form).

    At expiry (or with zero volatility and rate) this is the intrinsic
    value max(strike - spot, 0).
    """
    if vol < 0:
        raise DataError(f"put_value: negative volatility {vol}")
    if strike <= 0 or spot <= 0:
        raise DataError("put_value: strike and spot must be positive")
    if time_to_expiry < 0:
        raise DataError(f"put_value: negative time to expiry {time_to_expiry}")
    if rate < 0:
        raise DataError(f"put_value: negative rate {rate}")
    if time_to_expiry == 0.0:
        return max(strike - spot, 0.0)
    discounted_strike = strike * math.exp(-rate * time_to_expiry)
    if vol == 0.0:
        return max(discounted_strike - spot, 0.0)
    sig_sqrt_t = vol * math.sqrt(time_to_expiry)
    d1 = (math.log(spot / strike) + (rate + 0.5 * vol * vol) * time_to_expiry) / sig_sqrt_t
    d2 = d1 - sig_sqrt_t
    return float(discounted_strike * norm.cdf(-d2) - spot * norm.cdf(-d1))


@dataclass(frozen=True)
class PutPosition:
    strike: float
    shares: int  # shares covered by this block
    premium_per_share: float
    purchase_week: int
    expiry_week: int

    def __post_init__(self) -> None:
        if self.strike <= 0 or self.premium_per_share < 0 or self.shares <= 0:
            raise DataError(f"invalid put position: {self}")


@dataclass(frozen=True)
class PortfolioState:
    shares: int
    puts: tuple[PutPosition, ...]
    cash: float
    hedge_mode: str  # PARTIAL / FULL

    def covered_shares(self) -> int:
        return sum(p.shares for p in self.puts)

    def check_coverage(self) -> None:
        want = self.shares // 2 if self.hedge_mode == PARTIAL else self.shares
        got = self.covered_shares()
        if got != want:
            raise DataError(
                f"{self.hedge_mode} portfolio covers {got} shares, expected {want}"
            )


@dataclass(frozen=True)
class PricingContext:
    vol: float  # annualized
    rate: float = 0.0
    expiry_weeks: int = 8
    weeks_per_year: int = 52
    haircut: float = 0.0  # proportional trade friction; 0 = frictionless
    premium_override: float | None = None  # fixed per-share purchase premium

    def years(self, weeks: float) -> float:
        return max(weeks, 0.0) / self.weeks_per_year


@dataclass(frozen=True)
class BacktestConfig:
    shares: int = 1000
    block: int = 500
    vol: float = 0.2
    rate: float = 0.0
    expiry_weeks: int = 8
    haircut: float = 0.0
    initial_mode: str = PARTIAL
    premium_override: float | None = None

    def __post_init__(self) -> None:
        if self.shares <= 0 or self.block <= 0:
            raise DataError("shares and block size must be positive")
        if self.shares % 2 != 0 or (self.shares // 2) % self.block != 0:
            raise DataError(
                f"half of {self.shares} shares must be a whole number of {self.block}-share blocks"
            )
        if self.initial_mode not in (PARTIAL, FULL):
            raise DataError(f"initial_mode must be {PARTIAL!r} or {FULL!r}")

    def context(self) -> PricingContext:
        return PricingContext(
            vol=self.vol,
            rate=self.rate,
            expiry_weeks=self.expiry_weeks,
            haircut=self.haircut,
            premium_override=self.premium_override,
        )


@dataclass(frozen=True)
class LedgerRow:
    week: int
    date: date | None
    prediction: str
    hedge_mode: str
    spot: float
    equity: float
    cash: float
    put_book_value: float
    share_pnl: float
    option_value_change: float
    transition_cash: float
    note: str


@dataclass(frozen=True)
class BacktestLedger:
    rows: tuple[LedgerRow, ...]
    config: BacktestConfig
    total_premiums_paid: float
    initial_equity: float
    final_equity: float


def _buy_blocks(
    shares_to_cover: int,
    spot: float,
    week: int,
    ctx: PricingContext,
    block: int,
) -> tuple[list[PutPosition], float]:
    """At-the-money put blocks covering ``shares_to_cover``; returns positions
    and the (positive) cash spent."""
    if shares_to_cover % block != 0:
        raise DataError(f"cannot cover {shares_to_cover} shares with {block}-share blocks")
    tte = ctx.years(ctx.expiry_weeks)
    if ctx.premium_override is not None:
        premium = ctx.premium_override
    else:
        premium = put_value(spot, spot, tte, ctx.vol, ctx.rate) * (1.0 + ctx.haircut)
    positions = [
        PutPosition(spot, block, premium, week, week + ctx.expiry_weeks)
        for _ in range(shares_to_cover // block)
    ]
    return positions, premium * shares_to_cover


def transition(
    state: PortfolioState,
    prediction: str,
    spot: float,
    ctx: PricingContext,
    week: int,
    block: int,
) -> tuple[PortfolioState, float, str]:
    """Apply one weekly direction call; returns (new state, cash flow, note).

    down & partial: buy puts for the uncovered half (now fully hedged).
    up & full: sell the most recently purchased blocks back to half cover.
    Same-direction calls trade nothing.
    """
    if prediction not in ("up", "down"):
        raise DataError(f"prediction must be 'up' or 'down', got {prediction!r}")
    state.check_coverage()
    if prediction == "down" and state.hedge_mode == PARTIAL:
        to_cover = state.shares - state.covered_shares()
        bought, spent = _buy_blocks(to_cover, spot, week, ctx, block)
        new_state = PortfolioState(state.shares, state.puts + tuple(bought), state.cash - spent, FULL)
        new_state.check_coverage()
        return new_state, -spent, f"hedge up to full: bought {to_cover} shares of put cover"
    if prediction == "up" and state.hedge_mode == FULL:
        puts = list(state.puts)
        target = state.shares // 2
        proceeds = 0.0
        sold = 0
        while sum(p.shares for p in puts) > target:
            pos = puts.pop()  # most recently purchased block
            tte = ctx.years(pos.expiry_week - week)
            value = put_value(pos.strike, spot, tte, ctx.vol, ctx.rate) * (1.0 - ctx.haircut)
            proceeds += value * pos.shares
            sold += pos.shares
        new_state = PortfolioState(state.shares, tuple(puts), state.cash + proceeds, PARTIAL)
        new_state.check_coverage()
        return new_state, proceeds, f"hedge down to partial: sold {sold} shares of put cover"
    return state, 0.0, "hold"


def run_backtest(
    index: Series | Sequence[float],
    predictions: Sequence[str],
    config: BacktestConfig,
) -> BacktestLedger:
    """Fold the weekly prediction stream over the index path.

    Week 0 establishes the initial position (at-the-money puts per the
    configured mode).  Each later week: expired puts settle at intrinsic
    value and roll at the new at-the-money strike, the book is marked to
    model, and the portfolio transitions on that week's prediction.  The
    final week liquidates everything at model values.
    """
    if isinstance(index, Series):
        if not index.mask.all():
            raise DataError("run_backtest: index series has missing values")
        spots = index.values.astype(float)
        dates: Sequence[date | None] = index.index.dates
    else:
        spots = np.asarray(index, dtype=float)
        dates = [None] * len(spots)
    if len(spots) < 2:
        raise DataError("run_backtest: need at least two weeks of index data")
    if (spots <= 0).any():
        raise DataError("run_backtest: index levels must be positive")
    if len(predictions) != len(spots):
        raise DataError(
            f"run_backtest: {len(predictions)} predictions for {len(spots)} weeks; must align one per week"
        )
    ctx = config.context()
    n_weeks = len(spots)

    total_premiums = 0.0
    initial_cover = config.shares // 2 if config.initial_mode == PARTIAL else config.shares
    puts, spent = _buy_blocks(initial_cover, float(spots[0]), 0, ctx, config.block)
    total_premiums += spent
    state = PortfolioState(config.shares, tuple(puts), -spent, config.initial_mode)
    state.check_coverage()

    rows: list[LedgerRow] = []
    prev_book = prev_cash = prev_equity = 0.0

    def book_value(st: PortfolioState, spot: float, week: int) -> float:
        return sum(
            put_value(p.strike, spot, ctx.years(p.expiry_week - week), ctx.vol, ctx.rate) * p.shares
            for p in st.puts
        )

    for week in range(n_weeks):
        spot = float(spots[week])
        notes: list[str] = []

        if week > 0:
            # settle blocks expiring at or before this week, then roll at the new ATM strike
            expired = [p for p in state.puts if p.expiry_week <= week]
            if expired:
                alive = tuple(p for p in state.puts if p.expiry_week > week)
                proceeds = sum(max(p.strike - spot, 0.0) * p.shares for p in expired)
                to_roll = sum(p.shares for p in expired)
                rolled, spent = _buy_blocks(to_roll, spot, week, ctx, config.block)
                total_premiums += spent
                state = PortfolioState(
                    state.shares, alive + tuple(rolled), state.cash + proceeds - spent, state.hedge_mode
                )
                state.check_coverage()
                notes.append(f"settled {to_roll} shares of expiring cover and rolled at {spot:g}")

        prediction = str(predictions[week])
        if week == n_weeks - 1:
            # liquidate at model values
            proceeds = sum(
                put_value(p.strike, spot, ctx.years(p.expiry_week - week), ctx.vol, ctx.rate)
                * (1.0 - ctx.haircut)
                * p.shares
                for p in state.puts
            )
            state = PortfolioState(state.shares, (), state.cash + proceeds, state.hedge_mode)
            notes.append("liquidated puts at model value")
        else:
            state, cash_flow, note = transition(state, prediction, spot, ctx, week, config.block)
            if note != "hold":
                if cash_flow < 0:  # a purchase: count the premium spent
                    total_premiums += -cash_flow
                notes.append(note)

        book = book_value(state, spot, week)
        equity = state.cash + state.shares * spot + book
        if week == 0:
            share_pnl = 0.0
            option_change = book
            transition_cash = state.cash
        else:
            share_pnl = state.shares * (spot - float(spots[week - 1]))
            option_change = book - prev_book
            transition_cash = state.cash - prev_cash
        rows.append(
            LedgerRow(
                week=week,
                date=dates[week],
                prediction=prediction,
                hedge_mode=state.hedge_mode,
                spot=spot,
                equity=equity,
                cash=state.cash,
                put_book_value=book,
                share_pnl=share_pnl,
                option_value_change=option_change,
                transition_cash=transition_cash,
                note="; ".join(notes) if notes else "hold",
            )
        )
        prev_book, prev_cash, prev_equity = book, state.cash, equity

    return BacktestLedger(
        rows=tuple(rows),
        config=config,
        total_premiums_paid=total_premiums,
        initial_equity=rows[0].equity,
        final_equity=rows[-1].equity,
    )
