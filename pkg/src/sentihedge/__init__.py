"""Tweet-sentiment market analytics and married-put hedging backtests."""

__version__ = "0.1.0"
