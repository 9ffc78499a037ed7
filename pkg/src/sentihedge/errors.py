"""Exception types shared across the package."""


class DataError(ValueError):
    """Malformed or contract-violating input data."""


class DegenerateDataError(ValueError):
    """Input is degenerate for the requested computation (zero variance, single class, ...)."""


class FitError(RuntimeError):
    """A model estimation failed to produce a usable result."""
