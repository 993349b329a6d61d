"""Exception hierarchy shared across the package."""


class CheckerdepError(Exception):
    """Base class for all package errors."""


class DomainError(CheckerdepError, ValueError):
    """An argument lies outside its mathematical domain."""


class TiesPresentError(CheckerdepError):
    """A data column contains tied values under the ``error`` tie policy."""

    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"tied values in column {column}; "
                         "use tie_policy='random' to break ties with a seeded shuffle")


class DivisibilityError(CheckerdepError):
    """Sample size is not divisible by the required box order."""

    def __init__(self, n, m, message=None):
        self.n = n
        self.m = m
        super().__init__(message or f"sample size n={n} is not divisible by {m}")


class NotACopulaError(CheckerdepError):
    """An evaluator produced a negative box volume or violated copula bounds."""


class ConfigError(CheckerdepError):
    """Invalid configuration of a test, study, or hypothesis."""


class DataError(CheckerdepError):
    """Input data could not be ingested (parse failures, missing fields)."""
