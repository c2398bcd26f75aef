"""Exception hierarchy.

Everything raised on purpose derives from CrossvolError so callers can
distinguish library failures from programming errors. The CLI maps these to
exit codes: ConfigError and DataError are usage problems (exit 1),
ConvergenceError is an estimation outcome (exit 2), anything else escaping
is internal (exit 3).
"""


class CrossvolError(Exception):
    """Base class for all library errors."""


class ConfigError(CrossvolError):
    """Bad or missing configuration: unknown keys, unparseable values,
    missing input files."""


class DataError(CrossvolError):
    """Input data violates a precondition: malformed rows, non-monotone
    dates, non-positive prices, series too short for the requested model."""


class EstimationError(CrossvolError):
    """Numerical estimation failed: collinear regressors, singular moment
    matrices, degenerate residuals."""


class ConvergenceError(EstimationError):
    """Iterative optimization stopped without meeting its convergence
    criteria."""


class SingularCovarianceError(EstimationError):
    """A conditional covariance matrix became singular or indefinite while
    evaluating a likelihood."""


class ExplosiveParameterError(CrossvolError):
    """Parameter matrices fail the covariance stationarity condition, so the
    requested simulation or population moment does not exist."""
