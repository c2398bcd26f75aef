"""Cross-market volatility toolkit for paired commodity price series.

The package covers the full chain from raw price files to spillover
figures: nearby-futures construction and currency conversion, unit-root
and cointegration testing, VAR/VECM mean models, a bivariate conditional
covariance model with full cross terms, and the per-date decomposition
of each market's conditional variance into own and cross contributions.

Submodules group the stages; the names most callers need are re-exported
here. The command line interface lives in :mod:`crossvol.cli`.
"""

__version__ = "0.1.0"

from .exceptions import (
    ConfigError,
    ConvergenceError,
    CrossvolError,
    DataError,
    EstimationError,
    ExplosiveParameterError,
    SingularCovarianceError,
)
from .series import (
    AlignedPanel,
    FxSeries,
    RawContractSeries,
    ReturnsPanel,
    SpotSeries,
    align,
    build_nearby,
    convert_to_usd_per_bushel,
    load_series,
    returns,
    split_subperiods,
)
from .unitroot import AdfResult, adf_test, integration_order
from .cointegration import JohansenResult, johansen_test
from .meanmodel import (
    ErrorCorrectionModel,
    MeanSpec,
    VectorAutoregression,
    select_lag_bic,
    year_dummy,
)
from .bekk import BekkGarch, BekkParams, CondCovPath, filter_covariances, log_likelihood
from .spillover import (
    TERM_NAMES,
    SpilloverPath,
    VarianceDecomposition,
    compute_spillovers,
    decompose,
    export_spillover,
)
from .config import PipelineConfig, parse_config
from .pipeline import run, summarize

__all__ = [
    "__version__",
    "CrossvolError",
    "ConfigError",
    "DataError",
    "EstimationError",
    "ConvergenceError",
    "SingularCovarianceError",
    "ExplosiveParameterError",
    "RawContractSeries",
    "SpotSeries",
    "FxSeries",
    "AlignedPanel",
    "ReturnsPanel",
    "load_series",
    "build_nearby",
    "convert_to_usd_per_bushel",
    "align",
    "returns",
    "split_subperiods",
    "AdfResult",
    "adf_test",
    "integration_order",
    "JohansenResult",
    "johansen_test",
    "MeanSpec",
    "VectorAutoregression",
    "ErrorCorrectionModel",
    "select_lag_bic",
    "year_dummy",
    "BekkParams",
    "BekkGarch",
    "CondCovPath",
    "filter_covariances",
    "log_likelihood",
    "TERM_NAMES",
    "VarianceDecomposition",
    "SpilloverPath",
    "decompose",
    "compute_spillovers",
    "export_spillover",
    "PipelineConfig",
    "parse_config",
    "run",
    "summarize",
]
