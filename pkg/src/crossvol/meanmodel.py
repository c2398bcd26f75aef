"""Conditional-mean models for the aligned pair: a VAR in log returns or,
when the pair cointegrates, an error-correction model built around a given
long-run relation. Both are estimated equation by equation with OLS
(identical regressors per equation), with BIC lag selection and an optional
event dummy.

Estimators follow the sklearn protocol: hyperparameters in ``__init__``,
data in ``fit``, results in trailing-underscore attributes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._ols import ols
from .exceptions import DataError
from .series import AlignedPanel, ReturnsPanel

EQUATIONS = ("br", "us")


@dataclass(frozen=True)
class MeanSpec:
    """Record of a fitted mean-model configuration."""

    kind: str                 # "VAR" | "VECM"
    lags: int
    dummy: tuple | None       # (start, end) inclusive, or None if inactive
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("VAR", "VECM"):
            raise DataError(f"kind must be VAR or VECM, got {self.kind!r}")
        if self.lags < 1:
            raise DataError("lags must be >= 1")
        if self.dummy is not None:
            start, end = self.dummy
            if np.datetime64(start, "D") > np.datetime64(end, "D"):
                raise DataError(f"dummy interval start {start} is after end {end}")

    def to_dict(self) -> dict:
        dummy = None if self.dummy is None else [str(np.datetime64(d, "D")) for d in self.dummy]
        return {"kind": self.kind, "lags": self.lags, "dummy": dummy, "label": self.label}


def year_dummy(year: int) -> tuple[np.datetime64, np.datetime64]:
    """Dummy interval covering one calendar year."""
    return (np.datetime64(f"{year}-01-01", "D"), np.datetime64(f"{year}-12-31", "D"))


def _dummy_values(dates: np.ndarray, dummy) -> np.ndarray:
    start = np.datetime64(dummy[0], "D")
    end = np.datetime64(dummy[1], "D")
    if start > end:
        raise DataError(f"dummy interval start {start} is after end {end}")
    return ((dates >= start) & (dates <= end)).astype(np.float64)


def _lag_block(values: np.ndarray, lags: int, offset: int):
    """Columns (br.L1, us.L1, ..., br.Lk, us.Lk) for rows offset..end."""
    n = values.shape[0]
    cols, names = [], []
    for j in range(1, lags + 1):
        block = values[offset - j : n - j]
        cols.append(block)
        names.extend([f"br.L{j}", f"us.L{j}"])
    return np.hstack(cols), names


def var_design(r: ReturnsPanel, lags: int, dummy=None):
    """Dependent block, regressor matrix, names and dates for a VAR in
    returns. A dummy spanning no sample dates is dropped."""
    if lags < 1:
        raise ValueError("lags must be >= 1")
    n = len(r)
    if n <= lags:
        raise DataError(f"returns panel of length {n} too short for lags={lags}")
    values = r.values()
    y = values[lags:]
    dates = r.dates[lags:]
    lag_cols, lag_names = _lag_block(values, lags, lags)
    cols = [np.ones((y.shape[0], 1)), lag_cols]
    names = ["const"] + lag_names
    if dummy is not None:
        d = _dummy_values(dates, dummy)
        if d.any():
            cols.append(d[:, None])
            names.append("dummy")
    return y, np.hstack(cols), names, dates


def vecm_design(p: AlignedPanel, lags: int, beta, dummy=None):
    """Dependent block, regressor matrix, names and dates for the
    error-correction form: returns on the lagged equilibrium error, lagged
    returns, intercept and optional dummy.

    ``beta`` is the long-run relation (br, us, constant) normalized so the
    br component is 1; ect_{t-1} = br_{t-1} + beta[1]*us_{t-1} + beta[2].
    """
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (3,):
        raise DataError(f"beta must have 3 components (br, us, constant), got shape {beta.shape}")
    if abs(beta[0] - 1.0) > 1e-8:
        raise DataError(f"beta must be normalized with br component 1, got {beta[0]}")
    if lags < 1:
        raise ValueError("lags must be >= 1")
    t = len(p)
    if t <= lags + 1:
        raise DataError(f"panel of length {t} too short for lags={lags}")
    values = np.diff(p.values(), axis=0)            # returns, row i = level t=i+1
    y = values[lags:]
    dates = p.dates[lags + 1 :]
    ect = p.br[lags:-1] * beta[0] + p.us[lags:-1] * beta[1] + beta[2]
    lag_cols, lag_names = _lag_block(values, lags, lags)
    cols = [np.ones((y.shape[0], 1)), ect[:, None], lag_cols]
    names = ["const", "ect"] + lag_names
    if dummy is not None:
        d = _dummy_values(dates, dummy)
        if d.any():
            cols.append(d[:, None])
            names.append("dummy")
    return y, np.hstack(cols), names, dates


def select_lag_bic(r: ReturnsPanel, max_lag: int = 10) -> int:
    """Choose the VAR lag order minimizing BIC over 1..max_lag.

    All candidates are evaluated on the common sample determined by
    max_lag so their criteria are comparable; ties go to the smaller lag.
    BIC = ln|Sigma_hat| + (n_params / N) * ln N with Sigma_hat the MLE
    residual covariance and n_params the total coefficient count.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    n = len(r)
    if n < 10 * max_lag:
        raise DataError(f"returns panel of length {n} too short for max_lag={max_lag}")
    values = r.values()
    y = values[max_lag:]
    n_common = y.shape[0]
    best_k, best_bic = 1, np.inf
    for k in range(1, max_lag + 1):
        lag_cols, _ = _lag_block(values, k, max_lag)
        x = np.hstack([np.ones((n_common, 1)), lag_cols])
        fit = ols(y, x)
        sigma = fit.resid.T @ fit.resid / n_common
        det = np.linalg.det(sigma)
        if det <= 0.0:
            raise DataError("degenerate residual covariance during lag selection")
        n_params = 2 * (1 + 2 * k)
        bic = math.log(det) + (n_params / n_common) * math.log(n_common)
        if bic < best_bic - 1e-12:
            best_bic, best_k = bic, k
    return best_k


class _MeanModelOls(BaseEstimator):
    """Shared OLS machinery for the two mean models."""

    def _finish(self, y, x, names, dates, spec):
        fit = ols(y, x)
        self.spec_ = spec
        self.names_ = list(names)
        self.dates_ = dates
        self.coef_ = fit.coef.T          # (2, p), rows follow EQUATIONS
        self.stderr_ = fit.stderr.T
        self.resid_ = fit.resid          # (N, 2)
        self.fitted_ = y - fit.resid
        self.nobs_ = y.shape[0]
        self.df_resid_ = fit.df_resid
        self.sigma_ = fit.resid.T @ fit.resid / y.shape[0]
        n_params = self.coef_.size
        self.bic_ = float(
            math.log(np.linalg.det(self.sigma_)) + (n_params / self.nobs_) * math.log(self.nobs_)
        )
        return self

    @property
    def tvalues_(self) -> np.ndarray:
        return self.coef_ / self.stderr_

    def residuals(self):
        """Residual panel aligned with its dates: (dates, (N, 2) array)."""
        return self.dates_, self.resid_

    def coefficient(self, equation: str, name: str) -> float:
        return float(self.coef_[EQUATIONS.index(equation), self.names_.index(name)])


class VectorAutoregression(_MeanModelOls):
    """VAR in log returns with optional event dummy.

    Parameters
    ----------
    lags : int
        Number of own/cross return lags per equation.
    dummy : optional (start, end)
        Inclusive date interval for an indicator regressor; dropped
        automatically when it covers no sample dates.
    label : str
        Pair label carried into reports.
    """

    def __init__(self, lags: int = 1, dummy=None, label: str = ""):
        self.lags = lags
        self.dummy = dummy
        self.label = label

    def fit(self, r: ReturnsPanel):
        if not isinstance(r, ReturnsPanel):
            raise DataError("VectorAutoregression.fit expects a ReturnsPanel")
        y, x, names, dates = var_design(r, self.lags, self.dummy)
        if y.shape[0] <= 3 * (2 * self.lags + 1):
            raise DataError(
                f"sample of {y.shape[0]} rows too short for a {self.lags}-lag model"
            )
        dummy_used = self.dummy if "dummy" in names else None
        spec = MeanSpec(kind="VAR", lags=self.lags, dummy=dummy_used, label=self.label)
        return self._finish(y, x, names, dates, spec)


class ErrorCorrectionModel(_MeanModelOls):
    """Bivariate error-correction model around a given long-run relation.

    Parameters
    ----------
    lags : int
        Number of lagged-return terms per equation.
    beta : 3-vector (br, us, constant)
        Long-run relation from the cointegration step, br component 1.
    dummy, label : as in VectorAutoregression.
    """

    def __init__(self, lags: int = 1, beta=None, dummy=None, label: str = ""):
        self.lags = lags
        self.beta = beta
        self.dummy = dummy
        self.label = label

    def fit(self, p: AlignedPanel):
        if not isinstance(p, AlignedPanel):
            raise DataError("ErrorCorrectionModel.fit expects an AlignedPanel")
        if self.beta is None:
            raise DataError("ErrorCorrectionModel needs beta from the cointegration step")
        y, x, names, dates = vecm_design(p, self.lags, self.beta, self.dummy)
        if y.shape[0] <= 3 * (2 * self.lags + 2):
            raise DataError(
                f"sample of {y.shape[0]} rows too short for a {self.lags}-lag model"
            )
        dummy_used = self.dummy if "dummy" in names else None
        spec = MeanSpec(kind="VECM", lags=self.lags, dummy=dummy_used, label=self.label)
        self._finish(y, x, names, dates, spec)
        j = names.index("ect")
        self.beta_ = np.asarray(self.beta, dtype=np.float64)
        self.alpha_ = self.coef_[:, j].copy()
        self.alpha_stderr_ = self.stderr_[:, j].copy()
        return self
