"""Augmented Dickey-Fuller testing and I(d) classification.

The test regression is

    dy_t = det_t + rho * y_{t-1} + sum_{j=1..q} phi_j * dy_{t-j} + u_t

with the lag order q chosen by BIC on a common estimation sample, and the
statistic the t-ratio on y_{t-1}. Critical values come from a hard-coded
response surface in 1/T (MacKinnon-style), so no table files are needed at
runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._ols import ols
from .exceptions import DataError
from .series import AlignedPanel
from .validation import as_vector

_DETERMINISTIC = ("none", "constant", "trend")

# Response-surface coefficients for the Dickey-Fuller t-distribution:
# cv = b0 + b1/T + b2/T^2 + b3/T^3, rows ordered (1%, 5%, 10%).
_CV_SURFACE = {
    "none": (
        (-2.56574, -2.2358, -3.627, 0.0),
        (-1.94100, -0.2686, -3.365, 31.223),
        (-1.61682, 0.2656, -2.714, 25.364),
    ),
    "constant": (
        (-3.43035, -6.5393, -16.786, -79.433),
        (-2.86154, -2.8903, -4.234, -40.040),
        (-2.56677, -1.5384, -2.809, 0.0),
    ),
    "trend": (
        (-3.95877, -9.0531, -28.428, -134.155),
        (-3.41049, -4.3904, -9.036, -45.374),
        (-3.12705, -2.5856, -3.925, -22.380),
    ),
}


def adf_critical_values(deterministic: str, nobs: int) -> dict[str, float]:
    """Finite-sample Dickey-Fuller critical values at 1/5/10%."""
    if deterministic not in _DETERMINISTIC:
        raise ValueError(f"deterministic must be one of {_DETERMINISTIC}, got {deterministic!r}")
    if nobs < 1:
        raise DataError("nobs must be positive")
    t = float(nobs)
    out = {}
    for level, (b0, b1, b2, b3) in zip(("1%", "5%", "10%"), _CV_SURFACE[deterministic]):
        out[level] = b0 + b1 / t + b2 / t**2 + b3 / t**3
    return out


@dataclass(frozen=True)
class AdfResult:
    """Outcome of one ADF regression."""

    statistic: float
    lags: int
    deterministic: str
    nobs: int
    critical_values: dict
    reject_at: int | None

    def __post_init__(self):
        cv = self.critical_values
        if not (cv["1%"] < cv["5%"] < cv["10%"]):
            raise DataError("critical values must be ordered with 1% most negative")
        expected = _classify(self.statistic, cv)
        if expected != self.reject_at:
            raise DataError(
                f"reject_at={self.reject_at} inconsistent with statistic {self.statistic:.4f}"
            )

    @property
    def rejects_unit_root(self) -> bool:
        return self.reject_at is not None

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "lags": self.lags,
            "deterministic": self.deterministic,
            "nobs": self.nobs,
            "critical_values": dict(self.critical_values),
            "reject_at": self.reject_at,
        }


def _classify(stat: float, cv: dict) -> int | None:
    if stat < cv["1%"]:
        return 1
    if stat < cv["5%"]:
        return 5
    if stat < cv["10%"]:
        return 10
    return None


def default_max_lag(nobs: int) -> int:
    return int(math.floor(12.0 * (nobs / 100.0) ** 0.25))


def _adf_design(y: np.ndarray, q: int, deterministic: str, start: int):
    """Rows t = start..T-1 of the ADF regression at lag order q."""
    t_max = y.shape[0]
    dy = np.diff(y)
    lhs = dy[start - 1 :]                      # dy_t for t = start..T-1
    cols = [y[start - 1 : t_max - 1]]          # y_{t-1}
    for j in range(1, q + 1):
        cols.append(dy[start - 1 - j : t_max - 1 - j])
    n = lhs.shape[0]
    det_cols = []
    if deterministic in ("constant", "trend"):
        det_cols.append(np.ones(n))
    if deterministic == "trend":
        det_cols.append(np.arange(start, t_max, dtype=np.float64))
    x = np.column_stack(det_cols + cols) if det_cols else np.column_stack(cols)
    return lhs, x, len(det_cols)


def adf_test(y, deterministic: str = "constant", max_lag: int | None = None) -> AdfResult:
    """Run an ADF test with BIC lag selection.

    Parameters
    ----------
    y : sequence of real
    deterministic : {"none", "constant", "trend"}
    max_lag : optional int
        Upper bound for the BIC search; default floor(12*(T/100)^0.25).

    Returns
    -------
    AdfResult
    """
    if deterministic not in _DETERMINISTIC:
        raise ValueError(f"deterministic must be one of {_DETERMINISTIC}, got {deterministic!r}")
    y = as_vector(y, "y", min_len=3)
    t = y.shape[0]
    if max_lag is None:
        max_lag = default_max_lag(t)
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    if t < max_lag + 10:
        raise DataError(f"series of length {t} too short for max_lag={max_lag}")
    if np.ptp(y) == 0.0:
        raise DataError("series is constant; unit-root regression is degenerate")

    # lag choice on the common sample so BICs are comparable
    start_common = max_lag + 1
    best_q, best_bic = 0, np.inf
    for q in range(max_lag + 1):
        lhs, x, _ = _adf_design(y, q, deterministic, start_common)
        fit = ols(lhs, x)
        n = lhs.shape[0]
        rss = float(fit.resid @ fit.resid)
        bic = n * math.log(rss / n) + x.shape[1] * math.log(n)
        if bic < best_bic - 1e-12:
            best_bic, best_q = bic, q

    lhs, x, n_det = _adf_design(y, best_q, deterministic, best_q + 1)
    fit = ols(lhs, x)
    stat = float(fit.tvalues[n_det])  # t-ratio on y_{t-1}
    cv = adf_critical_values(deterministic, lhs.shape[0])
    return AdfResult(
        statistic=stat,
        lags=best_q,
        deterministic=deterministic,
        nobs=lhs.shape[0],
        critical_values=cv,
        reject_at=_classify(stat, cv),
    )


def integration_order(
    p: AlignedPanel,
    level: int = 5,
    deterministic: str = "constant",
    max_lag: int | None = None,
) -> dict:
    """Classify each panel series as I(0), I(1) or higher.

    I(0): levels reject the unit root at ``level``.
    I(1): levels fail to reject but first differences reject.
    "higher": neither rejects.
    """
    if level not in (1, 5, 10):
        raise ValueError(f"level must be 1, 5 or 10, got {level}")
    out = {}
    for name, series in (("br", p.br), ("us", p.us)):
        levels = adf_test(series, deterministic, max_lag)
        if levels.reject_at is not None and levels.reject_at <= level:
            out[name] = {"order": "I(0)", "levels": levels.to_dict(), "differences": None}
            continue
        diffs = adf_test(np.diff(series), deterministic, max_lag)
        order = "I(1)" if (diffs.reject_at is not None and diffs.reject_at <= level) else "higher"
        out[name] = {"order": order, "levels": levels.to_dict(), "differences": diffs.to_dict()}
    return out
