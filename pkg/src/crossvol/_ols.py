"""Minimal OLS via QR, shared by the unit-root test and the mean models.

Kept private: the public surface of this package speaks in terms of models
and tests, not regressions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import EstimationError


@dataclass(frozen=True)
class OlsFit:
    coef: np.ndarray       # (p,) or (p, m) matching y
    stderr: np.ndarray
    resid: np.ndarray
    nobs: int
    df_resid: int
    sigma2: np.ndarray     # scalar array () or (m,), residual variance (dof-adjusted)

    @property
    def tvalues(self) -> np.ndarray:
        return self.coef / self.stderr


def ols(y: np.ndarray, x: np.ndarray) -> OlsFit:
    """Least squares of y on x with conventional (homoskedastic) standard
    errors. ``y`` may be a vector or an (n, m) matrix sharing the regressor
    block. Rank-deficient designs raise EstimationError."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = x.shape
    if n <= p:
        raise EstimationError(f"need more observations than regressors: n={n}, p={p}")
    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    if np.any(diag < 1e-10 * max(diag.max(), 1.0)):
        raise EstimationError("collinear regressors: design matrix is rank deficient")
    coef = np.linalg.solve(r, q.T @ y)
    resid = y - x @ coef
    df = n - p
    # (X'X)^-1 = R^-1 R^-T
    r_inv = np.linalg.solve(r, np.eye(p))
    xtx_inv_diag = np.sum(r_inv * r_inv, axis=1)
    if y.ndim == 1:
        sigma2 = np.asarray(resid @ resid / df)
        stderr = np.sqrt(sigma2 * xtx_inv_diag)
    else:
        sigma2 = np.einsum("ij,ij->j", resid, resid) / df
        stderr = np.sqrt(np.outer(xtx_inv_diag, sigma2))
    return OlsFit(coef=coef, stderr=stderr, resid=resid, nobs=n, df_resid=df, sigma2=sigma2)
