"""Bivariate BEKK(1,1) conditional covariances: filtering, Gaussian MLE,
standard errors, and simulation.

The model for a centered residual pair eps_t = e_t - mu is

    H_t = C C' + A' eps_{t-1} eps_{t-1}' A + B' H_{t-1} B

with C lower-triangular. Thirteen free parameters are estimated: the two
centering means, three intercept-factor entries, and the four entries of
each of A and B. Estimation maximizes the conditional Gaussian likelihood
with an analytic gradient under L-BFGS-B.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from sklearn.base import BaseEstimator

from . import _kernels
from .exceptions import (
    ConvergenceError,
    DataError,
    EstimationError,
    ExplosiveParameterError,
    SingularCovarianceError,
)
from .validation import as_matrix, check_spd_2x2

THETA_NAMES = (
    "mu1", "mu2",
    "c11", "c21", "c22",
    "a11", "a21", "a12", "a22",
    "b11", "b21", "b12", "b22",
)


@dataclass(frozen=True)
class BekkParams:
    """Parameter set of the bivariate recursion.

    mu is the residual centering pair; c the lower-triangular intercept
    factor; a the shock loadings; b the persistence loadings. Matrix entry
    [i, j] is row i, column j, so a21 = a[1, 0].
    """

    mu: np.ndarray
    c: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        c = np.asarray(self.c, dtype=np.float64)
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if mu.shape != (2,):
            raise DataError(f"mu must have shape (2,), got {mu.shape}")
        for name, m in (("c", c), ("a", a), ("b", b)):
            if m.shape != (2, 2):
                raise DataError(f"{name} must have shape (2, 2), got {m.shape}")
        if not all(np.all(np.isfinite(m)) for m in (mu, c, a, b)):
            raise DataError("parameters must be finite")
        if c[0, 1] != 0.0:
            raise DataError(f"c must be lower-triangular, got c[0, 1] = {c[0, 1]}")
        for name, m in (("mu", mu), ("c", c), ("a", a), ("b", b)):
            object.__setattr__(self, name, m)

    @classmethod
    def from_theta(cls, theta) -> "BekkParams":
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (13,):
            raise DataError(f"theta must have 13 entries, got shape {theta.shape}")
        return cls(
            mu=theta[0:2].copy(),
            c=np.array([[theta[2], 0.0], [theta[3], theta[4]]]),
            a=np.array([[theta[5], theta[7]], [theta[6], theta[8]]]),
            b=np.array([[theta[9], theta[11]], [theta[10], theta[12]]]),
        )

    @property
    def theta(self) -> np.ndarray:
        return np.array(
            [
                self.mu[0], self.mu[1],
                self.c[0, 0], self.c[1, 0], self.c[1, 1],
                self.a[0, 0], self.a[1, 0], self.a[0, 1], self.a[1, 1],
                self.b[0, 0], self.b[1, 0], self.b[0, 1], self.b[1, 1],
            ]
        )

    @property
    def omega(self) -> np.ndarray:
        return self.c @ self.c.T

    def spectral_radius(self) -> float:
        """Spectral radius of the Kronecker form of the vec recursion."""
        k = np.kron(self.a, self.a) + np.kron(self.b, self.b)
        return float(np.max(np.abs(np.linalg.eigvals(k))))

    def is_stationary(self, tol: float = 1.0) -> bool:
        return self.spectral_radius() < tol

    def unconditional_covariance(self) -> np.ndarray:
        """Fixed point of the covariance recursion, as a 2x2 matrix."""
        if not self.is_stationary():
            raise ExplosiveParameterError(
                f"no unconditional covariance: spectral radius "
                f"{self.spectral_radius():.6f} >= 1"
            )
        s = _sym_sandwich(self.a) + _sym_sandwich(self.b)
        om = self.omega
        rhs = np.array([om[0, 0], om[0, 1], om[1, 1]])
        h = np.linalg.solve(np.eye(3) - s, rhs)
        return np.array([[h[0], h[1]], [h[1], h[2]]])

    def to_dict(self) -> dict:
        return {name: float(val) for name, val in zip(THETA_NAMES, self.theta)}


def _sym_sandwich(m: np.ndarray) -> np.ndarray:
    """3x3 matrix of the map X -> M' X M on symmetric (x11, x12, x22)."""
    m11, m12 = m[0, 0], m[0, 1]
    m21, m22 = m[1, 0], m[1, 1]
    return np.array(
        [
            [m11 * m11, 2.0 * m11 * m21, m21 * m21],
            [m11 * m12, m11 * m22 + m12 * m21, m21 * m22],
            [m12 * m12, 2.0 * m12 * m22, m22 * m22],
        ]
    )


@dataclass(frozen=True)
class CondCovPath:
    """Filtered conditional covariances in symmetric storage.

    ``h`` is (T, 3) with columns (h_brbr, h_brus, h_usus); ``dates`` is an
    optional matching date vector (None for simulated panels).
    """

    h: np.ndarray
    dates: np.ndarray | None = None

    def __post_init__(self):
        h = as_matrix(self.h, "h", n_cols=3)
        object.__setattr__(self, "h", h)
        if self.dates is not None:
            dates = np.asarray(self.dates, dtype="datetime64[D]")
            if dates.shape[0] != h.shape[0]:
                raise DataError(
                    f"dates length {dates.shape[0]} does not match path length {h.shape[0]}"
                )
            object.__setattr__(self, "dates", dates)
        half_tr = (h[:, 0] + h[:, 2]) / 2.0
        half_gap = (h[:, 0] - h[:, 2]) / 2.0
        min_eig = half_tr - np.sqrt(half_gap**2 + h[:, 1] ** 2)
        if np.min(min_eig) < -1e-12:
            t = int(np.argmin(min_eig))
            raise DataError(
                f"conditional covariance at position {t} is not PSD "
                f"(min eigenvalue {min_eig[t]:.3e})"
            )

    def __len__(self):
        return self.h.shape[0]

    @property
    def h_brbr(self) -> np.ndarray:
        return self.h[:, 0]

    @property
    def h_brus(self) -> np.ndarray:
        return self.h[:, 1]

    @property
    def h_usus(self) -> np.ndarray:
        return self.h[:, 2]

    def as_matrices(self) -> np.ndarray:
        out = np.empty((len(self), 2, 2))
        out[:, 0, 0] = self.h[:, 0]
        out[:, 0, 1] = self.h[:, 1]
        out[:, 1, 0] = self.h[:, 1]
        out[:, 1, 1] = self.h[:, 2]
        return out

    def min_eigenvalues(self) -> np.ndarray:
        half_tr = (self.h[:, 0] + self.h[:, 2]) / 2.0
        half_gap = (self.h[:, 0] - self.h[:, 2]) / 2.0
        return half_tr - np.sqrt(half_gap**2 + self.h[:, 1] ** 2)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["date", "h_brbr", "h_brus", "h_usus"])
            for t in range(len(self)):
                date = str(self.dates[t]) if self.dates is not None else str(t)
                writer.writerow([date] + [f"{x:.12e}" for x in self.h[t]])


def _default_h0(params: BekkParams, e: np.ndarray) -> np.ndarray:
    eps = e - params.mu
    return eps.T @ eps / e.shape[0]


def _h0_vec(h0) -> np.ndarray:
    m = check_spd_2x2(h0, "h0", tol=-1e-12)
    return np.array([m[0, 0], (m[0, 1] + m[1, 0]) / 2.0, m[1, 1]])


def filter_covariances(params: BekkParams, e, h0=None, dates=None) -> CondCovPath:
    """Run the covariance recursion over a residual panel.

    h0 defaults to the mean outer product of the mu-centered residuals.
    """
    e = as_matrix(e, "e", n_cols=2)
    if e.shape[0] < 1:
        raise DataError("residual panel is empty")
    if h0 is None:
        h0 = _default_h0(params, e)
    h = _kernels.bekk_filter(params.theta, np.ascontiguousarray(e), _h0_vec(h0))
    return CondCovPath(h=h, dates=dates)


def log_likelihood(params: BekkParams, e, h0=None) -> float:
    """Conditional Gaussian log-likelihood of the panel under params."""
    e = as_matrix(e, "e", n_cols=2)
    if e.shape[0] < 1:
        raise DataError("residual panel is empty")
    if h0 is None:
        h0 = _default_h0(params, e)
    value = _kernels.bekk_loglik(params.theta, np.ascontiguousarray(e), _h0_vec(h0))
    if not np.isfinite(value):
        raise SingularCovarianceError("conditional covariance became singular")
    return float(value)


def log_likelihood_grad(params: BekkParams, e, h0=None) -> tuple[float, np.ndarray]:
    """Log-likelihood and its analytic gradient in theta order."""
    e = as_matrix(e, "e", n_cols=2)
    if h0 is None:
        h0 = _default_h0(params, e)
    value, grad = _kernels.bekk_loglik_grad(
        params.theta, np.ascontiguousarray(e), _h0_vec(h0)
    )
    if not np.isfinite(value):
        raise SingularCovarianceError("conditional covariance became singular")
    return float(value), grad


def simulate(params: BekkParams, n: int, seed, burn: int = 500) -> np.ndarray:
    """Draw an (n, 2) residual panel from the recursion.

    The path starts at the unconditional covariance, runs ``burn`` warm-up
    draws, and is reproducible from the seed.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if burn < 0:
        raise ValueError("burn must be nonnegative")
    if not params.is_stationary():
        raise ExplosiveParameterError(
            f"cannot simulate: spectral radius {params.spectral_radius():.6f} >= 1"
        )
    hbar = params.unconditional_covariance()
    h0 = np.array([hbar[0, 0], hbar[0, 1], hbar[1, 1]])
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((burn + n, 2))
    e, ok = _kernels.bekk_simulate(params.theta, z, h0)
    if not ok:
        raise ExplosiveParameterError("simulated covariance path ran away or degenerated")
    return e[burn:]


def standard_errors(params: BekkParams, e, h0=None) -> tuple[np.ndarray, bool]:
    """Asymptotic standard errors at a likelihood optimum.

    Square roots of the diagonal of the inverse numerical Hessian of the
    negative log-likelihood, built from central differences of the analytic
    gradient. Returns (se, ok); when the Hessian is not positive definite
    the errors are NaN and ok is False.
    """
    e = as_matrix(e, "e", n_cols=2)
    if h0 is None:
        h0 = _default_h0(params, e)
    h0v = _h0_vec(h0)
    e = np.ascontiguousarray(e)
    theta = params.theta
    hess = np.empty((13, 13))
    for i in range(13):
        step = max(1e-6, 1e-4 * abs(theta[i]))
        up = theta.copy()
        up[i] += step
        down = theta.copy()
        down[i] -= step
        f_up, g_up = _kernels.bekk_loglik_grad(up, e, h0v)
        f_down, g_down = _kernels.bekk_loglik_grad(down, e, h0v)
        if not (np.isfinite(f_up) and np.isfinite(f_down)):
            return np.full(13, np.nan), False
        hess[i] = -(g_up - g_down) / (2.0 * step)
    hess = (hess + hess.T) / 2.0
    try:
        inv = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        return np.full(13, np.nan), False
    diag = np.diag(inv)
    if np.any(diag <= 0.0) or not np.all(np.isfinite(diag)):
        return np.full(13, np.nan), False
    return np.sqrt(diag), True


def _normalize_signs(theta: np.ndarray) -> np.ndarray:
    """Resolve the sign indeterminacies: flip whole matrices so the leading
    diagonal entries are nonnegative ((-A, -B) and -C generate the same
    path), and flip c22 alone (it enters only squared)."""
    out = theta.copy()
    if out[2] < 0.0:
        out[2:5] = -out[2:5]
    if out[4] < 0.0:
        out[4] = -out[4]
    if out[5] < 0.0:
        out[5:9] = -out[5:9]
    if out[9] < 0.0:
        out[9:13] = -out[9:13]
    return out


def default_start(e: np.ndarray) -> BekkParams:
    """Optimizer start: sample mean, intercept factor from a fifth of the
    sample covariance, mild shock loading, persistent smooth loading."""
    mu = e.mean(axis=0)
    eps = e - mu
    cov = eps.T @ eps / e.shape[0]
    try:
        c = np.linalg.cholesky(0.2 * cov)
    except np.linalg.LinAlgError:
        raise DataError("degenerate residuals: sample covariance not positive definite") from None
    return BekkParams(mu=mu, c=c, a=0.3 * np.eye(2), b=0.9 * np.eye(2))


class BekkGarch(BaseEstimator):
    """Maximum-likelihood BEKK(1,1) estimator for a bivariate residual panel.

    Parameters
    ----------
    max_iter : int
        Iteration cap for the quasi-Newton optimizer.
    gtol : float
        Convergence threshold on the projected-gradient max-norm.
    ftol : float
        Convergence threshold on the relative likelihood change.
    start : BekkParams, optional
        Starting point; defaults to a data-driven rule.
    h0 : 2x2 array, optional
        Initial covariance for the recursion; defaults to the sample
        covariance of the residuals about their sample mean, held fixed
        during optimization.
    compute_se : bool
        Whether to compute standard errors after fitting.

    Attributes (after fit)
    ----------------------
    params_ : BekkParams in the sign normalization with a11, b11, c11 >= 0
    loglik_ : float
    stderr_ : (13,) array, NaN when the Hessian is not invertible
    stderr_ok_ : bool
    path_ : CondCovPath over the fitted sample
    converged_ : bool
    n_iter_, grad_norm_, ll_history_, h0_, nobs_, message_
    """

    def __init__(
        self,
        max_iter: int = 1000,
        gtol: float = 1e-5,
        ftol: float = 1e-9,
        start: BekkParams | None = None,
        h0=None,
        compute_se: bool = True,
    ):
        self.max_iter = max_iter
        self.gtol = gtol
        self.ftol = ftol
        self.start = start
        self.h0 = h0
        self.compute_se = compute_se

    def fit(self, e, dates=None):
        e = np.ascontiguousarray(as_matrix(e, "e", n_cols=2))
        t_len = e.shape[0]
        if t_len < 250:
            raise DataError(
                f"sample of {t_len} observations is too short to fit 13 parameters "
                f"(need >= 250)"
            )
        if np.ptp(e[:, 0]) == 0.0 or np.ptp(e[:, 1]) == 0.0:
            raise DataError("degenerate residuals: a column has zero variance")

        start = self.start if self.start is not None else default_start(e)
        if self.h0 is not None:
            h0 = np.asarray(self.h0, dtype=np.float64)
        else:
            centered = e - e.mean(axis=0)
            h0 = centered.T @ centered / t_len
        h0v = _h0_vec(h0)

        history: list[float] = []

        def objective(theta):
            value, grad = _kernels.bekk_loglik_grad(theta, e, h0v)
            if not np.isfinite(value):
                return 1e10, np.zeros(13)
            return -value, -grad

        def record(theta):
            value = _kernels.bekk_loglik(theta, e, h0v)
            if np.isfinite(value):
                history.append(float(value))

        theta0 = start.theta
        f0 = _kernels.bekk_loglik(theta0, e, h0v)
        if not np.isfinite(f0):
            raise EstimationError("starting point has a singular covariance path")
        history.append(float(f0))

        result = minimize(
            objective,
            theta0,
            method="L-BFGS-B",
            jac=True,
            callback=record,
            options={"maxiter": self.max_iter, "ftol": self.ftol, "gtol": self.gtol},
        )

        theta_hat = _normalize_signs(result.x)
        self.params_ = BekkParams.from_theta(theta_hat)
        self.loglik_ = float(-result.fun)
        self.converged_ = bool(result.status == 0)
        self.n_iter_ = int(result.nit)
        self.grad_norm_ = float(np.max(np.abs(result.jac)))
        self.message_ = str(result.message)
        self.ll_history_ = np.asarray(history)
        self.h0_ = h0
        self.nobs_ = t_len
        self.dates_ = dates
        self.path_ = filter_covariances(self.params_, e, h0=h0, dates=dates)
        if self.compute_se:
            self.stderr_, self.stderr_ok_ = standard_errors(self.params_, e, h0=h0)
        else:
            self.stderr_, self.stderr_ok_ = np.full(13, np.nan), False
        return self

    def require_convergence(self):
        """Raise ConvergenceError if the last fit did not converge."""
        if not getattr(self, "converged_", False):
            raise ConvergenceError(
                f"BEKK fit did not converge after {getattr(self, 'n_iter_', 0)} iterations: "
                f"{getattr(self, 'message_', 'no fit')} "
                f"(final gradient norm {getattr(self, 'grad_norm_', float('nan')):.3e})"
            )
        return self

    def to_dict(self) -> dict:
        return {
            "params": self.params_.to_dict(),
            "stderr": {n: float(s) for n, s in zip(THETA_NAMES, self.stderr_)},
            "stderr_ok": bool(self.stderr_ok_),
            "loglik": self.loglik_,
            "converged": self.converged_,
            "n_iter": self.n_iter_,
            "grad_norm": self.grad_norm_,
            "nobs": self.nobs_,
        }
