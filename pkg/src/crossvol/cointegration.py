"""Johansen trace test for a bivariate system with the constant restricted
to the cointegrating relation.

The reduced-rank regression concentrates out k-1 lagged-difference terms,
solves the canonical-correlation eigenproblem between the current
differences and the (lagged levels, 1) block, and applies the sequential
trace-test decision. Critical values for this deterministic case are a
hard-coded lookup (no simulation at runtime).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .exceptions import DataError, EstimationError
from .series import AlignedPanel

# Trace-test critical values, restricted-constant case, bivariate system,
# ordered (10%, 5%, 1%).
_TRACE_CV = {
    "r=0": (17.85, 19.96, 24.60),
    "r<=1": (7.52, 9.24, 12.97),
}

_LEVEL_INDEX = {10: 0, 5: 1, 1: 2}


def critical_values(hypothesis: str) -> tuple[float, float, float]:
    """Trace critical values (10%, 5%, 1%) for H0: rank = 0 ("r=0") or
    H0: rank <= 1 ("r<=1")."""
    key = hypothesis.replace("≤", "<=").replace(" ", "")
    if key not in _TRACE_CV:
        raise ValueError(f"hypothesis must be 'r=0' or 'r<=1', got {hypothesis!r}")
    return _TRACE_CV[key]


@dataclass(frozen=True)
class JohansenResult:
    """Trace-test outcome and the estimated long-run relation."""

    eigenvalues: np.ndarray          # (2,) descending, in [0, 1)
    trace_stats: dict                # {"r=0": float, "r<=1": float}
    crit_values: dict                # hypothesis -> (10%, 5%, 1%)
    rank: int
    level: int
    beta: np.ndarray                 # (3,) = (br, us, constant), br component 1
    alpha: np.ndarray                # (2,) adjustment loadings
    lags: int
    nobs: int

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=np.float64)
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=np.float64))
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=np.float64))
        if ev.shape != (2,) or ev[0] < ev[1]:
            raise DataError("eigenvalues must be a descending pair")
        if ev[1] < 0.0 or ev[0] >= 1.0:
            raise DataError("eigenvalues must lie in [0, 1)")
        t0, t1 = self.trace_stats["r=0"], self.trace_stats["r<=1"]
        if not (t0 >= t1 >= -1e-10):
            raise DataError("trace statistics must satisfy r=0 >= r<=1 >= 0")
        if self.rank != _decide_rank(self.trace_stats, self.crit_values, self.level):
            raise DataError("rank inconsistent with sequential trace decision")

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "trace_stats": {k: float(v) for k, v in self.trace_stats.items()},
            "crit_values": {k: list(v) for k, v in self.crit_values.items()},
            "rank": self.rank,
            "level": self.level,
            "beta": [float(v) for v in self.beta],
            "alpha": [float(v) for v in self.alpha],
            "lags": self.lags,
            "nobs": self.nobs,
        }


def _decide_rank(trace_stats: dict, crit: dict, level: int) -> int:
    j = _LEVEL_INDEX[level]
    if trace_stats["r=0"] <= crit["r=0"][j]:
        return 0
    if trace_stats["r<=1"] <= crit["r<=1"][j]:
        return 1
    return 2


def johansen_test(p: AlignedPanel, lags: int = 2, level: int = 5) -> JohansenResult:
    """Test for cointegration between the panel's two log-price series.

    Parameters
    ----------
    p : AlignedPanel
    lags : int
        VAR lag order k in levels; the test regression uses k-1 lagged
        differences.
    level : {10, 5, 1}
        Significance level for the sequential rank decision.
    """
    if lags < 1:
        raise ValueError("lags must be >= 1")
    if level not in _LEVEL_INDEX:
        raise ValueError(f"level must be 10, 5 or 1, got {level}")
    t = len(p)
    if t < 10 * lags:
        raise DataError(f"panel length {t} too short for lags={lags} (need >= {10 * lags})")
    if np.ptp(p.br) == 0.0 or np.ptp(p.us) == 0.0:
        raise DataError("constant series cannot be tested for cointegration")

    y = p.values()                       # (T, 2)
    dy = np.diff(y, axis=0)              # (T-1, 2), row i = diff at level index i+1
    k = lags
    # usable level indices t = k..T-1
    z0 = dy[k - 1 :]                                       # current differences
    z1 = np.column_stack([y[k - 1 : t - 1], np.ones(t - k)])  # (lagged levels, 1)
    blocks = [dy[k - 1 - j : t - 1 - j] for j in range(1, k)]
    n = z0.shape[0]

    if blocks:
        z2 = np.column_stack(blocks)
        q, _ = np.linalg.qr(z2)
        r0 = z0 - q @ (q.T @ z0)
        r1 = z1 - q @ (q.T @ z1)
    else:
        r0, r1 = z0, z1

    s00 = r0.T @ r0 / n
    s01 = r0.T @ r1 / n
    s11 = r1.T @ r1 / n
    try:
        s00_inv = np.linalg.inv(s00)
    except np.linalg.LinAlgError:
        raise EstimationError("singular moment matrix S00") from None
    m = s01.T @ s00_inv @ s01
    m = (m + m.T) / 2.0
    try:
        eigvals, eigvecs = eigh(m, (s11 + s11.T) / 2.0)
    except np.linalg.LinAlgError:
        raise EstimationError("near-singular moment matrices in reduced-rank regression") from None

    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]
    if eigvals[0] >= 1.0:
        raise EstimationError("canonical correlation >= 1; moment matrices degenerate")
    top = eigvals[:2]

    trace_stats = {
        "r=0": float(-n * (np.log1p(-top[0]) + np.log1p(-top[1]))),
        "r<=1": float(-n * np.log1p(-top[1])),
    }
    crit = {h: _TRACE_CV[h] for h in ("r=0", "r<=1")}
    rank = _decide_rank(trace_stats, crit, level)

    v = eigvecs[:, 0]
    if abs(v[0]) < 1e-12 * np.linalg.norm(v):
        raise EstimationError("cannot normalize beta: br component is numerically zero")
    beta = v / v[0]
    denom = float(beta @ s11 @ beta)
    alpha = (s01 @ beta) / denom

    return JohansenResult(
        eigenvalues=top,
        trace_stats=trace_stats,
        crit_values=crit,
        rank=rank,
        level=level,
        beta=beta,
        alpha=alpha,
        lags=lags,
        nobs=n,
    )
