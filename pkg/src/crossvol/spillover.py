"""Conditional-variance decomposition and cross-market spillover ratios.

Each filtered variance element splits into seven additive terms (the
expansion of the recursion): constant, own-shock, shock interaction,
cross-shock, own lagged variance, lagged covariance, and cross lagged
variance. The spillover ratio toward a market is the share of its current
conditional variance contributed by the three cross-market terms.

The decomposition exists from the second date onward (it needs a lagged
residual and a lagged covariance), so all outputs here are one shorter than
the covariance path and aligned with its dates from index 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .bekk import BekkParams, CondCovPath
from .exceptions import DataError, SingularCovarianceError
from .validation import as_matrix

TERM_NAMES = (
    "constant",
    "own_shock",
    "interaction",
    "cross_shock",
    "own_variance",
    "covariance",
    "cross_variance",
)

_CROSS_TERMS = (
    TERM_NAMES.index("cross_shock"),
    TERM_NAMES.index("covariance"),
    TERM_NAMES.index("cross_variance"),
)


@dataclass(frozen=True)
class VarianceDecomposition:
    """Per-date additive terms of both conditional variances.

    ``br`` and ``us`` are (n, 7) arrays with columns in TERM_NAMES order;
    ``h_br`` and ``h_us`` are the variance elements they sum to.
    """

    br: np.ndarray
    us: np.ndarray
    h_br: np.ndarray
    h_us: np.ndarray
    dates: np.ndarray | None = None

    def __post_init__(self):
        br = as_matrix(self.br, "br", n_cols=7)
        us = as_matrix(self.us, "us", n_cols=7)
        object.__setattr__(self, "br", br)
        object.__setattr__(self, "us", us)
        object.__setattr__(self, "h_br", np.asarray(self.h_br, dtype=np.float64))
        object.__setattr__(self, "h_us", np.asarray(self.h_us, dtype=np.float64))
        n = br.shape[0]
        if us.shape[0] != n or self.h_br.shape != (n,) or self.h_us.shape != (n,):
            raise DataError("decomposition blocks must share one length")
        if self.dates is not None:
            dates = np.asarray(self.dates, dtype="datetime64[D]")
            if dates.shape[0] != n:
                raise DataError("dates length does not match decomposition length")
            object.__setattr__(self, "dates", dates)
        for name, terms, total in (("br", br, self.h_br), ("us", us, self.h_us)):
            gap = np.max(np.abs(terms.sum(axis=1) - total)) if n else 0.0
            if gap > 1e-12:
                raise DataError(
                    f"{name} terms do not reproduce the variance element "
                    f"(max gap {gap:.3e})"
                )

    def __len__(self):
        return self.br.shape[0]


def decompose(params: BekkParams, path: CondCovPath, e) -> VarianceDecomposition:
    """Evaluate the seven variance terms per date for both equations.

    ``e`` must be the residual panel the path was filtered from; terms at
    output position i describe the variance at path position i + 1.
    """
    e = as_matrix(e, "e", n_cols=2)
    if e.shape[0] != len(path):
        raise DataError(
            f"residual panel ({e.shape[0]}) and covariance path ({len(path)}) misaligned"
        )
    if len(path) < 2:
        raise DataError("need at least two dates to decompose the recursion")
    mu1, mu2 = params.mu
    c11, c21, c22 = params.c[0, 0], params.c[1, 0], params.c[1, 1]
    a11, a12 = params.a[0, 0], params.a[0, 1]
    a21, a22 = params.a[1, 0], params.a[1, 1]
    b11, b12 = params.b[0, 0], params.b[0, 1]
    b21, b22 = params.b[1, 0], params.b[1, 1]
    u = e[:-1, 0] - mu1
    v = e[:-1, 1] - mu2
    p11 = path.h[:-1, 0]
    p12 = path.h[:-1, 1]
    p22 = path.h[:-1, 2]
    n = u.shape[0]
    ones = np.ones(n)

    br = np.column_stack(
        [
            c11 * c11 * ones,
            a11 * a11 * u * u,
            2.0 * a11 * a21 * u * v,
            a21 * a21 * v * v,
            b11 * b11 * p11,
            2.0 * b11 * b21 * p12,
            b21 * b21 * p22,
        ]
    )
    us = np.column_stack(
        [
            (c21 * c21 + c22 * c22) * ones,
            a22 * a22 * v * v,
            2.0 * a12 * a22 * u * v,
            a12 * a12 * u * u,
            b22 * b22 * p22,
            2.0 * b12 * b22 * p12,
            b12 * b12 * p11,
        ]
    )
    dates = path.dates[1:] if path.dates is not None else None
    return VarianceDecomposition(
        br=br, us=us, h_br=path.h[1:, 0], h_us=path.h[1:, 2], dates=dates
    )


@dataclass(frozen=True)
class SpilloverPath:
    """Per-date spillover ratios in both directions."""

    sr_us_to_br: np.ndarray
    sr_br_to_us: np.ndarray
    dates: np.ndarray | None = None
    label: str = "Full"

    def __post_init__(self):
        a = np.asarray(self.sr_us_to_br, dtype=np.float64)
        b = np.asarray(self.sr_br_to_us, dtype=np.float64)
        if a.shape != b.shape or a.ndim != 1:
            raise DataError("spillover series must be 1-d and equally long")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise DataError("spillover ratios must be finite")
        object.__setattr__(self, "sr_us_to_br", a)
        object.__setattr__(self, "sr_br_to_us", b)
        if self.dates is not None:
            dates = np.asarray(self.dates, dtype="datetime64[D]")
            if dates.shape[0] != a.shape[0]:
                raise DataError("dates length does not match ratio length")
            object.__setattr__(self, "dates", dates)

    def __len__(self):
        return self.sr_us_to_br.shape[0]


def _cross_share(terms: np.ndarray, denom: np.ndarray, direction: str) -> np.ndarray:
    if np.any(denom <= 0.0):
        t = int(np.argmax(denom <= 0.0))
        raise SingularCovarianceError(
            f"nonpositive conditional variance at position {t}; "
            f"{direction} ratio undefined"
        )
    return terms[:, _CROSS_TERMS].sum(axis=1) / denom


def spillover_us_to_br(d: VarianceDecomposition, path: CondCovPath) -> np.ndarray:
    """Share of the br conditional variance contributed by us-side terms:
    (cross-shock + lagged-covariance + cross-lagged-variance) / h_brbr."""
    if len(path) != len(d) + 1:
        raise DataError("decomposition and path are misaligned")
    return _cross_share(d.br, path.h[1:, 0], "us-to-br")


def spillover_br_to_us(d: VarianceDecomposition, path: CondCovPath) -> np.ndarray:
    """Share of the us conditional variance contributed by br-side terms."""
    if len(path) != len(d) + 1:
        raise DataError("decomposition and path are misaligned")
    return _cross_share(d.us, path.h[1:, 2], "br-to-us")


def compute_spillovers(params: BekkParams, path: CondCovPath, e, label: str = "Full") -> SpilloverPath:
    """Decompose and form both ratios in one step."""
    d = decompose(params, path, e)
    dates = path.dates[1:] if path.dates is not None else None
    return SpilloverPath(
        sr_us_to_br=spillover_us_to_br(d, path),
        sr_br_to_us=spillover_br_to_us(d, path),
        dates=dates,
        label=label,
    )


def _axis_dates(sp: SpilloverPath, offset: int):
    if sp.dates is not None:
        return sp.dates
    return np.arange(offset, offset + len(sp))


def _rolling_mean(x: np.ndarray, window: int) -> np.ndarray:
    if window <= 1 or x.shape[0] < window:
        return x
    kernel = np.ones(window) / window
    out = x.astype(np.float64).copy()
    out[window - 1 :] = np.convolve(x, kernel, mode="valid")
    return out


def export_spillover(
    segments,
    out_dir,
    stem: str,
    boundary=None,
    ylim=None,
    smooth_window: int | None = None,
) -> dict:
    """Write the ratio CSV, the long-format decomposition CSV, and an SVG
    line plot for one or more sample segments.

    Parameters
    ----------
    segments : (SpilloverPath, VarianceDecomposition) pair or sequence of them
        Consecutive sample segments (e.g. Pre and Post) drawn on one figure.
    out_dir : directory for the three files ``<stem>_spillover.csv``,
        ``<stem>_decomposition.csv`` and ``<stem>_spillover.svg``.
    boundary : optional date marked with a vertical line when more than one
        segment is present.
    ylim : optional (lo, hi) fixing the ratio axis across figures.
    smooth_window : optional rolling-mean window applied to the plotted
        lines only; CSV values stay raw.
    """
    import os

    if isinstance(segments, tuple) and len(segments) == 2 and isinstance(segments[0], SpilloverPath):
        segments = [segments]
    segments = list(segments)
    if not segments:
        raise DataError("export_spillover needs at least one segment")
    for sp, d in segments:
        if len(sp) != len(d):
            raise DataError(f"segment {sp.label!r}: ratios and decomposition misaligned")

    os.makedirs(out_dir, exist_ok=True)
    ratio_csv = os.path.join(out_dir, f"{stem}_spillover.csv")
    decomp_csv = os.path.join(out_dir, f"{stem}_decomposition.csv")
    svg = os.path.join(out_dir, f"{stem}_spillover.svg")

    with open(ratio_csv, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "subperiod", "sr_us_to_br", "sr_br_to_us"])
        offset = 0
        for sp, _ in segments:
            axis = _axis_dates(sp, offset)
            offset += len(sp)
            for i in range(len(sp)):
                writer.writerow(
                    [
                        str(axis[i]),
                        sp.label,
                        f"{sp.sr_us_to_br[i]:.12e}",
                        f"{sp.sr_br_to_us[i]:.12e}",
                    ]
                )

    with open(decomp_csv, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "subperiod", "equation", "term", "value"])
        offset = 0
        for sp, d in segments:
            axis = _axis_dates(sp, offset)
            offset += len(sp)
            for eq, terms in (("br", d.br), ("us", d.us)):
                for j, term in enumerate(TERM_NAMES):
                    for i in range(len(d)):
                        writer.writerow(
                            [str(axis[i]), sp.label, eq, term, f"{terms[i, j]:.12e}"]
                        )

    _plot_segments(segments, svg, boundary, ylim, smooth_window)
    return {"ratios": ratio_csv, "decomposition": decomp_csv, "plot": svg}


def _plot_segments(segments, svg_path, boundary, ylim, smooth_window):
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "crossvol"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(9.0, 4.5))
    offset = 0
    for sp, _ in segments:
        axis = _axis_dates(sp, offset)
        offset += len(sp)
        a = sp.sr_us_to_br
        b = sp.sr_br_to_us
        if smooth_window:
            a = _rolling_mean(a, smooth_window)
            b = _rolling_mean(b, smooth_window)
        suffix = f" ({sp.label})" if sp.label != "Full" else ""
        ax.plot(axis, a, lw=0.7, color="#1f77b4", label=f"US to BR{suffix}")
        ax.plot(axis, b, lw=0.7, color="#d62728", label=f"BR to US{suffix}")
    if boundary is not None and len(segments) > 1:
        ax.axvline(np.datetime64(boundary, "D"), color="0.3", ls="--", lw=1.0)
    if ylim is not None:
        ax.set_ylim(*ylim)
    ax.set_ylabel("spillover ratio")
    ax.set_xlabel("date")
    ax.legend(loc="upper left", frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(svg_path, format="svg", metadata={"Date": None})
    plt.close(fig)
