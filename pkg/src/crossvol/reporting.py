"""Report shaping: summary statistics, significance stars, and fixed-width
text tables for the summarize command.

JSON-friendly dict builders live here too so the pipeline report and the
text renderers agree on structure.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats as _st

from .bekk import THETA_NAMES, BekkGarch
from .cointegration import JohansenResult
from .exceptions import DataError

STAR_THRESHOLDS = ((0.001, "***"), (0.01, "**"), (0.05, "*"), (0.10, "."))


def stars(p_value: float) -> str:
    """Significance marker for a p-value."""
    if not (0.0 <= p_value <= 1.0) or math.isnan(p_value):
        return ""
    for cut, mark in STAR_THRESHOLDS:
        if p_value < cut:
            return mark
    return ""


def summary_stats(x) -> dict:
    """Mean, median, standard error of the mean, skewness, excess kurtosis
    and N. Shape statistics are None for zero-variance input."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise DataError("summary_stats needs a nonempty 1-d sample")
    n = x.size
    mean = float(x.mean())
    centered = x - mean
    m2 = float(np.mean(centered**2))
    out = {
        "mean": mean,
        "median": float(np.median(x)),
        "std_error": float(math.sqrt(m2 / max(n - 1, 1))) if n > 1 else None,
        "skewness": None,
        "excess_kurtosis": None,
        "n": n,
    }
    if m2 > 0.0:
        m3 = float(np.mean(centered**3))
        m4 = float(np.mean(centered**4))
        out["skewness"] = m3 / m2**1.5
        out["excess_kurtosis"] = m4 / m2**2 - 3.0
    return out


def _fmt(value, digits: int = 4) -> str:
    if value is None:
        return "NA"
    if isinstance(value, str):
        return value
    return f"{value:.{digits}f}"


def render_table(headers, rows, title: str = "") -> str:
    """Fixed-width text table; cells are strings or numbers."""
    cells = [[_fmt(c) if not isinstance(c, str) else c for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for j, c in enumerate(row):
            widths[j] = max(widths[j], len(c))
    lines = []
    if title:
        lines.append(title)
    lines.append("  ".join(h.ljust(w) if j == 0 else h.rjust(w) for j, (h, w) in enumerate(zip(headers, widths))))
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append(
            "  ".join(c.ljust(w) if j == 0 else c.rjust(w) for j, (c, w) in enumerate(zip(row, widths)))
        )
    return "\n".join(lines)


SUMMARY_COLUMNS = ("Mean", "Median", "Std Error", "Skewness", "Ex Kurtosis", "N")


def summary_table(rows) -> str:
    """Summary-statistics table: ``rows`` is a sequence of (label, stats
    dict from summary_stats)."""
    body = []
    for label, s in rows:
        body.append(
            [
                label,
                _fmt(s["mean"], 5),
                _fmt(s["median"], 5),
                _fmt(s["std_error"], 5),
                _fmt(s["skewness"], 3),
                _fmt(s["excess_kurtosis"], 3),
                str(s["n"]),
            ]
        )
    return render_table(("Series",) + SUMMARY_COLUMNS, body, title="Summary statistics")


def cointegration_table(rows) -> str:
    """Trace-test table: ``rows`` is a sequence of (label, JohansenResult
    or its to_dict())."""
    body = []
    for label, res in rows:
        d = res.to_dict() if isinstance(res, JohansenResult) else res
        for hyp in ("r=0", "r<=1"):
            cv = d["crit_values"][hyp]
            body.append(
                [
                    f"{label} {hyp}",
                    _fmt(d["trace_stats"][hyp], 2),
                    _fmt(cv[0], 2),
                    _fmt(cv[1], 2),
                    _fmt(cv[2], 2),
                    str(d["rank"]) if hyp == "r=0" else "",
                ]
            )
    return render_table(
        ("Hypothesis", "Trace", "10%", "5%", "1%", "Rank"),
        body,
        title="Cointegration trace tests",
    )


def mean_model_report(model) -> dict:
    """Coefficient report for a fitted mean model: per equation, ordered
    ect / lags / dummy / const, each with estimate, se and stars."""
    ordered = [n for n in model.names_ if n == "ect"]
    ordered += [n for n in model.names_ if n.startswith(("br.L", "us.L"))]
    ordered += [n for n in model.names_ if n == "dummy"]
    ordered += [n for n in model.names_ if n == "const"]
    out = {}
    for i, eq in enumerate(("br", "us")):
        eq_out = {}
        for name in ordered:
            j = model.names_.index(name)
            est = float(model.coef_[i, j])
            se = float(model.stderr_[i, j])
            t = est / se
            p = 2.0 * float(_st.t.sf(abs(t), model.df_resid_))
            eq_out[name] = {"estimate": est, "se": se, "stars": stars(p)}
        out[eq] = eq_out
    return out


def coefficient_table(entries) -> str:
    """Mean-model table: ``entries`` is a sequence of (label, report dict
    from mean_model_report)."""
    body = []
    for label, rep in entries:
        for eq, coefs in rep.items():
            for name, cell in coefs.items():
                body.append(
                    [
                        f"{label} {eq}",
                        name,
                        _fmt(cell["estimate"], 4),
                        f"({_fmt(cell['se'], 4)})",
                        cell["stars"],
                    ]
                )
    return render_table(
        ("Equation", "Term", "Estimate", "SE", ""),
        body,
        title="Mean-model coefficients",
    )


def bekk_report(fit: BekkGarch) -> dict:
    """Parameter report for a fitted BEKK model: 13 rows of estimate, se
    and stars (normal asymptotics)."""
    out = {}
    theta = fit.params_.theta
    for name, est, se in zip(THETA_NAMES, theta, fit.stderr_):
        if np.isfinite(se) and se > 0:
            p = 2.0 * float(_st.norm.sf(abs(est / se)))
            cell = {"estimate": float(est), "se": float(se), "stars": stars(p)}
        else:
            cell = {"estimate": float(est), "se": None, "stars": ""}
        out[name] = cell
    return out


def bekk_table(entries) -> str:
    """Covariance-model table: ``entries`` is a sequence of (label, report
    dict from bekk_report)."""
    body = []
    for label, rep in entries:
        for name in THETA_NAMES:
            cell = rep[name]
            se = cell["se"]
            body.append(
                [
                    label,
                    name,
                    _fmt(cell["estimate"], 4),
                    f"({_fmt(se, 4)})" if se is not None else "(NA)",
                    cell["stars"],
                ]
            )
    return render_table(
        ("Model", "Param", "Estimate", "SE", ""),
        body,
        title="Conditional covariance parameters",
    )
