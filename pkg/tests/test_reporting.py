"""Summary statistics, significance markers, and text-table rendering."""

import numpy as np
import pytest
from scipy import stats as st

from crossvol.cointegration import JohansenResult
from crossvol.exceptions import DataError
from crossvol.reporting import (
    bekk_table,
    cointegration_table,
    coefficient_table,
    render_table,
    stars,
    summary_stats,
    summary_table,
)


class TestSummaryStats:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_scipy_conventions(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.gamma(2.0, size=500)
        s = summary_stats(x)
        assert s["mean"] == pytest.approx(float(np.mean(x)), rel=1e-14)
        assert s["median"] == pytest.approx(float(np.median(x)), rel=1e-14)
        assert s["std_error"] == pytest.approx(float(st.sem(x)), rel=1e-12)
        assert s["skewness"] == pytest.approx(float(st.skew(x, bias=True)), rel=1e-12)
        assert s["excess_kurtosis"] == pytest.approx(
            float(st.kurtosis(x, fisher=True, bias=True)), rel=1e-12
        )
        assert s["n"] == 500

    def test_gaussian_shape_statistics_near_zero(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(100000)
        s = summary_stats(x)
        assert abs(s["skewness"]) < 0.05
        assert abs(s["excess_kurtosis"]) < 0.1

    def test_constant_sample_has_no_shape(self):
        s = summary_stats(np.full(50, 3.25))
        assert s["mean"] == 3.25
        assert s["skewness"] is None
        assert s["excess_kurtosis"] is None
        assert s["std_error"] == 0.0

    def test_single_observation(self):
        s = summary_stats([1.5])
        assert s["n"] == 1
        assert s["std_error"] is None

    def test_bad_input_rejected(self):
        with pytest.raises(DataError):
            summary_stats([])
        with pytest.raises(DataError):
            summary_stats(np.zeros((3, 2)))


class TestStars:
    @pytest.mark.parametrize(
        "p,mark",
        [
            (0.0009, "***"),
            (0.001, "**"),
            (0.005, "**"),
            (0.01, "*"),
            (0.03, "*"),
            (0.05, "."),
            (0.07, "."),
            (0.10, ""),
            (0.2, ""),
            (1.0, ""),
            (0.0, "***"),
        ],
    )
    def test_thresholds(self, p, mark):
        assert stars(p) == mark

    def test_out_of_range_is_blank(self):
        assert stars(float("nan")) == ""
        assert stars(-0.1) == ""
        assert stars(1.5) == ""


class TestRenderTable:
    def test_golden_layout(self):
        got = render_table(
            ("Name", "Value"),
            [["alpha", 1.5], ["b", -0.25]],
            title="Check",
        )
        expected = "\n".join(
            [
                "Check",
                "Name     Value",
                "-----  -------",
                "alpha   1.5000",
                "b      -0.2500",
            ]
        )
        assert got == expected

    def test_none_renders_na(self):
        got = render_table(("A", "B"), [["x", None]])
        assert got.splitlines()[-1].endswith("NA")


class TestAssembledTables:
    def test_summary_table_shape(self):
        rng = np.random.default_rng(4)
        rows = []
        for name in ("c1", "c2", "c3", "s1", "s2"):
            rows.append((f"{name} br", summary_stats(rng.standard_normal(100))))
            rows.append((f"{name} us", summary_stats(rng.standard_normal(100))))
        text = summary_table(rows)
        lines = text.splitlines()
        assert lines[0] == "Summary statistics"
        assert len(lines) == 3 + 10
        header = lines[1].split()
        assert header == [
            "Series", "Mean", "Median", "Std", "Error",
            "Skewness", "Ex", "Kurtosis", "N",
        ]

    def test_cointegration_table_rows(self):
        res = JohansenResult(
            eigenvalues=np.array([0.05, 0.002]),
            trace_stats={"r=0": 22.65, "r<=1": 2.14},
            crit_values={
                "r=0": (17.85, 19.96, 24.60),
                "r<=1": (7.52, 9.24, 12.97),
            },
            rank=1,
            level=5,
            beta=np.array([1.0, -1.07, 0.68]),
            alpha=np.array([-0.05, 0.03]),
            lags=2,
            nobs=400,
        )
        text = cointegration_table([("corn Post", res)])
        lines = text.splitlines()
        assert len(lines) == 3 + 2
        assert "corn Post r=0" in lines[3]
        assert "22.65" in lines[3]
        assert lines[3].rstrip().endswith("1")
        assert "corn Post r<=1" in lines[4]

    def test_coefficient_table_stars_column(self):
        rep = {
            "br": {"ect": {"estimate": -0.05, "se": 0.005, "stars": "***"}},
            "us": {"ect": {"estimate": 0.01, "se": 0.02, "stars": ""}},
        }
        text = coefficient_table([("corn Post (VECM)", rep)])
        lines = text.splitlines()
        assert len(lines) == 3 + 2
        assert "***" in lines[3]
        assert "(0.0050)" in lines[3]

    def test_bekk_table_na_for_missing_se(self):
        rep = {}
        names = (
            "mu1", "mu2", "c11", "c21", "c22",
            "a11", "a21", "a12", "a22",
            "b11", "b21", "b12", "b22",
        )
        for name in names:
            rep[name] = {"estimate": 0.1, "se": None, "stars": ""}
        text = bekk_table([("corn Post", rep)])
        lines = text.splitlines()
        assert len(lines) == 3 + 13
        assert all("(NA)" in line for line in lines[3:])
