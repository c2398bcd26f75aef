"""Trace test: independent eigenproblem oracle, rank decisions, recovery."""

import numpy as np
import pytest
import scipy.linalg

from conftest import business_days
from crossvol.cointegration import JohansenResult, critical_values, johansen_test
from crossvol.exceptions import DataError
from crossvol.series import AlignedPanel


def _panel(br, us, start="2010-01-04"):
    return AlignedPanel(dates=business_days(start, len(br)), br=br, us=us)


def simulate_vecm(
    seed,
    n=1000,
    alpha=(-0.05, 0.03),
    beta=(1.0, -1.07, 0.68),
    noise=0.01,
):
    """Cointegrated pair: z_t = beta'(y,1) error-corrects toward zero."""
    rng = np.random.default_rng(seed)
    y = np.empty((n, 2))
    y[0] = (-beta[1] * 1.4 - beta[2], 1.4)
    a = np.asarray(alpha)
    for t in range(1, n):
        z = beta[0] * y[t - 1, 0] + beta[1] * y[t - 1, 1] + beta[2]
        y[t] = y[t - 1] + a * z + noise * rng.standard_normal(2)
    return _panel(y[:, 0], y[:, 1])


def independent_random_walks(seed, n=500):
    rng = np.random.default_rng(seed)
    return _panel(
        0.01 * rng.standard_normal(n).cumsum(),
        0.01 * rng.standard_normal(n).cumsum(),
    )


class TestCriticalValues:
    def test_first_hypothesis_triple(self):
        assert critical_values("r=0") == (17.85, 19.96, 24.60)

    def test_second_hypothesis_triple_exact(self):
        assert critical_values("r<=1") == (7.52, 9.24, 12.97)
        assert critical_values("r≤1") == (7.52, 9.24, 12.97)

    def test_unknown_hypothesis(self):
        with pytest.raises(ValueError):
            critical_values("r=2")


class TestRankDecision:
    def test_reference_trace_pair_gives_rank_one(self):
        # the sequential rule on trace stats 22.65 / 2.14 at 5%:
        # 22.65 > 19.96 rejects r=0, 2.14 < 9.24 accepts r<=1
        res = JohansenResult(
            eigenvalues=np.array([0.02, 0.001]),
            trace_stats={"r=0": 22.65, "r<=1": 2.14},
            crit_values={"r=0": critical_values("r=0"), "r<=1": critical_values("r<=1")},
            rank=1,
            level=5,
            beta=np.array([1.0, -1.07, 0.68]),
            alpha=np.array([-0.008, 0.006]),
            lags=1,
            nobs=2434,
        )
        assert res.rank == 1

    def test_inconsistent_rank_rejected(self):
        with pytest.raises(DataError):
            JohansenResult(
                eigenvalues=np.array([0.02, 0.001]),
                trace_stats={"r=0": 22.65, "r<=1": 2.14},
                crit_values={
                    "r=0": critical_values("r=0"),
                    "r<=1": critical_values("r<=1"),
                },
                rank=0,
                level=5,
                beta=np.array([1.0, -1.07, 0.68]),
                alpha=np.array([-0.008, 0.006]),
                lags=1,
                nobs=2434,
            )


class TestAgainstIndependentEigensolve:
    @pytest.mark.parametrize("seed,lags", [(0, 1), (1, 2), (2, 3)])
    def test_eigenvalues_and_trace(self, seed, lags):
        p = simulate_vecm(seed, n=800)
        res = johansen_test(p, lags=lags)

        # independent construction: residual-based canonical correlations
        # computed with lstsq and a direct generalized eigensolve
        y = np.column_stack([p.br, p.us])
        dy = np.diff(y, axis=0)
        k = lags
        z0 = dy[k - 1 :]
        z1 = np.column_stack([y[k - 1 : -1], np.ones(len(z0))])
        if k > 1:
            z2 = np.column_stack([dy[k - 1 - j : -j] for j in range(1, k)])
            r0 = z0 - z2 @ np.linalg.lstsq(z2, z0, rcond=None)[0]
            r1 = z1 - z2 @ np.linalg.lstsq(z2, z1, rcond=None)[0]
        else:
            r0, r1 = z0, z1
        n = len(r0)
        s00 = r0.T @ r0 / n
        s01 = r0.T @ r1 / n
        s11 = r1.T @ r1 / n
        m = s01.T @ np.linalg.solve(s00, s01)
        eig = np.sort(np.real(scipy.linalg.eigvals(m, s11)))[::-1]

        assert res.nobs == n
        np.testing.assert_allclose(res.eigenvalues, eig[:2], atol=1e-10)
        trace0 = -n * np.sum(np.log(1 - eig[:2]))
        assert res.trace_stats["r=0"] == pytest.approx(trace0, rel=1e-10)

    def test_beta_alpha_recovery(self):
        p = simulate_vecm(7, n=3000)
        res = johansen_test(p, lags=1)
        assert res.rank >= 1
        assert res.beta[0] == 1.0
        assert res.beta[1] == pytest.approx(-1.07, abs=0.05)
        assert res.beta[2] == pytest.approx(0.68, abs=0.12)
        assert res.alpha[0] < 0 < res.alpha[1]


class TestRankOutcomes:
    def test_cointegrated_pair_detected(self):
        res = johansen_test(simulate_vecm(3, n=1200), lags=2)
        assert res.rank == 1

    def test_independent_walks_accept_null(self):
        res = johansen_test(independent_random_walks(5, n=600), lags=2)
        assert res.rank == 0

    def test_invariants(self):
        res = johansen_test(simulate_vecm(9, n=700), lags=2)
        assert 0.0 <= res.eigenvalues[1] <= res.eigenvalues[0] < 1.0
        assert res.trace_stats["r=0"] >= res.trace_stats["r<=1"] >= 0.0
        d = res.to_dict()
        assert d["rank"] == res.rank
        assert len(d["beta"]) == 3

    def test_deterministic(self):
        p = simulate_vecm(13, n=600)
        a = johansen_test(p, lags=2)
        b = johansen_test(p, lags=2)
        assert a.trace_stats == b.trace_stats

    def test_single_lag_has_no_difference_terms(self):
        res = johansen_test(simulate_vecm(15, n=400), lags=1)
        assert res.nobs == 399

    def test_too_short_sample(self):
        with pytest.raises(DataError):
            johansen_test(simulate_vecm(17, n=12), lags=4)
