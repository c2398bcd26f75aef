"""Maximum-likelihood estimation: recovery, convergence reporting, simulation."""

import numpy as np
import pytest

from conftest import (
    DIAGONAL_PARAMS,
    HAND_PARAMS,
    HAND_RHO,
    HAND_UNCOND,
    PERSISTENT_PARAMS,
)
from crossvol.bekk import THETA_NAMES, BekkGarch, BekkParams, simulate
from crossvol.exceptions import ConvergenceError, DataError, ExplosiveParameterError


def normalized(theta):
    """Apply the estimator's sign convention to a truth vector for comparison."""
    out = np.asarray(theta, dtype=np.float64).copy()
    if out[2] < 0.0:
        out[2:5] = -out[2:5]
    if out[4] < 0.0:
        out[4] = -out[4]
    if out[5] < 0.0:
        out[5:9] = -out[5:9]
    if out[9] < 0.0:
        out[9:13] = -out[9:13]
    return out


@pytest.fixture(scope="module")
def recovery_fit():
    e = simulate(PERSISTENT_PARAMS, n=4000, seed=42)
    model = BekkGarch().fit(e)
    return model, e


class TestRecovery:
    def test_parameters_recovered(self, recovery_fit):
        model, _ = recovery_fit
        truth = normalized(PERSISTENT_PARAMS.theta)
        est = model.params_.theta
        se = model.stderr_
        assert model.stderr_ok_
        for i, name in enumerate(THETA_NAMES):
            tol = max(0.10, 3.0 * se[i])
            assert abs(est[i] - truth[i]) < tol, (
                f"{name}: estimate {est[i]:.4f}, truth {truth[i]:.4f}, "
                f"tolerance {tol:.4f}"
            )

    def test_sign_convention_after_fit(self, recovery_fit):
        model, _ = recovery_fit
        p = model.params_
        assert p.c[0, 0] >= 0.0
        assert p.c[1, 1] >= 0.0
        assert p.a[0, 0] >= 0.0
        assert p.b[0, 0] >= 0.0

    def test_convergence_report(self, recovery_fit):
        model, _ = recovery_fit
        assert model.converged_
        assert model.require_convergence() is model
        assert model.n_iter_ >= 1
        assert np.isfinite(model.loglik_)
        assert len(model.path_) == model.nobs_ == 4000

    def test_history_climbs(self, recovery_fit):
        model, _ = recovery_fit
        diffs = np.diff(model.ll_history_)
        assert np.all(diffs > -1e-6)
        assert model.ll_history_[-1] > model.ll_history_[0]
        assert model.loglik_ == pytest.approx(model.ll_history_[-1], abs=1e-6)

    def test_fitted_radius_stationary(self, recovery_fit):
        model, _ = recovery_fit
        assert model.params_.spectral_radius() < 1.0

    def test_to_dict_round_trip(self, recovery_fit):
        model, _ = recovery_fit
        d = model.to_dict()
        assert tuple(d["params"].keys()) == THETA_NAMES
        assert d["converged"] is True
        assert d["nobs"] == 4000
        np.testing.assert_allclose(
            [d["params"][n] for n in THETA_NAMES], model.params_.theta, atol=0
        )

    def test_cross_terms_vanish_on_diagonal_truth(self):
        e = simulate(DIAGONAL_PARAMS, n=3000, seed=7)
        model = BekkGarch().fit(e)
        est = model.params_
        se = model.stderr_
        assert model.stderr_ok_
        for value, i in (
            (est.a[1, 0], THETA_NAMES.index("a21")),
            (est.a[0, 1], THETA_NAMES.index("a12")),
            (est.b[1, 0], THETA_NAMES.index("b21")),
            (est.b[0, 1], THETA_NAMES.index("b12")),
        ):
            assert abs(value) < 4.0 * se[i]


class TestStandardErrors:
    def test_calibration_over_replications(self):
        hits = np.zeros(13)
        usable = 0
        truth = normalized(PERSISTENT_PARAMS.theta)
        for rep in range(30):
            e = simulate(PERSISTENT_PARAMS, n=1200, seed=1000 + rep)
            model = BekkGarch().fit(e)
            if not (model.converged_ and model.stderr_ok_):
                continue
            usable += 1
            z = (model.params_.theta - truth) / model.stderr_
            hits += (np.abs(z) <= 3.0).astype(np.float64)
        assert usable >= 25
        coverage = hits / usable
        assert np.mean(coverage) >= 0.90
        assert np.all(coverage >= 0.6)


class TestFitGuards:
    def test_short_sample_rejected(self):
        e = simulate(PERSISTENT_PARAMS, n=249, seed=0)
        with pytest.raises(DataError, match="too short"):
            BekkGarch().fit(e)

    def test_constant_column_rejected(self):
        e = np.column_stack([np.full(300, 0.01), np.linspace(-0.1, 0.1, 300)])
        with pytest.raises(DataError, match="zero variance"):
            BekkGarch().fit(e)

    def test_iteration_cap_trips_convergence_error(self):
        e = simulate(PERSISTENT_PARAMS, n=400, seed=3)
        model = BekkGarch(max_iter=1, compute_se=False).fit(e)
        assert not model.converged_
        with pytest.raises(ConvergenceError, match="did not converge"):
            model.require_convergence()

    def test_estimator_protocol(self):
        model = BekkGarch(max_iter=500, gtol=1e-6)
        params = model.get_params()
        assert params["max_iter"] == 500
        assert params["gtol"] == 1e-6
        assert set(params) == {"max_iter", "gtol", "ftol", "start", "h0", "compute_se"}


class TestSimulate:
    def test_reproducible_and_seed_sensitive(self):
        a = simulate(PERSISTENT_PARAMS, n=500, seed=5)
        b = simulate(PERSISTENT_PARAMS, n=500, seed=5)
        c = simulate(PERSISTENT_PARAMS, n=500, seed=6)
        np.testing.assert_array_equal(a, b)
        assert np.any(a != c)
        assert a.shape == (500, 2)

    def test_explosive_parameters_refused(self):
        bad = BekkParams(
            mu=[0.0, 0.0],
            c=[[0.1, 0.0], [0.0, 0.1]],
            a=0.6 * np.eye(2),
            b=0.9 * np.eye(2),
        )
        assert bad.spectral_radius() >= 1.0
        with pytest.raises(ExplosiveParameterError):
            simulate(bad, n=100, seed=0)
        with pytest.raises(ExplosiveParameterError):
            bad.unconditional_covariance()

    def test_long_run_moments_match_fixed_point(self):
        assert HAND_PARAMS.spectral_radius() == pytest.approx(HAND_RHO, abs=1e-12)
        np.testing.assert_allclose(
            HAND_PARAMS.unconditional_covariance(), HAND_UNCOND, atol=1e-12
        )
        e = simulate(HAND_PARAMS, n=200000, seed=8)
        eps = e - HAND_PARAMS.mu
        cov = eps.T @ eps / e.shape[0]
        np.testing.assert_allclose(np.diag(cov), np.diag(HAND_UNCOND), rtol=0.10)
        assert abs(cov[0, 1] - HAND_UNCOND[0, 1]) < 0.05

    def test_mean_offset_applied(self):
        e = simulate(PERSISTENT_PARAMS, n=50000, seed=13)
        np.testing.assert_allclose(e.mean(axis=0), PERSISTENT_PARAMS.mu, atol=5e-4)


class TestParams:
    def test_theta_round_trip(self):
        p = BekkParams.from_theta(PERSISTENT_PARAMS.theta)
        np.testing.assert_array_equal(p.mu, PERSISTENT_PARAMS.mu)
        np.testing.assert_array_equal(p.a, PERSISTENT_PARAMS.a)
        np.testing.assert_array_equal(p.b, PERSISTENT_PARAMS.b)
        np.testing.assert_array_equal(p.c, PERSISTENT_PARAMS.c)

    def test_upper_triangular_intercept_rejected(self):
        with pytest.raises(DataError, match="lower-triangular"):
            BekkParams(
                mu=[0.0, 0.0],
                c=[[0.1, 0.2], [0.0, 0.1]],
                a=np.zeros((2, 2)),
                b=np.zeros((2, 2)),
            )

    def test_theta_length_checked(self):
        with pytest.raises(DataError, match="13"):
            BekkParams.from_theta(np.zeros(12))
