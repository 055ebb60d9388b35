"""Tests for the linear learners, learner selection and the fast-rate diagnostic."""

import logging
import math

import numpy as np
import pytest

from oos_infer.core.exceptions import DomainError, InsufficientDataError, SingularDesignError
from oos_infer.learners import (
    BlockedCvConfig,
    LambdaRule,
    LearnerKind,
    LearnerOptions,
    fast_rate_diagnostic,
    fit_lasso,
    fit_learner,
    fit_ols,
    fit_ridge,
    lasso_penalty,
    linear_oracle,
    soft_threshold,
)
from oos_infer.series import DesignMatrix, split


def _column(x, y):
    return DesignMatrix.from_arrays(np.asarray(x, dtype=float)[:, None], y)


class TestOls:
    """Test fit_ols."""

    def test_exact_fit(self):
        """y = 2x is recovered exactly."""
        x = np.array([1.0, 2.0, 3.0, 4.0])
        model = fit_ols(_column(x, 2 * x))
        assert model.theta[0] == pytest.approx(2.0)
        assert model.learner_kind is LearnerKind.OLS

    def test_hand_normal_equations(self):
        """X = [1, 1]', Y = [1, 2]' gives 1.5."""
        model = fit_ols(_column([1.0, 1.0], [1.0, 2.0]))
        assert model.theta[0] == pytest.approx(1.5)

    def test_identical_columns(self, rng):
        """Duplicated regressors are singular."""
        x = rng.standard_normal(50)
        design = DesignMatrix.from_arrays(np.column_stack([x, x]), rng.standard_normal(50))
        with pytest.raises(SingularDesignError) as exc:
            fit_ols(design)
        assert "ridge" in exc.value.message

    def test_more_columns_than_rows(self, rng):
        """p >= R cannot be fitted by OLS."""
        design = DesignMatrix.from_arrays(rng.standard_normal((5, 8)), rng.standard_normal(5))
        with pytest.raises(SingularDesignError):
            fit_ols(design)

    def test_uses_training_rows_only(self, linear_design):
        """Test rows do not influence the estimate."""
        plan = split(200, R=150)
        full = fit_ols(linear_design.train(plan))
        model = fit_ols(linear_design, plan)
        np.testing.assert_allclose(model.theta, full.theta)

    def test_recovers_coefficients(self, linear_design):
        """Noise 0.1 leaves the estimate close to (1, 2, -1)."""
        model = fit_ols(linear_design)
        np.testing.assert_allclose(model.theta, [1.0, 2.0, -1.0], atol=0.05)
        assert model.column_names == ("const", "x1", "x2")


class TestRidge:
    """Test fit_ridge and blocked cross-validation."""

    def test_hand_value(self):
        """X = [1, 1]', Y = [1, 2]', lambda = 1 gives 0.75."""
        model = fit_ridge(_column([1.0, 1.0], [1.0, 2.0]), lam=1.0)
        assert model.theta[0] == pytest.approx(0.75)
        assert model.lambda_used == 1.0

    def test_zero_penalty_matches_ols(self, linear_design):
        """lambda = 0 reproduces OLS."""
        ridge = fit_ridge(linear_design, lam=0.0)
        ols = fit_ols(linear_design)
        np.testing.assert_allclose(ridge.theta, ols.theta, atol=1e-8)

    def test_heavy_shrinkage(self, rng):
        """A huge penalty drives the coefficients to zero."""
        X = rng.standard_normal((100, 4))
        design = DesignMatrix.from_arrays(X, X @ np.ones(4))
        model = fit_ridge(design, lam=1e9)
        assert np.linalg.norm(model.theta) < 1e-6

    def test_intercept_is_not_shrunk(self, linear_design):
        """With an intercept, heavy shrinkage leaves the target mean."""
        model = fit_ridge(linear_design, lam=1e9)
        assert model.theta[0] == pytest.approx(float(np.mean(linear_design.target)), abs=1e-4)
        np.testing.assert_allclose(model.theta[1:], 0.0, atol=1e-6)

    def test_negative_penalty(self, linear_design):
        """Negative lambda is a domain error."""
        with pytest.raises(DomainError):
            fit_ridge(linear_design, lam=-1.0)

    def test_needs_penalty_or_cv(self, linear_design):
        """Neither lambda nor CV config is an error."""
        with pytest.raises(DomainError):
            fit_ridge(linear_design)

    def test_handles_p_greater_than_r(self, rng):
        """Ridge fits when regressors outnumber rows."""
        X = rng.standard_normal((20, 60))
        model = fit_ridge(DesignMatrix.from_arrays(X, rng.standard_normal(20)), lam=0.1)
        assert np.all(np.isfinite(model.theta))

    def test_normal_equations_residual(self, linear_design):
        """(X'X / R + lambda D) theta = X'y / R with D leaving the intercept out."""
        lam = 0.3
        model = fit_ridge(linear_design, lam=lam)
        X = np.asarray(linear_design.rows)
        y = np.asarray(linear_design.target)
        R = X.shape[0]
        D = np.eye(X.shape[1])
        D[0, 0] = 0.0
        residual = (X.T @ X / R + lam * D) @ model.theta - X.T @ y / R
        assert np.max(np.abs(residual)) <= 1e-8

    def test_normal_equations_without_intercept(self, rng):
        """Without an intercept every coefficient is penalized."""
        X = rng.standard_normal((80, 5))
        y = X @ np.arange(1.0, 6.0) + rng.standard_normal(80)
        model = fit_ridge(DesignMatrix.from_arrays(X, y), lam=0.05)
        residual = (X.T @ X / 80 + 0.05 * np.eye(5)) @ model.theta - X.T @ y / 80
        assert np.max(np.abs(residual)) <= 1e-8

    def test_blocked_cv_picks_from_grid(self, linear_design):
        """The selected lambda lies on the grid and scores are recorded."""
        cv = BlockedCvConfig(k=2, grid=(0.001, 0.1, 10.0))
        model = fit_ridge(linear_design, cv=cv)
        assert model.lambda_used in cv.grid
        assert set(model.diagnostics.extra["cv_scores"]) == set(cv.grid)
        # a clean linear signal prefers the smallest penalty
        assert model.lambda_used == 0.001

    def test_blocked_cv_too_few_rows(self, rng):
        """Blocks with fewer than two training rows are unusable."""
        design = DesignMatrix.from_arrays(rng.standard_normal((4, 1)), rng.standard_normal(4))
        with pytest.raises(InsufficientDataError):
            fit_ridge(design, cv=BlockedCvConfig(k=4))

    def test_cv_grid_validation(self):
        """Empty or negative grids are rejected."""
        with pytest.raises(ValueError):
            BlockedCvConfig(grid=())
        with pytest.raises(ValueError):
            BlockedCvConfig(grid=(-1.0,))


class TestLasso:
    """Test coordinate-descent Lasso."""

    def test_soft_threshold(self):
        """S(x, t) = sign(x) max(|x| - t, 0)."""
        assert soft_threshold(3.0, 1.0) == 2.0
        assert soft_threshold(-3.0, 1.0) == -2.0
        assert soft_threshold(0.5, 1.0) == 0.0

    def test_single_regressor_fixed_point(self):
        """E[x^2] = 1, E[xy] = 1, lambda = 1 gives 0.5."""
        model = fit_lasso(_column([1.0, 1.0], [1.0, 1.0]), lam=1.0)
        assert model.theta[0] == pytest.approx(0.5)
        assert model.diagnostics.converged

    def test_threshold_exceeds_signal(self):
        """lambda = 3 zeroes the coefficient."""
        model = fit_lasso(_column([1.0, 1.0], [1.0, 1.0]), lam=3.0)
        assert model.theta[0] == 0.0

    def test_zero_penalty_matches_ols(self, rng):
        """lambda = 0 on a well-conditioned two-regressor design matches OLS."""
        X = rng.standard_normal((200, 2))
        design = DesignMatrix.from_arrays(X, X @ np.array([1.0, -0.5]) + 0.1 * rng.standard_normal(200))
        lasso = fit_lasso(design, lam=0.0, tol=1e-12)
        ols = fit_ols(design)
        np.testing.assert_allclose(lasso.theta, ols.theta, atol=1e-6)

    def test_kkt_holds_at_exit(self, rng):
        """Optimality conditions hold and the objective path never rises."""
        X = rng.standard_normal((150, 40))
        theta_0 = np.zeros(40)
        theta_0[:3] = [1.0, -1.0, 0.5]
        design = DesignMatrix.from_arrays(X, X @ theta_0 + rng.standard_normal(150))
        model = fit_lasso(design, lam=0.2)
        assert model.diagnostics.kkt_satisfied
        path = np.asarray(model.diagnostics.objective_path)
        assert np.all(np.diff(path) <= 1e-12 * np.maximum(1.0, np.abs(path[:-1])))

    def test_matches_grid_search(self):
        """Two-regressor fits agree with a brute-force grid minimum to 2e-3."""
        rng = np.random.default_rng(2024)
        for _ in range(20):
            n = 200
            X = rng.standard_normal((n, 2))
            y = X @ rng.uniform(-1.5, 1.5, size=2) + rng.standard_normal(n)
            lam = float(rng.uniform(0.05, 0.5))
            model = fit_lasso(DesignMatrix.from_arrays(X, y), lam=lam, tol=1e-12)

            G, b = X.T @ X / n, X.T @ y / n

            def objective(a, c):
                quad = G[0, 0] * a * a + 2.0 * G[0, 1] * a * c + G[1, 1] * c * c
                return quad - 2.0 * (b[0] * a + b[1] * c) + lam * (np.abs(a) + np.abs(c))

            coarse = np.arange(-3.0, 3.0 + 1e-9, 0.01)
            a, c = np.meshgrid(coarse, coarse, indexing="ij")
            i, j = np.unravel_index(np.argmin(objective(a, c)), a.shape)
            fine_a = coarse[i] + np.arange(-0.03, 0.03 + 1e-9, 5e-4)
            fine_c = coarse[j] + np.arange(-0.03, 0.03 + 1e-9, 5e-4)
            a, c = np.meshgrid(fine_a, fine_c, indexing="ij")
            i, j = np.unravel_index(np.argmin(objective(a, c)), a.shape)

            np.testing.assert_allclose(model.theta, [fine_a[i], fine_c[j]], atol=2e-3)

    def test_intercept_unpenalized(self, rng):
        """A large penalty keeps the intercept at the target mean."""
        n = 100
        X = np.column_stack([np.ones(n), rng.standard_normal(n)])
        y = 5.0 + 0.1 * rng.standard_normal(n)
        model = fit_lasso(DesignMatrix.from_arrays(X, y, has_intercept=True), lam=100.0)
        assert model.theta[0] == pytest.approx(float(np.mean(y)), abs=1e-6)
        assert model.theta[1] == 0.0

    def test_penalty_rule(self):
        """sqrt(log p / R), optionally scaled."""
        assert lasso_penalty(LambdaRule.SQRT_LOGP_OVER_R, p=100, R=400) == pytest.approx(math.sqrt(math.log(100) / 400))
        assert lasso_penalty(LambdaRule.SCALED, p=100, R=400, c=2.0) == pytest.approx(
            2.0 * math.sqrt(math.log(100) / 400)
        )

    def test_rule_uses_training_rows(self, rng):
        """The rule sees p columns and R estimation rows."""
        X = rng.standard_normal((100, 10))
        design = DesignMatrix.from_arrays(X, rng.standard_normal(100))
        plan = split(100, R=80)
        model = fit_lasso(design, plan, rule=LambdaRule.SQRT_LOGP_OVER_R)
        assert model.lambda_used == pytest.approx(math.sqrt(math.log(10) / 80))

    def test_non_convergence_is_reported(self, rng, caplog):
        """Running out of sweeps returns converged=False with a warning."""
        X = rng.standard_normal((50, 20))
        design = DesignMatrix.from_arrays(X, rng.standard_normal(50))
        with caplog.at_level(logging.WARNING):
            model = fit_lasso(design, lam=0.01, max_iter=1, tol=1e-14)
        assert not model.diagnostics.converged
        assert "did not converge" in caplog.text

    def test_negative_penalty(self, linear_design):
        """Negative lambda is a domain error."""
        with pytest.raises(DomainError):
            fit_lasso(linear_design, lam=-0.1)

    def test_needs_penalty_or_rule(self, linear_design):
        """Neither lambda nor rule is an error."""
        with pytest.raises(DomainError):
            fit_lasso(linear_design)


class TestFitLearner:
    """Test learner dispatch by options."""

    @pytest.mark.parametrize("kind", [LearnerKind.OLS, LearnerKind.RIDGE, LearnerKind.LASSO])
    def test_linear_kinds(self, kind, linear_design):
        """Each linear kind yields a model of that kind."""
        model = fit_learner(linear_design, None, LearnerOptions(kind=kind, lam=0.01))
        assert model.learner_kind is kind
        assert model.theta.size == 3

    def test_ridge_without_penalty_uses_cv(self, linear_design):
        """Ridge falls back to blocked cross-validation."""
        options = LearnerOptions(kind=LearnerKind.RIDGE, cv=BlockedCvConfig(grid=(0.5, 1.0)))
        model = fit_learner(linear_design, None, options)
        assert model.lambda_used in (0.5, 1.0)

    def test_lasso_without_penalty_uses_rule(self, linear_design):
        """Lasso falls back to the penalty rule."""
        model = fit_learner(linear_design, None, LearnerOptions(kind=LearnerKind.LASSO))
        assert model.lambda_used == pytest.approx(math.sqrt(math.log(3) / 200))


class TestFastRateDiagnostic:
    """Test the fast-rate quantity."""

    def test_exact_truth(self, linear_design):
        """theta_hat = theta_0 gives 0."""
        model = fit_ols(linear_design)
        oracle = linear_oracle(model.theta)
        assert fast_rate_diagnostic(model, oracle, linear_design) == 0.0

    def test_scaling(self, linear_design):
        """A constant offset c gives sqrt(P) c^2."""
        model = fit_ols(linear_design)
        shifted = linear_oracle(np.asarray(model.theta) + np.array([0.5, 0.0, 0.0]))
        value = fast_rate_diagnostic(model, shifted, linear_design, P=100)
        assert value == pytest.approx(10 * 0.25)

    def test_empty_test_set(self, linear_design):
        """No test rows is a domain error."""
        model = fit_ols(linear_design)
        empty = linear_design.subset(np.zeros(linear_design.n_rows, dtype=bool))
        with pytest.raises(DomainError):
            fast_rate_diagnostic(model, linear_oracle(model.theta), empty)
