"""Tests for the loss catalog and the zero-mean-score diagnostic."""

import math

import numpy as np
import pytest

from oos_infer.core.exceptions import DomainError
from oos_infer.losses import (
    LossKind,
    LossSpec,
    loss_gradient,
    loss_value,
    psi,
    score,
    score_scale,
    zero_mean_score_diagnostic,
)

ALL_KINDS = list(LossKind)


class TestLossValue:
    """Test l(y, m) against hand values."""

    def test_mspe(self):
        """MSPE at y=1, m=0 is 0.5."""
        assert loss_value(LossSpec(kind=LossKind.MSPE), 1.0, 0.0) == pytest.approx(0.5)

    def test_spe(self):
        """SPE drops the one-half factor."""
        assert loss_value(LossSpec(kind=LossKind.SPE), 3.0, 1.0) == pytest.approx(4.0)

    def test_cross_entropy_at_zero(self):
        """CE at y=0, m=0 is log 2."""
        assert loss_value(LossSpec(kind=LossKind.CROSS_ENTROPY), 0.0, 0.0) == pytest.approx(math.log(2.0))

    def test_cross_entropy_is_overflow_safe(self):
        """Large margins stay finite."""
        spec = LossSpec(kind=LossKind.CROSS_ENTROPY)
        assert loss_value(spec, 0.0, 1000.0) == pytest.approx(1000.0)
        assert loss_value(spec, 1.0, 1000.0) == pytest.approx(0.0, abs=1e-12)

    def test_covariance(self):
        """Covariance loss at y=1, m=3 is 6."""
        assert loss_value(LossSpec(kind=LossKind.COVARIANCE), 1.0, 3.0) == pytest.approx(6.0)

    def test_huber_branches(self):
        """Quadratic inside the kink, linear outside."""
        spec = LossSpec(kind=LossKind.HUBER, delta=1.0)
        assert loss_value(spec, 0.5, 0.0) == pytest.approx(0.125)
        assert loss_value(spec, 3.0, 0.0) == pytest.approx(2.5)

    def test_asmspe_weights(self):
        """alpha weights positive errors, beta negative ones."""
        spec = LossSpec(kind=LossKind.ASMSPE, alpha=2.0, beta=0.5)
        assert loss_value(spec, 1.0, 0.0) == pytest.approx(2.0)
        assert loss_value(spec, -1.0, 0.0) == pytest.approx(0.5)

    @pytest.mark.parametrize("weight", [0.25, 1.0, 3.0])
    def test_symmetric_asmspe_is_scaled_mspe(self, weight, rng):
        """alpha = beta gives 2 alpha times the MSPE loss."""
        y, m = rng.standard_normal(50), rng.standard_normal(50)
        asym = loss_value(LossSpec(kind=LossKind.ASMSPE, alpha=weight, beta=weight), y, m)
        mspe = loss_value(LossSpec(kind=LossKind.MSPE), y, m)
        np.testing.assert_allclose(asym, 2.0 * weight * mspe, rtol=1e-12)

    def test_logcosh_matches_definition(self):
        """log(cosh(e)) without overflow at large e."""
        spec = LossSpec(kind=LossKind.LOGCOSH)
        assert loss_value(spec, 0.7, 0.0) == pytest.approx(math.log(math.cosh(0.7)))
        assert loss_value(spec, 800.0, 0.0) == pytest.approx(800.0 - math.log(2.0))

    def test_vectorized(self):
        """Arrays are evaluated elementwise."""
        out = loss_value(LossSpec(kind=LossKind.MAD), np.array([1.0, -2.0]), np.zeros(2))
        np.testing.assert_allclose(out, [1.0, 2.0])

    def test_cross_entropy_requires_binary_target(self):
        """y outside {0, 1} is a domain error."""
        with pytest.raises(DomainError):
            loss_value(LossSpec(kind=LossKind.CROSS_ENTROPY), 0.5, 0.0)


class TestScore:
    """Test psi and its link to the loss derivative."""

    def test_huber_clips(self):
        """Huber delta=1 at eps=2 gives 1."""
        assert psi(LossSpec(kind=LossKind.HUBER, delta=1.0), 2.0) == pytest.approx(1.0)

    def test_logcosh_zero(self):
        """tanh(0) = 0."""
        assert psi(LossSpec(kind=LossKind.LOGCOSH), 0.0) == 0.0

    def test_cross_entropy(self):
        """y=1, m=0 gives 1 - Lambda(0) = 0.5."""
        assert score(LossSpec(kind=LossKind.CROSS_ENTROPY), 1.0, 0.0) == pytest.approx(0.5)

    def test_mad_indicator(self):
        """MAD score is 1{eps <= 0} - 1/2."""
        spec = LossSpec(kind=LossKind.MAD)
        np.testing.assert_allclose(psi(spec, np.array([-1.0, 0.0, 2.0])), [0.5, 0.5, -0.5])

    def test_covariance_score_is_target(self):
        """The covariance residual is y itself."""
        assert score(LossSpec(kind=LossKind.COVARIANCE), 2.0, 7.0) == pytest.approx(2.0)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_gradient_matches_finite_differences(self, kind, rng):
        """dl/dm equals score_scale * score at 100 points away from kinks."""
        spec = LossSpec(kind=kind, delta=1.0, alpha=2.0, beta=0.5)
        if kind is LossKind.CROSS_ENTROPY:
            y = rng.integers(0, 2, size=200).astype(float)
        else:
            y = rng.standard_normal(200)
        m = rng.standard_normal(200)
        e = y - m
        # keep away from non-differentiable points
        keep = (np.abs(e) > 1e-3) & (np.abs(np.abs(e) - 1.0) > 1e-3)
        y, m = y[keep][:100], m[keep][:100]
        assert y.size == 100

        h = 1e-5
        numeric = (loss_value(spec, y, m + h) - loss_value(spec, y, m - h)) / (2 * h)
        np.testing.assert_allclose(loss_gradient(spec, y, m), numeric, rtol=1e-6, atol=1e-9)
        np.testing.assert_allclose(score_scale(spec) * np.asarray(score(spec, y, m)), numeric, rtol=1e-6, atol=1e-9)


class TestLossSpec:
    """Test LossSpec construction by name."""

    def test_from_name(self):
        """Names are case-insensitive and accept dashes."""
        spec = LossSpec.from_name("Cross-Entropy")
        assert spec.kind is LossKind.CROSS_ENTROPY

    def test_from_name_with_params(self):
        """None parameters fall back to defaults."""
        spec = LossSpec.from_name("huber", delta=1.345, alpha=None)
        assert spec.delta == pytest.approx(1.345)
        assert spec.alpha == 1.0

    def test_unknown_name(self):
        """Unknown names list the known ones."""
        with pytest.raises(DomainError) as exc:
            LossSpec.from_name("hinge")
        assert "mspe" in exc.value.message

    def test_non_positive_delta(self):
        """Huber delta must be positive."""
        with pytest.raises(ValueError):
            LossSpec(kind=LossKind.HUBER, delta=0.0)


class TestZeroMeanScoreDiagnostic:
    """Test the zero-mean-score diagnostic."""

    def test_symmetric_residuals_cancel(self):
        """Residuals {-1, 1} under MSPE have zero mean score."""
        report = zero_mean_score_diagnostic(LossSpec(kind=LossKind.MSPE), [-1.0, 1.0])
        assert report.mean_score_norm == 0.0
        assert report.studentized == 0.0
        assert report.flagged is False

    def test_constant_residuals(self):
        """Residuals {1, 1} have mean score 1."""
        report = zero_mean_score_diagnostic(LossSpec(kind=LossKind.MSPE), [1.0, 1.0])
        assert report.mean_score_norm == pytest.approx(1.0)

    def test_empty_sample(self):
        """No residuals is a domain error."""
        with pytest.raises(DomainError):
            zero_mean_score_diagnostic(LossSpec(kind=LossKind.MSPE), [])

    def test_misaligned_weights(self):
        """Weights must have one row per residual."""
        with pytest.raises(DomainError):
            zero_mean_score_diagnostic(LossSpec(kind=LossKind.MSPE), [1.0, 2.0], np.ones((3, 2)))

    def test_mad_symmetric_sample_not_flagged(self, rng):
        """Median-zero symmetric residuals stay below the flag level."""
        eps = rng.standard_t(df=3, size=5000)
        report = zero_mean_score_diagnostic(LossSpec(kind=LossKind.MAD), eps)
        assert report.studentized < 3.0
        assert report.flagged is False

    def test_shifted_sample_flagged(self, rng):
        """A clear location shift is flagged under MSPE."""
        eps = rng.standard_normal(2000) + 0.5
        report = zero_mean_score_diagnostic(LossSpec(kind=LossKind.MSPE), eps)
        assert report.flagged is True

    def test_asmspe_is_not_flagged(self, rng):
        """ASMSPE carries no zero-mean guarantee, so no verdict is given."""
        eps = rng.standard_normal(100) + 1.0
        report = zero_mean_score_diagnostic(LossSpec(kind=LossKind.ASMSPE, alpha=2.0), eps)
        assert report.flagged is None

    def test_weighted_scores(self, rng):
        """Weights multiply the score coordinate-wise."""
        eps = rng.standard_normal(500)
        weights = np.column_stack([np.ones(500), eps])
        report = zero_mean_score_diagnostic(LossSpec(kind=LossKind.MSPE), eps, weights)
        # second coordinate is mean(eps^2) ~ 1
        assert report.mean_score_norm > 0.8
        assert report.flagged is True

    def test_small_sample_warns(self, caplog):
        """Fewer than 30 residuals logs a warning."""
        zero_mean_score_diagnostic(LossSpec(kind=LossKind.MSPE), [1.0, -1.0, 0.5])
        assert "unreliable" in caplog.text
