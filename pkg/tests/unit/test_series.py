"""Tests for series containers, splitting, features and CSV ingestion."""

import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from oos_infer.core.exceptions import (
    ConfigurationError,
    DataParseError,
    InsufficientDataError,
    InvalidSplitError,
    ValidationError,
)
from oos_infer.series import (
    DesignMatrix,
    FeatureConfig,
    Series,
    SplitPlan,
    Transform,
    build_features,
    build_from_config,
    ingest_csv,
    split,
    standardize,
)


class TestSeriesModel:
    """Test Series validation."""

    def test_series_is_read_only(self):
        """Stored values cannot be modified in place."""
        series = Series(values=[1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            series.values[0] = 5.0

    def test_series_rejects_short_input(self):
        """A single observation is not a series."""
        with pytest.raises(PydanticValidationError):
            Series(values=[1.0])

    def test_series_rejects_non_finite(self):
        """NaN and Inf never get past construction."""
        with pytest.raises(PydanticValidationError):
            Series(values=[1.0, float("nan"), 2.0])
        with pytest.raises(PydanticValidationError):
            Series(values=[1.0, float("inf")])


class TestSplit:
    """Test the fixed-scheme partition."""

    def test_eighty_twenty(self):
        """T=100, pi=0.25 gives R=80, P=20."""
        plan = split(100, pi=0.25)
        assert (plan.R, plan.P) == (80, 20)
        assert plan.pi == pytest.approx(0.25)
        assert plan.T == 100

    def test_equal_halves(self):
        """T=2000, pi=1 gives R=P=1000."""
        plan = split(2000, pi=1.0)
        assert (plan.R, plan.P) == (1000, 1000)

    def test_ties_round_down(self):
        """T=5, pi=1: T/(1+pi)=2.5 rounds down to R=2."""
        plan = split(5, pi=1.0)
        assert (plan.R, plan.P) == (2, 3)

    def test_split_from_series(self, gaussian_series):
        """A Series is split by its length."""
        plan = split(gaussian_series, pi=1.0)
        assert plan.R + plan.P == len(gaussian_series)

    def test_split_by_r(self):
        """R given directly."""
        plan = split(10, R=7)
        assert (plan.R, plan.P) == (7, 3)
        assert plan.pi == pytest.approx(3 / 7)

    def test_r_equal_to_t_is_invalid(self):
        """T=10, R=10 leaves no test set."""
        with pytest.raises(InvalidSplitError) as exc:
            split(10, R=10)
        assert exc.value.field == "R"

    @pytest.mark.parametrize("pi", [0.0, -1.0, float("inf"), float("nan")])
    def test_invalid_pi(self, pi):
        """Non-positive or non-finite pi is rejected and named."""
        with pytest.raises(InvalidSplitError) as exc:
            split(100, pi=pi)
        assert exc.value.field == "pi"

    def test_test_set_too_small(self):
        """P < 2 is an invalid split."""
        with pytest.raises(InvalidSplitError):
            split(10, R=9)

    def test_exactly_one_argument(self):
        """Both or neither of pi and R is an error."""
        with pytest.raises(InvalidSplitError):
            split(100)
        with pytest.raises(InvalidSplitError):
            split(100, pi=1.0, R=50)

    def test_split_is_deterministic(self):
        """Same (T, pi) always gives the same plan."""
        assert split(1234, pi=0.25) == split(1234, pi=0.25)

    def test_plan_ratio_must_match(self):
        """SplitPlan checks pi = P/R."""
        with pytest.raises(PydanticValidationError):
            SplitPlan(R=10, P=5, pi=1.0)


class TestBuildFeatures:
    """Test lag, interaction and power construction."""

    def test_full_feature_count(self):
        """30 lags, interactions and powers {2,3,4} give 556 columns."""
        series = Series(values=np.arange(100, dtype=float))
        design = build_features(series, lags=30, include_interactions=True, power_degrees=(2, 3, 4))
        assert design.n_columns == 556
        assert design.n_rows == 70

    def test_single_lag(self):
        """lags=1 without extras gives (intercept, Y_{t-1})."""
        series = Series(values=[1.0, 2.0, 4.0, 8.0])
        design = build_features(series, lags=1)
        assert design.column_names == ("const", "lag1")
        np.testing.assert_array_equal(design.rows, [[1, 1], [1, 2], [1, 4]])
        np.testing.assert_array_equal(design.target, [2, 4, 8])
        np.testing.assert_array_equal(design.target_index, [1, 2, 3])

    def test_two_lags_interactions_square(self):
        """lags=2, interactions, powers {2} give 6 named columns."""
        series = Series(values=[1.0, 2.0, 3.0, 5.0])
        design = build_features(series, lags=2, include_interactions=True, power_degrees=(2,))
        assert design.column_names == ("const", "lag1", "lag2", "lag1*lag2", "lag1^2", "lag2^2")
        # target Y_2 = 3 pairs with Y_1 = 2, Y_0 = 1
        np.testing.assert_array_equal(design.rows[0], [1, 2, 1, 2, 4, 1])
        assert design.target[0] == 3.0

    @pytest.mark.parametrize("lags", [1, 2, 5, 17, 40])
    @pytest.mark.parametrize("interactions", [False, True])
    @pytest.mark.parametrize("powers", [(), (2,), (2, 3, 4)])
    def test_column_count_formula(self, lags, interactions, powers):
        """Column count matches 1 + L + C(L,2) [interactions] + |powers| L."""
        series = Series(values=np.linspace(0.1, 1.0, lags + 5))
        design = build_features(series, lags=lags, include_interactions=interactions, power_degrees=powers)
        expected = 1 + lags + (math.comb(lags, 2) if interactions else 0) + len(powers) * lags
        assert design.n_columns == expected
        assert FeatureConfig(lags=lags, include_interactions=interactions, power_degrees=powers).n_columns == expected

    def test_no_leakage_from_future(self, rng):
        """Permuting observations after t never changes feature row t."""
        values = rng.standard_normal(60)
        t = 30
        shuffled = values.copy()
        shuffled[t:] = rng.permutation(values[t:])
        original = build_features(Series(values=values), lags=5, include_interactions=True, power_degrees=(2,))
        permuted = build_features(Series(values=shuffled), lags=5, include_interactions=True, power_degrees=(2,))
        row = int(np.flatnonzero(original.target_index == t)[0])
        np.testing.assert_array_equal(original.rows[row], permuted.rows[row])

    def test_series_too_short(self):
        """T < lags + 2 is an insufficient-data error."""
        with pytest.raises(InsufficientDataError) as exc:
            build_features(Series(values=[1.0, 2.0, 3.0]), lags=2)
        assert exc.value.required == 4

    def test_invalid_power(self):
        """Powers outside {2,3,4} are rejected."""
        with pytest.raises(ValidationError):
            build_features(Series(values=np.arange(10.0)), lags=2, power_degrees=(5,))

    def test_train_test_rows_follow_target_index(self):
        """Training rows have targets before R, test rows the P targets after."""
        series = Series(values=np.arange(20, dtype=float))
        design = build_features(series, lags=3)
        plan = split(20, R=12)
        assert design.train(plan).n_rows == 12 - 3
        test = design.test(plan)
        assert test.n_rows == plan.P
        np.testing.assert_array_equal(test.target, np.arange(12, 20, dtype=float))


class TestStandardize:
    """Test training-row standardization."""

    def test_uses_training_statistics(self):
        """Training rows end with mean 0 and sd 1; intercept untouched."""
        rows = np.column_stack([np.ones(10), np.arange(10.0), np.full(10, 3.0)])
        design = DesignMatrix.from_arrays(rows, np.zeros(10), has_intercept=True)
        plan = split(10, R=6)
        scaled = standardize(design, plan)
        train = scaled.rows[:6]
        np.testing.assert_allclose(train[:, 1].mean(), 0.0, atol=1e-12)
        np.testing.assert_allclose(train[:, 1].std(), 1.0)
        np.testing.assert_array_equal(scaled.rows[:, 0], 1.0)
        np.testing.assert_array_equal(scaled.rows[:, 2], 3.0)

    def test_build_from_config_standardizes(self, gaussian_series):
        """FeatureConfig.standardize routes through standardize."""
        config = FeatureConfig(lags=2, include_interactions=False, power_degrees=(), standardize=True)
        plan = split(gaussian_series, pi=1.0)
        design = build_from_config(gaussian_series, config, plan)
        train = design.train(plan)
        np.testing.assert_allclose(train.rows[:, 1:].mean(axis=0), 0.0, atol=1e-12)


class TestIngestCsv:
    """Test CSV ingestion."""

    def test_increments(self, price_csv):
        """prices [1.0, 1.5, 1.2] become [0.5, -0.3]."""
        series = ingest_csv(price_csv, "close")
        np.testing.assert_allclose(series.values, [0.5, -0.3])
        assert series.metadata["transform"] == "increments"
        assert series.metadata["first_date"] == "2020-01-01"
        assert series.metadata["last_date"] == "2020-01-03"

    def test_log_returns(self, tmp_path):
        """prices [1, e, e^2] give log returns [1, 1]."""
        path = tmp_path / "exp.csv"
        path.write_text(f"date,p\na,1\nb,{math.e!r}\nc,{math.e ** 2!r}\n")
        series = ingest_csv(path, "p", transform=Transform.LOG_RETURNS)
        np.testing.assert_allclose(series.values, [1.0, 1.0])

    def test_column_by_index(self, price_csv):
        """Columns may be given by zero-based index."""
        series = ingest_csv(price_csv, 2, transform="none")
        np.testing.assert_allclose(series.values, [2.0, 2.5, 2.1])
        assert series.name == "open"

    def test_header_only(self, tmp_path):
        """A file without data rows is a parse error."""
        path = tmp_path / "empty.csv"
        path.write_text("date,close\n")
        with pytest.raises(DataParseError):
            ingest_csv(path, "close")

    def test_non_numeric_cell(self, tmp_path):
        """The parse error names the offending row."""
        path = tmp_path / "bad.csv"
        path.write_text("date,close\na,1.0\nb,oops\nc,1.2\n")
        with pytest.raises(DataParseError) as exc:
            ingest_csv(path, "close")
        assert exc.value.row == 1
        assert exc.value.column == "close"

    def test_missing_cell_is_not_imputed(self, tmp_path):
        """Empty cells are parse errors."""
        path = tmp_path / "gap.csv"
        path.write_text("date,close\na,1.0\nb,\nc,1.2\n")
        with pytest.raises(DataParseError):
            ingest_csv(path, "close")

    def test_missing_file(self, tmp_path):
        """A missing file is a configuration error on 'input'."""
        with pytest.raises(ConfigurationError) as exc:
            ingest_csv(tmp_path / "nope.csv", "close")
        assert exc.value.config_field == "input"

    def test_unknown_column(self, price_csv):
        """An unknown column is a configuration error on 'column'."""
        with pytest.raises(ConfigurationError) as exc:
            ingest_csv(price_csv, "high")
        assert exc.value.config_field == "column"

    def test_constant_series_warns(self, tmp_path, caplog):
        """A constant series after the transform logs a warning."""
        path = tmp_path / "flat.csv"
        path.write_text("date,close\na,1\nb,2\nc,3\nd,4\n")
        with caplog.at_level(logging.WARNING):
            series = ingest_csv(path, "close")
        np.testing.assert_allclose(series.values, [1.0, 1.0, 1.0])
        assert "constant" in caplog.text

    def test_log_returns_need_positive_prices(self, tmp_path):
        """Non-positive prices cannot be log-differenced."""
        path = tmp_path / "neg.csv"
        path.write_text("date,p\na,1\nb,0\nc,2\n")
        with pytest.raises(DataParseError) as exc:
            ingest_csv(path, "p", transform="log_returns")
        assert exc.value.row == 1
