"""Shared fixtures for oos-infer tests."""

import numpy as np
import pytest

from oos_infer.series.models import DesignMatrix, Series


@pytest.fixture
def rng():
    """Seeded generator so every test sees the same draws."""
    return np.random.default_rng(12345)


@pytest.fixture
def linear_design(rng):
    """Well-conditioned 200 x 3 design with intercept: y = 1 + 2 x1 - x2 + noise."""
    n = 200
    X = np.column_stack([np.ones(n), rng.standard_normal(n), rng.standard_normal(n)])
    y = X @ np.array([1.0, 2.0, -1.0]) + 0.1 * rng.standard_normal(n)
    return DesignMatrix.from_arrays(X, y, column_names=("const", "x1", "x2"), has_intercept=True)


@pytest.fixture
def gaussian_series(rng):
    """400 iid standard normal observations."""
    return Series(values=rng.standard_normal(400), name="noise", frequency="simulated")


@pytest.fixture
def price_csv(tmp_path):
    """Small exchange-rate style file with a date column and two price columns."""
    path = tmp_path / "prices.csv"
    path.write_text(
        "date,close,open\n"
        "2020-01-01,1.0,2.0\n"
        "2020-01-02,1.5,2.5\n"
        "2020-01-03,1.2,2.1\n"
    )
    return path
