"""Shared fixtures: the bundled case-study portfolios and random generators.

The three clustered cases and the independent reference share one scale and
one factor shape so that every marginal is identical (index 2 * 1.67 = 3.34);
the cases differ only in how the four factor columns are wired, which is
exactly what the dependence-sensitive quantities (correlations, minima and
maxima laws, tail measures) respond to.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mvlomax.portfolio import ExposurePortfolio, build_portfolio

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

CASE_SIGMA = 122.39
CASE_GAMMA = 1.67

CASE_ROWS = {
    "case1": ((1, 1, 0, 0), (1, 1, 0, 0), (1, 1, 0, 0)),
    "case2": ((1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1)),
    "case3": ((1, 1, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0)),
}


def _case(name: str) -> ExposurePortfolio:
    return build_portfolio(
        CASE_ROWS[name], sigma=(CASE_SIGMA,) * 3, gamma=(CASE_GAMMA,) * 4)


@pytest.fixture(scope="session")
def case1() -> ExposurePortfolio:
    return _case("case1")


@pytest.fixture(scope="session")
def case2() -> ExposurePortfolio:
    return _case("case2")


@pytest.fixture(scope="session")
def case3() -> ExposurePortfolio:
    return _case("case3")


@pytest.fixture(scope="session")
def independent3() -> ExposurePortfolio:
    rows = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0))
    return build_portfolio(
        rows, sigma=(CASE_SIGMA,) * 3, gamma=(2.0 * CASE_GAMMA,) * 4)


@pytest.fixture(scope="session")
def case_quartet(case1, case2, case3, independent3):
    """The four case-study portfolios, keyed by the bundled scenario names."""
    return {
        "case1": case1,
        "case2": case2,
        "case3": case3,
        "independent": independent3,
    }


def random_portfolio(rng: np.random.Generator, n: int | None = None,
                     index_floor: float = 0.0) -> ExposurePortfolio:
    """A random valid portfolio; if index_floor > 0, the factor shapes are
    scaled up until every marginal tail index exceeds the floor."""
    if n is None:
        n = int(rng.integers(2, 6))
    while True:
        rows = (rng.random((n, n + 1)) < 0.45).astype(int)
        if rows.sum(axis=1).min() > 0:
            break
    sigma = rng.uniform(0.5, 200.0, size=n)
    gamma = rng.uniform(0.2, 3.0, size=n + 1)
    if index_floor > 0.0:
        low = min(build_portfolio(rows, sigma, gamma).marginal_indices)
        if low <= index_floor:
            gamma = gamma * (index_floor * float(rng.uniform(1.05, 1.8)) / low)
    return build_portfolio(rows, sigma, gamma)


@pytest.fixture
def make_portfolio():
    """Factory fixture for random portfolios (pass a seeded Generator)."""
    return random_portfolio
