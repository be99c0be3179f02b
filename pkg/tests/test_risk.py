"""Quantile and tail-expectation oracles.

Closed-form value-at-risk is checked by pushing it back through the
survival function, tail expectations against adaptive quadrature of
t + (1-q)^(-1) int_t^inf S, the cross-line economic variant against
quadrature of the conditional survival, and the weighted Monte Carlo
estimator against the closed forms it is meant to approximate.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from mvlomax import risk
from mvlomax.dist import conditional_ddf_gt, marginal_ddf, marginal_mean
from mvlomax.errors import (
    InfiniteMomentError,
    InputValidationError,
    NonConvergenceError,
)
from mvlomax.extremes import maxima_ddf, minima_ddf, minima_mixture
from mvlomax.portfolio import build_portfolio, preset
from mvlomax.risk import (
    QuantileGrid,
    cte_marginal,
    cte_maxima,
    cte_minima,
    economic_cte,
    risk_report,
    var_extreme,
    var_marginal,
    weighted_measure_mc,
)
from mvlomax.sim import sample_background_risk
from conftest import random_portfolio

LEVELS = (0.0, 0.5, 0.9, 0.99)


def _half_line_quad(f, scale, beta=8.0, epsrel=1e-11):
    # map [0, inf) onto (0, 1) by x = scale ((1-s)^-beta - 1)
    def g(s):
        x = scale * ((1.0 - s) ** (-beta) - 1.0)
        return f(x) * scale * beta * (1.0 - s) ** (-beta - 1.0)
    val, err = integrate.quad(g, 0.0, 1.0, epsabs=1e-14, epsrel=epsrel,
                              limit=200)
    return val


def test_marginal_var_inverts_the_survival():
    rng = np.random.default_rng(31)
    for _ in range(5):
        p = random_portfolio(rng)
        i = int(rng.integers(1, p.n + 1))
        assert var_marginal(p, i, 0.0) == 0.0
        for q in (0.1, 0.5, 0.9, 0.999):
            t = var_marginal(p, i, q)
            np.testing.assert_allclose(marginal_ddf(p, i, t), 1.0 - q,
                                       rtol=1e-12)


def test_marginal_var_monotone_in_level(case1):
    qs = np.linspace(0.0, 0.999, 40)
    vals = [var_marginal(case1, 2, q) for q in qs]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("q", [1.0, -0.1, math.nan, math.inf, 2.0])
def test_level_validation(case1, q):
    with pytest.raises(InputValidationError, match="level q"):
        var_marginal(case1, 1, q)
    with pytest.raises(InputValidationError, match="level q"):
        var_extreme(case1, "maxima", q)
    with pytest.raises(InputValidationError, match="level q"):
        economic_cte(case1, 1, 2, q)


def test_marginal_cte_at_zero_is_the_mean(case2):
    for i in (1, 2, 3):
        np.testing.assert_allclose(cte_marginal(case2, i, 0.0),
                                   marginal_mean(case2, i), rtol=1e-14)


def test_marginal_cte_matches_tail_quadrature(case1):
    rng = np.random.default_rng(32)
    portfolios = [case1, random_portfolio(rng, index_floor=1.3)]
    for p in portfolios:
        i = 1
        for q in LEVELS:
            t = var_marginal(p, i, q)
            integral = _half_line_quad(lambda u: marginal_ddf(p, i, t + u),
                                       p.sigma[i - 1])
            want = t + integral / (1.0 - q)
            got = cte_marginal(p, i, q)
            np.testing.assert_allclose(got, want, rtol=1e-7)
            assert got > t or q == 0.0


def test_marginal_cte_needs_mean():
    p = build_portfolio([[1, 0]], sigma=[1.0], gamma=[0.8, 0.9])
    with pytest.raises(InfiniteMomentError, match="mean"):
        cte_marginal(p, 1, 0.5)


def test_marginal_cte_cross_check_guard(case1, monkeypatch):
    monkeypatch.setattr(risk, "CROSS_CHECK_REL", -1.0)
    with pytest.raises(NonConvergenceError, match="cross-check"):
        cte_marginal(case1, 1, 0.9)


def test_extreme_var_inverts_the_survival():
    rng = np.random.default_rng(33)
    for _ in range(3):
        p = random_portfolio(rng)
        size = int(rng.integers(1, p.n + 1))
        subset = tuple(rng.choice(np.arange(1, p.n + 1), size=size,
                                  replace=False))
        assert var_extreme(p, subset, 0.0) == 0.0
        assert var_extreme(p, "maxima", 0.0) == 0.0
        for q in (0.5, 0.9, 0.999):
            root = var_extreme(p, subset, q)
            np.testing.assert_allclose(minima_ddf(p, subset, root), 1.0 - q,
                                       rtol=1e-10)
            root = var_extreme(p, "maxima", q)
            np.testing.assert_allclose(maxima_ddf(p, root), 1.0 - q,
                                       rtol=1e-10)


def test_extreme_var_bracket_cap(case1, monkeypatch):
    monkeypatch.setattr(risk, "BRACKET_CAP", 1)
    with pytest.raises(NonConvergenceError, match="failed to bracket"):
        var_extreme(case1, "maxima", 0.9999)


def test_unknown_target_raises(case1):
    with pytest.raises(InputValidationError, match="unknown target"):
        var_extreme(case1, "mediana", 0.5)


def test_minima_cte_matches_tail_quadrature(case1):
    mix = minima_mixture(case1, (1, 2))
    for q in LEVELS:
        t = var_extreme(case1, (1, 2), q)
        integral = _half_line_quad(lambda u: mix.survival(t + u), mix.scale)
        want = t + integral / (1.0 - q)
        np.testing.assert_allclose(cte_minima(case1, (1, 2), q), want,
                                   rtol=1e-6)


def test_maxima_cte_matches_tail_quadrature(case2):
    for q in LEVELS:
        t = var_extreme(case2, "maxima", q)
        integral = _half_line_quad(lambda u: maxima_ddf(case2, t + u),
                                   max(case2.sigma))
        want = t + integral / (1.0 - q)
        np.testing.assert_allclose(cte_maxima(case2, q), want, rtol=1e-6)


def test_maxima_cte_needs_every_marginal_mean():
    p = build_portfolio([[1, 0, 0], [0, 1, 0]], sigma=[1.0, 1.0],
                        gamma=[2.0, 0.9, 1.5])
    with pytest.raises(InfiniteMomentError, match="maximum has no mean"):
        cte_maxima(p, 0.5)


def test_scale_homogeneity():
    lam = 7.5
    rows = [[1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1]]
    gamma = [1.1, 0.9, 1.3, 1.2]
    p = build_portfolio(rows, sigma=[2.0, 5.0, 9.0], gamma=gamma)
    ps = build_portfolio(rows, sigma=[2.0 * lam, 5.0 * lam, 9.0 * lam],
                         gamma=gamma)
    q = 0.95
    pairs = [
        (var_marginal(p, 2, q), var_marginal(ps, 2, q)),
        (cte_marginal(p, 2, q), cte_marginal(ps, 2, q)),
        (var_extreme(p, (1, 3), q), var_extreme(ps, (1, 3), q)),
        (var_extreme(p, "maxima", q), var_extreme(ps, "maxima", q)),
        (cte_minima(p, (1, 3), q), cte_minima(ps, (1, 3), q)),
        (cte_maxima(p, q), cte_maxima(ps, q)),
        (economic_cte(p, 1, 3, q), economic_cte(ps, 1, 3, q)),
    ]
    for base, scaled in pairs:
        np.testing.assert_allclose(scaled, lam * base, rtol=5e-12)


def test_economic_cte_of_independent_pair_is_the_mean(independent3):
    for q in (0.0, 0.5, 0.99):
        assert (economic_cte(independent3, 1, 2, q)
                == marginal_mean(independent3, 1))


def test_economic_cte_at_zero_is_the_unconditional_mean(case3):
    for k, l in ((1, 2), (3, 1)):
        assert economic_cte(case3, k, l, 0.0) == marginal_mean(case3, k)


def test_economic_cte_matches_conditional_quadrature(case3):
    for k, l in ((1, 2), (2, 1), (1, 3)):
        for q in (0.5, 0.99):
            t = var_marginal(case3, l, q)
            want = _half_line_quad(
                lambda u: conditional_ddf_gt(case3, k, l, u, t),
                case3.sigma[k - 1])
            np.testing.assert_allclose(economic_cte(case3, k, l, q), want,
                                       rtol=1e-8)


def test_economic_cte_validation(case3):
    with pytest.raises(InputValidationError, match="distinct"):
        economic_cte(case3, 2, 2, 0.9)
    p = build_portfolio([[1, 1, 0], [1, 0, 1]], sigma=[1.0, 1.0],
                        gamma=[0.5, 0.4, 2.0])
    with pytest.raises(InfiniteMomentError, match="mean"):
        economic_cte(p, 1, 2, 0.9)


def test_quantile_grid():
    assert QuantileGrid.default().values == (0.90, 0.95, 0.99, 0.995)
    g = QuantileGrid.of([0.5, 0.9])
    assert g.values == (0.5, 0.9) and len(g) == 2
    assert list(g) == [0.5, 0.9]
    empty = QuantileGrid.of(())
    assert len(empty) == 0 and list(empty) == []
    with pytest.raises(InputValidationError, match="strictly increasing"):
        QuantileGrid.of((0.9, 0.5))
    with pytest.raises(InputValidationError, match="strictly increasing"):
        QuantileGrid.of((0.5, 0.5))
    with pytest.raises(InputValidationError, match="quantile level"):
        QuantileGrid.of((0.5, 1.0))
    with pytest.raises(InputValidationError, match="quantile level"):
        QuantileGrid.of((-0.2,))


def test_risk_report_labels_and_rows(case2):
    grid = QuantileGrid.of((0.5, 0.95))
    rep = risk_report(case2, 2, grid)
    assert rep.target == "marginal:2"
    assert rep.rows == tuple((q, var_marginal(case2, 2, q),
                              cte_marginal(case2, 2, q)) for q in grid)
    assert risk_report(case2, ("marginal", 2), grid).rows == rep.rows

    rep = risk_report(case2, (3, 1), grid)
    assert rep.target == "minima:1+3"
    assert rep.rows == tuple((q, var_extreme(case2, (1, 3), q),
                              cte_minima(case2, (1, 3), q)) for q in grid)

    assert risk_report(case2, "minima", grid).target == "minima:1+2+3"
    rep = risk_report(case2, "maxima", grid)
    assert rep.target == "maxima"
    assert rep.rows == tuple((q, var_extreme(case2, "maxima", q),
                              cte_maxima(case2, q)) for q in grid)

    assert risk_report(case2, 1, QuantileGrid.of(())).rows == ()


def test_risk_report_bad_target(case2):
    with pytest.raises(InputValidationError, match="unknown target"):
        risk_report(case2, "wat", QuantileGrid.default())


def test_weighted_indicator_reproduces_tail_expectation():
    p = build_portfolio([[1, 1]], sigma=[5.0], gamma=[1.2, 1.3])
    batch = sample_background_risk(p, 400_000, seed=7)
    x = batch.draws[:, 0]
    q = 0.9
    t = var_marginal(p, 1, q)
    est, se = weighted_measure_mc(x, lambda v: (v > t).astype(float))
    assert abs(est - cte_marginal(p, 1, q)) < 4.0 * se


def test_weighted_scalar_callable_falls_back_elementwise():
    p = build_portfolio([[1, 1]], sigma=[5.0], gamma=[1.2, 1.3])
    x = sample_background_risk(p, 20_000, seed=8).draws[:, 0]
    t = var_marginal(p, 1, 0.8)
    vec = weighted_measure_mc(x, lambda v: (v > t).astype(float))
    scalar = weighted_measure_mc(x, lambda v: 1.0 if v > t else 0.0)
    assert scalar == vec


def test_weighted_economic_mode_matches_closed_form(case3):
    batch = sample_background_risk(case3, 400_000, seed=11)
    q = 0.9
    t = var_marginal(case3, 2, q)
    samples = np.column_stack([batch.draws[:, 0], batch.draws[:, 1]])
    est, se = weighted_measure_mc(samples,
                                  lambda v: (v > t).astype(float),
                                  mode="economic")
    assert abs(est - economic_cte(case3, 1, 2, q)) < 4.0 * se


def test_weighted_measure_errors():
    x = np.array([1.0, 2.0, 3.0])
    with pytest.raises(InputValidationError, match="all weights are zero"):
        weighted_measure_mc(x, lambda v: np.zeros_like(v))
    with pytest.raises(InputValidationError, match="nonnegative"):
        weighted_measure_mc(x, lambda v: -np.ones_like(v))
    with pytest.raises(InputValidationError, match="callable"):
        weighted_measure_mc(x, 1.0)
    with pytest.raises(InputValidationError, match="at least 2"):
        weighted_measure_mc(np.array([1.0]), lambda v: np.ones_like(v))
    with pytest.raises(InputValidationError, match="unknown mode"):
        weighted_measure_mc(x, lambda v: v, mode="importance")
    with pytest.raises(InputValidationError, match=r"\(m, 2\)"):
        weighted_measure_mc(x, lambda v: v, mode="economic")
    with pytest.raises(InputValidationError, match="returned shape"):
        weighted_measure_mc(x, lambda v: np.ones(7))
    with pytest.raises(InputValidationError, match="finite"):
        weighted_measure_mc(np.array([1.0, math.inf]),
                            lambda v: np.ones_like(v))
