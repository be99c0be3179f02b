"""Value-at-risk and conditional tail expectations.

Marginals are Pareto-II(sigma_i, g*_i), so their quantiles invert in closed
form, VaR_q = sigma ((1-q)^(-1/g*) - 1), and the conditional tail
expectation follows from the stop-loss identity

    CTE_q[X] = t + (1-q)^(-1) int_t^inf S(x) dx,   t = VaR_q[X],

whose integral is again Pareto shaped: int_t^inf (1+x/sigma)^(-g) dx
= sigma/(g-1) (1+t/sigma)^(-(g-1)), i.e. the mean times the survival of a
companion Pareto-II with shape g-1 (a change of measure that tilts the tail
one unit heavier). Both the direct reduction E + t g/(g-1) and the
change-of-measure line are computed and cross-checked.

Minima are Pareto shape mixtures, so the same identity applies weight by
weight; maxima quantiles come from bracketing plus Brent root finding on the
inclusion-exclusion survival, and their tail expectations reuse the subset
stop-loss integrals (no division by small subset survivals is needed since
the t (1-q) terms collapse across the alternating sum).

The economic variant E[X_k | X_l > VaR_q[X_l]] conditions one line on the
distress of another. Dividing the pair survival by the conditioning marginal
and integrating gives

    sigma_k/(g*_k - 1) 2F1(shared, 1; g*_k; z),   z = t/(sigma_l + t),

with shared the total shape of the factors hitting both lines; shared = 0
recovers the unconditional mean exactly.

weighted_measure_mc is the matching simulation estimator: a ratio estimate
sum(x w)/sum(w) with a delta-method standard error, usable with indicator
weights (tail conditioning) or any other nonnegative weight function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import optimize

from .dist import marginal_mean
from .errors import (InfiniteMomentError, InputValidationError,
                     NonConvergenceError)
from .extremes import (DEFAULT_MASS_EPS, maxima_ddf, minima_ddf,
                       minima_mixture, _subset_key)
from .portfolio import ExposurePortfolio, _check_coordinate, pair_decomposition
from .specfun import gauss_2f1

BRACKET_CAP = 4000
CROSS_CHECK_REL = 1e-12


@dataclass(frozen=True)
class QuantileGrid:
    """Strictly increasing quantile levels, each in [0, 1). May be empty."""

    values: tuple[float, ...]

    def __post_init__(self):
        for q in self.values:
            if not (math.isfinite(q) and 0.0 <= q < 1.0):
                raise InputValidationError(
                    f"quantile level must lie in [0, 1), got {q}")
        for lo, hi in zip(self.values, self.values[1:]):
            if not lo < hi:
                raise InputValidationError(
                    f"quantile levels must be strictly increasing, "
                    f"got {lo} before {hi}")

    @classmethod
    def of(cls, values) -> "QuantileGrid":
        return cls(tuple(float(q) for q in values))

    @classmethod
    def default(cls) -> "QuantileGrid":
        return cls.of((0.90, 0.95, 0.99, 0.995))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class RiskReport:
    """Rows of (level, value-at-risk, conditional tail expectation) for one
    target, labelled marginal:i, minima:i+j+..., or maxima."""

    target: str
    rows: tuple[tuple[float, float, float], ...]


def _check_level(q) -> float:
    q = float(q)
    if not (math.isfinite(q) and 0.0 <= q < 1.0):
        raise InputValidationError(f"level q must lie in [0, 1), got {q}")
    return q


def var_marginal(p: ExposurePortfolio, i: int, q) -> float:
    """VaR_q of coordinate i (1-based): sigma ((1-q)^(-1/g*) - 1)."""
    _check_coordinate(p, i)
    q = _check_level(q)
    g = p.marginal_indices[i - 1]
    return p.sigma[i - 1] * math.expm1(-math.log1p(-q) / g)


def cte_marginal(p: ExposurePortfolio, i: int, q) -> float:
    """CTE_q of coordinate i; needs marginal index above 1.

    Computed two ways, direct reduction and change of measure, which must
    agree to near machine precision.
    """
    q = _check_level(q)
    mean = marginal_mean(p, i)
    g = p.marginal_indices[i - 1]
    t = var_marginal(p, i, q)
    direct = mean + t * g / (g - 1.0)
    tilted = t + mean * math.exp(
        -(g - 1.0) * math.log1p(t / p.sigma[i - 1])) / (1.0 - q)
    if abs(direct - tilted) > CROSS_CHECK_REL * abs(direct):
        raise NonConvergenceError(
            f"tail expectation cross-check failed for coordinate {i} at "
            f"q={q}: {direct!r} vs {tilted!r}")
    return tilted


def _target_label_and_survival(p: ExposurePortfolio, target, eps: float):
    if isinstance(target, str):
        kind = target.strip().lower()
        if kind == "maxima":
            return "maxima", lambda x: maxima_ddf(p, x, eps=eps)
        if kind == "minima":
            subset = tuple(range(1, p.n + 1))
        else:
            raise InputValidationError(
                f"unknown target {target!r}; use 'maxima', 'minima', or a "
                f"coordinate subset")
    else:
        subset = _subset_key(target)
        for i in subset:
            _check_coordinate(p, i)
    label = "minima:" + "+".join(str(i) for i in subset)
    return label, lambda x: minima_ddf(p, subset, x, eps=eps)


def var_extreme(p: ExposurePortfolio, target, q,
                eps: float = DEFAULT_MASS_EPS) -> float:
    """VaR_q of the portfolio maximum or of a subset minimum.

    target is 'maxima', 'minima', or an iterable of 1-based coordinates
    (a subset minimum). Solved by bracketing and Brent's method on the
    survival function.
    """
    q = _check_level(q)
    _, survival = _target_label_and_survival(p, target, eps)
    if q == 0.0:
        return 0.0
    level = 1.0 - q
    hi = max(p.sigma)
    for _ in range(BRACKET_CAP):
        if survival(hi) < level:
            break
        hi *= 2.0
        if not math.isfinite(hi):
            raise NonConvergenceError(
                f"quantile q={q} lies beyond floating range for this target")
    else:
        raise NonConvergenceError(
            f"failed to bracket the q={q} quantile after {BRACKET_CAP} "
            f"doublings")
    root = optimize.brentq(lambda x: survival(x) - level, 0.0, hi,
                           xtol=1e-14, rtol=1e-12)
    return float(root)


def cte_minima(p: ExposurePortfolio, subset, q,
               eps: float = DEFAULT_MASS_EPS) -> float:
    """CTE_q of the minimum over a coordinate subset; needs the active
    total shape above 1."""
    q = _check_level(q)
    mix = minima_mixture(p, subset, eps=eps)
    t = var_extreme(p, subset, q, eps=eps)
    return t + mix.stop_loss(t) / (1.0 - q)


def cte_maxima(p: ExposurePortfolio, q,
               eps: float = DEFAULT_MASS_EPS) -> float:
    """CTE_q of the portfolio maximum via subset stop-loss integrals.

    Finite whenever every marginal index exceeds 1 (larger subsets only
    accumulate more shape, so the singletons are the binding case).
    """
    q = _check_level(q)
    for i in range(1, p.n + 1):
        g = p.marginal_indices[i - 1]
        if not g > 1.0:
            raise InfiniteMomentError(
                f"maximum has no mean: coordinate {i} has marginal index "
                f"{g:.6g} <= 1")
    t = var_extreme(p, "maxima", q, eps=eps)
    terms = []
    for size in range(1, p.n + 1):
        sign = 1.0 if size % 2 else -1.0
        for subset in combinations(range(1, p.n + 1), size):
            terms.append(sign * minima_mixture(p, subset, eps=eps).stop_loss(t))
    return t + math.fsum(terms) / (1.0 - q)


def economic_cte(p: ExposurePortfolio, k: int, l: int, q,
                 eps: float = 1e-14) -> float:
    """E[X_k | X_l > VaR_q[X_l]]: expected loss on line k while line l is in
    distress. Needs the index of k above 1; independence (no shared factor)
    returns the unconditional mean exactly."""
    _check_coordinate(p, k)
    _check_coordinate(p, l)
    if k == l:
        raise InputValidationError(
            f"economic tail expectation needs two distinct coordinates, "
            f"got k = l = {k}")
    q = _check_level(q)
    mean_k = marginal_mean(p, k)
    t = var_marginal(p, l, q)
    z = t / (p.sigma[l - 1] + t)
    pair = pair_decomposition(p, k, l)
    g_k = p.marginal_indices[k - 1]
    factor = gauss_2f1(pair.shared, 1.0, g_k, z, eps=eps)
    return mean_k * factor.value


def _ratio_estimate(x: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """sum(x w)/sum(w) with a delta-method standard error."""
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(w)):
        raise InputValidationError("samples and weights must be finite")
    if np.any(w < 0.0):
        raise InputValidationError("weights must be nonnegative")
    total = float(np.sum(w))
    if total == 0.0:
        raise InputValidationError(
            "all weights are zero; the weighted law is undefined")
    ratio = float(np.dot(x, w)) / total
    m = x.size
    base = total / m
    cov = np.cov(x * w, w, ddof=1)
    var_num = float(cov[0, 0] - 2.0 * ratio * cov[0, 1]
                    + ratio * ratio * cov[1, 1])
    se = math.sqrt(max(0.0, var_num) / m) / base
    return ratio, se


def weighted_measure_mc(samples, weight, mode: str = "self-weighted"
                        ) -> tuple[float, float]:
    """Weighted-premium estimate E[X w(.)]/E[w(.)] with standard error.

    In 'self-weighted' mode samples is a flat array of losses and the weight
    function is applied to the losses themselves; in 'economic' mode samples
    is an (m, 2) array of (loss, driver) pairs and the weight is applied to
    the driver column. weight maps reals to nonnegative reals; an indicator
    weight reproduces the tail expectations. Returns (estimate, se).
    """
    arr = np.asarray(samples, dtype=float)
    if mode == "self-weighted":
        x = arr.ravel()
        driver = x
    elif mode == "economic":
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InputValidationError(
                f"economic mode needs an (m, 2) array of (loss, driver) "
                f"pairs, got shape {arr.shape}")
        x = arr[:, 0]
        driver = arr[:, 1]
    else:
        raise InputValidationError(
            f"unknown mode {mode!r}; use 'self-weighted' or 'economic'")
    if x.size < 2:
        raise InputValidationError(
            f"need at least 2 draws for a standard error, got {x.size}")
    if not callable(weight):
        raise InputValidationError("weight must be a callable on reals")
    try:
        w = np.asarray(weight(driver), dtype=float)
    except Exception:
        w = np.fromiter((float(weight(t)) for t in driver), dtype=float,
                        count=driver.size)
    if w.shape != driver.shape:
        raise InputValidationError(
            f"weight function returned shape {w.shape}, expected "
            f"{driver.shape}")
    return _ratio_estimate(x, w)


def risk_report(p: ExposurePortfolio, target, grid: QuantileGrid,
                eps: float = DEFAULT_MASS_EPS) -> RiskReport:
    """VaR and CTE rows over a quantile grid for one target.

    target is ('marginal', i), an int i (same thing), 'maxima', 'minima',
    or an iterable of coordinates (a subset minimum).
    """
    if isinstance(target, int):
        target = ("marginal", target)
    if (isinstance(target, tuple) and len(target) == 2
            and target[0] == "marginal"):
        i = target[1]
        _check_coordinate(p, i)
        label = f"marginal:{i}"
        var_fn = lambda q: var_marginal(p, i, q)
        cte_fn = lambda q: cte_marginal(p, i, q)
    elif isinstance(target, str) and target.strip().lower() == "maxima":
        label = "maxima"
        var_fn = lambda q: var_extreme(p, "maxima", q, eps=eps)
        cte_fn = lambda q: cte_maxima(p, q, eps=eps)
    else:
        label, _ = _target_label_and_survival(p, target, eps)
        subset = (tuple(range(1, p.n + 1)) if isinstance(target, str)
                  else _subset_key(target))
        var_fn = lambda q: var_extreme(p, subset, q, eps=eps)
        cte_fn = lambda q: cte_minima(p, subset, q, eps=eps)
    rows = tuple((q, var_fn(q), cte_fn(q)) for q in grid)
    return RiskReport(target=label, rows=rows)
