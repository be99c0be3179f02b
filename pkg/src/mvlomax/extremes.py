"""Laws of the portfolio minima and maxima.

The survival of the minimum over a coordinate subset S is the joint survival
on the diagonal, i.e. a product of Pareto-II style factors with one rate per
*active* factor column (a column is active when it hits some coordinate of S):

    P[min_S X > x] = prod_{j active} (1 + x/beta_j)^(-gamma_j),
    beta_j = (sum_{i in S} c_ij / sigma_i)^(-1).

That is the survival of Lambda/T with Lambda ~ Exp(1) and T a sum of
independent gammas with shapes gamma_j and rates beta_j. Writing T as a
single gamma with the dominant scale and a random integer shape shift K
(classical sum-of-gammas mixture) turns the minimum into a Pareto-II scale
mixture:

    min_S X ~ Pareto-II(alpha_plus, g* + K),   alpha_plus = max_j beta_j,
    P[K = k] = w_k from the convolution recursion
        w_0 = prod_j (beta_j/alpha_plus)^gamma_j,
        w_k = k^(-1) sum_{l=1..k} (sum_j gamma_j rho_j^l) w_{k-l},
        rho_j = 1 - beta_j/alpha_plus,

with g* the total shape of the active factors. Inactive columns are excluded
(their rate would be infinite; their survival factor is 1), which is the
correct limit. Equal rates make the mixture degenerate at K = 0.

The recursion is truncated once cumulative weight reaches 1 - eps
(eps defaults to 1e-10); evaluations add an explicit bounded tail
correction (survival terms decrease in k), so minima_ddf(., 0) is exactly 1.

The maximum has no such closed law; its survival is the inclusion-exclusion
alternating sum of subset-minima survivals over all 2^n - 1 nonempty subsets
(guarded at n <= 20).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import InfiniteMomentError, InputValidationError, NonConvergenceError
from .portfolio import ExposurePortfolio, _check_coordinate
from .specfun import _kernels

DEFAULT_MASS_EPS = 1e-10
WEIGHT_CAP = 200_000


@dataclass(frozen=True)
class ShapeMixture:
    """Mixture of Pareto-II(scale, base_shape + k) laws over an integer shape
    shift k with the given weights; tail_mass is the truncated remainder."""

    base_shape: float
    scale: float
    weights: tuple[float, ...]
    tail_mass: float

    def __post_init__(self):
        if not self.weights:
            raise InputValidationError("mixture needs at least one weight")
        if min(self.weights) < 0.0 or self.tail_mass < 0.0:
            raise InputValidationError("mixture masses must be nonnegative")

    def survival(self, x: float) -> float:
        """P[Pareto-II(scale, base_shape + K) > x] plus the bounded tail term."""
        if not (math.isfinite(x) and x >= 0.0):
            raise InputValidationError(f"x must be a nonnegative real, got {x}")
        logu = math.log1p(x / self.scale)
        ks = np.arange(len(self.weights), dtype=float)
        vals = np.asarray(self.weights) * np.exp(-(self.base_shape + ks) * logu)
        tail = self.tail_mass * math.exp(
            -(self.base_shape + len(self.weights)) * logu)
        return min(1.0, float(np.sum(vals) + tail))

    def stop_loss(self, x: float) -> float:
        """int_x^inf survival(t) dt, term by term; needs base shape above 1."""
        if not self.base_shape > 1.0:
            raise InfiniteMomentError(
                f"mixture has no mean: base shape {self.base_shape:.6g} <= 1")
        if not (math.isfinite(x) and x >= 0.0):
            raise InputValidationError(f"x must be a nonnegative real, got {x}")
        logu = math.log1p(x / self.scale)
        ks = np.arange(len(self.weights), dtype=float)
        shifted = self.base_shape + ks - 1.0
        core = float(np.sum(np.asarray(self.weights) / shifted
                            * np.exp(-shifted * logu)))
        edge = self.base_shape + len(self.weights) - 1.0
        tail = self.tail_mass / edge * math.exp(-edge * logu)
        return self.scale * (core + tail)

    def mean(self) -> float:
        """E[Pareto-II(scale, base_shape + K)]; requires base shape above 1."""
        return self.stop_loss(0.0)


def moschopoulos_pmf(shapes, rates, eps: float = DEFAULT_MASS_EPS) -> ShapeMixture:
    """Law of Exp(1)/T for T a sum of independent gammas with the given
    shapes and rates, as a Pareto-II shape mixture with scale max(rates).

    The weight recursion is truncated at cumulative mass 1 - eps.
    """
    shp = np.asarray(shapes, dtype=float).ravel()
    rts = np.asarray(rates, dtype=float).ravel()
    if shp.size == 0 or shp.size != rts.size:
        raise InputValidationError(
            f"need matching nonempty shapes/rates, got sizes "
            f"{shp.size}/{rts.size}")
    if np.any(~np.isfinite(shp)) or np.any(shp <= 0.0):
        raise InputValidationError("shapes must be positive reals")
    if np.any(~np.isfinite(rts)) or np.any(rts <= 0.0):
        raise InputValidationError("rates must be positive reals")
    if not (0.0 < eps < 1.0):
        raise InputValidationError(f"eps must be in (0, 1), got {eps}")

    alpha_plus = float(np.max(rts))
    rho = 1.0 - rts / alpha_plus
    # w_0 in log space: the rate spread can make it arbitrarily small
    log_w0 = float(np.dot(shp, np.log(rts / alpha_plus)))
    w0 = math.exp(log_w0)
    if w0 == 0.0:
        raise NonConvergenceError(
            "mixture weights underflow: rate spread too extreme for the "
            "convolution recursion")
    weights, cum = _kernels.mosch_weights(shp, rho, w0, eps, WEIGHT_CAP)
    if cum < 1.0 - eps:
        raise NonConvergenceError(
            f"mixture mass {cum:.12g} below 1 - {eps:g} after "
            f"{WEIGHT_CAP} weights")
    # recompute the retained mass with the same pairwise sum the evaluator
    # uses, so survival(0) returns exactly 1
    mass = float(np.sum(np.asarray(weights, dtype=float)))
    return ShapeMixture(
        base_shape=float(np.sum(shp)),
        scale=alpha_plus,
        weights=tuple(float(w) for w in weights),
        tail_mass=max(0.0, 1.0 - mass),
    )


def _subset_key(subset) -> tuple[int, ...]:
    out = tuple(sorted(set(int(i) for i in subset)))
    if not out:
        raise InputValidationError("subset must be nonempty")
    return out


@lru_cache(maxsize=65536)
def _minima_mixture_cached(p: ExposurePortfolio, subset: tuple[int, ...],
                           eps: float) -> ShapeMixture:
    for i in subset:
        _check_coordinate(p, i)
    inv_rates = []
    shapes = []
    for j in range(p.n + 1):
        s = math.fsum(1.0 / p.sigma[i - 1] for i in subset
                      if p.c.entries[i - 1][j])
        if s > 0.0:  # active column
            inv_rates.append(s)
            shapes.append(p.gamma[j])
    # every coordinate has at least one factor, so a nonempty subset always
    # leaves at least one active column
    rates = [1.0 / s for s in inv_rates]
    return moschopoulos_pmf(shapes, rates, eps=eps)


def minima_mixture(p: ExposurePortfolio, subset,
                   eps: float = DEFAULT_MASS_EPS) -> ShapeMixture:
    """Shape mixture of min over the given coordinate subset (1-based)."""
    return _minima_mixture_cached(p, _subset_key(subset), float(eps))


def minima_ddf(p: ExposurePortfolio, subset, x: float,
               eps: float = DEFAULT_MASS_EPS) -> float:
    """P[min over subset > x]."""
    return minima_mixture(p, subset, eps=eps).survival(x)


def minima_mean(p: ExposurePortfolio, subset,
                eps: float = DEFAULT_MASS_EPS) -> float:
    """E[min over subset]; requires the active total shape above 1."""
    return minima_mixture(p, subset, eps=eps).mean()


def maxima_ddf(p: ExposurePortfolio, x: float,
               eps: float = DEFAULT_MASS_EPS) -> float:
    """P[max over all coordinates > x] by inclusion-exclusion over subsets."""
    if p.n > 20:
        raise InputValidationError(
            f"maxima law needs 2^n - 1 subset terms; n={p.n} exceeds 20")
    x = float(x)
    total = 0.0
    terms = []
    for size in range(1, p.n + 1):
        sign = 1.0 if size % 2 else -1.0
        for subset in combinations(range(1, p.n + 1), size):
            terms.append(sign * minima_ddf(p, subset, x, eps=eps))
    total = math.fsum(terms)
    # alternating cancellation can leave harmless sub-ulp excursions
    return min(1.0, max(0.0, total))
