"""Closed-form distributional quantities of an exposure portfolio.

Notation used throughout (see portfolio.py): coordinate i has scale sigma_i
and tail index g*_i = sum of the factor shapes hitting it; a pair (k, l)
carries shape masses (shared, only_k, only_l) with shared + only_k = g*_k.

Joint survival is the product over factors
    P[X > x] = prod_j (1 + sum_i c_ij x_i/sigma_i)^(-gamma_j),
evaluated in log space throughout (a single final exponentiation), because
realistic scales (sigma ~ 1e2, deep tail arguments) underflow plain products.

The joint density is the alternating-free expansion obtained by
differentiating the survival product once per coordinate: every way of
routing coordinate i's derivative through one of its factors contributes a
term, so the integer multiplicities d[(i_1..i_{n+1})] are exactly the
coefficients of prod_i (sum_j c_ij y_j). That polynomial is built once per
exposure matrix by sparse iterated multiplication and cached; the density is
then a logsumexp over its terms. Feasible for n <= 12 (with a 1e6-term
memory guard) — beyond that the construction refuses rather than thrashes.

Bivariate formulas substitute w = x_k / (sigma_k (1 + x_l/sigma_l)), which
keeps every expression finite and exact in the shared = 0 independence limit
(nothing ever divides by the shared mass).

Moment-existence failures raise InfiniteMomentError, never return inf: the
thresholds (index > 1 for means, > 2 for variances/covariances) are facts
about the model, not numerics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import InfiniteMomentError, InputValidationError
from .portfolio import (
    ExposureMatrix,
    ExposurePortfolio,
    marginal_index,
    pair_decomposition,
)
from .specfun import DEFAULT_EPS, gauss_2f1, hyp_3f2_unit, log_pochhammer

MAX_EXPANSION_DIM = 12
MAX_EXPANSION_TERMS = 1_000_000


def _as_point(p: ExposurePortfolio, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size != p.n:
        raise InputValidationError(
            f"point has {arr.size} coordinates, portfolio has {p.n}")
    if not np.all(np.isfinite(arr)):
        raise InputValidationError("coordinates must be finite")
    if np.any(arr < 0.0):
        i = int(np.argmin(arr))
        raise InputValidationError(
            f"coordinate {i + 1} is negative ({arr[i]}); losses live on [0, inf)")
    return arr


def _scalar_nonneg(x: float, name: str) -> float:
    x = float(x)
    if not (math.isfinite(x) and x >= 0.0):
        raise InputValidationError(f"{name} must be a nonnegative real, got {x}")
    return x


def joint_ddf(p: ExposurePortfolio, x) -> float:
    """Joint survival P[X_1 > x_1, ..., X_n > x_n]."""
    arr = _as_point(p, x)
    u = (arr / np.asarray(p.sigma)) @ p.c.as_array()
    return float(math.exp(-float(np.dot(p.gamma, np.log1p(u)))))


def marginal_ddf(p: ExposurePortfolio, i: int, x: float) -> float:
    """Marginal survival of coordinate i: (1 + x/sigma_i)^(-g*_i)."""
    x = _scalar_nonneg(x, "x")
    g = marginal_index(p, i)
    return math.exp(-g * math.log1p(x / p.sigma[i - 1]))


def _require_index(p: ExposurePortfolio, i: int, threshold: float,
                   what: str) -> float:
    g = marginal_index(p, i)
    if not g > threshold:
        raise InfiniteMomentError(
            f"{what} of coordinate {i} does not exist: tail index "
            f"{g:.6g} <= {threshold:g}")
    return g


def marginal_mean(p: ExposurePortfolio, i: int) -> float:
    """E[X_i] = sigma_i/(g*_i - 1); requires tail index above 1."""
    g = _require_index(p, i, 1.0, "mean")
    return p.sigma[i - 1] / (g - 1.0)


def marginal_var(p: ExposurePortfolio, i: int) -> float:
    """Var[X_i] = sigma_i^2 g*_i/((g*_i - 1)^2 (g*_i - 2)); index above 2."""
    g = _require_index(p, i, 2.0, "variance")
    s = p.sigma[i - 1]
    return s * s * g / ((g - 1.0) ** 2 * (g - 2.0))


# ---------------------------------------------------------------------------
# joint density


@dataclass(frozen=True)
class DensityExpansion:
    """Integer multiplicities of the derivative expansion, keyed by the
    per-factor derivative counts (i_1, ..., i_{n+1}) with sum = n."""

    n: int
    terms: Mapping[tuple[int, ...], int] = field(repr=False)

    def evaluate(self, y) -> float:
        """Evaluate sum d * prod_j y_j^{i_j}; must reproduce
        prod_i (sum_j c_ij y_j) for the generating matrix."""
        arr = np.asarray(y, dtype=float).ravel()
        if arr.size != self.n + 1:
            raise InputValidationError(
                f"need {self.n + 1} factor values, got {arr.size}")
        return math.fsum(
            coeff * float(np.prod(arr ** np.asarray(expo)))
            for expo, coeff in self.terms.items())


@lru_cache(maxsize=128)
def _expansion_for_matrix(matrix: ExposureMatrix) -> DensityExpansion:
    n = matrix.n
    if n > MAX_EXPANSION_DIM:
        raise InputValidationError(
            f"density expansion supported for n <= {MAX_EXPANSION_DIM}, "
            f"got n={n}")
    terms: dict[tuple[int, ...], int] = {(0,) * (n + 1): 1}
    for i, row in enumerate(matrix.entries):
        cols = [j for j, v in enumerate(row) if v]
        new: dict[tuple[int, ...], int] = {}
        for expo, coeff in terms.items():
            for j in cols:
                bumped = expo[:j] + (expo[j] + 1,) + expo[j + 1:]
                new[bumped] = new.get(bumped, 0) + coeff
        if len(new) > MAX_EXPANSION_TERMS:
            raise InputValidationError(
                f"density expansion exceeds {MAX_EXPANSION_TERMS} terms at "
                f"row {i + 1}")
        terms = new
    return DensityExpansion(n=n, terms=MappingProxyType(terms))


def density_expansion(p: ExposurePortfolio) -> DensityExpansion:
    """The (cached) derivative-multiplicity expansion of p's exposure matrix."""
    return _expansion_for_matrix(p.c)


def joint_pdf(p: ExposurePortfolio, x) -> float:
    """Joint density at x >= 0 via the cached expansion, log-space summed."""
    arr = _as_point(p, x)
    expansion = density_expansion(p)
    u = (arr / np.asarray(p.sigma)) @ p.c.as_array()
    log1pu = np.log1p(u)
    gam = p.gamma
    # per-factor table of log (gamma_j)_m, m = 0..n
    lp = [[log_pochhammer(g, m) for m in range(p.n + 1)] for g in gam]
    base = -math.fsum(math.log(s) for s in p.sigma) - float(
        np.dot(gam, log1pu))
    logs = []
    for expo, coeff in expansion.terms.items():
        acc = math.log(coeff) + base
        for j, m in enumerate(expo):
            if m:
                acc += lp[j][m] - m * log1pu[j]
        logs.append(acc)
    top = max(logs)
    if top == -math.inf:
        return 0.0
    return math.exp(top) * math.fsum(math.exp(v - top) for v in logs)


# ---------------------------------------------------------------------------
# second-order structure


def covariance(p: ExposurePortfolio, k: int, l: int,
               eps: float = DEFAULT_EPS) -> float:
    """Cov[X_k, X_l]; requires both tail indices above 2."""
    gk = _require_index(p, k, 2.0, "covariance")
    gl = _require_index(p, l, 2.0, "covariance")
    d = pair_decomposition(p, k, l)
    f = hyp_3f2_unit(d.shared, 1.0, 1.0, gk, gl, eps=eps)
    return (p.sigma[k - 1] * p.sigma[l - 1]
            / ((gk - 1.0) * (gl - 1.0)) * (f.value - 1.0))


def correlation(p: ExposurePortfolio, k: int, l: int,
                eps: float = DEFAULT_EPS) -> float:
    """Corr[X_k, X_l] in [0, 1/2); requires both tail indices above 2."""
    cov = covariance(p, k, l, eps=eps)
    return cov / math.sqrt(marginal_var(p, k) * marginal_var(p, l))


def _matches_preset(p: ExposurePortfolio, kind: str) -> bool:
    n = p.n
    if kind == "I":
        want = [[int(j == i or j == n) for j in range(n + 1)] for i in range(n)]
    else:
        want = [[int(j <= i) for j in range(n + 1)] for i in range(n)]
    return [list(r) for r in p.c.entries] == want


def covariance_flexible(p: ExposurePortfolio, k: int, l: int, kind: str,
                        eps: float = DEFAULT_EPS) -> float:
    """Specialized covariance closed forms for the two nested patterns.

    kind="I" (one idiosyncratic + one common factor per row) evaluates the
    common-factor form; kind="II" (cumulative exposure) is division-only.
    The portfolio's matrix must literally match the pattern.
    """
    if kind not in ("I", "II"):
        raise InputValidationError(f'kind must be "I" or "II", got {kind!r}')
    k = int(k)
    l = int(l)
    if k == l:
        raise InputValidationError(f"need two distinct coordinates, got k=l={k}")
    if not _matches_preset(p, kind):
        raise InputValidationError(
            f"exposure matrix does not match the flexible type {kind} pattern")
    gk = _require_index(p, k, 2.0, "covariance")
    gl = _require_index(p, l, 2.0, "covariance")
    s = p.sigma[k - 1] * p.sigma[l - 1]
    if kind == "I":
        common = p.gamma[p.n]
        f = hyp_3f2_unit(common, 1.0, 1.0, gk, gl, eps=eps)
        return s / ((gk - 1.0) * (gl - 1.0)) * (f.value - 1.0)
    g_hi = max(gk, gl)  # the later coordinate dominates in the nested pattern
    return s / ((gk - 1.0) * (gl - 1.0) * (g_hi - 2.0))


# ---------------------------------------------------------------------------
# conditionals and regression


def _pair_state(p: ExposurePortfolio, k: int, l: int):
    d = pair_decomposition(p, k, l)
    return d, p.sigma[k - 1], p.sigma[l - 1]


def conditional_ddf_eq(p: ExposurePortfolio, k: int, l: int,
                       x_k: float, x_l: float) -> float:
    """P[X_k > x_k | X_l = x_l].

    With w = x_k/(sigma_k (1 + x_l/sigma_l)):
        (1+x_k/sigma_k)^(-only_k) (1+w)^(-shared)
        * (only_l + shared/(1+w)) / (shared + only_l).
    shared = 0 collapses to the marginal survival with no special case.
    """
    d, sk, sl = _pair_state(p, k, l)
    uk = _scalar_nonneg(x_k, "x_k") / sk
    ul = _scalar_nonneg(x_l, "x_l") / sl
    w = uk / (1.0 + ul)
    bracket = (d.only_l + d.shared / (1.0 + w)) / (d.shared + d.only_l)
    return math.exp(-d.only_k * math.log1p(uk)
                    - d.shared * math.log1p(w)) * bracket


def conditional_ddf_gt(p: ExposurePortfolio, k: int, l: int,
                       x_k: float, x_l: float) -> float:
    """P[X_k > x_k | X_l > x_l] = (1+x_k/sigma_k)^(-only_k) (1+w)^(-shared)."""
    d, sk, sl = _pair_state(p, k, l)
    uk = _scalar_nonneg(x_k, "x_k") / sk
    ul = _scalar_nonneg(x_l, "x_l") / sl
    w = uk / (1.0 + ul)
    return math.exp(-d.only_k * math.log1p(uk) - d.shared * math.log1p(w))


def centred_regression(p: ExposurePortfolio, k: int, l: int, x_l: float,
                       eps: float = DEFAULT_EPS) -> float:
    """E[X_k | X_l = x_l] - E[X_k]; requires g*_k above 1.

    r = sigma_k (1+u) [ shared/(g*_k g*_l) F1 + only_l/(g*_l (g*_k-1)) F2 ]
        - sigma_k/(g*_k - 1),
    u = x_l/sigma_l, F1 = 2F1(only_k, 1; g*_k+1; -u), F2 = same at g*_k.
    Monotone increasing and concave in x_l; identically 0 when the pair
    shares no factor.
    """
    gk = _require_index(p, k, 1.0, "regression (mean)")
    d, sk, sl = _pair_state(p, k, l)
    if d.shared == 0.0:
        return 0.0
    gl = d.shared + d.only_l
    u = _scalar_nonneg(x_l, "x_l") / sl
    f1 = gauss_2f1(d.only_k, 1.0, gk + 1.0, -u, eps=eps).value
    f2 = gauss_2f1(d.only_k, 1.0, gk, -u, eps=eps).value
    return (sk * (1.0 + u)
            * (d.shared / (gk * gl) * f1
               + d.only_l / (gl * (gk - 1.0)) * f2)
            - sk / (gk - 1.0))
