"""Exact samplers and Monte Carlo summaries.

Two constructions draw from the same joint law.

Background risk: each coordinate is an exponential deflated by its own
mixing rate,

    X_i = sigma_i E_i / (c Y)_i,   E_i ~ Exp(1),  Y_j ~ Gamma(gamma_j, 1),

with the gamma factor vector Y shared across coordinates. Integrating Y out
of the conditional survival exp(-sum_i x_i (c Y)_i / sigma_i) recovers the
product-form joint survival.

Common shock: each factor j fires events at a random intensity
L_j ~ Gamma(gamma_j, 1) and coordinate i fails at its first incident shock,

    X_i = sigma_i min over active j of (E_ij / L_j),   E_ij ~ Exp(1).

Given L the minimum is Exp(sum of active L_j), which is the background-risk
conditional law, so the two samplers agree in distribution while modelling
different causal stories; comparing them is a useful self-test.

Reproducibility contract: replicates are generated in fixed blocks of 16384,
block b seeded by SeedSequence((seed, b)); the full block is always drawn
and then sliced. Draw order inside a block is pinned: first the (block, n+1)
gamma array, then the exponentials, (block, n) for the background sampler or
(block, active pairs) row-major over (i, j) for the shock sampler. A run of
m draws is therefore a prefix of any longer run with the same seed.

mc_estimate turns a batch into point estimates with standard errors for
means, pairwise covariance, joint survival, quantiles (order-statistic
bracket), tail expectations, and the cross-line economic tail expectation.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

import numpy as np

from .errors import InputValidationError
from .extremes import _subset_key
from .portfolio import ExposurePortfolio
from .risk import _ratio_estimate

BLOCK = 16384

_REPRESENTATIONS = ("background-risk", "common-shock")


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """m joint draws (rows) with the seed and construction that produced
    them. The draw matrix is marked read-only."""

    draws: np.ndarray
    seed: int
    representation: str

    def __post_init__(self):
        if self.draws.ndim != 2:
            raise InputValidationError(
                f"draws must be a 2-D array, got ndim={self.draws.ndim}")
        if self.representation not in _REPRESENTATIONS:
            raise InputValidationError(
                f"unknown representation {self.representation!r}")
        self.draws.flags.writeable = False

    @property
    def m(self) -> int:
        return self.draws.shape[0]

    @property
    def n(self) -> int:
        return self.draws.shape[1]


def _check_m_seed(m, seed) -> tuple[int, int]:
    try:
        m = operator.index(m)
        seed = operator.index(seed)
    except TypeError as exc:
        raise InputValidationError(
            f"m and seed must be integers, got {m!r}, {seed!r}") from exc
    if m < 1:
        raise InputValidationError(f"need at least one replicate, got m={m}")
    if seed < 0:
        raise InputValidationError(f"seed must be nonnegative, got {seed}")
    return m, seed


def _block_stream(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((seed, block))))


def sample_gamma_vector(p: ExposurePortfolio, stream: np.random.Generator,
                        size: int | None = None) -> np.ndarray:
    """Draw the latent factor vector Y ~ prod_j Gamma(gamma_j, 1); shape
    (n+1,) or (size, n+1)."""
    if not isinstance(stream, np.random.Generator):
        raise InputValidationError(
            f"stream must be a numpy Generator, got {type(stream).__name__}")
    shape = np.asarray(p.gamma, dtype=float)
    if size is None:
        return stream.gamma(shape, 1.0)
    return stream.gamma(shape, 1.0, size=(operator.index(size), p.n + 1))


def sample_background_risk(p: ExposurePortfolio, m, seed) -> SampleBatch:
    """m joint draws via the background-risk construction."""
    m, seed = _check_m_seed(m, seed)
    carr = p.c.as_array().astype(float)
    sig = np.asarray(p.sigma, dtype=float)
    out = np.empty((m, p.n))
    for block in range((m + BLOCK - 1) // BLOCK):
        rng = _block_stream(seed, block)
        y = sample_gamma_vector(p, rng, size=BLOCK)
        e = rng.exponential(1.0, size=(BLOCK, p.n))
        lo = block * BLOCK
        take = min(BLOCK, m - lo)
        mix = y @ carr.T
        out[lo:lo + take] = sig * e[:take] / mix[:take]
    return SampleBatch(draws=out, seed=seed, representation="background-risk")


def sample_common_shock(p: ExposurePortfolio, m, seed) -> SampleBatch:
    """m joint draws via the common-shock construction."""
    m, seed = _check_m_seed(m, seed)
    sig = np.asarray(p.sigma, dtype=float)
    pairs = [(i, j) for i in range(p.n) for j in range(p.n + 1)
             if p.c.entries[i][j]]
    out = np.empty((m, p.n))
    for block in range((m + BLOCK - 1) // BLOCK):
        rng = _block_stream(seed, block)
        lam = sample_gamma_vector(p, rng, size=BLOCK)
        e = rng.exponential(1.0, size=(BLOCK, len(pairs)))
        lo = block * BLOCK
        take = min(BLOCK, m - lo)
        first = np.full((take, p.n), np.inf)
        for col, (i, j) in enumerate(pairs):
            np.minimum(first[:, i], e[:take, col] / lam[:take, j],
                       out=first[:, i])
        out[lo:lo + take] = sig * first
    return SampleBatch(draws=out, seed=seed, representation="common-shock")


def _target_draws(batch: SampleBatch, target) -> np.ndarray:
    if isinstance(target, str):
        kind = target.strip().lower()
        if kind == "maxima":
            return batch.draws.max(axis=1)
        if kind == "minima":
            return batch.draws.min(axis=1)
        raise InputValidationError(
            f"unknown target {target!r}; use 'maxima', 'minima', "
            f"('marginal', i), or a coordinate subset")
    if isinstance(target, int):
        target = ("marginal", target)
    if (isinstance(target, tuple) and len(target) == 2
            and target[0] == "marginal"):
        i = operator.index(target[1])
        if not 1 <= i <= batch.n:
            raise InputValidationError(
                f"coordinate index must lie in 1..{batch.n}, got {i}")
        return batch.draws[:, i - 1]
    subset = _subset_key(target)
    for i in subset:
        if not 1 <= i <= batch.n:
            raise InputValidationError(
                f"coordinate index must lie in 1..{batch.n}, got {i}")
    cols = [i - 1 for i in subset]
    return batch.draws[:, cols].min(axis=1)


def _quantile_with_se(x: np.ndarray, q: float) -> tuple[float, float]:
    m = x.size
    srt = np.sort(x)
    est = float(np.quantile(srt, q))
    half = max(1, math.ceil(1.96 * math.sqrt(m * q * (1.0 - q))))
    r = int(round(q * (m - 1)))
    lo = srt[max(0, r - half)]
    hi = srt[min(m - 1, r + half)]
    return est, float((hi - lo) / (2.0 * 1.96))


def mc_estimate(batch: SampleBatch, statistic: str, **params):
    """Point estimate and standard error of a summary of the batch.

    statistic is one of:
      'mean'      per-coordinate means; returns (means, ses) arrays
      'cov'       covariance of coordinates k, l
      'ddf'       joint survival at point x (length-n)
      'var'       q-quantile of target (order-statistic bracket s.e.)
      'cte'       tail mean of target above its empirical q-quantile
      'econ_cte'  mean of coordinate k given coordinate l above its
                  empirical q-quantile
    Targets follow the risk-module convention.
    """
    d = batch.draws
    m = batch.m
    if statistic == "mean":
        _no_extra(params)
        return d.mean(axis=0), d.std(axis=0, ddof=1) / math.sqrt(m)
    if statistic == "cov":
        k = params.pop("k")
        l = params.pop("l")
        _no_extra(params)
        xk = _target_draws(batch, ("marginal", k))
        xl = _target_draws(batch, ("marginal", l))
        prod = (xk - xk.mean()) * (xl - xl.mean())
        est = float(prod.sum() / (m - 1))
        return est, float(prod.std(ddof=1) / math.sqrt(m))
    if statistic == "ddf":
        x = np.asarray(params.pop("x"), dtype=float).ravel()
        _no_extra(params)
        if x.size != batch.n:
            raise InputValidationError(
                f"point must have length {batch.n}, got {x.size}")
        hit = float(np.mean(np.all(d > x, axis=1)))
        return hit, math.sqrt(hit * (1.0 - hit) / m)
    if statistic == "var":
        target = params.pop("target")
        q = float(params.pop("q"))
        _no_extra(params)
        return _quantile_with_se(_target_draws(batch, target), q)
    if statistic == "cte":
        target = params.pop("target")
        q = float(params.pop("q"))
        _no_extra(params)
        x = _target_draws(batch, target)
        t = float(np.quantile(x, q))
        tail = x[x > t]
        if tail.size < 2:
            raise InputValidationError(
                f"too few tail draws above the q={q} quantile "
                f"({tail.size}); increase m or lower q")
        return float(tail.mean()), float(tail.std(ddof=1)
                                         / math.sqrt(tail.size))
    if statistic == "econ_cte":
        k = params.pop("k")
        l = params.pop("l")
        q = float(params.pop("q"))
        _no_extra(params)
        xk = _target_draws(batch, ("marginal", k))
        xl = _target_draws(batch, ("marginal", l))
        t = float(np.quantile(xl, q))
        return _ratio_estimate(xk, (xl > t).astype(float))
    raise InputValidationError(
        f"unknown statistic {statistic!r}; expected mean, cov, ddf, var, "
        f"cte, or econ_cte")


def _no_extra(params):
    if params:
        raise InputValidationError(
            f"unexpected parameters: {sorted(params)}")
