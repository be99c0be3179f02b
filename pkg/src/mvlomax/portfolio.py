"""The validated model object: exposure matrix, scales, factor shapes.

A portfolio of n dependent Pareto-II losses is parametrized by

* a 0/1 exposure matrix c with n rows and n+1 columns — entry c[i][j] = 1
  means latent gamma factor j hits loss coordinate i;
* positive scales sigma_1..sigma_n (monetary or time units);
* positive factor shapes gamma_1..gamma_{n+1} (dimensionless).

Coordinate i then has survival (1 + x/sigma_i)^(-g*_i) with tail index
g*_i = sum_j c[i][j] gamma_j, and a pair (k, l) splits its shape mass into a
shared part (factors hitting both) and two exclusive parts. Those three
numbers drive every bivariate formula downstream, so they get their own type.

All public interfaces are 1-based in the coordinate index; columns of c that
are entirely zero are legal and simply mean the corresponding factor is
unused. Portfolio objects are immutable (and hashable, which downstream
modules exploit for caching derived structures).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InputValidationError

_PRESETS = ("arnold", "independent", "flexible_I", "flexible_II", "nested_common")


@dataclass(frozen=True)
class ExposureMatrix:
    """n x (n+1) matrix over {0, 1}; every row must contain at least one 1."""

    entries: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InputValidationError(f"need n >= 1, got n={self.n}")
        if len(self.entries) != self.n:
            raise InputValidationError(
                f"expected {self.n} rows, got {len(self.entries)}")
        for i, row in enumerate(self.entries):
            if len(row) != self.n + 1:
                raise InputValidationError(
                    f"row {i + 1}: expected {self.n + 1} entries, got {len(row)}")
            for j, v in enumerate(row):
                if v not in (0, 1):
                    raise InputValidationError(
                        f"row {i + 1}, column {j + 1}: entries must be 0 or 1, "
                        f"got {v!r}")
            if not any(row):
                raise InputValidationError(
                    f"row {i + 1} is all zeros: the margin would have no tail "
                    "index")

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)


@dataclass(frozen=True)
class ExposurePortfolio:
    """Validated bundle (c, sigma, gamma); see the module docstring."""

    c: ExposureMatrix
    sigma: tuple[float, ...]
    gamma: tuple[float, ...]

    def __post_init__(self):
        n = self.c.n
        if len(self.sigma) != n:
            raise InputValidationError(
                f"sigma has {len(self.sigma)} entries, need {n}")
        if len(self.gamma) != n + 1:
            raise InputValidationError(
                f"gamma has {len(self.gamma)} entries, need {n + 1}")
        for i, s in enumerate(self.sigma):
            if not (math.isfinite(s) and s > 0.0):
                raise InputValidationError(
                    f"sigma[{i + 1}] must be a positive real, got {s!r}")
        for j, g in enumerate(self.gamma):
            if not (math.isfinite(g) and g > 0.0):
                raise InputValidationError(
                    f"gamma[{j + 1}] must be a positive real, got {g!r}")

    @property
    def n(self) -> int:
        return self.c.n

    @cached_property
    def marginal_indices(self) -> tuple[float, ...]:
        # g*_i = sum of factor shapes hitting coordinate i (fsum: the pair
        # decomposition identities are checked to ~1 ulp)
        return tuple(
            math.fsum(g for g, v in zip(self.gamma, row) if v)
            for row in self.c.entries)

    @cached_property
    def active_columns(self) -> tuple[int, ...]:
        # 0-based indices of factors hitting at least one coordinate
        return tuple(
            j for j in range(self.n + 1)
            if any(row[j] for row in self.c.entries))


@dataclass(frozen=True)
class PairDecomposition:
    """Shape masses of a coordinate pair: shared by both, exclusive to each."""

    shared: float
    only_k: float
    only_l: float

    def __post_init__(self):
        if min(self.shared, self.only_k, self.only_l) < 0.0:
            raise InputValidationError("shape masses must be nonnegative")


def _coerce_rows(c) -> tuple[tuple[int, ...], ...]:
    if isinstance(c, ExposureMatrix):
        return c.entries
    arr = np.asarray(c)
    if arr.ndim != 2:
        raise InputValidationError(
            f"exposure matrix must be 2-dimensional, got shape {arr.shape}")
    rows = []
    for row in arr.tolist():
        out = []
        for v in row:
            if v in (0, 1, 0.0, 1.0):
                out.append(int(v))
            else:
                out.append(v)  # let ExposureMatrix name the offender
        rows.append(tuple(out))
    return tuple(rows)


def build_portfolio(c, sigma, gamma) -> ExposurePortfolio:
    """Validate and freeze a portfolio from raw matrix/sequence inputs."""
    rows = _coerce_rows(c)
    matrix = ExposureMatrix(entries=rows, n=len(rows))
    return ExposurePortfolio(
        c=matrix,
        sigma=tuple(float(s) for s in np.asarray(sigma).ravel()),
        gamma=tuple(float(g) for g in np.asarray(gamma).ravel()),
    )


def _check_coordinate(p: ExposurePortfolio, i: int, name: str = "i") -> int:
    if not (1 <= i <= p.n):
        raise InputValidationError(
            f"coordinate {name}={i} out of range 1..{p.n}")
    return int(i)


def marginal_index(p: ExposurePortfolio, i: int) -> float:
    """Tail index g*_i of coordinate i (1-based): sum of its factor shapes."""
    return p.marginal_indices[_check_coordinate(p, i) - 1]


def pair_decomposition(p: ExposurePortfolio, k: int, l: int) -> PairDecomposition:
    """Split the shape mass of coordinates k != l into shared/exclusive parts."""
    k = _check_coordinate(p, k, "k")
    l = _check_coordinate(p, l, "l")
    if k == l:
        raise InputValidationError(f"need two distinct coordinates, got k=l={k}")
    rk = p.c.entries[k - 1]
    rl = p.c.entries[l - 1]
    shared = math.fsum(g for g, a, b in zip(p.gamma, rk, rl) if a and b)
    only_k = math.fsum(g for g, a, b in zip(p.gamma, rk, rl) if a and not b)
    only_l = math.fsum(g for g, a, b in zip(p.gamma, rk, rl) if b and not a)
    return PairDecomposition(shared=shared, only_k=only_k, only_l=only_l)


def preset(kind: str, n: int, sigma, gamma) -> ExposurePortfolio:
    """Build one of the documented exposure patterns.

    arnold       all-ones rows: one fully systemic block, comonotone exposure
    independent  c[i][i] = 1 only: independent margins, factor n+1 unused
    flexible_I   c[i][i] = c[i][n+1] = 1: one idiosyncratic + one common factor
    flexible_II  c[i][j] = 1 for j <= i: cumulative (nested) exposure
    nested_common  flexible_II plus the common factor n+1 in every row
    """
    if kind not in _PRESETS:
        raise InputValidationError(
            f"unknown preset {kind!r}; choose one of {', '.join(_PRESETS)}")
    if n < 1:
        raise InputValidationError(f"need n >= 1, got n={n}")

    def entry(i: int, j: int) -> int:  # 0-based
        if kind == "arnold":
            return 1
        if kind == "independent":
            return int(j == i)
        if kind == "flexible_I":
            return int(j == i or j == n)
        if kind == "flexible_II":
            return int(j <= i)
        return int(j <= i or j == n)  # nested_common

    rows = tuple(tuple(entry(i, j) for j in range(n + 1)) for i in range(n))
    return build_portfolio(rows, sigma, gamma)
