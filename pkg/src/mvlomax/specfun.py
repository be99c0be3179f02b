"""Special-function kernels: Pochhammer symbols, Gauss 2F1, and 3F2 at unit argument.

Every closed-form moment, covariance, regression, and stressed-expectation
formula in this package funnels through the three entry points here, so the
design goal is certified truncation rather than raw speed: each series result
carries a tail_bound that is a rigorous upper bound on the discarded mass
under the documented ratio analysis.

Evaluation strategy
-------------------
* 2F1(a, b; c; z), 0 <= z < 1: direct series of nonnegative terms. The term
  ratio r(k) = z(a+k)(b+k)/((c+k)(1+k)) is bounded above, for all indices
  past k, by z * max(1, (a+k)/(1+k)) * max(1, (b+k)/(c+k)) since both factors
  are monotone toward 1; that geometric majorant certifies the tail.
* 2F1 with z < 0 (regressions evaluate at -x_l/sigma_l): Pfaff transformation
  into w = z/(z-1) in [0, 1), pivoting on whichever parameter keeps the
  transformed upper parameters nonnegative. Avoids the cancellation of the
  alternating direct series for large |z|.
* 3F2(a1, a2, a3; b1, b2; 1): converges iff h = b1+b2-a1-a2-a3 > 0 and only
  polynomially (terms ~ k^-(1+h)), so the representation is first improved by
  breadth-first exploration of unit-argument parameter transformations, each
  contributing a positive Gamma-ratio prefactor, choosing the largest
  attainable margin. Exact parameter cancellations collapse the series to
  2F1 at 1 and are finished in closed form (Gauss summation). The surviving
  series is summed with a telescoping certificate: once the term ratio is
  provably below (k+A)/(k+A+1+hh) — verified by shifting a cubic polynomial
  and checking nonnegative coefficients — the tail after term t_K is at most
  t_K (K+A)/hh.

Truncation policy: stop when the certified tail drops below eps * partial sum
(eps defaults to 1e-14); hard cap of 1e6 terms. A cap-limited result whose
certified tail is still below 1e-6 of the sum is returned with its honest
tail_bound; anything worse raises NonConvergenceError. tail_bound covers
truncation only; floating accumulation adds O(terms_used) ulps on top.

The inner loops live in a compiled extension when available; set
MVLOMAX_PURE=1 to force the numpy fallback. Both backends are pure functions
and safe for concurrent use.
"""

from __future__ import annotations

import math
import operator
import os
from dataclasses import dataclass

from .errors import InputValidationError, NonConvergenceError

if os.environ.get("MVLOMAX_PURE"):
    from . import _kernels_pure as _kernels
    _BACKEND = "pure"
else:
    try:
        from . import _kernels_cy as _kernels  # type: ignore[attr-defined]
        _BACKEND = "compiled"
    except ImportError:
        from . import _kernels_pure as _kernels
        _BACKEND = "pure"

DEFAULT_EPS = 1e-14
TERM_CAP = 1_000_000
# certified-tail slack accepted when the term cap is exhausted
CAP_GRACE_REL = 1e-6

_lgamma = math.lgamma


def backend_name() -> str:
    """Which kernel backend this process is using: 'compiled' or 'pure'."""
    return _BACKEND


@dataclass(frozen=True)
class SeriesResult:
    """A truncated series value with a certified truncation bound."""

    value: float
    terms_used: int
    tail_bound: float

    def __post_init__(self):
        if self.terms_used < 1:
            raise InputValidationError("terms_used must be >= 1")
        if not self.tail_bound >= 0.0:
            raise InputValidationError("tail_bound must be nonnegative")


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = Gamma(a+n)/Gamma(a) for a > 0, integer n >= 0."""
    try:
        n = operator.index(n)
    except TypeError:
        raise InputValidationError(f"n must be an integer, got {n!r}") from None
    if n < 0:
        raise InputValidationError(f"n must be nonnegative, got {n}")
    a = float(a)
    if not a > 0.0:
        raise InputValidationError(f"a must be positive, got {a}")
    if n <= 24:
        out = 1.0
        for i in range(n):
            out *= a + i
        return out
    log_value = _lgamma(a + n) - _lgamma(a)
    # the true value can exceed float range (e.g. (50)_200 ~ 1e430); the
    # log-space route keeps intermediates finite and rounds the result to inf
    if log_value >= 710.0:
        return math.inf
    return math.exp(log_value)


def log_pochhammer(a: float, n: int) -> float:
    """log (a)_n, for the log-space density expansion sums."""
    if n == 0:
        return 0.0
    return _lgamma(a + n) - _lgamma(a)


def _finish(value: float, terms: int, tail: float, eps: float,
            what: str) -> SeriesResult:
    # cap policy: a result is returned iff its certified tail is honest and
    # small; eps is the target, CAP_GRACE_REL the worst slack tolerated when
    # the term cap cuts the summation short
    if tail <= max(eps, CAP_GRACE_REL) * abs(value):
        return SeriesResult(value, terms, tail)
    raise NonConvergenceError(
        f"{what}: term cap {terms} exhausted with certified tail "
        f"{tail:.3e} > {CAP_GRACE_REL:.0e} * value")


def gauss_2f1(a: float, b: float, c: float, z: float,
              eps: float = DEFAULT_EPS, cap: int = TERM_CAP) -> SeriesResult:
    """2F1(a, b; c; z) for a >= 0, b > 0, c > 0, z < 1, with certified tail."""
    a, b, c, z = float(a), float(b), float(c), float(z)
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(c)
            and math.isfinite(z)):
        raise InputValidationError("parameters must be finite")
    if a < 0.0:
        raise InputValidationError(f"a must be >= 0, got {a}")
    if b <= 0.0 or c <= 0.0:
        raise InputValidationError(f"b and c must be > 0, got b={b}, c={c}")
    if z >= 1.0:
        raise InputValidationError(
            f"2F1 series diverges for z >= 1 (got z={z}); unit-argument "
            "values are served by hyp_3f2_unit")

    log_pre = 0.0
    if z < 0.0:
        # Pfaff into [0, 1); pivot on whichever slot keeps parameters >= 0
        w = z / (z - 1.0)
        if c - a >= 0.0:
            log_pre = -b * math.log1p(-z)
            a = c - a
        elif c - b >= 0.0:
            log_pre = -a * math.log1p(-z)
            b = c - b
        else:
            raise InputValidationError(
                f"negative-z evaluation needs c >= min(a, b); got a={a}, "
                f"b={b}, c={c}")
        z = w

    if z == 0.0 or a == 0.0 or b == 0.0:
        return SeriesResult(math.exp(log_pre), 1, 0.0)

    value, terms, tail = _kernels.p2f1_series(a, b, c, z, eps, cap)
    pre = math.exp(log_pre)
    return _finish(pre * value, terms, pre * tail, eps, "2F1")


# ---------------------------------------------------------------------------
# 3F2 at unit argument


def _gauss_closed_form(a: float, b: float, c: float) -> float:
    # 2F1(a, b; c; 1) = Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b)),
    # valid for c - a - b > 0 (guaranteed by the caller's margin check)
    return math.exp(_lgamma(c) + _lgamma(c - a - b)
                    - _lgamma(c - a) - _lgamma(c - b))


def _unit_candidates(uppers: tuple[float, float, float],
                     lowers: tuple[float, float]):
    """Breadth-first orbit (depth 2) of unit-argument transformations.

    Each element: (hops, uppers sorted, lowers sorted, log prefactor).
    Singling out an upper parameter a maps
        (a, b, c; d, e) -> prefactor * (d-a, e-a, s; s+b, s+c),  s = d+e-a-b-c,
    and is admitted only when the new upper parameters stay nonnegative, so
    every candidate series has nonnegative terms.
    """
    start = (0, tuple(sorted(uppers)), tuple(sorted(lowers)), 0.0)
    out = [start]
    seen = {start[1] + start[2]}
    frontier = [start]
    for _ in range(2):
        nxt = []
        for hops, ups, lows, logpre in frontier:
            d, e = lows
            s = d + e - ups[0] - ups[1] - ups[2]
            for i in range(3):
                a = ups[i]
                if a <= 0.0:
                    continue
                rest = tuple(ups[j] for j in range(3) if j != i)
                new_ups = (d - a, e - a, s)
                if min(new_ups) < 0.0:
                    continue
                new_lows = (s + rest[0], s + rest[1])
                lp = (logpre + _lgamma(d) + _lgamma(e) + _lgamma(s)
                      - _lgamma(a) - _lgamma(new_lows[0]) - _lgamma(new_lows[1]))
                cand = (hops + 1, tuple(sorted(new_ups)),
                        tuple(sorted(new_lows)), lp)
                key = cand[1] + cand[2]
                if key in seen:
                    continue
                seen.add(key)
                out.append(cand)
                nxt.append(cand)
        frontier = nxt
    return out


def _poly_from_offsets(offsets) -> list[float]:
    # ascending coefficients of prod (k + o)
    coeffs = [1.0]
    for o in offsets:
        new = [0.0] * (len(coeffs) + 1)
        for i, cf in enumerate(coeffs):
            new[i] += cf * o
            new[i + 1] += cf
        coeffs = new
    return coeffs


def _certify_threshold(ups, lows, big_a: float, h_tilde: float) -> int:
    """Smallest K (by doubling) past which the term ratio of the 3F2 series
    is provably <= (k+big_a)/(k+big_a+1+h_tilde).

    The claim is the nonnegativity, for k >= K, of the cubic
        P(k) = (k+b1)(k+b2)(k+1)(k+big_a) - (k+a1)(k+a2)(k+a3)(k+big_a+1+h_tilde)
    (the quartic terms cancel; the leading cubic coefficient is h - h_tilde
    > 0). Nonnegative Taylor coefficients of P at K are sufficient.
    """
    lhs = _poly_from_offsets(list(lows) + [1.0, big_a])
    rhs = _poly_from_offsets(list(ups) + [big_a + 1.0 + h_tilde])
    a0, a1, a2, a3 = (lhs[i] - rhs[i] for i in range(4))
    k = 0.0
    while True:
        b0 = a0 + k * (a1 + k * (a2 + k * a3))
        b1 = a1 + k * (2.0 * a2 + 3.0 * k * a3)
        b2 = a2 + 3.0 * k * a3
        if b0 >= 0.0 and b1 >= 0.0 and b2 >= 0.0 and a3 > 0.0:
            return int(k)
        k = 1.0 if k == 0.0 else 2.0 * k
        if k > 2.0 ** 46:
            raise NonConvergenceError(
                "3F2 tail certificate unattainable (degenerate margin)")


def hyp_3f2_unit(a1: float, a2: float, a3: float, b1: float, b2: float,
                 eps: float = DEFAULT_EPS, cap: int = TERM_CAP) -> SeriesResult:
    """3F2(a1, a2, a3; b1, b2; 1) for nonnegative upper and positive lower
    parameters; requires convergence margin b1+b2-a1-a2-a3 > 0."""
    ups = (float(a1), float(a2), float(a3))
    lows = (float(b1), float(b2))
    if not all(math.isfinite(v) for v in ups + lows):
        raise InputValidationError("parameters must be finite")
    if min(ups) < 0.0:
        raise InputValidationError(f"upper parameters must be >= 0, got {ups}")
    if min(lows) <= 0.0:
        raise InputValidationError(f"lower parameters must be > 0, got {lows}")
    if min(ups) == 0.0:
        return SeriesResult(1.0, 1, 0.0)
    h = lows[0] + lows[1] - ups[0] - ups[1] - ups[2]
    if h <= 0.0:
        raise NonConvergenceError(
            f"3F2 at unit argument has no finite value: convergence margin "
            f"h = b1+b2-a1-a2-a3 = {h:.6g} <= 0 (tail indices too heavy)")

    candidates = _unit_candidates(ups, lows)

    # closed forms first: a zero upper parameter or an exact upper/lower
    # cancellation ends the evaluation without any series
    for hops, cu, cl, logpre in candidates:
        if cu[0] == 0.0:
            return SeriesResult(math.exp(logpre), 1, 0.0)
    for hops, cu, cl, logpre in candidates:
        for iu in range(3):
            for il in range(2):
                if cu[iu] == cl[il]:
                    ra, rb = (cu[j] for j in range(3) if j != iu)
                    rc = cl[1 - il]
                    s = rc - ra - rb
                    if s <= 0.0:
                        continue
                    value = math.exp(logpre) * _gauss_closed_form(ra, rb, rc)
                    return SeriesResult(value, 1, 0.0)

    # otherwise: largest margin wins (BFS order breaks ties at fewer hops)
    def margin(cand):
        _, cu, cl, _ = cand
        return cl[0] + cl[1] - cu[0] - cu[1] - cu[2]

    best = max(candidates, key=margin)
    _, cu, cl, logpre = best
    hb = margin(best)
    big_a = max(cl[1], 1.0)
    h_tilde = 0.5 * hb
    k_cert = _certify_threshold(cu, cl, big_a, h_tilde)
    value, terms, tail = _kernels.p3f2_unit_series(
        cu[0], cu[1], cu[2], cl[0], cl[1], eps, cap, k_cert, big_a, h_tilde)
    pre = math.exp(logpre)
    return _finish(pre * value, terms, pre * tail, eps, "3F2(.;1)")
