"""Pure-Python (numpy-blocked) series kernels.

Fallback backend for `mvlomax.specfun`. The compiled twin
(`mvlomax._kernels_cy`) implements the same three functions with identical
contracts; `specfun` picks whichever is importable. Everything here is
deliberately exception-free: kernels report what happened through their return
values and the wrapper decides what is an error.

Contracts
---------
p2f1_series(a, b, c, z, eps, cap) -> (value, terms_used, tail_bound)
    Sum_{k>=0} (a)_k (b)_k / ((c)_k k!) z^k for a, b >= 0, c > 0,
    0 <= z < 1. All terms are nonnegative. tail_bound is certified through
    the geometric majorant of the term ratio
        r(k) = z * (a+k)(b+k) / ((c+k)(1+k)),
    whose supremum over k >= K is z * max(1,(a+K)/(1+K)) * max(1,(b+K)/(c+K))
    because each factor is monotone toward 1. Stops once tail_bound <=
    eps * sum; on cap exhaustion tail_bound reports the bound reached (inf if
    the majorant has not dropped below 1 yet).

p3f2_unit_series(a1, a2, a3, b1, b2, eps, cap, k_certify, big_a, h_tilde)
    -> (value, terms_used, tail_bound)
    Same scheme at unit argument, where no geometric majorant exists. The
    wrapper precomputes (k_certify, big_a, h_tilde) such that the term ratio
    satisfies r(k) <= (k+big_a)/(k+big_a+1+h_tilde) for every k >= k_certify;
    the tail after the included term t_K is then at most t_K*(K+big_a)/h_tilde
    (telescoping product bound). The kernel never claims a bound before
    k_certify.

mosch_weights(gam, rho, c_plus, eps, cap) -> (weights, cum_mass)
    Nonnegative mixture weights of a sum of independent gammas:
    w_0 = c_plus, w_k = k^{-1} sum_{l=1..k} g_l w_{k-l},
    g_l = sum_i gam_i rho_i^l, truncated once the cumulative mass reaches
    1 - eps. The recursion runs directly on the weights (all <= 1), so it
    cannot overflow no matter how extreme the rate spread is.
"""

from __future__ import annotations

import math

import numpy as np


def p2f1_series(a: float, b: float, c: float, z: float,
                eps: float, cap: int) -> tuple[float, int, float]:
    partial = [1.0]
    term = 1.0
    count = 1
    block = 16
    while True:
        ks = (count - 1.0) + np.arange(min(block, cap - count), dtype=float)
        if ks.size:
            ratios = z * (a + ks) * (b + ks) / ((c + ks) * (1.0 + ks))
            terms = term * np.cumprod(ratios)
            partial.append(float(np.sum(terms)))
            term = float(terms[-1])
            count += ks.size
        total = math.fsum(partial)
        k_next = float(count)  # first omitted index
        rbar = z * max(1.0, (a + k_next) / (1.0 + k_next)) \
                 * max(1.0, (b + k_next) / (c + k_next))
        if rbar < 1.0:
            t_next = term * z * (a + count - 1.0) * (b + count - 1.0) \
                / ((c + count - 1.0) * float(count))
            tail = t_next / (1.0 - rbar)
            if tail <= eps * total or count >= cap:
                return total, count, tail
        elif count >= cap:
            return total, count, math.inf
        block = min(block * 2, 4096)


def p3f2_unit_series(a1: float, a2: float, a3: float, b1: float, b2: float,
                     eps: float, cap: int, k_certify: int, big_a: float,
                     h_tilde: float) -> tuple[float, int, float]:
    partial = [1.0]
    term = 1.0
    count = 1
    block = 64
    while True:
        ks = (count - 1.0) + np.arange(min(block, cap - count), dtype=float)
        if ks.size:
            ratios = (a1 + ks) * (a2 + ks) * (a3 + ks) \
                / ((b1 + ks) * (b2 + ks) * (1.0 + ks))
            terms = term * np.cumprod(ratios)
            partial.append(float(np.sum(terms)))
            term = float(terms[-1])
            count += ks.size
        total = math.fsum(partial)
        last = count - 1
        if last >= k_certify:
            tail = term * (last + big_a) / h_tilde
            if tail <= eps * total or count >= cap:
                return total, count, tail
        elif count >= cap:
            return total, count, math.inf
        block = min(block * 2, 16384)


def mosch_weights(gam: np.ndarray, rho: np.ndarray, c_plus: float,
                  eps: float, cap: int) -> tuple[np.ndarray, float]:
    size = 256
    weights = np.zeros(size)
    g = np.zeros(size)
    weights[0] = c_plus
    cum = c_plus
    pw = rho.copy()
    k = 1
    while cum < 1.0 - eps and k < cap:
        if k >= size:
            size *= 2
            weights = np.concatenate([weights, np.zeros(size // 2)])
            g = np.concatenate([g, np.zeros(size // 2)])
        g[k] = float(np.dot(gam, pw))
        pw *= rho
        weights[k] = float(np.dot(g[1:k + 1], weights[k - 1::-1])) / k
        cum += weights[k]
        k += 1
    return weights[:k].copy(), cum
