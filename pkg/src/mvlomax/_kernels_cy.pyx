# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled series kernels; contract twin of `mvlomax._kernels_pure`.

Same three functions, same return conventions, scalar C loops with
compensated (Kahan) accumulation so both backends agree to near machine
precision. Kernels are exception-free: they report through return values
and `mvlomax.specfun` decides what is an error.
"""

from libc.math cimport INFINITY

import numpy as np


def p2f1_series(double a, double b, double c, double z,
                double eps, long long cap):
    cdef double total = 1.0
    cdef double comp = 0.0
    cdef double term = 1.0
    cdef long long count = 1
    cdef double k, f1, f2, rbar, t_next, tail, y, t
    while True:
        k = <double> count  # first omitted index
        f1 = (a + k) / (1.0 + k)
        if f1 < 1.0:
            f1 = 1.0
        f2 = (b + k) / (c + k)
        if f2 < 1.0:
            f2 = 1.0
        rbar = z * f1 * f2
        t_next = term * z * (a + k - 1.0) * (b + k - 1.0) \
            / ((c + k - 1.0) * k)
        if rbar < 1.0:
            tail = t_next / (1.0 - rbar)
            if tail <= eps * total or count >= cap:
                return total, count, tail
        elif count >= cap:
            return total, count, INFINITY
        term = t_next
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        count += 1


def p3f2_unit_series(double a1, double a2, double a3, double b1, double b2,
                     double eps, long long cap, long long k_certify,
                     double big_a, double h_tilde):
    cdef double total = 1.0
    cdef double comp = 0.0
    cdef double term = 1.0
    cdef long long count = 1
    cdef long long last
    cdef double dl, tail, y, t
    while True:
        last = count - 1
        if last >= k_certify:
            tail = term * ((<double> last) + big_a) / h_tilde
            if tail <= eps * total or count >= cap:
                return total, count, tail
        elif count >= cap:
            return total, count, INFINITY
        dl = <double> last
        term *= (a1 + dl) * (a2 + dl) * (a3 + dl) \
            / ((b1 + dl) * (b2 + dl) * (1.0 + dl))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        count += 1


def mosch_weights(object gam, object rho, double c_plus,
                  double eps, long long cap):
    cdef double[::1] gamv = np.ascontiguousarray(gam, dtype=np.float64)
    cdef double[::1] rhov = np.ascontiguousarray(rho, dtype=np.float64)
    cdef Py_ssize_t nf = gamv.shape[0]
    cdef Py_ssize_t size = 256
    weights_arr = np.zeros(size)
    gvals_arr = np.zeros(size)
    cdef double[::1] weights = weights_arr
    cdef double[::1] gvals = gvals_arr
    pw_arr = np.array(rhov, dtype=np.float64, copy=True)
    cdef double[::1] pw = pw_arr
    cdef double cum = c_plus
    cdef Py_ssize_t k = 1
    cdef Py_ssize_t i, l
    cdef double acc, comp, y, t
    weights[0] = c_plus
    while cum < 1.0 - eps and k < cap:
        if k >= size:
            size *= 2
            weights_arr = np.concatenate([weights_arr, np.zeros(size // 2)])
            gvals_arr = np.concatenate([gvals_arr, np.zeros(size // 2)])
            weights = weights_arr
            gvals = gvals_arr
        acc = 0.0
        for i in range(nf):
            acc += gamv[i] * pw[i]
            pw[i] *= rhov[i]
        gvals[k] = acc
        acc = 0.0
        comp = 0.0
        for l in range(1, k + 1):
            y = gvals[l] * weights[k - l] - comp
            t = acc + y
            comp = (t - acc) - y
            acc = t
        weights[k] = acc / (<double> k)
        cum += weights[k]
        k += 1
    return weights_arr[:k].copy(), cum
