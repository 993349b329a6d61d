# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _pykernels; same contracts, C loops for the hot path."""

from libc.math cimport fabs, sqrt, log

import numpy as np


def backend_name():
    return "cython"


def stats_for_order(ranks, int m):
    """(tv, hellinger, kl, sup) of the order-m sample copula vs independence."""
    r = np.ascontiguousarray(ranks, dtype=np.int64)
    out = np.empty(4, dtype=np.float64)
    _order_stats(r, m, out, 0)
    return float(out[0]), float(out[1]), float(out[2]), float(out[3])


def eta_profile(ranks):
    """[tv, hellinger, kl, sup] at order 2 then order 3, as a length-8 array."""
    r = np.ascontiguousarray(ranks, dtype=np.int64)
    out = np.empty(8, dtype=np.float64)
    _order_stats(r, 2, out, 0)
    _order_stats(r, 3, out, 4)
    return out


cdef void _order_stats(const long long[:, ::1] ranks, Py_ssize_t m,
                       double[::1] out, Py_ssize_t off):
    cdef Py_ssize_t n = ranks.shape[0]
    cdef Py_ssize_t d = ranks.shape[1]
    cdef Py_ssize_t nboxes = 1, ngrid = 1
    cdef Py_ssize_t i, j, p, flat, gflat, digit, rem
    cdef long long b
    for j in range(d):
        nboxes *= m
        ngrid *= m + 1

    counts_arr = np.zeros(nboxes, dtype=np.int64)
    cum_arr = np.zeros(ngrid, dtype=np.int64)
    strides_arr = np.empty(d, dtype=np.intp)
    cdef long long[::1] counts = counts_arr
    cdef long long[::1] cum = cum_arr
    cdef Py_ssize_t[::1] gstride = strides_arr
    gstride[d - 1] = 1
    for j in range(d - 2, -1, -1):
        gstride[j] = gstride[j + 1] * (m + 1)

    for i in range(n):
        flat = 0
        for j in range(d):
            b = (ranks[i, j] * m + (n - 1)) // n - 1
            flat = flat * m + <Py_ssize_t> b
        counts[flat] += 1

    cdef double md = <double> nboxes
    cdef double w = 1.0 / md
    cdef double tv = 0.0, hel = 0.0, kl = 0.0, f, s
    for i in range(nboxes):
        f = counts[i] * md / n
        tv += fabs(f - 1.0)
        s = sqrt(f) - 1.0
        hel += s * s
        if f > 0.0:
            kl += f * log(f)
    out[off] = 0.5 * tv * w
    out[off + 1] = sqrt(0.5 * hel * w)
    out[off + 2] = kl * w

    # scatter counts to the interior of the (m+1)^d lattice
    for i in range(nboxes):
        rem = i
        gflat = 0
        for j in range(d - 1, -1, -1):
            digit = rem % m
            rem //= m
            gflat += (digit + 1) * gstride[j]
        cum[gflat] = counts[i]

    # prefix sums along each axis; increasing flat order keeps dependencies met
    cdef Py_ssize_t stride
    for j in range(d):
        stride = gstride[j]
        for p in range(ngrid):
            if (p // stride) % (m + 1) > 0:
                cum[p] += cum[p - stride]

    # supremum over grid points of |T - product|
    cdef double sup = 0.0, pi, diff
    for p in range(ngrid):
        rem = p
        pi = 1.0
        for j in range(d):
            digit = rem // gstride[j]
            rem -= digit * gstride[j]
            pi *= (<double> digit) / m
        diff = fabs((<double> cum[p]) / n - pi)
        if diff > sup:
            sup = diff
    out[off + 3] = sup
