# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled counting kernels: same contracts as kernels._fallback.

The meet-in-the-middle table lives in a numpy scratch array (buffer protocol
only; no numpy C headers needed).
"""

import numpy as np

from libc.math cimport sqrt


cdef inline long long _isqrt(long long n) nogil:
    cdef long long r
    if n < 0:
        return -1
    r = <long long> sqrt(<double> n)
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


cdef int _fill_pair_table(long long c2, long long c3, long long m,
                          const unsigned char[:] al2, const unsigned char[:] al3,
                          long long[:] cnt) except -1:
    cdef long long v2, v3, s2, s3, w2, w3, lim2, lim3
    lim2 = _isqrt(m // c2)
    for v2 in range(lim2 + 1):
        if al2 is not None:
            if v2 >= al2.shape[0] or not al2[v2]:
                continue
        s2 = c2 * v2 * v2
        w2 = 1 if v2 == 0 else 2
        lim3 = _isqrt((m - s2) // c3)
        for v3 in range(lim3 + 1):
            if al3 is not None:
                if v3 >= al3.shape[0] or not al3[v3]:
                    continue
            w3 = 1 if v3 == 0 else 2
            cnt[s2 + c3 * v3 * v3] += w2 * w3
    return 0


def count_signed_allowed(a, long long m, allowed):
    """Signed solution count of sum a_j x_j^2 = m with per-coordinate filters."""
    if m < 0:
        return 0
    cdef list idx = sorted(range(4), key=lambda j: a[j], reverse=True)
    cdef long long c0 = a[idx[0]], c1 = a[idx[1]], c2 = a[idx[2]], c3 = a[idx[3]]
    al = [allowed[j] for j in idx]
    cdef const unsigned char[:] al0 = al[0], al1 = al[1], al2 = al[2], al3 = al[3]
    cnt_arr = np.zeros(m + 1, dtype=np.int64)
    cdef long long[:] cnt = cnt_arr
    _fill_pair_table(c2, c3, m, al2, al3, cnt)

    cdef long long total = 0, v0, v1, w0, w1, rem0, lim0, lim1
    lim0 = _isqrt(m // c0)
    for v0 in range(lim0 + 1):
        if al0 is not None:
            if v0 >= al0.shape[0] or not al0[v0]:
                continue
        w0 = 1 if v0 == 0 else 2
        rem0 = m - c0 * v0 * v0
        lim1 = _isqrt(rem0 // c1)
        for v1 in range(lim1 + 1):
            if al1 is not None:
                if v1 >= al1.shape[0] or not al1[v1]:
                    continue
            w1 = 1 if v1 == 0 else 2
            total += w0 * w1 * cnt[rem0 - c1 * v1 * v1]
    return total


def count_signed(a, long long m):
    return count_signed_allowed(a, m, (None, None, None, None))


def lattice_count_leq(a, long long n):
    """Number of x in Z^4 with sum a_j x_j^2 <= n."""
    if n < 0:
        return 0
    cdef list idx = sorted(range(4), key=lambda j: a[j], reverse=True)
    cdef long long c0 = a[idx[0]], c1 = a[idx[1]], c2 = a[idx[2]], c3 = a[idx[3]]
    cnt_arr = np.zeros(n + 1, dtype=np.int64)
    cdef long long[:] cnt = cnt_arr
    _fill_pair_table(c2, c3, n, None, None, cnt)
    cdef long long i
    for i in range(1, n + 1):
        cnt[i] += cnt[i - 1]

    cdef long long total = 0, v0, v1, w0, w1, rem0, lim0, lim1
    lim0 = _isqrt(n // c0)
    for v0 in range(lim0 + 1):
        w0 = 1 if v0 == 0 else 2
        rem0 = n - c0 * v0 * v0
        lim1 = _isqrt(rem0 // c1)
        for v1 in range(lim1 + 1):
            w1 = 1 if v1 == 0 else 2
            total += w0 * w1 * cnt[rem0 - c1 * v1 * v1]
    return total


def rep_counts_upto(a, long long n_max):
    """r_Q(n) for all n <= n_max via integer theta-series convolution."""
    thetas = []
    cdef long long coeff, vmax
    for coeff in a:
        v = np.zeros(n_max + 1, dtype=np.int64)
        vmax = _isqrt(n_max // coeff)
        sq = coeff * np.arange(vmax + 1, dtype=np.int64) ** 2
        v[sq] = 2
        v[0] = 1
        thetas.append(v)
    out = thetas[0]
    for v in thetas[1:]:
        out = np.convolve(out, v)[: n_max + 1]
    return out
