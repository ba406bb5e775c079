"""Pure-Python (numpy-vectorized) versions of the hot counting kernels.

Same contracts as the compiled ``_speedups`` module; selected automatically
when the extension is unavailable (or when APSQUARES_FORCE_FALLBACK is set).

All three kernels count lattice points of a diagonal quaternary form with a
per-coordinate filter on |x_j|.  The strategy is meet-in-the-middle: tabulate
weighted counts for the two smallest coefficients into an array indexed by the
partial sum, then sweep the outer two coordinates and gather.
"""

from __future__ import annotations

from math import isqrt

import numpy as np


def _coord_values(coeff: int, budget: int, allowed) -> tuple[np.ndarray, np.ndarray]:
    """Admissible |x| values (and their sign weights) with coeff*x^2 <= budget."""
    if budget < 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    vmax = isqrt(budget // coeff)
    vals = np.arange(vmax + 1, dtype=np.int64)
    if allowed is not None:
        mask = np.asarray(allowed[: vmax + 1], dtype=bool)
        if mask.size < vmax + 1:
            mask = np.pad(mask, (0, vmax + 1 - mask.size))
        vals = vals[mask]
    weights = np.where(vals == 0, 1, 2).astype(np.int64)
    return vals, weights


def _pair_table(c2: int, c3: int, m: int, al2, al3) -> np.ndarray:
    """cnt[t] = weighted number of (x2, x3) with c2 x2^2 + c3 x3^2 = t <= m."""
    cnt = np.zeros(m + 1, dtype=np.int64)
    v2, w2 = _coord_values(c2, m, al2)
    v3, w3 = _coord_values(c3, m, al3)
    s3 = c3 * v3 * v3
    for v, w in zip(v2.tolist(), w2.tolist()):
        s2 = c2 * v * v
        rem = m - s2
        k = np.searchsorted(s3, rem, side="right")
        cnt[s2 + s3[:k]] += w * w3[:k]
    return cnt


def count_signed_allowed(a, m: int, allowed) -> int:
    """Number of signed solutions of sum a_j x_j^2 = m with |x_j| filtered.

    ``allowed`` is a 4-tuple; each entry is ``None`` (no restriction) or a
    uint8/bool array indexed by |x_j| (shorter arrays are treated as rejecting
    beyond their end).
    """
    if m < 0:
        return 0
    a = list(a)
    if len(a) != 4:
        raise ValueError("kernel expects exactly 4 coefficients")
    order = sorted(range(4), key=lambda j: a[j], reverse=True)
    c = [a[j] for j in order]
    al = [allowed[j] for j in order]
    cnt = _pair_table(c[2], c[3], m, al[2], al[3])
    total = 0
    v0, w0 = _coord_values(c[0], m, al[0])
    for v, w in zip(v0.tolist(), w0.tolist()):
        rem0 = m - c[0] * v * v
        v1, w1 = _coord_values(c[1], rem0, al[1])
        idx = rem0 - c[1] * v1 * v1
        total += w * int(np.dot(w1, cnt[idx]))
    return total


def count_signed(a, m: int) -> int:
    return count_signed_allowed(a, m, (None, None, None, None))


def lattice_count_leq(a, n: int) -> int:
    """Number of x in Z^4 with sum a_j x_j^2 <= n."""
    if n < 0:
        return 0
    a = list(a)
    if len(a) != 4:
        raise ValueError("kernel expects exactly 4 coefficients")
    order = sorted(range(4), key=lambda j: a[j], reverse=True)
    c = [a[j] for j in order]
    cnt = _pair_table(c[2], c[3], n, None, None)
    np.cumsum(cnt, out=cnt)
    total = 0
    v0, w0 = _coord_values(c[0], n, None)
    for v, w in zip(v0.tolist(), w0.tolist()):
        rem0 = n - c[0] * v * v
        v1, w1 = _coord_values(c[1], rem0, None)
        idx = rem0 - c[1] * v1 * v1
        total += w * int(np.dot(w1, cnt[idx]))
    return total


def rep_counts_upto(a, n_max: int) -> np.ndarray:
    """r_Q(n) for every 0 <= n <= n_max at once, by theta-series convolution.

    Exact in int64: entries are bounded by r_Q(n) <= R_Q(n) = O(n^2), far from
    overflow at desk scale.
    """
    a = list(a)
    theta = []
    for coeff in a:
        v = np.zeros(n_max + 1, dtype=np.int64)
        vmax = isqrt(n_max // coeff)
        sq = coeff * np.arange(vmax + 1, dtype=np.int64) ** 2
        v[sq] = 2
        v[0] = 1
        theta.append(v)
    out = theta[0]
    for v in theta[1:]:
        out = np.convolve(out, v)[: n_max + 1]
    return out
