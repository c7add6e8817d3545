"""Compiled inner loops for the pairwise string metrics.

Sequences are packed into flat int64 arrays with an offsets table so the
jitted kernels never touch Python objects.  Each kernel sums its metric
over an explicit list of (i, j) pairs with Kahan compensation, which
keeps the reduction bit-identical no matter how pairs are chunked
across workers.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def lcs_length(a: np.ndarray, b: np.ndarray) -> int:
    n, m = a.shape[0], b.shape[0]
    if n == 0 or m == 0:
        return 0
    prev = np.zeros(m + 1, dtype=np.int64)
    curr = np.zeros(m + 1, dtype=np.int64)
    for i in range(n):
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                curr[j + 1] = prev[j] + 1
            elif prev[j + 1] >= curr[j]:
                curr[j + 1] = prev[j + 1]
            else:
                curr[j + 1] = curr[j]
        prev, curr = curr, prev
    return prev[m]


@njit(cache=True, nogil=True)
def edit_distance(a: np.ndarray, b: np.ndarray) -> int:
    n, m = a.shape[0], b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    prev = np.arange(m + 1)
    curr = np.zeros(m + 1, dtype=np.int64)
    for i in range(n):
        curr[0] = i + 1
        ai = a[i]
        for j in range(m):
            cost = 0 if ai == b[j] else 1
            best = prev[j] + cost
            if prev[j + 1] + 1 < best:
                best = prev[j + 1] + 1
            if curr[j] + 1 < best:
                best = curr[j] + 1
            curr[j + 1] = best
        prev, curr = curr, prev
    return prev[m]


@njit(cache=True, nogil=True)
def rouge_l_pair_sum(
    flat: np.ndarray,
    offsets: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
) -> float:
    """Kahan sum of LCS-based F1 over the listed sequence pairs."""
    total = 0.0
    comp = 0.0
    for p in range(left.shape[0]):
        i, j = left[p], right[p]
        a = flat[offsets[i] : offsets[i + 1]]
        b = flat[offsets[j] : offsets[j + 1]]
        lcs = lcs_length(a, b)
        if lcs == 0:
            f1 = 0.0
        else:
            precision = lcs / b.shape[0]
            recall = lcs / a.shape[0]
            f1 = 2.0 * precision * recall / (precision + recall)
        y = f1 - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


@njit(cache=True, nogil=True)
def edit_distance_pair_sum(
    flat: np.ndarray,
    offsets: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
) -> float:
    """Kahan sum of character edit distances over the listed pairs."""
    total = 0.0
    comp = 0.0
    for p in range(left.shape[0]):
        i, j = left[p], right[p]
        a = flat[offsets[i] : offsets[i + 1]]
        b = flat[offsets[j] : offsets[j + 1]]
        y = float(edit_distance(a, b)) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total
