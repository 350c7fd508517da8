"""JIT-compiled kernels for the hot inner loops.

Signatures match numpy_impl exactly. All kernels release the GIL so the
dataset builder can run windows on a thread pool.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, uint64


@njit(cache=True, nogil=True)
def xoshiro_fill(state, out):
    s0 = uint64(state[0])
    s1 = uint64(state[1])
    s2 = uint64(state[2])
    s3 = uint64(state[3])
    n = out.shape[0]
    for i in range(n):
        x = s1 * uint64(5)
        x = (x << uint64(7)) | (x >> uint64(57))
        out[i] = x * uint64(9)
        t = s1 << uint64(17)
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = (s3 << uint64(45)) | (s3 >> uint64(19))
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3


@njit(cache=True, nogil=True)
def one_pole_lowpass(x, a):
    n = x.shape[0]
    y = np.empty(n, dtype=np.float64)
    b = 1.0 - a
    prev = 0.0
    for i in range(n):
        prev = b * x[i] + a * prev
        y[i] = prev
    return y


@njit(cache=True, nogil=True)
def recurrence_matrix(x, epsilon):
    n = x.shape[0]
    r = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        r[i, i] = 0.0
        for j in range(i + 1, n):
            v = 1.0 if abs(x[i] - x[j]) > epsilon else 0.0
            r[i, j] = v
            r[j, i] = v
    return r


@njit(cache=True, nogil=True)
def gasf_from_angles(theta):
    n = theta.shape[0]
    g = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i, n):
            v = math.cos(theta[i] + theta[j])
            g[i, j] = v
            g[j, i] = v
    return g


@njit(cache=True, nogil=True)
def mtf_from_bins(bins, n_bins):
    counts = np.zeros((n_bins, n_bins), dtype=np.float64)
    n = bins.shape[0]
    for t in range(n - 1):
        counts[bins[t], bins[t + 1]] += 1.0
    w = np.empty((n_bins, n_bins), dtype=np.float64)
    for a in range(n_bins):
        total = 0.0
        for b in range(n_bins):
            total += counts[a, b]
        if total > 0.0:
            for b in range(n_bins):
                w[a, b] = counts[a, b] / total
        else:
            for b in range(n_bins):
                w[a, b] = 0.0
            w[a, a] = 1.0
    m = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            m[i, j] = w[bins[i], bins[j]]
    return w, m


@njit(cache=True, nogil=True)
def paa_shrink(x, target_len):
    n = x.shape[0]
    out = np.empty(target_len, dtype=np.float64)
    width = n / target_len
    for i in range(target_len):
        lo = i * width
        hi = (i + 1) * width
        if hi > n:
            hi = n
        acc = 0.0
        j = int(math.floor(lo))
        j_end = int(math.ceil(hi))
        if j_end > n:
            j_end = n
        while j < j_end:
            left = lo if lo > j else float(j)
            right = hi if hi < j + 1 else float(j + 1)
            if right > left:
                acc += x[j] * (right - left)
            j += 1
        out[i] = acc / width
    return out
