"""Fallback kernel implementations in numpy/scipy.

These mirror the numba kernels exactly in semantics. Integer kernels
(xoshiro_fill, mtf_from_bins, recurrence_matrix) are bit-identical to the
jitted versions; float reductions (paa_shrink) may differ in the last ulp
because the summation order differs.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

_MASK = (1 << 64) - 1


def xoshiro_fill(state: np.ndarray, out: np.ndarray) -> None:
    """Advance a xoshiro256** state and fill ``out`` with raw uint64 draws.

    ``state`` is a uint64 array of shape (4,), updated in place.
    """
    s0, s1, s2, s3 = (int(state[0]), int(state[1]), int(state[2]), int(state[3]))
    n = out.shape[0]
    for i in range(n):
        x = (s1 * 5) & _MASK
        x = ((x << 7) | (x >> 57)) & _MASK
        out[i] = (x * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3


def one_pole_lowpass(x: np.ndarray, a: float) -> np.ndarray:
    """y[n] = a*y[n-1] + (1-a)*x[n], zero initial state."""
    return lfilter([1.0 - a], [1.0, -a], x)


def recurrence_matrix(x: np.ndarray, epsilon: float) -> np.ndarray:
    return (np.abs(x[:, None] - x[None, :]) > epsilon).astype(np.float64)


def gasf_from_angles(theta: np.ndarray) -> np.ndarray:
    return np.cos(theta[:, None] + theta[None, :])


def mtf_from_bins(bins: np.ndarray, n_bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Transition matrix W (rows sum to 1) and field M from a bin sequence."""
    counts = np.zeros((n_bins, n_bins), dtype=np.float64)
    np.add.at(counts, (bins[:-1], bins[1:]), 1.0)
    w = np.empty_like(counts)
    totals = counts.sum(axis=1)
    for a in range(n_bins):
        if totals[a] > 0:
            w[a, :] = counts[a, :] / totals[a]
        else:
            w[a, :] = 0.0
            w[a, a] = 1.0
    m = w[bins[:, None], bins[None, :]]
    return w, m


def paa_shrink(x: np.ndarray, target_len: int) -> np.ndarray:
    """Fractional-bin piecewise aggregate approximation, target_len <= len(x)."""
    n = x.shape[0]
    cs = np.concatenate(([0.0], np.cumsum(x)))
    width = n / target_len
    edges = np.arange(target_len + 1) * width
    integ = np.interp(edges, np.arange(n + 1, dtype=np.float64), cs)
    return np.diff(integ) / width
