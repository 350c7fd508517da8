"""Windowing pipeline: resampling, segmentation, z-normalization, labeling, PAA.

All operations are pure; callers may process windows in parallel. The
output ordering contract is by (recording_id, start_s).
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .core import (
    CATEGORIES,
    CATEGORY_INDEX,
    Annotation,
    ConfigError,
    InputError,
    MultiChannelRecording,
    Window,
)
from . import kernels

#: Kaiser window shape for the anti-aliasing FIR; beta 8.6 gives ~87 dB stop-band.
_KAISER_BETA = 8.6
_CUTOFF_FRACTION = 0.45
#: Channels whose population std falls below this are zeroed and flagged.
ZERO_VARIANCE_STD = 1e-12
#: A window is labeled with an event iff their overlap reaches
#: min(LABEL_OVERLAP_S, event duration).
LABEL_OVERLAP_S = 0.5


def _kaiser_lowpass_taps(src_hz: float, dst_hz: float) -> np.ndarray:
    cutoff = _CUTOFF_FRACTION * dst_hz
    transition_hz = (0.5 - _CUTOFF_FRACTION) * dst_hz
    atten_db = _KAISER_BETA / 0.1102 + 8.7
    delta_omega = 2.0 * np.pi * transition_hz / src_hz
    n_taps = int(np.ceil((atten_db - 7.95) / (2.285 * delta_omega))) + 1
    if n_taps % 2 == 0:
        n_taps += 1
    m = np.arange(n_taps) - (n_taps - 1) / 2
    ideal = 2.0 * cutoff / src_hz * np.sinc(2.0 * cutoff / src_hz * m)
    taps = ideal * np.kaiser(n_taps, _KAISER_BETA)
    return taps / taps.sum()


def resample(samples: np.ndarray, src_hz: float, dst_hz: float) -> np.ndarray:
    """Resample to ``floor(len * dst/src)`` samples.

    Downsampling low-pass filters first (linear-phase Kaiser FIR, cutoff
    0.45*dst_hz) and then linearly interpolates at the new sample grid.
    Equal rates return an identical copy.
    """
    if src_hz <= 0 or dst_hz <= 0:
        raise ConfigError("resample: sample rates must be > 0")
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise InputError("resample: empty input")
    if src_hz == dst_hz:
        return x.copy()
    n = x.shape[0]
    out_len = int(np.floor(n * dst_hz / src_hz + 1e-9))
    if dst_hz < src_hz:
        taps = _kaiser_lowpass_taps(src_hz, dst_hz)
        half = (len(taps) - 1) // 2
        # Odd (point-symmetric) edge extension keeps the first derivative
        # continuous so filter transients stay small near the ends.
        pad = min(half, n - 1)
        left = 2.0 * x[0] - x[pad:0:-1] if pad else np.empty(0)
        right = 2.0 * x[-1] - x[-2 : -2 - pad : -1] if pad else np.empty(0)
        padded = np.concatenate([left, x, right])
        if pad < half:
            padded = np.pad(padded, half - pad, mode="edge")
        x = np.convolve(padded, taps, mode="valid")
    positions = np.arange(out_len) * (src_hz / dst_hz)
    return np.interp(positions, np.arange(n, dtype=np.float64), x)


def resample_recording(recording: MultiChannelRecording, dst_hz: float) -> MultiChannelRecording:
    if recording.sample_rate_hz == dst_hz:
        return recording
    data = np.stack([resample(row, recording.sample_rate_hz, dst_hz) for row in recording.data])
    return MultiChannelRecording(
        recording.recording_id, float(dst_hz), recording.channel_names, data, recording.annotations
    )


def segment(
    recording: MultiChannelRecording, window_s: float, overlap_fraction: float
) -> list[Window]:
    """Cut fixed-length windows at stride window_s*(1-overlap); partial windows are dropped."""
    if window_s <= 0:
        raise ConfigError("segment: window_s must be > 0")
    if not (0 <= overlap_fraction < 1):
        raise ConfigError("segment: overlap_fraction must be in [0, 1)")
    rate = recording.sample_rate_hz
    stride = window_s * (1.0 - overlap_fraction)
    duration = recording.duration_s
    n_win = int(round(window_s * rate))
    windows: list[Window] = []
    k = 0
    while True:
        start = k * stride
        if start + window_s > duration + 1e-9:
            break
        i0 = int(round(start * rate))
        if i0 + n_win > recording.n_samples:
            break
        windows.append(
            Window(
                window_id=f"{recording.recording_id}_w{k:05d}",
                recording_id=recording.recording_id,
                start_s=start,
                length_s=window_s,
                sample_rate_hz=rate,
                data=recording.data[:, i0 : i0 + n_win].copy(),
            )
        )
        k += 1
    return windows


def znormalize(window: Window) -> Window:
    """Per-channel z-transform with population std; flat channels are zeroed and flagged."""
    data = window.data
    mean = data.mean(axis=1, keepdims=True)
    std = data.std(axis=1, keepdims=True)  # population (ddof=0)
    flags = std[:, 0] < ZERO_VARIANCE_STD
    safe = np.where(flags[:, None], 1.0, std)
    normalized = np.where(flags[:, None], 0.0, (data - mean) / safe)
    return dataclasses.replace(window, data=normalized, znorm_flags=tuple(bool(f) for f in flags))


def assign_labels(window: Window, annotations: list[Annotation] | tuple[Annotation, ...]) -> tuple[int, ...]:
    """Label vector: 1 where an event of that category overlaps the window
    by at least min(0.5 s, event duration)."""
    labels = [0] * len(CATEGORIES)
    w0, w1 = window.start_s, window.end_s
    for ann in annotations:
        overlap = min(w1, ann.end_s) - max(w0, ann.start_s)
        threshold = min(LABEL_OVERLAP_S, ann.duration_s)
        if overlap + 1e-9 >= threshold:
            labels[CATEGORY_INDEX[ann.category]] = 1
    return tuple(labels)


def paa(samples: np.ndarray, target_len: int) -> np.ndarray:
    """Piecewise aggregate approximation with fractional bins.

    Equal length is the identity; a larger target linearly interpolates.
    """
    if target_len < 1:
        raise ConfigError("paa: target_len must be >= 1")
    x = np.asarray(samples, dtype=np.float64)
    n = x.shape[0]
    if target_len == n:
        return x.copy()
    if target_len > n:
        if n == 1:
            return np.full(target_len, x[0])
        positions = np.linspace(0.0, n - 1.0, target_len)
        return np.interp(positions, np.arange(n, dtype=np.float64), x)
    return kernels.paa_shrink(x, target_len)
