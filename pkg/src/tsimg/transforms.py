"""The six image representations plus ensembling and resizing.

Transform functions take and return float64 ndarrays; 32-bit quantization
happens only when ``represent_window`` wraps the result in an ImageMatrix.
Time-frequency outputs store row 0 as the lowest frequency and row indices
ascend with frequency.

All functions are pure; per-channel and per-window parallelism is safe.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import kernels
from .core import (
    ConfigError,
    CwtConfig,
    ImageMatrix,
    InputError,
    RepresentationConfig,
    StftConfig,
    Window,
)
from .preprocess import ZERO_VARIANCE_STD, paa

#: Representation kinds accepted throughout the pipeline and CLI.
KINDS = ("cor", "rp", "gasf", "mtf", "cwt", "spec")

_MAX_EPSILON_PAIRS = 100_000


def correlation_matrix(
    data: np.ndarray, zero_variance_flags: tuple[bool, ...] | None = None
) -> np.ndarray:
    """Pearson correlation between channels, (n_channels, n_channels).

    Flagged (zero-variance) channels get 0 off-diagonal and 1 on the diagonal.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise InputError("correlation_matrix: need at least 2 channels")
    if data.shape[1] < 2:
        raise InputError("correlation_matrix: need at least 2 samples")
    centered = data - data.mean(axis=1, keepdims=True)
    std = centered.std(axis=1)
    flags = np.asarray(
        [bool(f) for f in zero_variance_flags] if zero_variance_flags is not None else std < ZERO_VARIANCE_STD
    )
    flags |= std < ZERO_VARIANCE_STD
    norm = np.where(flags, 1.0, std * np.sqrt(data.shape[1]))
    unit = centered / norm[:, None]
    corr = unit @ unit.T
    corr = (corr + corr.T) / 2.0
    corr[flags, :] = 0.0
    corr[:, flags] = 0.0
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)


def recurrence_plot(channel: np.ndarray, epsilon: float) -> np.ndarray:
    """Binary matrix: entry (i, j) is 1 where |x_i - x_j| exceeds epsilon."""
    if epsilon < 0:
        raise ConfigError("recurrence_plot: epsilon must be >= 0")
    x = np.asarray(channel, dtype=np.float64)
    return kernels.recurrence_matrix(x, float(epsilon))


def choose_epsilon(channel: np.ndarray, target_rate: float) -> float:
    """Smallest threshold keeping at least ``target_rate`` of pairs recurrent.

    Computed as the target_rate quantile of pairwise distances; long inputs
    are thinned to a deterministic subgrid keeping at most 1e5 pairs.
    """
    if not (0 < target_rate < 1):
        raise ConfigError("choose_epsilon: target_rate must be in (0, 1)")
    x = np.asarray(channel, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        return 0.0
    if n * (n - 1) // 2 > _MAX_EPSILON_PAIRS:
        m = int((1 + np.sqrt(1 + 8 * _MAX_EPSILON_PAIRS)) / 2)
        idx = np.unique(np.round(np.linspace(0, n - 1, m)).astype(np.int64))
        x = x[idx]
        n = x.shape[0]
    iu = np.triu_indices(n, k=1)
    dists = np.sort(np.abs(x[iu[0]] - x[iu[1]]))
    k = int(np.ceil(target_rate * dists.shape[0]))
    return float(dists[max(k, 1) - 1])


def _minmax_unit(x: np.ndarray) -> np.ndarray:
    lo, hi = x.min(), x.max()
    if hi - lo < 1e-12:
        return np.zeros_like(x)
    return np.clip((2.0 * x - hi - lo) / (hi - lo), -1.0, 1.0)


def gasf(channel: np.ndarray) -> np.ndarray:
    """Gramian angular summation field: cos(theta_i + theta_j) of the
    arccos-encoded, min-max rescaled series."""
    x = np.asarray(channel, dtype=np.float64)
    theta = np.arccos(_minmax_unit(x))
    return kernels.gasf_from_angles(theta)


def mtf_components(channel: np.ndarray, n_bins: int) -> tuple[np.ndarray, np.ndarray]:
    """(transition matrix W, per-sample bin assignment) for the MTF.

    Bin boundaries sit at the k/Q empirical quantiles, right-closed, so
    tied values share the lower bin.
    """
    if n_bins < 2:
        raise ConfigError("mtf: n_bins must be >= 2")
    x = np.asarray(channel, dtype=np.float64)
    if x.shape[0] < 2:
        raise InputError("mtf: need at least 2 samples")
    boundaries = np.quantile(x, np.arange(1, n_bins) / n_bins)
    bins = np.searchsorted(boundaries, x, side="left").astype(np.int64)
    w, _ = kernels.mtf_from_bins(bins, n_bins)
    return w, bins


def mtf(channel: np.ndarray, n_bins: int) -> np.ndarray:
    """Markov transition field: M[i, j] = W[bin(x_i), bin(x_j)]."""
    if n_bins < 2:
        raise ConfigError("mtf: n_bins must be >= 2")
    x = np.asarray(channel, dtype=np.float64)
    if x.shape[0] < 2:
        raise InputError("mtf: need at least 2 samples")
    boundaries = np.quantile(x, np.arange(1, n_bins) / n_bins)
    bins = np.searchsorted(boundaries, x, side="left").astype(np.int64)
    _, m = kernels.mtf_from_bins(bins, n_bins)
    return m


def cwt_center_frequencies(cfg: CwtConfig) -> np.ndarray:
    """Scale-grid center frequencies in Hz, ascending (row order)."""
    return np.geomspace(cfg.f_min_hz, cfg.f_max_hz, cfg.n_scales)


def _next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


@lru_cache(maxsize=8)
def _cwt_plan(n_samples: int, sample_rate_hz: float, cfg: CwtConfig):
    freqs = np.geomspace(cfg.f_min_hz, cfg.f_max_hz, cfg.n_scales)
    scales = cfg.omega0 * sample_rate_hz / (2.0 * np.pi * freqs)
    u_max = int(np.ceil(5.0 * scales.max()))
    n_fft = _next_pow2(n_samples + 2 * u_max + 1)
    u = np.arange(-u_max, u_max + 1, dtype=np.float64)
    arg = u[None, :] / scales[:, None]
    kernel = (
        (np.pi ** -0.25)
        / np.sqrt(scales)[:, None]
        * np.exp(1j * cfg.omega0 * arg - 0.5 * arg * arg)
    )
    padded = np.zeros((cfg.n_scales, n_fft), dtype=np.complex128)
    padded[:, : 2 * u_max + 1] = kernel
    padded = np.roll(padded, -u_max, axis=1)
    return n_fft, np.fft.fft(padded, axis=1)


def cwt_scalogram(channel: np.ndarray, cfg: CwtConfig, sample_rate_hz: float) -> np.ndarray:
    """Morlet scalogram magnitudes, shape (n_scales, n_samples).

    Scales are log-spaced so center frequencies span [f_min_hz, f_max_hz];
    row k corresponds to cwt_center_frequencies(cfg)[k]. Convolution runs
    in the frequency domain with zero extension beyond the window.
    """
    if cfg.wavelet != "morlet":
        raise ConfigError(f"cwt: unsupported wavelet {cfg.wavelet!r}")
    if not (0 < cfg.f_min_hz < cfg.f_max_hz <= sample_rate_hz / 2):
        raise ConfigError("cwt: need 0 < f_min_hz < f_max_hz <= Nyquist")
    x = np.asarray(channel, dtype=np.float64)
    n = x.shape[0]
    n_fft, kernel_fft = _cwt_plan(n, float(sample_rate_hz), cfg)
    spectrum = np.fft.fft(x, n_fft)
    conv = np.fft.ifft(spectrum[None, :] * kernel_fft, axis=1)[:, :n]
    return np.abs(conv)


def _hann_periodic(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def stft_magnitudes(channel: np.ndarray, cfg: StftConfig) -> np.ndarray:
    """Linear STFT magnitudes, shape (window_len//2 + 1, n_frames), row 0 = DC."""
    if cfg.window_fn != "hann":
        raise ConfigError(f"stft: unsupported window_fn {cfg.window_fn!r}")
    if cfg.hop < 1:
        raise ConfigError("stft: hop must be >= 1")
    x = np.asarray(channel, dtype=np.float64)
    n = x.shape[0]
    if cfg.window_len > n:
        raise InputError(f"stft: window_len {cfg.window_len} exceeds signal length {n}")
    window = _hann_periodic(cfg.window_len)
    offsets = np.arange(0, n - cfg.window_len + 1, cfg.hop)
    frames = x[offsets[:, None] + np.arange(cfg.window_len)[None, :]] * window
    return np.abs(np.fft.rfft(frames, axis=1)).T


def stft_spectrogram(channel: np.ndarray, cfg: StftConfig, sample_rate_hz: float) -> np.ndarray:
    """dB spectrogram: 20*log10(|X| + floor amplitude), clamped at db_floor.

    Row r holds frequency r * sample_rate_hz / window_len.
    """
    magnitudes = stft_magnitudes(channel, cfg)
    floor_amp = 10.0 ** (cfg.db_floor / 20.0)
    db = 20.0 * np.log10(magnitudes + floor_amp)
    return np.maximum(db, cfg.db_floor)


def _axis_weights(n_in: int, n_out: int) -> np.ndarray | None:
    if n_out == n_in:
        return None
    if n_out < n_in:  # area-weighted shrink (fractional bins)
        width = n_in / n_out
        lo = np.arange(n_out, dtype=np.float64)[:, None] * width
        hi = (np.arange(n_out, dtype=np.float64)[:, None] + 1.0) * width
        j = np.arange(n_in, dtype=np.float64)[None, :]
        w = np.clip(np.minimum(hi, j + 1.0) - np.maximum(lo, j), 0.0, 1.0)
        return w / width
    if n_in == 1:
        return np.ones((n_out, 1))
    positions = np.linspace(0.0, n_in - 1.0, n_out)
    j0 = np.minimum(np.floor(positions).astype(np.int64), n_in - 2)
    frac = positions - j0
    w = np.zeros((n_out, n_in))
    rows = np.arange(n_out)
    w[rows, j0] = 1.0 - frac
    w[rows, j0 + 1] += frac
    return w


def resize(image: np.ndarray, out_rows: int, out_cols: int) -> np.ndarray:
    """Area-weighted shrink / bilinear enlarge, applied per axis; identity on equal sizes."""
    if out_rows < 1 or out_cols < 1:
        raise ConfigError("resize: output dimensions must be >= 1")
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise InputError("resize: image must be 2-D")
    w_rows = _axis_weights(img.shape[0], out_rows)
    w_cols = _axis_weights(img.shape[1], out_cols)
    if w_rows is None and w_cols is None:
        return img.copy()
    out = img if w_rows is None else w_rows @ img
    return out if w_cols is None else out @ w_cols.T


def ensemble_average(images: list[np.ndarray]) -> np.ndarray:
    """Element-wise mean across equally shaped images."""
    if not images:
        raise InputError("ensemble_average: empty image list")
    first = np.asarray(images[0], dtype=np.float64)
    stack = [first]
    for img in images[1:]:
        arr = np.asarray(img, dtype=np.float64)
        if arr.shape != first.shape:
            raise InputError(f"ensemble_average: shape mismatch {arr.shape} vs {first.shape}")
        stack.append(arr)
    return np.mean(np.stack(stack), axis=0)


def _channel_epsilon(series: np.ndarray, cfg: RepresentationConfig) -> float:
    if cfg.recurrence.epsilon_mode == "rate":
        return choose_epsilon(series, cfg.recurrence.target_rate)
    return cfg.recurrence.epsilon


def represent_window(window: Window, kind: str, cfg: RepresentationConfig) -> ImageMatrix:
    """One output_size x output_size image for a normalized window.

    cor consumes all channels at once; rp/gasf/mtf run per channel on the
    PAA-reduced series then average; cwt/spec run per channel at full rate,
    resize, then average.
    """
    if kind not in KINDS:
        raise ConfigError(f"unknown representation kind {kind!r} (valid: {', '.join(KINDS)})")
    size = cfg.output_size
    if kind == "cor":
        matrix = correlation_matrix(window.data, window.znorm_flags)
        return ImageMatrix.from_array(resize(matrix, size, size))
    if kind in ("rp", "gasf", "mtf"):
        per_channel = []
        for row in window.data:
            series = paa(row, cfg.paa_target_len)
            if kind == "rp":
                img = recurrence_plot(series, _channel_epsilon(series, cfg))
            elif kind == "gasf":
                img = gasf(series)
            else:
                img = mtf(series, cfg.mtf.n_bins)
            per_channel.append(img)
        return ImageMatrix.from_array(resize(ensemble_average(per_channel), size, size))
    # cwt / spec operate on the full-rate window, resized per channel first
    per_channel = []
    for row in window.data:
        if kind == "cwt":
            img = cwt_scalogram(row, cfg.cwt, window.sample_rate_hz)
        else:
            img = stft_spectrogram(row, cfg.stft, window.sample_rate_hz)
        per_channel.append(resize(img, size, size))
    return ImageMatrix.from_array(ensemble_average(per_channel))
