"""Domain types, configuration schema, and error taxonomy shared by the pipeline.

All types here are immutable after construction and safe to share across
worker threads. The label vector order is the ``ArtifactCategory``
enumeration order and is fixed forever; serialized datasets depend on it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np


class ConfigError(ValueError):
    """Invalid configuration value or command-line usage (CLI exit code 1)."""


class InputError(ValueError):
    """Missing, malformed, or inconsistent input data (CLI exit code 2)."""


class ArtifactCategory(Enum):
    CHEWING = "chewing"
    ELECTRODE = "electrode"
    EYE_MOVEMENT = "eye_movement"
    MUSCLE = "muscle"
    SHIVERING = "shivering"

    def __str__(self) -> str:
        return self.value


#: Label vector order. Index k of every label vector refers to CATEGORIES[k].
CATEGORIES: tuple[ArtifactCategory, ...] = tuple(ArtifactCategory)
N_CATEGORIES = len(CATEGORIES)
CATEGORY_INDEX = {cat: i for i, cat in enumerate(CATEGORIES)}


def category_from_name(name: str) -> ArtifactCategory:
    try:
        return ArtifactCategory(name)
    except ValueError:
        valid = ", ".join(c.value for c in CATEGORIES)
        raise InputError(f"unknown artifact category {name!r} (valid: {valid})") from None


@dataclass(frozen=True)
class Annotation:
    """One labeled event interval inside a recording.

    ``channel_names`` empty means the event affects all channels.
    """

    category: ArtifactCategory
    start_s: float
    end_s: float
    channel_names: tuple[str, ...] = ()

    def __post_init__(self):
        if not (0.0 <= self.start_s < self.end_s):
            raise InputError(
                f"annotation {self.category.value} [{self.start_s}, {self.end_s}]: "
                "need 0 <= start_s < end_s"
            )

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True, eq=False)
class MultiChannelRecording:
    """Uniformly sampled multichannel recording with event annotations.

    ``data`` is channel-major, shape (n_channels, n_samples), float64.
    """

    recording_id: str
    sample_rate_hz: float
    channel_names: tuple[str, ...]
    data: np.ndarray
    annotations: tuple[Annotation, ...] = ()

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise InputError(f"recording {self.recording_id}: sample_rate_hz must be > 0")
        if self.data.ndim != 2:
            raise InputError(f"recording {self.recording_id}: data must be 2-D (channels x samples)")
        if len(self.channel_names) != self.data.shape[0]:
            raise InputError(
                f"recording {self.recording_id}: {len(self.channel_names)} channel names "
                f"vs {self.data.shape[0]} data rows"
            )
        if len(set(self.channel_names)) != len(self.channel_names):
            raise InputError(f"recording {self.recording_id}: duplicate channel names")
        dur = self.duration_s
        for ann in self.annotations:
            if ann.end_s > dur + 1e-9:
                raise InputError(
                    f"recording {self.recording_id}: annotation {ann.category.value} "
                    f"ends at {ann.end_s}s beyond duration {dur:.6g}s"
                )

    @classmethod
    def from_channels(
        cls,
        recording_id: str,
        sample_rate_hz: float,
        channels: Sequence[tuple[str, Sequence[float]]],
        annotations: Sequence[Annotation] = (),
    ) -> "MultiChannelRecording":
        names = tuple(name for name, _ in channels)
        arrays = [np.asarray(samples, dtype=np.float64) for _, samples in channels]
        if arrays and any(a.shape != arrays[0].shape for a in arrays):
            raise InputError(f"recording {recording_id}: channels have unequal sample counts")
        data = np.stack(arrays) if arrays else np.empty((0, 0))
        return cls(recording_id, float(sample_rate_hz), names, data, tuple(annotations))

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate_hz


@dataclass(frozen=True, eq=False)
class Window:
    """One fixed-duration multichannel segment with a per-category label vector.

    ``labels[k]`` refers to CATEGORIES[k]; ``znorm_flags[c]`` marks channels
    that had zero variance and were zeroed during normalization.
    """

    window_id: str
    recording_id: str
    start_s: float
    length_s: float
    sample_rate_hz: float
    data: np.ndarray
    labels: tuple[int, ...] = (0,) * N_CATEGORIES
    znorm_flags: tuple[bool, ...] = ()

    def __post_init__(self):
        expected = int(round(self.length_s * self.sample_rate_hz))
        if self.data.ndim != 2:
            raise InputError(f"window {self.window_id}: data must be 2-D")
        if self.data.shape[1] != expected:
            raise InputError(
                f"window {self.window_id}: {self.data.shape[1]} samples, "
                f"expected round({self.length_s} * {self.sample_rate_hz}) = {expected}"
            )
        if len(self.labels) != N_CATEGORIES or any(v not in (0, 1) for v in self.labels):
            raise InputError(f"window {self.window_id}: labels must be {N_CATEGORIES} values in {{0,1}}")
        if not self.znorm_flags:
            object.__setattr__(self, "znorm_flags", (False,) * self.data.shape[0])
        elif len(self.znorm_flags) != self.data.shape[0]:
            raise InputError(f"window {self.window_id}: znorm_flags length != n_channels")

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def end_s(self) -> float:
        return self.start_s + self.length_s


@dataclass(frozen=True, eq=False)
class ImageMatrix:
    """Dense 2-D grid of finite 32-bit reals; the universal transform output."""

    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("ImageMatrix values must be 2-D")
        if self.values.dtype != np.float32:
            raise ValueError("ImageMatrix values must be float32")
        if not np.isfinite(self.values).all():
            bad = int(np.size(self.values) - np.count_nonzero(np.isfinite(self.values)))
            raise ValueError(f"ImageMatrix contains {bad} non-finite values")

    @classmethod
    def from_array(cls, values: np.ndarray) -> "ImageMatrix":
        arr = np.ascontiguousarray(np.asarray(values), dtype=np.float32)
        return cls(arr)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceConfig:
    epsilon_mode: str = "fixed"  # "fixed" | "rate"
    epsilon: float = 0.3
    target_rate: float = 0.10


@dataclass(frozen=True)
class MtfConfig:
    n_bins: int = 8


@dataclass(frozen=True)
class CwtConfig:
    wavelet: str = "morlet"
    omega0: float = 6.0
    n_scales: int = 64
    f_min_hz: float = 0.5
    f_max_hz: float = 64.0


@dataclass(frozen=True)
class StftConfig:
    window_len: int = 128
    hop: int = 16
    window_fn: str = "hann"
    db_floor: float = -80.0


@dataclass(frozen=True)
class RepresentationConfig:
    """All transform parameters. JSON config files mirror these field names."""

    window_s: float = 5.0
    overlap_fraction: float = 0.5
    target_hz: float = 128.0
    output_size: int = 224
    recurrence: RecurrenceConfig = field(default_factory=RecurrenceConfig)
    mtf: MtfConfig = field(default_factory=MtfConfig)
    cwt: CwtConfig = field(default_factory=CwtConfig)
    stft: StftConfig = field(default_factory=StftConfig)
    paa_target_len: int | None = None

    def __post_init__(self):
        if self.paa_target_len is None:
            object.__setattr__(self, "paa_target_len", self.output_size)

    @property
    def window_samples(self) -> int:
        return int(round(self.window_s * self.target_hz))


def validate_config(cfg: RepresentationConfig) -> list[str]:
    """Return the list of violated constraints; empty iff cfg is valid."""
    v: list[str] = []
    if not cfg.window_s > 0:
        v.append("window_s > 0")
    if not (0 <= cfg.overlap_fraction < 1):
        v.append("0 <= overlap_fraction < 1")
    if not cfg.target_hz > 0:
        v.append("target_hz > 0")
    if not cfg.output_size >= 1:
        v.append("output_size >= 1")
    if not (cfg.paa_target_len or 0) >= 1:
        v.append("paa_target_len >= 1")
    if cfg.recurrence.epsilon_mode not in ("fixed", "rate"):
        v.append("recurrence.epsilon_mode in {fixed, rate}")
    if not cfg.recurrence.epsilon >= 0:
        v.append("recurrence.epsilon >= 0")
    if not (0 < cfg.recurrence.target_rate < 1):
        v.append("0 < recurrence.target_rate < 1")
    if not cfg.mtf.n_bins >= 2:
        v.append("mtf.n_bins >= 2")
    if cfg.cwt.wavelet != "morlet":
        v.append("cwt.wavelet = morlet")
    if not cfg.cwt.omega0 > 0:
        v.append("cwt.omega0 > 0")
    if not cfg.cwt.n_scales >= 1:
        v.append("cwt.n_scales >= 1")
    if not cfg.cwt.f_min_hz > 0:
        v.append("cwt.f_min_hz > 0")
    if not cfg.cwt.f_min_hz < cfg.cwt.f_max_hz:
        v.append("cwt.f_min_hz < cwt.f_max_hz")
    if cfg.target_hz > 0 and not cfg.cwt.f_max_hz <= cfg.target_hz / 2:
        v.append("cwt.f_max_hz <= Nyquist (target_hz / 2)")
    if cfg.stft.window_fn != "hann":
        v.append("stft.window_fn = hann")
    if not cfg.stft.window_len >= 2:
        v.append("stft.window_len >= 2")
    if cfg.window_s > 0 and cfg.target_hz > 0 and cfg.stft.window_len > cfg.window_samples:
        v.append("stft.window_len <= window samples")
    if not cfg.stft.hop >= 1:
        v.append("stft.hop >= 1")
    return v


def _section_from_dict(cls, raw: dict, name: str):
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config field {name}.{sorted(unknown)[0]}")
    return cls(**raw)


def config_from_dict(raw: dict) -> RepresentationConfig:
    """Build a config from a (possibly partial) JSON-shaped dict."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    raw = dict(raw)
    kwargs = {}
    sections = {"recurrence": RecurrenceConfig, "mtf": MtfConfig, "cwt": CwtConfig, "stft": StftConfig}
    for key, cls in sections.items():
        if key in raw:
            section = raw.pop(key)
            if not isinstance(section, dict):
                raise ConfigError(f"config field {key} must be an object")
            kwargs[key] = _section_from_dict(cls, section, key)
    top_known = {f.name for f in fields(RepresentationConfig)} - set(sections)
    unknown = set(raw) - top_known
    if unknown:
        raise ConfigError(f"unknown config field {sorted(unknown)[0]}")
    kwargs.update(raw)
    try:
        return RepresentationConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad config: {exc}") from None


def config_to_dict(cfg: RepresentationConfig) -> dict:
    return {
        "window_s": cfg.window_s,
        "overlap_fraction": cfg.overlap_fraction,
        "target_hz": cfg.target_hz,
        "output_size": cfg.output_size,
        "recurrence": {
            "epsilon_mode": cfg.recurrence.epsilon_mode,
            "epsilon": cfg.recurrence.epsilon,
            "target_rate": cfg.recurrence.target_rate,
        },
        "mtf": {"n_bins": cfg.mtf.n_bins},
        "cwt": {
            "wavelet": cfg.cwt.wavelet,
            "omega0": cfg.cwt.omega0,
            "n_scales": cfg.cwt.n_scales,
            "f_min_hz": cfg.cwt.f_min_hz,
            "f_max_hz": cfg.cwt.f_max_hz,
        },
        "stft": {
            "window_len": cfg.stft.window_len,
            "hop": cfg.stft.hop,
            "window_fn": cfg.stft.window_fn,
            "db_floor": cfg.stft.db_floor,
        },
        "paa_target_len": cfg.paa_target_len,
    }


def load_config(path: str | Path) -> RepresentationConfig:
    path = Path(path)
    if not path.exists():
        raise InputError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return config_from_dict(raw)


def dump_config(cfg: RepresentationConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")
