"""Recording and annotation IO, synthetic corpus generation, dataset statistics.

The synthetic generator stands in for a clinical corpus: a 10 Hz rhythm
plus low-passed noise as background, with five event morphologies injected
at configurable per-minute rates. Identical seeds give bit-identical
recordings (fixed portable PRNG, fixed draw order).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

from . import kernels
from .core import (
    CATEGORIES,
    Annotation,
    ArtifactCategory,
    ConfigError,
    InputError,
    MultiChannelRecording,
    category_from_name,
)
from .rng import Xoshiro256StarStar

#: Standard 10-20 names; the first four are the frontal channels that carry
#: eye-movement deflections.
MONTAGE_1020 = (
    "Fp1", "Fp2", "F3", "F4", "C3", "C4", "P3", "P4", "O1", "O2",
    "F7", "F8", "T3", "T4", "T5", "T6", "Fz", "Cz", "Pz",
)

#: Events per minute. Eye movement and muscle dominate, mirroring the
#: imbalance typical of clinical artifact corpora; the rarer categories keep
#: rates high enough that short corpora still contain examples of each.
DEFAULT_EVENT_RATES: dict[ArtifactCategory, float] = {
    ArtifactCategory.CHEWING: 1.0,
    ArtifactCategory.ELECTRODE: 2.0,
    ArtifactCategory.EYE_MOVEMENT: 8.0,
    ArtifactCategory.MUSCLE: 2.3,
    ArtifactCategory.SHIVERING: 1.3,
}

_NOISE_LOWPASS_HZ = 8.0
_LN10 = math.log(10.0)


def default_channel_names(n_channels: int) -> tuple[str, ...]:
    names = list(MONTAGE_1020[:n_channels])
    names += [f"ch{i:02d}" for i in range(len(names), n_channels)]
    return tuple(names)


@dataclass(frozen=True)
class BackgroundConfig:
    alpha_hz: float = 10.0
    amplitude: float = 1.0
    noise_sigma: float = 0.3


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    duration_s: float
    n_channels: int = 19
    sample_rate_hz: float = 250.0
    event_rates: Mapping[ArtifactCategory, float] = field(
        default_factory=lambda: dict(DEFAULT_EVENT_RATES)
    )
    background: BackgroundConfig = field(default_factory=BackgroundConfig)

    def __post_init__(self):
        if self.duration_s <= 0:
            raise ConfigError("synth: duration must be positive")
        if self.n_channels < 1:
            raise ConfigError("synth: n_channels must be >= 1")
        if self.sample_rate_hz <= 0:
            raise ConfigError("synth: sample_rate_hz must be > 0")
        for cat, rate in self.event_rates.items():
            if rate < 0:
                raise ConfigError(f"synth: event rate for {cat.value} must be >= 0")


def _half_sine(tau: np.ndarray, duration: float) -> np.ndarray:
    return np.sin(np.pi * tau / duration)


class _EventWriter:
    """Adds one event waveform into the data array and records its annotation."""

    def __init__(self, cfg: SynthConfig, data: np.ndarray, names: tuple[str, ...]):
        self.cfg = cfg
        self.data = data
        self.names = names
        self.annotations: list[Annotation] = []

    def _sample_span(self, start_s: float, duration_s: float) -> tuple[np.ndarray, slice]:
        fs = self.cfg.sample_rate_hz
        i0 = int(round(start_s * fs))
        i1 = min(int(round((start_s + duration_s) * fs)), self.data.shape[1])
        idx = slice(i0, i1)
        tau = np.arange(i0, i1) / fs - start_s
        return tau, idx

    def _annotate(self, cat: ArtifactCategory, start: float, dur: float, channels: range) -> None:
        self.annotations.append(
            Annotation(cat, start, start + dur, tuple(self.names[c] for c in channels))
        )

    def _draw_span(self, rng: Xoshiro256StarStar, lo: float, hi: float) -> tuple[float, float]:
        dur = rng.uniform(lo, hi)
        if dur >= self.cfg.duration_s:
            dur = self.cfg.duration_s / 2.0
        start = rng.uniform(0.0, self.cfg.duration_s - dur)
        return start, dur

    def _draw_block(self, rng: Xoshiro256StarStar, n_event_channels: int) -> range:
        n_ch = self.data.shape[0]
        n_event_channels = min(n_event_channels, n_ch)
        first = rng.randint(n_ch - n_event_channels + 1)
        return range(first, first + n_event_channels)

    def chewing(self, rng: Xoshiro256StarStar) -> None:
        start, dur = self._draw_span(rng, 2.0, 3.5)
        burst_hz = rng.uniform(1.45, 1.55)
        carrier_hz = rng.uniform(21.0, 23.0)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(5.0, 8.0)
        channels = self._draw_block(rng, 6 + rng.randint(5))
        tau, idx = self._sample_span(start, dur)
        bursts = (0.5 - 0.5 * np.cos(2.0 * np.pi * burst_hz * tau)) ** 3
        wave = amp * _half_sine(tau, dur) * bursts * np.sin(2.0 * np.pi * carrier_hz * tau + phase)
        for c in channels:
            self.data[c, idx] += wave
        self._annotate(ArtifactCategory.CHEWING, start, dur, channels)

    def electrode(self, rng: Xoshiro256StarStar) -> None:
        tau_decay = rng.uniform(0.3, 0.6)
        ann_dur = tau_decay * _LN10  # interval where the decay exceeds 10% of peak
        if ann_dur >= self.cfg.duration_s:
            tau_decay = self.cfg.duration_s / (2.0 * _LN10)
            ann_dur = tau_decay * _LN10
        start = rng.uniform(0.0, self.cfg.duration_s - ann_dur)
        amp = rng.uniform(6.0, 12.0)
        sign = -1.0 if rng.random() < 0.5 else 1.0
        channel = rng.randint(self.data.shape[0])
        tau, idx = self._sample_span(start, min(6.0 * tau_decay, self.cfg.duration_s - start))
        self.data[channel, idx] += sign * amp * np.exp(-tau / tau_decay)
        self._annotate(ArtifactCategory.ELECTRODE, start, ann_dur, range(channel, channel + 1))

    def eye_movement(self, rng: Xoshiro256StarStar) -> None:
        start, dur = self._draw_span(rng, 0.3, 0.6)
        amp = rng.uniform(2.0, 4.0)
        sign = -1.0 if rng.random() < 0.5 else 1.0
        channels = range(0, min(4, self.data.shape[0]))
        tau, idx = self._sample_span(start, dur)
        wave = sign * amp * _half_sine(tau, dur)
        for c in channels:
            self.data[c, idx] += wave
        self._annotate(ArtifactCategory.EYE_MOVEMENT, start, dur, channels)

    def muscle(self, rng: Xoshiro256StarStar) -> None:
        # Clenches arrive as short trains; every burst is annotated separately.
        n_bursts = 2 + rng.randint(3)
        amp = rng.uniform(5.0, 10.0)
        channels = self._draw_block(rng, 8 + rng.randint(7))
        durations = [rng.uniform(0.2, 0.8) for _ in range(n_bursts)]
        gaps = [rng.uniform(0.2, 0.5) for _ in range(n_bursts - 1)]
        span = sum(durations) + sum(gaps)
        if span >= self.cfg.duration_s:
            n_bursts, span = 1, durations[0]
        start = rng.uniform(0.0, self.cfg.duration_s - span)
        offset = start
        for b in range(n_bursts):
            dur = durations[b]
            tau, idx = self._sample_span(offset, dur)
            envelope = amp * _half_sine(tau, dur)
            n_tones = 6
            scale = 1.0 / math.sqrt(n_tones / 2.0)
            for c in channels:  # independent tones per channel: bursts decorrelate
                sig = np.zeros_like(tau)
                for _ in range(n_tones):
                    f = rng.uniform(20.0, 60.0)
                    ph = rng.uniform(0.0, 2.0 * np.pi)
                    sig += np.sin(2.0 * np.pi * f * tau + ph)
                self.data[c, idx] += envelope * sig * scale
            self._annotate(ArtifactCategory.MUSCLE, offset, dur, channels)
            if b < n_bursts - 1:
                offset += dur + gaps[b]

    def shivering(self, rng: Xoshiro256StarStar) -> None:
        start, dur = self._draw_span(rng, 1.0, 3.0)
        freq = rng.uniform(8.0, 12.0)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(2.5, 4.5)
        n_ch = self.data.shape[0]
        spread = max(1, n_ch // 3)
        channels = self._draw_block(rng, n_ch - rng.randint(spread))
        tau, idx = self._sample_span(start, dur)
        wave = amp * _half_sine(tau, dur) * np.sin(2.0 * np.pi * freq * tau + phase)
        for c in channels:
            self.data[c, idx] += wave
        self._annotate(ArtifactCategory.SHIVERING, start, dur, channels)


def synthesize(cfg: SynthConfig) -> MultiChannelRecording:
    """Generate an annotated recording; a pure function of the config."""
    rng = Xoshiro256StarStar(cfg.seed)
    fs = cfg.sample_rate_hz
    n = int(round(cfg.duration_s * fs))
    names = default_channel_names(cfg.n_channels)
    t = np.arange(n) / fs
    data = np.empty((cfg.n_channels, n))

    bg = cfg.background
    a = math.exp(-2.0 * math.pi * _NOISE_LOWPASS_HZ / fs)
    noise_gain = bg.noise_sigma / math.sqrt((1.0 - a) / (1.0 + a))
    for c in range(cfg.n_channels):
        phase = rng.uniform(0.0, 2.0 * math.pi)
        data[c] = bg.amplitude * np.sin(2.0 * np.pi * bg.alpha_hz * t + phase)
        data[c] += kernels.one_pole_lowpass(rng.normals(n), a) * noise_gain

    writer = _EventWriter(cfg, data, names)
    injectors = {
        ArtifactCategory.CHEWING: writer.chewing,
        ArtifactCategory.ELECTRODE: writer.electrode,
        ArtifactCategory.EYE_MOVEMENT: writer.eye_movement,
        ArtifactCategory.MUSCLE: writer.muscle,
        ArtifactCategory.SHIVERING: writer.shivering,
    }
    for cat in CATEGORIES:
        rate_per_min = float(cfg.event_rates.get(cat, 0.0))
        count = rng.poisson(rate_per_min * cfg.duration_s / 60.0)
        for _ in range(count):
            injectors[cat](rng)

    annotations = tuple(sorted(writer.annotations, key=lambda x: (x.start_s, x.category.value)))
    return MultiChannelRecording(f"synth_{cfg.seed}", fs, names, data, annotations)


# ---------------------------------------------------------------------------
# Manifest and CSV IO
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifestEntry:
    recording_id: str
    data_path: str
    sample_rate_hz: float
    channel_names: tuple[str, ...]
    annotations: tuple[Annotation, ...] = ()
    format: str = "csv"


@dataclass(frozen=True)
class Manifest:
    entries: tuple[ManifestEntry, ...]
    base_dir: Path | None = None

    def __post_init__(self):
        ids = [e.recording_id for e in self.entries]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise InputError(f"manifest: duplicate recording_id {dup!r}")

    def resolve_path(self, entry: ManifestEntry) -> Path:
        p = Path(entry.data_path)
        if not p.is_absolute() and self.base_dir is not None:
            p = self.base_dir / p
        return p


def _parse_annotation(raw: dict, context: str) -> Annotation:
    try:
        category = category_from_name(raw["category"])
        return Annotation(
            category,
            float(raw["start_s"]),
            float(raw["end_s"]),
            tuple(raw.get("channel_names", ())),
        )
    except KeyError as exc:
        raise InputError(f"{context}: annotation missing field {exc.args[0]!r}") from None
    except InputError as exc:
        raise InputError(f"{context}: {exc}") from None


def _parse_entry(raw: dict, index: int) -> ManifestEntry:
    context = f"manifest entry {index}"
    try:
        rid = raw["recording_id"]
        entry = ManifestEntry(
            recording_id=rid,
            data_path=raw["data_path"],
            sample_rate_hz=float(raw["sample_rate_hz"]),
            channel_names=tuple(raw["channel_names"]),
            annotations=tuple(
                _parse_annotation(a, f"manifest entry {rid!r}") for a in raw.get("annotations", ())
            ),
            format=raw.get("format", "csv"),
        )
    except KeyError as exc:
        raise InputError(f"{context}: missing field {exc.args[0]!r}") from None
    if entry.format != "csv":
        raise InputError(f"{context}: unsupported format {entry.format!r}")
    if entry.sample_rate_hz <= 0:
        raise InputError(f"{context}: sample_rate_hz must be > 0")
    return entry


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    if not path.exists():
        raise InputError(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(
            f"manifest {path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict) or "entries" not in raw:
        raise InputError(f"manifest {path}: expected an object with an 'entries' list")
    entries = tuple(_parse_entry(e, i) for i, e in enumerate(raw["entries"]))
    return Manifest(entries, base_dir=path.parent)


def manifest_to_dict(manifest: Manifest) -> dict:
    return {
        "entries": [
            {
                "recording_id": e.recording_id,
                "data_path": e.data_path,
                "format": e.format,
                "sample_rate_hz": e.sample_rate_hz,
                "channel_names": list(e.channel_names),
                "annotations": [
                    {
                        "category": a.category.value,
                        "start_s": a.start_s,
                        "end_s": a.end_s,
                        "channel_names": list(a.channel_names),
                    }
                    for a in e.annotations
                ],
            }
            for e in manifest.entries
        ]
    }


def write_manifest(manifest: Manifest, path: str | Path) -> None:
    Path(path).write_text(json.dumps(manifest_to_dict(manifest), indent=2) + "\n")


def _scan_csv_for_error(path: Path, expected_cols: int) -> None:
    """Second pass after a failed fast parse; raises with cell coordinates."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)  # header
        for row_num, row in enumerate(reader, start=1):
            if len(row) != expected_cols:
                raise InputError(
                    f"{path}: data row {row_num}: expected {expected_cols} cells, found {len(row)}"
                )
            for col_num, cell in enumerate(row, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise InputError(
                        f"{path}: non-numeric cell {cell!r} at data row {row_num}, column {col_num}"
                    ) from None
                if not math.isfinite(value):
                    raise InputError(
                        f"{path}: non-finite value {cell!r} at data row {row_num}, column {col_num}"
                    )


def load_recording_csv(
    path: str | Path,
    sample_rate_hz: float,
    channel_names: tuple[str, ...] | None = None,
    recording_id: str | None = None,
    annotations: tuple[Annotation, ...] = (),
) -> MultiChannelRecording:
    """Read a comma-separated recording: header row of channel names, one row per sample."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"recording file not found: {path}")
    with open(path) as fh:
        header = fh.readline().strip()
    names = tuple(h.strip() for h in header.split(",")) if header else ()
    if not names or not any(names):
        raise InputError(f"{path}: missing header row")
    if channel_names is not None and tuple(channel_names) != names:
        raise InputError(
            f"{path}: header {list(names)} does not match declared channels {list(channel_names)}"
        )
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
    except ValueError:
        _scan_csv_for_error(path, len(names))
        raise InputError(f"{path}: malformed CSV") from None
    if data.size == 0:
        raise InputError(f"{path}: no data rows")
    if data.shape[1] != len(names):
        raise InputError(f"{path}: {data.shape[1]} columns vs {len(names)} header names")
    if not np.isfinite(data).all():
        r, c = np.argwhere(~np.isfinite(data))[0]
        raise InputError(
            f"{path}: non-finite value at data row {int(r) + 1}, column {int(c) + 1} ({names[c]})"
        )
    return MultiChannelRecording(
        recording_id or path.stem,
        float(sample_rate_hz),
        names,
        np.ascontiguousarray(data.T),
        tuple(annotations),
    )


def write_recording_csv(recording: MultiChannelRecording, path: str | Path) -> None:
    np.savetxt(
        path,
        recording.data.T,
        delimiter=",",
        fmt="%.10g",
        header=",".join(recording.channel_names),
        comments="",
        newline="\n",
    )


def load_manifest_recording(manifest: Manifest, entry: ManifestEntry) -> MultiChannelRecording:
    return load_recording_csv(
        manifest.resolve_path(entry),
        entry.sample_rate_hz,
        entry.channel_names,
        entry.recording_id,
        entry.annotations,
    )


def iter_recordings(manifest: Manifest) -> Iterator[MultiChannelRecording]:
    for entry in manifest.entries:
        yield load_manifest_recording(manifest, entry)


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StatsReport:
    recording_count: int
    total_hours: float
    category_counts: dict[ArtifactCategory, int]
    category_seconds: dict[ArtifactCategory, float]
    category_shares: dict[ArtifactCategory, float]
    total_annotated_s: float


def _csv_row_count(path: Path) -> int:
    with open(path) as fh:
        return max(sum(1 for _ in fh) - 1, 0)


def dataset_stats(manifest: Manifest) -> StatsReport:
    """Per-category counts and shares of total annotated time, plus corpus size."""
    counts = {cat: 0 for cat in CATEGORIES}
    seconds = {cat: 0.0 for cat in CATEGORIES}
    total_s = 0.0
    for entry in manifest.entries:
        path = manifest.resolve_path(entry)
        if not path.exists():
            raise InputError(f"recording file not found: {path}")
        total_s += _csv_row_count(path) / entry.sample_rate_hz
        for ann in entry.annotations:
            counts[ann.category] += 1
            seconds[ann.category] += ann.duration_s
    annotated = sum(seconds.values())
    shares = {
        cat: (seconds[cat] / annotated if annotated > 0 else 0.0) for cat in CATEGORIES
    }
    return StatsReport(
        recording_count=len(manifest.entries),
        total_hours=total_s / 3600.0,
        category_counts=counts,
        category_seconds=seconds,
        category_shares=shares,
        total_annotated_s=annotated,
    )


def stats_to_dict(report: StatsReport) -> dict:
    return {
        "recording_count": report.recording_count,
        "total_hours": report.total_hours,
        "total_annotated_s": report.total_annotated_s,
        "categories": {
            cat.value: {
                "count": report.category_counts[cat],
                "seconds": report.category_seconds[cat],
                "share": report.category_shares[cat],
            }
            for cat in CATEGORIES
        },
    }


def render_stats_table(report: StatsReport) -> str:
    lines = [
        f"recordings: {report.recording_count}",
        f"total hours: {report.total_hours:.4f}",
        f"annotated seconds: {report.total_annotated_s:.2f}",
        "",
        f"{'category':<14} {'count':>7} {'seconds':>10} {'share':>8}",
    ]
    for cat in CATEGORIES:
        lines.append(
            f"{cat.value:<14} {report.category_counts[cat]:>7d} "
            f"{report.category_seconds[cat]:>10.2f} {report.category_shares[cat]:>7.1%}"
        )
    return "\n".join(lines)
