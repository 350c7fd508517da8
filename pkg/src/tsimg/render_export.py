"""Bit-exact matrix persistence, PNG rendering, and the dataset index.

The .tsim layout (little-endian) is the source of truth for downstream
consumers: magic "TSIM", version u16 = 1, dtype u8 = 1 (float32),
rows u32, cols u32, then rows*cols row-major float32 values. PNG output is
a derived 8-bit rendering and is never read back.
"""

from __future__ import annotations

import json
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image

from .core import ImageMatrix, InputError, MultiChannelRecording, RepresentationConfig, Window
from .preprocess import assign_labels, resample_recording, segment, znormalize
from .transforms import KINDS, represent_window

_MAGIC = b"TSIM"
_VERSION = 1
_DTYPE_F32 = 1
_HEADER = struct.Struct("<4sHBII")


def write_matrix(image: ImageMatrix, path: str | Path) -> None:
    payload = np.ascontiguousarray(image.values, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, _DTYPE_F32, image.rows, image.cols))
        fh.write(payload)


def read_matrix(path: str | Path) -> ImageMatrix:
    path = Path(path)
    if not path.exists():
        raise InputError(f"matrix file not found: {path}")
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise InputError(f"{path}: truncated header ({len(blob)} bytes, need {_HEADER.size})")
    magic, version, dtype, rows, cols = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise InputError(f"{path}: bad magic {magic!r}, expected {_MAGIC!r}")
    if version != _VERSION:
        raise InputError(f"{path}: unsupported version {version}, expected {_VERSION}")
    if dtype != _DTYPE_F32:
        raise InputError(f"{path}: unsupported dtype code {dtype}, expected {_DTYPE_F32}")
    expected = _HEADER.size + 4 * rows * cols
    if len(blob) != expected:
        raise InputError(f"{path}: payload size mismatch, expected {expected} bytes, found {len(blob)}")
    values = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(rows, cols)
    return ImageMatrix(np.ascontiguousarray(values, dtype=np.float32))


def write_png(image: ImageMatrix, path: str | Path) -> None:
    """8-bit grayscale render: full range maps to [0, 255]; flat images are mid-gray.

    Matrix row 0 is the top image row.
    """
    values = image.values.astype(np.float64)
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        pixels = np.full(values.shape, 128, dtype=np.uint8)
    else:
        pixels = np.clip(np.rint(255.0 * (values - lo) / (hi - lo)), 0, 255).astype(np.uint8)
    Image.fromarray(pixels, mode="L").save(path, format="PNG")


@dataclass(frozen=True)
class DatasetIndexRecord:
    window_id: str
    recording_id: str
    start_s: float
    kind: str
    image_path: str
    labels: tuple[int, ...]
    znorm_flag_count: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "window_id": self.window_id,
                "recording_id": self.recording_id,
                "start_s": self.start_s,
                "kind": self.kind,
                "image_path": self.image_path,
                "labels": list(self.labels),
                "znorm_flag_count": self.znorm_flag_count,
            }
        )


@dataclass(frozen=True)
class RenderFailure:
    window_id: str
    kind: str
    error: str


@dataclass
class DatasetIndex:
    records: list[DatasetIndexRecord]
    failures: list[RenderFailure]


def load_index(path: str | Path) -> list[DatasetIndexRecord]:
    records = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            raw = json.loads(line)
            records.append(
                DatasetIndexRecord(
                    window_id=raw["window_id"],
                    recording_id=raw["recording_id"],
                    start_s=raw["start_s"],
                    kind=raw["kind"],
                    image_path=raw["image_path"],
                    labels=tuple(raw["labels"]),
                    znorm_flag_count=raw["znorm_flag_count"],
                )
            )
    return records


def prepare_windows(
    recording: MultiChannelRecording, cfg: RepresentationConfig
) -> list[Window]:
    """Resample to target rate, segment, z-normalize, and label one recording."""
    resampled = resample_recording(recording, cfg.target_hz)
    windows = []
    for win in segment(resampled, cfg.window_s, cfg.overlap_fraction):
        labels = assign_labels(win, resampled.annotations)
        normalized = znormalize(win)
        windows.append(
            Window(
                window_id=normalized.window_id,
                recording_id=normalized.recording_id,
                start_s=normalized.start_s,
                length_s=normalized.length_s,
                sample_rate_hz=normalized.sample_rate_hz,
                data=normalized.data,
                labels=labels,
                znorm_flags=normalized.znorm_flags,
            )
        )
    return windows


def _render_task(window: Window, kind: str, cfg: RepresentationConfig, out_dir: Path, png: bool):
    image = represent_window(window, kind, cfg)
    rel_path = f"{kind}/{window.window_id}.tsim"
    write_matrix(image, out_dir / rel_path)
    if png:
        write_png(image, out_dir / f"{kind}/{window.window_id}.png")
    return DatasetIndexRecord(
        window_id=window.window_id,
        recording_id=window.recording_id,
        start_s=window.start_s,
        kind=kind,
        image_path=rel_path,
        labels=window.labels,
        znorm_flag_count=sum(window.znorm_flags),
    )


def build_dataset(
    recordings: Iterable[MultiChannelRecording],
    cfg: RepresentationConfig,
    kinds: Sequence[str],
    out_dir: str | Path,
    png: bool = False,
    threads: int = 1,
) -> DatasetIndex:
    """Render every (window, kind) and write index.jsonl.

    Output files and index lines are byte-identical across reruns and
    independent of the thread count: every image is a pure function of
    (window, cfg) and the single index writer uses the contract ordering
    (recording_id, start_s, kind).
    """
    kinds = list(dict.fromkeys(kinds))
    for kind in kinds:
        if kind not in KINDS:
            raise InputError(f"unknown representation kind {kind!r} (valid: {', '.join(KINDS)})")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for kind in kinds:
            (out_dir / kind).mkdir(exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out_dir}: {exc}") from None

    tasks: list[tuple[Window, str]] = []
    for recording in recordings:
        for window in prepare_windows(recording, cfg):
            for kind in kinds:
                tasks.append((window, kind))

    records: list[DatasetIndexRecord] = []
    failures: list[RenderFailure] = []

    def run(task):
        window, kind = task
        try:
            return _render_task(window, kind, cfg, out_dir, png), None
        except Exception as exc:  # per-window failures are recorded, not fatal
            return None, RenderFailure(window.window_id, kind, str(exc))

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, tasks))
    else:
        outcomes = [run(t) for t in tasks]

    for record, failure in outcomes:
        if record is not None:
            records.append(record)
        else:
            failures.append(failure)

    records.sort(key=lambda r: (r.recording_id, r.start_s, r.kind))
    failures.sort(key=lambda f: (f.window_id, f.kind))
    with open(out_dir / "index.jsonl", "w") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")
    return DatasetIndex(records, failures)
