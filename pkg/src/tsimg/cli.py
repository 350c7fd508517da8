"""Command-line entry point: convert, build, synth, stats.

Exit codes: 0 success, 1 configuration error, 2 input error, 3 partial
render failure. Thread count comes from --threads, else TSIMG_THREADS,
else 1; it never changes output bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .core import (
    CATEGORIES,
    ConfigError,
    InputError,
    RepresentationConfig,
    load_config,
    validate_config,
)
from .ingest import (
    Manifest,
    ManifestEntry,
    SynthConfig,
    dataset_stats,
    iter_recordings,
    load_manifest,
    load_recording_csv,
    render_stats_table,
    stats_to_dict,
    synthesize,
    write_manifest,
    write_recording_csv,
)
from .render_export import build_dataset
from .transforms import KINDS

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INPUT = 2
EXIT_PARTIAL = 3


def _parse_kinds(raw: str) -> list[str]:
    if raw == "all":
        return list(KINDS)
    kinds = [k.strip() for k in raw.split(",") if k.strip()]
    for kind in kinds:
        if kind not in KINDS:
            raise ConfigError(
                f"unknown representation kind {kind!r}; valid kinds: {', '.join(KINDS)} or 'all'"
            )
    if not kinds:
        raise ConfigError(f"no representation kinds given; valid kinds: {', '.join(KINDS)} or 'all'")
    return kinds


def _load_cfg(config_path: str | None) -> RepresentationConfig:
    cfg = load_config(config_path) if config_path else RepresentationConfig()
    violations = validate_config(cfg)
    if violations:
        raise ConfigError("invalid config: " + "; ".join(violations))
    return cfg


def _threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("TSIMG_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"TSIMG_THREADS must be an integer, got {env!r}") from None
    return 1


def _report_build(index, elapsed: float) -> None:
    window_labels = {}
    for record in index.records:
        window_labels[record.window_id] = record.labels
    counts = [0] * len(CATEGORIES)
    for labels in window_labels.values():
        for i, v in enumerate(labels):
            counts[i] += v
    for cat, count in zip(CATEGORIES, counts):
        print(f"label {cat.value}: {count} windows")
    print(
        f"windows={len(window_labels)} files={len(index.records)} "
        f"failures={len(index.failures)} elapsed={elapsed:.2f}s"
    )
    for failure in index.failures:
        print(f"FAILED {failure.kind}/{failure.window_id}: {failure.error}", file=sys.stderr)


def cmd_convert(args) -> int:
    cfg = _load_cfg(args.config)
    kinds = _parse_kinds(args.repr)
    if args.sample_rate_hz <= 0:
        raise ConfigError("--sample-rate-hz must be > 0")
    recording = load_recording_csv(args.input, args.sample_rate_hz)
    start = time.monotonic()
    index = build_dataset(
        [recording], cfg, kinds, args.out, png=args.png, threads=_threads(args.threads)
    )
    _report_build(index, time.monotonic() - start)
    return EXIT_PARTIAL if index.failures else EXIT_OK


def cmd_build(args) -> int:
    cfg = _load_cfg(args.config)
    kinds = _parse_kinds(args.repr)
    manifest = load_manifest(args.manifest)
    start = time.monotonic()
    index = build_dataset(
        iter_recordings(manifest), cfg, kinds, args.out, png=args.png, threads=_threads(args.threads)
    )
    _report_build(index, time.monotonic() - start)
    return EXIT_PARTIAL if index.failures else EXIT_OK


def cmd_synth(args) -> int:
    if args.minutes <= 0:
        raise ConfigError("--minutes: duration must be positive")
    cfg = SynthConfig(
        seed=args.seed,
        duration_s=args.minutes * 60.0,
        n_channels=args.channels,
        sample_rate_hz=args.sample_rate_hz,
    )
    recording = synthesize(cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_name = f"{recording.recording_id}.csv"
    write_recording_csv(recording, out_dir / csv_name)
    manifest = Manifest(
        entries=(
            ManifestEntry(
                recording_id=recording.recording_id,
                data_path=csv_name,
                sample_rate_hz=recording.sample_rate_hz,
                channel_names=recording.channel_names,
                annotations=recording.annotations,
            ),
        )
    )
    write_manifest(manifest, out_dir / "manifest.json")
    counts = {cat: 0 for cat in CATEGORIES}
    for ann in recording.annotations:
        counts[ann.category] += 1
    summary = " ".join(f"{cat.value}={counts[cat]}" for cat in CATEGORIES)
    print(f"wrote {out_dir / csv_name} and {out_dir / 'manifest.json'}")
    print(f"duration={args.minutes:g}min channels={recording.n_channels} events: {summary}")
    return EXIT_OK


def cmd_stats(args) -> int:
    manifest = load_manifest(args.manifest)
    report = dataset_stats(manifest)
    if args.json:
        print(json.dumps(stats_to_dict(report), indent=2))
    else:
        print(render_stats_table(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsimg", description="Image representations of multichannel time series"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    convert = sub.add_parser("convert", help="convert a single CSV recording")
    convert.add_argument("--input", required=True, help="input CSV (header row = channel names)")
    convert.add_argument("--sample-rate-hz", type=float, required=True)
    convert.add_argument("--repr", required=True, help=f"one of {', '.join(KINDS)}, a comma list, or 'all'")
    convert.add_argument("--out", required=True)
    convert.add_argument("--config", default=None, help="JSON config file")
    convert.add_argument("--png", action="store_true", help="also write PNG renderings")
    convert.add_argument("--threads", type=int, default=None)
    convert.set_defaults(func=cmd_convert)

    build = sub.add_parser("build", help="build a dataset from a manifest")
    build.add_argument("--manifest", required=True)
    build.add_argument("--repr", required=True)
    build.add_argument("--out", required=True)
    build.add_argument("--config", default=None)
    build.add_argument("--png", action="store_true")
    build.add_argument("--threads", type=int, default=None)
    build.set_defaults(func=cmd_build)

    synth = sub.add_parser("synth", help="generate a synthetic annotated recording")
    synth.add_argument("--seed", type=int, required=True)
    synth.add_argument("--minutes", type=float, required=True)
    synth.add_argument("--out", required=True)
    synth.add_argument("--channels", type=int, default=19)
    synth.add_argument("--sample-rate-hz", type=float, default=250.0)
    synth.set_defaults(func=cmd_synth)

    stats = sub.add_parser("stats", help="report per-category annotation statistics")
    stats.add_argument("--manifest", required=True)
    stats.add_argument("--json", action="store_true")
    stats.set_defaults(func=cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
