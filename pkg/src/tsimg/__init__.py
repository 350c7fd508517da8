"""tsimg: image representations of multichannel time series.

Pipeline: ingest (or synthesize) annotated recordings, resample/window/
normalize them, render six image representations per window, and export a
deterministic labeled dataset.
"""

from .core import (
    CATEGORIES,
    Annotation,
    ArtifactCategory,
    ConfigError,
    ImageMatrix,
    InputError,
    MultiChannelRecording,
    RepresentationConfig,
    Window,
    validate_config,
)
from .ingest import Manifest, ManifestEntry, SynthConfig, dataset_stats, load_manifest, synthesize
from .render_export import build_dataset, read_matrix, write_matrix, write_png
from .transforms import KINDS, represent_window

__version__ = "0.1.0"

__all__ = [
    "CATEGORIES",
    "KINDS",
    "Annotation",
    "ArtifactCategory",
    "ConfigError",
    "ImageMatrix",
    "InputError",
    "Manifest",
    "ManifestEntry",
    "MultiChannelRecording",
    "RepresentationConfig",
    "SynthConfig",
    "Window",
    "build_dataset",
    "dataset_stats",
    "load_manifest",
    "read_matrix",
    "represent_window",
    "synthesize",
    "validate_config",
    "write_matrix",
    "write_png",
    "__version__",
]
