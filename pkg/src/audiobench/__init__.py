"""audiobench: deterministic audio-corruption robustness benchmarking.

Corruption kernels (noise, filtering, pitch/time, echo, smoothing,
quantization, codec round-trips), perceptual-quality gating, EER/AUROC
evaluation of black-box detectors over a score-file protocol, and a
reproducible sweep harness.
"""

__version__ = "0.1.0"

from .audio import AudioBuffer, fix_length, load_audio, resample, save_audio
from .corruptions import DEFAULT_GRIDS, CorruptionSpec, apply
from .metrics import (
    CellReport,
    ScoreRecord,
    accuracy_at_eer,
    aggregate_categories,
    auroc,
    eer,
    roc_curve,
)
from .quality import snr_db

__all__ = [
    "__version__",
    "AudioBuffer",
    "CellReport",
    "CorruptionSpec",
    "DEFAULT_GRIDS",
    "ScoreRecord",
    "accuracy_at_eer",
    "aggregate_categories",
    "apply",
    "auroc",
    "eer",
    "fix_length",
    "load_audio",
    "resample",
    "roc_curve",
    "save_audio",
    "snr_db",
]
