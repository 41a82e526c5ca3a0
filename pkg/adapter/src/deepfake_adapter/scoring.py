"""Scorers and the directory->CSV protocol entry point."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .features import FEATURE_VERSION, N_BANDS, band_log_energies
from .wavio import TARGET_RATE, WavReadError, prepare, read_wav

BUNDLED_CHECKPOINT = Path(__file__).parent / "data" / "sanity_checkpoint.npz"


class AdapterError(RuntimeError):
    pass


@dataclass(frozen=True)
class AdapterConfig:
    """Scoring configuration mirrored by the CLI flags."""

    checkpoint: str | None = None  # None = zero-ML baseline
    device: str = "cpu"
    batch_size: int = 32
    confirm_polarity: bool = True

    def validate(self) -> None:
        if self.device != "cpu":
            raise AdapterError(
                f"device {self.device!r} unsupported: this adapter is numpy/CPU-only"
            )
        if self.batch_size < 1:
            raise AdapterError("batch_size must be >= 1")


class BaselineScorer:
    """Zero-dependency signal statistic: share of spectral energy above 4 kHz.

    Exists so the benchmark's CI can exercise the full protocol without any
    ML stack; genuinely useful polarity on corpora whose spoofs carry
    high-frequency synthesis artifacts.
    """

    name = "baseline-hf-ratio"

    def score_batch(self, clips: list[np.ndarray]) -> list[float]:
        out = []
        for x in clips:
            feats = band_log_energies(x)
            bands = np.exp(feats[:N_BANDS])
            total = bands.sum()
            out.append(float(bands[N_BANDS // 2 :].sum() / total) if total > 0 else 0.0)
        return out


class CheckpointScorer:
    """Linear head over the documented feature vector, loaded from .npz.

    Checkpoint fields: weights (float, 17), bias (float), polarity (+1/-1),
    feature_version (str).  Scores are sigmoid logits with polarity applied,
    so emitted scores are always higher-is-spoof.
    """

    def __init__(self, checkpoint_path: str | Path, confirm_polarity: bool = True):
        path = Path(checkpoint_path)
        if not path.exists():
            raise AdapterError(f"checkpoint not found: {path}")
        try:
            payload = np.load(path, allow_pickle=False)
            self.weights = np.asarray(payload["weights"], dtype=np.float64)
            self.bias = float(payload["bias"])
            self.polarity = int(payload["polarity"])
            version = str(payload["feature_version"])
        except (KeyError, ValueError, OSError) as exc:
            raise AdapterError(f"unreadable checkpoint {path}: {exc}") from exc
        if version != FEATURE_VERSION:
            raise AdapterError(
                f"checkpoint feature version {version!r} != supported {FEATURE_VERSION!r}"
            )
        if confirm_polarity and self.polarity not in (-1, 1):
            raise AdapterError(f"checkpoint polarity must be +1 or -1, got {self.polarity}")
        self.name = f"checkpoint:{path.name}"

    def score_batch(self, clips: list[np.ndarray]) -> list[float]:
        feats = np.stack([band_log_energies(x) for x in clips])
        logits = self.polarity * (feats @ self.weights + self.bias)
        return [float(v) for v in 1.0 / (1.0 + np.exp(-logits))]


def build_scorer(cfg: AdapterConfig):
    cfg.validate()
    if cfg.checkpoint is None:
        return BaselineScorer()
    return CheckpointScorer(cfg.checkpoint, cfg.confirm_polarity)


def score_directory(input_dir: str | Path, output_csv: str | Path, cfg: AdapterConfig) -> int:
    """Score every WAV in input_dir into a `clip_id,score` CSV.

    Applies the benchmark's fixed-length policy per clip before inference.
    Raises AdapterError (nonzero exit at the CLI) on unreadable audio,
    naming the file, and on model-load failures.
    """
    input_dir = Path(input_dir)
    wavs = sorted(input_dir.glob("*.wav"))
    if not wavs:
        raise AdapterError(f"no WAV files in {input_dir}")
    scorer = build_scorer(cfg)

    rows: list[tuple[str, float]] = []
    for start in range(0, len(wavs), cfg.batch_size):
        batch_paths = wavs[start : start + cfg.batch_size]
        clips = []
        for wav in batch_paths:
            try:
                x, rate = read_wav(wav)
            except (WavReadError, OSError) as exc:
                raise AdapterError(f"unreadable WAV {wav}: {exc}") from exc
            if rate != TARGET_RATE:
                raise AdapterError(f"{wav}: expected {TARGET_RATE} Hz input, got {rate}")
            clips.append(prepare(x, wav.stem))
        for wav, value in zip(batch_paths, scorer.score_batch(clips)):
            if not np.isfinite(value):
                raise AdapterError(f"non-finite score for {wav}")
            rows.append((wav.stem, value))

    with open(output_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clip_id", "score"])
        for clip_id, value in rows:
            writer.writerow([clip_id, f"{value:.12g}"])
    return len(rows)
