"""Synthetic speech-like fixtures: corpus, noise clips, quickstart bundle.

Bona fide clips are harmonic stacks with a low-frequency noise bed; spoof
clips additionally carry a narrow-band artifact in the 6-7 kHz range.  The
artifact is deliberately learnable from band energies, so a detector keyed
on spectral shape separates the classes cleanly and loses that separation
once a low-pass filter removes the band.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .audio import AudioBuffer, save_audio
from .manifest import Manifest, ManifestEntry, save_manifest
from .rng import derive_key, generator

DEFAULT_SEED = 0x5EEDC0DE  # documented quickstart seed; override with --seed

ARTIFACT_BAND_HZ = (6000.0, 7000.0)


def _slow_noise(g: np.random.Generator, n: int, step: int) -> np.ndarray:
    """Noise with energy concentrated below sr/(2*step) Hz (linear interp)."""
    coarse = g.standard_normal(n // step + 2)
    return np.interp(np.arange(n) / step, np.arange(coarse.size), coarse)


def synth_clip(
    kind: str, key: int, n_samples: int = 32000, sample_rate: int = 16000
) -> AudioBuffer:
    """One deterministic clip; kind is 'bona_fide' or 'spoof'."""
    g = generator(key)
    t = np.arange(n_samples) / sample_rate
    f0 = g.uniform(110.0, 280.0)
    x = np.zeros(n_samples)
    for k in range(1, 6):
        amp = 0.22 / k * g.uniform(0.6, 1.0)
        x += amp * np.sin(2 * np.pi * k * f0 * t + g.uniform(0, 2 * np.pi))
    x *= 0.6 + 0.4 * np.sin(2 * np.pi * g.uniform(0.5, 2.0) * t + g.uniform(0, 2 * np.pi))
    x += 0.01 * _slow_noise(g, n_samples, 20)  # low-frequency bed
    if kind == "spoof":
        centre = g.uniform(*ARTIFACT_BAND_HZ)
        envelope = _slow_noise(g, n_samples, 16)
        x += 0.14 * g.uniform(0.7, 1.3) * envelope * np.cos(2 * np.pi * centre * t)
    peak = np.max(np.abs(x))
    if peak > 0.85:
        x *= 0.85 / peak
    return AudioBuffer(x, sample_rate)


def make_corpus(
    out_dir: str | Path,
    n_clips: int,
    seed: int = DEFAULT_SEED,
    duration_s: float = 2.0,
    sample_rate: int = 16000,
    split: str = "test",
) -> Path:
    """Write n_clips WAVs (half spoof) plus manifest.csv; returns manifest path."""
    out_dir = Path(out_dir)
    wav_dir = out_dir / "wavs"
    wav_dir.mkdir(parents=True, exist_ok=True)
    n_samples = int(round(duration_s * sample_rate))
    entries = []
    for i in range(n_clips):
        kind = "spoof" if i % 2 else "bona_fide"
        clip_id = f"clip{i:04d}"
        buf = synth_clip(kind, derive_key(seed, "corpus", clip_id), n_samples, sample_rate)
        path = wav_dir / f"{clip_id}.wav"
        save_audio(buf, path)
        tags = {"speaker": f"spk{i % 7}"}
        if kind == "spoof":
            tags["generator"] = f"gen{i % 3}"
        entries.append(
            ManifestEntry(clip_id=clip_id, path=str(path), label=kind, split=split, tags=tags)
        )
    manifest_path = out_dir / "manifest.csv"
    save_manifest(Manifest(entries), manifest_path)
    return manifest_path


def make_noise_corpus(
    out_dir: str | Path, n_clips: int = 8, seed: int = DEFAULT_SEED, sample_rate: int = 16000
) -> Path:
    """Write environmental-ish noise clips (varied color and length)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(n_clips):
        g = generator(derive_key(seed, "noise", i))
        n = int(g.uniform(1.0, 3.0) * sample_rate)
        x = 0.25 * _slow_noise(g, n, int(g.integers(2, 24)))
        x += 0.05 * g.standard_normal(n)
        x /= max(1.0, np.max(np.abs(x)) / 0.8)
        save_audio(AudioBuffer(x, sample_rate), out_dir / f"noise{i:02d}.wav")
    return out_dir


def make_quickstart(
    out_dir: str | Path, n_clips: int = 200, seed: int = DEFAULT_SEED
) -> Path:
    """Materialize the self-contained demo: corpus, noise, run config.

    Six corruption families over a synthetic corpus, scored by the built-in
    toy detector.  Returns the config path; run it with `audiobench run`.
    """
    out_dir = Path(out_dir)
    manifest_path = make_corpus(out_dir / "corpus", n_clips, seed)
    noise_dir = make_noise_corpus(out_dir / "noise", seed=seed)
    config = {
        "run_id": "quickstart",
        "seed": seed,
        "manifest": str(manifest_path),
        "split": "test",
        "out": str(out_dir / "run"),
        "detector": {
            "name": "toy-centroid",
            "command": f"{sys.executable} -m audiobench.toydet {{input_dir}} {{output_csv}}",
        },
        "cells": [
            {"family": "gaussian_noise", "severity": 10},
            {"family": "gaussian_noise", "severity": 30},
            {"family": "background_noise", "severity": 10},
            {"family": "low_pass", "severity": 0.3},
            {"family": "low_pass", "severity": 0.9},
            {"family": "high_pass", "severity": 0.5},
            {"family": "echo", "severity": 0.1},
            {"family": "quantize", "severity": 4},
            {"family": "quantize", "severity": 8},
        ],
        "noise_corpus": str(noise_dir),
        "quality": {"sample_n": 24, "visqol": None, "required": False},
    }
    config_path = out_dir / "config.json"
    config_path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
    return config_path
