"""Bundled sanity fixtures: deterministic bona-fide/spoof clip pairs.

Spoof clips carry a narrow high-frequency artifact over the same harmonic
base as bona fide ones; used by the polarity self-test and by the
checkpoint trainer.  Self-contained so the adapter never imports the
benchmark engine.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .wavio import TARGET_RATE, write_wav


def _rng(tag: str) -> np.random.Generator:
    seed = int.from_bytes(hashlib.sha256(tag.encode()).digest()[:8], "little")
    return np.random.Generator(np.random.PCG64(seed))


def sanity_clip(kind: str, index: int, n_samples: int = 32000) -> np.ndarray:
    g = _rng(f"sanity:{kind}:{index}")
    t = np.arange(n_samples) / TARGET_RATE
    f0 = g.uniform(110.0, 280.0)
    x = np.zeros(n_samples)
    for k in range(1, 6):
        x += 0.22 / k * g.uniform(0.6, 1.0) * np.sin(2 * np.pi * k * f0 * t + g.uniform(0, 2 * np.pi))
    x *= 0.6 + 0.4 * np.sin(2 * np.pi * g.uniform(0.5, 2.0) * t + g.uniform(0, 2 * np.pi))
    coarse = g.standard_normal(n_samples // 20 + 2)
    x += 0.01 * np.interp(np.arange(n_samples) / 20, np.arange(coarse.size), coarse)
    if kind == "spoof":
        centre = g.uniform(6000.0, 7000.0)
        env = g.standard_normal(n_samples // 16 + 2)
        env = np.interp(np.arange(n_samples) / 16, np.arange(env.size), env)
        x += 0.14 * g.uniform(0.7, 1.3) * env * np.cos(2 * np.pi * centre * t)
    peak = np.max(np.abs(x))
    return x * (0.85 / peak) if peak > 0.85 else x


def write_sanity_set(out_dir: str | Path, n_per_class: int = 12) -> dict[str, str]:
    """Write the fixture WAVs; returns clip_id -> label."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    labels: dict[str, str] = {}
    for kind in ("bona_fide", "spoof"):
        for i in range(n_per_class):
            clip_id = f"sanity_{kind}_{i:02d}"
            write_wav(out_dir / f"{clip_id}.wav", sanity_clip(kind, i), TARGET_RATE)
            labels[clip_id] = kind
    return labels
