"""Minimal WAV reading plus the benchmark's fixed-length input policy.

Deliberately self-contained: the adapter talks to the engine only through
files, so it carries its own copy of the input conventions (16 kHz mono,
64000 samples, random-crop/tile normalization with a deterministic
per-clip offset).
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

TARGET_SAMPLES = 64000
TARGET_RATE = 16000

_MASK64 = (1 << 64) - 1


class WavReadError(ValueError):
    pass


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """PCM16 or float32 WAV to mono float64 samples in [-1, 1] plus rate."""
    data = Path(path).read_bytes()
    if len(data) < 44 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavReadError(f"{path}: not a RIFF/WAVE file")
    fmt = raw = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            fmt = body
        elif cid == b"data":
            raw = body
        pos += 8 + size + (size & 1)
    if fmt is None or raw is None or len(fmt) < 16:
        raise WavReadError(f"{path}: missing fmt/data chunk")
    audio_format, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if audio_format == 1 and bits == 16:
        x = np.frombuffer(raw[: len(raw) - len(raw) % 2], dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == 3 and bits == 32:
        x = np.clip(np.frombuffer(raw[: len(raw) - len(raw) % 4], dtype="<f4").astype(np.float64), -1, 1)
    else:
        raise WavReadError(f"{path}: unsupported encoding (format={audio_format}, bits={bits})")
    if channels == 2:
        x = x[: x.size - x.size % 2].reshape(-1, 2).mean(axis=1)
    elif channels != 1:
        raise WavReadError(f"{path}: {channels} channels unsupported")
    if x.size == 0:
        raise WavReadError(f"{path}: zero-length audio")
    return x, rate


def write_wav(path: str | Path, x: np.ndarray, rate: int) -> None:
    pcm = np.clip(np.rint(np.clip(x, -1, 1) * 32768.0), -32768, 32767).astype("<i2")
    body = pcm.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(body)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(body))
    Path(path).write_bytes(header + body)


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), state


def clip_key(clip_id: str) -> int:
    digest = hashlib.sha256(f"adapter:{clip_id}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def prepare(x: np.ndarray, clip_id: str, n_samples: int = TARGET_SAMPLES) -> np.ndarray:
    """Fixed-length policy: deterministic crop for long clips, tiling for short."""
    if x.size == n_samples:
        return x
    if x.size > n_samples:
        span = x.size - n_samples + 1
        value, _ = _splitmix64(clip_key(clip_id))
        return x[value % span : value % span + n_samples]
    reps = -(-n_samples // x.size)
    return np.tile(x, reps)[:n_samples]
