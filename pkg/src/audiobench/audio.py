"""Mono PCM audio buffers, WAV I/O, resampling, and length normalization.

WAV support is deliberately narrow: RIFF little-endian, PCM 16-bit integer
or IEEE float32, 1 or 2 channels on read; PCM 16-bit mono on write.
Everything downstream operates on float64 samples in [-1, 1] at one rate.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path

import numpy as np

from . import kernels
from .errors import WavFormatError
from .rng import SplitMix64

DEFAULT_SAMPLE_RATE = 16000
DEFAULT_CLIP_SAMPLES = 64000  # ~4 s at 16 kHz

_KAISER_BETA = 8.6
_TAPS_PER_PHASE = 32  # one-sided; 64 taps per phase + center


@dataclass(frozen=True)
class AudioBuffer:
    """Mono waveform: float64 samples in [-1, 1] plus a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("AudioBuffer requires a non-empty 1-D sample array")
        if not np.all(np.isfinite(samples)):
            raise ValueError("AudioBuffer samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def load_audio(path: str | Path) -> AudioBuffer:
    """Read a PCM16 or float32 WAV; stereo is downmixed by channel average."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 44 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    raw = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            raw = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned
    if fmt is None or raw is None:
        raise WavFormatError(f"{path}: missing fmt or data chunk")
    if len(fmt) < 16:
        raise WavFormatError(f"{path}: truncated fmt chunk")

    audio_format, n_channels, sample_rate, _, _, bits = struct.unpack_from(
        "<HHIIHH", fmt, 0
    )
    if n_channels not in (1, 2):
        raise WavFormatError(f"{path}: {n_channels} channels unsupported (mono/stereo only)")
    if audio_format == 1 and bits == 16:
        values = np.frombuffer(raw[: len(raw) - len(raw) % 2], dtype="<i2")
        samples = values.astype(np.float64) / 32768.0
    elif audio_format == 3 and bits == 32:
        values = np.frombuffer(raw[: len(raw) - len(raw) % 4], dtype="<f4")
        samples = np.clip(values.astype(np.float64), -1.0, 1.0)
    else:
        raise WavFormatError(
            f"{path}: unsupported encoding (format={audio_format}, bits={bits}); "
            "expected PCM16 or float32"
        )
    if n_channels == 2:
        samples = samples[: samples.size - samples.size % 2]
        samples = samples.reshape(-1, 2).mean(axis=1)
    if samples.size == 0:
        raise WavFormatError(f"{path}: zero-length audio")
    return AudioBuffer(samples, sample_rate)


def save_audio(buffer: AudioBuffer, path: str | Path) -> None:
    """Write a 16-bit PCM mono WAV (clamped, round-to-nearest)."""
    path = Path(path)
    clipped = np.clip(buffer.samples, -1.0, 1.0)
    pcm = np.clip(np.rint(clipped * 32768.0), -32768, 32767).astype("<i2")
    body = pcm.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(body)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, 1, 1, buffer.sample_rate, buffer.sample_rate * 2, 2, 16
    )
    header += b"data" + struct.pack("<I", len(body))
    path.write_bytes(header + body)


def design_resample_filter(up: int, down: int) -> np.ndarray:
    """Kaiser-windowed sinc low-pass for polyphase up/down conversion."""
    half = _TAPS_PER_PHASE * up
    n = np.arange(-half, half + 1)
    cutoff = min(1.0 / up, 1.0 / down)  # fraction of the up-rate Nyquist
    h = cutoff * np.sinc(cutoff * n) * np.kaiser(2 * half + 1, _KAISER_BETA)
    return h * up  # compensate zero-stuffing gain loss


def resample(buffer: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Band-limited polyphase resampling; identity when rates match."""
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == buffer.sample_rate:
        return buffer
    g = gcd(buffer.sample_rate, target_rate)
    up, down = target_rate // g, buffer.sample_rate // g
    out = resample_by(buffer.samples, up, down)
    return AudioBuffer(np.clip(out, -1.0, 1.0), target_rate)


def resample_by(x: np.ndarray, up: int, down: int) -> np.ndarray:
    """Resample a raw sample array by the rational factor up/down."""
    h = design_resample_filter(up, down)
    half = (h.size - 1) // 2
    n_out = int(round(len(x) * up / down))
    # offset=half aligns output sample 0 with input sample 0 (group delay).
    return kernels.upfirdn(h, x, up, down, offset=half, n_out=n_out)


def resample_by_factor(x: np.ndarray, factor: float, max_denominator: int = 1000) -> np.ndarray:
    """Resample by an arbitrary positive factor via rational approximation."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    frac = Fraction(factor).limit_denominator(max_denominator)
    return resample_by(x, frac.numerator, frac.denominator)


def fix_length(buffer: AudioBuffer, n_samples: int = DEFAULT_CLIP_SAMPLES, seed: int = 0) -> AudioBuffer:
    """Normalize to exactly n_samples: random contiguous crop or cyclic tiling.

    Longer inputs keep a window starting at a seed-determined uniform offset;
    shorter ones are repeated end-to-end and truncated.
    """
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    x = buffer.samples
    if x.size == n_samples:
        return buffer
    if x.size > n_samples:
        offset = SplitMix64(seed).randbelow(x.size - n_samples + 1)
        out = x[offset : offset + n_samples]
    else:
        reps = -(-n_samples // x.size)
        out = np.tile(x, reps)[:n_samples]
    return AudioBuffer(out.copy(), buffer.sample_rate)
