"""Short-time spectral features: spectrogram, Mel-spectrogram, LFCC.

These serve two roles: input utilities for detectors (the toy detector and
the shipped adapter use them) and measurement oracles for corruption tests.
Frames are taken without centering: frame t covers samples
[t*hop, t*hop + frame_len), so T = 1 + floor((len - frame_len) / hop).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer

LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class StftConfig:
    n_fft: int = 512
    hop: int = 160  # 10 ms at 16 kHz
    window: str = "hamming"

    def __post_init__(self):
        if self.n_fft < 2 or self.n_fft & (self.n_fft - 1):
            raise ValueError("n_fft must be a power of two")
        if not 0 < self.hop <= self.n_fft:
            raise ValueError("hop must be in (0, n_fft]")
        if self.window not in ("hamming", "hann", "rect"):
            raise ValueError(f"unknown window family: {self.window}")


@dataclass(frozen=True)
class SpectrogramMatrix:
    """Power spectrogram: frames x (n_fft/2 + 1) non-negative grid."""

    values: np.ndarray
    frame_rate: float  # frames per second
    freq_resolution: float  # Hz per bin


def make_window(name: str, length: int) -> np.ndarray:
    if name == "hamming":
        return np.hamming(length)
    if name == "hann":
        return np.hanning(length)
    if name == "rect":
        return np.ones(length)
    raise ValueError(f"unknown window family: {name}")


def frame_signal(x: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    """Strided (T, frame_len) view copy; raises if x is shorter than a frame."""
    if x.size < frame_len:
        raise ValueError(f"signal length {x.size} < frame length {frame_len}")
    n_frames = 1 + (x.size - frame_len) // hop
    idx = np.arange(n_frames)[:, None] * hop + np.arange(frame_len)[None, :]
    return x[idx]


def stft(buffer: AudioBuffer, cfg: StftConfig = StftConfig()) -> np.ndarray:
    """Complex one-sided STFT, shape (T, n_fft//2 + 1)."""
    frames = frame_signal(buffer.samples, cfg.n_fft, cfg.hop)
    frames = frames * make_window(cfg.window, cfg.n_fft)[None, :]
    return np.fft.rfft(frames, axis=1)


def spectrogram(buffer: AudioBuffer, cfg: StftConfig = StftConfig()) -> SpectrogramMatrix:
    """Squared-magnitude STFT."""
    power = np.abs(stft(buffer, cfg)) ** 2
    return SpectrogramMatrix(
        values=power,
        frame_rate=buffer.sample_rate / cfg.hop,
        freq_resolution=buffer.sample_rate / cfg.n_fft,
    )


def _triangle_bank(edges_hz: np.ndarray, bin_freqs: np.ndarray) -> np.ndarray:
    """Triangular filters: row k peaks at edges[k+1], spans edges[k]..edges[k+2]."""
    n_filters = edges_hz.size - 2
    bank = np.zeros((n_filters, bin_freqs.size))
    for k in range(n_filters):
        lo, mid, hi = edges_hz[k], edges_hz[k + 1], edges_hz[k + 2]
        up = (bin_freqs - lo) / (mid - lo)
        down = (hi - bin_freqs) / (hi - mid)
        bank[k] = np.clip(np.minimum(up, down), 0.0, None)
    return bank


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int) -> np.ndarray:
    """Triangular bank with centers uniformly spaced on the Mel scale."""
    mel_edges = np.linspace(0.0, hz_to_mel(sample_rate / 2), n_mels + 2)
    edges_hz = mel_to_hz(mel_edges)
    bin_freqs = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    return _triangle_bank(edges_hz, bin_freqs)


def linear_filterbank(n_filters: int, n_fft: int, sample_rate: int) -> np.ndarray:
    """Triangular bank with centers uniformly spaced in Hz."""
    edges_hz = np.linspace(0.0, sample_rate / 2, n_filters + 2)
    bin_freqs = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    return _triangle_bank(edges_hz, bin_freqs)


def mel_spectrogram(
    buffer: AudioBuffer, cfg: StftConfig = StftConfig(), n_mels: int = 80
) -> np.ndarray:
    """Mel-band energies, shape (T, n_mels)."""
    if n_mels < 1:
        raise ValueError("n_mels must be >= 1")
    power = spectrogram(buffer, cfg).values
    bank = mel_filterbank(n_mels, cfg.n_fft, buffer.sample_rate)
    return power @ bank.T


def dct_ii_orthonormal(n: int) -> np.ndarray:
    """Orthonormal type-II DCT matrix (n x n)."""
    j = np.arange(n)
    basis = np.cos(np.pi * np.outer(j, 2 * j + 1) / (2 * n)) * np.sqrt(2.0 / n)
    basis[0] /= np.sqrt(2.0)
    return basis


def lfcc(
    buffer: AudioBuffer,
    n_coeffs: int = 60,
    n_filters: int = 60,
    frame_len: int = 320,  # 20 ms at 16 kHz
    hop: int = 160,
    n_fft: int = 512,
    window: str = "hamming",
) -> np.ndarray:
    """Linear-frequency cepstral coefficients, shape (T, n_coeffs).

    Per frame: window, zero-pad to n_fft, power spectrum, linear triangular
    filterbank, floored log, orthonormal DCT-II.
    """
    frames = frame_signal(buffer.samples, frame_len, hop)
    frames = frames * make_window(window, frame_len)[None, :]
    power = np.abs(np.fft.rfft(frames, n=n_fft, axis=1)) ** 2
    bank = linear_filterbank(n_filters, n_fft, buffer.sample_rate)
    log_energy = np.log(np.maximum(power @ bank.T, LOG_FLOOR))
    return log_energy @ dct_ii_orthonormal(n_filters)[:n_coeffs].T


def extract(buffer: AudioBuffer, kind: str) -> np.ndarray:
    """Named extractor dispatch: spectrogram | mel | lfcc."""
    if kind == "spectrogram":
        return spectrogram(buffer).values
    if kind == "mel":
        return mel_spectrogram(buffer)
    if kind == "lfcc":
        return lfcc(buffer)
    raise ValueError(f"unknown feature kind {kind!r} (want spectrogram|mel|lfcc)")


def dump_matrix(matrix: np.ndarray, path) -> None:
    """Per-clip feature dump: CSV (row = frame) or .npy by extension.

    Layout is frames x coefficients, row-major, float64.
    """
    from pathlib import Path

    path = Path(path)
    if path.suffix == ".npy":
        np.save(path, np.ascontiguousarray(matrix, dtype=np.float64))
    else:
        np.savetxt(path, matrix, delimiter=",", fmt="%.12g")
