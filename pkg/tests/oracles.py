"""Independent brute-force oracles for the test suite.

Everything here is written straight from definitions (dense DFT matrices,
per-threshold recounting, pairwise comparisons, literal zero-stuffed
convolution) and deliberately shares no code with the package paths it
checks.
"""

from __future__ import annotations

import functools
import math

import numpy as np


# ---------------------------------------------------------------------------
# DSP oracles

def hamming_window(n: int) -> np.ndarray:
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * np.arange(n) / (n - 1))


@functools.cache
def dense_dft_matrix(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n)


def naive_stft(x: np.ndarray, n_fft: int, hop: int) -> np.ndarray:
    """Hamming-windowed one-sided DFT per frame, via the dense DFT matrix."""
    w = hamming_window(n_fft)
    dft = dense_dft_matrix(n_fft)
    n_frames = 1 + (len(x) - n_fft) // hop
    out = np.empty((n_frames, n_fft // 2 + 1), dtype=complex)
    for t in range(n_frames):
        frame = x[t * hop : t * hop + n_fft] * w
        out[t] = (dft @ frame)[: n_fft // 2 + 1]
    return out


def naive_spectrogram(x: np.ndarray, n_fft: int, hop: int) -> np.ndarray:
    return np.abs(naive_stft(x, n_fft, hop)) ** 2


def triangle_weight(f: float, lo: float, mid: float, hi: float) -> float:
    if f <= lo or f >= hi:
        return 0.0 if f != mid else 1.0
    if f <= mid:
        return (f - lo) / (mid - lo)
    return (hi - f) / (hi - mid)


@functools.cache
def naive_linear_filterbank(n_filters: int, n_fft: int, sr: int) -> np.ndarray:
    edges = [sr / 2 * i / (n_filters + 1) for i in range(n_filters + 2)]
    bank = np.zeros((n_filters, n_fft // 2 + 1))
    for k in range(n_filters):
        for b in range(n_fft // 2 + 1):
            bank[k, b] = triangle_weight(b * sr / n_fft, edges[k], edges[k + 1], edges[k + 2])
    return bank


@functools.cache
def naive_dct_ii(n: int) -> np.ndarray:
    out = np.zeros((n, n))
    for m in range(n):
        scale = math.sqrt(1.0 / n) if m == 0 else math.sqrt(2.0 / n)
        for j in range(n):
            out[m, j] = scale * math.cos(math.pi * m * (2 * j + 1) / (2 * n))
    return out


def naive_mel_filterbank(n_mels: int, n_fft: int, sr: int) -> np.ndarray:
    def to_mel(f):
        return 2595.0 * math.log10(1.0 + f / 700.0)

    def to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    top = to_mel(sr / 2)
    edges = [to_hz(top * i / (n_mels + 1)) for i in range(n_mels + 2)]
    bank = np.zeros((n_mels, n_fft // 2 + 1))
    for k in range(n_mels):
        for b in range(n_fft // 2 + 1):
            bank[k, b] = triangle_weight(b * sr / n_fft, edges[k], edges[k + 1], edges[k + 2])
    return bank


def naive_lfcc(x: np.ndarray, sr: int) -> np.ndarray:
    """Straight-line LFCC: dense DFT + dense filterbank + dense DCT-II."""
    frame_len, hop, n_fft, n_filters = 320, 160, 512, 60
    w = hamming_window(frame_len)
    dft = dense_dft_matrix(n_fft)
    bank = naive_linear_filterbank(n_filters, n_fft, sr)
    dct = naive_dct_ii(n_filters)
    n_frames = 1 + (len(x) - frame_len) // hop
    out = np.zeros((n_frames, n_filters))
    for t in range(n_frames):
        frame = np.zeros(n_fft)
        frame[:frame_len] = x[t * hop : t * hop + frame_len] * w
        power = np.abs((dft @ frame)[: n_fft // 2 + 1]) ** 2
        log_e = np.log(np.maximum(bank @ power, 1e-10))
        out[t] = dct @ log_e
    return out


def relative_error(got: np.ndarray, want: np.ndarray) -> float:
    denom = np.linalg.norm(want.ravel())
    if denom == 0.0:
        return float(np.linalg.norm(got.ravel()))
    return float(np.linalg.norm((got - want).ravel()) / denom)


def peak_frequency(x: np.ndarray, sr: int, zero_pad: int = 4) -> float:
    """Dominant frequency via zero-padded FFT and parabolic interpolation."""
    w = np.hanning(len(x))
    spec = np.abs(np.fft.rfft(x * w, n=zero_pad * len(x)))
    k = int(np.argmax(spec))
    if 0 < k < len(spec) - 1:
        a, b, c = np.log(spec[k - 1 : k + 2] + 1e-300)
        denom = a - 2 * b + c
        if denom != 0:
            k = k + 0.5 * (a - c) / denom
    return k * sr / (zero_pad * len(x))


def naive_conv_same_reflect(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """O(n*w) 'same' convolution with reflect padding, literal loops."""
    w = len(kernel)
    left = (w - 1) // 2
    right = w - 1 - left
    padded = np.concatenate([x[1 : left + 1][::-1], x, x[-right - 1 : -1][::-1]])
    out = np.zeros(len(x))
    for i in range(len(x)):
        acc = 0.0
        for k in range(w):
            acc += kernel[k] * padded[i + w - 1 - k]
        out[i] = acc
    return out


def naive_upfirdn(h: np.ndarray, x: np.ndarray, up: int, down: int, offset: int = 0,
                  n_out: int | None = None) -> np.ndarray:
    """Literal zero-stuff, convolve, downsample."""
    stuffed = np.zeros((len(x) - 1) * up + 1)
    stuffed[::up] = x
    full = np.convolve(stuffed, h)
    if n_out is None:
        n_out = -(-(len(full) - offset) // down)
    out = np.zeros(n_out)
    for m in range(n_out):
        t = m * down + offset
        if 0 <= t < len(full):
            out[m] = full[t]
    return out


# ---------------------------------------------------------------------------
# metric oracles (per-threshold recounting / pairwise comparison)

def brute_eer(bona: np.ndarray, spoof: np.ndarray) -> tuple[float, float]:
    distinct = sorted(set(np.concatenate([bona, spoof]).tolist()))
    candidates = [-math.inf]
    for a, b in zip(distinct[:-1], distinct[1:]):
        candidates.append((a + b) / 2.0)
    candidates.append(math.inf)
    best_key, best = None, None
    for t in candidates:
        fpr = sum(1 for s in bona if s >= t) / len(bona)
        fnr = sum(1 for s in spoof if s < t) / len(spoof)
        key = (abs(fpr - fnr), fpr, t)
        if best_key is None or key < best_key:
            best_key, best = key, ((fpr + fnr) / 2.0, t)
    return best


def brute_accuracy_at(bona: np.ndarray, spoof: np.ndarray, threshold: float) -> float:
    tn = sum(1 for s in bona if s < threshold)
    tp = sum(1 for s in spoof if s >= threshold)
    return (tp + tn) / (len(bona) + len(spoof))


def brute_auroc(bona: np.ndarray, spoof: np.ndarray) -> float:
    wins = 0.0
    for s in spoof:
        for b in bona:
            if s > b:
                wins += 1.0
            elif s == b:
                wins += 0.5
    return wins / (len(bona) * len(spoof))


def brute_roc(bona: np.ndarray, spoof: np.ndarray) -> list[tuple[float, float, float]]:
    points = [(0.0, 0.0, math.inf)]
    for t in sorted(set(np.concatenate([bona, spoof]).tolist()), reverse=True):
        fpr = sum(1 for s in bona if s >= t) / len(bona)
        tpr = sum(1 for s in spoof if s >= t) / len(spoof)
        points.append((fpr, tpr, t))
    return points
