"""Feature vector for the checkpoint scorer.

FEATURE_VERSION names the exact recipe; checkpoints record the version they
were trained against and loading rejects a mismatch.

v1: mean log energy in 16 equal-width bands of the 0-8 kHz magnitude-squared
spectrum (1024-point frames, hop 512, Hann window) plus overall log RMS;
17 dimensions.
"""

from __future__ import annotations

import numpy as np

FEATURE_VERSION = "bandlog-v1"
N_BANDS = 16
N_FFT = 1024
HOP = 512


def band_log_energies(x: np.ndarray) -> np.ndarray:
    """(N_BANDS + 1,) feature vector of a prepared fixed-length clip."""
    n_frames = max(1, 1 + (x.size - N_FFT) // HOP)
    window = np.hanning(N_FFT)
    spec_sum = np.zeros(N_FFT // 2 + 1)
    for t in range(n_frames):
        frame = x[t * HOP : t * HOP + N_FFT]
        if frame.size < N_FFT:
            frame = np.pad(frame, (0, N_FFT - frame.size))
        spec_sum += np.abs(np.fft.rfft(frame * window)) ** 2
    spec = spec_sum / n_frames
    edges = np.linspace(0, spec.size, N_BANDS + 1).astype(int)
    bands = np.array([spec[a:b].sum() for a, b in zip(edges[:-1], edges[1:])])
    rms = float(np.sqrt(np.mean(x**2)))
    return np.concatenate([np.log(bands + 1e-12), [np.log(rms + 1e-12)]])
