"""Pure numpy implementations of the FIR primitives.

Used when the compiled extension is unavailable or explicitly disabled;
contracts match kernels._fir exactly (up to floating-point summation order).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def convolve_valid(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    """'valid'-mode convolution of x with h (len(x) >= len(h))."""
    x = np.asarray(x, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if h.size == 0 or x.size < h.size:
        raise ValueError("convolve_valid requires 0 < len(h) <= len(x)")
    return np.convolve(x, h, mode="valid")


def upfirdn(
    h: np.ndarray,
    x: np.ndarray,
    up: int,
    down: int,
    offset: int = 0,
    n_out: int | None = None,
) -> np.ndarray:
    """Polyphase upsample-filter-downsample.

    y[m] = sum_i h[m*down + offset - i*up] * x[i], i.e. sample m*down+offset
    of the convolution of the up-sampled input with h.  Computed one
    polyphase branch at a time so the up-sampled signal is never
    materialized.
    """
    x = np.asarray(x, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if up < 1 or down < 1:
        raise ValueError("up and down must be >= 1")
    n_full = (x.size - 1) * up + h.size
    if n_out is None:
        n_out = max(0, -(-(n_full - offset) // down))
    y = np.zeros(n_out, dtype=np.float64)
    if n_out == 0:
        return y
    t = np.arange(n_out, dtype=np.int64) * down + offset
    phase = t % up
    base = t // up
    for j in np.unique(phase):
        sub = h[j::up]
        if sub.size == 0:
            continue
        conv = np.convolve(x, sub)
        sel = np.nonzero(phase == j)[0]
        idx = base[sel]
        ok = (idx >= 0) & (idx < conv.size)
        y[sel[ok]] = conv[idx[ok]]
    return y
