"""FIR kernel backend selection.

Imports the compiled Cython extension when present, otherwise falls back to
the numpy implementation.  AUDIOBENCH_PURE_PYTHON=1 forces the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import fallback

try:
    from . import _fir as _ext
except ImportError:  # extension not built
    _ext = None

if os.environ.get("AUDIOBENCH_PURE_PYTHON") == "1":
    _ext = None

# Each primitive routes to its measured winner (see benchmarks/bench_kernels.py):
# numpy's SIMD convolve beats a scalar C loop, while the compiled polyphase
# loop beats per-phase numpy convolution by 1-2 orders of magnitude.
_upfirdn_impl = fallback if _ext is None else _ext

BACKEND: str = _upfirdn_impl.BACKEND


def convolve_valid(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    """'valid'-mode convolution of x with h; output length len(x)-len(h)+1."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    return fallback.convolve_valid(x, h)


def upfirdn(
    h: np.ndarray,
    x: np.ndarray,
    up: int,
    down: int,
    offset: int = 0,
    n_out: int | None = None,
) -> np.ndarray:
    """Polyphase rational-rate FIR: y[m] = (h * upsample(x))[m*down + offset]."""
    h = np.ascontiguousarray(h, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _upfirdn_impl.upfirdn(h, x, int(up), int(down), int(offset), n_out)
