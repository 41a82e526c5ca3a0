# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled FIR primitives: direct-form convolution and polyphase upfirdn.

Same contracts as kernels.fallback; both backends are interchangeable and
are cross-checked in the test suite.
"""

import numpy as np

BACKEND = "cython"


def convolve_valid(double[::1] x, double[::1] h):
    """'valid'-mode convolution of x with h (len(x) >= len(h))."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = h.shape[0]
    if m == 0 or n < m:
        raise ValueError("convolve_valid requires 0 < len(h) <= len(x)")
    cdef Py_ssize_t n_out = n - m + 1
    out = np.empty(n_out, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n_out):
        acc = 0.0
        for k in range(m):
            acc += h[k] * x[i + m - 1 - k]
        y[i] = acc
    return out


def upfirdn(double[::1] h, double[::1] x, Py_ssize_t up, Py_ssize_t down,
            Py_ssize_t offset=0, n_out=None):
    """Polyphase upsample-filter-downsample.

    y[m] = sum_i h[m*down + offset - i*up] * x[i], i.e. sample m*down+offset
    of the convolution of the up-sampled input with h.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m_h = h.shape[0]
    if up < 1 or down < 1:
        raise ValueError("up and down must be >= 1")
    cdef Py_ssize_t n_full = (n - 1) * up + m_h
    cdef Py_ssize_t count
    if n_out is None:
        count = (n_full - offset + down - 1) // down
        if count < 0:
            count = 0
    else:
        count = n_out
    out = np.zeros(count, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t m, t, i, i_lo, i_hi
    cdef double acc
    for m in range(count):
        t = m * down + offset
        # valid input range: 0 <= i < n and 0 <= t - i*up < m_h
        i_lo = (t - m_h + up) // up  # ceil((t - m_h + 1) / up)
        if i_lo < 0:
            i_lo = 0
        i_hi = t // up
        if i_hi > n - 1:
            i_hi = n - 1
        acc = 0.0
        for i in range(i_lo, i_hi + 1):
            acc += h[t - i * up] * x[i]
        y[m] = acc
    return out
