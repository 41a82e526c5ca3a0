#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the numpy fallback.

Times the two FIR primitives on sweep-realistic shapes and prints a
comparison table.  Run from the repo root:

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from audiobench.kernels import BACKEND, fallback

try:
    from audiobench.kernels import _fir as ext
except ImportError:
    ext = None


def _time(fn, *args, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    rng = np.random.default_rng(0)
    clip = rng.uniform(-0.5, 0.5, 64000)  # 4 s at 16 kHz

    cases = [
        ("convolve_valid 255 taps", "convolve_valid", (clip, rng.standard_normal(255))),
        ("convolve_valid 731 taps", "convolve_valid", (clip, rng.standard_normal(731))),
        ("upfirdn 48k->16k (1/3)", "upfirdn", (rng.standard_normal(65), clip, 1, 3)),
        ("upfirdn 22.05k->16k (320/441)", "upfirdn", (rng.standard_normal(64 * 320 + 1), clip, 320, 441)),
    ]

    print(f"selected backend at import: {BACKEND}")
    print(f"{'case':34s} {'numpy':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, fn_name, args in cases:
        t_py = _time(getattr(fallback, fn_name), *args)
        if ext is None:
            print(f"{label:34s} {t_py * 1e3:8.2f}ms {'n/a':>10s} {'n/a':>8s}")
            continue
        contiguous = tuple(
            np.ascontiguousarray(a, dtype=np.float64) if isinstance(a, np.ndarray) else a
            for a in args
        )
        t_cy = _time(getattr(ext, fn_name), *contiguous)
        print(f"{label:34s} {t_py * 1e3:8.2f}ms {t_cy * 1e3:8.2f}ms {t_py / t_cy:7.2f}x")

    if ext is not None:
        h = rng.standard_normal(513)
        a = fallback.convolve_valid(clip, h)
        b = ext.convolve_valid(np.ascontiguousarray(clip), np.ascontiguousarray(h))
        print(f"max |numpy - cython| on 513-tap conv: {np.max(np.abs(a - b)):.3e}")


if __name__ == "__main__":
    main()
