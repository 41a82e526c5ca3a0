from __future__ import annotations

import os
import stat
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `import oracles`

from audiobench.audio import AudioBuffer


@pytest.fixture
def sine():
    def _make(freq_hz: float, duration_s: float = 1.0, sr: int = 16000, amp: float = 0.5):
        t = np.arange(int(duration_s * sr)) / sr
        return AudioBuffer(amp * np.sin(2 * np.pi * freq_hz * t), sr)

    return _make


@pytest.fixture
def random_buffer():
    def _make(n: int = 16000, sr: int = 16000, seed: int = 0, amp: float = 0.5):
        rng = np.random.default_rng(seed)
        return AudioBuffer(rng.uniform(-amp, amp, n), sr)

    return _make


def write_script(path: Path, body: str) -> Path:
    path.write_text("#!/bin/sh\n" + body)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return path


@pytest.fixture
def fake_visqol(tmp_path):
    """Stub ViSQOL binary printing a fixed MOS-LQO value."""

    def _make(mos: float = 4.8) -> str:
        return str(
            write_script(tmp_path / f"visqol_{mos}", f'echo "MOS-LQO:		{mos}"\n')
        )

    return _make
