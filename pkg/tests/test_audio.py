"""WAV I/O, resampling, and fixed-length normalization contracts."""

import struct

import numpy as np
import pytest

from audiobench.audio import (
    AudioBuffer,
    fix_length,
    load_audio,
    resample,
    save_audio,
)
from audiobench.errors import WavFormatError

from oracles import peak_frequency


def _write_wav(path, pcm_bytes, n_channels=1, sample_rate=16000, fmt=1, bits=16):
    header = b"RIFF" + struct.pack("<I", 36 + len(pcm_bytes)) + b"WAVE"
    block = n_channels * bits // 8
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, fmt, n_channels, sample_rate, sample_rate * block, block, bits
    )
    header += b"data" + struct.pack("<I", len(pcm_bytes))
    path.write_bytes(header + pcm_bytes)


class TestLoad:
    def test_pcm16_scaling(self, tmp_path):
        path = tmp_path / "t.wav"
        _write_wav(path, struct.pack("<3h", 0, 16384, -32768))
        buf = load_audio(path)
        np.testing.assert_array_equal(buf.samples, [0.0, 0.5, -1.0])

    def test_stereo_downmix_average(self, tmp_path):
        path = tmp_path / "t.wav"
        frames = struct.pack("<4h", 32767, 0, 32767, 0)  # L=~1.0, R=0.0
        _write_wav(path, frames, n_channels=2)
        buf = load_audio(path)
        np.testing.assert_allclose(buf.samples, [32767 / 32768 / 2] * 2)

    def test_sample_rate_passthrough(self, tmp_path):
        path = tmp_path / "t.wav"
        _write_wav(path, struct.pack("<2h", 1, 2), sample_rate=48000)
        assert load_audio(path).sample_rate == 48000

    def test_float32_wav(self, tmp_path):
        path = tmp_path / "t.wav"
        _write_wav(path, struct.pack("<3f", 0.25, -0.5, 1.0), fmt=3, bits=32)
        np.testing.assert_allclose(load_audio(path).samples, [0.25, -0.5, 1.0])

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_audio(tmp_path / "nope.wav")

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.wav"
        path.write_bytes(b"not a wav at all, definitely not 44 bytes of RIFF")
        with pytest.raises(WavFormatError):
            load_audio(path)

    def test_zero_length_audio(self, tmp_path):
        path = tmp_path / "empty.wav"
        _write_wav(path, b"")
        with pytest.raises(WavFormatError):
            load_audio(path)

    def test_unsupported_encoding(self, tmp_path):
        path = tmp_path / "t.wav"
        _write_wav(path, struct.pack("<4b", 1, 2, 3, 4), fmt=1, bits=8)
        with pytest.raises(WavFormatError):
            load_audio(path)


class TestSave:
    @pytest.mark.parametrize(
        "value,pcm", [(0.0, 0), (1.0, 32767), (-1.0, -32768)]
    )
    def test_extreme_codes(self, tmp_path, value, pcm):
        path = tmp_path / "t.wav"
        save_audio(AudioBuffer(np.array([value]), 16000), path)
        raw = path.read_bytes()
        assert struct.unpack("<h", raw[44:46])[0] == pcm

    def test_quarter_scale(self, tmp_path):
        path = tmp_path / "t.wav"
        save_audio(AudioBuffer(np.array([0.25]), 16000), path)
        (code,) = struct.unpack("<h", path.read_bytes()[44:46])
        assert abs(code - 8192) <= 1  # round(0.25 * full scale)

    def test_out_of_range_clamped(self, tmp_path):
        path = tmp_path / "t.wav"
        save_audio(AudioBuffer(np.array([0.5]), 16000), path)
        buf = load_audio(path)
        clipped = AudioBuffer(np.array([0.5]), 16000)
        assert abs(buf.samples[0] - clipped.samples[0]) < 1 / 32767

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            save_audio(AudioBuffer(np.zeros(4), 16000), tmp_path / "no" / "dir" / "t.wav")

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip_within_one_code(self, tmp_path, seed):
        rng = np.random.default_rng(seed)
        x = rng.uniform(-1, 1, 4096)
        path = tmp_path / "t.wav"
        save_audio(AudioBuffer(x, 16000), path)
        back = load_audio(path)
        assert back.sample_rate == 16000
        assert np.max(np.abs(back.samples - x)) <= 1 / 32767


class TestResample:
    def test_identity_same_rate(self, random_buffer):
        buf = random_buffer(1234)
        assert resample(buf, 16000) is buf

    def test_length_ratio(self, random_buffer):
        buf = random_buffer(64000, sr=32000)
        assert len(resample(buf, 16000)) == 32000

    def test_sine_survives_48k_to_16k(self):
        t = np.arange(48000) / 48000
        buf = AudioBuffer(0.5 * np.sin(2 * np.pi * 440 * t), 48000)
        out = resample(buf, 16000)
        assert out.sample_rate == 16000
        measured = peak_frequency(out.samples, 16000)
        assert abs(measured - 440) < 16000 / len(out)  # within one bin

    def test_fractional_ratio_22050_to_16000(self):
        t = np.arange(22050) / 22050
        buf = AudioBuffer(0.5 * np.sin(2 * np.pi * 1000 * t), 22050)
        out = resample(buf, 16000)
        assert len(out) == 16000
        assert abs(peak_frequency(out.samples, 16000) - 1000) < 2.0

    def test_rejects_bad_rate(self, random_buffer):
        with pytest.raises(ValueError):
            resample(random_buffer(100), 0)


class TestFixLength:
    def test_identity_when_equal(self, random_buffer):
        buf = random_buffer(64000)
        assert fix_length(buf, 64000, seed=1) is buf

    def test_tiling_rule(self):
        buf = AudioBuffer(np.array([0.1, 0.2, 0.3]), 16000)
        out = fix_length(buf, 7, seed=9)
        np.testing.assert_allclose(out.samples, [0.1, 0.2, 0.3, 0.1, 0.2, 0.3, 0.1])

    def test_crop_is_contiguous_window(self, random_buffer):
        buf = random_buffer(100000)
        out = fix_length(buf, 64000, seed=77)
        # the crop must appear verbatim in the source
        starts = np.flatnonzero(buf.samples == out.samples[0])
        assert any(
            np.array_equal(buf.samples[s : s + 64000], out.samples)
            for s in starts
        )

    def test_crop_deterministic(self, random_buffer):
        buf = random_buffer(100000)
        a = fix_length(buf, 64000, seed=5)
        b = fix_length(buf, 64000, seed=5)
        np.testing.assert_array_equal(a.samples, b.samples)

    @pytest.mark.parametrize("n", [1, 2, 3, 999, 64000, 64001, 200000])
    def test_exact_output_length(self, n):
        buf = AudioBuffer(np.linspace(-0.5, 0.5, n), 16000)
        assert len(fix_length(buf, 64000, seed=0)) == 64000


class TestAudioBuffer:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            AudioBuffer(np.array([]), 16000)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            AudioBuffer(np.array([0.0, np.nan]), 16000)

    def test_rejects_2d(self):
        with pytest.raises(ValueError):
            AudioBuffer(np.zeros((2, 10)), 16000)
