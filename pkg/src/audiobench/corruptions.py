"""The sixteen corruption kernels and their dispatcher.

Each kernel is a pure transform ``AudioBuffer x severity -> AudioBuffer``:
same inputs (including seed) give bit-identical outputs, every output
sample lies in [-1, 1], and every kernel except time_stretch preserves
length exactly.

Families and categories:

* noise        -- gaussian_noise, background_noise (severity: target SNR dB)
* modification -- low_pass, high_pass (cutoff as fraction of Nyquist),
                  pitch_shift (semitones), echo (delay s), time_stretch
                  (speed factor), smooth (window samples), replay (external)
* compression  -- quantize (bits), codec (bitrate kbps via adapter)
"""

from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .adapters import CommandAdapter, ProcessLimiter, run_adapter
from .audio import AudioBuffer, load_audio, resample, resample_by_factor, save_audio
from .errors import AdapterError, ConfigError, SilentSignalError
from .rng import SplitMix64, derive_key, generator

FAMILIES = (
    "gaussian_noise",
    "background_noise",
    "low_pass",
    "high_pass",
    "pitch_shift",
    "echo",
    "time_stretch",
    "smooth",
    "replay",
    "quantize",
    "codec",
)

CATEGORY_OF_FAMILY = {
    "gaussian_noise": "noise",
    "background_noise": "noise",
    "low_pass": "modification",
    "high_pass": "modification",
    "pitch_shift": "modification",
    "echo": "modification",
    "time_stretch": "modification",
    "smooth": "modification",
    "replay": "modification",
    "quantize": "compression",
    "codec": "compression",
}

CATEGORIES = ("noise", "modification", "compression")

DEFAULT_ECHO_DECAY = 0.5
SINGLE_CONDITION = "default"

# Default severity sweeps per family (codec grids keyed "codec:<id>").
DEFAULT_GRIDS: dict[str, list] = {
    "gaussian_noise": [5, 10, 15, 20, 25, 30, 35, 40],
    "background_noise": [5, 10, 15, 20, 25, 30, 35, 40],
    "low_pass": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "high_pass": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "pitch_shift": [-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0],
    "echo": [0.1, 0.3, 0.5, 0.7, 0.9],
    "time_stretch": [0.7, 0.8, 0.9, 1.1, 1.25, 1.5],
    "smooth": [6, 10, 14, 18, 22, 26],
    "quantize": [2, 3, 4, 5, 6, 7, 8, 9, 10],
    "codec:opus": [16, 32, 64, 128, 256, 496],
    "codec:mp3": [8, 16, 24, 32, 40],
    "codec:encodec": [1.5, 3, 6, 12, 24],
    "codec:dac": [SINGLE_CONDITION],
    "codec:facodec": [SINGLE_CONDITION],
    "codec:audiodec": [SINGLE_CONDITION],
    "replay": [SINGLE_CONDITION],
}


@dataclass(frozen=True)
class CorruptionSpec:
    """One corruption condition: family plus severity (plus codec id)."""

    family: str
    severity: float | int | str | None = None
    codec_id: str | None = None

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown corruption family: {self.family!r}")
        if (self.codec_id is not None) != (self.family == "codec"):
            raise ConfigError("codec_id must be present iff family == 'codec'")
        s = self.severity
        fam = self.family
        if fam in ("gaussian_noise", "background_noise"):
            if not isinstance(s, (int, float)) or math.isnan(s):
                raise ConfigError(f"{fam} severity must be an SNR in dB, got {s!r}")
        elif fam in ("low_pass", "high_pass"):
            if not isinstance(s, (int, float)) or not 0 < s < 1:
                raise ConfigError(f"{fam} cutoff ratio must be in (0, 1), got {s!r}")
        elif fam == "pitch_shift":
            if not isinstance(s, (int, float)) or not math.isfinite(s):
                raise ConfigError(f"pitch_shift semitones must be finite, got {s!r}")
        elif fam == "echo":
            if not isinstance(s, (int, float)) or s <= 0:
                raise ConfigError(f"echo delay must be positive seconds, got {s!r}")
        elif fam == "time_stretch":
            if not isinstance(s, (int, float)) or s <= 0:
                raise ConfigError(f"time_stretch speed must be positive, got {s!r}")
        elif fam == "smooth":
            if not isinstance(s, int) or s < 2:
                raise ConfigError(f"smooth window must be an int >= 2, got {s!r}")
        elif fam == "quantize":
            if not isinstance(s, int) or s < 1:
                raise ConfigError(f"quantize bits must be an int >= 1, got {s!r}")
        elif fam == "codec":
            if s != SINGLE_CONDITION and (not isinstance(s, (int, float)) or s <= 0):
                raise ConfigError(f"codec bitrate must be kbps > 0 or 'default', got {s!r}")
        elif fam == "replay":
            if s not in (None, SINGLE_CONDITION):
                raise ConfigError(f"replay takes no severity, got {s!r}")

    @property
    def grid_key(self) -> str:
        return f"codec:{self.codec_id}" if self.family == "codec" else self.family

    @property
    def severity_label(self) -> str:
        s = self.severity
        if s is None or s == SINGLE_CONDITION:
            return SINGLE_CONDITION
        if isinstance(s, float) and s.is_integer():
            return str(int(s))
        return str(s)

    @property
    def cell_id(self) -> str:
        return f"{self.grid_key}/{self.severity_label}"


def clip_seed(run_seed: int, clip_id: str, spec: CorruptionSpec) -> int:
    """Per-clip kernel seed; adding cells never perturbs existing ones."""
    return derive_key(run_seed, clip_id, spec.grid_key, spec.severity_label)


def spec_from_dict(d: dict) -> CorruptionSpec:
    """Build and validate a spec from config JSON ({family, severity, codec_id})."""
    try:
        family = d["family"]
        severity = d.get("severity", SINGLE_CONDITION if family == "replay" else None)
    except KeyError as exc:
        raise ConfigError(f"corruption cell missing key: {exc}") from exc
    # JSON has no int/float distinction; integer-parameter families accept 4.0
    if family in ("smooth", "quantize") and isinstance(severity, float) and severity.is_integer():
        severity = int(severity)
    spec = CorruptionSpec(family=family, severity=severity, codec_id=d.get("codec_id"))
    spec.validate()
    return spec


# --------------------------------------------------------------------------
# noise

def _mix_at_snr(x: np.ndarray, noise: np.ndarray, snr_db: float) -> np.ndarray:
    """Scale noise so the residual SNR equals snr_db exactly, then add."""
    p_signal = float(np.mean(x**2))
    if p_signal <= 0.0:
        raise SilentSignalError("SNR is undefined for a silent input signal")
    p_noise = float(np.mean(noise**2))
    if p_noise <= 0.0:
        raise SilentSignalError("noise is silent; cannot reach a target SNR")
    gain = math.sqrt(p_signal / (p_noise * 10.0 ** (snr_db / 10.0)))
    return x + gain * noise


def gaussian_noise(buffer: AudioBuffer, snr_db: float, seed: int) -> AudioBuffer:
    """Additive white Gaussian noise at an exact target SNR (inf = bypass)."""
    if math.isinf(snr_db) and snr_db > 0:
        return buffer
    noise = generator(seed).standard_normal(len(buffer))
    mixed = _mix_at_snr(buffer.samples, noise, snr_db)
    return AudioBuffer(np.clip(mixed, -1.0, 1.0), buffer.sample_rate)


def background_noise(
    buffer: AudioBuffer,
    noise_paths: list[str | Path],
    snr_db: float,
    seed: int,
) -> AudioBuffer:
    """Mix a seed-selected corpus clip (cropped/tiled to length) at target SNR."""
    if not noise_paths:
        raise ConfigError("background_noise requires a non-empty noise corpus")
    if math.isinf(snr_db) and snr_db > 0:
        return buffer
    sm = SplitMix64(seed)
    clip = load_audio(noise_paths[sm.randbelow(len(noise_paths))])
    clip = resample(clip, buffer.sample_rate)
    noise = clip.samples
    if not np.any(noise):
        raise SilentSignalError("selected background-noise clip is silent")
    n = len(buffer)
    if noise.size >= n:
        offset = sm.randbelow(noise.size - n + 1)
        crop = noise[offset : offset + n]
    else:
        offset = sm.randbelow(noise.size)
        idx = (offset + np.arange(n)) % noise.size
        crop = noise[idx]
    mixed = _mix_at_snr(buffer.samples, crop, snr_db)
    return AudioBuffer(np.clip(mixed, -1.0, 1.0), buffer.sample_rate)


# --------------------------------------------------------------------------
# spectral modification

_FILTER_BETA = 8.6
_FILTER_ATTEN_DB = 86.7  # Kaiser attenuation corresponding to beta=8.6
_FILTER_MIN_TAPS = 255


def _filter_taps(cutoff_ratio: float) -> int:
    """Tap count sized so the transition band stays within 15% of the cutoff."""
    delta_omega = 2.0 * math.pi * 0.15 * (cutoff_ratio * 0.5)
    n = int(math.ceil((_FILTER_ATTEN_DB - 7.95) / (2.285 * delta_omega))) + 1
    n = max(n, _FILTER_MIN_TAPS)
    return n if n % 2 == 1 else n + 1


def design_fir(mode: str, cutoff_ratio: float) -> np.ndarray:
    """Linear-phase windowed-sinc FIR; high-pass by spectral inversion."""
    n = _filter_taps(cutoff_ratio)
    fc = cutoff_ratio * 0.5  # cycles per sample
    m = np.arange(n) - (n - 1) / 2
    h = 2.0 * fc * np.sinc(2.0 * fc * m) * np.kaiser(n, _FILTER_BETA)
    h /= h.sum()  # exact unit DC gain
    if mode == "high":
        h = -h
        h[(n - 1) // 2] += 1.0  # delta minus low-pass
    elif mode != "low":
        raise ValueError(f"mode must be 'low' or 'high', got {mode!r}")
    return h


def _pad_reflect(x: np.ndarray, left: int, right: int) -> np.ndarray:
    if x.size > max(left, right):
        return np.pad(x, (left, right), mode="reflect")
    # short signals: extend by repeated reflection
    ext = x
    while ext.size < max(left, right) + 1:
        ext = np.concatenate([ext, ext[-2::-1] if ext.size > 1 else ext])
    return np.pad(ext[: max(left, right) + 1 + x.size], (left, right), mode="reflect")[
        : left + x.size + right
    ]


def _fir_same(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    left = (h.size - 1) // 2
    right = h.size - 1 - left
    return kernels.convolve_valid(_pad_reflect(x, left, right), h)


def filter_pass(buffer: AudioBuffer, mode: str, cutoff_ratio: float) -> AudioBuffer:
    """Low/high-pass at cutoff_ratio x Nyquist; length-preserving FIR."""
    if not 0 < cutoff_ratio < 1:
        raise ConfigError(f"cutoff_ratio must be in (0, 1), got {cutoff_ratio}")
    h = design_fir(mode, cutoff_ratio)
    out = _fir_same(buffer.samples, h)
    return AudioBuffer(np.clip(out, -1.0, 1.0), buffer.sample_rate)


def smooth(buffer: AudioBuffer, window: int) -> AudioBuffer:
    """Gaussian 1-D smoothing (sigma = window/6, kernel sums to 1)."""
    if window < 2:
        raise ConfigError(f"smooth window must be >= 2, got {window}")
    sigma = window / 6.0
    m = np.arange(window) - (window - 1) / 2
    kernel = np.exp(-(m**2) / (2.0 * sigma**2))
    kernel /= kernel.sum()
    out = _fir_same(buffer.samples, kernel)
    return AudioBuffer(np.clip(out, -1.0, 1.0), buffer.sample_rate)


# --------------------------------------------------------------------------
# phase-vocoder time/pitch

_PV_N_FFT = 1024
_PV_HOP = 256


def _pv_stretch(x: np.ndarray, speed: float) -> np.ndarray:
    """Phase-vocoder time-scale: output plays 1/speed times as long.

    Magnitudes are sampled at fractional analysis positions; phases advance
    by the expected per-hop rotation plus the wrapped deviation measured
    between neighbouring analysis frames.
    """
    n_fft, hop = _PV_N_FFT, _PV_HOP
    window = np.hanning(n_fft)
    pad = n_fft // 2
    xp = _pad_reflect(x, pad, pad)
    n_frames = 1 + (xp.size - n_fft) // hop
    idx = np.arange(n_frames)[:, None] * hop + np.arange(n_fft)[None, :]
    frames = np.fft.rfft(xp[idx] * window[None, :], axis=1)

    steps = np.arange(0, n_frames, speed)
    omega = 2.0 * np.pi * hop * np.arange(n_fft // 2 + 1) / n_fft
    mags = np.abs(frames)
    phases = np.angle(frames)

    out_frames = np.empty((steps.size, n_fft // 2 + 1), dtype=complex)
    phase_acc = phases[0].copy()
    for i, s in enumerate(steps):
        t0 = int(s)
        t1 = min(t0 + 1, n_frames - 1)
        frac = s - t0
        mag = (1.0 - frac) * mags[t0] + frac * mags[t1]
        out_frames[i] = mag * np.exp(1j * phase_acc)
        dphi = phases[t1] - phases[t0] - omega
        dphi -= 2.0 * np.pi * np.round(dphi / (2.0 * np.pi))  # wrap to (-pi, pi]
        phase_acc += omega + dphi

    # weighted overlap-add with squared-window normalization
    y_len = (steps.size - 1) * hop + n_fft
    y = np.zeros(y_len)
    wsum = np.zeros(y_len)
    segs = np.fft.irfft(out_frames, n=n_fft, axis=1) * window[None, :]
    for i in range(steps.size):
        o = i * hop
        y[o : o + n_fft] += segs[i]
        wsum[o : o + n_fft] += window**2
    y /= np.maximum(wsum, 1e-8)
    return y[pad:]


def _fit_length(x: np.ndarray, n: int) -> np.ndarray:
    if x.size >= n:
        return x[:n]
    return np.pad(x, (0, n - x.size))


def time_stretch(buffer: AudioBuffer, speed: float) -> AudioBuffer:
    """Change playback speed without changing pitch; length = round(len/speed)."""
    if speed <= 0:
        raise ConfigError(f"speed must be positive, got {speed}")
    if speed == 1.0:
        return buffer
    target = int(round(len(buffer) / speed))
    out = _fit_length(_pv_stretch(buffer.samples, speed), target)
    return AudioBuffer(np.clip(out, -1.0, 1.0), buffer.sample_rate)


def pitch_shift(buffer: AudioBuffer, semitones: float) -> AudioBuffer:
    """Scale pitch by 2^(semitones/12) at unchanged duration."""
    if semitones == 0:
        return buffer
    factor = 2.0 ** (semitones / 12.0)
    stretched = _pv_stretch(buffer.samples, 1.0 / factor)  # duration x factor
    out = resample_by_factor(stretched, 1.0 / factor)  # back to original span
    out = _fit_length(out, len(buffer))
    return AudioBuffer(np.clip(out, -1.0, 1.0), buffer.sample_rate)


# --------------------------------------------------------------------------
# temporal / amplitude

def echo(buffer: AudioBuffer, delay_s: float, decay: float = DEFAULT_ECHO_DECAY) -> AudioBuffer:
    """Single reflection: y[n] = x[n] + decay * x[n - d], tail truncated."""
    if not 0 < decay <= 1:
        raise ConfigError(f"decay must be in (0, 1], got {decay}")
    if delay_s <= 0:
        raise ConfigError(f"delay must be positive, got {delay_s}")
    d = int(round(delay_s * buffer.sample_rate))
    if d >= len(buffer):
        raise ConfigError(
            f"echo delay of {d} samples is not shorter than the clip ({len(buffer)})"
        )
    y = buffer.samples.copy()
    y[d:] += decay * buffer.samples[: len(buffer) - d]
    return AudioBuffer(np.clip(y, -1.0, 1.0), buffer.sample_rate)


def quantize(buffer: AudioBuffer, bits: int) -> AudioBuffer:
    """Uniform requantization onto 2^bits levels spanning [-1, 1]."""
    if bits < 1:
        raise ConfigError(f"bits must be >= 1, got {bits}")
    levels = 2**bits
    idx = np.clip(np.rint((buffer.samples + 1.0) / 2.0 * (levels - 1)), 0, levels - 1)
    out = 2.0 * idx / (levels - 1) - 1.0
    return AudioBuffer(out, buffer.sample_rate)


# --------------------------------------------------------------------------
# external processors

_MAX_LENGTH_DEVIATION = 0.10


def _external_roundtrip(
    buffer: AudioBuffer,
    adapter: CommandAdapter,
    bitrate_kbps: float | None,
    limiter: ProcessLimiter | None,
) -> AudioBuffer:
    with tempfile.TemporaryDirectory(prefix="audiobench-adapter-") as tmp:
        in_path = Path(tmp) / "in.wav"
        out_path = Path(tmp) / "out.wav"
        save_audio(buffer, in_path)
        run_adapter(adapter, in_path, out_path, bitrate_kbps, limiter)
        decoded = load_audio(out_path)
    if decoded.sample_rate != buffer.sample_rate:
        decoded = resample(decoded, buffer.sample_rate)
    deviation = abs(len(decoded) - len(buffer)) / len(buffer)
    if deviation > _MAX_LENGTH_DEVIATION:
        raise AdapterError(
            f"adapter '{adapter.name}' changed length by {deviation:.0%} "
            f"({len(buffer)} -> {len(decoded)} samples)"
        )
    out = _fit_length(decoded.samples, len(buffer))
    return AudioBuffer(np.clip(out, -1.0, 1.0), buffer.sample_rate)


def codec_roundtrip(
    buffer: AudioBuffer,
    codec_id: str,
    bitrate_kbps: float | str | None,
    adapter: CommandAdapter,
    limiter: ProcessLimiter | None = None,
) -> AudioBuffer:
    """Encode/decode through an external codec command at a target bitrate."""
    bitrate = None if bitrate_kbps in (None, SINGLE_CONDITION) else float(bitrate_kbps)
    return _external_roundtrip(buffer, adapter, bitrate, limiter)


def replay(
    buffer: AudioBuffer,
    adapter: CommandAdapter,
    limiter: ProcessLimiter | None = None,
) -> AudioBuffer:
    """Replay-effect simulation via an external processor (single condition)."""
    return _external_roundtrip(buffer, adapter, None, limiter)


# --------------------------------------------------------------------------
# dispatch

def apply(
    buffer: AudioBuffer,
    spec: CorruptionSpec,
    seed: int,
    *,
    noise_corpus: list[str | Path] | None = None,
    adapters: dict[str, CommandAdapter] | None = None,
    limiter: ProcessLimiter | None = None,
) -> AudioBuffer:
    """Apply one corruption spec; deterministic given (buffer, spec, seed)."""
    spec.validate()
    fam = spec.family
    if fam == "gaussian_noise":
        return gaussian_noise(buffer, float(spec.severity), seed)
    if fam == "background_noise":
        if not noise_corpus:
            raise ConfigError("background_noise cell requires a noise corpus")
        return background_noise(buffer, noise_corpus, float(spec.severity), seed)
    if fam == "low_pass":
        return filter_pass(buffer, "low", float(spec.severity))
    if fam == "high_pass":
        return filter_pass(buffer, "high", float(spec.severity))
    if fam == "pitch_shift":
        return pitch_shift(buffer, float(spec.severity))
    if fam == "echo":
        return echo(buffer, float(spec.severity))
    if fam == "time_stretch":
        return time_stretch(buffer, float(spec.severity))
    if fam == "smooth":
        return smooth(buffer, int(spec.severity))
    if fam == "quantize":
        return quantize(buffer, int(spec.severity))
    if fam == "codec":
        adapter = (adapters or {}).get(spec.codec_id)
        if adapter is None:
            raise ConfigError(f"no adapter configured for codec '{spec.codec_id}'")
        return codec_roundtrip(buffer, spec.codec_id, spec.severity, adapter, limiter)
    if fam == "replay":
        adapter = (adapters or {}).get("replay")
        if adapter is None:
            raise ConfigError("no adapter configured for replay")
        return replay(buffer, adapter, limiter)
    raise ConfigError(f"unknown corruption family: {fam!r}")
