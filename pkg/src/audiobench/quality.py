"""Perturbation-quality measurement and the acceptability gate.

Two metrics: residual SNR (computed in-process) and ViSQOL (an external
tool, consumed through a command adapter and cached by content hash).
A condition is acceptable when its mean ViSQOL score is at least
:data:`ACCEPTABLE_VISQOL`; with no tool configured, acceptability is
reported as unknown rather than silently assumed.
"""

from __future__ import annotations

import hashlib
import math
import os
import re
import shlex
import subprocess
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adapters import ProcessLimiter, expand_template
from .audio import AudioBuffer, save_audio
from .errors import QualityToolError, SilentSignalError

ACCEPTABLE_VISQOL = 3.0
VISQOL_ENV_VAR = "AUDIOBENCH_VISQOL"

# Default invocation for a stock visqol binary in 16 kHz speech mode.
_DEFAULT_TEMPLATE = "{binary} --reference_file {ref} --degraded_file {deg} --use_speech_mode"
_MOS_PATTERN = re.compile(r"MOS-LQO:?\s*([0-9]+(?:\.[0-9]+)?)")


def snr_db(reference: AudioBuffer, degraded: AudioBuffer) -> float:
    """10*log10(signal power / residual power); +inf for an exact match."""
    if reference.sample_rate != degraded.sample_rate:
        raise ValueError("sample rates differ")
    if len(reference) != len(degraded):
        raise ValueError(f"length mismatch: {len(reference)} vs {len(degraded)}")
    p_ref = float(np.sum(reference.samples**2))
    if p_ref <= 0.0:
        raise SilentSignalError("SNR is undefined for a silent reference")
    p_res = float(np.sum((degraded.samples - reference.samples) ** 2))
    if p_res == 0.0:
        return math.inf
    return 10.0 * math.log10(p_ref / p_res)


@dataclass(frozen=True)
class QualityRecord:
    clip_id: str
    snr_db: float | None  # None when undefined (e.g. length-changing corruption)
    visqol: float | None

    @property
    def acceptable(self) -> bool | None:
        if self.visqol is None:
            return None
        return self.visqol >= ACCEPTABLE_VISQOL


class VisqolAdapter:
    """Wraps the external ViSQOL tool; scores are cached by content hash."""

    def __init__(self, command_template: str, limiter: ProcessLimiter | None = None):
        self.command_template = command_template
        self.limiter = limiter
        self._cache: dict[tuple[str, str], float] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_config(cls, configured: str | None, limiter: ProcessLimiter | None = None):
        """Build from a config value (binary path or full template) or env var.

        Returns None when no tool is configured.
        """
        value = os.environ.get(VISQOL_ENV_VAR) or configured
        if not value:
            return None
        template = value if "{ref}" in value else _DEFAULT_TEMPLATE.replace("{binary}", value)
        return cls(template, limiter)

    def available(self) -> bool:
        """True when the underlying executable exists on this machine."""
        try:
            exe = shlex.split(self.command_template)[0]
        except ValueError:
            return False
        from shutil import which

        return Path(exe).exists() or which(exe) is not None

    def score(self, reference: AudioBuffer, degraded: AudioBuffer) -> float:
        key = (_content_hash(reference), _content_hash(degraded))
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        with tempfile.TemporaryDirectory(prefix="audiobench-visqol-") as tmp:
            ref_path = Path(tmp) / "ref.wav"
            deg_path = Path(tmp) / "deg.wav"
            save_audio(reference, ref_path)
            save_audio(degraded, deg_path)
            cmd = expand_template(
                self.command_template, {"ref": str(ref_path), "deg": str(deg_path)}
            )
            try:
                if self.limiter is not None:
                    with self.limiter:
                        proc = subprocess.run(cmd, shell=True, capture_output=True, text=True)
                else:
                    proc = subprocess.run(cmd, shell=True, capture_output=True, text=True)
            except OSError as exc:
                raise QualityToolError(f"could not invoke ViSQOL: {exc}") from exc
        if proc.returncode != 0:
            raise QualityToolError(
                f"ViSQOL exited {proc.returncode}: {proc.stderr.strip()[:500]}"
            )
        match = _MOS_PATTERN.search(proc.stdout)
        if match is None:
            raise QualityToolError(f"could not parse MOS-LQO from ViSQOL output: {proc.stdout[:500]!r}")
        value = float(match.group(1))
        if not 1.0 <= value <= 5.0:
            raise QualityToolError(f"ViSQOL score {value} outside [1, 5]")
        with self._lock:
            self._cache[key] = value  # last write wins on identical keys
        return value


def _content_hash(buffer: AudioBuffer) -> str:
    digest = hashlib.sha256()
    digest.update(str(buffer.sample_rate).encode())
    digest.update(np.ascontiguousarray(buffer.samples).tobytes())
    return digest.hexdigest()


@dataclass
class QualityCellStats:
    """Per-cell aggregate of a seeded quality sample."""

    family: str
    severity_label: str
    n: int = 0
    mean_snr: float | None = None
    mean_visqol: float | None = None
    std_visqol: float | None = None
    acceptable: bool | None = None
    records: list[QualityRecord] = field(default_factory=list)


def summarize_quality(
    family: str, severity_label: str, records: list[QualityRecord]
) -> QualityCellStats:
    stats = QualityCellStats(family=family, severity_label=severity_label, records=records)
    stats.n = len(records)
    snrs = [r.snr_db for r in records if r.snr_db is not None and math.isfinite(r.snr_db)]
    if snrs:
        stats.mean_snr = float(np.mean(snrs))
    scores = [r.visqol for r in records if r.visqol is not None]
    if scores:
        stats.mean_visqol = float(np.mean(scores))
        stats.std_visqol = float(np.std(scores))
        stats.acceptable = stats.mean_visqol >= ACCEPTABLE_VISQOL
    return stats


def measure_pair(
    clip_id: str,
    reference: AudioBuffer,
    degraded: AudioBuffer,
    visqol: VisqolAdapter | None,
) -> QualityRecord:
    """SNR (when lengths match) plus optional ViSQOL for one clip pair.

    SNR is reported absent for length-changing corruptions; ViSQOL relies on
    the tool's own alignment in that case.
    """
    snr: float | None = None
    if len(reference) == len(degraded):
        try:
            snr = snr_db(reference, degraded)
        except SilentSignalError:
            snr = None
    score = visqol.score(reference, degraded) if visqol is not None else None
    return QualityRecord(clip_id=clip_id, snr_db=snr, visqol=score)


def quality_sweep(
    clips: dict[str, AudioBuffer] | list,
    specs: list,
    sample_n: int,
    seed: int,
    *,
    visqol: VisqolAdapter | None = None,
    noise_corpus: list | None = None,
    adapters: dict | None = None,
) -> list[QualityCellStats]:
    """Quality-vs-severity curves: corrupt a seeded sample per condition.

    ``clips`` maps clip_id -> AudioBuffer (a list of (id, buffer) works too);
    ``specs`` is the list of corruption conditions to measure.  Per-clip
    errors are recorded by dropping the pair, not by aborting the sweep.
    """
    from .corruptions import apply, clip_seed  # local import: avoid cycle at load
    from .rng import derive_key, sample_without_replacement

    items = list(clips.items()) if isinstance(clips, dict) else list(clips)
    if sample_n > len(items):
        raise ValueError(f"sample_n={sample_n} exceeds corpus size {len(items)}")
    out = []
    for spec in specs:
        chosen = sample_without_replacement(
            len(items), sample_n, derive_key(seed, "quality", spec.cell_id)
        )
        records = []
        for idx in chosen:
            clip_id, ref = items[idx]
            try:
                deg = apply(
                    ref,
                    spec,
                    clip_seed(seed, clip_id, spec),
                    noise_corpus=noise_corpus,
                    adapters=adapters,
                )
                records.append(measure_pair(clip_id, ref, deg, visqol))
            except Exception:
                continue
        out.append(summarize_quality(spec.grid_key, spec.severity_label, records))
    return out
