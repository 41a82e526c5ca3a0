"""External-process adapters: codecs, replay processors, and helpers.

The adapter contract is a shell command template with placeholders
``{in}`` (input WAV path), ``{out}`` (output WAV path) and, for codecs,
``{bitrate}`` (kbps).  The engine writes ``{in}``, invokes the command,
and reads ``{out}``; exit 0 means success and stderr is captured into the
raised error / run log on failure.
"""

from __future__ import annotations

import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import AdapterError

# Shipped definitions for the system encoders; the neural-codec and replay
# processors are external projects, so only documented example commands are
# provided (see README).  All templates run under `sh -c`.
BUILTIN_ADAPTERS = {
    "identity": "cp {in} {out}",
    "opus": (
        "ffmpeg -hide_banner -loglevel error -y -i {in} -c:a libopus -b:a {bitrate}k "
        "-f ogg {out}.ogg && "
        "ffmpeg -hide_banner -loglevel error -y -i {out}.ogg -ar 16000 -ac 1 "
        "-sample_fmt s16 {out} && rm -f {out}.ogg"
    ),
    "mp3": (
        "ffmpeg -hide_banner -loglevel error -y -i {in} -c:a libmp3lame -b:a {bitrate}k "
        "-f mp3 {out}.mp3 && "
        "ffmpeg -hide_banner -loglevel error -y -i {out}.mp3 -ar 16000 -ac 1 "
        "-sample_fmt s16 {out} && rm -f {out}.mp3"
    ),
}


@dataclass(frozen=True)
class CommandAdapter:
    """One external processor: a name plus its shell command template."""

    name: str
    command: str


class ProcessLimiter:
    """Bounds the number of concurrently running adapter subprocesses."""

    def __init__(self, max_procs: int):
        self._sem = threading.BoundedSemaphore(max(1, max_procs))

    def __enter__(self):
        self._sem.acquire()
        return self

    def __exit__(self, *exc):
        self._sem.release()
        return False


def expand_template(template: str, mapping: dict[str, str]) -> str:
    out = template
    for key, value in mapping.items():
        out = out.replace("{" + key + "}", str(value))
    return out


def run_adapter(
    adapter: CommandAdapter,
    in_path: Path,
    out_path: Path,
    bitrate_kbps: float | int | None = None,
    limiter: ProcessLimiter | None = None,
    timeout_s: float = 600.0,
) -> None:
    """Run one adapter invocation; raises AdapterError with captured stderr."""
    mapping = {"in": str(in_path), "out": str(out_path)}
    if bitrate_kbps is not None:
        bitrate = float(bitrate_kbps)
        mapping["bitrate"] = str(int(bitrate)) if bitrate.is_integer() else str(bitrate)
    cmd = expand_template(adapter.command, mapping)

    def _run():
        return subprocess.run(
            cmd, shell=True, capture_output=True, text=True, timeout=timeout_s
        )

    try:
        proc = _run() if limiter is None else _with(limiter, _run)
    except subprocess.TimeoutExpired as exc:
        raise AdapterError(f"adapter '{adapter.name}' timed out after {timeout_s}s") from exc
    if proc.returncode != 0:
        raise AdapterError(
            f"adapter '{adapter.name}' exited {proc.returncode}: {cmd}",
            stderr=proc.stderr,
        )
    if not out_path.exists():
        raise AdapterError(
            f"adapter '{adapter.name}' exited 0 but wrote no output: {cmd}",
            stderr=proc.stderr,
        )


def _with(limiter: ProcessLimiter, fn):
    with limiter:
        return fn()
