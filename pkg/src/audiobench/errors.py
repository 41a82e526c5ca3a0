"""Exception hierarchy for the engine."""

from __future__ import annotations


class AudiobenchError(Exception):
    """Base class for all engine errors."""


class WavFormatError(AudiobenchError):
    """Unreadable or unsupported WAV file."""


class SilentSignalError(AudiobenchError):
    """An operation that needs signal power was given silence."""


class AdapterError(AudiobenchError):
    """External codec/replay/detector process failed or broke its contract."""

    def __init__(self, message: str, stderr: str = ""):
        super().__init__(message)
        self.stderr = stderr


class ProtocolError(AudiobenchError):
    """Detector score output violated the score-file protocol."""


class QualityToolError(AudiobenchError):
    """Perceptual quality tool missing, failing, or producing garbage."""


class ConfigError(AudiobenchError):
    """Invalid run configuration, manifest, or CLI arguments."""
