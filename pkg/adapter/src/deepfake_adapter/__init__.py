"""Reference implementation of the benchmark's detector score protocol.

Bridges scoring models to the harness contract (directory of 16 kHz WAVs in,
`clip_id,score` CSV out, higher score = more likely spoof) without importing
the benchmark engine: the protocol boundary is files and exit codes only.
"""

__version__ = "0.1.0"

from .scoring import AdapterConfig, BaselineScorer, CheckpointScorer, score_directory

__all__ = ["AdapterConfig", "BaselineScorer", "CheckpointScorer", "score_directory", "__version__"]
