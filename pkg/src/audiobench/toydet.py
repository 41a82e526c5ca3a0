"""Built-in toy detector: spectral-centroid score over fixed-length input.

Implements the detector protocol (`python -m audiobench.toydet INPUT_DIR
OUTPUT_CSV`) with no model dependencies; exists so sweeps and CI can run
without any ML stack.  Higher score = more spoof-like, matching the
protocol's polarity convention.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .audio import DEFAULT_CLIP_SAMPLES, DEFAULT_SAMPLE_RATE, fix_length, load_audio, resample
from .features import StftConfig, spectrogram
from .rng import derive_key


def clip_score(path: str | Path) -> float:
    """Normalized spectral centroid in [0, 1] of the length-normalized clip."""
    buf = resample(load_audio(path), DEFAULT_SAMPLE_RATE)
    buf = fix_length(buf, DEFAULT_CLIP_SAMPLES, seed=derive_key("toydet", Path(path).stem))
    power = spectrogram(buf, StftConfig()).values.mean(axis=0)
    total = power.sum()
    if total <= 0.0:
        return 0.0
    freqs = np.arange(power.size) * buf.sample_rate / 512
    centroid = float((freqs * power).sum() / total)
    return centroid / (buf.sample_rate / 2)


def score_directory(input_dir: str | Path, output_csv: str | Path) -> int:
    wavs = sorted(Path(input_dir).glob("*.wav"))
    if not wavs:
        print(f"toydet: no WAV files in {input_dir}", file=sys.stderr)
        return 1
    with open(output_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clip_id", "score"])
        for wav in wavs:
            writer.writerow([wav.stem, f"{clip_score(wav):.12g}"])
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="audiobench.toydet", description=__doc__)
    parser.add_argument("input_dir")
    parser.add_argument("output_csv")
    args = parser.parse_args(argv)
    return score_directory(args.input_dir, args.output_csv)


if __name__ == "__main__":
    sys.exit(main())
