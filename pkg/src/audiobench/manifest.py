"""Labeled corpus manifests: CSV/JSONL loading, validation, and converters.

Required columns: clip_id, path, label (bona_fide|spoof), split
(train|val|test).  Any extra columns become free-form tags (speaker,
generator, source, ...).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .rng import SplitMix64, derive_key

LABELS = ("bona_fide", "spoof")
SPLITS = ("train", "val", "test")
REQUIRED_COLUMNS = ("clip_id", "path", "label", "split")


@dataclass(frozen=True)
class ManifestEntry:
    clip_id: str
    path: str
    label: str
    split: str
    tags: dict = field(default_factory=dict)


class Manifest:
    def __init__(self, entries: list[ManifestEntry]):
        self.entries = entries
        self.by_id = {e.clip_id: e for e in entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def select(self, split: str | None = None, label: str | None = None) -> list[ManifestEntry]:
        out = self.entries
        if split is not None:
            out = [e for e in out if e.split == split]
        if label is not None:
            out = [e for e in out if e.label == label]
        return out


def _entry_from_record(record: dict, source: str, line: int) -> ManifestEntry:
    missing = [c for c in REQUIRED_COLUMNS if not record.get(c)]
    if missing:
        raise ConfigError(f"{source}:{line}: missing column(s) {', '.join(missing)}")
    label = record["label"]
    if label not in LABELS:
        raise ConfigError(f"{source}:{line}: unknown label {label!r} (want bona_fide|spoof)")
    split = record["split"]
    if split not in SPLITS:
        raise ConfigError(f"{source}:{line}: unknown split {split!r} (want train|val|test)")
    tags = {
        k: v for k, v in record.items() if k not in REQUIRED_COLUMNS and v not in (None, "")
    }
    return ManifestEntry(
        clip_id=record["clip_id"], path=record["path"], label=label, split=split, tags=tags
    )


def load_manifest(path: str | Path) -> Manifest:
    """Load and validate a CSV or JSONL manifest; duplicate clip_ids are fatal."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"manifest not found: {path}")
    entries: list[ManifestEntry] = []
    if path.suffix.lower() in (".jsonl", ".ndjson"):
        with path.open() as fh:
            for i, raw in enumerate(fh, start=1):
                raw = raw.strip()
                if not raw:
                    continue
                try:
                    record = json.loads(raw)
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"{path}:{i}: invalid JSON: {exc}") from exc
                tags = record.pop("tags", {})
                entries.append(_entry_from_record({**tags, **record}, str(path), i))
    else:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise ConfigError(f"{path}: empty manifest")
            missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
            if missing:
                raise ConfigError(f"{path}: missing column(s) {', '.join(missing)}")
            for i, record in enumerate(reader, start=2):
                entries.append(_entry_from_record(record, str(path), i))
    seen: set[str] = set()
    for e in entries:
        if e.clip_id in seen:
            raise ConfigError(f"{path}: duplicate clip_id {e.clip_id!r}")
        seen.add(e.clip_id)
    if not entries:
        raise ConfigError(f"{path}: empty manifest")
    return Manifest(entries)


def save_manifest(manifest: Manifest, path: str | Path) -> None:
    """Write a manifest as CSV, spreading tags into extra columns."""
    path = Path(path)
    tag_keys = sorted({k for e in manifest for k in e.tags})
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(REQUIRED_COLUMNS) + tag_keys)
        for e in manifest:
            writer.writerow(
                [e.clip_id, e.path, e.label, e.split] + [e.tags.get(k, "") for k in tag_keys]
            )


def assign_split(clip_id: str, seed: int = 0, ratios: tuple[float, float, float] = (0.7, 0.1, 0.2)) -> str:
    """Deterministic train/val/test assignment by hashed clip_id."""
    u = SplitMix64(derive_key(seed, "split", clip_id)).uniform()
    if u < ratios[0]:
        return "train"
    if u < ratios[0] + ratios[1]:
        return "val"
    return "test"


def from_wavefake(root: str | Path, seed: int = 0) -> Manifest:
    """Map a WaveFake-style directory layout into a labeled manifest.

    The real-speech directory (ljspeech / LJSpeech-1.1 / real) becomes
    bona_fide; every other subdirectory containing WAVs becomes spoof with
    its directory name recorded as the generator tag.  Splits are assigned
    deterministically at 70/10/20.
    """
    root = Path(root)
    if not root.is_dir():
        raise ConfigError(f"not a directory: {root}")
    real_names = {"ljspeech", "ljspeech-1.1", "real", "wavs"}
    entries: list[ManifestEntry] = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        wavs = sorted(sub.rglob("*.wav"))
        if not wavs:
            continue
        is_real = sub.name.lower() in real_names
        for wav in wavs:
            clip_id = f"{sub.name}__{wav.stem}"
            entries.append(
                ManifestEntry(
                    clip_id=clip_id,
                    path=str(wav),
                    label="bona_fide" if is_real else "spoof",
                    split=assign_split(clip_id, seed),
                    tags={} if is_real else {"generator": sub.name},
                )
            )
    if not entries:
        raise ConfigError(f"no WAV files found under {root}")
    return Manifest(entries)
