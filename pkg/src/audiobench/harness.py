"""Sweep orchestration: plans, cell materialization, detector invocation.

A run is fully determined by (config, seed, corpus, adapters): every cell
gets a private directory of corrupted WAVs plus a provenance record, the
detector is invoked per cell through the score-file protocol, and reports
are assembled as a deterministic reduction over completed cells.  Cells
whose provenance already matches are served from cache, which makes
interrupted runs resumable.
"""

from __future__ import annotations

import csv
import json
import math
import os
import shutil
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, report as report_mod
from .adapters import BUILTIN_ADAPTERS, CommandAdapter, ProcessLimiter, expand_template
from .audio import DEFAULT_SAMPLE_RATE, AudioBuffer, load_audio, resample, save_audio
from .corruptions import (
    DEFAULT_GRIDS,
    CorruptionSpec,
    apply,
    clip_seed,
    spec_from_dict,
)
from .errors import AudiobenchError, ConfigError, ProtocolError
from .manifest import Manifest, ManifestEntry, load_manifest, save_manifest
from .metrics import CellReport, ScoreRecord, aggregate_categories, compute_cell_metrics
from .quality import VisqolAdapter, measure_pair, summarize_quality
from .rng import SplitMix64, derive_key, sample_without_replacement
from .synth import DEFAULT_SEED

CELL_FAILURE_FRACTION = 0.05  # a cell fails when >5% of its clips fail
DEFAULT_QUALITY_SAMPLE = 200


@dataclass
class QualityPlan:
    sample_n: int = DEFAULT_QUALITY_SAMPLE
    visqol: str | None = None
    required: bool = False


@dataclass
class SweepPlan:
    run_id: str
    manifest_path: str
    detector_command: str
    cells: list[CorruptionSpec]
    out_root: Path
    detector_name: str = "detector"
    seed: int = DEFAULT_SEED
    split: str | None = "test"
    grids: dict[str, list] = field(default_factory=dict)
    corrupt_bona_fide: bool = True
    jobs: int = 0  # 0 = logical CPU count
    quality: QualityPlan = field(default_factory=QualityPlan)
    noise_corpus: str | None = None
    adapters: dict[str, CommandAdapter] = field(default_factory=dict)
    use_cache: bool = True

    def effective_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


def load_plan(config_path: str | Path, overrides: dict | None = None) -> SweepPlan:
    """Parse and validate a run config; all problems are reported at once."""
    config_path = Path(config_path)
    if not config_path.exists():
        raise ConfigError(f"config not found: {config_path}")
    try:
        cfg = json.loads(config_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{config_path}: invalid JSON: {exc}") from exc
    if overrides:
        cfg.update(overrides)

    errors: list[str] = []
    base = config_path.parent

    def _resolve(p: str) -> str:
        path = Path(p)
        return str(path if path.is_absolute() else base / path)

    manifest_path = cfg.get("manifest")
    if not manifest_path:
        errors.append("missing 'manifest'")
    else:
        manifest_path = _resolve(manifest_path)
        try:
            load_manifest(manifest_path)
        except ConfigError as exc:
            errors.append(str(exc))

    detector = cfg.get("detector") or {}
    command = detector.get("command", "")
    if not command:
        errors.append("missing 'detector.command'")
    else:
        for placeholder in ("{input_dir}", "{output_csv}"):
            if placeholder not in command:
                errors.append(f"detector.command lacks {placeholder}")

    adapters = {
        name: CommandAdapter(name=name, command=tpl) for name, tpl in BUILTIN_ADAPTERS.items()
    }
    for name, tpl in (cfg.get("adapters") or {}).items():
        adapters[name] = CommandAdapter(name=name, command=str(tpl))

    grids = dict(cfg.get("grids") or {})
    cells: list[CorruptionSpec] = []
    for i, cell_cfg in enumerate(cfg.get("cells") or []):
        try:
            spec = spec_from_dict(cell_cfg)
        except ConfigError as exc:
            errors.append(f"cells[{i}]: {exc}")
            continue
        grid = grids.get(spec.grid_key, DEFAULT_GRIDS.get(spec.grid_key))
        if grid is None:
            errors.append(f"cells[{i}]: no severity grid for {spec.grid_key!r}")
        elif spec.severity not in grid and spec.severity_label != "default":
            errors.append(
                f"cells[{i}]: severity {spec.severity!r} not on the {spec.grid_key} grid {grid}"
            )
        if spec.family == "codec" and spec.codec_id not in adapters:
            errors.append(f"cells[{i}]: no adapter configured for codec {spec.codec_id!r}")
        if spec.family == "replay" and "replay" not in adapters:
            errors.append(f"cells[{i}]: no adapter configured for replay")
        cells.append(spec)
    if not cfg.get("cells"):
        errors.append("no cells configured")
    if len({c.cell_id for c in cells}) != len(cells):
        errors.append("duplicate cells configured")

    noise_corpus = cfg.get("noise_corpus")
    if noise_corpus:
        noise_corpus = _resolve(noise_corpus)
        if not _noise_paths(noise_corpus):
            errors.append(f"noise_corpus has no WAVs: {noise_corpus}")
    elif any(c.family == "background_noise" for c in cells):
        errors.append("background_noise cells require 'noise_corpus'")

    qcfg = cfg.get("quality") or {}
    quality = QualityPlan(
        sample_n=int(qcfg.get("sample_n", DEFAULT_QUALITY_SAMPLE)),
        visqol=qcfg.get("visqol"),
        required=bool(qcfg.get("required", False)),
    )
    if quality.required:
        tool = VisqolAdapter.from_config(quality.visqol)
        if tool is None or not tool.available():
            errors.append("quality.required=true but the ViSQOL tool is not available")

    out = cfg.get("out")
    if not out:
        errors.append("missing 'out'")

    seed = cfg.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int) or seed < 0:
        errors.append(f"seed must be a non-negative integer, got {seed!r}")

    split = cfg.get("split", "test")
    if split not in (None, "train", "val", "test"):
        errors.append(f"unknown split {split!r}")

    if errors:
        raise ConfigError(
            f"{config_path}: {len(errors)} config problem(s):\n  - " + "\n  - ".join(errors)
        )

    return SweepPlan(
        run_id=str(cfg.get("run_id", config_path.stem)),
        manifest_path=manifest_path,
        detector_command=command,
        detector_name=str(detector.get("name", "detector")),
        cells=cells,
        out_root=Path(_resolve(out)),
        seed=seed,
        split=split,
        grids=grids,
        corrupt_bona_fide=bool(cfg.get("corrupt_bona_fide", True)),
        jobs=int(cfg.get("jobs") or 0),
        quality=quality,
        noise_corpus=noise_corpus,
        adapters=adapters,
        use_cache=bool(cfg.get("use_cache", True)),
    )


def _noise_paths(noise_corpus: str | None) -> list[str]:
    if not noise_corpus:
        return []
    p = Path(noise_corpus)
    if p.is_dir():
        return [str(w) for w in sorted(p.glob("*.wav"))]
    if p.suffix.lower() in (".csv", ".jsonl", ".ndjson"):
        return [e.path for e in load_manifest(p)]
    return [str(p)] if p.exists() else []


def cell_dirname(spec: CorruptionSpec) -> tuple[str, str]:
    return spec.grid_key.replace(":", "-"), spec.severity_label


@dataclass
class ClipFailure:
    cell_id: str
    clip_id: str
    stage: str
    error: str

    def as_dict(self) -> dict:
        return {
            "cell": self.cell_id,
            "clip_id": self.clip_id,
            "stage": self.stage,
            "error": self.error,
        }


@dataclass
class RunResult:
    run_id: str
    out_root: Path
    cells: list[CellReport]
    failures: list[ClipFailure]
    aggregates: dict[str, float] | None


def _provenance(plan: SweepPlan, spec: CorruptionSpec, clip_ids: list[str]) -> dict:
    return {
        "engine": __version__,
        "family": spec.family,
        "severity": spec.severity,
        "codec_id": spec.codec_id,
        "seed": plan.seed,
        "corrupt_bona_fide": plan.corrupt_bona_fide,
        "clip_ids": clip_ids,
    }


def _load_clean(entry: ManifestEntry) -> AudioBuffer:
    return resample(load_audio(entry.path), DEFAULT_SAMPLE_RATE)


def materialize_cell(
    plan: SweepPlan,
    spec: CorruptionSpec,
    entries: list[ManifestEntry],
    limiter: ProcessLimiter | None = None,
) -> tuple[Path, list[str], list[ClipFailure], bool]:
    """Corrupt every selected clip into the cell directory.

    Returns (cell_dir, ok_clip_ids, failures, from_cache).  The directory is
    built under a temporary name and atomically renamed, so partial cells
    never pollute the cache; a matching provenance file is a cache hit.
    """
    fam_dir, sev_dir = cell_dirname(spec)
    cell_dir = plan.out_root / "cells" / fam_dir / sev_dir
    clip_ids = sorted(e.clip_id for e in entries)
    provenance = _provenance(plan, spec, clip_ids)
    prov_path = cell_dir / "provenance.json"

    if plan.use_cache and prov_path.exists():
        try:
            stored = json.loads(prov_path.read_text())
        except json.JSONDecodeError:
            stored = None
        if stored is not None and stored.get("provenance") == provenance:
            ok_ids = stored["ok_clip_ids"]
            if all((cell_dir / f"{cid}.wav").exists() for cid in ok_ids):
                failures = [ClipFailure(**f) for f in stored["failures"]]
                return cell_dir, ok_ids, failures, True

    tmp_dir = cell_dir.parent / (cell_dir.name + ".tmp")
    if tmp_dir.exists():
        shutil.rmtree(tmp_dir)
    tmp_dir.mkdir(parents=True)

    noise_paths = _noise_paths(plan.noise_corpus)
    by_id = {e.clip_id: e for e in entries}

    def _one(clip_id: str) -> ClipFailure | None:
        entry = by_id[clip_id]
        try:
            clean = _load_clean(entry)
            if entry.label == "bona_fide" and not plan.corrupt_bona_fide:
                corrupted = clean
            else:
                corrupted = apply(
                    clean,
                    spec,
                    clip_seed(plan.seed, clip_id, spec),
                    noise_corpus=noise_paths,
                    adapters=plan.adapters,
                    limiter=limiter,
                )
            save_audio(corrupted, tmp_dir / f"{clip_id}.wav")
            return None
        except Exception as exc:  # per-clip isolation
            return ClipFailure(spec.cell_id, clip_id, "materialize", f"{type(exc).__name__}: {exc}")

    with ThreadPoolExecutor(max_workers=plan.effective_jobs()) as pool:
        results = list(pool.map(_one, clip_ids))
    failures = [f for f in results if f is not None]
    failed_ids = {f.clip_id for f in failures}
    ok_ids = [cid for cid in clip_ids if cid not in failed_ids]

    (tmp_dir / "provenance.json").write_text(
        json.dumps(
            {
                "provenance": provenance,
                "ok_clip_ids": ok_ids,
                "failures": [f.as_dict() for f in failures],
            },
            indent=2,
            sort_keys=True,
        )
    )
    if cell_dir.exists():
        shutil.rmtree(cell_dir)
    os.replace(tmp_dir, cell_dir)
    return cell_dir, ok_ids, failures, False


def invoke_detector(plan: SweepPlan, cell_dir: Path, ok_ids: list[str]) -> list[tuple[str, float]]:
    """Run the detector command over a cell directory and validate coverage."""
    scores_path = cell_dir / "scores.csv"
    meta_path = cell_dir / "scores_meta.json"
    meta = {"command": plan.detector_command, "clip_ids": ok_ids}
    if plan.use_cache and scores_path.exists() and meta_path.exists():
        try:
            if json.loads(meta_path.read_text()) == meta:
                return _parse_scores(scores_path, ok_ids)
        except (json.JSONDecodeError, ProtocolError):
            pass
    cmd = expand_template(
        plan.detector_command,
        {"input_dir": str(cell_dir), "output_csv": str(scores_path)},
    )
    proc = subprocess.run(cmd, shell=True, capture_output=True, text=True)
    if proc.returncode != 0:
        raise ProtocolError(
            f"detector exited {proc.returncode}: {cmd}\n{proc.stderr.strip()[:1000]}"
        )
    if not scores_path.exists():
        raise ProtocolError(f"detector wrote no score file: {scores_path}")
    scores = _parse_scores(scores_path, ok_ids)
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True))
    return scores


def _parse_scores(scores_path: Path, expected_ids: list[str]) -> list[tuple[str, float]]:
    rows: dict[str, float] = {}
    with scores_path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"clip_id", "score"} <= set(reader.fieldnames):
            raise ProtocolError(f"{scores_path}: header must be clip_id,score")
        for record in reader:
            cid = record["clip_id"]
            if cid in rows:
                raise ProtocolError(f"{scores_path}: duplicate score for clip {cid!r}")
            try:
                value = float(record["score"])
            except (TypeError, ValueError):
                raise ProtocolError(f"{scores_path}: non-numeric score for clip {cid!r}")
            if not math.isfinite(value):
                raise ProtocolError(f"{scores_path}: non-finite score for clip {cid!r}")
            rows[cid] = value
    missing = [cid for cid in expected_ids if cid not in rows]
    if missing:
        raise ProtocolError(
            f"{scores_path}: missing score(s) for {len(missing)} clip(s), first: {missing[0]!r}"
        )
    return [(cid, rows[cid]) for cid in expected_ids]


def _cell_quality(
    plan: SweepPlan,
    spec: CorruptionSpec,
    cell_dir: Path,
    ok_ids: list[str],
    entries_by_id: dict[str, ManifestEntry],
    visqol: VisqolAdapter | None,
    failures: list[ClipFailure],
):
    n = min(plan.quality.sample_n, len(ok_ids))
    if n == 0:
        return summarize_quality(spec.grid_key, spec.severity_label, [])
    chosen = sample_without_replacement(
        len(ok_ids), n, derive_key(plan.seed, "quality", spec.cell_id)
    )
    records = []
    for idx in sorted(chosen):
        clip_id = ok_ids[idx]
        try:
            ref = _load_clean(entries_by_id[clip_id])
            deg = load_audio(cell_dir / f"{clip_id}.wav")
            records.append(measure_pair(clip_id, ref, deg, visqol))
        except AudiobenchError as exc:
            failures.append(
                ClipFailure(spec.cell_id, clip_id, "quality", f"{type(exc).__name__}: {exc}")
            )
    return summarize_quality(spec.grid_key, spec.severity_label, records)


def run_cell(
    plan: SweepPlan,
    spec: CorruptionSpec,
    entries: list[ManifestEntry],
    visqol: VisqolAdapter | None,
    limiter: ProcessLimiter | None,
) -> tuple[CellReport, list[ClipFailure]]:
    entries_by_id = {e.clip_id: e for e in entries}
    report = CellReport(family=spec.family, severity=spec.severity, codec_id=spec.codec_id)
    cell_dir, ok_ids, failures, _ = materialize_cell(plan, spec, entries, limiter)
    report.n_failures = len(failures)
    if len(failures) > CELL_FAILURE_FRACTION * len(entries):
        report.status = "failed"
        report.error = f"{len(failures)}/{len(entries)} clips failed to materialize"
        return report, failures

    stats = _cell_quality(plan, spec, cell_dir, ok_ids, entries_by_id, visqol, failures)
    report.mean_snr = stats.mean_snr
    report.mean_visqol = stats.mean_visqol
    report.std_visqol = stats.std_visqol
    report.n_quality = stats.n
    report.acceptable = stats.acceptable
    report_mod.write_quality_records(cell_dir / "quality.csv", stats.records)

    try:
        scored = invoke_detector(plan, cell_dir, ok_ids)
    except ProtocolError as exc:
        report.status = "failed"
        report.error = str(exc)
        return report, failures
    records = [
        ScoreRecord(clip_id=cid, label=entries_by_id[cid].label, score=value)
        for cid, value in scored
    ]
    try:
        report_mod.write_cell_scores(cell_dir / "scored.csv", records)
        for key, value in compute_cell_metrics(records).items():
            setattr(report, key, value)
    except ValueError as exc:
        report.status = "failed"
        report.error = str(exc)
        return report, failures
    (cell_dir / "cell_report.json").write_text(report_mod.cell_report_json(report))
    return report, failures


def run_sweep(plan: SweepPlan, progress=None) -> RunResult:
    """Execute every cell of the plan and write the run outputs."""
    manifest = load_manifest(plan.manifest_path)
    entries = manifest.select(split=plan.split)
    if not entries:
        raise ConfigError(f"no manifest entries in split {plan.split!r}")
    labels = {e.label for e in entries}
    if len(labels) < 2:
        raise ConfigError(f"evaluation needs both classes; split has only {labels}")

    limiter = ProcessLimiter(plan.effective_jobs())
    visqol = VisqolAdapter.from_config(plan.quality.visqol, limiter)
    if visqol is not None and not visqol.available():
        if plan.quality.required:
            raise ConfigError("ViSQOL tool configured as required but not available")
        visqol = None  # quality-unknown cells, run still completes

    plan.out_root.mkdir(parents=True, exist_ok=True)
    cells: list[CellReport] = []
    all_failures: list[ClipFailure] = []
    for spec in plan.cells:
        if progress:
            progress(f"[cell {spec.cell_id}] ...")
        report, failures = run_cell(plan, spec, entries, visqol, limiter)
        cells.append(report)
        all_failures.extend(failures)
        if progress:
            status = report.status
            if report.eer is not None:
                status += f" eer={report.eer:.3f} auroc={report.auroc:.3f}"
            progress(f"[cell {spec.cell_id}] {status}")

    try:
        aggregates = aggregate_categories(cells)
    except ValueError:
        aggregates = None

    all_failures.sort(key=lambda f: (f.cell_id, f.clip_id))
    result = RunResult(
        run_id=plan.run_id,
        out_root=plan.out_root,
        cells=cells,
        failures=all_failures,
        aggregates=aggregates,
    )
    report_mod.write_run_outputs(result, plan)
    return result


def export_augmented_set(
    manifest: Manifest,
    recipes: list[str | CorruptionSpec],
    mix_prob: float,
    seed: int,
    out_dir: str | Path,
    *,
    grids: dict[str, list] | None = None,
    noise_corpus: str | None = None,
    adapters: dict[str, CommandAdapter] | None = None,
    split: str = "train",
) -> Path:
    """Materialize a corruption-augmented training set.

    Each split clip independently receives (with probability mix_prob) one
    uniformly chosen recipe at a uniformly chosen grid severity; originals
    are always retained.  Returns the new manifest path.
    """
    if not recipes:
        raise ConfigError("recipes must be non-empty")
    if not 0 <= mix_prob <= 1:  # 0 is the degenerate originals-only edge
        raise ConfigError(f"mix_prob must be in [0, 1], got {mix_prob}")
    grid_keys = [r.grid_key if isinstance(r, CorruptionSpec) else str(r) for r in recipes]
    merged_grids = {**DEFAULT_GRIDS, **(grids or {})}
    for key in grid_keys:
        if key not in merged_grids or not merged_grids[key]:
            raise ConfigError(f"no severity grid for recipe {key!r}")

    out_dir = Path(out_dir)
    wav_dir = out_dir / "wavs"
    wav_dir.mkdir(parents=True, exist_ok=True)
    noise_paths = _noise_paths(noise_corpus)
    adapters = adapters or {
        name: CommandAdapter(name=name, command=tpl) for name, tpl in BUILTIN_ADAPTERS.items()
    }

    entries: list[ManifestEntry] = list(manifest)
    augmented: list[ManifestEntry] = []
    for entry in manifest.select(split=split):
        sm = SplitMix64(derive_key(seed, "augment", entry.clip_id))
        if sm.uniform() >= mix_prob:
            continue
        key = grid_keys[sm.randbelow(len(grid_keys))]
        grid = merged_grids[key]
        severity = grid[sm.randbelow(len(grid))]
        if key.startswith("codec:"):
            spec = CorruptionSpec("codec", severity, key.split(":", 1)[1])
        else:
            spec = CorruptionSpec(key, severity)
        spec.validate()
        clean = _load_clean(entry)
        corrupted = apply(
            clean,
            spec,
            clip_seed(seed, entry.clip_id, spec),
            noise_corpus=noise_paths,
            adapters=adapters,
        )
        new_id = f"{entry.clip_id}__aug"
        path = wav_dir / f"{new_id}.wav"
        save_audio(corrupted, path)
        augmented.append(
            ManifestEntry(
                clip_id=new_id,
                path=str(path),
                label=entry.label,
                split=entry.split,
                tags={
                    **entry.tags,
                    "augmented_from": entry.clip_id,
                    "aug_family": spec.grid_key,
                    "aug_severity": spec.severity_label,
                },
            )
        )
    out_manifest = out_dir / "manifest.csv"
    save_manifest(Manifest(entries + augmented), out_manifest)
    return out_manifest
