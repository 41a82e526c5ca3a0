"""Command-line surface: corrupt, quality-sweep, evaluate, run, augment, report.

Exit codes: 0 success, 1 runtime failure, 2 usage/config error.  Every
subcommand is a thin wrapper over the library API; the default seed is the
documented constant so two users get identical quickstart output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .adapters import BUILTIN_ADAPTERS, CommandAdapter
from .audio import DEFAULT_SAMPLE_RATE, load_audio, resample, save_audio
from .corruptions import DEFAULT_GRIDS, CorruptionSpec, apply, clip_seed
from .errors import AudiobenchError, ConfigError
from .harness import (
    SweepPlan,
    _noise_paths,
    export_augmented_set,
    load_plan,
    run_sweep,
)
from .manifest import load_manifest
from .metrics import aggregate_categories
from .quality import VisqolAdapter, quality_sweep
from .report import (
    QUALITY_COLUMNS,
    group_accuracy_by_tag,
    load_run_cells,
    write_cells_csv,
    write_plotdata,
    write_quality_csv,
    write_radar_csv,
    write_svg_charts,
)
from .rng import derive_key
from .synth import DEFAULT_SEED, make_quickstart


def _parse_severity(value: str):
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value  # e.g. "default"


def _build_spec(args) -> CorruptionSpec:
    family = args.family
    codec_id = getattr(args, "codec_id", None)
    if family.startswith("codec:"):
        family, codec_id = "codec", family.split(":", 1)[1]
    severity = _parse_severity(args.severity) if args.severity is not None else None
    if family == "replay" and severity is None:
        severity = "default"
    spec = CorruptionSpec(family=family, severity=severity, codec_id=codec_id)
    spec.validate()
    return spec


def cmd_corrupt(args) -> int:
    spec = _build_spec(args)
    adapters = {n: CommandAdapter(n, t) for n, t in BUILTIN_ADAPTERS.items()}
    if args.adapter:
        adapters[spec.codec_id or "replay"] = CommandAdapter(
            spec.codec_id or "replay", args.adapter
        )
    noise_paths = _noise_paths(args.noise_corpus)
    in_path, out_path = Path(args.input), Path(args.output)
    if in_path.is_dir():
        wavs = sorted(in_path.glob("*.wav"))
        if not wavs:
            raise ConfigError(f"no WAV files in {in_path}")
        out_path.mkdir(parents=True, exist_ok=True)
        for wav in wavs:
            buf = resample(load_audio(wav), DEFAULT_SAMPLE_RATE)
            out = apply(
                buf,
                spec,
                clip_seed(args.seed, wav.stem, spec),
                noise_corpus=noise_paths,
                adapters=adapters,
            )
            save_audio(out, out_path / wav.name)
        print(f"corrupted {len(wavs)} clip(s) -> {out_path}")
    else:
        buf = resample(load_audio(in_path), DEFAULT_SAMPLE_RATE)
        out = apply(
            buf,
            spec,
            clip_seed(args.seed, in_path.stem, spec),
            noise_corpus=noise_paths,
            adapters=adapters,
        )
        save_audio(out, out_path)
        print(f"corrupted {in_path} -> {out_path}")
    return 0


def cmd_quality_sweep(args) -> int:
    manifest = load_manifest(args.manifest)
    entries = manifest.select(split=args.split) if args.split else list(manifest)
    clips = []
    for e in entries:
        clips.append((e.clip_id, resample(load_audio(e.path), DEFAULT_SAMPLE_RATE)))
    specs = []
    for key in args.families.split(","):
        key = key.strip()
        grid = DEFAULT_GRIDS.get(key)
        if grid is None:
            raise ConfigError(f"unknown family/grid {key!r}")
        for severity in grid:
            if key.startswith("codec:"):
                specs.append(CorruptionSpec("codec", severity, key.split(":", 1)[1]))
            else:
                specs.append(CorruptionSpec(key, severity))
    visqol = VisqolAdapter.from_config(args.visqol)
    if visqol is not None and not visqol.available():
        print("warning: ViSQOL tool not found; reporting SNR only", file=sys.stderr)
        visqol = None
    sample_n = min(args.sample_n, len(clips))
    stats = quality_sweep(
        clips,
        specs,
        sample_n,
        args.seed,
        visqol=visqol,
        noise_corpus=_noise_paths(args.noise_corpus),
        adapters={n: CommandAdapter(n, t) for n, t in BUILTIN_ADAPTERS.items()},
    )
    import csv as _csv

    out = Path(args.out)
    with out.open("w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(QUALITY_COLUMNS)
        for s in stats:
            acceptable = "unknown" if s.acceptable is None else str(s.acceptable).lower()
            writer.writerow(
                [
                    s.family,
                    s.severity_label,
                    "" if s.mean_visqol is None else f"{s.mean_visqol:.10g}",
                    "" if s.std_visqol is None else f"{s.std_visqol:.10g}",
                    "" if s.mean_snr is None else f"{s.mean_snr:.10g}",
                    acceptable,
                    s.n,
                ]
            )
    print(f"wrote {out}")
    return 0


def cmd_evaluate(args) -> int:
    from .metrics import ScoreRecord, compute_cell_metrics

    manifest = load_manifest(args.manifest)
    records = []
    import csv as _csv

    with open(args.scores, newline="") as fh:
        reader = _csv.DictReader(fh)
        if reader.fieldnames is None or not {"clip_id", "score"} <= set(reader.fieldnames):
            raise ConfigError(f"{args.scores}: header must be clip_id,score")
        for row in reader:
            entry = manifest.by_id.get(row["clip_id"])
            if entry is None:
                raise ConfigError(f"scored clip {row['clip_id']!r} not in manifest")
            records.append(
                ScoreRecord(
                    clip_id=row["clip_id"], label=entry.label, score=float(row["score"])
                )
            )
    result = compute_cell_metrics(records)
    if args.group_by:
        tag = args.group_by.removeprefix("tag:")
        groups: dict[str, list] = {}
        for r in records:
            value = manifest.by_id[r.clip_id].tags.get(tag, "<untagged>")
            groups.setdefault(value, []).append(r)
        threshold = result["threshold"]
        result["groups"] = {
            value: {
                "n": len(rs),
                "accuracy": sum(
                    1 for r in rs if (r.score >= threshold) == (r.label == "spoof")
                )
                / len(rs),
            }
            for value, rs in sorted(groups.items())
        }
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def cmd_run(args) -> int:
    overrides = {}
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if args.no_cache:
        overrides["use_cache"] = False
    plan = load_plan(args.config, overrides)
    result = run_sweep(plan, progress=None if args.quiet else print)
    ok = sum(1 for c in result.cells if c.status == "ok")
    print(
        f"run {result.run_id}: {ok}/{len(result.cells)} cells ok, "
        f"{len(result.failures)} clip failure(s); outputs in {result.out_root}"
    )
    if result.aggregates:
        for category, value in sorted(result.aggregates.items()):
            print(f"  {category:13s} mean accuracy {value:.3f}")
    return 0 if ok == len(result.cells) else 1


def cmd_augment(args) -> int:
    manifest = load_manifest(args.manifest)
    out_manifest = export_augmented_set(
        manifest,
        [r.strip() for r in args.recipes.split(",") if r.strip()],
        mix_prob=args.mix_prob,
        seed=args.seed,
        out_dir=args.out,
        noise_corpus=args.noise_corpus,
        split=args.split,
    )
    n_aug = len(load_manifest(out_manifest)) - len(manifest)
    print(f"augmented {n_aug} clip(s); manifest: {out_manifest}")
    return 0


def cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        raise ConfigError(f"run directory not found: {run_dir}")
    cells = load_run_cells(run_dir)
    if not cells:
        raise ConfigError(f"no cell reports under {run_dir}")
    out_dir = Path(args.out) if args.out else run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        aggregates = aggregate_categories(cells)
    except ValueError:
        aggregates = None
    if args.format == "csv":
        write_cells_csv(out_dir / "cells.csv", cells)
        write_quality_csv(out_dir / "quality.csv", cells)
        write_radar_csv(out_dir / "radar.csv", aggregates)
        print(f"wrote {out_dir / 'cells.csv'}")
    elif args.format == "plotdata":
        write_plotdata(out_dir / "plotdata", cells, args.detector_name)
        print(f"wrote {out_dir / 'plotdata'}")
    elif args.format == "svg":
        write_svg_charts(out_dir / "plots", cells, aggregates)
        print(f"wrote {out_dir / 'plots'}")
    elif args.format == "json":
        print(
            json.dumps(
                {
                    "cells": {c.cell_id: c.accuracy for c in cells},
                    "aggregates": aggregates,
                },
                indent=2,
                sort_keys=True,
            )
        )
    if args.group_by:
        manifest = load_manifest(args.manifest)
        tag = args.group_by.removeprefix("tag:")
        grouped = group_accuracy_by_tag(run_dir, tag, manifest)
        print(json.dumps({"group_by": tag, "cells": grouped}, indent=2, sort_keys=True))
    return 0


def cmd_features(args) -> int:
    from .features import dump_matrix, extract

    buf = resample(load_audio(args.input), DEFAULT_SAMPLE_RATE)
    matrix = extract(buf, args.kind)
    dump_matrix(matrix, args.output)
    print(f"{args.kind}: {matrix.shape[0]} frames x {matrix.shape[1]} -> {args.output}")
    return 0


def cmd_quickstart(args) -> int:
    config_path = make_quickstart(args.out, n_clips=args.clips, seed=args.seed)
    print(f"quickstart materialized; config: {config_path}")
    if args.run:
        plan = load_plan(config_path)
        result = run_sweep(plan, progress=print)
        print(f"report: {result.out_root / 'report.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="audiobench",
        description="Audio-corruption robustness benchmark engine.",
        epilog="Run-config keys are documented in docs/run-config.schema.json.",
    )
    parser.add_argument("--version", action="store_true", help="print version and exit")
    parser.add_argument(
        "--json", action="store_true", help="with --version: machine-readable output"
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("corrupt", help="apply one corruption to a WAV or directory")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--family", required=True, help="family or codec:<id>")
    p.add_argument("--severity", help="per-family units (dB, ratio, semitones, ...)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--noise-corpus", help="WAV dir or manifest for background_noise")
    p.add_argument("--adapter", help="override command template for codec/replay")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("quality-sweep", help="quality-vs-severity curves over a corpus sample")
    p.add_argument("--manifest", required=True)
    p.add_argument("--families", required=True, help="comma list, e.g. gaussian_noise,low_pass")
    p.add_argument("--sample-n", type=int, default=200, dest="sample_n")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--split", default=None)
    p.add_argument("--visqol", help="ViSQOL binary or command template")
    p.add_argument("--noise-corpus")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_quality_sweep)

    p = sub.add_parser("evaluate", help="metrics from a detector score CSV + manifest")
    p.add_argument("--scores", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--group-by", dest="group_by", help="tag:<key> per-group accuracy")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("run", help="execute a sweep config end to end")
    p.add_argument("config")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--no-cache", action="store_true", help="ignore cached cells")
    p.add_argument("--resume", action="store_true", help="reuse cache (default)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("augment", help="materialize a corruption-augmented training set")
    p.add_argument("--manifest", required=True)
    p.add_argument("--recipes", required=True, help="comma list, e.g. pitch_shift,codec:opus")
    p.add_argument("--mix-prob", type=float, default=0.5, dest="mix_prob")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--split", default="train")
    p.add_argument("--noise-corpus")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("report", help="re-render tables/plot data from a finished run")
    p.add_argument("run_dir")
    p.add_argument("--format", choices=("csv", "json", "plotdata", "svg"), default="csv")
    p.add_argument("--out", help="output directory (default: run dir)")
    p.add_argument("--detector-name", default="detector", dest="detector_name")
    p.add_argument("--group-by", dest="group_by", help="tag:<key> per-group accuracy")
    p.add_argument("--manifest", help="required with --group-by")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("features", help="dump a per-clip feature matrix (CSV or .npy)")
    p.add_argument("input", help="WAV file")
    p.add_argument("output", help=".csv (row = frame) or .npy")
    p.add_argument("--kind", choices=("spectrogram", "mel", "lfcc"), default="lfcc")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("quickstart", help="materialize the synthetic demo corpus + config")
    p.add_argument("--out", required=True)
    p.add_argument("--clips", type=int, default=200)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--run", action="store_true", help="run the sweep immediately")
    p.set_defaults(func=cmd_quickstart)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        if args.json:
            from .kernels import BACKEND

            print(
                json.dumps(
                    {"name": "audiobench", "version": __version__, "kernel_backend": BACKEND},
                    sort_keys=True,
                )
            )
        else:
            print(f"audiobench {__version__}")
        return 0
    if not args.command:
        parser.print_help()
        return 2
    if args.command == "report" and args.group_by and not args.manifest:
        parser.error("--group-by requires --manifest")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AudiobenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
