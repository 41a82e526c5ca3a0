"""deepfake-adapter CLI: the detector protocol plus a polarity self-test.

    deepfake-adapter baseline INPUT_DIR OUTPUT_CSV
    deepfake-adapter model --checkpoint ck.npz INPUT_DIR OUTPUT_CSV
    deepfake-adapter selftest [--checkpoint ck.npz]

Exit 0 on success; nonzero with a message on protocol violations.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

from .fixtures import write_sanity_set
from .scoring import BUNDLED_CHECKPOINT, AdapterConfig, AdapterError, score_directory


def _score(args, checkpoint: str | None) -> int:
    cfg = AdapterConfig(
        checkpoint=checkpoint,
        device=args.device,
        batch_size=args.batch_size,
        confirm_polarity=not args.skip_polarity_check,
    )
    n = score_directory(args.input_dir, args.output_csv, cfg)
    print(f"scored {n} clip(s) -> {args.output_csv}")
    return 0


def cmd_baseline(args) -> int:
    return _score(args, checkpoint=None)


def cmd_model(args) -> int:
    return _score(args, checkpoint=args.checkpoint)


def cmd_selftest(args) -> int:
    """Score the bundled fixtures; require mean spoof score > mean bona fide."""
    import csv

    checkpoint = args.checkpoint or str(BUNDLED_CHECKPOINT)
    with tempfile.TemporaryDirectory(prefix="adapter-selftest-") as tmp:
        labels = write_sanity_set(Path(tmp) / "wavs")
        out_csv = Path(tmp) / "scores.csv"
        for cfg in (
            AdapterConfig(checkpoint=None),
            AdapterConfig(checkpoint=checkpoint),
        ):
            score_directory(Path(tmp) / "wavs", out_csv, cfg)
            with out_csv.open(newline="") as fh:
                rows = list(csv.DictReader(fh))
            spoof = [float(r["score"]) for r in rows if labels[r["clip_id"]] == "spoof"]
            bona = [float(r["score"]) for r in rows if labels[r["clip_id"]] == "bona_fide"]
            mean_spoof = sum(spoof) / len(spoof)
            mean_bona = sum(bona) / len(bona)
            name = "baseline" if cfg.checkpoint is None else f"model {Path(checkpoint).name}"
            if mean_spoof <= mean_bona:
                print(
                    f"FAIL {name}: mean spoof {mean_spoof:.4f} <= mean bona fide "
                    f"{mean_bona:.4f} (polarity broken)",
                    file=sys.stderr,
                )
                return 1
            print(f"ok {name}: mean spoof {mean_spoof:.4f} > mean bona fide {mean_bona:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deepfake-adapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def _common(p):
        p.add_argument("input_dir")
        p.add_argument("output_csv")
        p.add_argument("--device", default="cpu")
        p.add_argument("--batch-size", type=int, default=32, dest="batch_size")
        p.add_argument("--skip-polarity-check", action="store_true")

    p = sub.add_parser("baseline", help="zero-ML signal-statistics scorer")
    _common(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("model", help="checkpoint-backed scorer")
    p.add_argument("--checkpoint", required=True)
    _common(p)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("selftest", help="polarity check on bundled fixtures")
    p.add_argument("--checkpoint", help=f"default: bundled {BUNDLED_CHECKPOINT.name}")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
