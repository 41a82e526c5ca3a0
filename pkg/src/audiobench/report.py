"""Run output writers: report.json, cells.csv, quality.csv, plot data, SVG.

Everything here is a deterministic function of the in-memory results: no
timestamps, no absolute paths, stable key order and float formatting, so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .metrics import CellReport, ScoreRecord, accuracy_at, aggregate_categories, eer
from .quality import QualityRecord

CELL_COLUMNS = [
    "family",
    "severity",
    "codec_id",
    "category",
    "eer",
    "threshold",
    "accuracy",
    "auroc",
    "n_bona",
    "n_spoof",
    "n_failures",
    "mean_snr",
    "mean_visqol",
    "std_visqol",
    "acceptable",
    "status",
]

QUALITY_COLUMNS = ["family", "severity", "mean_visqol", "std_visqol", "mean_snr", "acceptable", "n"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.10g}"
    return str(value)


def _fmt_acceptable(value: bool | None) -> str:
    return "unknown" if value is None else ("true" if value else "false")


def cell_sort_key(report: CellReport):
    """Canonical cell order: family/codec key, then numeric severity, then label."""
    key = report.family if report.codec_id is None else f"codec:{report.codec_id}"
    severity = report.severity
    if isinstance(severity, (int, float)):
        return (key, 0, float(severity), "")
    return (key, 1, 0.0, str(severity))


def sorted_cells(cells: list[CellReport]) -> list[CellReport]:
    return sorted(cells, key=cell_sort_key)


def cell_row(report: CellReport) -> list[str]:
    return [
        report.family,
        _fmt(report.severity),
        _fmt(report.codec_id),
        report.category,
        _fmt(report.eer),
        _fmt(report.threshold),
        _fmt(report.accuracy),
        _fmt(report.auroc),
        str(report.n_bona),
        str(report.n_spoof),
        str(report.n_failures),
        _fmt(report.mean_snr),
        _fmt(report.mean_visqol),
        _fmt(report.std_visqol),
        _fmt_acceptable(report.acceptable),
        report.status,
    ]


def cell_report_dict(report: CellReport) -> dict:
    return {
        "family": report.family,
        "severity": report.severity,
        "codec_id": report.codec_id,
        "category": report.category,
        "eer": report.eer,
        "threshold": report.threshold,
        "accuracy": report.accuracy,
        "auroc": report.auroc,
        "n_bona": report.n_bona,
        "n_spoof": report.n_spoof,
        "n_failures": report.n_failures,
        "mean_snr": report.mean_snr,
        "mean_visqol": report.mean_visqol,
        "std_visqol": report.std_visqol,
        "n_quality": report.n_quality,
        "acceptable": report.acceptable,
        "status": report.status,
        "error": report.error,
    }


def cell_report_json(report: CellReport) -> str:
    return json.dumps(cell_report_dict(report), indent=2, sort_keys=True) + "\n"


def cell_report_from_dict(d: dict) -> CellReport:
    known = {k: v for k, v in d.items() if k != "category"}
    return CellReport(**known)


def write_cells_csv(path: Path, cells: list[CellReport]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CELL_COLUMNS)
        for report in sorted_cells(cells):
            writer.writerow(cell_row(report))


def write_quality_csv(path: Path, cells: list[CellReport]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(QUALITY_COLUMNS)
        for r in sorted_cells(cells):
            writer.writerow(
                [
                    r.family if r.codec_id is None else f"codec:{r.codec_id}",
                    _fmt(r.severity),
                    _fmt(r.mean_visqol),
                    _fmt(r.std_visqol),
                    _fmt(r.mean_snr),
                    _fmt_acceptable(r.acceptable),
                    str(r.n_quality),
                ]
            )


def write_quality_records(path: Path, records: list[QualityRecord]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clip_id", "snr_db", "visqol", "acceptable"])
        for r in records:
            writer.writerow(
                [r.clip_id, _fmt(r.snr_db), _fmt(r.visqol), _fmt_acceptable(r.acceptable)]
            )


def write_cell_scores(path: Path, records: list[ScoreRecord]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clip_id", "label", "score"])
        for r in records:
            writer.writerow([r.clip_id, r.label, _fmt(r.score)])


def read_cell_scores(path: Path) -> list[ScoreRecord]:
    records = []
    with path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(
                ScoreRecord(clip_id=row["clip_id"], label=row["label"], score=float(row["score"]))
            )
    return records


def run_report_dict(result, plan) -> dict:
    by_family: dict = {}
    for report in sorted_cells(result.cells):
        key = report.family if report.codec_id is None else f"codec:{report.codec_id}"
        by_family.setdefault(key, {})[str(report.severity)] = cell_report_dict(report)
    return {
        "run_id": result.run_id,
        "engine": _engine_version(),
        "seed": plan.seed,
        "split": plan.split,
        "detector": {"name": plan.detector_name, "command": plan.detector_command},
        "corrupt_bona_fide": plan.corrupt_bona_fide,
        "n_cells": len(result.cells),
        "n_failures": len(result.failures),
        "aggregates": result.aggregates,
        "cells": by_family,
    }


def _engine_version() -> str:
    from . import __version__

    return __version__


def write_plotdata(out_dir: Path, cells: list[CellReport], detector_name: str) -> None:
    """Per-family CSVs shaped for severity-sweep line plots."""
    out_dir.mkdir(parents=True, exist_ok=True)
    families = sorted({c.family if c.codec_id is None else f"codec:{c.codec_id}" for c in cells})
    for family in families:
        rows = [
            c
            for c in sorted_cells(cells)
            if (c.family if c.codec_id is None else f"codec:{c.codec_id}") == family
        ]
        with (out_dir / f"{family.replace(':', '-')}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["detector", "severity", "eer", "accuracy", "auroc", "mean_visqol", "acceptable"]
            )
            for c in rows:
                writer.writerow(
                    [
                        detector_name,
                        _fmt(c.severity),
                        _fmt(c.eer),
                        _fmt(c.accuracy),
                        _fmt(c.auroc),
                        _fmt(c.mean_visqol),
                        _fmt_acceptable(c.acceptable),
                    ]
                )


def write_radar_csv(path: Path, aggregates: dict[str, float] | None) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["category", "mean_accuracy"])
        for category in ("noise", "modification", "compression"):
            if aggregates and category in aggregates:
                writer.writerow([category, _fmt(aggregates[category])])


def write_failures(path: Path, failures) -> None:
    with path.open("w") as fh:
        for f in failures:
            fh.write(json.dumps(f.as_dict(), sort_keys=True) + "\n")


def write_run_outputs(result, plan) -> None:
    out = result.out_root
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        json.dumps(run_report_dict(result, plan), indent=2, sort_keys=True) + "\n"
    )
    write_cells_csv(out / "cells.csv", result.cells)
    write_quality_csv(out / "quality.csv", result.cells)
    write_plotdata(out / "plotdata", result.cells, plan.detector_name)
    write_radar_csv(out / "radar.csv", result.aggregates)
    write_failures(out / "failures.jsonl", result.failures)
    write_svg_charts(out / "plots", result.cells, result.aggregates)


# --------------------------------------------------------------------------
# minimal dependency-free SVG charts

_SVG_W, _SVG_H, _SVG_PAD = 480, 300, 48


def _polyline(xs, ys, color) -> str:
    pts = " ".join(f"{x:.1f},{y:.1f}" for x, y in zip(xs, ys))
    return f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>'


def _line_chart_svg(title: str, x_labels: list[str], series: dict[str, list[float]]) -> str:
    colors = {"eer": "#c0392b", "accuracy": "#27ae60", "auroc": "#2980b9"}
    inner_w = _SVG_W - 2 * _SVG_PAD
    inner_h = _SVG_H - 2 * _SVG_PAD
    n = max(len(x_labels), 2)
    xs = [_SVG_PAD + inner_w * i / (n - 1) for i in range(len(x_labels))]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}">',
        f'<text x="{_SVG_W / 2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{_SVG_PAD}" y="{_SVG_PAD}" width="{inner_w}" height="{inner_h}" '
        'fill="none" stroke="#888"/>',
    ]
    for i, label in enumerate(x_labels):
        parts.append(
            f'<text x="{xs[i]:.1f}" y="{_SVG_H - _SVG_PAD + 16}" text-anchor="middle" '
            f'font-size="10">{label}</text>'
        )
    for name, values in series.items():
        pts_y = [_SVG_PAD + inner_h * (1.0 - min(max(v, 0.0), 1.0)) for v in values]
        parts.append(_polyline(xs[: len(values)], pts_y, colors.get(name, "#555")))
    legend_y = _SVG_PAD - 8
    legend_x = _SVG_PAD
    for name in series:
        parts.append(
            f'<text x="{legend_x}" y="{legend_y}" font-size="10" '
            f'fill="{colors.get(name, "#555")}">{name}</text>'
        )
        legend_x += 70
    parts.append("</svg>")
    return "\n".join(parts)


def _radar_svg(aggregates: dict[str, float]) -> str:
    import math as _m

    cx, cy, radius = _SVG_W / 2, _SVG_H / 2 + 10, 100
    cats = ["noise", "modification", "compression"]
    pts = []
    labels = []
    for i, cat in enumerate(cats):
        angle = -_m.pi / 2 + 2 * _m.pi * i / len(cats)
        value = aggregates.get(cat, 0.0)
        pts.append((cx + radius * value * _m.cos(angle), cy + radius * value * _m.sin(angle)))
        lx, ly = cx + (radius + 18) * _m.cos(angle), cy + (radius + 18) * _m.sin(angle)
        labels.append(
            f'<text x="{lx:.0f}" y="{ly:.0f}" text-anchor="middle" font-size="11">'
            f"{cat} {value:.2f}</text>"
        )
    outline = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
    rings = "".join(
        f'<circle cx="{cx}" cy="{cy}" r="{radius * f:.0f}" fill="none" stroke="#ddd"/>'
        for f in (0.25, 0.5, 0.75, 1.0)
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}">'
        f'<text x="{_SVG_W / 2:.0f}" y="20" text-anchor="middle" font-size="14">'
        f"mean accuracy by corruption category</text>{rings}"
        f'<polygon points="{outline}" fill="#2980b9" fill-opacity="0.35" stroke="#2980b9"/>'
        f'{"".join(labels)}</svg>'
    )


def write_svg_charts(out_dir: Path, cells: list[CellReport], aggregates) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    families = sorted({c.family if c.codec_id is None else f"codec:{c.codec_id}" for c in cells})
    for family in families:
        rows = [
            c
            for c in sorted_cells(cells)
            if (c.family if c.codec_id is None else f"codec:{c.codec_id}") == family
            and c.eer is not None
        ]
        if not rows:
            continue
        svg = _line_chart_svg(
            family,
            [_fmt(c.severity) for c in rows],
            {
                "eer": [c.eer for c in rows],
                "accuracy": [c.accuracy for c in rows],
                "auroc": [c.auroc for c in rows],
            },
        )
        (out_dir / f"{family.replace(':', '-')}.svg").write_text(svg)
    if aggregates:
        (out_dir / "radar.svg").write_text(_radar_svg(aggregates))


# --------------------------------------------------------------------------
# re-rendering and grouped views (report subcommand)

def load_run_cells(run_dir: Path) -> list[CellReport]:
    """Rebuild CellReports from the per-cell artifacts of a finished run."""
    reports = []
    for prov in sorted(run_dir.glob("cells/*/*/cell_report.json")):
        reports.append(cell_report_from_dict(json.loads(prov.read_text())))
    return reports


def group_accuracy_by_tag(run_dir: Path, tag: str, manifest) -> dict[str, dict[str, float]]:
    """Per-cell accuracy at the cell's EER threshold, grouped by a manifest tag."""
    grouped: dict[str, dict[str, float]] = {}
    for scored_path in sorted(run_dir.glob("cells/*/*/scored.csv")):
        records = read_cell_scores(scored_path)
        if not records:
            continue
        cell_id = f"{scored_path.parent.parent.name}/{scored_path.parent.name}"
        _, threshold = eer(records)
        by_group: dict[str, list[ScoreRecord]] = {}
        for r in records:
            entry = manifest.by_id.get(r.clip_id)
            value = entry.tags.get(tag, "<untagged>") if entry else "<unknown>"
            by_group.setdefault(value, []).append(r)
        cell_out = {}
        for value, group in sorted(by_group.items()):
            correct = sum(
                1
                for r in group
                if (r.score >= threshold) == (r.label == "spoof")
            )
            cell_out[value] = correct / len(group)
        grouped[cell_id] = cell_out
    return grouped
