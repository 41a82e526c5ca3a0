"""Detection metrics: ROC, EER, accuracy at the EER threshold, AUROC.

Spoof is the positive class and higher score means more likely spoof; a
record is predicted spoof when score >= threshold.  All metrics are
invariant under strictly increasing transforms of the scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corruptions import CATEGORY_OF_FAMILY

LABELS = ("bona_fide", "spoof")


@dataclass(frozen=True)
class ScoreRecord:
    clip_id: str
    label: str  # "bona_fide" | "spoof"
    score: float

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        if not math.isfinite(self.score):
            raise ValueError(f"score for {self.clip_id!r} is not finite")


def _split_scores(records: list[ScoreRecord]) -> tuple[np.ndarray, np.ndarray]:
    bona = np.array([r.score for r in records if r.label == "bona_fide"], dtype=float)
    spoof = np.array([r.score for r in records if r.label == "spoof"], dtype=float)
    if bona.size == 0 or spoof.size == 0:
        raise ValueError("need at least one record of each class")
    return bona, spoof


def _rates_at(
    bona: np.ndarray, spoof: np.ndarray, thresholds: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """FPR and TPR at each threshold via sorted-array bisection."""
    bona_sorted = np.sort(bona)
    spoof_sorted = np.sort(spoof)
    fpr = (bona.size - np.searchsorted(bona_sorted, thresholds, side="left")) / bona.size
    tpr = (spoof.size - np.searchsorted(spoof_sorted, thresholds, side="left")) / spoof.size
    return fpr, tpr


def roc_curve(records: list[ScoreRecord]) -> list[tuple[float, float, float]]:
    """(FPR, TPR, threshold) points, thresholds over distinct scores descending.

    Ties are grouped (one point per distinct score); starts at (0, 0) with
    threshold +inf and ends at (1, 1) at the smallest score.
    """
    bona, spoof = _split_scores(records)
    thresholds = np.unique(np.concatenate([bona, spoof]))[::-1]
    fpr, tpr = _rates_at(bona, spoof, thresholds)
    points = [(0.0, 0.0, math.inf)]
    points.extend(
        (float(f), float(t), float(th)) for f, t, th in zip(fpr, tpr, thresholds)
    )
    return points


def _eer_candidates(bona: np.ndarray, spoof: np.ndarray) -> np.ndarray:
    """Candidate thresholds: midpoints of adjacent distinct scores plus +-inf."""
    distinct = np.unique(np.concatenate([bona, spoof]))
    mids = (distinct[:-1] + distinct[1:]) / 2.0
    return np.concatenate([[-math.inf], mids, [math.inf]])


def eer(records: list[ScoreRecord]) -> tuple[float, float]:
    """Equal error rate and its threshold.

    The threshold minimizes |FPR - FNR|; ties break toward smaller FPR and
    then smaller threshold.  EER = (FPR + FNR) / 2 at that point.
    """
    bona, spoof = _split_scores(records)
    thresholds = _eer_candidates(bona, spoof)
    fpr, _ = _rates_at(bona, spoof, thresholds)
    fnr = np.searchsorted(np.sort(spoof), thresholds, side="left") / spoof.size
    # lexsort: primary |FPR-FNR|, then FPR, then threshold (all ascending)
    best = np.lexsort((thresholds, fpr, np.abs(fpr - fnr)))[0]
    return float((fpr[best] + fnr[best]) / 2.0), float(thresholds[best])


def accuracy_at(records: list[ScoreRecord], threshold: float) -> float:
    """(TP + TN) / total with spoof predicted when score >= threshold."""
    bona, spoof = _split_scores(records)
    tn = int(np.count_nonzero(bona < threshold))
    tp = int(np.count_nonzero(spoof >= threshold))
    return (tp + tn) / (bona.size + spoof.size)


def accuracy_at_eer(records: list[ScoreRecord]) -> float:
    """Accuracy at the EER threshold."""
    _, threshold = eer(records)
    return accuracy_at(records, threshold)


def auroc(records: list[ScoreRecord]) -> float:
    """Trapezoidal area under the tie-grouped ROC (ties count half)."""
    points = roc_curve(records)
    fpr = np.array([p[0] for p in points])
    tpr = np.array([p[1] for p in points])
    return float(np.trapezoid(tpr, fpr))


@dataclass
class CellReport:
    """Metrics and quality statistics for one corruption x severity cell."""

    family: str
    severity: float | int | str | None
    codec_id: str | None = None
    eer: float | None = None
    threshold: float | None = None
    accuracy: float | None = None
    auroc: float | None = None
    n_bona: int = 0
    n_spoof: int = 0
    n_failures: int = 0
    mean_snr: float | None = None
    mean_visqol: float | None = None
    std_visqol: float | None = None
    n_quality: int = 0
    acceptable: bool | None = None  # None = quality unknown (no tool)
    status: str = "ok"  # ok | failed | skipped
    error: str | None = None

    @property
    def category(self) -> str:
        return CATEGORY_OF_FAMILY[self.family]

    @property
    def cell_id(self) -> str:
        key = f"codec:{self.codec_id}" if self.codec_id else self.family
        return f"{key}/{self.severity}"


def compute_cell_metrics(records: list[ScoreRecord]) -> dict:
    """EER, its threshold, accuracy at that threshold, and AUROC."""
    eer_value, threshold = eer(records)
    return {
        "eer": eer_value,
        "threshold": threshold,
        "accuracy": accuracy_at(records, threshold),
        "auroc": auroc(records),
        "n_bona": sum(1 for r in records if r.label == "bona_fide"),
        "n_spoof": sum(1 for r in records if r.label == "spoof"),
    }


def aggregate_categories(
    cells: list[CellReport], gate: bool | str = "auto"
) -> dict[str, float]:
    """Mean accuracy per corruption category (radar-chart data).

    gate=True restricts to cells with acceptable quality, gate=False uses
    all computed cells, and "auto" gates only when any cell carries a known
    quality verdict.  Raises ValueError when gating empties a category that
    had computed cells.
    """
    usable = [c for c in cells if c.status == "ok" and c.accuracy is not None]
    if gate == "auto":
        gate = any(c.acceptable is not None for c in usable)
    result: dict[str, float] = {}
    for category in ("noise", "modification", "compression"):
        in_cat = [c for c in usable if c.category == category]
        if not in_cat:
            continue
        eligible = [c for c in in_cat if c.acceptable] if gate else in_cat
        if not eligible:
            raise ValueError(
                f"category {category!r} has no cells passing the quality gate"
            )
        result[category] = float(np.mean([c.accuracy for c in eligible]))
    return result
