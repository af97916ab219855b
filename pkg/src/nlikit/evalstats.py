"""Confusion matrices, per-class metrics, and era-level reports.

Gold labels always come from the closed 8-label set; predictions may
additionally be invalid, which lands them in a reserved ninth column.
Invalid predictions count against accuracy and recall but belong to no
class, so they never touch a precision denominator.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .corpus import ERAS, Era
from .errors import NlikitError
from .fisher import FisherResult, compare_eras
from .labels import L1_LABELS, ParsedLabel, is_l1_label, parse_label

N_LABELS = len(L1_LABELS)
INVALID_COLUMN = N_LABELS
_LABEL_INDEX = {label: i for i, label in enumerate(L1_LABELS)}
PREDICTED_COLUMNS: tuple[str, ...] = L1_LABELS + ("invalid",)


class EmptyInput(NlikitError):
    """No prediction records to evaluate."""


@dataclass(frozen=True)
class PredictionRecord:
    paper_id: str
    era: Era
    gold: str
    predicted: ParsedLabel

    def __post_init__(self) -> None:
        if not is_l1_label(self.gold):
            raise ValueError(f"{self.paper_id}: gold label {self.gold!r} outside the closed set")


@dataclass
class ConfusionMatrix:
    """Gold rows over the 8 labels; predicted columns are 8 labels + invalid."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (N_LABELS, N_LABELS + 1):
            raise ValueError(f"confusion grid must be {N_LABELS}x{N_LABELS + 1}")
        if (self.counts < 0).any():
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts[:, :N_LABELS]))


def confusion_matrix(preds: Sequence[PredictionRecord]) -> ConfusionMatrix:
    """Count gold/predicted pairs; the caller partitions eras beforehand."""
    if not preds:
        raise EmptyInput("no prediction records")
    counts = np.zeros((N_LABELS, N_LABELS + 1), dtype=np.int64)
    for record in preds:
        row = _LABEL_INDEX[record.gold]
        value = record.predicted.value
        col = _LABEL_INDEX[value] if value is not None else INVALID_COLUMN
        counts[row, col] += 1
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: dict[str, ClassMetrics]
    macro_f1: float


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean, defined as 0 when both inputs are 0."""
    if precision == 0.0 and recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy, per-class precision/recall/F1, and unweighted macro-F1."""
    if cm.total == 0:
        raise EmptyInput("confusion matrix is empty")
    diag = np.diag(cm.counts[:, :N_LABELS]).astype(float)
    row_sums = cm.counts.sum(axis=1).astype(float)
    col_sums = cm.counts[:, :N_LABELS].sum(axis=0).astype(float)

    per_class: dict[str, ClassMetrics] = {}
    f1_values = []
    for i, label in enumerate(L1_LABELS):
        precision = float(diag[i] / col_sums[i]) if col_sums[i] > 0 else 0.0
        recall = float(diag[i] / row_sums[i]) if row_sums[i] > 0 else 0.0
        f1 = f1_score(precision, recall)
        per_class[label] = ClassMetrics(precision, recall, f1)
        f1_values.append(f1)

    return MetricsReport(
        accuracy=cm.correct / cm.total,
        per_class=per_class,
        macro_f1=float(np.mean(f1_values)),
    )


@dataclass
class EraReport:
    """Everything computed for one prediction set, grouped by era."""

    matrices: dict[Era, ConfusionMatrix]
    metrics: dict[Era, MetricsReport]
    fisher: dict[tuple[Era, Era], FisherResult]
    alpha: float


def era_report(preds: Sequence[PredictionRecord], alpha: float = 0.05) -> EraReport:
    """Per-era metrics plus pairwise Fisher comparisons of accuracy."""
    if not preds:
        raise EmptyInput("no prediction records")
    by_era: dict[Era, list[PredictionRecord]] = {}
    for record in preds:
        by_era.setdefault(record.era, []).append(record)

    eras_present = [era for era in ERAS if era in by_era]
    matrices = {era: confusion_matrix(by_era[era]) for era in eras_present}
    reports = {era: metrics(matrices[era]) for era in eras_present}
    fisher = {
        (era_a, era_b): compare_eras(
            (matrices[era_a].correct, matrices[era_a].total),
            (matrices[era_b].correct, matrices[era_b].total),
            alpha,
        )
        for era_a, era_b in combinations(eras_present, 2)
    }
    return EraReport(matrices, reports, fisher, alpha)


def load_predictions(path) -> list[PredictionRecord]:
    """Read predictions JSONL: {paper_id, era, gold, raw_output} per line."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                records.append(
                    PredictionRecord(
                        paper_id=str(obj["paper_id"]),
                        era=Era(obj["era"]),
                        gold=str(obj["gold"]),
                        predicted=parse_label(str(obj["raw_output"])),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise NlikitError(f"{path}:{lineno}: bad prediction row: {exc}") from exc
    return records


def report_to_obj(report: EraReport) -> dict:
    obj: dict = {"alpha": report.alpha, "eras": {}, "fisher": []}
    for era, era_metrics in report.metrics.items():
        cm = report.matrices[era]
        obj["eras"][era.value] = {
            "total": cm.total,
            "correct": cm.correct,
            "accuracy": era_metrics.accuracy,
            "macro_f1": era_metrics.macro_f1,
            "per_class": {
                label: {"precision": m.precision, "recall": m.recall, "f1": m.f1}
                for label, m in era_metrics.per_class.items()
            },
            "confusion": cm.counts.tolist(),
            "predicted_columns": list(PREDICTED_COLUMNS),
        }
    for (era_a, era_b), result in report.fisher.items():
        obj["fisher"].append(
            {
                "comparison": f"{era_a.value} vs {era_b.value}",
                "table": [list(result.table[0]), list(result.table[1])],
                "p_value": result.p_value,
                "alpha": result.alpha,
                "significant": result.significant,
            }
        )
    return obj


def report_json(report: EraReport) -> str:
    return json.dumps(report_to_obj(report), indent=2, sort_keys=True) + "\n"


def metrics_csv(report: EraReport) -> str:
    """Flat CSV: one row per (era, label), plus macro/accuracy rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["era", "label", "precision", "recall", "f1"])
    for era, era_metrics in report.metrics.items():
        for label, m in era_metrics.per_class.items():
            writer.writerow(
                [era.value, label, f"{m.precision:.6f}", f"{m.recall:.6f}", f"{m.f1:.6f}"]
            )
        writer.writerow([era.value, "macro_f1", "", "", f"{era_metrics.macro_f1:.6f}"])
        writer.writerow([era.value, "accuracy", "", "", f"{era_metrics.accuracy:.6f}"])
    return buf.getvalue()


def confusion_csv(cm: ConfusionMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["gold"] + list(PREDICTED_COLUMNS))
    for i, label in enumerate(L1_LABELS):
        writer.writerow([label] + [int(x) for x in cm.counts[i]])
    return buf.getvalue()


def fisher_csv(report: EraReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["comparison", "a", "b", "c", "d", "p_value", "alpha", "significant"])
    for (era_a, era_b), result in report.fisher.items():
        (a, b), (c, d) = result.table
        writer.writerow(
            [
                f"{era_a.value} vs {era_b.value}",
                a,
                b,
                c,
                d,
                f"{result.p_value:.6g}",
                result.alpha,
                result.significant,
            ]
        )
    return buf.getvalue()


def reconstruct_counts(accuracy: float, total: int, tol: float = 0.0005) -> list[int]:
    """Integer correct-counts whose accuracy rounds to the reported value.

    Returns every candidate c with |c/total - accuracy| <= tol; an empty
    list means the reported accuracy is inconsistent with the total.
    """
    # 1e-9 guards against float noise flipping an exact boundary.
    lo = int(np.ceil((accuracy - tol) * total - 1e-9))
    hi = int(np.floor((accuracy + tol) * total + 1e-9))
    return [c for c in range(max(lo, 0), min(hi, total) + 1)]
