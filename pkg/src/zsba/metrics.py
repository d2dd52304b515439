"""Evaluation reports: per-class accuracy with micro/macro averages, and
per-class IoU with the dataset-level mean.

Counts are the source of truth. Reports keep raw per-class counts next to
the derived percentages, so two reports over disjoint samples can be merged
by adding counts and recomputing; the merged report is identical to the one
computed on the union. IoU accumulates one global confusion matrix over all
pixels of all images rather than averaging per-image scores.

Ground-truth pixels holding the sentinel 255 are ignore-regions. A sentinel
prediction on a labeled pixel counts as a miss for the true class but is
not charged to any class as a false positive, unless the report is asked to
track "unlabeled" as an error class of its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classify import ClassificationResult
from .errors import (
    EmptyDatasetError,
    LengthMismatchError,
    ManifestError,
    ShapeMismatchError,
    UnknownSampleError,
    ValidationError,
)
from .manifest import DatasetManifest
from .segment import UNLABELED
from .vocabulary import TaskSpec

UNLABELED_CLASS_NAME = "unlabeled"


@dataclass(frozen=True)
class ClassAccuracy:
    name: str
    index: int
    total: int
    correct: int

    @property
    def accuracy(self) -> float:
        return 100.0 * self.correct / self.total


@dataclass(frozen=True)
class ClassIoU:
    name: str
    index: int
    tp: int
    fp: int
    fn: int

    @property
    def gt_pixels(self) -> int:
        return self.tp + self.fn

    @property
    def union(self) -> int:
        return self.tp + self.fp + self.fn

    @property
    def iou(self) -> float:
        return 100.0 * self.tp / self.union


@dataclass(frozen=True)
class EvalReport:
    task_id: str
    kind: str  # "classification" | "segmentation"
    per_class: tuple  # ClassAccuracy or ClassIoU, ordered by category index
    micro_average: float | None = None
    macro_average: float | None = None
    mean_iou: float | None = None


def _mean(values: Sequence[float]) -> float:
    acc = 0.0
    for v in values:
        acc += v
    return acc / len(values)


def classification_report(
    results: Sequence[ClassificationResult],
    manifest: DatasetManifest,
    task: TaskSpec,
) -> EvalReport:
    """Per-class accuracy plus micro (pooled) and macro (unweighted) averages.

    Classes with no evaluated samples are left out of the report and of the
    macro average. Samples without ground truth are skipped.
    """
    gt = {s.image_id: s.ground_truth for s in manifest.samples}
    n_classes = len(task.categories)
    totals = [0] * n_classes
    corrects = [0] * n_classes
    for result in results:
        if result.image_id not in gt:
            raise UnknownSampleError(f"result for unknown sample {result.image_id!r}")
        truth = gt[result.image_id]
        if truth is None:
            continue
        if truth >= n_classes:
            raise ManifestError(
                f"sample {result.image_id!r}: ground_truth {truth} is out of range "
                f"for task {task.task_id!r} ({n_classes} categories)"
            )
        totals[truth] += 1
        if result.predicted_index == truth:
            corrects[truth] += 1
    if sum(totals) == 0:
        raise EmptyDatasetError("no labeled samples to report on")
    per_class = tuple(
        ClassAccuracy(task.categories[i].name, i, totals[i], corrects[i])
        for i in range(n_classes)
        if totals[i] > 0
    )
    micro = 100.0 * sum(corrects) / sum(totals)
    macro = _mean([c.accuracy for c in per_class])
    return EvalReport(
        task_id=task.task_id,
        kind="classification",
        per_class=per_class,
        micro_average=micro,
        macro_average=macro,
    )


def _accumulate_confusion(
    pred: np.ndarray, gt: np.ndarray, n_classes: int, cm: np.ndarray
) -> None:
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(
            f"prediction shape {pred.shape} != ground-truth shape {gt.shape}"
        )
    for name, arr in (("prediction", pred), ("ground truth", gt)):
        bad = (arr >= n_classes) & (arr != UNLABELED)
        if bad.any():
            raise ValidationError(
                f"{name} holds label {int(arr[bad][0])}, valid labels are "
                f"0..{n_classes - 1} and {UNLABELED}"
            )
    keep = gt != UNLABELED
    g = gt[keep].astype(np.int64)
    p = pred[keep].astype(np.int64)
    p[p == UNLABELED] = n_classes  # sentinel predictions get their own column
    width = n_classes + 1
    cm += np.bincount(g * width + p, minlength=width * width).reshape(width, width)


def segmentation_report(
    pred_maps: Sequence[np.ndarray],
    gt_maps: Sequence[np.ndarray],
    task: TaskSpec,
    count_unlabeled: bool = False,
) -> EvalReport:
    """Dataset-level per-class IoU and its mean over one global confusion matrix.

    A class enters the report (and the mean) when any pixel involves it,
    predicted or true. With count_unlabeled, sentinel predictions on labeled
    pixels additionally show up as an "unlabeled" error class.
    """
    if len(pred_maps) != len(gt_maps):
        raise LengthMismatchError(
            f"{len(pred_maps)} predictions vs {len(gt_maps)} ground-truth maps"
        )
    n_classes = len(task.categories)
    width = n_classes + 1
    cm = np.zeros((width, width), dtype=np.int64)
    for pred, gt in zip(pred_maps, gt_maps):
        _accumulate_confusion(pred, gt, n_classes, cm)

    entries = []
    for k in range(n_classes):
        tp = int(cm[k, k])
        fn = int(cm[k, :].sum()) - tp
        fp = int(cm[:, k].sum()) - tp
        if tp + fp + fn > 0:
            entries.append(ClassIoU(task.categories[k].name, k, tp, fp, fn))
    if count_unlabeled:
        stray = int(cm[:, n_classes].sum())
        if stray > 0:
            entries.append(ClassIoU(UNLABELED_CLASS_NAME, n_classes, 0, stray, 0))
    if not entries:
        raise EmptyDatasetError("no labeled pixels to report on")
    per_class = tuple(entries)
    return EvalReport(
        task_id=task.task_id,
        kind="segmentation",
        per_class=per_class,
        mean_iou=_mean([c.iou for c in per_class]),
    )


def merge_reports(a: EvalReport, b: EvalReport) -> EvalReport:
    """Combine two reports over disjoint samples by adding their counts."""
    if a.task_id != b.task_id or a.kind != b.kind:
        raise ValidationError(
            f"cannot merge report for ({a.task_id!r}, {a.kind}) with "
            f"({b.task_id!r}, {b.kind})"
        )
    by_index: dict[int, list] = {}
    for entry in a.per_class + b.per_class:
        by_index.setdefault(entry.index, []).append(entry)
    merged = []
    for index in sorted(by_index):
        parts = by_index[index]
        names = {e.name for e in parts}
        if len(names) != 1:
            raise ValidationError(f"class index {index} has conflicting names {names}")
        if a.kind == "classification":
            merged.append(
                ClassAccuracy(
                    parts[0].name,
                    index,
                    total=sum(e.total for e in parts),
                    correct=sum(e.correct for e in parts),
                )
            )
        else:
            merged.append(
                ClassIoU(
                    parts[0].name,
                    index,
                    tp=sum(e.tp for e in parts),
                    fp=sum(e.fp for e in parts),
                    fn=sum(e.fn for e in parts),
                )
            )
    per_class = tuple(merged)
    if a.kind == "classification":
        total = sum(e.total for e in per_class)
        correct = sum(e.correct for e in per_class)
        return EvalReport(
            task_id=a.task_id,
            kind=a.kind,
            per_class=per_class,
            micro_average=100.0 * correct / total,
            macro_average=_mean([e.accuracy for e in per_class]),
        )
    return EvalReport(
        task_id=a.task_id,
        kind=a.kind,
        per_class=per_class,
        mean_iou=_mean([e.iou for e in per_class]),
    )


def report_to_json_dict(report: EvalReport) -> dict:
    doc: dict = {"task_id": report.task_id, "kind": report.kind}
    if report.kind == "classification":
        doc["per_class"] = [
            {
                "name": e.name,
                "index": e.index,
                "total": e.total,
                "correct": e.correct,
                "accuracy": e.accuracy,
            }
            for e in report.per_class
        ]
        doc["micro_average"] = report.micro_average
        doc["macro_average"] = report.macro_average
    else:
        doc["per_class"] = [
            {
                "name": e.name,
                "index": e.index,
                "tp": e.tp,
                "fp": e.fp,
                "fn": e.fn,
                "iou": e.iou,
            }
            for e in report.per_class
        ]
        doc["mean_iou"] = report.mean_iou
    return doc


def report_from_json_dict(doc: dict) -> EvalReport:
    try:
        kind = doc["kind"]
        if kind == "classification":
            per_class = tuple(
                ClassAccuracy(e["name"], e["index"], e["total"], e["correct"])
                for e in doc["per_class"]
            )
            return EvalReport(
                task_id=doc["task_id"],
                kind=kind,
                per_class=per_class,
                micro_average=doc["micro_average"],
                macro_average=doc["macro_average"],
            )
        if kind == "segmentation":
            per_class = tuple(
                ClassIoU(e["name"], e["index"], e["tp"], e["fp"], e["fn"])
                for e in doc["per_class"]
            )
            return EvalReport(
                task_id=doc["task_id"],
                kind=kind,
                per_class=per_class,
                mean_iou=doc["mean_iou"],
            )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed report document: {exc}") from exc
    raise ValidationError(f"unknown report kind {doc.get('kind')!r}")


def report_to_table(report: EvalReport) -> str:
    """Plain-text table: per-class rows plus the average footer rows."""
    if report.kind == "classification":
        count_header, value_header = "Samples", "Accuracy (%)"
        rows = [(e.name, str(e.total), f"{e.accuracy:.1f}") for e in report.per_class]
        total = sum(e.total for e in report.per_class)
        rows.append(("Micro-Average", str(total), f"{report.micro_average:.1f}"))
        rows.append(("Macro-Average", "", f"{report.macro_average:.1f}"))
    else:
        count_header, value_header = "GT pixels", "IoU (%)"
        rows = [(e.name, str(e.gt_pixels), f"{e.iou:.1f}") for e in report.per_class]
        rows.append(("Mean", "", f"{report.mean_iou:.1f}"))
    header = ("Class", count_header, value_header)
    widths = [
        max(len(header[col]), max(len(r[col]) for r in rows)) for col in range(3)
    ]
    lines = [
        f"{header[0]:<{widths[0]}}  {header[1]:>{widths[1]}}  {header[2]:>{widths[2]}}"
    ]
    for name, count, value in rows:
        lines.append(f"{name:<{widths[0]}}  {count:>{widths[1]}}  {value:>{widths[2]}}")
    return "\n".join(lines)
