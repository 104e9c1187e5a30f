"""Strict-IOU detection scoring and plot-to-table F1.

Matching follows the de-facto detection protocol: per class, detections
sorted by descending score greedily claim the unmatched ground-truth box
of highest IOU at or above the threshold; everything else is a false
positive. AP uses all-point interpolation (area under the precision
envelope), and mAP averages the per-class APs, excluding (and reporting)
classes with no ground truth anywhere in the corpus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import serialize
from .detector import Detection
from .geometry import iou
from .table import PlotTable
from .targets import Annotation, FOREGROUND_CLASSES, ObjectClass


@dataclass
class MatchResult:
    """Per-detection outcome plus per-class GT counts, aligned with the
    input detection list."""

    tp: list[bool]
    matched_gt: list[int | None]
    scores: list[float]
    classes: list[ObjectClass]
    gt_count: dict[ObjectClass, int]


@dataclass
class ClassEval:
    ap: float | None
    gt: int
    detections: int
    true_positives: int


@dataclass
class EvalReport:
    thresholds: list[float]
    per_class: dict[float, dict[str, ClassEval]]
    mean_ap: dict[float, float]
    images: int
    excluded_classes: list[str]
    table_precision: float | None = None
    table_recall: float | None = None
    table_f1: float | None = None
    table_pairs: int = 0


def match_detections(dets: list[Detection], gts: list[Annotation],
                     iou_threshold: float) -> MatchResult:
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold must be in (0, 1], got {iou_threshold}")
    tp: list[bool] = [False] * len(dets)
    matched: list[int | None] = [None] * len(dets)
    gt_count: dict[ObjectClass, int] = {}
    for g in gts:
        gt_count[g.cls] = gt_count.get(g.cls, 0) + 1

    by_class: dict[ObjectClass, list[int]] = {}
    for i, d in enumerate(dets):
        by_class.setdefault(d.cls, []).append(i)
    gt_by_class: dict[ObjectClass, list[Annotation]] = {}
    for g in gts:
        gt_by_class.setdefault(g.cls, []).append(g)

    for cls, det_ids in by_class.items():
        candidates = gt_by_class.get(cls, [])
        claimed: set[int] = set()
        order = sorted(det_ids, key=lambda i: (-dets[i].score, i))
        for i in order:
            best_gt, best_iou = None, iou_threshold
            for g in candidates:
                if g.object_id in claimed:
                    continue
                v = iou(dets[i].box, g.box)
                if v > best_iou or (v == best_iou and best_gt is None
                                    and v >= iou_threshold):
                    best_gt, best_iou = g.object_id, v
            if best_gt is not None:
                claimed.add(best_gt)
                tp[i] = True
                matched[i] = best_gt
    return MatchResult(tp, matched, [d.score for d in dets],
                       [d.cls for d in dets], gt_count)


def average_precision(ranked_tp: list[bool], gt_total: int) -> float:
    """All-point interpolated AP from score-ranked TP flags."""
    if gt_total < 1:
        raise ValueError("average precision needs at least one GT instance")
    if not ranked_tp:
        return 0.0
    recalls, precisions = [], []
    tp_cum = 0
    for k, flag in enumerate(ranked_tp, start=1):
        tp_cum += int(flag)
        recalls.append(tp_cum / gt_total)
        precisions.append(tp_cum / k)
    # precision envelope: best precision at any recall >= r
    envelope = precisions.copy()
    for i in range(len(envelope) - 2, -1, -1):
        envelope[i] = max(envelope[i], envelope[i + 1])
    ap = 0.0
    prev_recall = 0.0
    for r, p in zip(recalls, envelope):
        if r > prev_recall:
            ap += (r - prev_recall) * p
            prev_recall = r
    return ap


def evaluate_pairs(pairs: list[tuple[list[Detection], list[Annotation]]],
                   thresholds: list[float]) -> EvalReport:
    """Corpus-level evaluation of (detections, ground truth) pairs:
    matches are computed per image, then pooled per class by score before
    the AP computation."""
    report_classes = {}
    mean_ap = {}
    total_gt: dict[ObjectClass, int] = {c: 0 for c in FOREGROUND_CLASSES}
    for _, gts in pairs:
        for g in gts:
            total_gt[g.cls] += 1

    for t in thresholds:
        pooled: dict[ObjectClass, list[tuple[float, int, int, bool]]] = {
            c: [] for c in FOREGROUND_CLASSES}
        det_count = {c: 0 for c in FOREGROUND_CLASSES}
        tp_count = {c: 0 for c in FOREGROUND_CLASSES}
        for img_idx, (dets, gts) in enumerate(pairs):
            match = match_detections(dets, gts, t)
            for i, d in enumerate(dets):
                pooled[d.cls].append((-d.score, img_idx, i, match.tp[i]))
                det_count[d.cls] += 1
                tp_count[d.cls] += int(match.tp[i])
        per_class = {}
        aps = []
        for cls in FOREGROUND_CLASSES:
            if total_gt[cls] == 0:
                per_class[cls.value] = ClassEval(None, 0, det_count[cls],
                                                 tp_count[cls])
                continue
            ranked = [flag for *_key, flag in sorted(pooled[cls])]
            ap = average_precision(ranked, total_gt[cls])
            per_class[cls.value] = ClassEval(ap, total_gt[cls],
                                             det_count[cls], tp_count[cls])
            aps.append(ap)
        report_classes[t] = per_class
        mean_ap[t] = sum(aps) / len(aps) if aps else 0.0

    excluded = [c.value for c in FOREGROUND_CLASSES if total_gt[c] == 0]
    return EvalReport(list(thresholds), report_classes, mean_ap, len(pairs),
                      excluded)


def table_f1(pred: PlotTable, gt: PlotTable,
             rel_tol: float = 0.02) -> tuple[float, float, float]:
    """Cell-level precision/recall/F1: a predicted cell matches the GT
    cell with the same (case-insensitive, trimmed) row and column headers
    when the values agree within rel_tol relative tolerance."""
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be > 0, got {rel_tol}")
    pred_cells = pred.cells()
    gt_cells = gt.cells()
    matches = 0
    for key, v in pred_cells.items():
        if key in gt_cells:
            g = gt_cells[key]
            if abs(v - g) <= rel_tol * max(abs(g), 1e-9):
                matches += 1
    precision = matches / len(pred_cells) if pred_cells else 0.0
    recall = matches / len(gt_cells) if gt_cells else 0.0
    if precision + recall == 0.0:
        return (precision, recall, 0.0)
    return (precision, recall, 2 * precision * recall / (precision + recall))


def _load_gt_dir(gt_dir: Path) -> list[tuple[str, list[Annotation]]]:
    files = sorted(gt_dir.glob("*.ann.json"))
    if not files:
        raise FileNotFoundError(f"no *.ann.json files in {gt_dir}")
    out = []
    for f in files:
        anns = serialize.annotations_from_obj(serialize.read_json(f))
        out.append((f.name[:-len(".ann.json")], anns))
    return out


def _load_predictions(pred_dir: Path, stem: str) -> list[Detection]:
    det_file = pred_dir / f"{stem}.det.json"
    if det_file.exists():
        return serialize.detections_from_obj(serialize.read_json(det_file))
    ann_file = pred_dir / f"{stem}.ann.json"
    if ann_file.exists():
        anns = serialize.annotations_from_obj(serialize.read_json(ann_file))
        return [Detection(a.box, a.cls, 1.0) for a in anns]
    raise FileNotFoundError(
        f"no predictions for {stem!r} in {pred_dir} "
        f"(expected {stem}.det.json or {stem}.ann.json)")


def evaluate(pred_dir, gt_dir, thresholds: list[float]) -> EvalReport:
    """Evaluate a prediction directory against a ground-truth directory.

    Detections load from <stem>.det.json (annotation files double as
    perfect predictions). When both sides carry <stem>.table.json files,
    cell-level table scores are micro-aggregated into the report."""
    pred_dir, gt_dir = Path(pred_dir), Path(gt_dir)
    gt = _load_gt_dir(gt_dir)
    pairs = []
    for stem, anns in gt:
        dets = _load_predictions(pred_dir, stem)
        pairs.append((dets, anns))
    report = evaluate_pairs(pairs, thresholds)

    total_pred = total_gt = total_match = 0
    table_pairs = 0
    for stem, _ in gt:
        gt_file = gt_dir / f"{stem}.table.json"
        pred_file = pred_dir / f"{stem}.table.json"
        if not (gt_file.exists() and pred_file.exists()):
            continue
        gt_table = serialize.table_from_obj(serialize.read_json(gt_file))
        pred_table = serialize.table_from_obj(serialize.read_json(pred_file))
        gt_cells = gt_table.cells()
        pred_cells = pred_table.cells()
        for key, v in pred_cells.items():
            if key in gt_cells and abs(v - gt_cells[key]) <= \
                    0.02 * max(abs(gt_cells[key]), 1e-9):
                total_match += 1
        total_pred += len(pred_cells)
        total_gt += len(gt_cells)
        table_pairs += 1
    if table_pairs:
        p = total_match / total_pred if total_pred else 0.0
        r = total_match / total_gt if total_gt else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        report.table_precision = p
        report.table_recall = r
        report.table_f1 = f1
        report.table_pairs = table_pairs
    return report
