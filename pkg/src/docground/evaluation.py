"""IoU-based precision/recall/F1 over predicted vs annotated regions.

Predictions and ground truth are paired one-to-one per granularity by a
maximum bipartite matching (an edge wherever IoU clears the threshold;
points match boxes they lie in, or annotated points within a distance
budget). Maximum rather than greedy matching keeps the count
order-independent and makes recall provably monotone when the
prediction set grows. Corpus metrics are micro-averaged: counts are
summed over questions before any ratio is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .geometry import BBox, Pt, contains_point, iou
from .matching import MatchConfig
from .records import GroundTruth, record_to_result

GRANULARITY_ORDER = ("block", "line", "word", "point")

POINT_MODE_IN_BOX = "point_in_box"
POINT_MODE_DISTANCE = "distance"
DISTANCE_BUDGET_FRACTION = 0.025  # of the page diagonal

POINT_MODE_NOTE = (
    "point matching mode '{mode}': predicted points are paired one-to-one with "
    "{target}; choose the mode that matches how the annotations were produced"
)


class EvalInputError(ValueError):
    """Inconsistent evaluation inputs (id mismatches, duplicates, bad mode)."""


@dataclass(frozen=True)
class GranularityCounts:
    granularity: str
    tp: int
    n_pred: int
    n_gt: int

    @property
    def precision(self) -> float:
        return 100.0 * self.tp / self.n_pred if self.n_pred else 0.0

    @property
    def recall(self) -> float:
        return 100.0 * self.tp / self.n_gt if self.n_gt else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if (p + r) > 0 else 0.0


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[GranularityCounts, ...]
    iou_threshold: float
    point_mode: str
    config: MatchConfig

    def row(self, granularity: str) -> GranularityCounts:
        for r in self.rows:
            if r.granularity == granularity:
                return r
        raise KeyError(granularity)

    def to_dict(self) -> dict:
        return {
            "iou_threshold": self.iou_threshold,
            "point_mode": self.point_mode,
            "point_mode_note": POINT_MODE_NOTE.format(
                mode=self.point_mode,
                target="annotated block boxes containing them"
                if self.point_mode == POINT_MODE_IN_BOX
                else "annotated points within 2.5% of the page diagonal",
            ),
            "config": self.config.to_dict(),
            "rows": [
                {
                    "granularity": r.granularity,
                    "tp": r.tp,
                    "n_pred": r.n_pred,
                    "n_gt": r.n_gt,
                    "precision": float(round2(r.precision)),
                    "recall": float(round2(r.recall)),
                    "f1": float(round2(r.f1)),
                }
                for r in self.rows
            ],
        }

    def to_csv(self) -> str:
        lines = ["granularity,precision,recall,f1,tp,n_pred,n_gt"]
        for r in self.rows:
            lines.append(
                f"{r.granularity},{round2(r.precision)},{round2(r.recall)},{round2(r.f1)},"
                f"{r.tp},{r.n_pred},{r.n_gt}"
            )
        return "\n".join(lines) + "\n"


def round2(value: float) -> str:
    """Percent formatting: fixed 2 decimals, half-up, as a string."""
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _max_bipartite(adjacency: list[list[int]], n_right: int) -> int:
    """Maximum one-to-one matching via augmenting paths (instances are tiny)."""
    match_right = [-1] * n_right

    def try_assign(left: int, seen: list[bool]) -> bool:
        for right in adjacency[left]:
            if not seen[right]:
                seen[right] = True
                if match_right[right] == -1 or try_assign(match_right[right], seen):
                    match_right[right] = left
                    return True
        return False

    matched = 0
    for left in range(len(adjacency)):
        if try_assign(left, [False] * n_right):
            matched += 1
    return matched


def match_regions(preds: list[BBox], gts: list[BBox], iou_threshold: float) -> int:
    """Size of the maximum one-to-one matching with IoU >= threshold edges."""
    if not 0.0 < iou_threshold <= 1.0:
        raise EvalInputError(f"iou threshold must be in (0, 1], got {iou_threshold}")
    adjacency = [
        [j for j, gt in enumerate(gts) if iou(pred, gt) >= iou_threshold] for pred in preds
    ]
    return _max_bipartite(adjacency, len(gts))


def match_points(
    pred_points: list[Pt],
    gt: GroundTruth,
    mode: str = POINT_MODE_IN_BOX,
    page_diagonal: float | None = None,
) -> int:
    """Matched predicted points, one-to-one against the chosen target set."""
    if mode == POINT_MODE_IN_BOX:
        if not gt.gt_blocks:
            raise EvalInputError(
                f"point mode '{mode}' needs block ground truth, absent for {gt.question_id}"
            )
        adjacency = [
            [j for j, box in enumerate(gt.gt_blocks) if contains_point(box, p)]
            for p in pred_points
        ]
        return _max_bipartite(adjacency, len(gt.gt_blocks))
    if mode == POINT_MODE_DISTANCE:
        if not gt.gt_points:
            raise EvalInputError(
                f"point mode '{mode}' needs point ground truth, absent for {gt.question_id}"
            )
        if page_diagonal is None or page_diagonal <= 0:
            raise EvalInputError("distance mode needs a positive page diagonal")
        budget = DISTANCE_BUDGET_FRACTION * page_diagonal
        adjacency = [
            [
                j
                for j, q in enumerate(gt.gt_points)
                if math.hypot(p.x - q.x, p.y - q.y) <= budget
            ]
            for p in pred_points
        ]
        return _max_bipartite(adjacency, len(gt.gt_points))
    raise EvalInputError(f"unknown point mode '{mode}'")


def _pred_boxes(record: dict, key: str) -> list[BBox]:
    return [BBox.from_list(entry["bbox"]) for entry in record.get(key, [])]


def evaluate_question(
    pred: dict,
    gt: GroundTruth,
    cfg: MatchConfig,
    point_mode: str = POINT_MODE_IN_BOX,
    page_diagonal: float | None = None,
) -> dict[str, tuple[int, int, int]]:
    """Raw (tp, n_pred, n_gt) per granularity for one question."""
    if str(pred.get("question_id")) != gt.question_id:
        raise EvalInputError(
            f"prediction/gt id mismatch: {pred.get('question_id')!r} vs {gt.question_id!r}"
        )
    box_pairs = {
        "block": (_pred_boxes(pred, "blocks"), list(gt.gt_blocks)),
        "line": (_pred_boxes(pred, "lines"), list(gt.gt_lines)),
        "word": (_pred_boxes(pred, "words"), list(gt.gt_words)),
    }
    counts: dict[str, tuple[int, int, int]] = {}
    for granularity, (pred_boxes, gt_boxes) in box_pairs.items():
        tp = match_regions(pred_boxes, gt_boxes, cfg.iou_threshold) if pred_boxes and gt_boxes else 0
        counts[granularity] = (tp, len(pred_boxes), len(gt_boxes))
    points = [Pt(float(p[0]), float(p[1])) for p in pred.get("points", [])]
    n_point_gt = len(gt.gt_blocks) if point_mode == POINT_MODE_IN_BOX else len(gt.gt_points)
    point_tp = (
        match_points(points, gt, point_mode, page_diagonal) if points and n_point_gt else 0
    )
    counts["point"] = (point_tp, len(points), n_point_gt)
    return counts


def evaluate_corpus(
    pred_records: list[dict],
    gts: list[GroundTruth],
    cfg: MatchConfig,
    point_mode: str = POINT_MODE_IN_BOX,
    page_diagonals: dict[str, float] | None = None,
) -> EvalReport:
    """Micro-averaged corpus report; gt without a prediction counts as misses."""
    gt_by_id: dict[str, GroundTruth] = {}
    for gt in gts:
        if gt.question_id in gt_by_id:
            raise EvalInputError(f"duplicate question_id in ground truth: {gt.question_id}")
        gt_by_id[gt.question_id] = gt

    seen: set[str] = set()
    totals = {g: [0, 0, 0] for g in GRANULARITY_ORDER}
    for pred in pred_records:
        qid = str(pred.get("question_id"))
        if qid in seen:
            raise EvalInputError(f"duplicate question_id in predictions: {qid}")
        seen.add(qid)
        if qid not in gt_by_id:
            raise EvalInputError(f"prediction {qid} has no ground-truth record")
        gt = gt_by_id[qid]
        diagonal = (page_diagonals or {}).get(gt.doc_id)
        for granularity, (tp, n_pred, n_gt) in evaluate_question(
            pred, gt, cfg, point_mode, diagonal
        ).items():
            totals[granularity][0] += tp
            totals[granularity][1] += n_pred
            totals[granularity][2] += n_gt

    for qid, gt in gt_by_id.items():
        if qid in seen:
            continue
        totals["block"][2] += len(gt.gt_blocks)
        totals["line"][2] += len(gt.gt_lines)
        totals["word"][2] += len(gt.gt_words)
        totals["point"][2] += len(gt.gt_blocks) if point_mode == POINT_MODE_IN_BOX else len(gt.gt_points)

    rows = tuple(
        GranularityCounts(granularity=g, tp=totals[g][0], n_pred=totals[g][1], n_gt=totals[g][2])
        for g in GRANULARITY_ORDER
    )
    return EvalReport(rows=rows, iou_threshold=cfg.iou_threshold, point_mode=point_mode, config=cfg)
