"""Prediction and ground-truth record formats.

A prediction record carries one question's grounded regions plus the
configuration that produced them:

    { "question_id": str, "doc_id": str, "question": str, "answer": str,
      "config": {...all MatchConfig fields...},
      "blocks": [ { "id": str, "bbox": [..],
                    "score": {"fuzzy":f,"length":f,"answer":f,
                              "pen_short":bool,"pen_ctx":bool,"combined":f},
                    "rank": n } ],
      "lines": [...], "words": [...], "points": [[x,y],...] }

A ground-truth record is:

    { "question_id": str, "doc_id": str, "question": str, "answer": str,
      "regions": { "block": [[x0,y0,x1,y1],...], "line": [...],
                   "word": [...], "point": [[x,y],...] } }

Files hold a JSON array of records, serialized canonically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .geometry import BBox, Pt
from .granularity import GroundingResult
from .jsonio import dumps_canonical
from .matching import MatchConfig, RegionMatch, ScoreBreakdown


class RecordError(ValueError):
    """A prediction or ground-truth file does not follow its schema."""


@dataclass(frozen=True)
class GroundTruth:
    """Annotated regions for one question, per granularity."""
    question_id: str
    doc_id: str
    question: str
    answer: str
    gt_blocks: tuple[BBox, ...]
    gt_lines: tuple[BBox, ...]
    gt_words: tuple[BBox, ...]
    gt_points: tuple[Pt, ...]


def _region_entry(match: RegionMatch) -> dict:
    return {
        "id": match.region_id,
        "bbox": match.bbox.as_list(),
        "score": match.score.as_dict(),
        "rank": match.rank,
    }


def result_to_record(result: GroundingResult, question: str) -> dict:
    return {
        "question_id": result.question_id,
        "doc_id": result.doc_id,
        "question": question,
        "answer": result.answer,
        "config": result.config.to_dict(),
        "blocks": [_region_entry(m) for m in result.block_regions],
        "lines": [_region_entry(m) for m in result.line_regions],
        "words": [_region_entry(m) for m in result.word_regions],
        "points": [p.as_list() for p in result.points],
    }


def _entry_to_match(entry: dict, granularity: str) -> RegionMatch:
    score = entry.get("score", {})
    return RegionMatch(
        region_id=str(entry.get("id", "")),
        granularity=granularity,
        bbox=BBox.from_list(entry["bbox"]),
        text=str(entry.get("text", "")),
        score=ScoreBreakdown(
            fuzzy=float(score.get("fuzzy", 0.0)),
            length_factor=float(score.get("length", 0.0)),
            answer_match=float(score.get("answer", 0.0)),
            penalty_short_applied=bool(score.get("pen_short", False)),
            penalty_context_applied=bool(score.get("pen_ctx", False)),
            combined=float(score.get("combined", 0.0)),
        ),
        rank=int(entry.get("rank", 0)),
    )


def record_to_result(record: dict, cfg: MatchConfig | None = None) -> GroundingResult:
    """Rebuild a GroundingResult from its record form (for rendering/eval)."""
    try:
        config = cfg or MatchConfig.from_dict(record.get("config", {}))
        return GroundingResult(
            question_id=str(record["question_id"]),
            doc_id=str(record["doc_id"]),
            answer=str(record["answer"]),
            block_regions=tuple(_entry_to_match(e, "block") for e in record.get("blocks", [])),
            line_regions=tuple(_entry_to_match(e, "line") for e in record.get("lines", [])),
            word_regions=tuple(_entry_to_match(e, "word") for e in record.get("words", [])),
            points=tuple(Pt(float(p[0]), float(p[1])) for p in record.get("points", [])),
            config=config,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise RecordError(f"bad prediction record: {exc}") from exc


def dumps_records(records: list[dict]) -> str:
    return dumps_canonical(records)


def _loads_array(text: str, what: str) -> list[dict]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordError(f"malformed {what} file at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, list):
        raise RecordError(f"{what} file must contain a JSON array of records")
    for item in data:
        if not isinstance(item, dict):
            raise RecordError(f"{what} file entries must be objects")
    return data


def loads_prediction_records(text: str) -> list[dict]:
    records = _loads_array(text, "prediction")
    for rec in records:
        for key in ("question_id", "doc_id"):
            if key not in rec:
                raise RecordError(f"prediction record missing '{key}'")
    return records


def gt_to_record(gt: GroundTruth) -> dict:
    return {
        "question_id": gt.question_id,
        "doc_id": gt.doc_id,
        "question": gt.question,
        "answer": gt.answer,
        "regions": {
            "block": [b.as_list() for b in gt.gt_blocks],
            "line": [b.as_list() for b in gt.gt_lines],
            "word": [b.as_list() for b in gt.gt_words],
            "point": [p.as_list() for p in gt.gt_points],
        },
    }


def record_to_gt(record: dict) -> GroundTruth:
    try:
        regions = record.get("regions", {})
        return GroundTruth(
            question_id=str(record["question_id"]),
            doc_id=str(record["doc_id"]),
            question=str(record.get("question", "")),
            answer=str(record.get("answer", "")),
            gt_blocks=tuple(BBox.from_list(b) for b in regions.get("block", [])),
            gt_lines=tuple(BBox.from_list(b) for b in regions.get("line", [])),
            gt_words=tuple(BBox.from_list(b) for b in regions.get("word", [])),
            gt_points=tuple(Pt(float(p[0]), float(p[1])) for p in regions.get("point", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise RecordError(f"bad ground-truth record: {exc}") from exc


def loads_gt_records(text: str) -> list[GroundTruth]:
    return [record_to_gt(rec) for rec in _loads_array(text, "ground-truth")]
