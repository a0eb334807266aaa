"""Composite-score matching of answer text against block-level regions.

Every block is scored with a weighted combination of three components:

* fuzzy score     — character-window / token-set similarity to the answer,
* length factor   — min/max length ratio between answer and region text,
* answer match    — fraction of answer tokens present in the region,

minus two flag penalties (very short regions, regions with no contextual
token overlap with the question and answer). Blocks at or above the
score threshold are kept, sorted by score with reading order breaking
ties, and truncated to the configured caps. The whole path is pure and
deterministic: identical inputs produce identical rankings.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from typing import Iterable

from .geometry import BBox
from .layout import Document, validate_document
from .textnorm import NormText, fuzzy_score, normalize

GRANULARITY_BLOCK = "block"
GRANULARITY_LINE = "line"
GRANULARITY_WORD = "word"
GRANULARITIES = (GRANULARITY_BLOCK, GRANULARITY_LINE, GRANULARITY_WORD, "point")


class MatchInputError(ValueError):
    """Unusable matcher input (empty answer, invalid document, bad config)."""


def _load_token_file(text: str) -> frozenset[str]:
    tokens = set()
    for raw_line in text.splitlines():
        stripped = raw_line.strip()
        if stripped and not stripped.startswith("#"):
            tokens.add(stripped)
    return frozenset(tokens)


def load_stopwords(path: str | None = None) -> frozenset[str]:
    """Stopword set from a file, the GROUND_STOPWORDS override, or the bundled list."""
    if path is None:
        path = os.environ.get("GROUND_STOPWORDS") or None
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return _load_token_file(fh.read())
    data = resources.files("docground.data").joinpath("stopwords.txt").read_text("utf-8")
    return _load_token_file(data)


@dataclass(frozen=True)
class MatchConfig:
    """Tunable knobs of the matcher and evaluator.

    The weights must sum to 1. ``top_k`` and ``max_blocks`` are separate
    caps applied in sequence so the block-count sweep and the fixed
    top-k evaluation protocol share one code path.
    """

    w_fuzzy: float = 0.6
    w_length: float = 0.2
    w_answer: float = 0.2
    threshold: float = 0.55
    top_k: int = 10
    max_blocks: int = 2
    max_lines: int = 5
    penalty_short: float = 0.2
    penalty_context: float = 0.25
    min_area_fraction: float = 0.0005
    iou_threshold: float = 0.5
    word_edit_tolerance: int = 1
    word_gap_tolerance: int = 1
    stopword_list: frozenset[str] = field(default_factory=load_stopwords)

    def __post_init__(self) -> None:
        weight_sum = self.w_fuzzy + self.w_length + self.w_answer
        if abs(weight_sum - 1.0) > 1e-9:
            raise MatchInputError(f"score weights must sum to 1, got {weight_sum}")
        if min(self.w_fuzzy, self.w_length, self.w_answer) < 0:
            raise MatchInputError("score weights must be non-negative")
        for name in ("threshold", "penalty_short", "penalty_context", "min_area_fraction", "iou_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise MatchInputError(f"{name} must be in [0, 1], got {value}")
        for name in ("top_k", "max_blocks", "max_lines"):
            if getattr(self, name) < 1:
                raise MatchInputError(f"{name} must be positive")
        for name in ("word_edit_tolerance", "word_gap_tolerance"):
            if getattr(self, name) < 0:
                raise MatchInputError(f"{name} must be >= 0")

    def with_overrides(self, **kwargs) -> "MatchConfig":
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "stopword_list":
                value = sorted(value)
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MatchConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise MatchInputError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        kwargs = dict(data)
        if "stopword_list" in kwargs:
            kwargs["stopword_list"] = frozenset(kwargs["stopword_list"])
        return cls(**kwargs)


@dataclass(frozen=True)
class ScoreBreakdown:
    fuzzy: float
    length_factor: float
    answer_match: float
    penalty_short_applied: bool
    penalty_context_applied: bool
    combined: float

    def as_dict(self) -> dict:
        return {
            "fuzzy": self.fuzzy,
            "length": self.length_factor,
            "answer": self.answer_match,
            "pen_short": self.penalty_short_applied,
            "pen_ctx": self.penalty_context_applied,
            "combined": self.combined,
        }


@dataclass(frozen=True)
class RegionMatch:
    region_id: str
    granularity: str
    bbox: BBox
    text: str
    score: ScoreBreakdown
    rank: int


def length_factor(answer: NormText, matched_text: NormText) -> float:
    """min/max ratio of normalized character lengths; 1.0 for two empties."""
    la = len(answer.normalized)
    lt = len(matched_text.normalized)
    longest = max(la, lt)
    if longest == 0:
        return 1.0
    return min(la, lt) / longest


def answer_match_score(answer: NormText, region_text: NormText) -> float:
    """Fraction of distinct answer tokens that occur in the region text."""
    answer_tokens = set(answer.tokens)
    if not answer_tokens:
        return 1.0
    region_tokens = set(region_text.tokens)
    return len(answer_tokens & region_tokens) / len(answer_tokens)


def _content_tokens(text: NormText, stopwords: frozenset[str]) -> set[str]:
    return {t for t in text.tokens if t not in stopwords}


def compute_penalties(
    answer: NormText,
    question: NormText,
    block,
    page_area: float,
    cfg: MatchConfig,
    block_norm: NormText | None = None,
) -> tuple[bool, bool]:
    """Flags for the short-region and the no-contextual-overlap penalties.

    ``block`` is any region with ``text`` and ``bbox`` (line scoring
    reuses the same rule at line scope). A region is short when its
    normalized text undercuts the floor max(3, ceil(0.2 * answer
    length)) or when its box covers less than ``min_area_fraction`` of
    the page. It is non-contextual when the Jaccard overlap of its
    stopword-filtered tokens with those of answer and question falls
    below 0.05 (two empty token sets count as no overlap).
    """
    if page_area <= 0:
        raise MatchInputError(f"page_area must be positive, got {page_area}")
    if block_norm is None:
        block_norm = normalize(block.text)
    min_len = max(3, math.ceil(0.2 * len(answer.normalized)))
    short = len(block_norm.normalized) < min_len
    if not short and block.bbox.is_valid():
        short = (block.bbox.area / page_area) < cfg.min_area_fraction

    block_tokens = _content_tokens(block_norm, cfg.stopword_list)
    context_tokens = _content_tokens(answer, cfg.stopword_list) | _content_tokens(
        question, cfg.stopword_list
    )
    union = block_tokens | context_tokens
    jaccard = len(block_tokens & context_tokens) / len(union) if union else 0.0
    return short, jaccard < 0.05


def score_block(
    answer: NormText,
    question: NormText,
    block,
    page_area: float,
    cfg: MatchConfig,
) -> ScoreBreakdown:
    """Composite score of one region (block or line) against the answer.

    The length factor compares the answer against the region's full
    normalized text, so an answer embedded in a 4x longer block scores
    0.25 on that component.
    """
    region_norm = normalize(block.text)
    fuzzy = fuzzy_score(answer, region_norm)
    length = length_factor(answer, region_norm)
    ans_match = answer_match_score(answer, region_norm)
    pen_short, pen_ctx = compute_penalties(answer, question, block, page_area, cfg, region_norm)
    combined = (
        cfg.w_fuzzy * fuzzy
        + cfg.w_length * length
        + cfg.w_answer * ans_match
        - (cfg.penalty_short if pen_short else 0.0)
        - (cfg.penalty_context if pen_ctx else 0.0)
    )
    return ScoreBreakdown(
        fuzzy=fuzzy,
        length_factor=length,
        answer_match=ans_match,
        penalty_short_applied=pen_short,
        penalty_context_applied=pen_ctx,
        combined=min(1.0, max(0.0, combined)),
    )


def rank_candidates(
    scored: Iterable[tuple[str, BBox, str, ScoreBreakdown]],
    granularity: str,
    threshold: float,
    limit: int,
) -> list[RegionMatch]:
    """Filter by threshold, sort by score (reading order on ties), cap and rank.

    The input iteration order must be reading order; the stable sort
    then makes truncation at any limit a prefix of the full ranking.
    """
    kept = [item for item in scored if item[3].combined >= threshold]
    kept.sort(key=lambda item: -item[3].combined)
    kept = kept[:limit]
    return [
        RegionMatch(region_id=rid, granularity=granularity, bbox=bbox, text=text, score=score, rank=i)
        for i, (rid, bbox, text, score) in enumerate(kept, start=1)
    ]


def check_match_inputs(answer: str, doc: Document) -> NormText:
    """Normalized answer after rejecting empty answers and invalid documents."""
    answer_norm = normalize(answer)
    if not answer_norm.normalized:
        raise MatchInputError("answer is empty after normalization; grounding needs an extractive answer")
    violations = validate_document(doc)
    if violations:
        first = violations[0]
        raise MatchInputError(
            f"document '{doc.doc_id}' failed validation: {first.rule} at '{first.item_id}'"
        )
    return answer_norm


def score_all_blocks(
    answer_norm: NormText, question_norm: NormText, doc: Document, cfg: MatchConfig
) -> list[tuple[str, BBox, str, ScoreBreakdown]]:
    """Every block's breakdown, in reading order (no filtering or capping)."""
    page_area = doc.page_area
    return [
        (block.id, block.bbox, block.text, score_block(answer_norm, question_norm, block, page_area, cfg))
        for block in doc.blocks
    ]


def match_blocks(answer: str, question: str, doc: Document, cfg: MatchConfig) -> list[RegionMatch]:
    """Top block-level regions for an answer, per the composite score.

    Raises :class:`MatchInputError` for an answer that is empty after
    normalization or for a document that fails validation.
    """
    answer_norm = check_match_inputs(answer, doc)
    scored = score_all_blocks(answer_norm, normalize(question), doc, cfg)
    limit = min(cfg.top_k, cfg.max_blocks)
    return rank_candidates(scored, GRANULARITY_BLOCK, cfg.threshold, limit)
