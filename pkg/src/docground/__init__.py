"""Multi-granular answer grounding for text-rich document layouts.

Given a hierarchical OCR layout (blocks, lines, words with boxes) and an
answer string, the engine localizes the answer at block, line, word and
point granularity with a composite fuzzy-matching score, and evaluates
grounding quality with IoU-based precision/recall/F1.
"""

from .ablation import AblationSpec, AblationTable, run_ablation
from .evaluation import (
    EvalReport,
    evaluate_corpus,
    evaluate_question,
    match_points,
    match_regions,
)
from .geometry import BBox, Pt, centroid, contains_point, iou, union_bbox
from .granularity import (
    GroundingResult,
    WordRun,
    derive_points,
    ground,
    ground_words,
    longest_contiguous_run,
    match_words,
    refine_lines,
)
from .layout import (
    Block,
    Document,
    Line,
    Violation,
    Word,
    parse_layout,
    serialize_layout,
    validate_document,
)
from .matching import (
    MatchConfig,
    RegionMatch,
    ScoreBreakdown,
    answer_match_score,
    compute_penalties,
    length_factor,
    load_stopwords,
    match_blocks,
    score_block,
)
from .overlay import OverlayStyle, render_overlay
from .records import GroundTruth, gt_to_record, record_to_gt, result_to_record
from .synthetic import SynthParams, build_corpus, generate_synthetic_corpus
from .textnorm import (
    NormText,
    fuzzy_score,
    levenshtein,
    normalize,
    partial_ratio,
    sim,
    token_set_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "AblationSpec",
    "AblationTable",
    "BBox",
    "Block",
    "Document",
    "EvalReport",
    "GroundTruth",
    "GroundingResult",
    "Line",
    "MatchConfig",
    "NormText",
    "OverlayStyle",
    "Pt",
    "RegionMatch",
    "ScoreBreakdown",
    "SynthParams",
    "Violation",
    "Word",
    "WordRun",
    "answer_match_score",
    "build_corpus",
    "centroid",
    "compute_penalties",
    "contains_point",
    "derive_points",
    "evaluate_corpus",
    "evaluate_question",
    "fuzzy_score",
    "generate_synthetic_corpus",
    "ground",
    "ground_words",
    "gt_to_record",
    "iou",
    "length_factor",
    "levenshtein",
    "load_stopwords",
    "longest_contiguous_run",
    "match_blocks",
    "match_points",
    "match_regions",
    "match_words",
    "normalize",
    "parse_layout",
    "partial_ratio",
    "record_to_gt",
    "refine_lines",
    "render_overlay",
    "result_to_record",
    "run_ablation",
    "score_block",
    "serialize_layout",
    "sim",
    "token_set_ratio",
    "union_bbox",
    "validate_document",
]
