"""Synthetic planted-answer corpus generation.

Each document is a single column of text blocks filled with pseudo-words
drawn without replacement from a bundled vocabulary, so no token occurs
twice in a document unless planted deliberately. Each question plants an
answer as one or more full lines (one line, two to three consecutive
lines of one block, or all lines of two blocks) and records the exact
boxes at all four granularities. Because planted lines consist solely of
answer tokens, a clean corpus grounds perfectly under the default
configuration.

``ocr_noise_rate`` corrupts layout text (never the stored answers) with
per-character substitutions. ``distractor_fraction`` additionally
appends near-miss lines (partial answer token sets plus fresh tokens) to
answer blocks; these score above the match threshold but below the true
lines, which is what gives ablation sweeps their precision/recall
trade-off. Keep it at 0 for corpora that must ground perfectly.

Generation is deterministic: every random stream is derived from the
seed, the document index and a purpose tag, so any two runs (and any
noise-rate variants of one seed) agree on document structure.
"""

from __future__ import annotations

import os
import random
import string
from dataclasses import dataclass, fields, replace
from importlib import resources

from .geometry import BBox, centroid, union_bbox
from .jsonio import atomic_write_text, dumps_canonical
from .layout import Block, Document, Line, Word, serialize_layout
from .records import GroundTruth, gt_to_record

MARGIN_X = 60.0
MARGIN_Y = 60.0
BLOCK_GAP = 22.0
LINE_GAP = 6.0
WORD_GAP = 12.0
CHAR_WIDTH = 9.0
WORD_HEIGHT = 22.0

NOISE_ALPHABET = string.ascii_lowercase

QUESTION_TEMPLATE = "where does the document state {t0} {t1}"


class GenerationError(RuntimeError):
    """The requested corpus cannot be laid out (page overflow, vocab exhausted)."""


@dataclass(frozen=True)
class SynthParams:
    seed: int = 42
    n_docs: int = 120
    blocks_per_doc: tuple[int, int] = (6, 9)
    lines_per_block: tuple[int, int] = (2, 4)
    words_per_line: tuple[int, int] = (4, 8)
    questions_per_doc: int = 3
    multiblock_fraction: float = 0.2
    multiline_fraction: float = 0.3
    distractor_fraction: float = 0.0
    ocr_noise_rate: float = 0.02
    page_width: float = 1240.0
    page_height: float = 1754.0

    def __post_init__(self) -> None:
        for name in ("blocks_per_doc", "lines_per_block", "words_per_line"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise GenerationError(f"{name} range ({lo}, {hi}) is empty or invalid")
        for name in ("multiblock_fraction", "multiline_fraction", "distractor_fraction", "ocr_noise_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise GenerationError(f"{name} must be in [0, 1], got {value}")
        if self.n_docs < 1 or self.questions_per_doc < 1:
            raise GenerationError("n_docs and questions_per_doc must be positive")

    def with_overrides(self, **kwargs) -> "SynthParams":
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


def load_vocabulary() -> list[str]:
    data = resources.files("docground.data").joinpath("vocabulary.txt").read_text("utf-8")
    return [ln.strip() for ln in data.splitlines() if ln.strip() and not ln.startswith("#")]


class _Pool:
    """Without-replacement token supply for one document."""

    def __init__(self, vocab: list[str], rng: random.Random) -> None:
        self._items = list(vocab)
        rng.shuffle(self._items)

    def take(self, n: int) -> list[str]:
        if n > len(self._items):
            raise GenerationError("vocabulary exhausted; lower the document size parameters")
        out = self._items[:n]
        del self._items[:n]
        return out


@dataclass
class _LineSpec:
    words: list[str]
    planted_for: str | None  # question id or None


@dataclass
class _BlockSpec:
    lines: list[_LineSpec]


@dataclass
class _QuestionPlan:
    question_id: str
    answer_tokens: list[str]
    answer: str
    question: str
    block_specs: list[_BlockSpec]  # blocks owning planted lines


def _draw(rng: random.Random, bounds: tuple[int, int]) -> int:
    return rng.randint(bounds[0], bounds[1])


def _draw_planted(rng: random.Random, bounds: tuple[int, int]) -> int:
    # Planted lines draw from the top of the range: longer lines lose a
    # smaller score fraction per corrupted token, which keeps planted
    # answers above the match threshold under mild OCR noise.
    return rng.randint(max(bounds[0], bounds[1] - 2), bounds[1])


def _pad_to_penalty_floor(planted_lines: list[list[str]], pool: _Pool) -> None:
    """Lengthen short planted lines until none can draw the short-region penalty.

    The penalty floor is max(3, ceil(0.2 * |answer|)) characters; each
    planted line must clear it (with slack) for every line of a planted
    answer to stay above the match threshold. Character substitutions
    preserve lengths, so the guarantee survives OCR noise.
    """
    while True:
        lengths = [len(" ".join(ws)) for ws in planted_lines]
        answer_len = sum(lengths) + (len(planted_lines) - 1)
        floor = max(3, -(-answer_len // 5)) + 2  # ceil(0.2 * len) plus slack
        shortest = min(range(len(planted_lines)), key=lambda i: lengths[i])
        if lengths[shortest] >= floor:
            return
        planted_lines[shortest].extend(pool.take(1))


def _plan_question(
    params: SynthParams,
    rng: random.Random,
    pool: _Pool,
    question_id: str,
) -> _QuestionPlan:
    roll = rng.random()
    if roll < params.multiblock_fraction:
        kind = "two_block"
    elif roll < params.multiblock_fraction + params.multiline_fraction:
        kind = "multi_line"
    else:
        kind = "single_line"

    # Plant full lines only: an answer is the concatenation of its lines,
    # so every planted line is a pure subset of the answer's tokens and
    # scores highly on the token-set component even under mild noise.
    if kind == "two_block":
        planted_lines = [
            pool.take(_draw_planted(rng, params.words_per_line)),
            pool.take(_draw_planted(rng, params.words_per_line)),
        ]
        layout: list[tuple[int, int, int]] = [(1, 1, 0), (1, 1, 0)]  # (block lines, span, start)
    elif kind == "multi_line":
        span = 3 if rng.random() < 0.3 else 2
        planted_lines = [pool.take(_draw_planted(rng, params.words_per_line)) for _ in range(span)]
        n_lines = max(_draw(rng, params.lines_per_block), span)
        layout = [(n_lines, span, rng.randrange(n_lines - span + 1))]
    else:
        planted_lines = [pool.take(_draw_planted(rng, params.words_per_line))]
        n_lines = _draw(rng, params.lines_per_block)
        layout = [(n_lines, 1, rng.randrange(n_lines))]

    _pad_to_penalty_floor(planted_lines, pool)
    answer_tokens = [w for line in planted_lines for w in line]
    answer = " ".join(answer_tokens)

    blocks: list[_BlockSpec] = []
    consumed = 0
    for n_lines, span, start in layout:
        spec = _BlockSpec(lines=[])
        for i in range(n_lines):
            if start <= i < start + span:
                spec.lines.append(
                    _LineSpec(words=planted_lines[consumed], planted_for=question_id)
                )
                consumed += 1
            else:
                spec.lines.append(
                    _LineSpec(words=pool.take(_draw(rng, params.words_per_line)), planted_for=None)
                )
        blocks.append(spec)

    if rng.random() < params.distractor_fraction:
        # Near-miss lines: partial answer token sets diluted with fresh
        # tokens. Strengths are spread out so they fill successive ranks
        # below the true lines instead of clustering at one score.
        host = blocks[0]
        for _ in range(rng.randint(3, 6)):
            frac = rng.uniform(0.3, 0.6)
            chunk_len = max(2, round(frac * len(answer_tokens)))
            chunk_len = min(chunk_len, max(1, params.words_per_line[1] - 1), len(answer_tokens))
            offset = rng.randrange(len(answer_tokens) - chunk_len + 1)
            tokens = answer_tokens[offset : offset + chunk_len] + pool.take(rng.randint(1, 2))
            rng.shuffle(tokens)
            host.lines.append(_LineSpec(words=tokens, planted_for=None))

    return _QuestionPlan(
        question_id=question_id,
        answer_tokens=answer_tokens,
        answer=answer,
        question=QUESTION_TEMPLATE.format(
            t0=answer_tokens[0], t1=answer_tokens[1] if len(answer_tokens) > 1 else answer_tokens[0]
        ),
        block_specs=blocks,
    )


def _apply_noise(word: str, rate: float, rng: random.Random) -> str:
    if rate <= 0.0:
        return word
    chars = list(word)
    for i in range(len(chars)):
        if rng.random() < rate:
            chars[i] = rng.choice(NOISE_ALPHABET)
    return "".join(chars)


def build_document(params: SynthParams, doc_index: int, vocab: list[str]) -> tuple[Document, list[GroundTruth]]:
    """One deterministic document plus the ground truth of its questions."""
    doc_id = f"doc{doc_index:04d}"
    rng = random.Random(f"{params.seed}:{doc_index}:plan")
    noise_rng = random.Random(f"{params.seed}:{doc_index}:noise")
    pool = _Pool(vocab, random.Random(f"{params.seed}:{doc_index}:pool"))

    plans = [
        _plan_question(params, rng, pool, f"{doc_id}-q{k}")
        for k in range(params.questions_per_doc)
    ]

    block_specs: list[_BlockSpec] = [spec for plan in plans for spec in plan.block_specs]
    target_blocks = max(_draw(rng, params.blocks_per_doc), len(block_specs))
    while len(block_specs) < target_blocks:
        filler = _BlockSpec(lines=[])
        for _ in range(_draw(rng, params.lines_per_block)):
            filler.lines.append(_LineSpec(words=pool.take(_draw(rng, params.words_per_line)), planted_for=None))
        block_specs.append(filler)
    rng.shuffle(block_specs)

    # Geometry pass: single column, exact union boxes bottom-up.
    blocks: list[Block] = []
    planted_line_boxes: dict[str, list[BBox]] = {plan.question_id: [] for plan in plans}
    planted_word_boxes: dict[str, list[BBox]] = {plan.question_id: [] for plan in plans}
    planted_block_ids: dict[str, list[str]] = {plan.question_id: [] for plan in plans}
    block_boxes: dict[str, BBox] = {}

    y = MARGIN_Y
    for b_idx, spec in enumerate(block_specs):
        block_id = f"{doc_id}-b{b_idx:02d}"
        lines: list[Line] = []
        owners: set[str] = set()
        for l_idx, line_spec in enumerate(spec.lines):
            line_id = f"{block_id}-l{l_idx:02d}"
            words: list[Word] = []
            x = MARGIN_X
            for w_idx, token in enumerate(line_spec.words):
                noisy = _apply_noise(token, params.ocr_noise_rate, noise_rng)
                box = BBox(x, y, x + len(token) * CHAR_WIDTH, y + WORD_HEIGHT)
                words.append(Word(id=f"{line_id}-w{w_idx:02d}", bbox=box, text=noisy))
                x = box.x1 + WORD_GAP
            if x - WORD_GAP > params.page_width - MARGIN_X:
                raise GenerationError(f"line {line_id} overflows the page width")
            line_box = union_bbox([w.bbox for w in words])
            line = Line(
                id=line_id,
                bbox=line_box,
                text=" ".join(w.text for w in words),
                words=tuple(words),
            )
            lines.append(line)
            if line_spec.planted_for is not None:
                planted_line_boxes[line_spec.planted_for].append(line_box)
                planted_word_boxes[line_spec.planted_for].extend(w.bbox for w in words)
                owners.add(line_spec.planted_for)
            y += WORD_HEIGHT + LINE_GAP
        block_box = union_bbox([ln.bbox for ln in lines])
        blocks.append(
            Block(
                id=block_id,
                bbox=block_box,
                text=" ".join(ln.text for ln in lines),
                lines=tuple(lines),
            )
        )
        block_boxes[block_id] = block_box
        for owner in owners:
            planted_block_ids[owner].append(block_id)
        y += BLOCK_GAP - LINE_GAP

    if y - BLOCK_GAP > params.page_height - MARGIN_Y:
        raise GenerationError(f"document {doc_id} overflows the page height")

    doc = Document(
        doc_id=doc_id,
        page_width=params.page_width,
        page_height=params.page_height,
        image_path=None,
        blocks=tuple(blocks),
    )

    gts: list[GroundTruth] = []
    for plan in plans:
        gt_blocks = [block_boxes[bid] for bid in planted_block_ids[plan.question_id]]
        gts.append(
            GroundTruth(
                question_id=plan.question_id,
                doc_id=doc_id,
                question=plan.question,
                answer=plan.answer,
                gt_blocks=tuple(gt_blocks),
                gt_lines=tuple(planted_line_boxes[plan.question_id]),
                gt_words=tuple(planted_word_boxes[plan.question_id]),
                gt_points=tuple(centroid(b) for b in gt_blocks),
            )
        )
    return doc, gts


def build_corpus(params: SynthParams) -> tuple[list[Document], list[GroundTruth]]:
    vocab = load_vocabulary()
    docs: list[Document] = []
    gts: list[GroundTruth] = []
    for i in range(params.n_docs):
        doc, doc_gts = build_document(params, i, vocab)
        docs.append(doc)
        gts.extend(doc_gts)
    return docs, gts


def generate_synthetic_corpus(params: SynthParams, out_dir: str) -> tuple[list[str], str]:
    """Write one canonical layout file per document, a gt file and a manifest.

    Returns the layout file paths and the gt file path.
    """
    docs, gts = build_corpus(params)
    docs_dir = os.path.join(out_dir, "docs")
    layout_paths = []
    entries = []
    for doc in docs:
        path = os.path.join(docs_dir, f"{doc.doc_id}.json")
        atomic_write_text(path, serialize_layout(doc))
        layout_paths.append(path)
        entries.append({"doc_id": doc.doc_id, "file": f"docs/{doc.doc_id}.json"})
    gt_path = os.path.join(out_dir, "gt.json")
    atomic_write_text(gt_path, dumps_canonical([gt_to_record(gt) for gt in gts]))
    manifest = {
        "generator": "docground-synth",
        "seed": params.seed,
        "params": params.to_dict(),
        "documents": entries,
        "gt_file": "gt.json",
    }
    atomic_write_text(os.path.join(out_dir, "manifest.json"), dumps_canonical(manifest))
    return layout_paths, gt_path
