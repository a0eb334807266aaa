#!/usr/bin/env python3
"""Regenerate the committed test fixtures.

Fixtures are deterministic (fixed geometry constants, no RNG), so
re-running this script must reproduce the committed files byte for byte.
"""

from __future__ import annotations

import os
import sys

from docground import BBox, Block, Document, Line, MatchConfig, Word, ground, render_overlay
from docground.geometry import union_bbox
from docground.jsonio import atomic_write_text, dumps_canonical
from docground.layout import serialize_layout, validate_document

CHAR_W = 10.0
WORD_GAP = 14.0
WORD_H = 20.0
LINE_GAP = 8.0
BLOCK_GAP = 30.0
MARGIN_X = 80.0
MARGIN_Y = 90.0


def build_doc(doc_id: str, page: tuple[float, float], block_lines: list[list[str]]) -> Document:
    blocks = []
    y = MARGIN_Y
    for b_idx, lines_text in enumerate(block_lines):
        block_id = f"{doc_id}-b{b_idx}"
        lines = []
        for l_idx, text in enumerate(lines_text):
            line_id = f"{block_id}-l{l_idx}"
            words = []
            x = MARGIN_X
            for w_idx, token in enumerate(text.split()):
                box = BBox(x, y, x + len(token) * CHAR_W, y + WORD_H)
                words.append(Word(id=f"{line_id}-w{w_idx}", bbox=box, text=token))
                x = box.x1 + WORD_GAP
            line_box = union_bbox([w.bbox for w in words])
            lines.append(Line(id=line_id, bbox=line_box, text=" ".join(w.text for w in words), words=tuple(words)))
            y += WORD_H + LINE_GAP
        block_box = union_bbox([ln.bbox for ln in lines])
        blocks.append(Block(id=block_id, bbox=block_box, text=" ".join(ln.text for ln in lines), lines=tuple(lines)))
        y += BLOCK_GAP - LINE_GAP
    return Document(doc_id=doc_id, page_width=page[0], page_height=page[1], image_path=None, blocks=tuple(blocks))


# 3 blocks, 7 lines, 41 words.
DOC_SMALL = [
    [
        "office of the chief registrar",
        "central records department new delhi branch",
    ],
    [
        "circular no 247 of 2024 dated",
        "all staff members are hereby informed",
        "shri t p singh stands transferred",
    ],
    [
        "the transfer takes effect from 31 march",
        "2024 until further orders herein",
    ],
]

# An answer split across the first and last block; the middle one is unrelated.
DOC_MULTIBLOCK = [
    ["quarterly budget allocation review"],
    ["unrelated filler content paragraph"],
    ["approved by the finance committee"],
]

QA_SMALL = [
    {
        "question_id": "doc-small-q0",
        "doc_id": "doc-small",
        "question": "where has shri t p singh been transferred",
        "answer": "shri t p singh stands transferred",
    },
    {
        "question_id": "doc-small-q1",
        "doc_id": "doc-small",
        "question": "what is the circular number",
        "answer": "circular no 247 of 2024",
    },
]


def main() -> int:
    out_dir = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")

    doc_small = build_doc("doc-small", (1000.0, 1400.0), DOC_SMALL)
    assert not validate_document(doc_small)
    counts = (
        len(doc_small.blocks),
        sum(len(b.lines) for b in doc_small.blocks),
        sum(len(l.words) for _, l in doc_small.iter_lines()),
    )
    assert counts == (3, 7, 41), counts
    atomic_write_text(os.path.join(out_dir, "doc_small.json"), serialize_layout(doc_small))

    doc_multi = build_doc("doc-multiblock", (1000.0, 1400.0), DOC_MULTIBLOCK)
    assert not validate_document(doc_multi)
    atomic_write_text(os.path.join(out_dir, "doc_multiblock.json"), serialize_layout(doc_multi))

    atomic_write_text(os.path.join(out_dir, "qa_small.json"), dumps_canonical(QA_SMALL))

    result = ground(
        QA_SMALL[0]["answer"], QA_SMALL[0]["question"], doc_small, MatchConfig(),
        question_id=QA_SMALL[0]["question_id"],
    )
    assert len(result.block_regions) == 1 and len(result.line_regions) == 1
    assert len(result.word_regions) == 6 and len(result.points) == 1
    atomic_write_text(os.path.join(out_dir, "golden_overlay.svg"), render_overlay(doc_small, result))

    print(f"fixtures written to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
