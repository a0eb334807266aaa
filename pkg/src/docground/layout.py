"""Hierarchical OCR layout model: blocks contain lines contain words.

The interchange format is one JSON document per file:

    { "doc_id": str, "page_width": num, "page_height": num,
      "image_path": str|null,
      "blocks": [ { "id": str, "bbox": [x0,y0,x1,y1], "text": str,
        "lines": [ { "id": str, "bbox": [...], "text": str,
          "words": [ { "id": str, "bbox": [...], "text": str } ] } ] } ] }

Serialization is canonical (see :mod:`docground.jsonio`), so
``parse_layout`` followed by ``serialize_layout`` reproduces a canonical
file byte for byte.

Containment of children in parent boxes is checked with a slack of
``CONTAINMENT_SLACK`` pixels per side because OCR boxes jitter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterator

from .geometry import BBox
from .jsonio import dumps_canonical

CONTAINMENT_SLACK = 2.0


class LayoutParseError(ValueError):
    """Malformed layout file (bad syntax or schema)."""


class LayoutValidationError(ValueError):
    """A document violated a structural invariant."""


@dataclass(frozen=True)
class Word:
    id: str
    bbox: BBox
    text: str


@dataclass(frozen=True)
class Line:
    id: str
    bbox: BBox
    text: str
    words: tuple[Word, ...]


@dataclass(frozen=True)
class Block:
    id: str
    bbox: BBox
    text: str
    lines: tuple[Line, ...]


@dataclass(frozen=True)
class Document:
    doc_id: str
    page_width: float
    page_height: float
    image_path: str | None
    blocks: tuple[Block, ...]

    @property
    def page_area(self) -> float:
        return self.page_width * self.page_height

    def iter_lines(self) -> Iterator[tuple[Block, Line]]:
        for block in self.blocks:
            for line in block.lines:
                yield block, line

    def iter_words(self) -> Iterator[tuple[Block, Line, Word]]:
        for block, line in self.iter_lines():
            for word in line.words:
                yield block, line, word

    def line_parent(self, line_id: str) -> str | None:
        """Block id owning the given line id, or None."""
        for block, line in self.iter_lines():
            if line.id == line_id:
                return block.id
        return None


@dataclass(frozen=True)
class Violation:
    """One broken invariant: the offending id, the rule, and the measured value."""
    item_id: str
    rule: str
    value: str

    def as_dict(self) -> dict[str, str]:
        return {"id": self.item_id, "rule": self.rule, "value": self.value}


def _require(obj: dict, key: str, context: str) -> Any:
    if key not in obj:
        raise LayoutParseError(f"missing key '{key}' in {context}")
    return obj[key]


def _parse_bbox(raw: Any, context: str) -> BBox:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise LayoutParseError(f"bbox of {context} must be [x0,y0,x1,y1]")
    try:
        return BBox.from_list([float(v) for v in raw])
    except (TypeError, ValueError) as exc:
        raise LayoutParseError(f"bbox of {context} has non-numeric entries: {exc}") from exc


def parse_layout(raw: str, validate: bool = True) -> Document:
    """Parse the interchange format into a Document.

    With ``validate=True`` (the default) any invariant violation raises
    :class:`LayoutValidationError` naming the offending id; pass
    ``validate=False`` to load a broken file for inspection with
    :func:`validate_document`.
    """
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise LayoutParseError(
            f"malformed layout JSON at line {exc.lineno} column {exc.colno} (char {exc.pos}): {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise LayoutParseError("layout file must contain a JSON object")

    doc_id = str(_require(data, "doc_id", "document"))
    page_width = float(_require(data, "page_width", doc_id))
    page_height = float(_require(data, "page_height", doc_id))
    image_path = data.get("image_path")
    if image_path is not None:
        image_path = str(image_path)

    blocks = []
    for braw in _require(data, "blocks", doc_id):
        bid = str(_require(braw, "id", "block"))
        lines = []
        for lraw in braw.get("lines", []):
            lid = str(_require(lraw, "id", f"line of {bid}"))
            words = []
            for wraw in lraw.get("words", []):
                wid = str(_require(wraw, "id", f"word of {lid}"))
                words.append(
                    Word(
                        id=wid,
                        bbox=_parse_bbox(_require(wraw, "bbox", wid), wid),
                        text=str(_require(wraw, "text", wid)),
                    )
                )
            lines.append(
                Line(
                    id=lid,
                    bbox=_parse_bbox(_require(lraw, "bbox", lid), lid),
                    text=str(_require(lraw, "text", lid)),
                    words=tuple(words),
                )
            )
        blocks.append(
            Block(
                id=bid,
                bbox=_parse_bbox(_require(braw, "bbox", bid), bid),
                text=str(_require(braw, "text", bid)),
                lines=tuple(lines),
            )
        )

    doc = Document(
        doc_id=doc_id,
        page_width=page_width,
        page_height=page_height,
        image_path=image_path,
        blocks=tuple(blocks),
    )
    if validate:
        violations = validate_document(doc)
        if violations:
            v = violations[0]
            raise LayoutValidationError(
                f"invalid layout '{doc_id}': {v.rule} at '{v.item_id}' ({v.value})"
                + (f"; {len(violations) - 1} further violation(s)" if len(violations) > 1 else "")
            )
    return doc


def serialize_layout(doc: Document) -> str:
    """Canonical serialization of a Document (see module docstring)."""
    payload = {
        "doc_id": doc.doc_id,
        "page_width": doc.page_width,
        "page_height": doc.page_height,
        "image_path": doc.image_path,
        "blocks": [
            {
                "id": block.id,
                "bbox": block.bbox.as_list(),
                "text": block.text,
                "lines": [
                    {
                        "id": line.id,
                        "bbox": line.bbox.as_list(),
                        "text": line.text,
                        "words": [
                            {"id": word.id, "bbox": word.bbox.as_list(), "text": word.text}
                            for word in line.words
                        ],
                    }
                    for line in block.lines
                ],
            }
            for block in doc.blocks
        ],
    }
    return dumps_canonical(payload)


def _contained(inner: BBox, outer: BBox, slack: float) -> bool:
    return (
        inner.x0 >= outer.x0 - slack
        and inner.y0 >= outer.y0 - slack
        and inner.x1 <= outer.x1 + slack
        and inner.y1 <= outer.y1 + slack
    )


def validate_document(doc: Document, slack: float = CONTAINMENT_SLACK) -> list[Violation]:
    """Check every structural invariant; violations are data, not errors."""
    violations: list[Violation] = []
    seen_ids: set[str] = set()
    page = BBox(0.0, 0.0, doc.page_width, doc.page_height)

    def check_id(item_id: str) -> None:
        if item_id in seen_ids:
            violations.append(Violation(item_id, "unique-id", "duplicate"))
        seen_ids.add(item_id)

    def check_bbox(item_id: str, box: BBox) -> bool:
        if not box.is_valid():
            violations.append(
                Violation(item_id, "valid-bbox", f"[{box.x0},{box.y0},{box.x1},{box.y1}]")
            )
            return False
        if not _contained(box, page, slack):
            violations.append(
                Violation(item_id, "within-page", f"page {doc.page_width}x{doc.page_height}")
            )
        return True

    def check_text(item_id: str, text: str) -> None:
        if not text.strip():
            violations.append(Violation(item_id, "non-empty-text", repr(text)))

    if doc.page_width <= 0 or doc.page_height <= 0:
        violations.append(
            Violation(doc.doc_id, "positive-page", f"{doc.page_width}x{doc.page_height}")
        )

    prev_block_key = None
    for block in doc.blocks:
        check_id(block.id)
        block_ok = check_bbox(block.id, block.bbox)
        check_text(block.id, block.text)
        key = (block.bbox.y0, block.bbox.x0)
        if prev_block_key is not None and key < prev_block_key:
            violations.append(Violation(block.id, "block-reading-order", f"y0={block.bbox.y0}, x0={block.bbox.x0}"))
        prev_block_key = key

        prev_line_y = None
        for line in block.lines:
            check_id(line.id)
            line_ok = check_bbox(line.id, line.bbox)
            check_text(line.id, line.text)
            if block_ok and line_ok and not _contained(line.bbox, block.bbox, slack):
                violations.append(Violation(line.id, "line-in-block", f"slack {slack}"))
            if prev_line_y is not None and line.bbox.y0 < prev_line_y:
                violations.append(Violation(line.id, "line-reading-order", f"y0={line.bbox.y0}"))
            prev_line_y = line.bbox.y0

            prev_word_x = None
            for word in line.words:
                check_id(word.id)
                word_ok = check_bbox(word.id, word.bbox)
                check_text(word.id, word.text)
                if line_ok and word_ok and not _contained(word.bbox, line.bbox, slack):
                    violations.append(Violation(word.id, "word-in-line", f"slack {slack}"))
                if prev_word_x is not None and word.bbox.x0 < prev_word_x:
                    violations.append(Violation(word.id, "word-reading-order", f"x0={word.bbox.x0}"))
                prev_word_x = word.bbox.x0

    return violations
