"""Standalone SVG overlays of grounded regions on a document page.

Output is deterministic: fixed element order (page frame, image, blocks,
lines, words, points), canonical number formatting, no timestamps. Word
boxes are filled translucently so overlapping line/block strokes stay
visible; points are drawn as crosses.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

from .geometry import BBox, Pt
from .granularity import GroundingResult
from .jsonio import format_number
from .layout import Document


@dataclass(frozen=True)
class OverlayStyle:
    block_stroke: str = "#d62728"
    line_stroke: str = "#1f77b4"
    word_fill: str = "#2ca02c"
    word_fill_opacity: float = 0.35
    point_stroke: str = "#9467bd"
    stroke_width: float = 3.0
    point_size: float = 9.0
    include_image: bool = True


def _rect(box: BBox, attrs: str) -> str:
    return (
        f'<rect x="{format_number(box.x0)}" y="{format_number(box.y0)}" '
        f'width="{format_number(box.width)}" height="{format_number(box.height)}" {attrs}/>'
    )


def _cross(p: Pt, size: float, attrs: str) -> str:
    x0, x1 = format_number(p.x - size), format_number(p.x + size)
    y0, y1 = format_number(p.y - size), format_number(p.y + size)
    x, y = format_number(p.x), format_number(p.y)
    return f'<path d="M {x0} {y} H {x1} M {x} {y0} V {y1}" {attrs}/>'


def render_overlay(doc: Document, result: GroundingResult, style: OverlayStyle | None = None) -> str:
    """SVG document sized to the page with one element per grounded region."""
    style = style or OverlayStyle()
    w = format_number(doc.page_width)
    h = format_number(doc.page_height)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f"<title>{escape(doc.doc_id)} / {escape(result.question_id or 'question')}</title>",
        _rect(BBox(0.0, 0.0, doc.page_width, doc.page_height),
              'class="page-frame" fill="#ffffff" stroke="#444444" stroke-width="1"'),
    ]
    if style.include_image and doc.image_path:
        parts.append(
            f'<image href={quoteattr(doc.image_path)} x="0" y="0" width="{w}" height="{h}"/>'
        )
    sw = format_number(style.stroke_width)
    for match in result.block_regions:
        parts.append(_rect(match.bbox, f'class="region-block" fill="none" stroke="{style.block_stroke}" stroke-width="{sw}"'))
    for match in result.line_regions:
        parts.append(_rect(match.bbox, f'class="region-line" fill="none" stroke="{style.line_stroke}" stroke-width="{sw}"'))
    for match in result.word_regions:
        parts.append(
            _rect(
                match.bbox,
                f'class="region-word" fill="{style.word_fill}" '
                f'fill-opacity="{format_number(style.word_fill_opacity)}" stroke="none"',
            )
        )
    for point in result.points:
        parts.append(
            _cross(point, style.point_size, f'class="region-point" stroke="{style.point_stroke}" stroke-width="{sw}" fill="none"')
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
