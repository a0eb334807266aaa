from __future__ import annotations

import re

from docground.geometry import BBox, Pt
from docground.granularity import GroundingResult, ground
from docground.matching import MatchConfig, RegionMatch, ScoreBreakdown
from docground.overlay import OverlayStyle, render_overlay

from .conftest import read_fixture


def region(rid, granularity, bbox, rank=1):
    bd = ScoreBreakdown(1.0, 1.0, 1.0, False, False, 1.0)
    return RegionMatch(rid, granularity, bbox, "", bd, rank)


def result_with(blocks=(), lines=(), words=(), points=()):
    return GroundingResult(
        question_id="q0",
        doc_id="doc-small",
        answer="a",
        block_regions=tuple(blocks),
        line_regions=tuple(lines),
        word_regions=tuple(words),
        points=tuple(points),
        config=MatchConfig(),
    )


def count_regions(svg: str) -> int:
    return len(re.findall(r'class="region-', svg))


class TestRenderOverlay:
    def test_region_element_count(self, doc_small):
        result = result_with(
            blocks=[region("b", "block", BBox(10, 10, 100, 60))],
            lines=[region("l", "line", BBox(12, 12, 98, 30))],
            words=[
                region("w1", "word", BBox(12, 12, 40, 30)),
                region("w2", "word", BBox(44, 12, 70, 30), rank=2),
            ],
            points=[Pt(55, 35)],
        )
        svg = render_overlay(doc_small, result)
        assert count_regions(svg) == 5
        assert svg.count('class="region-block"') == 1
        assert svg.count('class="region-line"') == 1
        assert svg.count('class="region-word"') == 2
        assert svg.count('class="region-point"') == 1

    def test_empty_result_page_frame_only(self, doc_small):
        svg = render_overlay(doc_small, result_with())
        assert count_regions(svg) == 0
        assert svg.count('class="page-frame"') == 1
        assert svg.startswith("<?xml")
        assert svg.rstrip().endswith("</svg>")

    def test_svg_sized_to_page(self, doc_small):
        svg = render_overlay(doc_small, result_with())
        assert 'width="1000" height="1400"' in svg

    def test_image_background_when_present(self, doc_small):
        from docground.layout import Document

        with_image = Document(
            doc_id=doc_small.doc_id,
            page_width=doc_small.page_width,
            page_height=doc_small.page_height,
            image_path="scans/page1.png",
            blocks=doc_small.blocks,
        )
        svg = render_overlay(with_image, result_with())
        assert '<image href="scans/page1.png"' in svg
        assert "<image" not in render_overlay(doc_small, result_with())
        plain = render_overlay(with_image, result_with(), OverlayStyle(include_image=False))
        assert "<image" not in plain

    def test_deterministic(self, doc_small):
        result = result_with(points=[Pt(10, 10)])
        assert render_overlay(doc_small, result) == render_overlay(doc_small, result)

    def test_golden_file(self, doc_small, default_cfg):
        result = ground(
            "shri t p singh stands transferred",
            "where has shri t p singh been transferred",
            doc_small,
            default_cfg,
            question_id="doc-small-q0",
        )
        assert render_overlay(doc_small, result) == read_fixture("golden_overlay.svg")
