from __future__ import annotations

import random

import pytest

from docground.geometry import BBox, contains_point
from docground.granularity import (
    GroundingPlan,
    derive_points,
    ground,
    ground_words,
    longest_contiguous_run,
    match_words,
    refine_lines,
)
from docground.layout import Line, Word
from docground.matching import MatchConfig, MatchInputError, RegionMatch, match_blocks
from docground.synthetic import SynthParams, build_corpus
from docground.textnorm import normalize

from .oracles import best_run_ref


def make_line(line_id: str, tokens: list[str], y: float = 50.0) -> Line:
    words = []
    x = 10.0
    for i, tok in enumerate(tokens):
        box = BBox(x, y, x + 8.0 * len(tok), y + 12.0)
        words.append(Word(id=f"{line_id}-w{i}", bbox=box, text=tok))
        x = box.x1 + 6.0
    return Line(
        id=line_id,
        bbox=BBox(words[0].bbox.x0, y, words[-1].bbox.x1, y + 12.0),
        text=" ".join(tokens),
        words=tuple(words),
    )


class TestMatchWords:
    def test_exact_matches(self, default_cfg):
        line = make_line("l", ["transferred", "to", "new", "delhi"])
        assert match_words(["new", "delhi"], line, default_cfg) == [2, 3]

    def test_edit_tolerance_for_long_tokens(self, default_cfg):
        line = make_line("l", ["moved", "to", "delhl"])
        assert match_words(["delhi"], line, default_cfg) == [2]

    def test_short_tokens_need_exact_match(self, default_cfg):
        line = make_line("l", ["cat", "cot"])
        assert match_words(["cot"], line, default_cfg) == [1]

    def test_no_matches(self, default_cfg):
        line = make_line("l", ["alpha", "beta"])
        assert match_words(["gamma"], line, default_cfg) == []

    def test_word_normalization_applies(self, default_cfg):
        line = make_line("l", ["Delhi,", "Branch."])
        assert match_words(["delhi", "branch"], line, default_cfg) == [0, 1]


class TestLongestContiguousRun:
    def test_contiguous(self, default_cfg):
        line = make_line("l", ["a1", "b2", "new", "delhi", "area", "x9"])
        run = longest_contiguous_run([2, 3, 4], line, normalize("new delhi area"), default_cfg)
        assert (run.start_idx, run.end_idx, run.matched_count, run.gap_count) == (2, 4, 3, 0)

    def test_single_gap_absorbed(self, default_cfg):
        line = make_line("l", ["w0", "new", "qq", "delhi", "area", "w5"])
        run = longest_contiguous_run([1, 3, 4], line, normalize("new delhi area"), default_cfg)
        assert (run.start_idx, run.end_idx, run.matched_count, run.gap_count) == (1, 4, 3, 1)

    def test_wide_gap_splits_run(self, default_cfg):
        line = make_line("l", ["new", "a", "b", "c", "d", "delhi"])
        run = longest_contiguous_run([0, 5], line, normalize("delhi"), default_cfg)
        assert run.matched_count == 1
        assert run.start_idx == run.end_idx == 5  # tie broken by similarity to the answer

    def test_empty_matched_gives_none(self, default_cfg):
        line = make_line("l", ["a", "b"])
        assert longest_contiguous_run([], line, normalize("x"), default_cfg) is None

    def test_bbox_is_union_of_member_words(self, default_cfg):
        line = make_line("l", ["new", "qq", "delhi"])
        run = longest_contiguous_run([0, 2], line, normalize("new delhi"), default_cfg)
        assert run.bbox == BBox(line.words[0].bbox.x0, line.words[0].bbox.y0,
                                line.words[2].bbox.x1, line.words[2].bbox.y1)

    def test_matches_exhaustive_search_randomized(self, default_cfg):
        rng = random.Random(31)
        vocab = ["alpha", "beta", "gamma", "delta", "echo", "fox", "golf", "hotel"]
        for _ in range(200):
            n = rng.randint(1, 20)
            tokens = [rng.choice(vocab) for _ in range(n)]
            line = make_line("l", tokens)
            answer = normalize(" ".join(rng.sample(vocab, rng.randint(1, 4))))
            matched = match_words(list(answer.tokens), line, default_cfg)
            run = longest_contiguous_run(matched, line, answer, default_cfg)
            ref = best_run_ref(matched, [normalize(w.text).normalized for w in line.words],
                               answer.normalized, default_cfg.word_gap_tolerance)
            if ref is None:
                assert run is None
            else:
                assert (run.start_idx, run.end_idx, run.matched_count, run.gap_count) == ref


class TestRefineLines:
    def test_exact_line_selected(self, doc_small, default_cfg):
        answer = "shri t p singh stands transferred"
        question = "where has shri t p singh been transferred"
        blocks = match_blocks(answer, question, doc_small, default_cfg)
        lines = refine_lines(answer, question, blocks, doc_small, default_cfg.with_overrides(max_lines=1))
        assert [m.region_id for m in lines] == ["doc-small-b1-l2"]
        assert lines[0].score.combined == pytest.approx(1.0)

    def test_spanning_answer_selects_both_lines(self, doc_small, default_cfg):
        answer = "all staff members are hereby informed shri t p singh stands transferred"
        question = "what are staff informed about"
        blocks = match_blocks(answer, question, doc_small, default_cfg)
        lines = refine_lines(answer, question, blocks, doc_small, default_cfg)
        ids = {m.region_id for m in lines}
        assert {"doc-small-b1-l1", "doc-small-b1-l2"} <= ids
        assert all(m.score.combined >= default_cfg.threshold for m in lines)

    def test_prefix_property(self, doc_small, default_cfg):
        answer = "all staff members are hereby informed shri t p singh stands transferred"
        question = "q"
        blocks = match_blocks(answer, question, doc_small, default_cfg)
        at1 = refine_lines(answer, question, blocks, doc_small, default_cfg.with_overrides(max_lines=1))
        at3 = refine_lines(answer, question, blocks, doc_small, default_cfg.with_overrides(max_lines=3))
        assert [m.region_id for m in at1] == [m.region_id for m in at3][: len(at1)]


class TestGroundWords:
    def test_two_word_answer(self, doc_small, default_cfg):
        answer = "new delhi"
        question = "which branch"
        # force the containing block/line through with a permissive threshold
        cfg = default_cfg.with_overrides(threshold=0.3)
        result = ground(answer, question, doc_small, cfg)
        word_ids = [m.region_id for m in result.word_regions]
        assert word_ids == ["doc-small-b0-l1-w3", "doc-small-b0-l1-w4"]

    def test_no_tokens_no_regions(self, doc_small, default_cfg):
        blocks = match_blocks("shri t p singh stands transferred", "q", doc_small, default_cfg)
        lines = refine_lines("shri t p singh stands transferred", "q", blocks, doc_small, default_cfg)
        assert ground_words("zz qq", lines, doc_small, default_cfg) == []


class TestDerivePoints:
    def test_centroids_in_rank_order(self):
        from docground.matching import ScoreBreakdown

        bd = ScoreBreakdown(1, 1, 1, False, False, 1)
        regions = [
            RegionMatch("a", "block", BBox(0, 0, 10, 10), "", bd, 1),
            RegionMatch("b", "block", BBox(10, 10, 30, 30), "", bd, 2),
        ]
        pts = derive_points(regions)
        assert [(p.x, p.y) for p in pts] == [(5, 5), (20, 20)]
        for p, r in zip(pts, regions):
            assert contains_point(r.bbox, p)

    def test_empty(self):
        assert derive_points([]) == []


class TestGround:
    def test_planted_single_line(self, doc_small, default_cfg):
        result = ground(
            "shri t p singh stands transferred",
            "where has shri t p singh been transferred",
            doc_small,
            default_cfg,
            question_id="q0",
        )
        assert len(result.block_regions) == 1
        assert len(result.line_regions) == 1
        assert len(result.word_regions) == 6
        assert len(result.points) == 1
        assert result.question_id == "q0"

    def test_absent_answer_empty_everywhere(self, doc_small, default_cfg):
        result = ground("nonexistent phrase entirely", "unrelated", doc_small, default_cfg)
        assert result.block_regions == () and result.line_regions == ()
        assert result.word_regions == () and result.points == ()

    def test_multiblock_answer(self, doc_multiblock, default_cfg):
        answer = "quarterly budget allocation review approved by the finance committee"
        result = ground(answer, "what was reviewed", doc_multiblock, default_cfg)
        assert len(result.block_regions) == 2
        assert len(result.line_regions) == 2
        assert len(result.points) == 2

    def test_points_track_block_regions(self, doc_multiblock, default_cfg):
        answer = "quarterly budget allocation review approved by the finance committee"
        result = ground(answer, "q", doc_multiblock, default_cfg)
        assert len(result.points) == len(result.block_regions)
        for p, m in zip(result.points, result.block_regions):
            assert contains_point(m.bbox, p)

    def test_empty_answer_propagates_error(self, doc_small, default_cfg):
        with pytest.raises(MatchInputError):
            ground("", "q", doc_small, default_cfg)

    def test_nesting_invariants_on_synthetic(self, default_cfg):
        docs, gts = build_corpus(SynthParams(seed=3, n_docs=6, ocr_noise_rate=0.02))
        by_id = {d.doc_id: d for d in docs}
        slack = 2.0
        for gt in gts:
            doc = by_id[gt.doc_id]
            result = ground(gt.answer, gt.question, doc, default_cfg)
            block_boxes = [m.bbox for m in result.block_regions]
            line_boxes = [m.bbox for m in result.line_regions]
            for lb in line_boxes:
                assert any(
                    lb.x0 >= bb.x0 - slack and lb.y0 >= bb.y0 - slack
                    and lb.x1 <= bb.x1 + slack and lb.y1 <= bb.y1 + slack
                    for bb in block_boxes
                )
            for wm in result.word_regions:
                wb = wm.bbox
                assert any(
                    wb.x0 >= lb.x0 - slack and wb.y0 >= lb.y0 - slack
                    and wb.x1 <= lb.x1 + slack and wb.y1 <= lb.y1 + slack
                    for lb in line_boxes
                )

    def test_rank_and_score_ordering(self, default_cfg):
        docs, gts = build_corpus(SynthParams(seed=8, n_docs=5, ocr_noise_rate=0.05, distractor_fraction=1.0))
        by_id = {d.doc_id: d for d in docs}
        for gt in gts:
            result = ground(gt.answer, gt.question, by_id[gt.doc_id], default_cfg.with_overrides(max_lines=10))
            for regions in (result.block_regions, result.line_regions):
                assert [m.rank for m in regions] == list(range(1, len(regions) + 1))
                scores = [m.score.combined for m in regions]
                assert scores == sorted(scores, reverse=True)

    def test_line_set_monotone_in_max_lines(self, default_cfg):
        docs, gts = build_corpus(SynthParams(seed=8, n_docs=5, ocr_noise_rate=0.05, distractor_fraction=1.0))
        by_id = {d.doc_id: d for d in docs}
        for gt in gts:
            plan = GroundingPlan(gt.answer, gt.question, by_id[gt.doc_id], default_cfg)
            previous: set[str] = set()
            for k in range(1, 11):
                result = plan.select(default_cfg.with_overrides(max_lines=k))
                current = {m.region_id for m in result.line_regions}
                assert previous <= current
                previous = current

    def test_deterministic_end_to_end(self, doc_small, default_cfg):
        args = ("shri t p singh stands transferred", "where", doc_small, default_cfg)
        assert ground(*args) == ground(*args)


class TestGroundingPlan:
    def test_select_equals_fresh_ground(self, default_cfg):
        docs, gts = build_corpus(SynthParams(seed=13, n_docs=4, ocr_noise_rate=0.05, distractor_fraction=0.5))
        by_id = {d.doc_id: d for d in docs}
        for gt in gts[:8]:
            plan = GroundingPlan(gt.answer, gt.question, by_id[gt.doc_id], default_cfg)
            for caps in ({"max_lines": 1}, {"max_lines": 4}, {"max_blocks": 1}, {"top_k": 1}):
                cfg = default_cfg.with_overrides(**caps)
                assert plan.select(cfg, gt.question_id) == ground(
                    gt.answer, gt.question, by_id[gt.doc_id], cfg, question_id=gt.question_id
                )

    def test_rejects_non_cap_changes(self, doc_small, default_cfg):
        plan = GroundingPlan("shri t p singh stands transferred", "q", doc_small, default_cfg)
        with pytest.raises(ValueError, match="caps"):
            plan.select(default_cfg.with_overrides(threshold=0.3))
