from __future__ import annotations

import pytest

from docground.ablation import (
    AblationError,
    AblationSpec,
    AblationTable,
    AblationRow,
    load_corpus,
    run_ablation,
)
from docground.matching import MatchConfig


class TestSpecValidation:
    def test_valid(self, default_cfg):
        AblationSpec(parameter="max_lines", values=(1, 2, 3), granularity="line", config=default_cfg)

    def test_unknown_parameter(self, default_cfg):
        with pytest.raises(AblationError, match="parameter"):
            AblationSpec(parameter="threshold", values=(1, 2), granularity="line", config=default_cfg)

    def test_non_ascending_values(self, default_cfg):
        with pytest.raises(AblationError, match="ascending"):
            AblationSpec(parameter="max_lines", values=(3, 2), granularity="line", config=default_cfg)

    def test_empty_values(self, default_cfg):
        with pytest.raises(AblationError, match="value"):
            AblationSpec(parameter="max_lines", values=(), granularity="line", config=default_cfg)

    def test_bad_granularity(self, default_cfg):
        with pytest.raises(AblationError, match="granularity"):
            AblationSpec(parameter="max_lines", values=(1,), granularity="paragraph", config=default_cfg)


class TestRunAblation:
    def test_max_lines_sweep_shape_and_monotone_recall(self, small_corpus, default_cfg):
        corpus_dir, gt_path = small_corpus
        spec = AblationSpec(parameter="max_lines", values=tuple(range(1, 6)), granularity="line", config=default_cfg)
        table = run_ablation(corpus_dir, gt_path, spec)
        assert len(table.rows) == 5
        recalls = [r.recall for r in table.rows]
        assert recalls == sorted(recalls)

    def test_max_blocks_sweep_five_rows(self, small_corpus, default_cfg):
        corpus_dir, gt_path = small_corpus
        spec = AblationSpec(parameter="max_blocks", values=tuple(range(1, 6)), granularity="block", config=default_cfg)
        table = run_ablation(corpus_dir, gt_path, spec)
        csv = table.to_csv().strip().split("\n")
        assert csv[0] == "value,precision,recall,f1,best"
        assert len(csv) == 6
        recalls = [r.recall for r in table.rows]
        assert recalls == sorted(recalls)

    def test_best_flag_marks_argmax_f1(self):
        table = AblationTable(
            parameter="max_lines",
            granularity="line",
            rows=(
                AblationRow(1, 90.0, 40.0, 55.0),
                AblationRow(2, 80.0, 70.0, 74.0),
                AblationRow(3, 70.0, 75.0, 72.0),
            ),
        )
        lines = table.to_csv().strip().split("\n")
        assert lines[2].endswith(",1")
        assert lines[1].endswith(",0") and lines[3].endswith(",0")

    def test_corpus_loading_via_manifest_and_plain_dir(self, small_corpus, tmp_path):
        import os
        import shutil

        corpus_dir, _ = small_corpus
        assert len(load_corpus(corpus_dir)) == 8
        # plain directory of layout files, no manifest
        plain = tmp_path / "plain"
        plain.mkdir()
        docs_dir = os.path.join(corpus_dir, "docs")
        for name in sorted(os.listdir(docs_dir)):
            shutil.copy(os.path.join(docs_dir, name), plain / name)
        assert len(load_corpus(str(plain))) == 8

    def test_missing_corpus_rejected(self, tmp_path, default_cfg):
        empty = tmp_path / "empty"
        empty.mkdir()
        with pytest.raises(AblationError, match="no layout files"):
            load_corpus(str(empty))

    def test_unknown_doc_in_gt(self, small_corpus, tmp_path, default_cfg):
        corpus_dir, gt_path = small_corpus
        import json

        with open(gt_path, encoding="utf-8") as fh:
            records = json.load(fh)
        records[0]["doc_id"] = "ghost"
        bad_gt = tmp_path / "gt.json"
        bad_gt.write_text(json.dumps(records))
        spec = AblationSpec(parameter="max_lines", values=(1,), granularity="line", config=default_cfg)
        with pytest.raises(AblationError, match="ghost"):
            run_ablation(corpus_dir, str(bad_gt), spec)
