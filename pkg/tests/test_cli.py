from __future__ import annotations

import json
import os
import shutil

import pytest

from docground.cli import main

from .conftest import FIXTURES


def read_bytes(path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


@pytest.fixture()
def layout_path():
    return os.path.join(FIXTURES, "doc_small.json")


@pytest.fixture()
def qa_path():
    return os.path.join(FIXTURES, "qa_small.json")


class TestGround:
    def test_single_question(self, tmp_path, layout_path, capsys):
        out = tmp_path / "pred.json"
        code = main([
            "ground", "--layout", layout_path,
            "--question", "where has shri t p singh been transferred",
            "--answer", "shri t p singh stands transferred",
            "--out", str(out),
        ])
        assert code == 0
        records = json.loads(out.read_text())
        assert len(records) == 1
        rec = records[0]
        assert rec["doc_id"] == "doc-small"
        assert len(rec["blocks"]) == 1 and len(rec["lines"]) == 1
        assert len(rec["words"]) == 6 and len(rec["points"]) == 1
        assert rec["config"]["max_lines"] == 5
        assert set(rec["blocks"][0]["score"]) == {"fuzzy", "length", "answer", "pen_short", "pen_ctx", "combined"}

    def test_stdout_when_no_out(self, layout_path, capsys):
        code = main([
            "ground", "--layout", layout_path,
            "--question", "q", "--answer", "shri t p singh stands transferred",
        ])
        assert code == 0
        records = json.loads(capsys.readouterr().out)
        assert len(records) == 1

    def test_batch_mode_against_file(self, tmp_path, layout_path, qa_path):
        out = tmp_path / "preds.json"
        assert main(["ground", "--layout", layout_path, "--questions", qa_path, "--out", str(out)]) == 0
        records = json.loads(out.read_text())
        assert [r["question_id"] for r in records] == ["doc-small-q0", "doc-small-q1"]

    def test_batch_mode_against_corpus_dir(self, tmp_path, small_corpus):
        corpus_dir, gt_path = small_corpus
        out = tmp_path / "preds.json"
        assert main(["ground", "--layout", corpus_dir + "/docs", "--questions", gt_path, "--out", str(out)]) == 0
        records = json.loads(out.read_text())
        assert len(records) == 24

    def test_jobs_parallel_identical_output(self, tmp_path, small_corpus):
        corpus_dir, gt_path = small_corpus
        seq = tmp_path / "seq.json"
        par = tmp_path / "par.json"
        assert main(["ground", "--layout", corpus_dir + "/docs", "--questions", gt_path,
                     "--jobs", "1", "--out", str(seq)]) == 0
        assert main(["ground", "--layout", corpus_dir + "/docs", "--questions", gt_path,
                     "--jobs", "4", "--out", str(par)]) == 0
        assert read_bytes(seq) == read_bytes(par)

    def test_missing_answer_is_input_error(self, layout_path):
        assert main(["ground", "--layout", layout_path, "--question", "q"]) == 1

    def test_empty_answer_is_input_error(self, layout_path):
        assert main(["ground", "--layout", layout_path, "--question", "q", "--answer", " . "]) == 1

    def test_flag_overrides_config_file(self, tmp_path, layout_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"max_lines": 2, "threshold": 0.7}))
        out = tmp_path / "pred.json"
        assert main(["ground", "--layout", layout_path,
                     "--question", "q", "--answer", "shri t p singh stands transferred",
                     "--config", str(cfg_file), "--max-lines", "4", "--out", str(out)]) == 0
        rec = json.loads(out.read_text())[0]
        assert rec["config"]["max_lines"] == 4       # flag wins
        assert rec["config"]["threshold"] == 0.7     # file preserved

    def test_stopword_env_override(self, tmp_path, layout_path, monkeypatch):
        words = tmp_path / "stop.txt"
        words.write_text("foo\nbar\n")
        monkeypatch.setenv("GROUND_STOPWORDS", str(words))
        out = tmp_path / "pred.json"
        assert main(["ground", "--layout", layout_path,
                     "--question", "q", "--answer", "shri t p singh stands transferred",
                     "--out", str(out)]) == 0
        rec = json.loads(out.read_text())[0]
        assert rec["config"]["stopword_list"] == ["bar", "foo"]


class TestEval:
    def test_report_csv_and_stdout_json(self, tmp_path, small_corpus, capsys):
        corpus_dir, gt_path = small_corpus
        preds = tmp_path / "preds.json"
        report = tmp_path / "report.csv"
        assert main(["ground", "--layout", corpus_dir + "/docs", "--questions", gt_path, "--out", str(preds)]) == 0
        capsys.readouterr()
        assert main(["eval", "--pred", str(preds), "--gt", gt_path, "--iou", "0.5", "--out", str(report)]) == 0
        lines = report.read_text().strip().split("\n")
        assert lines[0] == "granularity,precision,recall,f1,tp,n_pred,n_gt"
        assert len(lines) == 5
        payload = json.loads(capsys.readouterr().out)
        assert payload["iou_threshold"] == 0.5
        assert [row["granularity"] for row in payload["rows"]] == ["block", "line", "word", "point"]
        # clean corpus grounds perfectly
        assert all(row["f1"] == 100.0 for row in payload["rows"])

    def test_mismatched_files_fail(self, tmp_path, small_corpus):
        corpus_dir, gt_path = small_corpus
        preds = tmp_path / "preds.json"
        preds.write_text(json.dumps([{"question_id": "ghost", "doc_id": "d", "blocks": [], "lines": [], "words": [], "points": []}]))
        assert main(["eval", "--pred", str(preds), "--gt", gt_path]) == 1


class TestAblate:
    def test_sweep_csv(self, tmp_path, small_corpus):
        corpus_dir, gt_path = small_corpus
        out = tmp_path / "sweep.csv"
        assert main(["ablate", "--corpus", corpus_dir, "--gt", gt_path,
                     "--param", "max-lines", "--values", "1:5", "--out", str(out)]) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "value,precision,recall,f1,best"
        assert len(lines) == 6
        recalls = [float(row.split(",")[2]) for row in lines[1:]]
        assert recalls == sorted(recalls)

    def test_bad_values_spec(self, small_corpus):
        corpus_dir, gt_path = small_corpus
        assert main(["ablate", "--corpus", corpus_dir, "--gt", gt_path,
                     "--param", "max-lines", "--values", "5"]) == 1

    def test_unknown_param_rejected_by_argparse(self, small_corpus):
        corpus_dir, gt_path = small_corpus
        assert main(["ablate", "--corpus", corpus_dir, "--gt", gt_path,
                     "--param", "threshold", "--values", "1:3"]) == 1


class TestSynth:
    def test_generates_corpus(self, tmp_path):
        out = tmp_path / "corpus"
        assert main(["synth", "--out", str(out), "--seed", "9", "--n-docs", "2"]) == 0
        assert (out / "gt.json").exists()
        assert (out / "manifest.json").exists()
        assert len(list((out / "docs").iterdir())) == 2

    def test_rerun_byte_identical(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for target in (a, b):
            assert main(["synth", "--out", str(target), "--seed", "9", "--n-docs", "2", "--noise", "0.02"]) == 0
        for name in ("gt.json", "manifest.json", "docs/doc0000.json", "docs/doc0001.json"):
            assert read_bytes(a / name) == read_bytes(b / name), name


class TestRender:
    def test_render_single_record(self, tmp_path, layout_path):
        pred = tmp_path / "pred.json"
        svg = tmp_path / "overlay.svg"
        assert main(["ground", "--layout", layout_path,
                     "--question", "where has shri t p singh been transferred",
                     "--answer", "shri t p singh stands transferred",
                     "--question-id", "doc-small-q0",
                     "--out", str(pred)]) == 0
        assert main(["render", "--layout", layout_path, "--pred", str(pred), "--out", str(svg)]) == 0
        content = svg.read_text()
        assert content.startswith("<?xml")
        assert content == open(os.path.join(FIXTURES, "golden_overlay.svg"), encoding="utf-8").read()

    def test_multi_record_needs_question_id(self, tmp_path, layout_path, qa_path):
        pred = tmp_path / "pred.json"
        assert main(["ground", "--layout", layout_path, "--questions", qa_path, "--out", str(pred)]) == 0
        assert main(["render", "--layout", layout_path, "--pred", str(pred)]) == 1
        svg = tmp_path / "x.svg"
        assert main(["render", "--layout", layout_path, "--pred", str(pred),
                     "--question-id", "doc-small-q1", "--out", str(svg)]) == 0

    def test_granularity_filter(self, tmp_path, layout_path, capsys):
        pred = tmp_path / "pred.json"
        main(["ground", "--layout", layout_path, "--question", "q",
              "--answer", "shri t p singh stands transferred", "--out", str(pred)])
        assert main(["render", "--layout", layout_path, "--pred", str(pred), "--granularity", "word"]) == 0
        svg = capsys.readouterr().out
        assert svg.count('class="region-word"') == 6
        assert 'class="region-block"' not in svg


class TestValidate:
    def test_clean_layout_exits_zero(self, layout_path, capsys):
        assert main(["validate", "--layout", layout_path]) == 0
        assert json.loads(capsys.readouterr().out) == []

    def test_broken_layout_exits_one_with_violations(self, tmp_path, layout_path, capsys):
        data = json.loads(open(layout_path, encoding="utf-8").read())
        data["blocks"][0]["lines"][0]["words"][0]["bbox"] = [300, 90, 100, 110]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))
        assert main(["validate", "--layout", str(bad)]) == 1
        violations = json.loads(capsys.readouterr().out)
        assert any(v["rule"] == "valid-bbox" for v in violations)


class TestContract:
    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == 1

    def test_unknown_flag(self, layout_path):
        assert main(["validate", "--layout", layout_path, "--frob"]) == 1

    def test_missing_file_is_input_error(self):
        assert main(["validate", "--layout", "/nonexistent/file.json"]) == 1

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0

    def test_idempotent_reruns(self, tmp_path, layout_path):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        args = ["ground", "--layout", layout_path, "--question", "q",
                "--answer", "shri t p singh stands transferred"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert read_bytes(out1) == read_bytes(out2)

    def test_inputs_never_mutated(self, tmp_path, layout_path, qa_path):
        layout_copy = tmp_path / "layout.json"
        qa_copy = tmp_path / "qa.json"
        shutil.copy(layout_path, layout_copy)
        shutil.copy(qa_path, qa_copy)
        before = (read_bytes(layout_copy), read_bytes(qa_copy))
        main(["ground", "--layout", str(layout_copy), "--questions", str(qa_copy), "--out", str(tmp_path / "o.json")])
        assert (read_bytes(layout_copy), read_bytes(qa_copy)) == before
