"""Generate a planted-answer corpus, ground every question, evaluate.

Run from the repository root:  python demos/04_corpus_evaluation.py
"""

import tempfile

from docground import MatchConfig, SynthParams, evaluate_corpus, generate_synthetic_corpus
from docground.ablation import ground_corpus, load_corpus
from docground.records import loads_gt_records

# Forty documents, three questions each; answers are planted as full
# lines (sometimes spanning lines or blocks), boxes recorded as truth.
params = SynthParams(seed=7, n_docs=40, ocr_noise_rate=0.02)

with tempfile.TemporaryDirectory() as td:
    _, gt_path = generate_synthetic_corpus(params, td)
    docs = load_corpus(td)
    with open(gt_path, encoding="utf-8") as fh:
        gts = loads_gt_records(fh.read())

    print(f"{len(docs)} documents, {len(gts)} questions, noise {params.ocr_noise_rate}")

    cfg = MatchConfig()
    records = ground_corpus(docs, gts, cfg)
    report = evaluate_corpus(records, gts, cfg)

    print(f"\niou threshold {report.iou_threshold}, point mode {report.point_mode}\n")
    print(report.to_csv())

    # The same numbers, unrounded, are on the report object:
    line = report.row("line")
    print(f"line level: {line.tp} matched of {line.n_pred} predicted / {line.n_gt} annotated")
