"""Sweep the line cap and watch the precision/recall trade-off.

Run from the repository root:  python demos/05_ablation_sweep.py

The corpus plants near-miss distractor lines next to the true answers,
so raising max_lines keeps improving recall while precision decays: the
classic aggregation trade-off, with the best F1 somewhere in the middle.
"""

import tempfile

from docground import AblationSpec, MatchConfig, SynthParams, generate_synthetic_corpus, run_ablation

params = SynthParams(
    seed=21,
    n_docs=40,
    ocr_noise_rate=0.05,
    distractor_fraction=0.5,
    multiline_fraction=0.5,
)

with tempfile.TemporaryDirectory() as td:
    _, gt_path = generate_synthetic_corpus(params, td)
    spec = AblationSpec(
        parameter="max_lines",
        values=tuple(range(1, 11)),
        granularity="line",
        config=MatchConfig(),
    )
    table = run_ablation(td, gt_path, spec)
    print(table.to_csv())
    best = table.rows[table.best_index]
    print(f"best F1 {best.f1:.2f} at max_lines={best.value} "
          f"(precision {best.precision:.2f}, recall {best.recall:.2f})")
