"""Ground an answer at block, line, word and point granularity.

Run from the repository root:  python demos/03_grounding_pipeline.py
Writes demos/out/overlay.svg with the grounded regions drawn on the page.
"""

import os

from docground import MatchConfig, ground, parse_layout, render_overlay
from docground.jsonio import atomic_write_text

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(os.path.dirname(HERE), "fixtures")

with open(os.path.join(FIXTURES, "doc_small.json"), encoding="utf-8") as fh:
    doc = parse_layout(fh.read())

question = "where has shri t p singh been transferred"
answer = "shri t p singh stands transferred"

result = ground(answer, question, doc, MatchConfig(), question_id="demo-q0")

print(f"question: {question}")
print(f"answer:   {answer}\n")

for match in result.block_regions:
    s = match.score
    print(f"block {match.region_id}  combined={s.combined:.3f} "
          f"(fuzzy={s.fuzzy:.3f} length={s.length_factor:.3f} answer={s.answer_match:.3f})")
for match in result.line_regions:
    print(f"line  {match.region_id}  combined={match.score.combined:.3f}  | {match.text}")
print("words:", " ".join(m.text for m in result.word_regions))
print("point:", [(p.x, p.y) for p in result.points])

out = os.path.join(HERE, "out", "overlay.svg")
atomic_write_text(out, render_overlay(doc, result))
print(f"\noverlay written to {out}")
