"""Walk through the layout model: parsing, validation, geometry.

Run from the repository root:  python demos/01_layout_and_geometry.py
"""

import os

from docground import BBox, Pt, centroid, contains_point, iou, parse_layout, union_bbox, validate_document
from docground.layout import serialize_layout

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")

# A document is blocks > lines > words, every node carrying a box and text.
with open(os.path.join(FIXTURES, "doc_small.json"), encoding="utf-8") as fh:
    raw = fh.read()
doc = parse_layout(raw)

print(f"document {doc.doc_id}: page {doc.page_width:.0f}x{doc.page_height:.0f}")
for block in doc.blocks:
    print(f"  block {block.id}: {len(block.lines)} lines | {block.text[:50]}...")

# Validation reports violations as data instead of raising.
print("\nviolations in the fixture:", validate_document(doc))

# All geometry used by matching and evaluation lives in four functions.
a = BBox(0, 0, 10, 10)
b = BBox(5, 0, 15, 10)
print("\niou of half-overlapping boxes:", round(iou(a, b), 4))
print("union:", union_bbox([a, b]))
print("centroid of the union:", centroid(union_bbox([a, b])))
print("centroid inside the union:", contains_point(union_bbox([a, b]), centroid(union_bbox([a, b]))))
print("boundary points are inside:", contains_point(a, Pt(10, 5)))

# Serialization is canonical: re-serializing a parsed document reproduces
# the file byte for byte, so artifacts diff cleanly.
print("\nround-trip byte identical:", serialize_layout(doc) == raw)
