"""Axis-aligned box and point primitives in pixel coordinates.

Origin is the page's top-left corner; x grows right, y grows down.
Everything downstream (matching, evaluation, rendering) does its
geometry through these four functions, so there is exactly one
definition of IoU, union and centroid in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class BBox:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    def is_valid(self) -> bool:
        """Strictly positive area, finite and non-negative coordinates."""
        coords = (self.x0, self.y0, self.x1, self.y1)
        if not all(math.isfinite(c) for c in coords):
            return False
        if any(c < 0 for c in coords):
            return False
        return self.x0 < self.x1 and self.y0 < self.y1

    def as_list(self) -> list[float]:
        return [self.x0, self.y0, self.x1, self.y1]

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "BBox":
        if len(values) != 4:
            raise ValueError(f"bbox needs 4 coordinates, got {len(values)}")
        return cls(float(values[0]), float(values[1]), float(values[2]), float(values[3]))


@dataclass(frozen=True)
class Pt:
    x: float
    y: float

    def as_list(self) -> list[float]:
        return [self.x, self.y]


def iou(a: BBox, b: BBox) -> float:
    """Intersection-over-union of two boxes; 0.0 when disjoint."""
    ix0 = max(a.x0, b.x0)
    iy0 = max(a.y0, b.y0)
    ix1 = min(a.x1, b.x1)
    iy1 = min(a.y1, b.y1)
    if ix1 <= ix0 or iy1 <= iy0:
        return 0.0
    inter = (ix1 - ix0) * (iy1 - iy0)
    union = a.area + b.area - inter
    return inter / union


def union_bbox(boxes: Iterable[BBox]) -> BBox:
    """Smallest box containing every input box; rejects an empty input."""
    boxes = list(boxes)
    if not boxes:
        raise ValueError("union_bbox requires at least one box")
    return BBox(
        min(b.x0 for b in boxes),
        min(b.y0 for b in boxes),
        max(b.x1 for b in boxes),
        max(b.y1 for b in boxes),
    )


def centroid(b: BBox) -> Pt:
    return Pt((b.x0 + b.x1) / 2.0, (b.y0 + b.y1) / 2.0)


def contains_point(b: BBox, p: Pt) -> bool:
    """Closed-box membership: boundary points count as inside."""
    return b.x0 <= p.x <= b.x1 and b.y0 <= p.y <= b.y1
