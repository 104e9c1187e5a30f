"""Axis-aligned box arithmetic: areas, intersection, IOU, enclosing boxes.

Coordinates are real-valued pixels, origin top-left. Boxes use the half-open
convention: (x0, y0) is the inclusive top-left edge, (x1, y1) the exclusive
bottom-right edge, so integer pixel-grid boxes have integer areas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle with x0 <= x1 and y0 <= y1 (zero area allowed)."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise ValueError(f"negative extent: {self!r}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def contains_point(self, x: float, y: float) -> bool:
        """Half-open containment: x0 <= x < x1 and y0 <= y < y1."""
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1

    def contains_box(self, other: "Box") -> bool:
        return (self.x0 <= other.x0 and self.y0 <= other.y0
                and other.x1 <= self.x1 and other.y1 <= self.y1)

    def inflate(self, margin: float) -> "Box":
        """Grow (or shrink, margin < 0) by `margin` on every side."""
        if 2 * margin < -min(self.width, self.height):
            raise ValueError("inflate would invert the box")
        return Box(self.x0 - margin, self.y0 - margin,
                   self.x1 + margin, self.y1 + margin)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)


def intersection_area(a: Box, b: Box) -> float:
    iw = min(a.x1, b.x1) - max(a.x0, b.x0)
    ih = min(a.y1, b.y1) - max(a.y0, b.y0)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    return iw * ih


def union_area(a: Box, b: Box) -> float:
    return a.area + b.area - intersection_area(a, b)


def iou(a: Box, b: Box) -> float:
    """Intersection over union in [0, 1]; 0 when the union is degenerate."""
    union = union_area(a, b)
    if union <= 0.0:
        return 0.0
    return intersection_area(a, b) / union


def enclosing(a: Box, b: Box) -> Box:
    """Smallest axis-aligned box containing both a and b."""
    return Box(min(a.x0, b.x0), min(a.y0, b.y0),
               max(a.x1, b.x1), max(a.y1, b.y1))


def center_distance_sq(a: Box, b: Box) -> float:
    """Squared Euclidean distance between box centers, in px^2."""
    (ax, ay), (bx, by) = a.center, b.center
    return (ax - bx) ** 2 + (ay - by) ** 2


def center_distance(a: Box, b: Box) -> float:
    return math.sqrt(center_distance_sq(a, b))


def gap_distance(a: Box, b: Box) -> float:
    """Separation between two boxes: 0 if they touch or overlap, else the
    max of the horizontal and vertical axis gaps."""
    dx = max(a.x0 - b.x1, b.x0 - a.x1, 0.0)
    dy = max(a.y0 - b.y1, b.y0 - a.y1, 0.0)
    return max(dx, dy)
