"""Neighbor discovery and proposal merging for long textual objects.

A proposal's search window is its own box inflated by half the window size
on every side (the 50x50 area around a ROI); any box intersecting that
window is a neighbor candidate. Candidates are binned into the four
directions by the dominant axis of the center-to-center vector, keeping
the closest per direction. Merging is transitive: a link in either
direction joins two proposals, and each connected component collapses to
its enclosing box.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Box, center_distance_sq, enclosing, intersection_area

DIRECTIONS = ("left", "right", "top", "bottom")
OPPOSITE = {"left": "right", "right": "left", "top": "bottom", "bottom": "top"}


@dataclass(frozen=True)
class LinkVector:
    left: bool = False
    right: bool = False
    top: bool = False
    bottom: bool = False

    def get(self, direction: str) -> bool:
        return getattr(self, direction)

    def any(self) -> bool:
        return self.left or self.right or self.top or self.bottom


NO_LINKS = LinkVector()


@dataclass
class NeighborIndex:
    """Per proposal: neighbor proposal id for each direction, or None."""

    neighbors: list[dict[str, int | None]]

    def __len__(self) -> int:
        return len(self.neighbors)

    def get(self, i: int, direction: str) -> int | None:
        return self.neighbors[i][direction]


def _direction_of(dx: float, dy: float) -> str | None:
    if dx == 0.0 and dy == 0.0:
        return None  # coincident centers carry no direction
    if abs(dx) >= abs(dy):
        return "left" if dx < 0 else "right"
    return "top" if dy < 0 else "bottom"


def find_neighbors(boxes: list[Box], window_px: float = 50.0) -> NeighborIndex:
    """For each box, the nearest box per direction whose extent reaches
    into the box's search window (box inflated by window_px / 2)."""
    if window_px <= 0:
        raise ValueError(f"window_px must be > 0, got {window_px}")
    half = window_px / 2.0
    out: list[dict[str, int | None]] = []
    for i, a in enumerate(boxes):
        window = a.inflate(half)
        best: dict[str, tuple[float, int]] = {}
        for j, b in enumerate(boxes):
            if j == i or intersection_area(window, b) <= 0.0:
                continue
            (ax, ay), (bx, by) = a.center, b.center
            direction = _direction_of(bx - ax, by - ay)
            if direction is None:
                continue
            d2 = center_distance_sq(a, b)
            if direction not in best or (d2, j) < best[direction]:
                best[direction] = (d2, j)
        out.append({d: (best[d][1] if d in best else None) for d in DIRECTIONS})
    return NeighborIndex(out)


def linked_components(boxes: list[Box], links: list[LinkVector],
                      neighbors: NeighborIndex) -> list[list[int]]:
    """Connected components of the undirected link graph: an edge joins i
    and j whenever either proposal links toward the other through the
    neighbor index. Components are ordered by their smallest member id,
    members ascending."""
    if len(boxes) != len(links) or len(boxes) != len(neighbors):
        raise ValueError(
            f"length mismatch: {len(boxes)} boxes, {len(links)} links, "
            f"{len(neighbors)} neighbor entries")

    parent = list(range(len(boxes)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for i, vec in enumerate(links):
        for direction in DIRECTIONS:
            if vec.get(direction):
                j = neighbors.get(i, direction)
                if j is not None:
                    union(i, j)

    components: dict[int, list[int]] = {}
    for i in range(len(boxes)):
        components.setdefault(find(i), []).append(i)
    return [components[root] for root in sorted(components)]


def merge_linked(boxes: list[Box], links: list[LinkVector],
                 neighbors: NeighborIndex) -> list[Box]:
    """Collapse linked proposals into enclosing boxes, one per connected
    component, ordered by smallest member id; singletons pass through."""
    merged = []
    for members in linked_components(boxes, links, neighbors):
        box = boxes[members[0]]
        for m in members[1:]:
            box = enclosing(box, boxes[m])
        merged.append(box)
    return merged
