"""Ground-truth target assignment for proposals.

A proposal inherits the class of the unique annotation containing its
center (objects in plots never overlap, so there is at most one). Textual
proposals regress to the parent box clipped to the proposal's horizontal
extent, i.e. they only have to grow vertically and are later linked into
the full span; visual proposals regress to the parent box itself. The
y-axis label is the transposed case: its text runs vertically, so the clip
keeps the proposal's vertical extent and the parent's horizontal one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .geometry import Box
from .linking import DIRECTIONS, LinkVector, NeighborIndex


class ObjectClass(enum.Enum):
    BAR = "bar"
    DOT_LINE = "dot-line"
    LEGEND_LABEL = "legend-label"
    LEGEND_PREVIEW = "legend-preview"
    PLOT_TITLE = "plot-title"
    X_AXIS_LABEL = "x-axis-label"
    X_AXIS_TICKS = "x-axis-ticks"
    Y_AXIS_LABEL = "y-axis-label"
    Y_AXIS_TICKS = "y-axis-ticks"
    BACKGROUND = "background"

    @property
    def is_background(self) -> bool:
        return self is ObjectClass.BACKGROUND


FOREGROUND_CLASSES = tuple(c for c in ObjectClass if not c.is_background)

VISUAL_CLASSES = frozenset({
    ObjectClass.BAR, ObjectClass.DOT_LINE, ObjectClass.LEGEND_PREVIEW,
})
TEXTUAL_CLASSES = frozenset({
    ObjectClass.LEGEND_LABEL, ObjectClass.PLOT_TITLE,
    ObjectClass.X_AXIS_LABEL, ObjectClass.X_AXIS_TICKS,
    ObjectClass.Y_AXIS_LABEL, ObjectClass.Y_AXIS_TICKS,
})


class OverlappingAnnotationsError(ValueError):
    """The ground truth violated the plots-do-not-overlap invariant."""


@dataclass(frozen=True)
class Annotation:
    """Ground-truth object: class, tight box, optional text payload.

    word_boxes carries the per-word ink boxes of multi-word textual
    objects (their union equals `box`); empty for single-piece objects.
    """

    object_id: int
    cls: ObjectClass
    box: Box
    text: str | None = None
    word_boxes: tuple[Box, ...] = ()

    def __post_init__(self) -> None:
        if self.cls.is_background:
            raise ValueError("annotations must be foreground objects")


@dataclass(frozen=True)
class ProposalTargets:
    cls: ObjectClass
    regression_box: Box | None
    links: LinkVector

    def __post_init__(self) -> None:
        if self.cls.is_background and self.regression_box is not None:
            raise ValueError("background proposals carry no regression box")
        if not self.cls.is_background and self.regression_box is None:
            raise ValueError("foreground proposals need a regression box")


def check_non_overlapping(annotations: list[Annotation]) -> None:
    from .geometry import intersection_area

    for i, a in enumerate(annotations):
        for b in annotations[i + 1:]:
            if intersection_area(a.box, b.box) > 0.0:
                raise OverlappingAnnotationsError(
                    f"annotations {a.object_id} and {b.object_id} overlap")


def assign_class(proposal: Box,
                 annotations: list[Annotation]) -> tuple[ObjectClass, int | None]:
    """Class of the unique annotation containing the proposal's center
    (half-open containment), else background."""
    check_non_overlapping(annotations)
    cx, cy = proposal.center
    for ann in annotations:
        if ann.box.contains_point(cx, cy):
            return ann.cls, ann.object_id
    return ObjectClass.BACKGROUND, None


def assign_regression_target(proposal: Box, parent: Annotation) -> Box:
    """Regression box for a proposal assigned to `parent`."""
    if parent.cls in VISUAL_CLASSES:
        return parent.box
    if parent.cls is ObjectClass.Y_AXIS_LABEL:
        # vertically running text: clip along the vertical axis instead
        return Box(parent.box.x0, proposal.y0, parent.box.x1, proposal.y1)
    return Box(proposal.x0, parent.box.y0, proposal.x1, parent.box.y1)


def assign_link_targets(proposals: list[Box],
                        parents: list[int | None],
                        neighbors: NeighborIndex) -> list[LinkVector]:
    """Link toward a direction iff the neighbor there shares the same
    (non-background) parent object."""
    if len(proposals) != len(parents) or len(proposals) != len(neighbors):
        raise ValueError("proposals, parents and neighbors must align")
    out = []
    for i, parent in enumerate(parents):
        flags = {}
        for direction in DIRECTIONS:
            j = neighbors.get(i, direction)
            flags[direction] = (parent is not None and j is not None
                                and parents[j] == parent)
        out.append(LinkVector(**flags))
    return out


def assign_targets(proposals: list[Box], annotations: list[Annotation],
                   neighbors: NeighborIndex) -> list[ProposalTargets]:
    """Full per-proposal supervision record: class, regression box, links."""
    by_id = {a.object_id: a for a in annotations}
    classes, parents = [], []
    for box in proposals:
        cls, parent = assign_class(box, annotations)
        classes.append(cls)
        parents.append(parent)
    links = assign_link_targets(proposals, parents, neighbors)
    out = []
    for box, cls, parent, vec in zip(proposals, classes, parents, links):
        reg = None if parent is None else assign_regression_target(box, by_id[parent])
        out.append(ProposalTargets(cls, reg, vec))
    return out
