"""Plot-to-table conversion.

Rows come from the x-tick labels left to right, columns from the legend
labels top to bottom (single default column when there is no legend).
Each bar or dot is assigned to the horizontally nearest x-tick; its series
is resolved by the nearest legend-preview fill color. The numeric value is
linearly interpolated from the y-tick scale at the bar top (bars) or the
marker center (dot-lines), extrapolating beyond the outermost ticks.

Text comes from a pluggable source (ground-truth annotations here; an OCR
engine could implement the same interface) so the conversion itself stays
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .geometry import Box, iou
from .layout import PlotLayout
from .targets import Annotation, ObjectClass

DEFAULT_COLUMN = "series"


class InsufficientTicksError(ValueError):
    pass


class MonotonicityError(ValueError):
    pass


class NoDataObjectsError(ValueError):
    pass


@dataclass
class PlotTable:
    """rows x columns grid of numeric cells; None marks an absent cell."""

    row_headers: list[str]
    col_headers: list[str]
    values: list[list[float | None]]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.row_headers):
            raise ValueError("row count mismatch")
        for row in self.values:
            if len(row) != len(self.col_headers):
                raise ValueError("column count mismatch")

    def cells(self) -> dict[tuple[str, str], float]:
        """Non-empty cells keyed by normalized (row, column) headers."""
        out = {}
        for r, row_h in enumerate(self.row_headers):
            for c, col_h in enumerate(self.col_headers):
                v = self.values[r][c]
                if v is not None:
                    out[(_norm(row_h), _norm(col_h))] = v
        return out


def _norm(header: str) -> str:
    return header.strip().lower()


@dataclass(frozen=True)
class TickScale:
    """(pixel y, value) pairs, sorted by pixel, strictly monotonic in
    both coordinates."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise InsufficientTicksError(
                f"need at least 2 ticks, got {len(self.points)}")
        pixels = [p for p, _ in self.points]
        values = [v for _, v in self.points]
        if any(b <= a for a, b in zip(pixels, pixels[1:])):
            raise MonotonicityError(f"tick pixels not increasing: {pixels}")
        increasing = all(b > a for a, b in zip(values, values[1:]))
        decreasing = all(b < a for a, b in zip(values, values[1:]))
        if not (increasing or decreasing):
            raise MonotonicityError(f"tick values not monotonic: {values}")


def build_scale(yticks: list[tuple[Box, str]]) -> TickScale:
    """Tick scale from y-tick label boxes and their text; the pixel
    anchor is the label's vertical center. Non-numeric labels are
    skipped."""
    pairs = []
    for box, text in yticks:
        try:
            value = float(text)
        except (TypeError, ValueError):
            continue
        pairs.append((box.center[1], value))
    if len(pairs) < 2:
        raise InsufficientTicksError(
            f"need at least 2 numeric y-ticks, got {len(pairs)}")
    pairs.sort(key=lambda p: p[0])
    return TickScale(tuple(pairs))


def interpolate_value(y: float, scale: TickScale) -> float:
    """Linear interpolation between the bracketing ticks; linear
    extrapolation from the nearest pair outside the tick range."""
    pts = scale.points
    if y <= pts[0][0]:
        (y0, v0), (y1, v1) = pts[0], pts[1]
    elif y >= pts[-1][0]:
        (y0, v0), (y1, v1) = pts[-2], pts[-1]
    else:
        lo = 0
        for i in range(1, len(pts)):
            if pts[i][0] >= y:
                lo = i - 1
                break
        (y0, v0), (y1, v1) = pts[lo], pts[lo + 1]
    return v0 + (y - y0) / (y1 - y0) * (v1 - v0)


@dataclass(frozen=True)
class TableObject:
    """One detected (or ground-truth) element feeding table construction."""

    cls: ObjectClass
    box: Box
    text: str | None = None
    fill_rgb: tuple[float, float, float] | None = None


class TextSource(Protocol):
    def text_for(self, box: Box, cls: ObjectClass | None = None) -> str | None:
        ...


@dataclass
class AnnotationTextSource:
    """Reads text from ground-truth annotations by best box overlap."""

    annotations: list[Annotation]
    min_iou: float = 0.25

    def text_for(self, box: Box, cls: ObjectClass | None = None) -> str | None:
        best, best_iou = None, self.min_iou
        for ann in self.annotations:
            if cls is not None and ann.cls is not cls:
                continue
            v = iou(box, ann.box)
            if v > best_iou:
                best, best_iou = ann, v
        return best.text if best is not None else None


def _rgb_dist2(a, b) -> float:
    return sum((float(x) - float(y)) ** 2 for x, y in zip(a, b))


def build_table(objects: list[TableObject], layout: PlotLayout) -> PlotTable:
    """Assemble the table from classified elements; see module docstring
    for the assignment rules."""
    xticks = sorted((o for o in objects if o.cls is ObjectClass.X_AXIS_TICKS),
                    key=lambda o: o.box.center[0])
    yticks = [o for o in objects if o.cls is ObjectClass.Y_AXIS_TICKS]
    data = [o for o in objects
            if o.cls in (ObjectClass.BAR, ObjectClass.DOT_LINE)
            and layout.plot_box.inflate(2).contains_point(*o.box.center)]
    previews = sorted((o for o in objects if o.cls is ObjectClass.LEGEND_PREVIEW),
                      key=lambda o: o.box.center[1])
    labels = sorted((o for o in objects if o.cls is ObjectClass.LEGEND_LABEL),
                    key=lambda o: o.box.center[1])

    if not data:
        raise NoDataObjectsError("no bars or dot-line markers")
    if not xticks:
        raise NoDataObjectsError("no x-tick labels to anchor rows")
    scale = build_scale([(o.box, o.text or "") for o in yticks])

    row_headers = [o.text or "" for o in xticks]
    if previews and labels:
        # column per legend row: pair each preview with the label whose
        # vertical center is closest
        columns = []
        for p in previews:
            lbl = min(labels, key=lambda o: abs(o.box.center[1] - p.box.center[1]))
            columns.append((p, lbl.text or ""))
        col_headers = [text for _, text in columns]
    else:
        columns = []
        col_headers = [DEFAULT_COLUMN]

    values: list[list[float | None]] = [
        [None] * len(col_headers) for _ in row_headers]

    tick_xs = [o.box.center[0] for o in xticks]
    for obj in data:
        cx = obj.box.center[0]
        r = min(range(len(tick_xs)), key=lambda i: abs(tick_xs[i] - cx))
        if columns:
            if obj.fill_rgb is None:
                continue
            c = min(range(len(columns)),
                    key=lambda i: _rgb_dist2(columns[i][0].fill_rgb or (0, 0, 0),
                                             obj.fill_rgb))
        else:
            c = 0
        if obj.cls is ObjectClass.BAR:
            y = obj.box.y0
        else:
            y = obj.box.center[1]
        if values[r][c] is None:
            values[r][c] = interpolate_value(y, scale)

    return PlotTable(row_headers, list(col_headers), values)


def table_from_annotations(annotations: list[Annotation], layout: PlotLayout,
                           fill_of=None) -> PlotTable:
    """Ground-truth route: feed annotation boxes and text straight into
    the table builder. `fill_of` maps a visual annotation to its RGB fill
    (sampled from the rendered image)."""
    objects = []
    for ann in annotations:
        fill = fill_of(ann) if fill_of is not None else None
        objects.append(TableObject(ann.cls, ann.box, ann.text, fill))
    return build_table(objects, layout)
