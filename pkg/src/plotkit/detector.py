"""End-to-end inference with deterministic heuristic heads.

The pipeline mirrors a two-stage detector: CV proposals stand in for the
region-proposal stage, and documented rule cascades replace the learned
classification, regression and linking heads. Classification keys off the
inferred layout (regions relative to the axes), box size, and fill/ink
statistics. "Regression" snaps a box to the tight bounding box of the
non-background ink inside it, which is exact on computer-rendered plots.
Linking joins same-class text neighbors: horizontally for titles, axis
labels and legend labels, vertically for the y-axis label. Tick labels
are never linked (each is its own object).

All thresholds live in DetectorConfig; they were calibrated once against
the synthetic corpus and are not tuned per image.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .geometry import Box, enclosing, iou
from .layout import PlotLayout
from .linking import LinkVector, NeighborIndex, find_neighbors, linked_components
from .raster import (
    EdgeMap, Proposal, ProposalConfig, RasterImage, laplacian_edges,
    propose_regions,
)
from .targets import ObjectClass

HORIZONTAL_LINK_CLASSES = frozenset({
    ObjectClass.PLOT_TITLE, ObjectClass.X_AXIS_LABEL, ObjectClass.LEGEND_LABEL,
})
VERTICAL_LINK_CLASSES = frozenset({ObjectClass.Y_AXIS_LABEL})


class LayoutNotFoundError(RuntimeError):
    """No axis lines could be located in the image."""


@dataclass(frozen=True)
class DetectorConfig:
    nms_iou: float = 0.5
    link_window_px: float = 50.0
    # text: sparse high-frequency ink
    text_edge_density_min: float = 0.05
    text_ink_density_max: float = 0.5
    # solid fills (bars, markers, swatches)
    solid_ink_density_min: float = 0.85
    bar_min_width: float = 18.0
    bar_min_height: float = 25.0
    marker_max_width: float = 34.0
    marker_max_height: float = 20.0
    swatch_width: tuple[float, float] = (20.0, 34.0)
    swatch_height: tuple[float, float] = (8.0, 18.0)
    # layout inference
    ink_luma_max: float = 250.0
    dark_luma_max: float = 60.0
    min_axis_run_px: int = 80
    axis_thickness_px: int = 2
    tick_band_below_px: float = 30.0
    tick_band_left_px: float = 60.0


@dataclass(frozen=True)
class ProposalFeatures:
    """Deterministic statistics of one proposal box.

    Center and sizes are normalized by the image dimensions; color means
    and variances are per RGB channel over the whole box; ink_mean is the
    mean color of non-background pixels only.
    """

    center_x: float
    center_y: float
    width: float
    height: float
    aspect: float
    fill_mean: tuple[float, float, float]
    fill_var: tuple[float, float, float]
    edge_density: float
    ink_density: float
    ink_mean: tuple[float, float, float]


@dataclass(frozen=True)
class Detection:
    box: Box
    cls: ObjectClass
    score: float

    def __post_init__(self) -> None:
        if self.cls.is_background:
            raise ValueError("detections are foreground only")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score out of range: {self.score}")


@dataclass
class DetectResult:
    detections: list[Detection]
    layout: PlotLayout | None
    warnings: list[str] = field(default_factory=list)


def _int_box(box: Box) -> tuple[int, int, int, int]:
    return (int(box.x0), int(box.y0), int(box.x1), int(box.y1))


def extract_features(img: RasterImage, box: Box, edges: EdgeMap,
                     cfg: DetectorConfig = DetectorConfig()) -> ProposalFeatures:
    if not img.bounds.contains_box(box) or box.area <= 0:
        raise ValueError(f"box out of bounds or empty: {box}")
    x0, y0, x1, y1 = _int_box(box)
    crop = img.array[y0:y1, x0:x1].astype(np.float64)
    lum = (0.299 * crop[:, :, 0] + 0.587 * crop[:, :, 1]
           + 0.114 * crop[:, :, 2])
    ink = lum <= cfg.ink_luma_max - 0.5
    n = crop.shape[0] * crop.shape[1]
    fill_mean = tuple(float(m) for m in crop.reshape(n, 3).mean(axis=0))
    fill_var = tuple(float(v) for v in crop.reshape(n, 3).var(axis=0))
    edge_density = float(edges.bits[y0:y1, x0:x1].mean())
    ink_density = float(ink.mean())
    if ink.any():
        ink_mean = tuple(float(m) for m in crop[ink].mean(axis=0))
    else:
        ink_mean = fill_mean
    cx, cy = box.center
    return ProposalFeatures(
        center_x=cx / img.width, center_y=cy / img.height,
        width=box.width / img.width, height=box.height / img.height,
        aspect=box.width / box.height if box.height > 0 else 0.0,
        fill_mean=fill_mean, fill_var=fill_var,
        edge_density=edge_density, ink_density=ink_density,
        ink_mean=ink_mean)


def snap_to_ink(img: RasterImage, box: Box,
                cfg: DetectorConfig = DetectorConfig()) -> Box:
    """Tight bounding box of the non-background pixels inside `box`;
    returns `box` unchanged when it contains no ink."""
    x0, y0, x1, y1 = _int_box(box)
    crop = img.array[y0:y1, x0:x1].astype(np.float64)
    lum = (0.299 * crop[:, :, 0] + 0.587 * crop[:, :, 1]
           + 0.114 * crop[:, :, 2])
    ys, xs = np.nonzero(lum <= cfg.ink_luma_max - 0.5)
    if ys.size == 0:
        return box
    return Box(x0 + float(xs.min()), y0 + float(ys.min()),
               x0 + float(xs.max()) + 1.0, y0 + float(ys.max()) + 1.0)


def _longest_run(mask: np.ndarray, axis: int) -> tuple[int, int, int, int]:
    """Longest run of True along `axis`; returns (length, row-or-col index,
    start, stop) with the run measured along the given axis."""
    structure = np.zeros((3, 3), dtype=bool)
    structure[1, :] = True
    work = mask if axis == 1 else mask.T
    labels, count = ndimage.label(work, structure=structure)
    if count == 0:
        return 0, -1, 0, 0
    slices = ndimage.find_objects(labels)
    best = max(range(count),
               key=lambda i: (slices[i][1].stop - slices[i][1].start, -i))
    rows, cols = slices[best]
    return cols.stop - cols.start, rows.start, cols.start, cols.stop


def infer_layout(img: RasterImage, edges: EdgeMap,
                 proposals: list[Proposal] | None = None,
                 cfg: DetectorConfig = DetectorConfig()) -> PlotLayout:
    """Locate the axes as the longest horizontal and vertical dark runs;
    the legend region is the union of swatch-like boxes right of the plot
    area (absent when there are none)."""
    dark = img.luma() <= cfg.dark_luma_max
    h_len, x_axis_y, h_start, h_stop = _longest_run(dark, axis=1)
    v_len, y_axis_x, v_start, v_stop = _longest_run(dark, axis=0)
    if h_len < cfg.min_axis_run_px or v_len < cfg.min_axis_run_px:
        raise LayoutNotFoundError(
            f"axis runs too short: horizontal {h_len}, vertical {v_len}")
    try:
        plot_box = Box(y_axis_x + cfg.axis_thickness_px, v_start,
                       h_stop, x_axis_y)
    except ValueError as exc:
        raise LayoutNotFoundError(f"axes do not frame a plot area: {exc}") from exc

    legend_box = None
    if proposals is None:
        proposals = propose_regions(img)
    for p in proposals:
        b = snap_to_ink(img, p.box, cfg)
        if not (cfg.swatch_width[0] <= b.width <= cfg.swatch_width[1]
                and cfg.swatch_height[0] <= b.height <= cfg.swatch_height[1]):
            continue
        if b.center[0] <= plot_box.x1:
            continue
        feats = extract_features(img, p.box, edges, cfg)
        if feats.ink_density < 0.5:
            continue
        legend_box = b if legend_box is None else \
            Box(min(legend_box.x0, b.x0), min(legend_box.y0, b.y0),
                max(legend_box.x1, b.x1), max(legend_box.y1, b.y1))
    return PlotLayout(img.width, img.height, plot_box,
                      float(x_axis_y), float(y_axis_x), legend_box, None)


def _is_text_like(f: ProposalFeatures, cfg: DetectorConfig) -> bool:
    return (f.edge_density >= cfg.text_edge_density_min
            and f.ink_density < cfg.text_ink_density_max)


def _is_solid(f: ProposalFeatures, cfg: DetectorConfig) -> bool:
    return f.ink_density >= cfg.solid_ink_density_min


def classify(features: ProposalFeatures, layout: PlotLayout,
             cfg: DetectorConfig = DetectorConfig()) -> tuple[ObjectClass, float]:
    """Rule cascade standing in for the learned classification head.

    Regions relative to the inferred axes pick the class family, then
    size and fill statistics discriminate within it. Scores are rule
    confidences with small feature-dependent adjustments so rankings stay
    informative."""
    cx = features.center_x * layout.width
    cy = features.center_y * layout.height
    w = features.width * layout.width
    h = features.height * layout.height
    plot = layout.plot_box
    text_like = _is_text_like(features, cfg)
    solid = _is_solid(features, cfg)

    if cx > plot.x1:  # right margin: legend side
        if (solid and cfg.swatch_width[0] <= w <= cfg.swatch_width[1]
                and cfg.swatch_height[0] <= h <= cfg.swatch_height[1]):
            return ObjectClass.LEGEND_PREVIEW, min(1.0, 0.9 + 0.08 * features.ink_density)
        if text_like:
            return ObjectClass.LEGEND_LABEL, 0.84 + 0.1 * min(features.edge_density, 0.5)
        return ObjectClass.BACKGROUND, 0.5
    if plot.contains_point(cx, cy):
        if solid:
            if w <= cfg.marker_max_width and h <= cfg.marker_max_height:
                return ObjectClass.DOT_LINE, min(1.0, 0.88 + 0.1 * features.ink_density)
            if w >= cfg.bar_min_width and h >= cfg.bar_min_height:
                return ObjectClass.BAR, min(1.0, 0.9 + 0.08 * features.ink_density)
        return ObjectClass.BACKGROUND, 0.5
    if cy < plot.y0:
        if text_like:
            return ObjectClass.PLOT_TITLE, 0.86 + 0.1 * min(features.edge_density, 0.5)
        return ObjectClass.BACKGROUND, 0.5
    if cy > layout.x_axis_y:
        if text_like:
            if cy <= layout.x_axis_y + cfg.tick_band_below_px:
                return ObjectClass.X_AXIS_TICKS, 0.87 + 0.1 * min(features.edge_density, 0.5)
            return ObjectClass.X_AXIS_LABEL, 0.85 + 0.1 * min(features.edge_density, 0.5)
        return ObjectClass.BACKGROUND, 0.5
    if cx < layout.y_axis_x:
        if text_like:
            if cx >= layout.y_axis_x - cfg.tick_band_left_px:
                return ObjectClass.Y_AXIS_TICKS, 0.87 + 0.1 * min(features.edge_density, 0.5)
            return ObjectClass.Y_AXIS_LABEL, 0.85 + 0.1 * min(features.edge_density, 0.5)
        return ObjectClass.BACKGROUND, 0.5
    return ObjectClass.BACKGROUND, 0.5


def _merge_linked_detections(dets: list[Detection],
                             cfg: DetectorConfig) -> list[Detection]:
    """Join multi-word text objects: neighbors are searched within each
    class separately (the link stage only ever merges same-class pieces,
    and a foreign-class box must not occupy a direction slot)."""
    by_cls: dict[ObjectClass, list[Detection]] = {}
    for d in dets:
        by_cls.setdefault(d.cls, []).append(d)
    merged = []
    for cls in sorted(by_cls, key=lambda c: c.value):
        subset = by_cls[cls]
        if cls in HORIZONTAL_LINK_CLASSES:
            allowed = ("left", "right")
        elif cls in VERTICAL_LINK_CLASSES:
            allowed = ("top", "bottom")
        else:
            merged.extend(subset)
            continue
        boxes = [d.box for d in subset]
        neighbors = find_neighbors(boxes, cfg.link_window_px)
        links = []
        for i in range(len(subset)):
            flags = {d: (d in allowed and neighbors.get(i, d) is not None)
                     for d in ("left", "right", "top", "bottom")}
            links.append(LinkVector(**flags))
        for members in linked_components(boxes, links, neighbors):
            box = boxes[members[0]]
            for m in members[1:]:
                box = enclosing(box, boxes[m])
            score = max(subset[m].score for m in members)
            merged.append(Detection(box, cls, score))
    return merged


def nms(dets: list[Detection], iou_threshold: float) -> list[Detection]:
    """Per-class greedy non-maximum suppression keeping highest scores."""
    kept: list[Detection] = []
    by_class: dict[ObjectClass, list[Detection]] = {}
    for d in dets:
        by_class.setdefault(d.cls, []).append(d)
    for cls in sorted(by_class, key=lambda c: c.value):
        pool = sorted(by_class[cls],
                      key=lambda d: (-d.score, d.box.x0, d.box.y0,
                                     d.box.x1, d.box.y1))
        chosen: list[Detection] = []
        for cand in pool:
            if all(iou(cand.box, k.box) <= iou_threshold for k in chosen):
                chosen.append(cand)
        kept.extend(chosen)
    kept.sort(key=lambda d: (-d.score, d.cls.value, d.box.x0, d.box.y0))
    return kept


def detect(img: RasterImage,
           proposal_cfg: ProposalConfig = ProposalConfig(),
           cfg: DetectorConfig = DetectorConfig()) -> DetectResult:
    """proposals -> layout -> classify -> snap -> link -> NMS."""
    edges = laplacian_edges(img, proposal_cfg.edge_threshold)
    proposals = propose_regions(img, proposal_cfg)
    try:
        layout = infer_layout(img, edges, proposals, cfg)
    except LayoutNotFoundError as exc:
        return DetectResult([], None, [str(exc)])

    raw: list[Detection] = []
    for p in proposals:
        snapped = snap_to_ink(img, p.box, cfg)
        feats = extract_features(img, snapped, edges, cfg)
        cls, score = classify(feats, layout, cfg)
        if cls.is_background:
            continue
        raw.append(Detection(snapped, cls, min(1.0, score)))

    merged = _merge_linked_detections(raw, cfg)
    final = nms(merged, cfg.nms_iou)
    return DetectResult(final, layout, [])
