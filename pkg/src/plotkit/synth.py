"""Deterministic synthetic plot generator with pixel-exact ground truth.

Renders vertical-bar and dot-line plots with the embedded bitmap font and
emits, per plot: the PNG pixels, one annotation per object with its exact
ink box, the numeric table the plot encodes, and the layout (axis
positions plus the value-to-pixel transform).

Geometry is constrained so the CV proposal stage can actually solve the
corpus and the strict-IOU criteria stay meaningful:

* distinct objects keep at least a 4 px ink gap (3 px is the minimum at
  which Laplacian edge rings stay disconnected), so no two objects merge
  into one proposal;
* every annotation box is 26..140 px wide, which pins the IOU of an 8 px
  horizontal shift into (0.5, 0.9) for every object;
* y-tick labels are digit strings placed symmetrically on exact tick
  rows, and data values are kept large enough that the 1 px rendering
  quantization stays under half of the table tolerance.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import font5x7 as font
from .geometry import Box, enclosing, gap_distance
from .layout import PlotLayout, ValueScale
from .raster import RasterImage
from .table import DEFAULT_COLUMN, PlotTable
from .targets import Annotation, ObjectClass, check_non_overlapping

BACKGROUND = (255, 255, 255)
AXIS_COLOR = (0, 0, 0)
TEXT_COLOR = (0, 0, 0)
AXIS_THICKNESS = 2

PALETTE = (
    (200, 60, 60), (60, 110, 200), (70, 160, 70),
    (210, 150, 40), (140, 80, 180), (60, 160, 160),
)

# uppercase-only vocabulary; every word must render as one edge component
WORDS_3 = ("ARE", "SUM", "NET", "TAX", "GAS", "OIL", "ORE", "ICE", "AIR",
           "SEA", "KEY", "TOP", "MID", "RAW", "FEE", "AGE", "BUS", "HAY")
WORDS_4 = ("AREA", "RATE", "ZONE", "EAST", "WEST", "CROP", "FARM", "CITY",
           "YEAR", "MEAN", "COST", "GAIN", "WAGE", "HEAT", "RAIN", "WIND",
           "SNOW", "CORN", "RICE", "IRON", "GOLD", "FISH", "WOOD", "COAL")
WORDS_5 = ("NORTH", "SOUTH", "INDEX", "SCORE", "UNITS", "TOTAL", "YIELD",
           "PRICE", "SHARE", "STOCK", "TREND", "WHEAT", "SOLAR", "URBAN",
           "RURAL", "OCEAN", "GRAIN", "MAIZE")
WORDS = {3: WORDS_3, 4: WORDS_4, 5: WORDS_5}

# (base value, step) candidates for the y-tick scale; all resulting digit
# strings must chain-connect in the font (verified by tests and asserted
# at generation)
TICK_CONFIGS = ((100, 50), (200, 50), (100, 100), (200, 100), (300, 100),
                (500, 100), (200, 200), (500, 200), (100, 200), (300, 150))

CANVAS_SIZES = ((650, 650), (640, 640), (660, 650))

BAR_WIDTH = 26
BAR_GAP = 4
MARKER_W, MARKER_H = 26, 14
SWATCH_W, SWATCH_H = 26, 12
MIN_INK_GAP = 4
MIN_OBJ_W, MAX_OBJ_W = 26, 140


class SpecValidationError(ValueError):
    pass


class PlotKind:
    VERTICAL_BAR = "vbar"
    DOT_LINE = "dotline"
    ALL = (VERTICAL_BAR, DOT_LINE)


@dataclass(frozen=True)
class PlotSpec:
    """Fully determines one plot; equal specs render identical pixels."""

    kind: str
    series: int
    categories: int
    tick_base: int
    tick_step: int
    tick_count: int
    width: int = 650
    height: int = 650
    palette_offset: int = 0
    title_style: int = 0     # 0: two words at scale 3, 1: three at scale 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in PlotKind.ALL:
            raise SpecValidationError(f"unknown plot kind {self.kind!r}")
        if not 1 <= self.series <= 3:
            raise SpecValidationError(f"series must be 1..3, got {self.series}")
        if not 2 <= self.categories <= 8:
            raise SpecValidationError(
                f"categories must be 2..8, got {self.categories}")
        if not 4 <= self.tick_count <= 6:
            raise SpecValidationError(
                f"tick_count must be 4..6, got {self.tick_count}")
        if self.tick_base < 100 or self.tick_step < 50:
            raise SpecValidationError("tick scale too small for 3-digit labels")
        if self.width < 600 or self.height < 600:
            raise SpecValidationError("canvas must be at least 600x600")

    @property
    def value_range(self) -> tuple[float, float]:
        return (float(self.tick_base),
                float(self.tick_base + self.tick_step * (self.tick_count - 1)))

    @property
    def has_legend(self) -> bool:
        return self.series >= 2


def _round_sig3(v: float) -> float:
    if v == 0:
        return 0.0
    digits = 2 - int(math.floor(math.log10(abs(v))))
    return round(v, digits)


def _check_rendered(text: str) -> None:
    for word in text.split():
        if not font.word_is_chain_connected(word):
            raise SpecValidationError(
                f"word {word!r} would split into several edge components")


@dataclass
class _Frame:
    """Pixel geometry shared by both plot kinds."""

    width: int
    height: int
    y_axis_x: int
    x_axis_y: int
    plot_x1: int
    plot_y0: int
    tick_px: int

    @property
    def plot_box(self) -> Box:
        return Box(self.y_axis_x + AXIS_THICKNESS, self.plot_y0,
                   self.plot_x1, self.x_axis_y)


def _make_frame(spec: PlotSpec) -> _Frame:
    y_axis_x = 120
    plot_y0 = 70
    x_axis_y = spec.height - 88
    plot_x1 = spec.width - (112 if spec.has_legend else 40)
    usable = x_axis_y - plot_y0 - 25
    tick_px = usable // (spec.tick_count - 1)
    frame = _Frame(spec.width, spec.height, y_axis_x, x_axis_y,
                   plot_x1, plot_y0, tick_px)
    slot = (plot_x1 - (y_axis_x + AXIS_THICKNESS)) / spec.categories
    group = spec.series * BAR_WIDTH + (spec.series - 1) * BAR_GAP
    if spec.kind == PlotKind.VERTICAL_BAR and slot < group + 10:
        raise SpecValidationError(
            f"{spec.categories} categories x {spec.series} series do not fit "
            f"a {plot_x1 - y_axis_x} px plot area")
    if slot < 58:
        raise SpecValidationError(
            f"{spec.categories} categories leave no room for tick labels")
    return frame


def _pick_words(rng: random.Random, lengths: list[int],
                taken: set[str]) -> list[str]:
    out = []
    for n in lengths:
        pool = [w for w in WORDS[n] if w not in taken]
        word = rng.choice(pool)
        taken.add(word)
        out.append(word)
    return out


def generate_plot(spec: PlotSpec) -> tuple[RasterImage, list[Annotation],
                                           PlotTable, PlotLayout]:
    """Render one plot; returns (image, annotations, table, layout)."""
    frame = _make_frame(spec)
    rng = random.Random(spec.seed)
    canvas = np.full((spec.height, spec.width, 3), 255, dtype=np.uint8)

    # axes (joined L shape)
    ax, ay = frame.y_axis_x, frame.x_axis_y
    canvas[ay:ay + AXIS_THICKNESS, ax:frame.plot_x1] = AXIS_COLOR
    canvas[frame.plot_y0:ay + AXIS_THICKNESS, ax:ax + AXIS_THICKNESS] = AXIS_COLOR

    scale = ValueScale(ref_value=float(spec.tick_base), ref_y=float(ay),
                       px_per_unit=frame.tick_px / spec.tick_step)

    annotations: list[Annotation] = []
    next_id = 0

    def add(cls, box, text=None, words=()):
        nonlocal next_id
        annotations.append(Annotation(next_id, cls, box, text, tuple(words)))
        next_id += 1

    # y ticks: digit labels right-aligned, vertically centered on the tick row
    tick_values = [spec.tick_base + i * spec.tick_step
                   for i in range(spec.tick_count)]
    for i, value in enumerate(tick_values):
        label = str(value)
        _check_rendered(label)
        ty = ay - i * frame.tick_px
        w = font.word_width(label, 2)
        h = font.word_height(2)
        x0 = ax - 8 - w
        box = font.draw_word(canvas, x0, ty - h // 2, label, 2, TEXT_COLOR)
        add(ObjectClass.Y_AXIS_TICKS, box, label)

    # x ticks: category words (bar) or years (dot-line)
    slot = (frame.plot_x1 - (ax + AXIS_THICKNESS)) / spec.categories
    centers = [ax + AXIS_THICKNESS + slot * (j + 0.5)
               for j in range(spec.categories)]
    taken: set[str] = set()
    if spec.kind == PlotKind.VERTICAL_BAR:
        cat_labels = _pick_words(rng, [rng.choice((3, 4))
                                       for _ in range(spec.categories)], taken)
    else:
        first_year = 2000 + rng.randrange(0, 2)
        cat_labels = [str(first_year + j) for j in range(spec.categories)]
    for j, label in enumerate(cat_labels):
        _check_rendered(label)
        w = font.word_width(label, 2)
        x0 = int(round(centers[j] - w / 2))
        box = font.draw_word(canvas, x0, ay + 10, label, 2, TEXT_COLOR)
        add(ObjectClass.X_AXIS_TICKS, box, label)

    # title
    if spec.title_style == 0:
        lengths, tscale = [3, rng.choice((3, 4))], 3
    else:
        lengths, tscale = [rng.choice((3, 4)), 3, 3], 2
    title_words = _pick_words(rng, lengths, taken)
    title = " ".join(title_words)
    _check_rendered(title)
    tw = font.text_width(title, tscale)
    tbox, twords = font.draw_text(canvas, (spec.width - tw) // 2, 16,
                                  title, tscale, TEXT_COLOR)
    add(ObjectClass.PLOT_TITLE, tbox, title, twords)

    # x axis label
    xl_words = _pick_words(rng, [4, rng.choice((3, 4, 5))][:rng.choice((1, 2))],
                           taken)
    xlabel = " ".join(xl_words)
    _check_rendered(xlabel)
    xw = font.text_width(xlabel, 2)
    mid = (ax + frame.plot_x1) // 2
    xbox, xwords = font.draw_text(canvas, mid - xw // 2, ay + 34,
                                  xlabel, 2, TEXT_COLOR)
    add(ObjectClass.X_AXIS_LABEL, xbox, xlabel, xwords)

    # y axis label: words stacked vertically in the left margin
    yl_words = _pick_words(rng, [rng.choice((3, 4))
                                 for _ in range(rng.choice((1, 2)))], taken)
    ylabel = " ".join(yl_words)
    _check_rendered(ylabel)
    n = len(yl_words)
    block_h = n * font.word_height(2) + (n - 1) * font.WORD_GAP_PX
    y_start = (frame.plot_y0 + ay) // 2 - block_h // 2
    ybox, ywords = font.draw_stacked_text(canvas, 10, y_start, ylabel, 2,
                                          TEXT_COLOR)
    add(ObjectClass.Y_AXIS_LABEL, ybox, ylabel, ywords)

    # legend: swatch + single-word label per series, right of the plot area
    series_colors = [PALETTE[(spec.palette_offset + s) % len(PALETTE)]
                     for s in range(spec.series)]
    if spec.has_legend:
        series_names = _pick_words(rng, [rng.choice((4, 5))
                                         for _ in range(spec.series)], taken)
        legend_x = frame.plot_x1 + 14
        swatch_boxes = []
        for s in range(spec.series):
            top = frame.plot_y0 + 8 + s * 28
            canvas[top:top + SWATCH_H, legend_x:legend_x + SWATCH_W] = \
                series_colors[s]
            sbox = Box(legend_x, top, legend_x + SWATCH_W, top + SWATCH_H)
            swatch_boxes.append(sbox)
            add(ObjectClass.LEGEND_PREVIEW, sbox)
            _check_rendered(series_names[s])
            lbox = font.draw_word(canvas, legend_x + SWATCH_W + 8,
                                  top + SWATCH_H // 2 - font.word_height(2) // 2,
                                  series_names[s], 2, TEXT_COLOR)
            add(ObjectClass.LEGEND_LABEL, lbox, series_names[s])
        legend_box = swatch_boxes[0]
        for b in swatch_boxes[1:]:
            legend_box = enclosing(legend_box, b)
    else:
        series_names = [DEFAULT_COLUMN]
        legend_box = None

    # data values; floor keeps relative quantization error under the table
    # tolerances, ceiling keeps ink clear of the plot top
    lo_v, hi_v = spec.value_range
    span = hi_v - lo_v
    floor = max(lo_v + 0.08 * span, 110.0 * spec.tick_step / frame.tick_px)
    ceiling = lo_v + 0.92 * span

    def draw_values(min_py_gap: float) -> list[list[float]]:
        for _ in range(500):
            cols = []
            ok = True
            for _j in range(spec.categories):
                vals = [_round_sig3(rng.uniform(floor, ceiling))
                        for _s in range(spec.series)]
                pys = [round(scale.value_to_y(v)) for v in vals]
                if any(abs(a - b) < min_py_gap
                       for i, a in enumerate(pys) for b in pys[i + 1:]):
                    ok = False
                    break
                cols.append(vals)
            if ok:
                return cols
        raise SpecValidationError("could not separate data values vertically")

    values: list[list[float]]
    if spec.kind == PlotKind.VERTICAL_BAR:
        values = draw_values(0.0)
        group_w = spec.series * BAR_WIDTH + (spec.series - 1) * BAR_GAP
        for j, cx in enumerate(centers):
            gx = int(round(cx - group_w / 2))
            for s in range(spec.series):
                v = values[j][s]
                top = round(scale.value_to_y(v))
                x0 = gx + s * (BAR_WIDTH + BAR_GAP)
                bottom = ay - MIN_INK_GAP
                canvas[top:bottom, x0:x0 + BAR_WIDTH] = series_colors[s]
                add(ObjectClass.BAR, Box(x0, top, x0 + BAR_WIDTH, bottom))
    else:
        values = draw_values(MARKER_H + MIN_INK_GAP)
        for j, cx in enumerate(centers):
            mx = int(round(cx))
            for s in range(spec.series):
                v = values[j][s]
                cy = round(scale.value_to_y(v))
                x0, y0 = mx - MARKER_W // 2, cy - MARKER_H // 2
                canvas[y0:y0 + MARKER_H, x0:x0 + MARKER_W] = series_colors[s]
                add(ObjectClass.DOT_LINE, Box(x0, y0, x0 + MARKER_W,
                                              y0 + MARKER_H))

    table = PlotTable(
        row_headers=list(cat_labels),
        col_headers=list(series_names),
        values=[[values[j][s] for s in range(spec.series)]
                for j in range(spec.categories)],
    )
    layout = PlotLayout(spec.width, spec.height, frame.plot_box,
                        float(ay), float(ax), legend_box, scale)

    _validate_geometry(spec, annotations, frame)
    return RasterImage(canvas), annotations, table, layout


def _validate_geometry(spec: PlotSpec, annotations: list[Annotation],
                       frame: _Frame) -> None:
    """Generation-time guards for the invariants the rest of the system
    relies on; violations are generator bugs, not data."""
    check_non_overlapping(annotations)
    canvas_box = Box(0, 0, spec.width, spec.height)
    axis_boxes = (
        Box(frame.y_axis_x, frame.x_axis_y, frame.plot_x1,
            frame.x_axis_y + AXIS_THICKNESS),
        Box(frame.y_axis_x, frame.plot_y0, frame.y_axis_x + AXIS_THICKNESS,
            frame.x_axis_y + AXIS_THICKNESS),
    )
    for ann in annotations:
        if not canvas_box.contains_box(ann.box):
            raise SpecValidationError(f"annotation out of bounds: {ann}")
        if not MIN_OBJ_W <= ann.box.width <= MAX_OBJ_W:
            raise SpecValidationError(
                f"object width {ann.box.width} outside [{MIN_OBJ_W}, "
                f"{MAX_OBJ_W}]: {ann}")
        for axis_box in axis_boxes:
            if gap_distance(ann.box, axis_box) < MIN_INK_GAP - 1:
                raise SpecValidationError(f"annotation too close to axis: {ann}")
    for i, a in enumerate(annotations):
        for b in annotations[i + 1:]:
            if gap_distance(a.box, b.box) < 3:
                raise SpecValidationError(
                    f"objects {a.object_id} and {b.object_id} closer than "
                    f"3 px: edge components would merge")


def spec_for_index(base_seed: int, index: int) -> PlotSpec:
    """Deterministic corpus schedule: cycles kinds, series/category
    combinations, canvas sizes, tick scales and title styles."""
    kind = PlotKind.ALL[index % 2]
    series = 1 + (index // 2) % 3
    cats_options = {1: (2, 4, 6, 8), 2: (3, 4, 5, 6), 3: (2, 3, 4)}[series]
    categories = cats_options[(index // 6) % len(cats_options)]
    width, height = CANVAS_SIZES[(index // 3) % len(CANVAS_SIZES)]
    base, step = TICK_CONFIGS[(index // 4) % len(TICK_CONFIGS)]
    tick_count = 4 + (index // 5) % 3
    return PlotSpec(kind=kind, series=series, categories=categories,
                    tick_base=base, tick_step=step, tick_count=tick_count,
                    width=width, height=height,
                    palette_offset=index % len(PALETTE),
                    title_style=(index // 7) % 2, seed=base_seed + index)


@dataclass(frozen=True)
class CorpusEntry:
    image: str
    annotations: str
    table: str
    seed: int


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple[CorpusEntry, ...]


def gen_corpus(n: int, base_seed: int, out_dir) -> CorpusManifest:
    """Write n plots (PNG + annotation JSON + table JSON) and a manifest
    into out_dir; seeds run from base_seed upward."""
    from . import serialize

    if n < 1:
        raise SpecValidationError(f"corpus size must be >= 1, got {n}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(n):
        spec = spec_for_index(base_seed, i)
        img, annotations, table, layout = generate_plot(spec)
        stem = f"plot_{i:04d}"
        image_name = f"{stem}.png"
        serialize.write_png(out / image_name, img)
        serialize.write_json(out / f"{stem}.ann.json",
                             serialize.annotations_to_obj(image_name, img,
                                                          annotations, layout))
        serialize.write_json(out / f"{stem}.table.json",
                             serialize.table_to_obj(table))
        entries.append(CorpusEntry(image_name, f"{stem}.ann.json",
                                   f"{stem}.table.json", spec.seed))
    manifest = CorpusManifest(tuple(entries))
    serialize.write_json(out / "manifest.json",
                         serialize.manifest_to_obj(manifest))
    return manifest
