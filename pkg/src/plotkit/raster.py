"""Image loading and the CV region-proposal pipeline.

The proposal method draws edges with a 3x3 Laplacian, groups edge pixels
into 8-connected components, traces each component's outer boundary, and
emits the minimal up-right bounding rectangle per component. Computer
rendered plots have crisp edges, so a low threshold (default 8) suffices
even for thin markers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import Box

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

# Moore neighborhood in clockwise order starting West, as (dr, dc).
_CLOCKWISE = ((0, -1), (-1, -1), (-1, 0), (-1, 1),
              (0, 1), (1, 1), (1, 0), (1, -1))
_DIR_INDEX = {off: i for i, off in enumerate(_CLOCKWISE)}

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


class ImageDecodeError(ValueError):
    """Raised when a file exists but cannot be decoded as an image."""


@dataclass
class RasterImage:
    """8-bit RGB image, row-major (height, width, 3)."""

    array: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.array)
        if a.ndim != 3 or a.shape[2] != 3 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"expected (H, W, 3) pixel array, got shape {a.shape}")
        self.array = a.astype(np.uint8, copy=False)

    @property
    def width(self) -> int:
        return self.array.shape[1]

    @property
    def height(self) -> int:
        return self.array.shape[0]

    @property
    def bounds(self) -> Box:
        return Box(0, 0, self.width, self.height)

    def luma(self) -> np.ndarray:
        r, g, b = LUMA_WEIGHTS
        a = self.array.astype(np.float64)
        return r * a[:, :, 0] + g * a[:, :, 1] + b * a[:, :, 2]


@dataclass
class EdgeMap:
    """Binary per-pixel edge indicator, same shape as the source image."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.ndim != 2:
            raise ValueError("edge map must be 2-D")

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


@dataclass
class Contour:
    """Ordered outer-boundary pixels of one 8-connected edge component.

    Points are (x, y) integer pairs; consecutive points are 8-adjacent.
    """

    id: int
    points: list[tuple[int, int]]

    def bounding_box(self) -> Box:
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        return Box(min(xs), min(ys), max(xs) + 1, max(ys) + 1)


@dataclass(frozen=True)
class Proposal:
    box: Box
    source_contour: int


@dataclass(frozen=True)
class ProposalConfig:
    edge_threshold: float = 8.0
    min_side_px: int = 3
    max_proposals: int = 500

    def __post_init__(self) -> None:
        if not 0 <= self.edge_threshold <= 255:
            raise ValueError(f"edge_threshold out of range: {self.edge_threshold}")
        if self.min_side_px < 1:
            raise ValueError(f"min_side_px must be >= 1, got {self.min_side_px}")
        if self.max_proposals < 1:
            raise ValueError(f"max_proposals must be >= 1, got {self.max_proposals}")


def load_image(path) -> RasterImage:
    """Decode a PNG (or any Pillow-readable) file; alpha is composited
    over white. Missing files raise OSError, undecodable ones
    ImageDecodeError."""
    from PIL import Image, UnidentifiedImageError

    with open(path, "rb") as fh:
        try:
            with Image.open(fh) as im:
                im.load()
                if im.mode in ("RGBA", "LA", "PA") or (
                        im.mode == "P" and "transparency" in im.info):
                    rgba = im.convert("RGBA")
                    bg = Image.new("RGBA", rgba.size, (255, 255, 255, 255))
                    im = Image.alpha_composite(bg, rgba).convert("RGB")
                else:
                    im = im.convert("RGB")
                return RasterImage(np.asarray(im))
        except (UnidentifiedImageError, SyntaxError, ValueError, OSError) as exc:
            # the file was already opened, so OSError here is a decode failure
            raise ImageDecodeError(f"cannot decode {path}: {exc}") from exc


def laplacian_edges(img: RasterImage, threshold: float = 8.0) -> EdgeMap:
    """Mark pixels where the absolute response of the 3x3 Laplacian
    [[0,1,0],[1,-4,1],[0,1,0]] on the luma channel reaches `threshold`.
    Borders are replicate-padded, so constant images produce no edges."""
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold out of range: {threshold}")
    lum = img.luma()
    padded = np.pad(lum, 1, mode="edge")
    response = (padded[:-2, 1:-1] + padded[2:, 1:-1]
                + padded[1:-1, :-2] + padded[1:-1, 2:]
                - 4.0 * lum)
    return EdgeMap(np.abs(response) >= threshold)


def _label_components(edges: EdgeMap) -> tuple[np.ndarray, list[int], np.ndarray]:
    """Label 8-connected edge components; returns the label image, the
    labels ordered by first pixel in raster order (top-to-bottom then
    left-to-right), and the first flat index per label."""
    labels, count = ndimage.label(edges.bits, structure=_EIGHT_CONNECTED)
    if count == 0:
        return labels, [], np.empty(0, dtype=np.int64)
    flat = labels.ravel()
    first = np.full(count + 1, flat.size, dtype=np.int64)
    np.minimum.at(first, flat, np.arange(flat.size, dtype=np.int64))
    order = sorted(range(1, count + 1), key=lambda lbl: first[lbl])
    return labels, order, first


def _trace_component(padded: np.ndarray, label: int,
                     r0: int, c0: int) -> list[tuple[int, int]]:
    """Moore-neighbor boundary trace with Jacob's stopping criterion.

    `padded` carries a zero border so neighbor lookups need no bounds
    checks; (r0, c0) is the component's raster-first pixel in padded
    coordinates, whose west and north neighbors are guaranteed outside
    the component.
    """
    contour = [(r0, c0)]
    cur = (r0, c0)
    back = (r0, c0 - 1)
    first_pair = None
    limit = 4 * padded.size
    for _ in range(limit):
        bd = _DIR_INDEX[(back[0] - cur[0], back[1] - cur[1])]
        nxt = None
        prev = back
        for k in range(1, 9):
            d = _CLOCKWISE[(bd + k) % 8]
            cand = (cur[0] + d[0], cur[1] + d[1])
            if padded[cand] == label:
                nxt = cand
                break
            prev = cand
        if nxt is None:
            return contour  # isolated pixel
        pair = (cur, nxt)
        if first_pair is None:
            first_pair = pair
        elif pair == first_pair:
            break
        contour.append(nxt)
        cur, back = nxt, prev
    if len(contour) > 1 and contour[-1] == contour[0]:
        contour.pop()
    return contour


def trace_contours(edges: EdgeMap) -> list[Contour]:
    """Outer boundary of every 8-connected edge component, ordered by the
    component's first pixel in raster order."""
    labels, order, first = _label_components(edges)
    if not order:
        return []
    padded = np.pad(labels, 1)
    width = labels.shape[1]
    contours = []
    for ordinal, lbl in enumerate(order):
        r, c = divmod(int(first[lbl]), width)
        points = _trace_component(padded, lbl, r + 1, c + 1)
        contours.append(Contour(ordinal, [(c - 1, r - 1) for r, c in points]))
    return contours


def propose_regions(img: RasterImage,
                    cfg: ProposalConfig = ProposalConfig()) -> list[Proposal]:
    """Full pipeline: Laplacian edges -> 8-connected components -> minimal
    up-right bounding rectangle per component (half-open, so +1 past the
    max pixel). Boxes with a side below min_side_px are dropped, duplicates
    collapse to the lowest contour id, and the result is capped at
    max_proposals keeping largest areas first."""
    edges = laplacian_edges(img, cfg.edge_threshold)
    labels, order, _ = _label_components(edges)
    if not order:
        return []
    slices = ndimage.find_objects(labels)
    seen: dict[tuple, int] = {}
    proposals = []
    for ordinal, lbl in enumerate(order):
        rows, cols = slices[lbl - 1]
        box = Box(float(cols.start), float(rows.start),
                  float(cols.stop), float(rows.stop))
        if box.width < cfg.min_side_px or box.height < cfg.min_side_px:
            continue
        key = box.as_tuple()
        if key in seen:
            continue
        seen[key] = ordinal
        proposals.append(Proposal(box, ordinal))
    proposals.sort(key=lambda p: (-p.box.area, p.source_contour))
    return proposals[:cfg.max_proposals]
