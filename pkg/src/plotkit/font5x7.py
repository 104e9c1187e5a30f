"""Embedded 5x7 bitmap font and deterministic text rendering.

Glyphs are drawn as scaled blocks with a fixed 2 px gap between characters
and a 10 px gap between words, independent of scale. The tight gap keeps
the Laplacian edge rings of adjacent characters 8-connected, so each
rendered word forms exactly one edge component and therefore one region
proposal. Whether two specific glyphs chain together depends on where
their outermost columns carry ink; `word_is_chain_connected` checks that
condition so callers can validate every string they intend to render.

All digits span the full 7 design rows, which keeps the ink box of a
numeric label exactly 7 * scale tall and symmetric about its center.
"""

from __future__ import annotations

import numpy as np

from .geometry import Box, enclosing

CHAR_GAP_PX = 2
WORD_GAP_PX = 10
GLYPH_COLS = 5
GLYPH_ROWS = 7

_RAW = {
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".###."),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"),
    "J": ("#####", "....#", "....#", "....#", "#...#", "#...#", ".###."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", ".#.#.", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", "#####"),
    "2": (".###.", "#...#", "....#", "..##.", ".#...", "#....", "#####"),
    "3": ("#####", "....#", "...#.", "..##.", "....#", "#...#", ".###."),
    "4": ("...##", "..#.#", ".#..#", "#...#", "#####", "....#", "....#"),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": (".###.", "#....", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "....#", ".###."),
}

GLYPHS: dict[str, np.ndarray] = {
    ch: np.array([[c == "#" for c in row] for row in rows], dtype=bool)
    for ch, rows in _RAW.items()
}


def _ink_rows(glyph: np.ndarray, col: int) -> np.ndarray:
    return np.flatnonzero(glyph[:, col])


def glyphs_chain(left: str, right: str) -> bool:
    """True when `left` immediately followed by `right` stays a single
    edge component: the rightmost ink rows of `left` must come within one
    design row of the leftmost ink rows of `right`."""
    rows_a = _ink_rows(GLYPHS[left], GLYPH_COLS - 1)
    rows_b = _ink_rows(GLYPHS[right], 0)
    if rows_a.size == 0 or rows_b.size == 0:
        return False
    return int(np.min(np.abs(rows_a[:, None] - rows_b[None, :]))) <= 1


def word_is_chain_connected(word: str) -> bool:
    if any(ch not in GLYPHS for ch in word):
        raise KeyError(f"unsupported characters in {word!r}")
    return all(glyphs_chain(a, b) for a, b in zip(word, word[1:]))


def word_width(word: str, scale: int) -> int:
    n = len(word)
    return n * GLYPH_COLS * scale + (n - 1) * CHAR_GAP_PX


def word_height(scale: int) -> int:
    return GLYPH_ROWS * scale


def text_width(text: str, scale: int) -> int:
    words = text.split()
    return (sum(word_width(w, scale) for w in words)
            + (len(words) - 1) * WORD_GAP_PX)


def draw_word(canvas: np.ndarray, x: int, y: int, word: str, scale: int,
              rgb: tuple[int, int, int]) -> Box:
    """Render one word with its cell top-left at (x, y); returns the ink
    bounding box (cell-exact because every glyph reaches the outer
    columns and all used glyphs span the full row range)."""
    cx = x
    min_r, max_r = GLYPH_ROWS, -1
    for ch in word:
        glyph = GLYPHS[ch]
        rows = np.flatnonzero(glyph.any(axis=1))
        min_r = min(min_r, int(rows[0]))
        max_r = max(max_r, int(rows[-1]))
        big = np.kron(glyph, np.ones((scale, scale), dtype=bool))
        h, w = big.shape
        region = canvas[y:y + h, cx:cx + w]
        region[big] = rgb
        cx += GLYPH_COLS * scale + CHAR_GAP_PX
    return Box(x, y + min_r * scale, cx - CHAR_GAP_PX, y + (max_r + 1) * scale)


def draw_text(canvas: np.ndarray, x: int, y: int, text: str, scale: int,
              rgb: tuple[int, int, int] = (0, 0, 0)) -> tuple[Box, list[Box]]:
    """Render a space-separated string; returns (full ink box, per-word
    ink boxes)."""
    word_boxes = []
    cx = x
    for word in text.split():
        box = draw_word(canvas, cx, y, word, scale, rgb)
        word_boxes.append(box)
        cx += word_width(word, scale) + WORD_GAP_PX
    full = word_boxes[0]
    for b in word_boxes[1:]:
        full = enclosing(full, b)
    return full, word_boxes


def draw_stacked_text(canvas: np.ndarray, x: int, y: int, text: str,
                      scale: int, rgb: tuple[int, int, int] = (0, 0, 0),
                      line_gap: int = WORD_GAP_PX) -> tuple[Box, list[Box]]:
    """Render words stacked vertically (one word per line), left-aligned;
    used for the y-axis label strip."""
    word_boxes = []
    cy = y
    for word in text.split():
        box = draw_word(canvas, x, cy, word, scale, rgb)
        word_boxes.append(box)
        cy += word_height(scale) + line_gap
    full = word_boxes[0]
    for b in word_boxes[1:]:
        full = enclosing(full, b)
    return full, word_boxes
