import math

import pytest
from hypothesis import given, strategies as st

from plotkit.geometry import (
    Box, center_distance_sq, enclosing, gap_distance, intersection_area, iou,
)


def pixel_count_iou(a: Box, b: Box) -> float:
    """Brute-force oracle: count integer pixels under the half-open
    convention. Only valid for integer-coordinate boxes."""
    pix_a = {(x, y) for x in range(int(a.x0), int(a.x1))
             for y in range(int(a.y0), int(a.y1))}
    pix_b = {(x, y) for x in range(int(b.x0), int(b.x1))
             for y in range(int(b.y0), int(b.y1))}
    union = pix_a | pix_b
    if not union:
        return 0.0
    return len(pix_a & pix_b) / len(union)


int_boxes = st.builds(
    lambda x0, y0, w, h: Box(x0, y0, x0 + w, y0 + h),
    st.integers(-20, 20), st.integers(-20, 20),
    st.integers(0, 25), st.integers(0, 25),
)

float_boxes = st.builds(
    lambda x0, y0, w, h: Box(x0, y0, x0 + w, y0 + h),
    st.floats(-50, 50), st.floats(-50, 50),
    st.floats(0, 60), st.floats(0, 60),
)


def test_box_rejects_negative_extent():
    with pytest.raises(ValueError):
        Box(10, 0, 0, 5)
    with pytest.raises(ValueError):
        Box(0, 10, 5, 0)


def test_zero_area_box_allowed():
    b = Box(3, 3, 3, 7)
    assert b.area == 0.0


def test_iou_identity():
    b = Box(0, 0, 10, 10)
    assert iou(b, b) == 1.0


def test_iou_disjoint():
    assert iou(Box(0, 0, 10, 10), Box(20, 20, 30, 30)) == 0.0


def test_iou_partial_overlap():
    # inter = 25, union = 175
    got = iou(Box(0, 0, 10, 10), Box(5, 5, 15, 15))
    assert got == pytest.approx(25 / 175, abs=1e-12)


def test_iou_degenerate_is_zero():
    point = Box(5, 5, 5, 5)
    assert iou(point, point) == 0.0
    assert iou(point, Box(0, 0, 10, 10)) == 0.0


def test_enclosing_examples():
    assert enclosing(Box(0, 0, 1, 1), Box(0, 0, 1, 1)) == Box(0, 0, 1, 1)
    assert enclosing(Box(0, 0, 10, 10), Box(5, 5, 15, 15)) == Box(0, 0, 15, 15)
    assert enclosing(Box(0, 0, 1, 1), Box(9, 9, 10, 10)) == Box(0, 0, 10, 10)


def test_center_distance_sq_examples():
    b = Box(1, 2, 7, 9)
    assert center_distance_sq(b, b) == 0.0
    assert center_distance_sq(Box(0, 0, 2, 2), Box(4, 0, 6, 2)) == 16.0
    assert center_distance_sq(Box(0, 0, 2, 2), Box(0, 4, 2, 6)) == 16.0


@given(int_boxes, int_boxes)
def test_iou_matches_pixel_counting_oracle(a, b):
    assert iou(a, b) == pytest.approx(pixel_count_iou(a, b), abs=1e-9)


@given(float_boxes, float_boxes)
def test_iou_symmetric(a, b):
    assert iou(a, b) == pytest.approx(iou(b, a), abs=1e-12)


@given(float_boxes, float_boxes)
def test_iou_bounded_by_area_ratio(a, b):
    if a.area <= 0 or b.area <= 0:
        return
    hi = min(a.area, b.area) / max(a.area, b.area)
    val = iou(a, b)
    assert 0.0 <= val <= hi + 1e-12


@given(float_boxes, float_boxes)
def test_enclosing_contains_both(a, b):
    c = enclosing(a, b)
    assert c.contains_box(a) and c.contains_box(b)
    assert c.area >= max(a.area, b.area) - 1e-12


@given(float_boxes)
def test_iou_self_is_one_for_positive_area(b):
    if b.area > 0:
        assert iou(b, b) == pytest.approx(1.0, abs=1e-12)


def test_intersection_area_touching_edges_is_zero():
    assert intersection_area(Box(0, 0, 5, 5), Box(5, 0, 10, 5)) == 0.0


def test_gap_distance():
    assert gap_distance(Box(0, 0, 5, 5), Box(2, 2, 8, 8)) == 0.0
    assert gap_distance(Box(0, 0, 5, 5), Box(8, 0, 12, 5)) == 3.0
    assert gap_distance(Box(0, 0, 5, 5), Box(8, 9, 12, 12)) == 4.0


def test_inflate():
    assert Box(2, 2, 8, 8).inflate(3) == Box(-1, -1, 11, 11)
    assert Box(2, 2, 8, 8).inflate(-1) == Box(3, 3, 7, 7)
    assert math.isclose(Box(0, 0, 4, 4).inflate(-2).area, 0.0)
