import math
import random

import pytest

from plotkit.geometry import Box, iou
from plotkit.losses import (
    InvalidLossParameter, LossKind, LossSpec, gradient_check, iou_family_loss,
    smooth_l1,
)

ALL_KINDS = list(LossKind)
IOU_KINDS = [k for k in ALL_KINDS if k is not LossKind.SMOOTH_L1]


def make_smooth_pair(rng: random.Random) -> tuple[Box, Box]:
    """Random overlapping pred/target pair away from every gradient kink:
    all coordinate pairs differ by at least 0.5 and the overlap is real."""
    while True:
        tx0 = rng.uniform(0, 80)
        ty0 = rng.uniform(0, 80)
        tw = rng.uniform(15, 60)
        th = rng.uniform(15, 60)
        target = Box(tx0, ty0, tx0 + tw, ty0 + th)
        shifts = [rng.uniform(1.0, 6.0) * rng.choice([-1, 1]) for _ in range(4)]
        pred = Box(tx0 + shifts[0], ty0 + shifts[1],
                   tx0 + tw + shifts[2], ty0 + th + shifts[3])
        if pred.width < 2 or pred.height < 2:
            continue
        if min(abs(s) for s in shifts) < 0.5:
            continue
        u = iou(pred, target)
        if 0.05 < u < 0.98:
            return pred, target


def numeric_gradient(spec: LossSpec, pred: Box, target: Box, step=1e-4):
    """Independent central-difference gradient (own code path, not the
    library's gradient_check)."""
    grads = []
    c = list(pred.as_tuple())
    for i in range(4):
        hi, lo = c.copy(), c.copy()
        hi[i] += step
        lo[i] -= step
        grads.append((iou_family_loss(spec, Box(*hi), target).value
                      - iou_family_loss(spec, Box(*lo), target).value) / (2 * step))
    return grads


def test_smooth_l1_zero_at_identity():
    b = Box(10, 10, 50, 60)
    lv = smooth_l1(b, b, 650)
    assert lv.value == 0.0
    assert lv.gradient == (0.0, 0.0, 0.0, 0.0)


def test_smooth_l1_quadratic_branch():
    # normalized diff of 0.5 on every coordinate -> 4 * 0.5 * 0.25 = 0.5
    pred = Box(50, 50, 150, 150)
    target = Box(0, 0, 100, 100)
    assert smooth_l1(pred, target, 100).value == pytest.approx(0.5, abs=1e-12)


def test_smooth_l1_linear_branch():
    # one coordinate 2.0 after normalization -> |d| - 0.5 = 1.5
    pred = Box(0, 0, 10, 210)
    target = Box(0, 0, 10, 10)
    assert smooth_l1(pred, target, 100).value == pytest.approx(1.5, abs=1e-12)


def test_fiou_reference_values():
    spec = LossSpec(LossKind.FIOU, gamma=2.0)
    same = Box(0, 0, 10, 10)
    assert iou_family_loss(spec, same, same).value == pytest.approx(0.0, abs=1e-12)
    # IOU = 0.5: boxes (0,0,10,10) vs (0,0,10,20) -> 100/200
    half = iou_family_loss(spec, Box(0, 0, 10, 10), Box(0, 0, 10, 20))
    assert half.value == pytest.approx(-(1.5 ** 2) * math.log(0.5), abs=1e-12)
    assert half.value == pytest.approx(1.559581, abs=1e-5)
    # IOU = 0.9: (0,0,10,18) vs (0,0,10,20) -> 180/200
    nine = iou_family_loss(spec, Box(0, 0, 10, 18), Box(0, 0, 10, 20))
    assert nine.value == pytest.approx(0.380352, abs=1e-5)


def test_giou_hand_computed():
    lv = iou_family_loss(LossSpec(LossKind.GIOU),
                         Box(0, 0, 10, 10), Box(5, 5, 15, 15))
    assert lv.value == pytest.approx(1 - 25 / 175 + 50 / 225, abs=1e-12)
    assert lv.value == pytest.approx(1.079365, abs=1e-6)


def test_one_minus_iou_identity():
    b = Box(3, 4, 33, 44)
    assert iou_family_loss(LossSpec(LossKind.ONE_MINUS_IOU), b, b).value == 0.0


@pytest.mark.parametrize("kind", IOU_KINDS)
def test_zero_at_identity_positive_otherwise(kind):
    spec = LossSpec(kind)
    b = Box(10, 20, 60, 90)
    assert iou_family_loss(spec, b, b).value == pytest.approx(0.0, abs=1e-9)
    rng = random.Random(7)
    for _ in range(25):
        pred, target = make_smooth_pair(rng)
        assert iou_family_loss(spec, pred, target).value > 0.0


def test_gamma_must_be_positive():
    with pytest.raises(InvalidLossParameter):
        LossSpec(LossKind.FIOU, gamma=0.0)
    with pytest.raises(InvalidLossParameter):
        LossSpec(LossKind.FIOU, gamma=-1.5)


def test_non_overlapping_boxes_stay_finite():
    a = Box(0, 0, 10, 10)
    b = Box(100, 100, 120, 130)
    for kind in IOU_KINDS:
        v = iou_family_loss(LossSpec(kind), a, b).value
        assert math.isfinite(v) and v > 0


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_gradient_matches_finite_differences(kind):
    spec = LossSpec(kind)
    rng = random.Random(12345)
    for _ in range(100):
        pred, target = make_smooth_pair(rng)
        err = gradient_check(spec, pred, target, step=1e-4)
        assert err < 1e-5, (kind, pred, target, err)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_gradient_against_independent_fd(kind):
    spec = LossSpec(kind)
    rng = random.Random(99)
    pred, target = make_smooth_pair(rng)
    analytic = iou_family_loss(spec, pred, target).gradient
    numeric = numeric_gradient(spec, pred, target)
    for a, n in zip(analytic, numeric):
        assert a == pytest.approx(n, abs=1e-6, rel=1e-5)


def test_sl1_gradient_zero_at_minimum():
    b = Box(5, 5, 105, 105)
    err = gradient_check(LossSpec(LossKind.SMOOTH_L1), b, b, step=1e-4)
    assert err < 1e-7


def test_fiou_monotone_decreasing_for_moderate_gamma():
    # true only for gamma <= ~3.59; gamma = 4 genuinely reverses around
    # IOU ~ 0.15-0.45 (see test_fiou_gamma4_counterexample)
    grid = [0.05 * i for i in range(1, 20)]
    for gamma in [0.85, 1.0, 1.25, 1.5, 1.75, 2.0, 3.0, 3.5]:
        vals = [-((1 + u) ** gamma) * math.log(u) for u in grid]
        assert all(a > b for a, b in zip(vals, vals[1:])), gamma


def test_fiou_gamma4_counterexample():
    # locks in the known non-monotonicity of -(1+u)^4 * log(u)
    lo = -((1 + 0.15) ** 4) * math.log(0.15)
    hi = -((1 + 0.20) ** 4) * math.log(0.20)
    assert hi > lo


def test_fiou_increases_with_gamma():
    for u in [0.05 * i for i in range(1, 20)]:
        vals = [-((1 + u) ** g) * math.log(u)
                for g in [0.85, 1.0, 1.25, 1.5, 1.75, 2.0, 3.0, 4.0]]
        assert all(a < b for a, b in zip(vals, vals[1:])), u


def test_fiou_dominates_neg_log_iou():
    rng = random.Random(3)
    for _ in range(50):
        pred, target = make_smooth_pair(rng)
        for gamma in [0.85, 2.0, 4.0]:
            f = iou_family_loss(LossSpec(LossKind.FIOU, gamma=gamma), pred, target)
            n = iou_family_loss(LossSpec(LossKind.NEG_LOG_IOU), pred, target)
            assert f.value >= n.value


def test_giou_at_least_one_minus_iou():
    rng = random.Random(4)
    for _ in range(50):
        pred, target = make_smooth_pair(rng)
        g = iou_family_loss(LossSpec(LossKind.GIOU), pred, target).value
        o = iou_family_loss(LossSpec(LossKind.ONE_MINUS_IOU), pred, target).value
        assert g >= o - 1e-12


def test_custom_is_sum_of_parts():
    rng = random.Random(5)
    pred, target = make_smooth_pair(rng)
    c = iou_family_loss(LossSpec(LossKind.CUSTOM), pred, target)
    s = smooth_l1(pred, target, 650.0)
    f = iou_family_loss(LossSpec(LossKind.FIOU), pred, target)
    assert c.value == pytest.approx(s.value + f.value, abs=1e-12)
    for gc, gs, gf in zip(c.gradient, s.gradient, f.gradient):
        assert gc == pytest.approx(gs + gf, abs=1e-12)
