"""Box-regression loss family with analytic gradients.

Implements smooth-L1 plus the IOU-family losses (1-IOU, -log IOU, GIOU,
DIOU, CIOU, FIOU and the smooth-L1 + FIOU sum). Every loss returns both its
value and the exact partial derivatives with respect to the predicted box
coordinates (x0, y0, x1, y1), validated against central finite differences.

FIOU scales the -log IOU penalty by (1 + IOU)^gamma so the loss stays
non-negligible for well-localized boxes; gamma defaults to 2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .geometry import Box

Grad = tuple[float, float, float, float]

_ZERO: Grad = (0.0, 0.0, 0.0, 0.0)


class LossKind(enum.Enum):
    SMOOTH_L1 = "sl1"
    ONE_MINUS_IOU = "1-iou"
    NEG_LOG_IOU = "-log-iou"
    GIOU = "giou"
    DIOU = "diou"
    CIOU = "ciou"
    FIOU = "fiou"
    CUSTOM = "custom"


class InvalidLossParameter(ValueError):
    pass


@dataclass(frozen=True)
class LossSpec:
    """Loss selection plus its scalar knobs.

    gamma is the FIOU focusing exponent, epsilon the IOU clamp floor that
    keeps log/ratio terms finite for non-overlapping boxes, and image_size
    the normalizer for smooth-L1 coordinate differences.
    """

    kind: LossKind
    gamma: float = 2.0
    epsilon: float = 1e-7
    image_size: float = 650.0

    def __post_init__(self) -> None:
        if self.gamma <= 0.0:
            raise InvalidLossParameter(f"gamma must be > 0, got {self.gamma}")
        if self.epsilon <= 0.0:
            raise InvalidLossParameter(f"epsilon must be > 0, got {self.epsilon}")
        if self.image_size <= 0.0:
            raise InvalidLossParameter(f"image_size must be > 0, got {self.image_size}")


@dataclass(frozen=True)
class LossValue:
    value: float
    gradient: Grad


def _add(a: Grad, b: Grad, sa: float = 1.0, sb: float = 1.0) -> Grad:
    return (sa * a[0] + sb * b[0], sa * a[1] + sb * b[1],
            sa * a[2] + sb * b[2], sa * a[3] + sb * b[3])


def _scale(a: Grad, s: float) -> Grad:
    return (s * a[0], s * a[1], s * a[2], s * a[3])


def _area_grad(p: Box) -> tuple[float, Grad]:
    w, h = p.width, p.height
    return w * h, (-h, -w, h, w)


def _intersection_grad(p: Box, t: Box) -> tuple[float, Grad]:
    ix0, iy0 = max(p.x0, t.x0), max(p.y0, t.y0)
    ix1, iy1 = min(p.x1, t.x1), min(p.y1, t.y1)
    iw, ih = ix1 - ix0, iy1 - iy0
    if iw <= 0.0 or ih <= 0.0:
        return 0.0, _ZERO
    # d max(p,t)/dp = 1 iff p is the argmax (ties resolved to pred).
    g = (-(ih if p.x0 >= t.x0 else 0.0),
         -(iw if p.y0 >= t.y0 else 0.0),
         ih if p.x1 <= t.x1 else 0.0,
         iw if p.y1 <= t.y1 else 0.0)
    return iw * ih, g


def _enclosing_dims_grad(p: Box, t: Box) -> tuple[float, Grad, float, Grad]:
    wc = max(p.x1, t.x1) - min(p.x0, t.x0)
    hc = max(p.y1, t.y1) - min(p.y0, t.y0)
    gw = (-(1.0 if p.x0 <= t.x0 else 0.0), 0.0,
          1.0 if p.x1 >= t.x1 else 0.0, 0.0)
    gh = (0.0, -(1.0 if p.y0 <= t.y0 else 0.0),
          0.0, 1.0 if p.y1 >= t.y1 else 0.0)
    return wc, gw, hc, gh


def _iou_grad(p: Box, t: Box) -> tuple[float, Grad, float, Grad]:
    """Raw IOU and union with gradients w.r.t. the predicted box."""
    inter, g_inter = _intersection_grad(p, t)
    area_p, g_area = _area_grad(p)
    union = area_p + t.area - inter
    g_union = _add(g_area, g_inter, 1.0, -1.0)
    if union <= 0.0:
        return 0.0, _ZERO, union, g_union
    u = inter / union
    gu = _add(g_inter, g_union, 1.0 / union, -inter / (union * union))
    return u, gu, union, g_union


def _clamped_iou(spec: LossSpec, p: Box, t: Box) -> tuple[float, Grad, float, Grad]:
    u, gu, union, g_union = _iou_grad(p, t)
    if u <= spec.epsilon:
        return spec.epsilon, _ZERO, union, g_union
    if u >= 1.0:
        return 1.0, _ZERO, union, g_union
    return u, gu, union, g_union


def smooth_l1(pred: Box, target: Box, image_size: float) -> LossValue:
    """Sum over the 4 coordinates of the Huber-style h(d): quadratic for
    |d| < 1, linear beyond, with d the coordinate difference / image_size."""
    if image_size <= 0.0:
        raise InvalidLossParameter(f"image_size must be > 0, got {image_size}")
    value = 0.0
    grad = [0.0, 0.0, 0.0, 0.0]
    for i, (pc, tc) in enumerate(zip(pred.as_tuple(), target.as_tuple())):
        d = (pc - tc) / image_size
        if abs(d) < 1.0:
            value += 0.5 * d * d
            grad[i] = d / image_size
        else:
            value += abs(d) - 0.5
            grad[i] = math.copysign(1.0, d) / image_size
    return LossValue(value, (grad[0], grad[1], grad[2], grad[3]))


def _fiou_of_iou(u: float, gamma: float) -> tuple[float, float]:
    """FIOU value and dL/du at clamped IOU u."""
    scale = (1.0 + u) ** gamma
    log_u = math.log(u)
    value = -scale * log_u
    dvalue = -(gamma * (1.0 + u) ** (gamma - 1.0) * log_u + scale / u)
    return value, dvalue


def iou_family_loss(spec: LossSpec, pred: Box, target: Box) -> LossValue:
    """Evaluate the selected loss; see LossKind for the variants."""
    kind = spec.kind
    if kind is LossKind.SMOOTH_L1:
        return smooth_l1(pred, target, spec.image_size)
    if kind is LossKind.CUSTOM:
        sl1 = smooth_l1(pred, target, spec.image_size)
        fio = iou_family_loss(LossSpec(LossKind.FIOU, spec.gamma, spec.epsilon,
                                       spec.image_size), pred, target)
        return LossValue(sl1.value + fio.value, _add(sl1.gradient, fio.gradient))

    u, gu, union, g_union = _clamped_iou(spec, pred, target)

    if kind is LossKind.ONE_MINUS_IOU:
        return LossValue(1.0 - u, _scale(gu, -1.0))
    if kind is LossKind.NEG_LOG_IOU:
        return LossValue(-math.log(u), _scale(gu, -1.0 / u))
    if kind is LossKind.FIOU:
        value, dvalue = _fiou_of_iou(u, spec.gamma)
        return LossValue(value, _scale(gu, dvalue))

    wc, gwc, hc, ghc = _enclosing_dims_grad(pred, target)

    if kind is LossKind.GIOU:
        area_c = wc * hc
        g_area_c = _add(gwc, ghc, hc, wc)
        # penalty = (|C| - U) / |C|
        pen = (area_c - union) / area_c
        g_pen = _add(g_union, g_area_c, -1.0 / area_c, union / (area_c * area_c))
        return LossValue(1.0 - u + pen, _add(_scale(gu, -1.0), g_pen))

    # DIOU / CIOU share the center-distance term.
    pcx, pcy = pred.center
    tcx, tcy = target.center
    rho2 = (pcx - tcx) ** 2 + (pcy - tcy) ** 2
    g_rho2 = ((pcx - tcx), (pcy - tcy), (pcx - tcx), (pcy - tcy))
    c2 = wc * wc + hc * hc
    g_c2 = _add(gwc, ghc, 2.0 * wc, 2.0 * hc)
    if c2 <= 0.0:
        dist_term, g_dist = 0.0, _ZERO
    else:
        dist_term = rho2 / c2
        g_dist = _add(g_rho2, g_c2, 1.0 / c2, -rho2 / (c2 * c2))

    value = 1.0 - u + dist_term
    grad = _add(_scale(gu, -1.0), g_dist)
    if kind is LossKind.DIOU:
        return LossValue(value, grad)
    if kind is not LossKind.CIOU:
        raise InvalidLossParameter(f"unknown loss kind: {kind!r}")

    # CIOU aspect-ratio term, differentiated in full (alpha included).
    wp, hp = pred.width, pred.height
    q = math.atan2(target.width, target.height) - math.atan2(wp, hp)
    denom = wp * wp + hp * hp
    if denom <= 0.0:
        gq: Grad = _ZERO
    else:
        dq_dw = -hp / denom
        dq_dh = wp / denom
        gq = (-dq_dw, -dq_dh, dq_dw, dq_dh)
    v = (4.0 / math.pi ** 2) * q * q
    gv = _scale(gq, (8.0 / math.pi ** 2) * q)
    big_d = (1.0 - u) + v
    if big_d <= 0.0:
        return LossValue(value, grad)  # pred == target: term and grad vanish
    alpha = v / big_d
    g_big_d = _add(_scale(gu, -1.0), gv)
    g_alpha = _add(gv, g_big_d, 1.0 / big_d, -v / (big_d * big_d))
    g_av = _add(_scale(g_alpha, v), _scale(gv, alpha))
    return LossValue(value + alpha * v, _add(grad, g_av))


def gradient_check(spec: LossSpec, pred: Box, target: Box, step: float) -> float:
    """Max over the 4 pred coordinates of the relative disagreement between
    the analytic gradient and a central finite difference of size `step`."""
    if step <= 0.0:
        raise InvalidLossParameter(f"step must be > 0, got {step}")
    analytic = iou_family_loss(spec, pred, target).gradient
    worst = 0.0
    coords = list(pred.as_tuple())
    for i in range(4):
        plus = coords.copy()
        minus = coords.copy()
        plus[i] += step
        minus[i] -= step
        lp = iou_family_loss(spec, Box(*plus), target).value
        lm = iou_family_loss(spec, Box(*minus), target).value
        fd = (lp - lm) / (2.0 * step)
        err = abs(analytic[i] - fd) / max(1.0, abs(analytic[i]))
        worst = max(worst, err)
    return worst
