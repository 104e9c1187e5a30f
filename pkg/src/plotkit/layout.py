"""Shared plot-layout model: axis positions, plot area, legend region.

Produced in two ways: exactly by the synthetic generator (which also
records the value-to-pixel transform) and approximately by the detector's
layout inference. Consumers only rely on the fields both sides fill in.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Box


@dataclass(frozen=True)
class ValueScale:
    """Affine value <-> pixel map along the y axis: larger values sit
    higher on the canvas (smaller y)."""

    ref_value: float
    ref_y: float
    px_per_unit: float

    def value_to_y(self, value: float) -> float:
        return self.ref_y - (value - self.ref_value) * self.px_per_unit

    def y_to_value(self, y: float) -> float:
        return self.ref_value + (self.ref_y - y) / self.px_per_unit


@dataclass(frozen=True)
class PlotLayout:
    width: int
    height: int
    plot_box: Box          # data region: right of the y axis, above the x axis
    x_axis_y: float        # top pixel row of the x-axis line
    y_axis_x: float        # left pixel column of the y-axis line
    legend_box: Box | None = None
    value_scale: ValueScale | None = None   # generator-only ground truth
