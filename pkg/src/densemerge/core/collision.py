"""Oriented-rectangle collision via the separating axis test."""

from __future__ import annotations

import math

import numpy as np

from .types import ValidationError, VehicleState


def rectangle_corners(x: float, y: float, theta: float, length: float, width: float) -> np.ndarray:
    """Corner coordinates (4, 2) of a centered, rotated rectangle."""
    hl, hw = length / 2.0, width / 2.0
    c, s = math.cos(theta), math.sin(theta)
    local = np.array([(hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw)])
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T + (x, y)


def _sat_margin(a: VehicleState, b: VehicleState) -> float:
    """Largest projected gap over the four candidate axes.

    Positive means a separating axis exists with that clearance; negative is
    the penetration depth (rectangles: max over face normals is exact).
    """
    ca = rectangle_corners(a.x, a.y, a.theta, a.length, a.width)
    cb = rectangle_corners(b.x, b.y, b.theta, b.length, b.width)
    best = -math.inf
    for theta in (a.theta, a.theta + math.pi / 2, b.theta, b.theta + math.pi / 2):
        ax, ay = math.cos(theta), math.sin(theta)
        pa = ca[:, 0] * ax + ca[:, 1] * ay
        pb = cb[:, 0] * ax + cb[:, 1] * ay
        gap = max(pb.min() - pa.max(), pa.min() - pb.max())
        best = max(best, gap)
    return best


def check_collision(a: VehicleState, b: VehicleState) -> bool:
    """True iff the two oriented body rectangles overlap."""
    for s in (a, b):
        if s.length <= 0 or s.width <= 0:
            raise ValidationError("collision check requires positive dimensions")
    # Cheap circumscribed-circle reject before the axis tests.
    r = math.hypot(a.length, a.width) / 2 + math.hypot(b.length, b.width) / 2
    if math.hypot(b.x - a.x, b.y - a.y) > r:
        return False
    return _sat_margin(a, b) <= 0.0


def sat_margin(a: VehicleState, b: VehicleState) -> float:
    """Signed clearance between the two body rectangles (negative inside)."""
    return _sat_margin(a, b)
