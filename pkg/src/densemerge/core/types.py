"""Shared domain types: vehicles, controls, frames, road geometry."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

# Simulation cadence is 10 Hz everywhere; all finite differences use this step.
DT = 0.1

# Vehicles longer than this are classified as long vehicles.
LONG_VEHICLE_MIN_LENGTH = 6.0

# Default body dimensions (length, width) in meters.
SHORT_VEHICLE_DIMS = (4.7, 1.9)
LONG_VEHICLE_DIMS = (11.5, 2.5)

MAX_SPEED = 40.0         # sanity bound on any vehicle speed, m/s
MAX_ACCEL = 8.0          # |longitudinal accel| bound for controls, m/s^2
MAX_STEER = 0.6          # |front wheel angle| bound, rad


class StyleLabel(enum.Enum):
    OFFENSIVE = "offensive"
    FRIENDLY = "friendly"
    LONG = "long"


class Lane(enum.Enum):
    MAIN = "main"
    MERGE = "merge"


class ValidationError(ValueError):
    """Raised when a domain object violates its invariants."""


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValidationError(f"{name}: non-finite value {v!r}")


@dataclass(frozen=True)
class VehicleState:
    """Pose, velocity, acceleration, dimensions and style of one agent at one tick."""

    x: float
    y: float
    theta: float
    vx: float
    vy: float
    ax: float
    ay: float
    length: float
    width: float
    label: StyleLabel
    lane: Lane

    def __post_init__(self) -> None:
        _require_finite("VehicleState", self.x, self.y, self.theta, self.vx,
                        self.vy, self.ax, self.ay, self.length, self.width)
        if self.length <= 0 or self.width <= 0:
            raise ValidationError(f"non-positive dimensions {self.length}x{self.width}")
        if self.label is StyleLabel.LONG:
            if self.length <= LONG_VEHICLE_MIN_LENGTH:
                raise ValidationError(f"long vehicle must exceed {LONG_VEHICLE_MIN_LENGTH} m, got {self.length}")
        elif self.length > LONG_VEHICLE_MIN_LENGTH:
            raise ValidationError(f"short vehicle must be at most {LONG_VEHICLE_MIN_LENGTH} m, got {self.length}")
        if self.speed > MAX_SPEED:
            raise ValidationError(f"speed {self.speed:.2f} exceeds {MAX_SPEED} m/s")

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)

    @property
    def accel_total(self) -> float:
        return math.hypot(self.ax, self.ay)


@dataclass(frozen=True)
class Control:
    """Ego actuation: longitudinal acceleration plus front-wheel angle.

    Values are clipped to the actuator bounds on application, not on construction.
    """

    accel: float
    steer: float

    def clipped(self) -> "Control":
        return Control(
            accel=min(max(self.accel, -MAX_ACCEL), MAX_ACCEL),
            steer=min(max(self.steer, -MAX_STEER), MAX_STEER),
        )


@dataclass(frozen=True)
class Frame:
    """A local coordinate frame: origin pose in the global frame."""

    origin_x: float
    origin_y: float
    origin_theta: float

    def __post_init__(self) -> None:
        _require_finite("Frame", self.origin_x, self.origin_y, self.origin_theta)


IDENTITY_FRAME = Frame(0.0, 0.0, 0.0)


def _as_polyline(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise ValidationError(f"polyline must be a non-empty (n, 2) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("polyline contains non-finite coordinates")
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise ValidationError("polyline waypoints must be strictly increasing in x")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class RoadGeometry:
    """One straight main lane plus one merge lane that tapers into it."""

    main_centerline: np.ndarray
    merge_centerline: np.ndarray
    lane_width: float
    merge_end_x: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "main_centerline", _as_polyline(self.main_centerline))
        object.__setattr__(self, "merge_centerline", _as_polyline(self.merge_centerline))
        if self.lane_width <= 0:
            raise ValidationError(f"lane_width must be positive, got {self.lane_width}")
        mx = self.merge_centerline[:, 0]
        if not (mx[0] <= self.merge_end_x <= mx[-1]):
            raise ValidationError(f"merge_end_x {self.merge_end_x} outside merge lane x-range [{mx[0]}, {mx[-1]}]")

    def centerline_y(self, lane: Lane, x: float | np.ndarray):
        """Lane centerline height at x; clamps to the polyline ends beyond them."""
        line = self.main_centerline if lane is Lane.MAIN else self.merge_centerline
        return np.interp(x, line[:, 0], line[:, 1])

    def lateral_offset(self, lane: Lane, x, y):
        """Signed offset from the lane centerline (positive toward +y)."""
        return y - self.centerline_y(lane, x)

    @property
    def lateral_bounds(self) -> tuple[float, float]:
        """(low, high) drivable y-extent across both lanes."""
        lo = min(float(self.main_centerline[:, 1].min()), float(self.merge_centerline[:, 1].min()))
        hi = max(float(self.main_centerline[:, 1].max()), float(self.merge_centerline[:, 1].max()))
        return lo - self.lane_width / 2, hi + self.lane_width / 2


# Default layout: straight 200 m main lane at y=0; merge lane parallel at
# y=-3.5 up to x=150, then a linear 10 m taper into the main lane. The merge
# lane length and taper shape are assumptions, not measured values; override
# via build_road if needed.
DEFAULT_LANE_WIDTH = 3.5
DEFAULT_MAIN_LENGTH = 200.0
DEFAULT_MERGE_END_X = 150.0
DEFAULT_TAPER_LENGTH = 10.0


def build_road(lane_width: float = DEFAULT_LANE_WIDTH,
               main_length: float = DEFAULT_MAIN_LENGTH,
               merge_end_x: float = DEFAULT_MERGE_END_X,
               taper_length: float = DEFAULT_TAPER_LENGTH) -> RoadGeometry:
    main = np.stack([np.linspace(0.0, main_length, 21), np.zeros(21)], axis=1)
    merge_y = -lane_width
    straight_x = np.linspace(0.0, merge_end_x, 16)
    taper_x = np.linspace(merge_end_x, merge_end_x + taper_length, 5)[1:]
    taper_y = merge_y * (1.0 - (taper_x - merge_end_x) / taper_length)
    merge = np.stack([
        np.concatenate([straight_x, taper_x]),
        np.concatenate([np.full_like(straight_x, merge_y), taper_y]),
    ], axis=1)
    return RoadGeometry(main_centerline=main, merge_centerline=merge,
                        lane_width=lane_width, merge_end_x=merge_end_x)


def default_dims(label: StyleLabel) -> tuple[float, float]:
    return LONG_VEHICLE_DIMS if label is StyleLabel.LONG else SHORT_VEHICLE_DIMS


def make_vehicle(x: float, y: float, *, speed: float = 0.0, theta: float = 0.0,
                 label: StyleLabel = StyleLabel.FRIENDLY, lane: Lane = Lane.MAIN,
                 length: float | None = None, width: float | None = None,
                 ax: float = 0.0, ay: float = 0.0) -> VehicleState:
    """Convenience constructor with style-appropriate default dimensions."""
    dims = default_dims(label)
    return VehicleState(
        x=x, y=y, theta=theta,
        vx=speed * math.cos(theta), vy=speed * math.sin(theta),
        ax=ax, ay=ay,
        length=dims[0] if length is None else length,
        width=dims[1] if width is None else width,
        label=label, lane=lane,
    )
