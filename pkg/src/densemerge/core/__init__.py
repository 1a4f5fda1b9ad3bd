"""Domain types, road geometry, kinematics, collision and frame normalization."""

from .collision import check_collision, rectangle_corners, sat_margin
from .frames import from_frame, points_from_frame, points_to_frame, state_from_frame, state_to_frame, to_frame
from .kinematics import PlannedFrame, TeleportError, apply_trajectory_step, step_bicycle
from .sample import (
    CHANNELS,
    D_V,
    INTERACTION_RANGE,
    LEAD_GAP_CAP,
    LEAD_RANGE,
    MAX_NEIGHBORS,
    NEIGHBOR_FEATURES,
    ROAD_POINTS,
    ROAD_POLYLINES,
    T_FUT,
    T_HIS,
    Sample,
    SceneHistory,
    build_sample,
    resample_polyline,
    road_projector,
)
from .types import (
    DT,
    IDENTITY_FRAME,
    LONG_VEHICLE_MIN_LENGTH,
    Control,
    Frame,
    Lane,
    RoadGeometry,
    StyleLabel,
    ValidationError,
    VehicleState,
    build_road,
    default_dims,
    make_vehicle,
)

__all__ = [
    "CHANNELS", "D_V", "DT", "IDENTITY_FRAME", "INTERACTION_RANGE", "LEAD_GAP_CAP",
    "LEAD_RANGE", "LONG_VEHICLE_MIN_LENGTH", "MAX_NEIGHBORS", "NEIGHBOR_FEATURES",
    "ROAD_POINTS", "ROAD_POLYLINES", "T_FUT", "T_HIS",
    "Control", "Frame", "Lane", "PlannedFrame", "RoadGeometry", "Sample",
    "SceneHistory", "StyleLabel", "TeleportError", "ValidationError", "VehicleState",
    "apply_trajectory_step", "build_road", "build_sample", "check_collision",
    "default_dims", "from_frame", "make_vehicle", "points_from_frame",
    "points_to_frame", "rectangle_corners", "resample_polyline", "road_projector",
    "sat_margin", "state_from_frame", "state_to_frame", "step_bicycle", "to_frame",
]
