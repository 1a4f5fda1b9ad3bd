"""Rigid-transform normalization into and out of local vehicle frames."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .types import Frame, VehicleState


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def points_to_frame(points: np.ndarray, f: Frame) -> np.ndarray:
    """Express (n, 2) global points in the local frame f."""
    arr = np.asarray(points, dtype=float)
    return (arr - (f.origin_x, f.origin_y)) @ _rotation(-f.origin_theta).T


def points_from_frame(points: np.ndarray, f: Frame) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    return arr @ _rotation(f.origin_theta).T + (f.origin_x, f.origin_y)


def vectors_to_frame(vecs: np.ndarray, f: Frame) -> np.ndarray:
    """Rotate velocity/acceleration vectors into f (no translation)."""
    return np.asarray(vecs, dtype=float) @ _rotation(-f.origin_theta).T


def vectors_from_frame(vecs: np.ndarray, f: Frame) -> np.ndarray:
    return np.asarray(vecs, dtype=float) @ _rotation(f.origin_theta).T


def state_to_frame(state: VehicleState, f: Frame) -> VehicleState:
    (x, y), = points_to_frame([(state.x, state.y)], f)
    (vx, vy), = vectors_to_frame([(state.vx, state.vy)], f)
    (ax, ay), = vectors_to_frame([(state.ax, state.ay)], f)
    return replace(state, x=x, y=y, theta=state.theta - f.origin_theta,
                   vx=vx, vy=vy, ax=ax, ay=ay)


def state_from_frame(state: VehicleState, f: Frame) -> VehicleState:
    (x, y), = points_from_frame([(state.x, state.y)], f)
    (vx, vy), = vectors_from_frame([(state.vx, state.vy)], f)
    (ax, ay), = vectors_from_frame([(state.ax, state.ay)], f)
    return replace(state, x=x, y=y, theta=state.theta + f.origin_theta,
                   vx=vx, vy=vy, ax=ax, ay=ay)


def to_frame(obj, f: Frame):
    """Express points (n, 2 array), one state, or a state sequence in frame f."""
    if isinstance(obj, VehicleState):
        return state_to_frame(obj, f)
    if isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], VehicleState):
        return type(obj)(state_to_frame(s, f) for s in obj)
    return points_to_frame(obj, f)


def from_frame(obj, f: Frame):
    """Inverse of to_frame."""
    if isinstance(obj, VehicleState):
        return state_from_frame(obj, f)
    if isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], VehicleState):
        return type(obj)(state_from_frame(s, f) for s in obj)
    return points_from_frame(obj, f)
