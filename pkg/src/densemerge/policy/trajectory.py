"""Planned trajectories: fixed 4 s horizons at 10 Hz."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Frame, PlannedFrame, T_FUT, ValidationError


@dataclass(frozen=True)
class PlannedTrajectory:
    """T_FUT future frames, columns (x, y, theta, speed), 0.1 s apart."""

    frames: np.ndarray  # (T_FUT, 4)

    def __post_init__(self) -> None:
        arr = np.asarray(self.frames, dtype=float)
        if arr.shape != (T_FUT, 4):
            raise ValidationError(f"trajectory must be ({T_FUT}, 4), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("trajectory contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "frames", arr)

    def frame(self, i: int) -> PlannedFrame:
        x, y, theta, speed = self.frames[i]
        return PlannedFrame(float(x), float(y), float(theta), float(speed))

    @property
    def first(self) -> PlannedFrame:
        return self.frame(0)

    def to_global(self, f: Frame) -> "PlannedTrajectory":
        """De-normalize a local-frame plan into the global frame."""
        c, s = math.cos(f.origin_theta), math.sin(f.origin_theta)
        out = self.frames.copy()
        x, y = self.frames[:, 0], self.frames[:, 1]
        out[:, 0] = c * x - s * y + f.origin_x
        out[:, 1] = s * x + c * y + f.origin_y
        out[:, 2] = self.frames[:, 2] + f.origin_theta
        return PlannedTrajectory(out)
