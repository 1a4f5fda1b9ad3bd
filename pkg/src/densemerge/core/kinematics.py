"""Vehicle state integration: kinematic bicycle for the ego, trajectory adoption for others."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import NamedTuple

from .types import DT, Control, ValidationError, VehicleState

# A single tick may not displace a vehicle by more than this; larger jumps
# indicate a broken plan and invalidate the episode.
TELEPORT_LIMIT = 5.0


class TeleportError(ValidationError):
    """Planned step moved a vehicle farther than TELEPORT_LIMIT in one tick."""


class PlannedFrame(NamedTuple):
    """One future tick of a planned trajectory."""

    x: float
    y: float
    theta: float
    speed: float


def step_bicycle(state: VehicleState, u: Control, dt: float = DT) -> VehicleState:
    """Kinematic bicycle, explicit Euler.

    Position and heading integrate with the pre-update speed, then speed
    updates (floored at zero). The wheelbase is taken as the body length.
    """
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if not (math.isfinite(u.accel) and math.isfinite(u.steer)):
        raise ValidationError(f"non-finite control {u}")
    u = u.clipped()
    v = state.speed
    x = state.x + v * math.cos(state.theta) * dt
    y = state.y + v * math.sin(state.theta) * dt
    theta = state.theta + v * math.tan(u.steer) / state.length * dt
    v_new = max(0.0, v + u.accel * dt)
    vx = v_new * math.cos(theta)
    vy = v_new * math.sin(theta)
    return replace(
        state,
        x=x, y=y, theta=theta,
        vx=vx, vy=vy,
        ax=(vx - state.vx) / dt,
        ay=(vy - state.vy) / dt,
    )


def apply_trajectory_step(state: VehicleState, nxt: PlannedFrame, dt: float = DT) -> VehicleState:
    """Advance an environment vehicle by adopting the first frame of its plan.

    Accelerations are recomputed by finite difference against the prior state.
    """
    if not all(math.isfinite(v) for v in nxt):
        raise ValidationError(f"non-finite planned frame {nxt}")
    jump = math.hypot(nxt.x - state.x, nxt.y - state.y)
    if jump > TELEPORT_LIMIT:
        raise TeleportError(f"planned step jumps {jump:.2f} m in one tick (limit {TELEPORT_LIMIT} m)")
    vx = nxt.speed * math.cos(nxt.theta)
    vy = nxt.speed * math.sin(nxt.theta)
    return replace(
        state,
        x=nxt.x, y=nxt.y, theta=nxt.theta,
        vx=vx, vy=vy,
        ax=(vx - state.vx) / dt,
        ay=(vy - state.vy) / dt,
    )
