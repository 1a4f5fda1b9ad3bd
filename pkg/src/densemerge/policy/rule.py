"""Style-parameterized rule policy for main-lane vehicles.

Longitudinal motion is IDM against the most constraining leader; lateral
motion tracks an offset target

    offset = offset_bias - lateral_gain * pressure

where pressure rises to 1 as a merge-side vehicle enters the interaction
range. Yielding emerges from the same mechanism for every style: a merge-side
vehicle ahead acts as a virtual leader whose effective gap grows with its
remaining lateral distance, so large-headway styles brake for it early while
short-headway styles barely react and end up blocking.

All geometry is in the sample's local frame: the target sits at the origin
heading +x, and the merge side is -y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import DT, INTERACTION_RANGE, Sample, T_FUT
from ..core.sample import CH_LEAD_GAP, CH_OFFSET
from .idm import EMERGENCY_DECEL, IdmParams
from .trajectory import PlannedTrajectory

# Lateral tracking rate toward the offset target, 1/s.
LATERAL_RATE = 1.5

# A neighbor overlapping the target's corridor within this |y| is a leader.
CORRIDOR_HALF_WIDTH = 1.9

# Merge-side band in local y: on or crossing from the adjacent lane below.
MERGE_SIDE_Y = (-5.5, -1.0)

# Assumed body length of neighbors; their true length is not observed.
ASSUMED_NEIGHBOR_LENGTH = 4.7

# Effective extra gap per meter of lateral distance a merge-side vehicle
# still has to cover before overlapping the corridor.
LATERAL_GAP_DISCOUNT = 2.0

# Plan-level jitter used when an rng is supplied (dataset diversity).
ACCEL_NOISE_STD = 0.3
OFFSET_NOISE_STD = 0.05


@dataclass
class _PlanInputs:
    v: float
    y_center: float
    y_target: float
    gap: float
    v_lead: float
    has_leader: bool
    p: IdmParams
    accel_noise: float


def _plan_inputs(sample: Sample, p: IdmParams, rng) -> _PlanInputs:
    hist = sample.target_history[-1]
    v = math.hypot(hist[3], hist[4])
    len_t = hist[-1]
    y_center = -hist[CH_OFFSET]

    corridor: tuple[float, float] | None = None   # (gap, speed) of nearest in-corridor vehicle
    virtual: tuple[float, float] | None = None    # discounted merge-side leader
    for slot in np.where(sample.neighbor_mask)[0]:
        nx, ny, _, nvx, _ = sample.neighbors[slot, -1]
        if nx <= 0:
            continue
        gap = nx - (len_t + ASSUMED_NEIGHBOR_LENGTH) / 2
        if abs(ny) < CORRIDOR_HALF_WIDTH:
            if corridor is None or gap < corridor[0]:
                corridor = (gap, nvx)
        elif MERGE_SIDE_Y[0] <= ny < MERGE_SIDE_Y[1]:
            eff = gap + LATERAL_GAP_DISCOUNT * (abs(ny) - CORRIDOR_HALF_WIDTH)
            if virtual is None or eff < virtual[0]:
                virtual = (eff, nvx)

    # The lead_gap channel knows the true same-lane gap (actual body lengths,
    # any distance); the corridor neighbor knows the leader's speed.
    chan_gap = float(sample.target_history[-1, CH_LEAD_GAP])
    if corridor is not None:
        corridor = (min(corridor[0], chan_gap), corridor[1])
    elif chan_gap < 49.0:
        corridor = (chan_gap, v)  # leader beyond neighbor range; assume paced

    best_gap, best_v = math.inf, v
    for cand in (corridor, virtual):
        if cand is not None and cand[0] < best_gap:
            best_gap, best_v = cand

    pressure = 0.0
    for slot in np.where(sample.neighbor_mask)[0]:
        nx, ny = sample.neighbors[slot, -1, 0], sample.neighbors[slot, -1, 1]
        if MERGE_SIDE_Y[0] <= ny < MERGE_SIDE_Y[1]:
            pressure = max(pressure, 1.0 - abs(nx) / INTERACTION_RANGE)
    pressure = max(0.0, min(1.0, pressure))

    offset_noise = accel_noise = 0.0
    if rng is not None:
        accel_noise = rng.normal(0.0, ACCEL_NOISE_STD)
        offset_noise = rng.normal(0.0, OFFSET_NOISE_STD)

    return _PlanInputs(
        v=v,
        y_center=y_center,
        y_target=y_center + p.offset_bias - p.lateral_gain * pressure + offset_noise,
        gap=best_gap,
        v_lead=best_v,
        has_leader=math.isfinite(best_gap),
        p=p,
        accel_noise=accel_noise,
    )


def plan_rule_batch(samples: list[Sample], params: list[IdmParams],
                    rngs: list | None = None) -> list[PlannedTrajectory]:
    """Roll the rule policy for a batch of samples in lockstep."""
    n = len(samples)
    if rngs is None:
        rngs = [None] * n
    ins = [_plan_inputs(s, p, r) for s, p, r in zip(samples, params, rngs)]

    v = np.array([i.v for i in ins])
    x = np.zeros(n)
    y = np.zeros(n)
    y_tgt = np.array([i.y_target for i in ins])
    gap = np.array([i.gap if i.has_leader else np.inf for i in ins])
    v_lead = np.array([i.v_lead for i in ins])
    has_leader = np.array([i.has_leader for i in ins])
    v0 = np.array([i.p.v0 for i in ins])
    T = np.array([i.p.T for i in ins])
    s0 = np.array([i.p.s0 for i in ins])
    a_max = np.array([i.p.a_max for i in ins])
    b = np.array([i.p.b for i in ins])
    delta = np.array([i.p.delta for i in ins])
    noise = np.array([i.accel_noise for i in ins])
    brake_term = 2.0 * np.sqrt(a_max * b)

    frames = np.empty((n, T_FUT, 4))
    for t in range(T_FUT):
        dv = np.where(has_leader, v - v_lead, 0.0)
        s_star = s0 + v * T + v * dv / brake_term
        with np.errstate(divide="ignore"):
            interaction = np.where(has_leader & (gap > 0), (s_star / np.maximum(gap, 1e-9)) ** 2, 0.0)
        a = a_max * (1.0 - (v / v0) ** delta - interaction) + noise
        a = np.where(has_leader & (gap <= 0), EMERGENCY_DECEL, a)
        a = np.clip(a, EMERGENCY_DECEL, a_max)

        x = x + v * DT
        gap = gap + (v_lead - v) * DT
        v = np.maximum(0.0, v + a * DT)
        ydot = LATERAL_RATE * (y_tgt - y)
        y = y + ydot * DT
        frames[:, t, 0] = x
        frames[:, t, 1] = y
        frames[:, t, 2] = np.arctan2(ydot, np.maximum(v, 0.1))
        frames[:, t, 3] = np.hypot(v, ydot)
    return [PlannedTrajectory(frames[i]) for i in range(n)]


def rule_policy_plan(sample: Sample, p: IdmParams, rng=None) -> PlannedTrajectory:
    """Plan 4 s for one vehicle in its own frame."""
    return plan_rule_batch([sample], [p], [rng])[0]
