"""Intelligent Driver Model car following, with per-style parameter sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import StyleLabel

EMERGENCY_DECEL = -8.0


@dataclass(frozen=True)
class IdmParams:
    """IDM gains plus the lateral micro-behavior knobs of one driving style."""

    v0: float             # desired speed, m/s
    T: float              # desired time headway, s
    s0: float             # jam gap, m
    a_max: float          # max acceleration, m/s^2
    b: float              # comfortable deceleration, m/s^2
    delta: float = 4.0    # free-flow exponent
    lateral_gain: float = 0.0   # offset response to merge-side pressure, m
    offset_bias: float = 0.0    # resting offset from the lane centerline, m


# Calibrated so closed-loop headway and offset statistics order correctly
# across styles (offensive tightest, long loosest); tuned values, not measured.
STYLE_PARAMS: dict[StyleLabel, IdmParams] = {
    StyleLabel.OFFENSIVE: IdmParams(v0=3.0, T=0.6, s0=0.8, a_max=2.0, b=2.5,
                                    lateral_gain=0.25, offset_bias=-0.2),
    StyleLabel.FRIENDLY: IdmParams(v0=3.0, T=1.2, s0=1.5, a_max=1.2, b=2.0,
                                   lateral_gain=0.10, offset_bias=-0.1),
    StyleLabel.LONG: IdmParams(v0=2.2, T=1.5, s0=2.0, a_max=0.8, b=1.5,
                               lateral_gain=0.03, offset_bias=0.0),
}


def idm_accel(v: float, v_lead: float, gap: float, p: IdmParams) -> float:
    """IDM acceleration; encode an open road as gap=inf with v_lead=v.

    a = a_max * (1 - (v/v0)^delta - (s*/gap)^2)
    s* = s0 + v*T + v*(v - v_lead) / (2*sqrt(a_max*b))
    """
    if gap <= 0:
        return EMERGENCY_DECEL
    dv = v - v_lead
    s_star = p.s0 + v * p.T + v * dv / (2.0 * math.sqrt(p.a_max * p.b))
    interaction = 0.0 if math.isinf(gap) else (s_star / gap) ** 2
    a = p.a_max * (1.0 - (v / p.v0) ** p.delta - interaction)
    return min(max(a, EMERGENCY_DECEL), p.a_max)
