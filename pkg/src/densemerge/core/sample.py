"""Model input records: per-vehicle feature channels and sample assembly.

A sample packs the target vehicle's recent history, the histories of nearby
vehicles, and the road polylines, all normalized to the target's current
frame. Channel layout per history frame (13 channels):

    x, y, theta, vx, vy, ax, ay, a_total, steer, lead_gap, offset, style, length

Neighbor vehicles carry only the first five channels. Style codes: 0 unlabeled,
1 offensive, 2 friendly, 3 long.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .types import DT, Frame, Lane, RoadGeometry, StyleLabel, ValidationError, VehicleState

T_HIS = 10
T_FUT = 40
D_V = 13
NEIGHBOR_FEATURES = 5
MAX_NEIGHBORS = 15
ROAD_POINTS = 21
ROAD_POLYLINES = 2

LEAD_RANGE = 10.0         # same-lane leader counts as neighbor within this bumper gap
INTERACTION_RANGE = 5.0   # adjacent-lane vehicles count within this along-lane band
LEAD_GAP_CAP = 50.0       # lead_gap channel sentinel when no leader in range

CHANNELS = ("x", "y", "theta", "vx", "vy", "ax", "ay", "a_total",
            "steer", "lead_gap", "offset", "style", "length")

CH_X, CH_Y, CH_THETA, CH_VX, CH_VY, CH_AX, CH_AY = range(7)
CH_ATOT, CH_STEER, CH_LEAD_GAP, CH_OFFSET, CH_STYLE, CH_LENGTH = range(7, 13)

STYLE_CODES = {None: 0.0, StyleLabel.OFFENSIVE: 1.0, StyleLabel.FRIENDLY: 2.0, StyleLabel.LONG: 3.0}

# Speed floor for the steering-angle estimate; below this the heading rate is
# numerically unreliable.
_STEER_SPEED_FLOOR = 0.5


@dataclass(frozen=True)
class Sample:
    """One model input record, expressed in the target's current frame."""

    target_history: np.ndarray   # (T_HIS, D_V)
    neighbors: np.ndarray        # (MAX_NEIGHBORS, T_HIS, NEIGHBOR_FEATURES)
    neighbor_mask: np.ndarray    # (MAX_NEIGHBORS,) bool
    road: np.ndarray             # (2, ROAD_POINTS, 2); [main, merge]
    label: StyleLabel
    frame: Frame                 # global pose of this sample's origin

    def __post_init__(self) -> None:
        for name, arr, shape in (
            ("target_history", self.target_history, (T_HIS, D_V)),
            ("neighbors", self.neighbors, (MAX_NEIGHBORS, T_HIS, NEIGHBOR_FEATURES)),
            ("neighbor_mask", self.neighbor_mask, (MAX_NEIGHBORS,)),
            ("road", self.road, (ROAD_POLYLINES, ROAD_POINTS, 2)),
        ):
            if arr.shape != shape:
                raise ValidationError(f"Sample.{name} has shape {arr.shape}, expected {shape}")
            arr.flags.writeable = False

    @property
    def n_neighbors(self) -> int:
        return int(self.neighbor_mask.sum())


def resample_polyline(line: np.ndarray, n: int) -> np.ndarray:
    """Resample a polyline at n equally spaced arc-length positions."""
    seg = np.diff(line, axis=0)
    d = np.hypot(seg[:, 0], seg[:, 1])
    s = np.concatenate([[0.0], np.cumsum(d)])
    si = np.linspace(0.0, s[-1], n)
    return np.stack([np.interp(si, s, line[:, 0]), np.interp(si, s, line[:, 1])], axis=1)


class RoadProjector:
    """Arc-length projection of points onto the two lane centerlines."""

    def __init__(self, road: RoadGeometry):
        self.road = road
        self._lines = []
        for line in (road.main_centerline, road.merge_centerline):
            p0 = line[:-1]
            d = np.diff(line, axis=0)
            seg_len = np.hypot(d[:, 0], d[:, 1])
            cum = np.concatenate([[0.0], np.cumsum(seg_len)])[:-1]
            self._lines.append((p0, d, seg_len, cum))
        self.sampled = np.stack([
            resample_polyline(road.main_centerline, ROAD_POINTS),
            resample_polyline(road.merge_centerline, ROAD_POINTS),
        ])

    def project(self, pts: np.ndarray, lane_codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per point: (arc position along its lane, signed lateral offset).

        Offset is positive on the left of the lane direction (+y for eastbound
        lanes), so it is invariant under rigid transforms of the whole scene.
        """
        s = np.empty(len(pts))
        off = np.empty(len(pts))
        for code in (0, 1):
            idx = np.where(lane_codes == code)[0]
            if idx.size == 0:
                continue
            p0, d, seg_len, cum = self._lines[code]
            q = pts[idx]
            rel = q[:, None, :] - p0[None, :, :]
            t = np.clip((rel * d[None]).sum(-1) / (seg_len ** 2)[None], 0.0, 1.0)
            proj = p0[None] + t[..., None] * d[None]
            dist2 = ((q[:, None, :] - proj) ** 2).sum(-1)
            k = np.argmin(dist2, axis=1)
            rows = np.arange(len(idx))
            s[idx] = cum[k] + t[rows, k] * seg_len[k]
            dv = q - proj[rows, k]
            off[idx] = (d[k, 0] * dv[:, 1] - d[k, 1] * dv[:, 0]) / seg_len[k]
        return s, off


def road_projector(road: RoadGeometry) -> RoadProjector:
    """Cached projector for a road instance."""
    proj = getattr(road, "_projector", None)
    if proj is None:
        proj = RoadProjector(road)
        object.__setattr__(road, "_projector", proj)
    return proj


def _lane_code(lane: Lane) -> int:
    return 0 if lane is Lane.MAIN else 1


def compute_channel_frame(states: Sequence[VehicleState], proj: RoadProjector,
                          prev: np.ndarray | None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Channel matrix (N, D_V) for one tick, plus lane codes and arc positions.

    prev is the previous tick's channel matrix; heading-rate features need it.
    """
    n = len(states)
    ch = np.zeros((n, D_V))
    ch[:, CH_X] = [s.x for s in states]
    ch[:, CH_Y] = [s.y for s in states]
    ch[:, CH_THETA] = [s.theta for s in states]
    ch[:, CH_VX] = [s.vx for s in states]
    ch[:, CH_VY] = [s.vy for s in states]
    ch[:, CH_AX] = [s.ax for s in states]
    ch[:, CH_AY] = [s.ay for s in states]
    ch[:, CH_STYLE] = [STYLE_CODES[s.label] for s in states]
    ch[:, CH_LENGTH] = [s.length for s in states]
    lane_codes = np.array([_lane_code(s.lane) for s in states])

    ch[:, CH_ATOT] = np.hypot(ch[:, CH_AX], ch[:, CH_AY])
    speed = np.hypot(ch[:, CH_VX], ch[:, CH_VY])
    if prev is not None:
        dtheta = ch[:, CH_THETA] - prev[:, CH_THETA]
        ch[:, CH_STEER] = np.arctan(ch[:, CH_LENGTH] * (dtheta / DT) / np.maximum(speed, _STEER_SPEED_FLOOR))

    s, off = proj.project(ch[:, :2], lane_codes)
    ch[:, CH_OFFSET] = off
    ch[:, CH_LEAD_GAP] = LEAD_GAP_CAP
    for code in (0, 1):
        idx = np.where(lane_codes == code)[0]
        if idx.size < 2:
            continue
        order = idx[np.argsort(s[idx])]
        gaps = (s[order[1:]] - s[order[:-1]]) - (ch[order[1:], CH_LENGTH] + ch[order[:-1], CH_LENGTH]) / 2
        ch[order[:-1], CH_LEAD_GAP] = np.minimum(gaps, LEAD_GAP_CAP)
    return ch, lane_codes, s


def _style_from_code(code: float) -> StyleLabel:
    for label, c in STYLE_CODES.items():
        if label is not None and c == code:
            return label
    raise ValidationError(f"unknown style code {code}")


def assemble_sample(window: np.ndarray, lane_codes: np.ndarray, s_anchor: np.ndarray,
                    target_index: int, proj: RoadProjector) -> Sample:
    """Build a Sample from a (T_HIS, N, D_V) channel window at its last frame."""
    sample, _ = assemble_sample_indexed(window, lane_codes, s_anchor, target_index, proj)
    return sample


def assemble_sample_indexed(window: np.ndarray, lane_codes: np.ndarray, s_anchor: np.ndarray,
                            target_index: int, proj: RoadProjector) -> tuple[Sample, list[int]]:
    """As assemble_sample, also reporting which scene index fills each neighbor slot."""
    anchor = window[-1]
    n = anchor.shape[0]
    if not 0 <= target_index < n:
        raise ValidationError(f"unknown target index {target_index} (scene has {n} vehicles)")

    tx, ty, ttheta = anchor[target_index, CH_X], anchor[target_index, CH_Y], anchor[target_index, CH_THETA]
    len_t = anchor[target_index, CH_LENGTH]
    cth, sth = math.cos(-ttheta), math.sin(-ttheta)
    rot = np.array([[cth, -sth], [sth, cth]])

    ds = s_anchor - s_anchor[target_index]
    same = lane_codes == lane_codes[target_index]
    lead_gap = ds - (anchor[:, CH_LENGTH] + len_t) / 2
    leading = same & (ds > 0) & (lead_gap <= LEAD_RANGE)
    interacting = (~same) & (np.abs(ds) <= INTERACTION_RANGE)
    cand = leading | interacting
    cand[target_index] = False

    local_xy = (anchor[:, :2] - (tx, ty)) @ rot.T
    dist = np.hypot(local_xy[:, 0], local_xy[:, 1])
    chosen = sorted(np.where(cand)[0],
                    key=lambda j: (dist[j], local_xy[j, 0], local_xy[j, 1]))[:MAX_NEIGHBORS]

    hist = window[:, target_index, :].copy()
    hist[:, :2] = (hist[:, :2] - (tx, ty)) @ rot.T
    hist[:, CH_THETA] -= ttheta
    hist[:, CH_VX:CH_VY + 1] = hist[:, CH_VX:CH_VY + 1] @ rot.T
    hist[:, CH_AX:CH_AY + 1] = hist[:, CH_AX:CH_AY + 1] @ rot.T

    neigh = np.zeros((MAX_NEIGHBORS, T_HIS, NEIGHBOR_FEATURES))
    mask = np.zeros(MAX_NEIGHBORS, dtype=bool)
    for slot, j in enumerate(chosen):
        nh = window[:, j, :NEIGHBOR_FEATURES].copy()
        nh[:, :2] = (nh[:, :2] - (tx, ty)) @ rot.T
        nh[:, CH_THETA] -= ttheta
        nh[:, CH_VX:CH_VY + 1] = nh[:, CH_VX:CH_VY + 1] @ rot.T
        neigh[slot] = nh
        mask[slot] = True

    road_local = (proj.sampled - (tx, ty)) @ rot.T
    sample = Sample(
        target_history=hist,
        neighbors=neigh,
        neighbor_mask=mask,
        road=road_local,
        label=_style_from_code(anchor[target_index, CH_STYLE]),
        frame=Frame(tx, ty, ttheta),
    )
    return sample, [int(j) for j in chosen]


class SceneHistory:
    """Rolling channel window over a fixed vehicle set, for per-tick sampling.

    The window starts pre-filled with the initial frame, which matches the
    back-padding convention for histories shorter than T_HIS.
    """

    def __init__(self, road: RoadGeometry, states: Sequence[VehicleState]):
        self.proj = road_projector(road)
        ch, lanes, s = compute_channel_frame(states, self.proj, prev=None)
        self.window = np.repeat(ch[None], T_HIS, axis=0)
        self.lane_codes = lanes
        self.s = s

    def push(self, states: Sequence[VehicleState]) -> None:
        ch, lanes, s = compute_channel_frame(states, self.proj, prev=self.window[-1])
        self.window[:-1] = self.window[1:]
        self.window[-1] = ch
        self.lane_codes = lanes
        self.s = s

    def sample_for(self, target_index: int) -> Sample:
        return assemble_sample(self.window, self.lane_codes, self.s, target_index, self.proj)


def build_sample(frames: Sequence[Sequence[VehicleState]], target_index: int,
                 road: RoadGeometry) -> Sample:
    """Assemble a Sample from raw per-tick vehicle state lists.

    Frames must be time-ordered with a consistent vehicle set; histories
    shorter than T_HIS are back-padded with the earliest frame.
    """
    if len(frames) == 0:
        raise ValidationError("build_sample needs at least one history frame")
    n = len(frames[0])
    if any(len(f) != n for f in frames):
        raise ValidationError("inconsistent vehicle count across history frames")
    if not 0 <= target_index < n:
        raise ValidationError(f"unknown target index {target_index} (scene has {n} vehicles)")

    proj = road_projector(road)
    rows = []
    prev = None
    lanes = s = None
    for f in frames:
        ch, lanes, s = compute_channel_frame(f, proj, prev)
        rows.append(ch)
        prev = ch
    rows = rows[-T_HIS:]
    while len(rows) < T_HIS:
        rows.insert(0, rows[0])
    window = np.stack(rows)
    return assemble_sample(window, lanes, s, target_index, proj)
