import math

import numpy as np
import pytest

from densemerge.core import (
    CHANNELS,
    Lane,
    RoadGeometry,
    SceneHistory,
    StyleLabel,
    ValidationError,
    build_road,
    build_sample,
    make_vehicle,
)
from densemerge.core.sample import CH_LEAD_GAP, CH_OFFSET, CH_STYLE, T_HIS


@pytest.fixture
def road():
    return build_road()


def main_vehicle(x, speed=2.0, label=StyleLabel.FRIENDLY, y=0.0):
    return make_vehicle(x, y, speed=speed, label=label, lane=Lane.MAIN)


def merge_vehicle(x, speed=2.0, y=-3.5):
    return make_vehicle(x, y, speed=speed, label=StyleLabel.FRIENDLY, lane=Lane.MERGE)


def test_single_vehicle_empty_neighbors(road):
    s = build_sample([[main_vehicle(50.0)]], 0, road)
    assert s.n_neighbors == 0
    assert s.target_history.shape == (10, len(CHANNELS))
    assert np.ptp(s.road[0, :, 0]) > 0 and np.ptp(s.road[1, :, 0]) > 0  # polylines populated
    assert s.label is StyleLabel.FRIENDLY


def test_target_anchor_is_origin(road):
    frames = [[main_vehicle(50.0 + 0.2 * t, speed=2.0)] for t in range(12)]
    s = build_sample(frames, 0, road)
    assert abs(s.target_history[-1, 0]) < 1e-9
    assert abs(s.target_history[-1, 1]) < 1e-9
    assert abs(s.target_history[-1, 2]) < 1e-9


def test_leading_range_includes_leader_excludes_follower(road):
    target = main_vehicle(50.0)
    leader = main_vehicle(58.0)    # 8 m ahead, bumper gap 3.3 m
    behind = main_vehicle(30.0)    # 20 m behind
    s = build_sample([[target, leader, behind]], 0, road)
    assert s.n_neighbors == 1
    assert s.neighbors[0, -1, 0] == pytest.approx(8.0, abs=1e-9)


def test_leading_range_cuts_at_ten_meter_gap(road):
    target = main_vehicle(50.0)
    near = main_vehicle(50.0 + 4.7 + 9.9)   # bumper gap 9.9 m
    far = main_vehicle(50.0 + 4.7 + 10.1)   # bumper gap 10.1 m
    assert build_sample([[target, near]], 0, road).n_neighbors == 1
    assert build_sample([[target, far]], 0, road).n_neighbors == 0


def test_interaction_range_on_adjacent_lane(road):
    target = main_vehicle(50.0)
    alongside = merge_vehicle(52.0)
    behind_band = merge_vehicle(45.5)   # 4.5 m behind along the lane
    outside = merge_vehicle(58.0)       # 8 m ahead on the merge lane
    s = build_sample([[target, alongside, behind_band, outside]], 0, road)
    assert s.n_neighbors == 2


def test_neighbor_set_invariant_under_reordering(road):
    target = main_vehicle(50.0)
    a, b, c = main_vehicle(55.0), merge_vehicle(49.0), main_vehicle(40.0)
    s1 = build_sample([[target, a, b, c]], 0, road)
    s2 = build_sample([[target, c, b, a]], 0, road)
    assert s1.n_neighbors == s2.n_neighbors
    assert s1.neighbors == pytest.approx(s2.neighbors)


def test_short_history_back_pads_with_earliest(road):
    frames = [[main_vehicle(50.0 + 0.2 * t)] for t in range(3)]
    s = build_sample(frames, 0, road)
    assert s.target_history.shape[0] == T_HIS
    # first 8 rows are copies of the earliest frame
    assert np.ptp(s.target_history[:8, 0]) == 0.0


def test_unknown_target_rejected(road):
    with pytest.raises(ValidationError):
        build_sample([[main_vehicle(10.0)]], 3, road)


def test_offset_and_lead_gap_channels(road):
    target = make_vehicle(50.0, 0.4, speed=2.0, lane=Lane.MAIN)
    leader = main_vehicle(57.0)
    s = build_sample([[target, leader]], 0, road)
    assert s.target_history[-1, CH_OFFSET] == pytest.approx(0.4, abs=1e-9)
    assert s.target_history[-1, CH_LEAD_GAP] == pytest.approx(7.0 - 4.7, abs=1e-9)
    assert s.target_history[-1, CH_STYLE] == 2.0


def rigid_transform_scene(frames, road, phi, tx, ty):
    c, s = math.cos(phi), math.sin(phi)

    def tpoint(x, y):
        return (c * x - s * y + tx, s * x + c * y + ty)

    def tstate(v):
        x, y = tpoint(v.x, v.y)
        vx, vy = c * v.vx - s * v.vy, s * v.vx + c * v.vy
        ax, ay = c * v.ax - s * v.ay, s * v.ax + c * v.ay
        return type(v)(x=x, y=y, theta=v.theta + phi, vx=vx, vy=vy, ax=ax, ay=ay,
                       length=v.length, width=v.width, label=v.label, lane=v.lane)

    def tline(line):
        return np.array([tpoint(x, y) for x, y in line])

    new_road = RoadGeometry(
        main_centerline=tline(road.main_centerline),
        merge_centerline=tline(road.merge_centerline),
        lane_width=road.lane_width,
        merge_end_x=road.merge_end_x * c + tx if abs(phi) < 1e-12 else
        float(tline(road.merge_centerline[road.merge_centerline[:, 0] <= road.merge_end_x])[-1, 0]),
    )
    return [[tstate(v) for v in f] for f in frames], new_road


def test_sample_invariant_under_rigid_transform(road):
    frames = []
    for t in range(12):
        frames.append([
            main_vehicle(50.0 + 0.25 * t, speed=2.5),
            main_vehicle(56.0 + 0.2 * t, speed=2.0),
            merge_vehicle(48.0 + 0.3 * t, speed=3.0),
        ])
    base = build_sample(frames, 0, road)
    for phi, tx, ty in [(0.0, 12.0, -4.0), (0.15, 5.0, 3.0), (-0.2, -8.0, 7.0)]:
        tf, troad = rigid_transform_scene(frames, road, phi, tx, ty)
        moved = build_sample(tf, 0, troad)
        assert np.max(np.abs(moved.target_history - base.target_history)) < 1e-9
        assert np.max(np.abs(moved.neighbors - base.neighbors)) < 1e-9
        assert np.max(np.abs(moved.road - base.road)) < 1e-9


def test_scene_history_fast_path_matches_build_sample(road):
    rng = np.random.default_rng(11)
    frames = []
    xs = np.array([50.0, 57.0, 44.0, 52.0])
    speeds = np.array([2.0, 2.2, 1.8, 2.4])
    lanes = [Lane.MAIN, Lane.MAIN, Lane.MAIN, Lane.MERGE]
    for t in range(14):
        xs = xs + speeds * 0.1
        speeds = np.clip(speeds + rng.normal(0, 0.05, 4), 0.5, 5.0)
        frames.append([
            make_vehicle(xs[i], 0.0 if lanes[i] is Lane.MAIN else -3.5,
                         speed=speeds[i], lane=lanes[i])
            for i in range(4)
        ])
    hist = SceneHistory(road, frames[0])
    for f in frames[1:]:
        hist.push(f)
    for idx in range(3):
        fast = hist.sample_for(idx)
        ref = build_sample(frames, idx, road)
        assert np.max(np.abs(fast.target_history - ref.target_history)) < 1e-12
        assert np.max(np.abs(fast.neighbors - ref.neighbors)) < 1e-12
        assert np.array_equal(fast.neighbor_mask, ref.neighbor_mask)
