import math

import numpy as np
import pytest

from densemerge.core import Lane, T_FUT, T_HIS, build_road, make_vehicle
from densemerge.policy import generate_dataset, slice_windows, window_passes_filters
from densemerge.policy.dataset import LEAD_FILTER_GAP, SPEED_FILTER


def constant_rollout(n_ticks, leader_gap, speed=2.5, merge_dx=2.0, merge=True):
    """Two main-lane vehicles at fixed gap plus an optional merge vehicle."""
    frames = []
    for t in range(n_ticks):
        x0 = 50.0 + speed * 0.1 * t
        vehicles = [
            make_vehicle(x0, 0.0, speed=speed, lane=Lane.MAIN),
            make_vehicle(x0 + 4.7 + leader_gap, 0.0, speed=speed, lane=Lane.MAIN),
        ]
        if merge:
            vehicles.append(make_vehicle(x0 + merge_dx, -3.5, speed=speed, lane=Lane.MERGE))
        frames.append(vehicles)
    return frames


@pytest.fixture(scope="module")
def road():
    return build_road(main_length=400.0, merge_end_x=350.0, taper_length=10.0)


def test_compliant_scene_yields_max_windows(road):
    frames = constant_rollout(100, leader_gap=6.0)
    examples, considered = slice_windows(frames, road, targets=[0])
    assert considered == 100 - (T_HIS + T_FUT) + 1 == 51
    assert len(examples) == 51


def test_fifteen_meter_gap_rejected(road):
    frames = constant_rollout(100, leader_gap=15.0)
    examples, _ = slice_windows(frames, road, targets=[0])
    assert examples == []


def test_boundary_gap_passes(road):
    frames = constant_rollout(60, leader_gap=9.9)
    assert len(slice_windows(frames, road, targets=[0])[0]) > 0
    frames = constant_rollout(60, leader_gap=10.1)
    assert slice_windows(frames, road, targets=[0])[0] == []


def test_speed_filter(road):
    slow = constant_rollout(60, leader_gap=5.0, speed=0.8)
    assert slice_windows(slow, road, targets=[0])[0] == []
    fast = constant_rollout(60, leader_gap=5.0, speed=5.5)
    assert slice_windows(fast, road, targets=[0])[0] == []


def test_missing_adjacent_vehicle_rejected(road):
    frames = constant_rollout(60, leader_gap=5.0, merge=False)
    assert slice_windows(frames, road, targets=[0])[0] == []
    far = constant_rollout(60, leader_gap=5.0, merge_dx=8.0)
    assert slice_windows(far, road, targets=[0])[0] == []


def test_leader_itself_gets_no_windows(road):
    # vehicle 1 has no one ahead, so the leading-range filter rejects it
    frames = constant_rollout(60, leader_gap=5.0)
    examples, _ = slice_windows(frames, road, targets=[1])
    assert examples == []


def test_stride_thins_windows(road):
    frames = constant_rollout(100, leader_gap=6.0)
    full, _ = slice_windows(frames, road, targets=[0])
    strided, _ = slice_windows(frames, road, stride=5, targets=[0])
    assert len(strided) == math.ceil(len(full) / 5)


def test_generated_examples_respect_anchor_filters():
    examples, report = generate_dataset(2, rng=1, n_ticks=80)
    assert report["kept"] == len(examples)
    assert report["scenes"] == 2
    for ex in examples:
        anchor = ex.sample.target_history[-1]
        speed = math.hypot(anchor[3], anchor[4])
        assert SPEED_FILTER[0] <= speed <= SPEED_FILTER[1]
        assert anchor[9] <= LEAD_FILTER_GAP  # lead_gap channel
        assert ex.target_future.shape == (T_FUT, 4)
        assert ex.aux_mask[0]
        assert ex.aux_mask.sum() == 1 + ex.sample.n_neighbors


def test_generate_dataset_deterministic():
    a, ra = generate_dataset(1, rng=7, n_ticks=60)
    b, rb = generate_dataset(1, rng=7, n_ticks=60)
    assert ra == rb
    assert len(a) == len(b)
    for ea, eb in zip(a, b):
        assert np.array_equal(ea.sample.target_history, eb.sample.target_history)
        assert np.array_equal(ea.target_future, eb.target_future)
