import numpy as np
import pytest

from densemerge.core import Lane, StyleLabel, build_road, build_sample, make_vehicle


@pytest.fixture(scope="session")
def default_road():
    return build_road()


def scene_sample(road, *, target_speed=2.5, target_label=StyleLabel.FRIENDLY,
                 target_offset=0.0, leader_gap=None, leader_speed=2.0,
                 merge_dx=None, merge_speed=2.5, history_ticks=12):
    """Build a Sample for a main-lane target at x=50 with optional company.

    leader_gap is bumper-to-bumper; merge_dx places a merge-lane vehicle at
    that longitudinal offset from the target.
    """
    def frame_at(t):
        dt = 0.1
        vehicles = [make_vehicle(50.0 + target_speed * dt * t, target_offset,
                                 speed=target_speed, label=target_label, lane=Lane.MAIN)]
        if leader_gap is not None:
            lx = 50.0 + 4.7 + leader_gap + leader_speed * dt * t
            vehicles.append(make_vehicle(lx, 0.0, speed=leader_speed, lane=Lane.MAIN))
        if merge_dx is not None:
            mx = 50.0 + merge_dx + merge_speed * dt * t
            vehicles.append(make_vehicle(mx, -3.5, speed=merge_speed, lane=Lane.MERGE))
        return vehicles

    frames = [frame_at(t) for t in range(history_ticks)]
    return build_sample(frames, 0, road)


@pytest.fixture
def sample_factory(default_road):
    def factory(**kwargs):
        return scene_sample(default_road, **kwargs)

    return factory


def random_sample(road, rng, n_main=4, with_merge=True):
    """A randomized multi-vehicle sample for property-style checks."""
    xs = 50.0 + np.cumsum(rng.uniform(6.0, 9.0, size=n_main)) - 6.0
    speeds = rng.uniform(1.0, 4.0, size=n_main)
    frames = []
    for t in range(12):
        vehicles = [make_vehicle(float(xs[i] + speeds[i] * 0.1 * t), 0.0,
                                 speed=float(speeds[i]), lane=Lane.MAIN)
                    for i in range(n_main)]
        if with_merge:
            vehicles.append(make_vehicle(float(xs[0] + rng.uniform(-3, 3) * 0 + 2.0 + 2.5 * 0.1 * t),
                                         -3.5, speed=2.5, lane=Lane.MERGE))
        frames.append(vehicles)
    return build_sample(frames, 0, road)
