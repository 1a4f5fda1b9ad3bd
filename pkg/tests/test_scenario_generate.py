import numpy as np
import pytest

from densemerge.core import Lane, StyleLabel, ValidationError, make_vehicle
from densemerge.scenario import (
    ClassParams,
    DensityClass,
    GenParams,
    Scenario,
    bumper_gap,
    sample_scenario,
    scenario_features,
    scenario_to_dict,
)


def test_same_seed_reproduces_scenario_exactly():
    a = sample_scenario(123, DensityClass.MEDIUM_DENSE)
    b = sample_scenario(123, DensityClass.MEDIUM_DENSE)
    assert scenario_to_dict(a) == scenario_to_dict(b)


def test_different_seed_changes_scenario():
    a = sample_scenario(1, DensityClass.MEDIUM_DENSE)
    b = sample_scenario(2, DensityClass.MEDIUM_DENSE)
    assert scenario_to_dict(a) != scenario_to_dict(b)


def test_density_classes_order_average_gap():
    for seed in range(100):
        dense = sample_scenario(seed, DensityClass.HIGHLY_DENSE)
        loose = sample_scenario(seed, DensityClass.LOWER_DENSE)
        _, gap_dense = scenario_features(dense)
        _, gap_loose = scenario_features(loose)
        assert gap_dense < gap_loose


def test_no_initial_overlap_and_ordering():
    for seed in range(30):
        s = sample_scenario(seed, DensityClass.HIGHLY_DENSE)
        for front, rear in zip(s.main_vehicles, s.main_vehicles[1:]):
            assert front.x > rear.x
            assert bumper_gap(front, rear) > 0.3
        assert s.ego.lane is Lane.MERGE
        assert s.ego.x < s.road.merge_end_x


def test_single_vehicle_scenario_is_valid_but_gap_undefined():
    params = GenParams(n_vehicles=(1, 1))
    s = sample_scenario(0, DensityClass.MEDIUM_DENSE, params)
    assert len(s.main_vehicles) == 1
    with pytest.raises(ValidationError):
        scenario_features(s)


def test_infeasible_params_rejected():
    bad = GenParams(class_params={
        DensityClass.HIGHLY_DENSE: ClassParams(mean_gap=-1.0, gap_sigma=0.5, mean_speed=1.5, speed_noise=0.2),
        DensityClass.MEDIUM_DENSE: ClassParams(4.5, 0.8, 2.5, 0.25),
        DensityClass.LOWER_DENSE: ClassParams(7.0, 1.0, 3.5, 0.25),
    })
    with pytest.raises(ValidationError):
        sample_scenario(0, DensityClass.HIGHLY_DENSE, bad)


def test_features_examples():
    va = make_vehicle(20.0, 0.0, speed=2.0, lane=Lane.MAIN)
    vb = make_vehicle(12.0, 0.0, speed=4.0, lane=Lane.MAIN)
    ego = make_vehicle(5.0, -3.5, speed=3.0, lane=Lane.MERGE)
    s = Scenario(road=sample_scenario(0, DensityClass.MEDIUM_DENSE).road,
                 main_vehicles=(va, vb), ego=ego,
                 density=DensityClass.MEDIUM_DENSE, seed=0)
    avg_speed, avg_gap = scenario_features(s)
    assert avg_speed == pytest.approx(3.0)
    assert avg_gap == pytest.approx(8.0 - 4.7)


def test_features_invariant_under_storage_order():
    base = sample_scenario(5, DensityClass.MEDIUM_DENSE)
    shuffled = Scenario(road=base.road, main_vehicles=tuple(reversed(base.main_vehicles)),
                        ego=base.ego, density=base.density, seed=base.seed)
    assert scenario_features(shuffled) == scenario_features(base)


def test_style_mix_present_over_many_seeds():
    labels = set()
    for seed in range(20):
        s = sample_scenario(seed, DensityClass.MEDIUM_DENSE)
        labels.update(v.label for v in s.main_vehicles)
    assert labels == {StyleLabel.OFFENSIVE, StyleLabel.FRIENDLY, StyleLabel.LONG}


def test_long_vehicles_have_long_bodies():
    for seed in range(20):
        s = sample_scenario(seed, DensityClass.LOWER_DENSE)
        for v in s.main_vehicles:
            if v.label is StyleLabel.LONG:
                assert v.length == pytest.approx(11.5)
            else:
                assert v.length == pytest.approx(4.7)
