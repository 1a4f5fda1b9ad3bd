"""Initial-scenario sampling with the empirical speed-gap structure.

Dense traffic shows a linear relation between average spacing and average
speed, with three density regimes. The generator draws per-vehicle gaps from
a class-conditioned distribution and couples speeds to gaps linearly, which
reproduces that structure at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import Lane, RoadGeometry, StyleLabel, ValidationError, build_road, make_vehicle
from .types import DensityClass, MIN_INITIAL_GAP, Scenario, bumper_gap


@dataclass(frozen=True)
class ClassParams:
    """Per-density-class vehicle-level distribution parameters."""

    mean_gap: float       # m, bumper to bumper
    gap_sigma: float      # m
    mean_speed: float     # m/s (implied at the mean gap)
    speed_noise: float    # m/s

    @property
    def speed_per_gap(self) -> float:
        return self.mean_speed / self.mean_gap


DEFAULT_CLASS_PARAMS: dict[DensityClass, ClassParams] = {
    DensityClass.HIGHLY_DENSE: ClassParams(mean_gap=2.5, gap_sigma=0.6, mean_speed=1.5, speed_noise=0.25),
    DensityClass.MEDIUM_DENSE: ClassParams(mean_gap=4.5, gap_sigma=0.8, mean_speed=2.5, speed_noise=0.25),
    DensityClass.LOWER_DENSE: ClassParams(mean_gap=7.0, gap_sigma=1.0, mean_speed=3.5, speed_noise=0.25),
}

DEFAULT_STYLE_PROBS: dict[StyleLabel, float] = {
    StyleLabel.OFFENSIVE: 0.4,
    StyleLabel.FRIENDLY: 0.4,
    StyleLabel.LONG: 0.2,
}


@dataclass(frozen=True)
class GenParams:
    """Controls for sample_scenario; seed plus params fully determine output."""

    n_vehicles: tuple[int, int] = (8, 12)
    class_params: dict[DensityClass, ClassParams] = field(
        default_factory=lambda: dict(DEFAULT_CLASS_PARAMS))
    style_probs: dict[StyleLabel, float] = field(
        default_factory=lambda: dict(DEFAULT_STYLE_PROBS))
    rear_start_x: float = 5.0
    ego_x: float = 30.0
    ego_speed: float = 3.0
    max_speed: float = 8.0

    def validate(self) -> None:
        if self.n_vehicles[0] < 1 or self.n_vehicles[1] < self.n_vehicles[0]:
            raise ValidationError(f"bad vehicle-count range {self.n_vehicles}")
        for cls, cp in self.class_params.items():
            if cp.mean_gap <= 0 or cp.gap_sigma < 0:
                raise ValidationError(f"{cls.value}: gaps must be positive")
            if cp.mean_speed <= 0:
                raise ValidationError(f"{cls.value}: mean speed must be positive")
        total = sum(self.style_probs.values())
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"style probabilities sum to {total}, expected 1")


def sample_scenario(rng_seed: int, density: DensityClass,
                    params: GenParams | None = None,
                    road: RoadGeometry | None = None) -> Scenario:
    """Draw one initial scenario for the given density class.

    Same (seed, params) always produce the same scenario.
    """
    params = params or GenParams()
    params.validate()
    road = road or build_road()
    rng = np.random.default_rng(np.random.SeedSequence((rng_seed, _density_code(density))))
    cp = params.class_params[density]

    n = int(rng.integers(params.n_vehicles[0], params.n_vehicles[1] + 1))
    styles = rng.choice(
        [StyleLabel.OFFENSIVE, StyleLabel.FRIENDLY, StyleLabel.LONG],
        size=n,
        p=[params.style_probs[StyleLabel.OFFENSIVE],
           params.style_probs[StyleLabel.FRIENDLY],
           params.style_probs[StyleLabel.LONG]],
    )
    gaps = np.maximum(rng.normal(cp.mean_gap, cp.gap_sigma, size=n - 1), MIN_INITIAL_GAP + 0.05)
    speeds = np.clip(
        cp.speed_per_gap * np.concatenate([[cp.mean_gap], gaps]) + rng.normal(0, cp.speed_noise, size=n),
        0.2, params.max_speed)

    vehicles = []
    x = params.rear_start_x
    # built rear to front: vehicle i leads vehicle i+1 by gaps[i]
    for i in range(n):
        v = make_vehicle(x, 0.0, speed=float(speeds[i]), label=StyleLabel(styles[i]), lane=Lane.MAIN)
        vehicles.append(v)
        if i < n - 1:
            nxt_len = 11.5 if styles[i + 1] is StyleLabel.LONG else 4.7
            x += (v.length + nxt_len) / 2 + float(gaps[i])
    vehicles.reverse()  # front to back

    ego = make_vehicle(params.ego_x, float(road.centerline_y(Lane.MERGE, params.ego_x)),
                       speed=params.ego_speed, label=StyleLabel.FRIENDLY, lane=Lane.MERGE)
    return Scenario(road=road, main_vehicles=tuple(vehicles), ego=ego,
                    density=density, seed=rng_seed)


def _density_code(density: DensityClass) -> int:
    return {DensityClass.HIGHLY_DENSE: 0, DensityClass.MEDIUM_DENSE: 1, DensityClass.LOWER_DENSE: 2}[density]


def scenario_features(s: Scenario) -> tuple[float, float]:
    """(average speed, average bumper gap) over the main-lane vehicles."""
    if not s.main_vehicles:
        raise ValidationError("scenario has no main-lane vehicles")
    avg_speed = float(np.mean([v.speed for v in s.main_vehicles]))
    if len(s.main_vehicles) < 2:
        raise ValidationError("average gap needs at least two main-lane vehicles")
    gaps = [bumper_gap(a, b) for a, b in zip(s.main_vehicles, s.main_vehicles[1:])]
    return avg_speed, float(np.mean(gaps))
