"""Scenario container and density taxonomy."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ..core import Lane, RoadGeometry, ValidationError, VehicleState


class DensityClass(enum.Enum):
    HIGHLY_DENSE = "highly"
    MEDIUM_DENSE = "medium"
    LOWER_DENSE = "lower"


MIN_INITIAL_GAP = 0.3


def bumper_gap(front: VehicleState, rear: VehicleState) -> float:
    """Bumper-to-bumper gap between a leading and a following vehicle."""
    return (front.x - rear.x) - (front.length + rear.length) / 2


@dataclass(frozen=True)
class Scenario:
    """Road plus the initial vehicle set; the unit of benchmark input."""

    road: RoadGeometry
    main_vehicles: tuple[VehicleState, ...]    # ordered front to back
    ego: VehicleState
    density: DensityClass
    seed: int

    def __post_init__(self) -> None:
        # Canonical storage order is front to back; permuted input is normalized.
        ordered = tuple(sorted(self.main_vehicles, key=lambda v: -v.x))
        object.__setattr__(self, "main_vehicles", ordered)
        for front, rear in zip(self.main_vehicles, self.main_vehicles[1:]):
            if bumper_gap(front, rear) <= MIN_INITIAL_GAP:
                raise ValidationError(
                    f"initial bumper gap {bumper_gap(front, rear):.2f} m at x={rear.x:.1f} "
                    f"is below the {MIN_INITIAL_GAP} m minimum")
        if self.ego.lane is not Lane.MERGE:
            raise ValidationError("ego must start on the merge lane")
        if self.ego.x >= self.road.merge_end_x:
            raise ValidationError("ego must start before the merge lane ends")
