"""Scenario and mixture-model persistence.

Scenario files are JSON with a stable key order:
{"seed", "density", "road": {"lane_width", "merge_end_x", "main", "merge"},
 "ego", "main_vehicles"}; vehicle objects carry
x, y, theta, vx, vy, ax, ay, length, width, label, lane. SI units throughout.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from ..core import Lane, RoadGeometry, StyleLabel, VehicleState
from .gmm import GmmModel
from .types import DensityClass, Scenario


class ScenarioParseError(ValueError):
    """Scenario file is malformed; the message names the offending field."""


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see partial files."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _vehicle_to_dict(v: VehicleState) -> dict:
    return {
        "x": v.x, "y": v.y, "theta": v.theta,
        "vx": v.vx, "vy": v.vy, "ax": v.ax, "ay": v.ay,
        "length": v.length, "width": v.width,
        "label": v.label.value, "lane": v.lane.value,
    }


def _vehicle_from_dict(d: dict, where: str) -> VehicleState:
    if not isinstance(d, dict):
        raise ScenarioParseError(f"{where}: expected a vehicle object, got {type(d).__name__}")
    try:
        return VehicleState(
            x=float(d["x"]), y=float(d["y"]), theta=float(d["theta"]),
            vx=float(d["vx"]), vy=float(d["vy"]),
            ax=float(d["ax"]), ay=float(d["ay"]),
            length=float(d["length"]), width=float(d["width"]),
            label=StyleLabel(d["label"]), lane=Lane(d["lane"]),
        )
    except KeyError as e:
        raise ScenarioParseError(f"{where}: missing vehicle key {e.args[0]!r}") from e
    except (TypeError, ValueError) as e:
        raise ScenarioParseError(f"{where}: {e}") from e


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "seed": s.seed,
        "density": s.density.value,
        "road": {
            "lane_width": s.road.lane_width,
            "merge_end_x": s.road.merge_end_x,
            "main": [[float(x), float(y)] for x, y in s.road.main_centerline],
            "merge": [[float(x), float(y)] for x, y in s.road.merge_centerline],
        },
        "ego": _vehicle_to_dict(s.ego),
        "main_vehicles": [_vehicle_to_dict(v) for v in s.main_vehicles],
    }


def scenario_from_dict(d: dict, where: str = "scenario") -> Scenario:
    for key in ("seed", "density", "road", "ego", "main_vehicles"):
        if key not in d:
            raise ScenarioParseError(f"{where}: missing key {key!r}")
    road_d = d["road"]
    for key in ("lane_width", "merge_end_x", "main", "merge"):
        if key not in road_d:
            raise ScenarioParseError(f"{where}.road: missing key {key!r}")
    try:
        road = RoadGeometry(
            main_centerline=np.asarray(road_d["main"], dtype=float),
            merge_centerline=np.asarray(road_d["merge"], dtype=float),
            lane_width=float(road_d["lane_width"]),
            merge_end_x=float(road_d["merge_end_x"]),
        )
        density = DensityClass(d["density"])
    except (TypeError, ValueError) as e:
        raise ScenarioParseError(f"{where}: {e}") from e
    return Scenario(
        road=road,
        main_vehicles=tuple(
            _vehicle_from_dict(v, f"{where}.main_vehicles[{i}]")
            for i, v in enumerate(d["main_vehicles"])),
        ego=_vehicle_from_dict(d["ego"], f"{where}.ego"),
        density=density,
        seed=int(d["seed"]),
    )


def save_scenario(s: Scenario, path: str | Path) -> None:
    atomic_write_text(path, json.dumps(scenario_to_dict(s), indent=1) + "\n")


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    return scenario_from_dict(raw, where=str(path))


def save_gmm(model: GmmModel, path: str | Path, log_likelihood: float | None = None) -> None:
    doc = {
        "k": model.k,
        "weights": model.weights.tolist(),
        "means": model.means.tolist(),
        "covariances": model.covariances.tolist(),
    }
    if log_likelihood is not None:
        doc["log_likelihood"] = log_likelihood
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def load_gmm(path: str | Path) -> GmmModel:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        return GmmModel(
            weights=np.asarray(raw["weights"], dtype=float),
            means=np.asarray(raw["means"], dtype=float),
            covariances=np.asarray(raw["covariances"], dtype=float),
        )
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    except KeyError as e:
        raise ScenarioParseError(f"{path}: missing key {e.args[0]!r}") from e
