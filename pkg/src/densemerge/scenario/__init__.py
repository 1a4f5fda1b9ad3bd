"""Scenario generation, density classification and persistence."""

from .generate import (
    DEFAULT_CLASS_PARAMS,
    DEFAULT_STYLE_PROBS,
    ClassParams,
    GenParams,
    sample_scenario,
    scenario_features,
)
from .gmm import (
    GmmFit,
    GmmModel,
    classify,
    classify_features,
    component_density_order,
    default_gmm,
    fit_gmm,
    responsibilities,
)
from .io import (
    ScenarioParseError,
    atomic_write_text,
    load_gmm,
    load_scenario,
    save_gmm,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .types import DensityClass, Scenario, bumper_gap

__all__ = [
    "DEFAULT_CLASS_PARAMS", "DEFAULT_STYLE_PROBS", "ClassParams", "DensityClass",
    "GenParams", "GmmFit", "GmmModel", "Scenario", "ScenarioParseError",
    "atomic_write_text", "bumper_gap", "classify", "classify_features",
    "component_density_order", "default_gmm", "fit_gmm", "load_gmm",
    "load_scenario", "responsibilities", "sample_scenario", "save_gmm",
    "save_scenario", "scenario_features", "scenario_from_dict", "scenario_to_dict",
]
