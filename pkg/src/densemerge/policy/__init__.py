"""Main-lane vehicle behavior: IDM rule policy, attention predictor, training."""

from ..core import Sample
from .dataset import (
    TrainingExample,
    generate_dataset,
    rollout_scene,
    slice_windows,
    window_passes_filters,
)
from .idm import EMERGENCY_DECEL, IdmParams, STYLE_PARAMS, idm_accel
from .losses import LAMBDA_TABLE, LossBreakdown, aux_loss, lambda_weight, loss, target_loss
from .model import (
    AttnBlock,
    ModelWeights,
    N_TOKENS,
    OUT_DIM,
    ROAD_IN,
    VEH_IN,
    attention_forward,
    embed,
    init_weights,
    loss_and_grads,
    predict,
    sample_tokens,
)
from .rule import plan_rule_batch, rule_policy_plan
from .train import (
    TrainConfig,
    TrainingDiverged,
    evaluate_loss,
    params_vector,
    train,
    weights_from_vector,
)
from .trajectory import PlannedTrajectory
from .weights_io import (
    WeightsFormatError,
    load_weights,
    load_weights_json,
    save_weights,
    save_weights_json,
)

__all__ = [
    "AttnBlock", "EMERGENCY_DECEL", "IdmParams", "LAMBDA_TABLE", "LossBreakdown",
    "ModelWeights", "N_TOKENS", "OUT_DIM", "PlannedTrajectory", "ROAD_IN",
    "STYLE_PARAMS", "Sample", "TrainConfig", "TrainingDiverged", "TrainingExample",
    "VEH_IN", "WeightsFormatError", "attention_forward", "aux_loss", "embed",
    "evaluate_loss", "generate_dataset", "idm_accel", "init_weights",
    "lambda_weight", "load_weights", "load_weights_json", "loss", "loss_and_grads",
    "params_vector", "plan_rule_batch", "predict", "rollout_scene",
    "rule_policy_plan", "sample_tokens", "save_weights", "save_weights_json",
    "slice_windows", "target_loss", "train", "weights_from_vector",
    "window_passes_filters",
]
