"""Training losses: time-weighted target MSE plus an unweighted auxiliary term."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import T_FUT, ValidationError


def lambda_weight(t: int) -> float:
    """Frame weight exp((t - T_fut)/t) + 1 on t = 1..T_fut.

    The weight grows with t, so late-horizon errors dominate; it is bounded
    in (1, 2] and equals 2 exactly at the final frame. t = 0 is outside the
    formula's domain.
    """
    if t < 1:
        raise ValidationError(f"frame index must be >= 1, got {t}")
    return math.exp((t - T_FUT) / t) + 1.0


# Per-row weights for trajectory arrays (row i is frame i+1).
LAMBDA_TABLE = np.array([lambda_weight(t) for t in range(1, T_FUT + 1)])


@dataclass(frozen=True)
class LossBreakdown:
    l_tar: float
    l_aux: float
    gamma1: float
    gamma2: float

    @property
    def total(self) -> float:
        return self.gamma1 * self.l_tar + self.gamma2 * self.l_aux


def target_loss(pred: np.ndarray, gt: np.ndarray) -> float:
    """(1/T_fut) * sum_t lambda(t) * ||pred_t - gt_t||^2 over supervised channels."""
    if pred.shape != gt.shape or pred.shape != (T_FUT, 4):
        raise ValidationError(f"expected ({T_FUT}, 4) trajectories, got {pred.shape} vs {gt.shape}")
    sq = ((pred - gt) ** 2).sum(axis=1)
    return float((LAMBDA_TABLE * sq).sum() / T_FUT)


def aux_loss(aux_pred: np.ndarray, aux_gt: np.ndarray, mask: np.ndarray) -> float:
    """Plain per-vehicle MSE, averaged over the valid vehicles."""
    if aux_pred.shape != aux_gt.shape:
        raise ValidationError(f"auxiliary shape mismatch {aux_pred.shape} vs {aux_gt.shape}")
    n_valid = int(mask.sum())
    if n_valid == 0:
        return 0.0
    per_vehicle = ((aux_pred - aux_gt) ** 2).sum(axis=2).sum(axis=1) / T_FUT
    return float((per_vehicle * mask).sum() / n_valid)


def loss(pred: np.ndarray, gt: np.ndarray,
         aux_pred: np.ndarray, aux_gt: np.ndarray, aux_mask: np.ndarray,
         gamma1: float = 1.0, gamma2: float = 0.5) -> LossBreakdown:
    """Combined loss over the supervised (x, y, theta, speed) channels."""
    return LossBreakdown(
        l_tar=target_loss(pred, gt),
        l_aux=aux_loss(aux_pred, aux_gt, aux_mask),
        gamma1=gamma1,
        gamma2=gamma2,
    )
