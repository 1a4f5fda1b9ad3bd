"""Mini-batch Adam training loop for the attention predictor."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .losses import LossBreakdown
from .model import ModelWeights, init_weights, loss_and_grads, sample_tokens, _forward
from .losses import LAMBDA_TABLE
from ..core import T_FUT


class TrainingDiverged(RuntimeError):
    """Loss became non-finite; learning rate or data is broken."""


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 5e-3
    lr_min: float = 1e-5     # cosine-decayed floor; set equal to lr for a flat schedule
    batch_size: int = 8
    epochs: int = 100
    gamma1: float = 1.0
    gamma2: float = 0.5
    seed: int = 0
    d_model: int = 64
    n_layers: int = 2
    n_heads: int = 4
    beta1: float = 0.9
    beta2: float = 0.99
    eps: float = 1e-8


def evaluate_loss(weights: ModelWeights, examples, gamma1: float, gamma2: float) -> LossBreakdown:
    """Forward-only mean loss over examples."""
    tot_tar = 0.0
    tot_aux = 0.0
    for ex in examples:
        xv, xr, mask = sample_tokens(ex.sample)
        tar, aux, _ = _forward(weights, xv, xr, mask)
        diff = tar - ex.target_future
        tot_tar += float((LAMBDA_TABLE * (diff ** 2).sum(axis=1)).sum() / T_FUT)
        amask = ex.aux_mask.astype(float)
        n_valid = max(amask.sum(), 1.0)
        per_vehicle = ((aux - ex.aux_future) ** 2).sum(axis=2).sum(axis=1) / T_FUT
        tot_aux += float((per_vehicle * amask).sum() / n_valid)
    n = len(examples)
    return LossBreakdown(l_tar=tot_tar / n, l_aux=tot_aux / n, gamma1=gamma1, gamma2=gamma2)


def train(dataset, cfg: TrainConfig, weights: ModelWeights | None = None):
    """Train with Adam; returns (weights, per-epoch mean total loss).

    Deterministic for a given config: initialization, shuffling and updates
    all derive from cfg.seed.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    if weights is None:
        weights = init_weights(cfg.d_model, cfg.n_layers, cfg.n_heads, seed=cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    m = {name: np.zeros_like(arr) for name, arr in weights.named_tensors()}
    v = {name: np.zeros_like(arr) for name, arr in weights.named_tensors()}
    batches_per_epoch = math.ceil(len(dataset) / cfg.batch_size)
    total_steps = max(cfg.epochs * batches_per_epoch, 1)
    step = 0
    curve: list[float] = []
    for _ in range(cfg.epochs):
        order = rng.permutation(len(dataset))
        epoch_loss = 0.0
        for lo in range(0, len(dataset), cfg.batch_size):
            batch = [dataset[i] for i in order[lo:lo + cfg.batch_size]]
            lb, grads = loss_and_grads(weights, batch, cfg.gamma1, cfg.gamma2)
            if not math.isfinite(lb.total):
                raise TrainingDiverged(f"loss {lb.total} at step {step}")
            epoch_loss += lb.total * len(batch)
            lr = cfg.lr_min + 0.5 * (cfg.lr - cfg.lr_min) * (1.0 + math.cos(math.pi * step / total_steps))
            step += 1
            bc1 = 1.0 - cfg.beta1 ** step
            bc2 = 1.0 - cfg.beta2 ** step
            tensors = dict(weights.named_tensors())
            for name, arr in tensors.items():
                g = grads[name]
                m[name] = cfg.beta1 * m[name] + (1.0 - cfg.beta1) * g
                v[name] = cfg.beta2 * v[name] + (1.0 - cfg.beta2) * g * g
                tensors[name] = arr - lr * (m[name] / bc1) / (np.sqrt(v[name] / bc2) + cfg.eps)
            weights = weights.replace_tensors(tensors)
        curve.append(epoch_loss / len(dataset))
    return weights, curve


def params_vector(weights: ModelWeights) -> np.ndarray:
    return np.concatenate([arr.ravel() for _, arr in weights.named_tensors()])


def weights_from_vector(template: ModelWeights, vec: np.ndarray) -> ModelWeights:
    tensors = {}
    pos = 0
    for name, arr in template.named_tensors():
        n = arr.size
        tensors[name] = vec[pos:pos + n].reshape(arr.shape)
        pos += n
    if pos != vec.size:
        raise ValueError(f"vector length {vec.size} does not match parameter count {pos}")
    return template.replace_tensors(tensors)
