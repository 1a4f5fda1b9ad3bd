"""Set-attention trajectory predictor over vehicles and road polylines.

Vehicle histories and road polylines are flattened, linearly embedded to a
shared width, passed through self-attention across the vehicle set and then
cross-attention with road tokens as keys/values, and decoded by two linear
heads: one for the target vehicle's trajectory, one auxiliary head applied to
every vehicle row. There is no positional encoding across vehicles; the
vehicle axis is a set. Residual connections plus parameterless layer
normalization follow each attention block.

Everything is float64 numpy with hand-written backward passes, so training
stays bitwise deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import D_V, MAX_NEIGHBORS, NEIGHBOR_FEATURES, ROAD_POINTS, ROAD_POLYLINES, Sample, T_FUT, T_HIS, ValidationError
from ..core.sample import CHANNELS
from .losses import LAMBDA_TABLE
from .trajectory import PlannedTrajectory

VEH_IN = T_HIS * D_V
ROAD_IN = ROAD_POINTS * 2
N_TOKENS = 1 + MAX_NEIGHBORS
OUT_DIM = T_FUT * 4

_LN_EPS = 1e-6
_MASKED_SCORE = -1e30

# Fixed feature scaling at the model boundary. Inputs are divided by these
# before embedding and head outputs are multiplied by OUTPUT_SCALE, so the
# network operates near unit magnitude regardless of the physical units.
INPUT_SCALE_VEH = np.array([20.0, 5.0, 1.0, 5.0, 5.0, 5.0, 5.0, 5.0,
                            0.6, 20.0, 1.0, 3.0, 10.0])
INPUT_SCALE_ROAD = np.array([50.0, 5.0])
OUTPUT_SCALE = np.array([20.0, 2.0, 0.5, 5.0])


@dataclass(frozen=True)
class AttnBlock:
    wq: np.ndarray
    wk: np.ndarray
    wv: np.ndarray
    wo: np.ndarray


@dataclass(frozen=True)
class ModelWeights:
    d_model: int
    n_layers: int
    n_heads: int
    w_embed_veh: np.ndarray   # (VEH_IN, D)
    b_embed_veh: np.ndarray   # (D,)
    w_embed_road: np.ndarray  # (ROAD_IN, D)
    b_embed_road: np.ndarray  # (D,)
    self_blocks: tuple[AttnBlock, ...]
    cross_blocks: tuple[AttnBlock, ...]
    w_out: np.ndarray         # (D, OUT_DIM)
    b_out: np.ndarray
    w_aux: np.ndarray         # (D, OUT_DIM)
    b_aux: np.ndarray
    channels: tuple[str, ...] = field(default=CHANNELS)

    def __post_init__(self) -> None:
        d = self.d_model
        if d % self.n_heads != 0:
            raise ValidationError(f"d_model {d} not divisible by {self.n_heads} heads")
        expected = {
            "w_embed_veh": (VEH_IN, d), "b_embed_veh": (d,),
            "w_embed_road": (ROAD_IN, d), "b_embed_road": (d,),
            "w_out": (d, OUT_DIM), "b_out": (OUT_DIM,),
            "w_aux": (d, OUT_DIM), "b_aux": (OUT_DIM,),
        }
        for name, shape in expected.items():
            got = getattr(self, name).shape
            if got != shape:
                raise ValidationError(f"{name} has shape {got}, expected {shape}")
        if len(self.self_blocks) != self.n_layers or len(self.cross_blocks) != self.n_layers:
            raise ValidationError("block count does not match n_layers")
        for kind, blocks in (("self", self.self_blocks), ("cross", self.cross_blocks)):
            for i, blk in enumerate(blocks):
                for wn in ("wq", "wk", "wv", "wo"):
                    got = getattr(blk, wn).shape
                    if got != (d, d):
                        raise ValidationError(f"{kind}{i}.{wn} has shape {got}, expected {(d, d)}")

    def named_tensors(self):
        """(name, array) pairs in the canonical serialization order."""
        yield "w_embed_veh", self.w_embed_veh
        yield "b_embed_veh", self.b_embed_veh
        yield "w_embed_road", self.w_embed_road
        yield "b_embed_road", self.b_embed_road
        for kind, blocks in (("self", self.self_blocks), ("cross", self.cross_blocks)):
            for i, blk in enumerate(blocks):
                for wn in ("wq", "wk", "wv", "wo"):
                    yield f"{kind}{i}_{wn}", getattr(blk, wn)
        yield "w_out", self.w_out
        yield "b_out", self.b_out
        yield "w_aux", self.w_aux
        yield "b_aux", self.b_aux

    def tensor_shapes(self) -> dict[str, tuple[int, ...]]:
        return {name: arr.shape for name, arr in self.named_tensors()}

    def replace_tensors(self, tensors: dict[str, np.ndarray]) -> "ModelWeights":
        def get(name):
            return np.asarray(tensors[name], dtype=float)

        blocks = {}
        for kind in ("self", "cross"):
            blocks[kind] = tuple(
                AttnBlock(*(get(f"{kind}{i}_{wn}") for wn in ("wq", "wk", "wv", "wo")))
                for i in range(self.n_layers))
        return ModelWeights(
            d_model=self.d_model, n_layers=self.n_layers, n_heads=self.n_heads,
            w_embed_veh=get("w_embed_veh"), b_embed_veh=get("b_embed_veh"),
            w_embed_road=get("w_embed_road"), b_embed_road=get("b_embed_road"),
            self_blocks=blocks["self"], cross_blocks=blocks["cross"],
            w_out=get("w_out"), b_out=get("b_out"),
            w_aux=get("w_aux"), b_aux=get("b_aux"),
            channels=self.channels,
        )


def init_weights(d_model: int = 64, n_layers: int = 2, n_heads: int = 4,
                 seed: int = 0) -> ModelWeights:
    """Fan-in scaled Gaussian initialization, deterministic per seed."""
    rng = np.random.default_rng(seed)

    def mat(n_in, n_out):
        return rng.normal(0.0, 1.0 / np.sqrt(n_in), size=(n_in, n_out))

    def block():
        return AttnBlock(wq=mat(d_model, d_model), wk=mat(d_model, d_model),
                         wv=mat(d_model, d_model), wo=mat(d_model, d_model))

    return ModelWeights(
        d_model=d_model, n_layers=n_layers, n_heads=n_heads,
        w_embed_veh=mat(VEH_IN, d_model), b_embed_veh=np.zeros(d_model),
        w_embed_road=mat(ROAD_IN, d_model), b_embed_road=np.zeros(d_model),
        self_blocks=tuple(block() for _ in range(n_layers)),
        cross_blocks=tuple(block() for _ in range(n_layers)),
        w_out=mat(d_model, OUT_DIM), b_out=np.zeros(OUT_DIM),
        w_aux=mat(d_model, OUT_DIM), b_aux=np.zeros(OUT_DIM),
    )


def sample_tokens(sample: Sample) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flattened, unit-scaled token matrices: vehicles (N_TOKENS, VEH_IN), road (2, ROAD_IN), mask."""
    xv = np.zeros((N_TOKENS, VEH_IN))
    xv[0] = (sample.target_history / INPUT_SCALE_VEH).ravel()
    expanded = np.zeros((T_HIS, D_V))
    for i in range(MAX_NEIGHBORS):
        if sample.neighbor_mask[i]:
            expanded[:] = 0.0
            expanded[:, :NEIGHBOR_FEATURES] = sample.neighbors[i] / INPUT_SCALE_VEH[:NEIGHBOR_FEATURES]
            xv[1 + i] = expanded.ravel()
    mask = np.concatenate([[True], sample.neighbor_mask])
    xr = (sample.road / INPUT_SCALE_ROAD).reshape(ROAD_POLYLINES, ROAD_IN)
    return xv, xr, mask


def embed(weights: ModelWeights, sample: Sample) -> tuple[np.ndarray, np.ndarray]:
    """Linear projections of flattened vehicle histories and road polylines."""
    xv, xr, _ = sample_tokens(sample)
    f_v = xv @ weights.w_embed_veh + weights.b_embed_veh
    f_r = xr @ weights.w_embed_road + weights.b_embed_road
    return f_v, f_r


def _split_heads(x: np.ndarray, n_heads: int) -> np.ndarray:
    n, d = x.shape
    return x.reshape(n, n_heads, d // n_heads).transpose(1, 0, 2)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    h, n, dh = x.shape
    return x.transpose(1, 0, 2).reshape(n, h * dh)


def _mha_forward(blk: AttnBlock, q_in: np.ndarray, kv_in: np.ndarray,
                 n_heads: int, key_mask: np.ndarray | None):
    q = q_in @ blk.wq
    k = kv_in @ blk.wk
    v = kv_in @ blk.wv
    qh, kh, vh = (_split_heads(a, n_heads) for a in (q, k, v))
    dh = qh.shape[-1]
    scores = qh @ kh.transpose(0, 2, 1) / np.sqrt(dh)
    if key_mask is not None:
        scores = np.where(key_mask[None, None, :], scores, _MASKED_SCORE)
    scores -= scores.max(axis=-1, keepdims=True)
    expd = np.exp(scores)
    probs = expd / expd.sum(axis=-1, keepdims=True)
    ctx = probs @ vh
    out = _merge_heads(ctx) @ blk.wo
    cache = (q_in, kv_in, qh, kh, vh, probs)
    return out, probs, cache


def _mha_backward(blk: AttnBlock, d_out: np.ndarray, cache, n_heads: int):
    q_in, kv_in, qh, kh, vh, probs = cache
    dh = qh.shape[-1]
    ctx = probs @ vh
    d_ctx_flat = d_out @ blk.wo.T
    d_wo = _merge_heads(ctx).T @ d_out
    d_ctx = _split_heads(d_ctx_flat, n_heads)
    d_probs = d_ctx @ vh.transpose(0, 2, 1)
    d_vh = probs.transpose(0, 2, 1) @ d_ctx
    d_scores = probs * (d_probs - (d_probs * probs).sum(axis=-1, keepdims=True))
    d_qh = d_scores @ kh / np.sqrt(dh)
    d_kh = d_scores.transpose(0, 2, 1) @ qh / np.sqrt(dh)
    dq, dk, dv = _merge_heads(d_qh), _merge_heads(d_kh), _merge_heads(d_vh)
    grads = {
        "wq": q_in.T @ dq,
        "wk": kv_in.T @ dk,
        "wv": kv_in.T @ dv,
        "wo": d_wo,
    }
    d_q_in = dq @ blk.wq.T
    d_kv_in = dk @ blk.wk.T + dv @ blk.wv.T
    return d_q_in, d_kv_in, grads


def _ln_forward(x: np.ndarray):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    inv = 1.0 / np.sqrt((xc ** 2).mean(axis=-1, keepdims=True) + _LN_EPS)
    y = xc * inv
    return y, (y, inv)


def _ln_backward(dy: np.ndarray, cache) -> np.ndarray:
    y, inv = cache
    return inv * (dy - dy.mean(axis=-1, keepdims=True)
                  - y * (dy * y).mean(axis=-1, keepdims=True))


def _forward(weights: ModelWeights, xv: np.ndarray, xr: np.ndarray, mask: np.ndarray):
    """Full forward pass with caches for the backward sweep."""
    f = xv @ weights.w_embed_veh + weights.b_embed_veh
    fr = xr @ weights.w_embed_road + weights.b_embed_road
    self_caches = []
    for blk in weights.self_blocks:
        a, _, mc = _mha_forward(blk, f, f, weights.n_heads, mask)
        y, lc = _ln_forward(f + a)
        self_caches.append((mc, lc))
        f = y
    cross_caches = []
    for blk in weights.cross_blocks:
        a, _, mc = _mha_forward(blk, f, fr, weights.n_heads, None)
        y, lc = _ln_forward(f + a)
        cross_caches.append((mc, lc))
        f = y
    tar = (f[0] @ weights.w_out + weights.b_out).reshape(T_FUT, 4) * OUTPUT_SCALE
    aux = (f @ weights.w_aux + weights.b_aux).reshape(N_TOKENS, T_FUT, 4) * OUTPUT_SCALE
    cache = (xv, xr, f, self_caches, cross_caches)
    return tar, aux, cache


def attention_forward(weights: ModelWeights, f_v: np.ndarray, f_r: np.ndarray,
                      mask: np.ndarray | None = None, return_probs: bool = False):
    """Self-attention over vehicle tokens, then cross-attention with road tokens.

    Takes already-embedded features; returns the updated vehicle features and,
    on request, the per-layer attention probabilities.
    """
    if f_v.shape[1] != weights.d_model or f_r.shape[1] != weights.d_model:
        raise ValidationError(
            f"feature width {f_v.shape[1]}/{f_r.shape[1]} does not match d_model {weights.d_model}")
    probs_log = []
    f = f_v
    for blk in weights.self_blocks:
        a, probs, _ = _mha_forward(blk, f, f, weights.n_heads, mask)
        probs_log.append(probs)
        f, _ = _ln_forward(f + a)
    for blk in weights.cross_blocks:
        a, probs, _ = _mha_forward(blk, f, f_r, weights.n_heads, None)
        probs_log.append(probs)
        f, _ = _ln_forward(f + a)
    if return_probs:
        return f, probs_log
    return f


def predict(weights: ModelWeights, sample: Sample):
    """Local-frame prediction.

    Returns (target PlannedTrajectory, auxiliary trajectories (N_TOKENS, T_FUT, 4),
    token validity mask). De-normalize with PlannedTrajectory.to_global(sample.frame).
    """
    xv, xr, mask = sample_tokens(sample)
    tar, aux, _ = _forward(weights, xv, xr, mask)
    return PlannedTrajectory(tar), aux, mask


def loss_and_grads(weights: ModelWeights, examples, gamma1: float, gamma2: float):
    """Mean loss over examples and analytic parameter gradients.

    Each example provides (sample, target_future, aux_future, aux_mask); see
    policy.dataset.TrainingExample.
    """
    grads = {name: np.zeros_like(arr) for name, arr in weights.named_tensors()}
    n = len(examples)
    tot_tar = 0.0
    tot_aux = 0.0
    for ex in examples:
        xv, xr, mask = sample_tokens(ex.sample)
        tar, aux, cache = _forward(weights, xv, xr, mask)
        _, _, f, self_caches, cross_caches = cache

        diff_tar = tar - ex.target_future
        tot_tar += float((LAMBDA_TABLE * (diff_tar ** 2).sum(axis=1)).sum() / T_FUT)
        d_tar = (gamma1 / n) * (2.0 / T_FUT) * LAMBDA_TABLE[:, None] * diff_tar

        amask = ex.aux_mask.astype(float)
        n_valid = max(amask.sum(), 1.0)
        diff_aux = aux - ex.aux_future
        per_vehicle = (diff_aux ** 2).sum(axis=2).sum(axis=1) / T_FUT
        tot_aux += float((per_vehicle * amask).sum() / n_valid)
        d_aux = (gamma2 / n) * (2.0 / (n_valid * T_FUT)) * amask[:, None, None] * diff_aux

        # heads (undo the fixed output scaling in the chain rule)
        d_tar_flat = (d_tar * OUTPUT_SCALE).reshape(OUT_DIM)
        d_aux_flat = (d_aux * OUTPUT_SCALE).reshape(N_TOKENS, OUT_DIM)
        df = np.zeros_like(f)
        df[0] += d_tar_flat @ weights.w_out.T
        grads["w_out"] += np.outer(f[0], d_tar_flat)
        grads["b_out"] += d_tar_flat
        df += d_aux_flat @ weights.w_aux.T
        grads["w_aux"] += f.T @ d_aux_flat
        grads["b_aux"] += d_aux_flat.sum(axis=0)

        # cross-attention stack, reversed
        dfr = np.zeros((ROAD_POLYLINES, weights.d_model))
        for i in range(weights.n_layers - 1, -1, -1):
            mc, lc = cross_caches[i]
            d2 = _ln_backward(df, lc)
            dq_in, dkv_in, g = _mha_backward(weights.cross_blocks[i], d2, mc, weights.n_heads)
            df = d2 + dq_in
            dfr += dkv_in
            for wn, gv in g.items():
                grads[f"cross{i}_{wn}"] += gv
        grads["w_embed_road"] += xr.T @ dfr
        grads["b_embed_road"] += dfr.sum(axis=0)

        # self-attention stack, reversed
        for i in range(weights.n_layers - 1, -1, -1):
            mc, lc = self_caches[i]
            d2 = _ln_backward(df, lc)
            dq_in, dkv_in, g = _mha_backward(weights.self_blocks[i], d2, mc, weights.n_heads)
            df = d2 + dq_in + dkv_in
            for wn, gv in g.items():
                grads[f"self{i}_{wn}"] += gv
        grads["w_embed_veh"] += xv.T @ df
        grads["b_embed_veh"] += df.sum(axis=0)

    from .losses import LossBreakdown

    return LossBreakdown(l_tar=tot_tar / n, l_aux=tot_aux / n,
                         gamma1=gamma1, gamma2=gamma2), grads
