"""Gaussian mixture fitting (EM) and density classification of scenarios.

Scenarios are classified on two features, average speed and average gap.
Components map to density classes by sorting component mean gap ascending:
tightest spacing is the highly dense class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import ValidationError
from .generate import DEFAULT_CLASS_PARAMS, GenParams
from .types import DensityClass, Scenario
from .generate import scenario_features

_COV_REG = 1e-6
_LL_BACKSLIDE_TOL = 1e-8


@dataclass(frozen=True)
class GmmModel:
    """A fitted k-component full-covariance Gaussian mixture."""

    weights: np.ndarray      # (k,)
    means: np.ndarray        # (k, 2)
    covariances: np.ndarray  # (k, 2, 2)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        m = np.asarray(self.means, dtype=float)
        c = np.asarray(self.covariances, dtype=float)
        if w.ndim != 1 or m.shape != (w.size, 2) or c.shape != (w.size, 2, 2):
            raise ValidationError(f"inconsistent GMM shapes {w.shape}, {m.shape}, {c.shape}")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValidationError(f"component weights sum to {w.sum()}, expected 1")
        for i, cov in enumerate(c):
            if np.linalg.det(cov) <= 0:
                raise ValidationError(f"component {i} covariance is not positive definite")
        for arr in (w, m, c):
            arr.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "covariances", c)

    @property
    def k(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class GmmFit:
    model: GmmModel
    log_likelihood: float
    ll_history: tuple[float, ...] = field(repr=False)
    n_iter: int = 0


def _log_gaussians(points: np.ndarray, model_means, model_covs) -> np.ndarray:
    """Log densities (n, k) of each point under each component."""
    n, d = points.shape
    k = len(model_means)
    out = np.empty((n, k))
    for i in range(k):
        cov = model_covs[i]
        chol = np.linalg.cholesky(cov)
        diff = points - model_means[i]
        sol = np.linalg.solve(chol, diff.T)
        out[:, i] = (-0.5 * np.sum(sol ** 2, axis=0)
                     - np.sum(np.log(np.diag(chol)))
                     - 0.5 * d * np.log(2 * np.pi))
    return out


def _responsibilities(points, weights, means, covs) -> tuple[np.ndarray, float]:
    logp = _log_gaussians(points, means, covs) + np.log(weights)[None, :]
    mx = logp.max(axis=1, keepdims=True)
    lse = mx[:, 0] + np.log(np.exp(logp - mx).sum(axis=1))
    resp = np.exp(logp - lse[:, None])
    return resp, float(lse.sum())


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: spread initial means proportionally to squared distance."""
    centers = [points[rng.integers(len(points))]]
    for _ in range(k - 1):
        d2 = np.min([np.sum((points - c) ** 2, axis=1) for c in centers], axis=0)
        total = d2.sum()
        if total <= 0:
            centers.append(points[rng.integers(len(points))])
            continue
        centers.append(points[rng.choice(len(points), p=d2 / total)])
    return np.array(centers)


def fit_gmm(points, k: int, max_iter: int = 200, tol: float = 1e-8, seed: int = 0) -> GmmFit:
    """Fit a k-component mixture by EM with k-means++ initialization.

    Covariances are regularized with a 1e-6 diagonal, which keeps collapsed
    clusters benign. The per-iteration log-likelihood is checked to be
    non-decreasing; a real decrease indicates a bug and raises.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError(f"points must be (n, 2), got {pts.shape}")
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}")
    if len(pts) < k:
        raise ValidationError(f"need at least k={k} points, got {len(pts)}")

    rng = np.random.default_rng(seed)
    means = _kmeans_pp_init(pts, k, rng)
    global_cov = np.cov(pts.T) + _COV_REG * np.eye(2) if len(pts) > 1 else np.eye(2)
    covs = np.repeat(global_cov[None], k, axis=0)
    weights = np.full(k, 1.0 / k)

    history: list[float] = []
    prev_ll = -np.inf
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        resp, ll = _responsibilities(pts, weights, means, covs)
        if ll < prev_ll - _LL_BACKSLIDE_TOL * max(1.0, abs(prev_ll)):
            raise RuntimeError(f"EM log-likelihood decreased: {prev_ll} -> {ll}")
        history.append(ll)
        if ll - prev_ll < tol * max(1.0, abs(ll)) and n_iter > 1:
            break
        prev_ll = ll

        nk = resp.sum(axis=0)
        nk = np.maximum(nk, 1e-12)
        weights = nk / nk.sum()
        means = (resp.T @ pts) / nk[:, None]
        for i in range(k):
            diff = pts - means[i]
            covs[i] = (resp[:, i, None] * diff).T @ diff / nk[i] + _COV_REG * np.eye(2)

    model = GmmModel(weights=weights, means=means, covariances=covs)
    return GmmFit(model=model, log_likelihood=history[-1], ll_history=tuple(history), n_iter=n_iter)


def responsibilities(model: GmmModel, features: np.ndarray) -> np.ndarray:
    """Posterior component probabilities for feature rows (n, 2)."""
    feats = np.atleast_2d(np.asarray(features, dtype=float))
    resp, _ = _responsibilities(feats, model.weights, model.means, model.covariances)
    return resp


def component_density_order(model: GmmModel) -> list[DensityClass]:
    """Class of each component: mean gap ascending maps to densest first."""
    if model.k != 3:
        raise ValidationError(f"density classification needs k=3 components, got {model.k}")
    order = np.argsort(model.means[:, 1])
    classes: list[DensityClass | None] = [None] * 3
    for rank, comp in enumerate(order):
        classes[comp] = (DensityClass.HIGHLY_DENSE, DensityClass.MEDIUM_DENSE,
                         DensityClass.LOWER_DENSE)[rank]
    return classes  # type: ignore[return-value]


def classify_features(model: GmmModel, avg_speed: float, avg_gap: float) -> DensityClass:
    labels = component_density_order(model)
    resp = responsibilities(model, np.array([[avg_speed, avg_gap]]))[0]
    return labels[int(np.argmax(resp))]


def classify(model: GmmModel, s: Scenario) -> DensityClass:
    """Density class of the maximum-responsibility component for the scenario."""
    avg_speed, avg_gap = scenario_features(s)
    return classify_features(model, avg_speed, avg_gap)


def default_gmm(params: GenParams | None = None, typical_n: int = 10) -> GmmModel:
    """Analytic mixture matching the generator's scenario-level feature spread.

    Scenario features average roughly typical_n vehicle-level draws, which
    shrinks the per-vehicle variances accordingly.
    """
    cps = (params.class_params if params else DEFAULT_CLASS_PARAMS)
    means = []
    covs = []
    for cls in (DensityClass.HIGHLY_DENSE, DensityClass.MEDIUM_DENSE, DensityClass.LOWER_DENSE):
        cp = cps[cls]
        a = cp.speed_per_gap
        var_gap = cp.gap_sigma ** 2 / typical_n
        var_speed = (a ** 2 * cp.gap_sigma ** 2 + cp.speed_noise ** 2) / typical_n
        cov_sg = a * cp.gap_sigma ** 2 / typical_n
        means.append([cp.mean_speed, cp.mean_gap])
        covs.append([[var_speed, cov_sg], [cov_sg, var_gap]])
    return GmmModel(weights=np.full(3, 1 / 3), means=np.array(means), covariances=np.array(covs))
