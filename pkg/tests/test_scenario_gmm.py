import numpy as np
import pytest

from densemerge.core import ValidationError
from densemerge.scenario import (
    DensityClass,
    GmmModel,
    classify,
    classify_features,
    component_density_order,
    default_gmm,
    fit_gmm,
    responsibilities,
    sample_scenario,
    scenario_features,
)


def test_k1_recovers_sample_mean_exactly():
    rng = np.random.default_rng(0)
    pts = rng.normal([3.0, 5.0], [1.0, 2.0], size=(50, 2))
    fit = fit_gmm(pts, k=1)
    assert fit.model.weights[0] == pytest.approx(1.0, abs=1e-12)
    assert fit.model.means[0] == pytest.approx(pts.mean(axis=0), abs=1e-9)


def test_planted_two_cluster_recovery():
    rng = np.random.default_rng(1)
    a = rng.normal([1.0, 2.0], 0.2, size=(200, 2))
    b = rng.normal([5.0, 10.0], 0.2, size=(200, 2))
    pts = np.concatenate([a, b])
    fit = fit_gmm(pts, k=2, seed=3)
    means = fit.model.means[np.argsort(fit.model.means[:, 0])]
    assert means[0] == pytest.approx([1.0, 2.0], abs=0.1)
    assert means[1] == pytest.approx([5.0, 10.0], abs=0.1)
    resp = responsibilities(fit.model, pts)
    hard = np.argmax(resp, axis=1)
    # cluster of the first half must be homogeneous and differ from the second
    first = np.bincount(hard[:200]).argmax()
    acc = (np.sum(hard[:200] == first) + np.sum(hard[200:] != first)) / 400
    assert acc >= 0.99


def test_log_likelihood_monotone_and_responsibilities_normalized():
    rng = np.random.default_rng(2)
    pts = np.concatenate([
        rng.normal([1.5, 2.5], 0.4, size=(60, 2)),
        rng.normal([3.5, 7.0], 0.6, size=(60, 2)),
    ])
    fit = fit_gmm(pts, k=3, seed=1)
    ll = np.array(fit.ll_history)
    assert np.all(np.diff(ll) >= -1e-8 * np.maximum(1.0, np.abs(ll[:-1])))
    resp = responsibilities(fit.model, pts)
    assert resp.sum(axis=1) == pytest.approx(np.ones(len(pts)), abs=1e-9)


def test_k_larger_than_points_rejected():
    with pytest.raises(ValidationError):
        fit_gmm(np.zeros((2, 2)), k=3)


def test_degenerate_identical_points_do_not_crash():
    pts = np.ones((20, 2))
    fit = fit_gmm(pts, k=2, seed=0)
    assert np.isfinite(fit.log_likelihood)


def test_fit_deterministic_per_seed():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(100, 2))
    f1 = fit_gmm(pts, k=3, seed=9)
    f2 = fit_gmm(pts, k=3, seed=9)
    assert np.array_equal(f1.model.means, f2.model.means)
    assert np.array_equal(f1.model.weights, f2.model.weights)


def test_classify_at_component_mean():
    model = default_gmm()
    labels = component_density_order(model)
    for comp, label in enumerate(labels):
        got = classify_features(model, *model.means[comp])
        assert got is label


def test_classify_synthetic_lower_dense_point():
    model = default_gmm()
    assert classify_features(model, 4.0, 7.0) is DensityClass.LOWER_DENSE
    assert classify_features(model, 1.4, 2.4) is DensityClass.HIGHLY_DENSE


def test_classify_requires_three_components():
    m = GmmModel(weights=np.array([1.0]), means=np.array([[1.0, 2.0]]),
                 covariances=np.array([[[1.0, 0.0], [0.0, 1.0]]]))
    with pytest.raises(ValidationError):
        component_density_order(m)


def test_classify_scenario_matches_generating_class_mostly():
    model = default_gmm()
    hits = 0
    for seed in range(60):
        cls = list(DensityClass)[seed % 3]
        s = sample_scenario(seed, cls)
        hits += classify(model, s) is cls
    assert hits >= 54  # at least 90 %


def test_model_invariants_enforced():
    with pytest.raises(ValidationError):
        GmmModel(weights=np.array([0.7, 0.7]), means=np.zeros((2, 2)),
                 covariances=np.repeat(np.eye(2)[None], 2, axis=0))
    with pytest.raises(ValidationError):
        GmmModel(weights=np.array([0.5, 0.5]), means=np.zeros((2, 2)),
                 covariances=np.zeros((2, 2, 2)))
