"""K-means, Gaussian mixtures, and the robust penalized variant."""

import itertools
import math

import numpy as np
import pytest

from vnreg import (
    ClusterModel,
    DegenerateRowError,
    GrdpgSpec,
    RobustKmeansConfig,
    ValidationError,
    cluster_radius,
    estimate_block_matrix,
    gmm_bic,
    kmeans,
    load_cluster_model,
    robust_gamma,
    robust_kmeans,
    save_cluster_model,
    sphere_project,
    suggest_lambda,
)

from oracles import TWO_BLOCK_B, exhaustive_robust_gamma, robust_instance



def squared_cost(X, model):
    diff = X - model.centers[model.assignments - 1]
    return float(np.sum(diff * diff))


def blobs(rng, centers, size, spread=0.05):
    centers = np.asarray(centers, dtype=np.float64)
    pts = np.vstack(
        [c + spread * rng.standard_normal((size, centers.shape[1])) for c in centers]
    )
    labels = np.repeat(np.arange(len(centers)), size)
    return pts, labels


def agreement_up_to_permutation(found, truth, K):
    """Fraction of points where `found` (labels 1..K) matches 0-based `truth`
    under the best relabeling."""
    found = np.asarray(found)
    truth = np.asarray(truth)
    return max(
        np.mean(np.asarray([perm[t] for t in truth]) == found)
        for perm in itertools.permutations(range(1, K + 1))
    )


# ---------------------------------------------------------------------------
# K-means
# ---------------------------------------------------------------------------


def test_kmeans_matches_exhaustive_partition_search():
    # On tiny instances the best Lloyd run over several seeds must reach the
    # globally optimal squared cost, found here by enumerating every
    # 2-labeling with centers at cluster means.
    rng = np.random.default_rng(40)
    for _ in range(30):
        n = int(rng.integers(5, 9))
        X = rng.uniform(0, 1, size=(n, 2))
        best_alg = min(
            squared_cost(X, kmeans(X, 2, seed=s)) for s in range(30)
        )
        best_brute = math.inf
        for labels in itertools.product((0, 1), repeat=n):
            labels = np.asarray(labels)
            cost = 0.0
            for k in (0, 1):
                members = X[labels == k]
                if len(members):
                    cost += float(np.sum((members - members.mean(axis=0)) ** 2))
            best_brute = min(best_brute, cost)
        assert best_alg <= best_brute + 1e-9


def test_kmeans_unit_square_corners():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    best = min(squared_cost(X, kmeans(X, 2, seed=s)) for s in range(10))
    # Optimal: pair adjacent corners, each point 0.5 from its center.
    assert best == pytest.approx(1.0, abs=1e-12)


def test_kmeans_recovers_separated_blobs():
    rng = np.random.default_rng(3)
    X, truth = blobs(rng, [[0, 0], [4, 0], [0, 4]], 40)
    model = kmeans(X, 3, seed=1)
    assert agreement_up_to_permutation(model.assignments, truth, 3) == 1.0


def test_kmeans_validation():
    with pytest.raises(ValidationError):
        kmeans(np.zeros((3, 2)), 5)


# ---------------------------------------------------------------------------
# Gaussian mixture with BIC
# ---------------------------------------------------------------------------


def test_gmm_bic_selects_true_component_count():
    rng = np.random.default_rng(11)
    X, truth = blobs(rng, [[0, 0], [3, 0], [0, 3]], 60, spread=0.15)
    model = gmm_bic(X, k_range=(1, 6), seed=5, restarts=5)
    assert model.K == 3
    assert agreement_up_to_permutation(model.assignments, truth, 3) > 0.99


def test_gmm_bic_deterministic_given_seed():
    rng = np.random.default_rng(12)
    X, _ = blobs(rng, [[0, 0], [2.5, 0]], 50, spread=0.2)
    a = gmm_bic(X, k_range=(1, 4), seed=9)
    b = gmm_bic(X, k_range=(1, 4), seed=9)
    assert a.K == b.K
    assert np.array_equal(a.assignments, b.assignments)
    assert np.array_equal(a.centers, b.centers)


def test_gmm_bic_k_range_forms():
    rng = np.random.default_rng(13)
    X, _ = blobs(rng, [[0, 0], [3, 0]], 40, spread=0.1)
    assert gmm_bic(X, k_range=2, seed=1).K == 2
    assert gmm_bic(X, k_range=[2, 3], seed=1).K in (2, 3)


def test_gmm_bic_too_few_points():
    with pytest.raises(ValidationError):
        gmm_bic(np.zeros((5, 2)), k_range=(4, 4))


# ---------------------------------------------------------------------------
# robust penalized K-means
# ---------------------------------------------------------------------------


def test_robust_gamma_hand_value():
    X = np.array([[0.0], [1.0], [10.0]])
    model = ClusterModel(
        K=1,
        centers=np.array([[0.5]]),
        covariances=np.zeros((1, 1, 1)),
        weights=np.array([1.0]),
        assignments=np.array([1, 1, 0]),
    )
    # two clustered points at distance 0.5 each, one noise point at 0.7
    assert robust_gamma(X, model, lam=0.7) == pytest.approx(1.7, abs=1e-12)


def test_robust_kmeans_matches_exhaustive_oracle():
    # Independent oracle: enumerate every assignment of points to clusters
    # or noise, centers at cluster means, and take the global minimum.
    rng = np.random.default_rng(2024)
    for i in range(30):
        X, K, lam = robust_instance(rng)
        cfg = RobustKmeansConfig(K=K, lam=lam, r_star=1.6, restarts=40)
        model = robust_kmeans(X, cfg, seed=i)
        achieved = robust_gamma(X, model, lam)
        assert achieved <= exhaustive_robust_gamma(X, K, lam) + 1e-9


def test_robust_kmeans_flags_planted_outliers():
    rng = np.random.default_rng(77)
    X, truth = blobs(rng, [[0, 0], [3, 3]], 30, spread=0.1)
    outliers = np.array([[10.0, -5.0], [-8.0, 9.0], [12.0, 12.0]])
    X = np.vstack([X, outliers])
    cfg = RobustKmeansConfig(K=2, lam=0.5, r_star=1.0, restarts=10)
    model = robust_kmeans(X, cfg, seed=4)
    assert np.all(model.assignments[60:] == 0)
    assert np.all(model.assignments[:60] > 0)
    assert agreement_up_to_permutation(model.assignments[:60], truth, 2) == 1.0


def test_robust_kmeans_all_noise_raises():
    from vnreg import DegenerateClusteringError

    X = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    cfg = RobustKmeansConfig(K=1, lam=0.01, r_star=1e-6, restarts=3)
    with pytest.raises(DegenerateClusteringError):
        robust_kmeans(X, cfg, seed=0)


def test_robust_config_validation():
    with pytest.raises(ValidationError):
        RobustKmeansConfig(K=0)
    with pytest.raises(ValidationError):
        RobustKmeansConfig(K=2, lam=0.0)
    with pytest.raises(ValidationError):
        RobustKmeansConfig(K=2, r_star=-1.0)


# ---------------------------------------------------------------------------
# derived quantities
# ---------------------------------------------------------------------------


def test_cluster_radius_hand_value():
    X = np.array([[0.0, 0.0], [0.0, 3.0], [10.0, 0.0], [10.0, 4.0]])
    model = ClusterModel(
        K=2,
        centers=np.array([[0.0, 1.5], [10.0, 2.0]]),
        covariances=np.zeros((2, 2, 2)),
        weights=np.array([0.5, 0.5]),
        assignments=np.array([1, 1, 2, 2]),
    )
    assert cluster_radius(model, X) == pytest.approx(2.0, abs=1e-12)


def test_suggest_lambda_closed_form():
    # radius + log^2(n+m)/sqrt(n+m) with natural logs
    expected = 0.1 + math.log(10_000) ** 2 / math.sqrt(10_000)
    assert suggest_lambda(0.1, 10_000) == pytest.approx(expected, abs=1e-12)
    assert suggest_lambda(0.1, 10_000) == pytest.approx(0.9483, abs=1e-4)


def test_suggest_lambda_from_model():
    X = np.array([[0.0], [2.0], [10.0], [14.0]])
    model = ClusterModel(
        K=2,
        centers=np.array([[1.0], [12.0]]),
        covariances=np.ones((2, 1, 1)),
        weights=np.array([0.5, 0.5]),
        assignments=np.array([1, 1, 2, 2]),
    )
    expected = 2.0 + math.log(100) ** 2 / math.sqrt(100)
    assert suggest_lambda(model, 100, points=X) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValidationError):
        suggest_lambda(model, 100)  # needs the points to measure the radius


def test_estimate_block_matrix_inverts_factorization():
    spec, _ = GrdpgSpec.from_block_matrix(TWO_BLOCK_B, sizes=(10, 10))
    block_rows = spec.X[[0, 10]]
    recovered = estimate_block_matrix(block_rows, spec.signature)
    assert np.max(np.abs(recovered - TWO_BLOCK_B)) < 1e-12


def test_estimate_block_matrix_clamps():
    centers = np.array([[2.0, 0.0], [0.0, 0.5]])
    clamped, mask = estimate_block_matrix(centers, (2, 0), return_clamp_mask=True)
    assert clamped[0, 0] == 1.0  # 4.0 clamped down
    assert mask[0, 0] and not mask[1, 1]


def test_sphere_project():
    X = np.array([[3.0, 4.0], [0.0, 2.0]])
    projected = sphere_project(X)
    assert np.allclose(np.linalg.norm(projected, axis=1), 1.0)
    assert np.allclose(projected[0], [0.6, 0.8])
    with pytest.raises(DegenerateRowError):
        sphere_project(np.array([[0.0, 0.0]]))


def test_cluster_model_round_trip(tmp_path):
    rng = np.random.default_rng(8)
    X, _ = blobs(rng, [[0, 0], [2, 2]], 20, spread=0.2)
    model = gmm_bic(X, k_range=(2, 2), seed=3)
    path = tmp_path / "model.json"
    save_cluster_model(model, path)
    loaded = load_cluster_model(path)
    assert loaded.K == model.K
    assert np.allclose(loaded.centers, model.centers)
    assert np.allclose(loaded.covariances, model.covariances)
    assert np.array_equal(loaded.assignments, model.assignments)
