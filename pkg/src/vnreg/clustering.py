"""Clustering stages of the pipeline.

Gaussian-mixture fitting with BIC model selection (full covariances only),
plain K-means (used as an initializer and baseline), the robust penalized
K-means that labels far-away points as noise, and helpers that turn cluster
centers into an estimated block matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp

from ._rng import as_rng, op_streams
from .errors import (
    ConvergenceError,
    DegenerateClusteringError,
    DegenerateRowError,
    ValidationError,
)
from .graph_models import _indefinite_gram

__all__ = [
    "ClusterModel",
    "RobustKmeansConfig",
    "DEFAULT_LAMBDA",
    "gmm_bic",
    "kmeans",
    "robust_kmeans",
    "robust_gamma",
    "suggest_lambda",
    "cluster_radius",
    "estimate_block_matrix",
    "sphere_project",
    "save_cluster_model",
    "load_cluster_model",
]

#: Penalty per noise point that proved sufficient across the simulations.
DEFAULT_LAMBDA = 0.2


@dataclass(frozen=True)
class ClusterModel:
    """K centers with covariances, mixing weights, and hard assignments.

    Assignment labels run 1..K; label 0 marks a point left unclustered
    (noise). Plain K-means / GMM fits label every point.
    """

    K: int
    centers: np.ndarray
    covariances: np.ndarray
    weights: np.ndarray
    assignments: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.float64)
        covs = np.asarray(self.covariances, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        labels = np.asarray(self.assignments, dtype=np.int64)
        for name, val in (
            ("centers", centers), ("covariances", covs),
            ("weights", weights), ("assignments", labels),
        ):
            object.__setattr__(self, name, val)
        d = centers.shape[1] if centers.ndim == 2 else 0
        if centers.shape != (self.K, d):
            raise ValidationError(f"centers shape {centers.shape} does not match K={self.K}")
        if covs.shape != (self.K, d, d):
            raise ValidationError("need one d x d covariance per cluster")
        if weights.shape != (self.K,) or weights.min() < 0 or abs(weights.sum() - 1) > 1e-9:
            raise ValidationError("weights must be a length-K simplex vector")
        for k in range(self.K):
            if not np.allclose(covs[k], covs[k].T, atol=1e-9):
                raise ValidationError(f"covariance {k} not symmetric")
            if np.linalg.eigvalsh(covs[k]).min() < -1e-9:
                raise ValidationError(f"covariance {k} not positive semidefinite")
        if labels.min(initial=0) < 0 or labels.max(initial=0) > self.K:
            raise ValidationError("assignment labels must lie in {0, 1, .., K}")

    @property
    def d(self) -> int:
        return self.centers.shape[1]

    def clustered(self) -> np.ndarray:
        """Indices of points with a nonzero label."""
        return np.nonzero(self.assignments > 0)[0]


@dataclass(frozen=True)
class RobustKmeansConfig:
    """Settings for the robust penalized K-means.

    ``lam`` is the per-noise-point penalty (the objective's lambda);
    ``r_star`` the maximum distance at which a point may join a cluster.
    """

    K: int
    lam: float = DEFAULT_LAMBDA
    r_star: float = 1.0
    max_iters: int = 100
    restarts: int = 20

    def __post_init__(self):
        if self.K < 1:
            raise ValidationError("K must be >= 1")
        if not self.lam > 0:
            raise ValidationError("lambda must be > 0")
        if not self.r_star > 0:
            raise ValidationError("r_star must be > 0")
        if self.max_iters < 1 or self.restarts < 1:
            raise ValidationError("max_iters and restarts must be >= 1")


# ---------------------------------------------------------------------------
# K-means
# ---------------------------------------------------------------------------


def _kmeanspp_indices(X: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = np.sum((X - X[chosen[0]]) ** 2, axis=1)
    for _ in range(1, K):
        total = d2.sum()
        nxt = int(rng.integers(n)) if total <= 0 else int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, np.sum((X - X[nxt]) ** 2, axis=1))
    return np.asarray(chosen)


def _sq_dists(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """n x K matrix of squared Euclidean distances."""
    diff = X[:, None, :] - centers[None, :, :]
    return np.sum(diff * diff, axis=2)


def _reseed_empty(labels: np.ndarray, centers: np.ndarray, X: np.ndarray) -> None:
    """Move each empty cluster's center to the clustered point farthest from
    its currently assigned center, relabeling that point. In-place."""
    K = centers.shape[0]
    used: set[int] = set()
    for k in range(K):
        if np.any(labels == k):
            continue
        clustered = np.nonzero(labels >= 0)[0]
        dists = np.linalg.norm(X[clustered] - centers[labels[clustered]], axis=1)
        order = np.argsort(-dists, kind="stable")
        pick = next((clustered[i] for i in order if int(clustered[i]) not in used), None)
        if pick is None:
            continue
        centers[k] = X[pick]
        labels[pick] = k
        used.add(int(pick))


def _per_cluster_stats(
    X: np.ndarray, labels: np.ndarray, K: int
) -> tuple[np.ndarray, np.ndarray]:
    """Sample covariance (ddof 0) and size of each cluster, labels in 0..K-1."""
    d = X.shape[1]
    covs = np.zeros((K, d, d))
    sizes = np.zeros(K, dtype=np.int64)
    for k in range(K):
        members = X[labels == k]
        sizes[k] = len(members)
        if len(members):
            diff = members - members.mean(axis=0)
            covs[k] = diff.T @ diff / len(members)
    return covs, sizes


def kmeans(points, K: int, seed=None, max_iters: int = 300) -> ClusterModel:
    """Lloyd's algorithm from a k-means++ initialization."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("points must be a nonempty n x d matrix")
    n = X.shape[0]
    if not (1 <= K <= n):
        raise ValidationError(f"K={K} must lie in [1, {n}]")
    rng = as_rng(seed)
    centers = X[_kmeanspp_indices(X, K, rng)].astype(np.float64).copy()
    labels = None
    for _ in range(max_iters):
        new_labels = np.argmin(_sq_dists(X, centers), axis=1)
        _reseed_empty(new_labels, centers, X)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for k in range(K):
            members = X[labels == k]
            if len(members):
                centers[k] = members.mean(axis=0)
    covs, sizes = _per_cluster_stats(X, labels, K)
    return ClusterModel(K, centers, covs, sizes / n, labels + 1)


# ---------------------------------------------------------------------------
# Gaussian mixture with BIC selection
# ---------------------------------------------------------------------------


class _RestartFailure(Exception):
    """One EM restart went degenerate; try the next."""


def _ridged(cov: np.ndarray) -> np.ndarray:
    d = cov.shape[0]
    # the tiny absolute floor keeps exactly-degenerate clusters invertible
    eps = 1e-6 * np.trace(cov) / d + 1e-12
    return cov + eps * np.eye(d)


def _log_gaussians(X: np.ndarray, means: np.ndarray, covs: np.ndarray) -> np.ndarray:
    n, d = X.shape
    K = means.shape[0]
    out = np.empty((n, K))
    for k in range(K):
        try:
            L = np.linalg.cholesky(covs[k])
        except np.linalg.LinAlgError:
            raise _RestartFailure("singular covariance")
        sol = solve_triangular(L, (X - means[k]).T, lower=True)
        logdet = 2.0 * np.sum(np.log(np.diag(L)))
        out[:, k] = -0.5 * (d * np.log(2 * np.pi) + logdet + np.sum(sol * sol, axis=0))
    return out


def _fit_gmm_once(
    X: np.ndarray,
    K: int,
    rng: np.random.Generator,
    max_iters: int = 500,
    rel_tol: float = 1e-7,
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n, d = X.shape
    means = X[_kmeanspp_indices(X, K, rng)].copy()
    overall = np.atleast_2d(np.cov(X.T, ddof=0))
    covs = np.repeat(_ridged(overall)[None], K, axis=0)
    weights = np.full(K, 1.0 / K)

    prev_ll = -np.inf
    it = 0
    while True:
        log_joint = _log_gaussians(X, means, covs) + np.log(weights)
        per_point = logsumexp(log_joint, axis=1)
        ll = float(per_point.sum())
        if ll < prev_ll - 1e-8 * max(1.0, abs(prev_ll)):
            raise _RestartFailure(f"log-likelihood decreased ({prev_ll} -> {ll})")
        resp = np.exp(log_joint - per_point[:, None])
        if (it > 0 and abs(ll - prev_ll) <= rel_tol * max(1.0, abs(ll))) or it >= max_iters:
            break
        prev_ll = ll
        it += 1

        Nk = resp.sum(axis=0)
        if np.any(Nk < 1e-10):
            raise _RestartFailure("empty mixture component")
        weights = Nk / n
        means = (resp.T @ X) / Nk[:, None]
        for k in range(K):
            diff = X - means[k]
            covs[k] = _ridged((resp[:, k][:, None] * diff).T @ diff / Nk[k])
    return ll, means, covs, weights, resp


def _normalize_k_range(k_range) -> list[int]:
    if isinstance(k_range, int):
        ks = [k_range]
    elif isinstance(k_range, tuple) and len(k_range) == 2 and all(
        isinstance(v, (int, np.integer)) for v in k_range
    ):
        ks = list(range(int(k_range[0]), int(k_range[1]) + 1))
    else:
        ks = [int(v) for v in k_range]
    if not ks or min(ks) < 1:
        raise ValidationError(f"invalid k_range {k_range!r}")
    return sorted(set(ks))


def gmm_bic(points, k_range=(1, 9), seed=None, restarts: int = 5) -> ClusterModel:
    """Full-covariance Gaussian mixture chosen by BIC over ``k_range``.

    ``k_range`` may be an int, an inclusive (lo, hi) pair, or an iterable of
    candidate K values. Each candidate gets ``restarts`` k-means++-seeded EM
    runs; the best log-likelihood enters the BIC comparison
    2*loglik - params*ln(n), which is maximized.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("points must be a nonempty n x d matrix")
    n, d = X.shape
    ks = _normalize_k_range(k_range)
    if n <= max(ks) * (d + 1):
        raise ValidationError(
            f"n={n} too small for K up to {max(ks)} in d={d} (need n > K(d+1))"
        )
    streams = op_streams(seed, len(ks) * restarts)

    best = None  # (bic, K, fit)
    failures: list[str] = []
    for ki, K in enumerate(ks):
        best_fit = None
        for r in range(restarts):
            rng = streams[ki * restarts + r]
            try:
                fit = _fit_gmm_once(X, K, rng)
            except _RestartFailure as exc:
                failures.append(f"K={K} restart {r}: {exc}")
                continue
            if best_fit is None or fit[0] > best_fit[0]:
                best_fit = fit
        if best_fit is None:
            continue
        ll = best_fit[0]
        params = (K - 1) + K * d + K * d * (d + 1) // 2
        bic = 2.0 * ll - params * math.log(n)
        if best is None or bic > best[0]:
            best = (bic, K, best_fit)
    if best is None:
        raise ConvergenceError(
            "every EM restart degenerated: " + "; ".join(failures[:3])
        )
    _, K, (ll, means, covs, weights, resp) = best
    labels = np.argmax(resp, axis=1) + 1
    return ClusterModel(K, means, covs, weights, labels)


# ---------------------------------------------------------------------------
# robust penalized K-means
# ---------------------------------------------------------------------------


def robust_gamma(points, model: ClusterModel, lam: float) -> float:
    """Objective value: unsquared distances of clustered points to their
    nearest center, plus lam per unclustered point."""
    X = np.asarray(points, dtype=np.float64)
    clustered = model.assignments > 0
    cost = float(lam) * int(np.sum(~clustered))
    if np.any(clustered):
        dists = np.sqrt(_sq_dists(X[clustered], model.centers))
        cost += float(dists.min(axis=1).sum())
    return cost


def _threshold_assign(X: np.ndarray, centers: np.ndarray, r_star: float) -> np.ndarray:
    """Labels 1..K for points within r_star of their nearest center, else 0."""
    d2 = _sq_dists(X, centers)
    nearest = np.argmin(d2, axis=1)
    dist = np.sqrt(d2[np.arange(len(X)), nearest])
    return np.where(dist < r_star, nearest + 1, 0)


def _snapshot_gamma(X: np.ndarray, labels: np.ndarray, centers: np.ndarray, lam: float) -> float:
    clustered = labels > 0
    cost = lam * int(np.sum(~clustered))
    if np.any(clustered):
        cost += float(np.sqrt(_sq_dists(X[clustered], centers)).min(axis=1).sum())
    return cost


def robust_kmeans(points, config: RobustKmeansConfig, seed=None) -> ClusterModel:
    """Penalized K-means: points farther than r_star from every center are
    labeled 0 (noise) and charged lam each in the objective.

    Each restart initializes with unconstrained K-means, then alternates
    (a) recompute centers as means over clustered points and (b) reassign
    each point to its nearest center if closer than r_star, else label 0.
    Every visited (labels, centers) state is scored under the unsquared
    penalized objective and the best state across all restarts is returned.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("points must be a nonempty n x d matrix")
    n = X.shape[0]
    if config.K > n:
        raise ValidationError(f"K={config.K} exceeds point count {n}")

    best_gamma = np.inf
    best_labels = None
    best_centers = None
    for rng in op_streams(seed, config.restarts):
        init = kmeans(X, config.K, rng)
        centers = init.centers.copy()
        labels = _threshold_assign(X, centers, config.r_star)
        for _ in range(config.max_iters):
            if not np.any(labels > 0):
                # everything labeled noise: score and give up on this restart
                gamma = config.lam * n
                if gamma < best_gamma:
                    best_gamma, best_labels, best_centers = gamma, labels.copy(), centers.copy()
                break
            for k in range(config.K):
                members = X[labels == k + 1]
                if len(members):
                    centers[k] = members.mean(axis=0)
            zero_based = np.where(labels > 0, labels - 1, -1)
            _reseed_empty_robust(zero_based, centers, X)
            labels = np.where(zero_based >= 0, zero_based + 1, 0)

            gamma = _snapshot_gamma(X, labels, centers, config.lam)
            if gamma < best_gamma - 1e-15:
                best_gamma, best_labels, best_centers = gamma, labels.copy(), centers.copy()
            new_labels = _threshold_assign(X, centers, config.r_star)
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels

    if best_labels is None or not np.any(best_labels > 0):
        raise DegenerateClusteringError("robust K-means labeled every point as noise")

    zero_based = best_labels - 1
    covs, sizes = _per_cluster_stats(X[best_labels > 0], zero_based[best_labels > 0], config.K)
    n_clustered = int(np.sum(best_labels > 0))
    return ClusterModel(config.K, best_centers, covs, sizes / n_clustered, best_labels)


def _reseed_empty_robust(labels: np.ndarray, centers: np.ndarray, X: np.ndarray) -> None:
    """Reseed empty clusters at the clustered point farthest from its center;
    labels use -1 for noise, 0..K-1 for clusters. In-place."""
    K = centers.shape[0]
    used: set[int] = set()
    for k in range(K):
        if np.any(labels == k):
            continue
        clustered = np.nonzero(labels >= 0)[0]
        if not len(clustered):
            return
        dists = np.linalg.norm(X[clustered] - centers[labels[clustered]], axis=1)
        order = np.argsort(-dists, kind="stable")
        pick = next((clustered[i] for i in order if int(clustered[i]) not in used), None)
        if pick is None:
            continue
        centers[k] = X[pick]
        labels[pick] = k
        used.add(int(pick))


# ---------------------------------------------------------------------------
# derived quantities
# ---------------------------------------------------------------------------


def cluster_radius(model: ClusterModel, points) -> float:
    """Largest distance from a clustered point to its own center."""
    X = np.asarray(points, dtype=np.float64)
    if len(X) != len(model.assignments):
        raise ValidationError("model assignments must cover the points")
    r = 0.0
    for k in range(model.K):
        members = X[model.assignments == k + 1]
        if len(members):
            r = max(r, float(np.linalg.norm(members - model.centers[k], axis=1).max()))
    return r


def suggest_lambda(clean_model, n_plus_m: int, points=None, log_base: float | None = None):
    """Noise penalty suggestion r + log^2(n+m)/sqrt(n+m).

    ``clean_model`` is either the radius r itself or a ClusterModel fitted on
    an uncontaminated graph's embedding (then ``points`` must be supplied so
    the radius can be measured). Natural log by default.
    """
    if isinstance(clean_model, (int, float, np.floating)):
        r = float(clean_model)
    else:
        if points is None:
            raise ValidationError("points are required to measure the model's radius")
        if clean_model.K < 1:
            raise ValidationError("clean model must have at least one cluster")
        r = cluster_radius(clean_model, points)
    logn = math.log(n_plus_m)
    if log_base is not None:
        logn /= math.log(log_base)
    return r + logn**2 / math.sqrt(n_plus_m)


def estimate_block_matrix(centers, signature: tuple[int, int], return_clamp_mask: bool = False):
    """Block matrix implied by cluster centers: centers I_{p,q} centers^T,
    clamped entrywise to [0, 1]."""
    xi = np.asarray(centers, dtype=np.float64)
    raw = _indefinite_gram(xi, signature)
    clamped = np.clip(raw, 0.0, 1.0)
    if return_clamp_mask:
        return clamped, ~np.isclose(raw, clamped)
    return clamped


def sphere_project(points) -> np.ndarray:
    """Scale each row to unit Euclidean norm."""
    X = np.asarray(points, dtype=np.float64)
    norms = np.linalg.norm(X, axis=1)
    zero = np.nonzero(norms == 0)[0]
    if len(zero):
        raise DegenerateRowError(f"row {int(zero[0])} has zero norm")
    return X / norms[:, None]


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def save_cluster_model(model: ClusterModel, path) -> None:
    payload = {
        "K": model.K,
        "centers": [[float(v) for v in row] for row in model.centers],
        "covariances": [
            [float(v) for v in cov.ravel()] for cov in model.covariances
        ],
        "weights": [float(v) for v in model.weights],
        "assignments": [int(v) for v in model.assignments],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def load_cluster_model(path) -> ClusterModel:
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    K = int(payload["K"])
    centers = np.asarray(payload["centers"], dtype=np.float64)
    d = centers.shape[1]
    covs = np.asarray(
        [np.asarray(c, dtype=np.float64).reshape(d, d) for c in payload["covariances"]]
    )
    return ClusterModel(
        K, centers, covs,
        np.asarray(payload["weights"], dtype=np.float64),
        np.asarray(payload["assignments"], dtype=np.int64),
    )
