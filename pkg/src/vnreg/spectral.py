"""Adjacency spectral embedding (ASE) with automatic dimension selection.

The embedding keeps the d largest-in-magnitude eigenpairs of the adjacency
matrix and scales eigenvectors by sqrt(|eigenvalue|); the signature (p, q)
counts positive/negative retained eigenvalues. Dimension selection uses the
profile-likelihood elbow criterion on the descending singular-value profile.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, RangeError, RankError, ValidationError
from .graph_models import Graph

__all__ = [
    "Embedding",
    "ase",
    "select_dimension",
    "estimate_signature",
    "profile_likelihood_elbows",
    "save_embedding",
    "load_embedding",
]


@dataclass(frozen=True)
class Embedding:
    """Estimated latent positions (rows of Xhat) plus spectral metadata."""

    Xhat: np.ndarray
    signature: tuple[int, int]
    singular_values: np.ndarray

    def __post_init__(self):
        Xhat = np.asarray(self.Xhat, dtype=np.float64)
        sv = np.asarray(self.singular_values, dtype=np.float64)
        object.__setattr__(self, "Xhat", Xhat)
        object.__setattr__(self, "singular_values", sv)
        object.__setattr__(self, "signature", tuple(int(v) for v in self.signature))
        p, q = self.signature
        d = Xhat.shape[1]
        if d < 1 or p + q != d:
            raise ValidationError(f"signature {self.signature} incompatible with d={d}")
        if sv.shape != (d,):
            raise ValidationError("need one singular value per retained dimension")
        if np.any(sv <= 0) or np.any(np.diff(sv) > 0):
            raise ValidationError("singular values must be positive and non-increasing")

    @property
    def n(self) -> int:
        return self.Xhat.shape[0]

    @property
    def d(self) -> int:
        return self.Xhat.shape[1]

    def indefinite_gram(self) -> np.ndarray:
        """Xhat I_{p,q} Xhat^T, the low-rank adjacency reconstruction."""
        p, q = self.signature
        signs = np.ones(self.d)
        signs[p:] = -1.0
        return (self.Xhat * signs) @ self.Xhat.T


def _spectrum(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(g.adjacency.astype(np.float64))


def _rank_tolerance(vals: np.ndarray, n: int) -> float:
    return n * np.finfo(np.float64).eps * (np.abs(vals).max() if len(vals) else 0.0)


def _magnitude_order(vals: np.ndarray) -> np.ndarray:
    """Indices sorted by descending |value|; ties keep positive sign first,
    then lowest original index."""
    idx = np.arange(len(vals))
    return np.lexsort((idx, vals <= 0, -np.abs(vals)))


def ase(g: Graph, d: int) -> Embedding:
    """d-dimensional adjacency spectral embedding of the graph.

    The d largest-in-magnitude eigenpairs of A are retained; eigenvectors are
    scaled by sqrt(|eigenvalue|).  Columns for positive eigenvalues come
    first (each group ordered by descending magnitude), matching the +1/-1
    layout of the signature's indefinite inner product.  Each column's sign
    is fixed so its largest-magnitude entry is positive, making the result
    deterministic.
    """
    if not (1 <= d <= g.n):
        raise ValidationError(f"embedding dimension d={d} must lie in [1, {g.n}]")
    vals, vecs = _spectrum(g)
    tol = _rank_tolerance(vals, g.n)
    numerical_rank = int(np.sum(np.abs(vals) > tol))
    if d > numerical_rank:
        raise RankError(f"d={d} exceeds numerical rank {numerical_rank}")
    order = _magnitude_order(vals)[:d]
    # Lay out positive-eigenvalue columns before negative ones so that the
    # (p, q) signature applies +1 to exactly the right columns.
    order = order[np.lexsort((np.arange(d), -np.abs(vals[order]), vals[order] <= 0))]
    top_vals = vals[order]
    top_vecs = vecs[:, order]

    flip = np.sign(top_vecs[np.argmax(np.abs(top_vecs), axis=0), np.arange(d)])
    top_vecs = top_vecs * flip

    Xhat = top_vecs * np.sqrt(np.abs(top_vals))
    signature = (int(np.sum(top_vals > 0)), int(np.sum(top_vals < 0)))
    return Embedding(Xhat, signature, np.sort(np.abs(top_vals))[::-1])


def profile_likelihood_elbows(values, num_elbows: int = 1) -> list[int]:
    """Successive profile-likelihood elbows of a descending value profile.

    Each stage models the profile as two groups of Gaussians with a common
    variance, splits at the likelihood-maximizing point, and recurses on the
    tail. Returns the cumulative split positions (candidate dimensions).
    """
    x = np.asarray(values, dtype=np.float64)
    if np.any(np.diff(x) > 1e-12):
        raise ValidationError("profile must be non-increasing")
    elbows: list[int] = []
    start = 0
    for _ in range(num_elbows):
        tail = x[start:]
        if len(tail) < 2:
            raise RangeError(
                f"elbow {len(elbows) + 1} requested but only {len(tail)} profile "
                "values remain"
            )
        best_q, best_ll = 1, -np.inf
        N = len(tail)
        for q in range(1, N):
            head, rest = tail[:q], tail[q:]
            ss = np.sum((head - head.mean()) ** 2) + np.sum((rest - rest.mean()) ** 2)
            var = ss / N
            ll = np.inf if var < 1e-300 else -0.5 * N * (np.log(2 * np.pi * var) + 1)
            if ll > best_ll:
                best_q, best_ll = q, ll
        start += best_q
        elbows.append(start)
    return elbows


def select_dimension(g: Graph, elbow_index: int = 1, max_rank: int | None = None) -> int:
    """Embedding dimension at the elbow_index-th profile-likelihood elbow of
    the graph's descending singular-value profile (numerical zeros dropped)."""
    if elbow_index < 1:
        raise ValidationError("elbow_index must be >= 1")
    vals = np.linalg.eigvalsh(g.adjacency.astype(np.float64))
    profile = np.sort(np.abs(vals))[::-1]
    profile = profile[profile > _rank_tolerance(vals, g.n)]
    if max_rank is not None:
        profile = profile[: max_rank]
    return profile_likelihood_elbows(profile, elbow_index)[-1]


def estimate_signature(g: Graph, d: int) -> tuple[int, int]:
    """Signs (positive count, negative count) of the d largest-in-magnitude
    eigenvalues of the adjacency matrix."""
    if not (1 <= d <= g.n):
        raise ValidationError(f"d={d} must lie in [1, {g.n}]")
    vals = np.linalg.eigvalsh(g.adjacency.astype(np.float64))
    order = _magnitude_order(vals)[:d]
    top = vals[order]
    if np.any(np.abs(top) <= _rank_tolerance(vals, g.n)):
        raise DegenerateSpectrumError(f"zero eigenvalue among the top {d} retained")
    return int(np.sum(top > 0)), int(np.sum(top < 0))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _meta_path(path) -> str:
    s = str(path)
    return (s[: -len(".csv")] if s.endswith(".csv") else s) + ".meta.json"


def save_embedding(emb: Embedding, path) -> None:
    """CSV with header dim_1..dim_d plus a sidecar .meta.json holding the
    signature and singular values."""
    header = ",".join(f"dim_{j + 1}" for j in range(emb.d))
    with open(path, "w", encoding="utf-8") as f:
        f.write(header + "\n")
        for row in emb.Xhat:
            f.write(",".join(repr(float(v)) for v in row) + "\n")
    meta = {
        "signature": list(emb.signature),
        "singular_values": [float(v) for v in emb.singular_values],
    }
    with open(_meta_path(path), "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")


def load_embedding(path) -> Embedding:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline()
        d = len(header.strip().split(","))
        rows = [[float(tok) for tok in line.strip().split(",")] for line in f if line.strip()]
    with open(_meta_path(path), "r", encoding="utf-8") as f:
        meta = json.load(f)
    X = np.asarray(rows, dtype=np.float64).reshape(-1, d)
    return Embedding(X, tuple(meta["signature"]), np.asarray(meta["singular_values"]))
