"""Graph samplers and contamination operators.

Provides stochastic blockmodel (SBM) and generalized random dot product
graph (GRDPG) samplers, correlated-pair variants of both, the two
contamination operators (block-structured edge tampering and diffuse noise
vertices), and edge-list / membership file I/O.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import as_rng
from .errors import FeasibilityError, ParseError, ValidationError

__all__ = [
    "Graph",
    "SbmSpec",
    "GrdpgSpec",
    "BlockContaminationSpec",
    "DiffuseNoiseSpec",
    "BoxRegion",
    "SphereOrthantRegion",
    "sample_sbm",
    "sample_correlated_sbm",
    "sample_grdpg",
    "sample_correlated_grdpg",
    "contaminate_block",
    "build_contaminated_block_matrix",
    "contaminate_diffuse",
    "sample_edge_matrix",
    "sample_correlated_edge_matrix",
    "load_edge_list",
    "save_edge_list",
    "load_memberships",
    "save_memberships",
]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph: symmetric hollow 0/1 adjacency matrix."""

    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=np.uint8)
        object.__setattr__(self, "adjacency", adj)
        if adj.shape != (self.n, self.n):
            raise ValidationError(
                f"adjacency shape {adj.shape} does not match n={self.n}"
            )
        if not np.array_equal(adj, adj.T):
            raise ValidationError("adjacency must be symmetric")
        if np.any(np.diagonal(adj) != 0):
            raise ValidationError("adjacency must have a zero diagonal (no self-loops)")
        if adj.size and adj.max() > 1:
            raise ValidationError("adjacency entries must be 0 or 1")

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adj = np.zeros((n, n), dtype=np.uint8)
        for i, j in edges:
            if i == j:
                raise ValidationError(f"self-loop ({i},{i}) not allowed")
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(f"edge ({i},{j}) out of range for n={n}")
            adj[i, j] = adj[j, i] = 1
        return cls(n, adj)

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(np.int64)

    def num_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def induced_subgraph(self, vertices) -> "Graph":
        """Subgraph on the given vertices, in the given order."""
        idx = np.asarray(vertices, dtype=np.int64)
        return Graph(len(idx), self.adjacency[np.ix_(idx, idx)])


@dataclass(frozen=True)
class SbmSpec:
    """Stochastic blockmodel parameters.

    Exactly one of ``pi`` (iid block membership probabilities) or ``sizes``
    (fixed per-block vertex counts, blocks laid out contiguously) is given.
    """

    n: int
    K: int
    B: np.ndarray
    pi: np.ndarray | None = None
    sizes: np.ndarray | None = None
    nu: float = 1.0

    def __post_init__(self):
        B = np.asarray(self.B, dtype=np.float64)
        object.__setattr__(self, "B", B)
        if B.shape != (self.K, self.K):
            raise ValidationError(f"B shape {B.shape} does not match K={self.K}")
        if not np.allclose(B, B.T):
            raise ValidationError("B must be symmetric")
        if B.min() < 0 or B.max() > 1:
            raise ValidationError("B entries must lie in [0, 1]")
        if not (0 <= self.nu <= 1):
            raise ValidationError("nu must lie in [0, 1]")
        if (self.pi is None) == (self.sizes is None):
            raise ValidationError("exactly one of pi / sizes must be given")
        if self.pi is not None:
            pi = np.asarray(self.pi, dtype=np.float64)
            object.__setattr__(self, "pi", pi)
            if pi.shape != (self.K,) or pi.min() <= 0 or abs(pi.sum() - 1) > 1e-9:
                raise ValidationError("pi must be length-K, positive, summing to 1")
        else:
            sizes = np.asarray(self.sizes, dtype=np.int64)
            object.__setattr__(self, "sizes", sizes)
            if sizes.shape != (self.K,) or sizes.min() < 0 or sizes.sum() != self.n:
                raise ValidationError("sizes must be length-K, nonnegative, summing to n")


def _indefinite_gram(X: np.ndarray, signature: tuple[int, int]) -> np.ndarray:
    """X diag(+1..+1, -1..-1) X^T for rows of X."""
    p, q = signature
    signs = np.ones(p + q)
    signs[p:] = -1.0
    return (X * signs) @ X.T


@dataclass(frozen=True)
class GrdpgSpec:
    """Generalized random dot product graph: fixed latent positions X and
    signature (p, q); edge probability nu * x_i^T I_{p,q} x_j."""

    X: np.ndarray
    signature: tuple[int, int]
    nu: float = 1.0

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "signature", tuple(int(v) for v in self.signature))
        p, q = self.signature
        if X.ndim != 2:
            raise ValidationError("X must be a 2-d matrix of latent positions")
        if p < 1 or q < 0 or p + q != X.shape[1]:
            raise ValidationError(f"signature {self.signature} incompatible with d={X.shape[1]}")
        if not (0 <= self.nu <= 1):
            raise ValidationError("nu must lie in [0, 1]")
        P = self.nu * _indefinite_gram(X, self.signature)
        if P.size and (P.min() < -1e-12 or P.max() > 1 + 1e-12):
            bad = np.unravel_index(
                np.argmax(np.abs(P - np.clip(P, 0, 1))), P.shape
            )
            raise FeasibilityError(
                f"edge probability {P[bad]:.6f} for pair {tuple(int(b) for b in bad)} "
                "falls outside [0, 1]"
            )

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def edge_probabilities(self) -> np.ndarray:
        P = np.clip(self.nu * _indefinite_gram(self.X, self.signature), 0.0, 1.0)
        np.fill_diagonal(P, 0.0)
        return P

    @classmethod
    def from_block_matrix(cls, B, sizes, nu: float = 1.0) -> tuple["GrdpgSpec", np.ndarray]:
        """Latent positions of an SBM: spectral factorization of nu*B.

        Returns the spec (with its own nu set to 1, the sparsity being folded
        into the positions) and the block memberships implied by ``sizes``.
        """
        B = np.asarray(B, dtype=np.float64)
        sizes = np.asarray(sizes, dtype=np.int64)
        vals, vecs = np.linalg.eigh(nu * B)
        keep = np.abs(vals) > 1e-12
        vals, vecs = vals[keep], vecs[:, keep]
        # Positive-eigenvalue columns first (descending magnitude within each
        # group) so the indefinite gram's +1/-1 split lands on the right columns.
        order = np.lexsort((np.arange(len(vals)), -np.abs(vals), vals <= 0))
        vals, vecs = vals[order], vecs[:, order]
        block_positions = vecs * np.sqrt(np.abs(vals))
        signature = (int(np.sum(vals > 0)), int(np.sum(vals < 0)))
        memberships = np.repeat(np.arange(len(sizes)), sizes)
        return cls(block_positions[memberships], signature, 1.0), memberships


@dataclass(frozen=True)
class BlockContaminationSpec:
    """Parameters of the edge-tampering contamination.

    Adder vertices W+ are drawn with probability ``pi_plus`` each (or with
    the fixed ``sizes_plus``); deleter vertices W- likewise from the
    remaining vertices. Missing edges in W+ x (V \\ W-) are added with
    probability ``s_plus``; present edges in W- x (V \\ W+) deleted with
    probability ``s_minus``. Fixed sizes may be a total count or a per-block
    count vector (the stratified variant used by the simulations).
    """

    pi_plus: float = 0.0
    pi_minus: float = 0.0
    s_plus: float = 0.0
    s_minus: float = 0.0
    sizes_plus: object = None
    sizes_minus: object = None

    def __post_init__(self):
        for name in ("pi_plus", "pi_minus", "s_plus", "s_minus"):
            v = getattr(self, name)
            if not (0 <= v <= 1):
                raise ValidationError(f"{name}={v} must lie in [0, 1]")


@dataclass(frozen=True)
class BoxRegion:
    """Axis-aligned box; positions sampled uniformly inside it."""

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        low = np.atleast_1d(np.asarray(self.low, dtype=np.float64))
        high = np.atleast_1d(np.asarray(self.high, dtype=np.float64))
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)
        if low.shape != high.shape or np.any(high < low):
            raise ValidationError("box region requires low <= high, same shape")

    @property
    def dim(self) -> int:
        return self.low.shape[0]

    def sample(self, m: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=(m, self.dim))


@dataclass(frozen=True)
class SphereOrthantRegion:
    """Positive orthant of the unit sphere in R^dim (uniform on the patch)."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("sphere orthant dimension must be >= 1")

    def sample(self, m: int, rng: np.random.Generator) -> np.ndarray:
        # |N(0, I)| normalized is uniform on the sphere folded into the
        # positive orthant, i.e. uniform on the orthant patch.
        Z = np.abs(rng.standard_normal((m, self.dim)))
        return Z / np.linalg.norm(Z, axis=1, keepdims=True)


@dataclass(frozen=True)
class DiffuseNoiseSpec:
    """Diffuse ("white") noise: m extra vertices with latent positions drawn
    uniformly from ``region``, optionally passed through the linear map
    ``rotation`` (rows mapped as z -> z @ rotation) to keep the resulting
    edge probabilities feasible."""

    m: int
    region: object
    rotation: np.ndarray | None = None

    def __post_init__(self):
        if self.m < 0:
            raise ValidationError("noise count m must be >= 0")
        if not hasattr(self.region, "sample"):
            raise ValidationError("region must provide a .sample(m, rng) method")
        if self.rotation is not None:
            R = np.asarray(self.rotation, dtype=np.float64)
            object.__setattr__(self, "rotation", R)
            if R.ndim != 2 or R.shape[0] != R.shape[1]:
                raise ValidationError("rotation must be a square d x d matrix")


# ---------------------------------------------------------------------------
# edge sampling primitives
# ---------------------------------------------------------------------------


def sample_edge_matrix(P: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Symmetric hollow 0/1 matrix with independent Bernoulli(P[i,j]) edges."""
    n = P.shape[0]
    upper = np.triu(rng.random((n, n)) < P, k=1)
    return (upper | upper.T).astype(np.uint8)


def sample_correlated_edge_matrix(
    P: np.ndarray, A1: np.ndarray, rho: float, rng: np.random.Generator
) -> np.ndarray:
    """Second adjacency matrix of a correlated pair, conditional on the first.

    Couples each pair independently: given e1, draw e2 ~ Bern(p + rho(1-p))
    if e1 = 1, else e2 ~ Bern(p(1-rho)). Marginals stay Bernoulli(p) and the
    pairwise Pearson correlation equals rho.
    """
    cond = np.where(A1 > 0, P + rho * (1.0 - P), P * (1.0 - rho))
    upper = np.triu(rng.random(P.shape) < cond, k=1)
    return (upper | upper.T).astype(np.uint8)


def _sbm_probabilities(spec: SbmSpec, memberships: np.ndarray) -> np.ndarray:
    return spec.nu * spec.B[np.ix_(memberships, memberships)]


def _sbm_memberships(spec: SbmSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.sizes is not None:
        return np.repeat(np.arange(spec.K), spec.sizes)
    return rng.choice(spec.K, size=spec.n, p=spec.pi)


# ---------------------------------------------------------------------------
# sampling operations
# ---------------------------------------------------------------------------


def sample_sbm(spec: SbmSpec, seed=None) -> tuple[Graph, np.ndarray]:
    """Sample an SBM graph; returns the graph and ground-truth memberships."""
    rng = as_rng(seed)
    memberships = _sbm_memberships(spec, rng)
    A = sample_edge_matrix(_sbm_probabilities(spec, memberships), rng)
    return Graph(spec.n, A), memberships


def sample_correlated_sbm(
    spec: SbmSpec, rho: float, seed=None
) -> tuple[Graph, Graph, np.ndarray]:
    """Sample a rho-correlated SBM pair sharing one membership vector."""
    if not (0 <= rho <= 1):
        raise ValidationError(f"rho={rho} must lie in [0, 1]")
    rng = as_rng(seed)
    memberships = _sbm_memberships(spec, rng)
    P = _sbm_probabilities(spec, memberships)
    A1 = sample_edge_matrix(P, rng)
    A2 = sample_correlated_edge_matrix(P, A1, rho, rng)
    return Graph(spec.n, A1), Graph(spec.n, A2), memberships


def sample_grdpg(spec: GrdpgSpec, seed=None) -> Graph:
    """Sample a GRDPG graph from fixed latent positions."""
    rng = as_rng(seed)
    return Graph(spec.n, sample_edge_matrix(spec.edge_probabilities(), rng))


def sample_correlated_grdpg(spec: GrdpgSpec, rho: float, seed=None) -> tuple[Graph, Graph]:
    """Sample a rho-correlated GRDPG pair sharing latent positions."""
    if not (0 <= rho <= 1):
        raise ValidationError(f"rho={rho} must lie in [0, 1]")
    rng = as_rng(seed)
    P = spec.edge_probabilities()
    A1 = sample_edge_matrix(P, rng)
    A2 = sample_correlated_edge_matrix(P, A1, rho, rng)
    return Graph(spec.n, A1), Graph(spec.n, A2)


# ---------------------------------------------------------------------------
# contamination operators
# ---------------------------------------------------------------------------


def _draw_vertex_set(
    candidates: np.ndarray,
    prob: float,
    sizes,
    memberships: np.ndarray | None,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw W+ or W- from ``candidates`` either Bernoulli(prob) per vertex,
    as a fixed total count, or as fixed per-block counts (stratified)."""
    if sizes is None:
        return candidates[rng.random(len(candidates)) < prob]
    if np.ndim(sizes) == 0:
        size = int(sizes)
        if size > len(candidates):
            raise ValidationError(f"requested {size} vertices from {len(candidates)} candidates")
        return np.sort(rng.choice(candidates, size=size, replace=False))
    if memberships is None:
        raise ValidationError("per-block sizes require a memberships vector")
    sizes = np.asarray(sizes, dtype=np.int64)
    chosen = []
    for k, count in enumerate(sizes):
        pool = candidates[memberships[candidates] == k]
        if count > len(pool):
            raise ValidationError(f"block {k} has {len(pool)} candidates, need {count}")
        chosen.append(rng.choice(pool, size=int(count), replace=False))
    return np.sort(np.concatenate(chosen)) if chosen else np.empty(0, dtype=np.int64)


def contaminate_block(
    g: Graph,
    spec: BlockContaminationSpec,
    seed=None,
    memberships: np.ndarray | None = None,
) -> tuple[Graph, np.ndarray, np.ndarray]:
    """Apply block contamination; returns (graph, w_plus, w_minus).

    W+ is drawn from all vertices, W- from the rest, so the two sets are
    disjoint. Missing edges with one endpoint in W+ and the other outside W-
    are added with probability s_plus; present edges with one endpoint in W-
    and the other outside W+ are deleted with probability s_minus.
    """
    rng = as_rng(seed)
    vertices = np.arange(g.n)
    w_plus = _draw_vertex_set(vertices, spec.pi_plus, spec.sizes_plus, memberships, rng)
    rest = np.setdiff1d(vertices, w_plus, assume_unique=True)
    w_minus = _draw_vertex_set(rest, spec.pi_minus, spec.sizes_minus, memberships, rng)

    in_plus = np.zeros(g.n, dtype=bool)
    in_plus[w_plus] = True
    in_minus = np.zeros(g.n, dtype=bool)
    in_minus[w_minus] = True

    # pair {v,u} is addition-eligible iff an endpoint is in W+ and the other
    # is outside W-; deletion-eligible iff one is in W- and the other outside
    # W+. The two conditions are mutually exclusive because W+ and W- are.
    not_minus = ~in_minus
    not_plus = ~in_plus
    add_mask = (in_plus[:, None] & not_minus[None, :]) | (not_minus[:, None] & in_plus[None, :])
    del_mask = (in_minus[:, None] & not_plus[None, :]) | (not_plus[:, None] & in_minus[None, :])

    A = g.adjacency.astype(bool)
    U = rng.random((g.n, g.n))
    upper = np.triu(np.ones_like(A), k=1).astype(bool)
    additions = upper & add_mask & ~A & (U < spec.s_plus)
    deletions = upper & del_mask & A & (U < spec.s_minus)
    new_upper = (np.triu(A, k=1) | additions) & ~deletions
    return Graph(g.n, (new_upper | new_upper.T).astype(np.uint8)), w_plus, w_minus


def build_contaminated_block_matrix(B, s_plus: float, s_minus: float) -> np.ndarray:
    """Block matrix of the contaminated SBM implied by block contamination.

    A K-block model becomes a 3K-block model: each original block splits into
    (core, adder, deleter) groups, laid out in that order per block. Edge
    probabilities between groups follow from which tampering rule (addition
    at rate s_plus, deletion at rate s_minus, or none) applies to the pair.
    """
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValidationError("B must be square")
    if not np.allclose(B, B.T):
        raise ValidationError("B must be symmetric")
    if B.min() < 0 or B.max() > 1:
        raise ValidationError("B entries must lie in [0, 1]")
    for name, s in (("s_plus", s_plus), ("s_minus", s_minus)):
        if not (0 <= s <= 1):
            raise ValidationError(f"{name}={s} must lie in [0, 1]")

    K = B.shape[0]
    CORE, PLUS, MINUS = 0, 1, 2

    def cell(v: float, a: int, b: int) -> float:
        if {a, b} == {PLUS, MINUS}:
            return v  # excluded from both tampering rules
        if PLUS in (a, b):
            return v + s_plus * (1.0 - v)
        if MINUS in (a, b):
            return v * (1.0 - s_minus)
        return v

    Bc = np.zeros((3 * K, 3 * K))
    for i in range(K):
        for a in (CORE, PLUS, MINUS):
            for j in range(K):
                for b in (CORE, PLUS, MINUS):
                    Bc[3 * i + a, 3 * j + b] = cell(B[i, j], a, b)
    return Bc


def contaminate_diffuse(
    signal_positions,
    spec: DiffuseNoiseSpec,
    nu: float,
    seed=None,
    signature: tuple[int, int] | None = None,
) -> tuple[GrdpgSpec, np.ndarray]:
    """Append m diffuse-noise latent positions to the signal positions.

    Returns the GrdpgSpec of the combined (n+m)-vertex graph and a boolean
    mask flagging the noise rows. The signature defaults to (d, 0); pass the
    signal model's (p, q) when it is indefinite. Raises FeasibilityError if
    any sampled noise position yields an edge probability outside [0, 1].
    """
    Y = np.asarray(signal_positions, dtype=np.float64)
    d = Y.shape[1]
    if signature is None:
        signature = (d, 0)
    rng = as_rng(seed)
    Z = spec.region.sample(spec.m, rng)
    if Z.shape[1] != d:
        raise ValidationError(f"region dimension {Z.shape[1]} does not match signal d={d}")
    if spec.rotation is not None:
        Z = Z @ spec.rotation
    X = np.vstack([Y, Z])

    P = nu * _indefinite_gram(X, signature)
    bad = np.argwhere((P < -1e-12) | (P > 1 + 1e-12))
    if len(bad):
        # report a pair involving a noise vertex if one exists
        noise_rows = bad[(bad >= Y.shape[0]).any(axis=1)]
        i, j = (noise_rows[0] if len(noise_rows) else bad[0])
        raise FeasibilityError(
            f"infeasible noise region: pair ({int(i)},{int(j)}) has edge "
            f"probability {P[i, j]:.6f} outside [0, 1]"
        )
    noise_mask = np.zeros(X.shape[0], dtype=bool)
    noise_mask[Y.shape[0]:] = True
    return GrdpgSpec(X, signature, nu), noise_mask


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def save_edge_list(g: Graph, path) -> None:
    """Write one `i j` line per edge (0-based, each edge once), UTF-8.

    A `# vertices: n` comment records the vertex count so isolated trailing
    vertices survive a round trip.
    """
    i_idx, j_idx = np.nonzero(np.triu(g.adjacency, k=1))
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# vertices: {g.n}\n")
        for i, j in zip(i_idx, j_idx):
            f.write(f"{i} {j}\n")


def load_edge_list(path, n: int | None = None) -> Graph:
    """Parse an edge-list file; lines starting with '#' are ignored as edges.

    The vertex count is taken from the ``n`` argument if given, else from a
    `# vertices:` comment if present, else from the largest index seen + 1.
    """
    edges = []
    hint = None
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                body = stripped.lstrip("#").strip()
                if body.startswith("vertices:"):
                    try:
                        hint = int(body.split(":", 1)[1])
                    except ValueError:
                        pass
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise ParseError(
                    f"expected two vertex indices, got {len(parts)} tokens", path, lineno
                )
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer vertex index in {parts!r}", path, lineno)
            if i < 0 or j < 0:
                raise ParseError("vertex indices must be nonnegative", path, lineno)
            if i == j:
                raise ParseError(f"self-loop on vertex {i} not allowed", path, lineno)
            edges.append((i, j))
    max_seen = max((max(e) for e in edges), default=-1) + 1
    count = n if n is not None else (hint if hint is not None else max_seen)
    if count < max_seen:
        raise ParseError(f"edge index {max_seen - 1} exceeds vertex count {count}", path)
    return Graph.from_edges(count, edges)


def save_memberships(labels, path) -> None:
    """Write one integer label per line."""
    with open(path, "w", encoding="utf-8") as f:
        for lab in np.asarray(labels).ravel():
            f.write(f"{int(lab)}\n")


def load_memberships(path) -> np.ndarray:
    """Read one integer label per line; '#' comment lines are ignored."""
    labels = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                labels.append(int(stripped))
            except ValueError:
                raise ParseError(f"non-integer label {stripped!r}", path, lineno)
    return np.asarray(labels, dtype=np.int64)
