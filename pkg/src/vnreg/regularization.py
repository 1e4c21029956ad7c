"""Model-space trimming of contaminated graphs.

The central tool is :func:`block_trim`, which compares the estimated block
structure of a clean reference graph against a contaminated companion graph,
keeps only the contaminated-graph clusters whose block connectivity matches
the reference, and aligns the two spectral embeddings so downstream ranking
can compare vertices across graphs.  Supporting pieces:

* :func:`match_block_matrices` — exhaustive matching of a small block matrix
  into the principal pattern of a larger one.
* :func:`two_stage_clean` — robust K-means pre-cleaning (to shed unstructured
  noise) followed by :func:`block_trim`.
* :func:`degree_trim_baseline` — the comparison method that trims by degree
  percentiles chosen via modularity maximization.
* :func:`check_separation` — diagnostic margins that indicate whether matching
  on the block matrix has a unique solution for a given parameter set.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import os
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from ._rng import op_streams
from .clustering import (
    RobustKmeansConfig,
    estimate_block_matrix,
    gmm_bic,
    kmeans,
    robust_kmeans,
)
from .errors import (
    AlignmentWarning,
    ConvergenceError,
    DegenerateClusteringError,
    DimensionError,
    RankError,
    SizeError,
    TrimError,
    ValidationError,
)
from .graph_models import Graph, load_edge_list, save_edge_list
from .spectral import ase, select_dimension

__all__ = [
    "MatchResult",
    "TrimConfig",
    "TrimOutcome",
    "SeparationReport",
    "match_block_matrices",
    "procrustes_align",
    "block_trim",
    "two_stage_clean",
    "degree_trim",
    "degree_trim_baseline",
    "empirical_block_matrix",
    "newman_modularity",
    "check_separation",
    "save_trim_outcome",
    "load_trim_outcome",
]


# --------------------------------------------------------------------------
# Result types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchResult:
    """Best injection of the reference blocks into the contaminated blocks.

    ``mapping[i]`` is the 0-based index of the contaminated-graph block matched
    to reference block ``i``.  ``objective`` is the Frobenius norm of the
    difference between the reference matrix and the selected principal
    submatrix.  ``retained_vertices`` is filled in by the trimming pipeline
    (``None`` when matching bare matrices).
    """

    mapping: tuple[int, ...]
    objective: float
    retained_blocks: tuple[int, ...]
    retained_vertices: np.ndarray | None = None

    def __post_init__(self):
        if len(set(self.mapping)) != len(self.mapping):
            raise ValidationError("match mapping must be injective")
        if self.objective < 0:
            raise ValidationError("match objective must be nonnegative")
        if len(self.retained_blocks) != len(self.mapping):
            raise ValidationError(
                "retained_blocks must have one entry per mapped block"
            )


@dataclass(frozen=True)
class TrimConfig:
    """Settings for :func:`block_trim` and :func:`two_stage_clean`.

    ``d1``/``d2`` are the embedding dimensions for the reference and
    contaminated graph; ``None`` selects them automatically from the
    eigenvalue profile (``elbow_index``-th elbow).  ``k_range_1``/``k_range_2``
    bound the model-size search of the two Gaussian-mixture fits.
    """

    d1: int | None = None
    d2: int | None = None
    elbow_index: int = 1
    k_range_1: object = (1, 9)
    k_range_2: object = (1, 9)
    restarts: int = 20
    match_cap: int = 12
    block_estimator: str = "density"
    seed: object = None

    def __post_init__(self):
        for name, value in (("d1", self.d1), ("d2", self.d2)):
            if value is not None and value < 1:
                raise ValidationError(f"{name} must be a positive integer or None")
        if self.elbow_index < 1:
            raise ValidationError("elbow_index must be >= 1")
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.block_estimator not in {"density", "gram"}:
            raise ValidationError("block_estimator must be 'density' or 'gram'")


@dataclass(frozen=True)
class TrimOutcome:
    """What :func:`block_trim` hands to the nomination stage.

    ``vertex_map[i]`` is the original vertex id (in the contaminated graph as
    passed in) of row ``i`` of ``trimmed_graph`` / ``embedding_2``.
    ``aligned_embedding_1`` has the reference embedding rotated onto the
    retained contaminated embedding's coordinate frame.
    """

    trimmed_graph: Graph
    vertex_map: np.ndarray
    aligned_embedding_1: np.ndarray
    embedding_2: np.ndarray
    match: MatchResult

    def __post_init__(self):
        vmap = np.asarray(self.vertex_map, dtype=np.int64)
        if vmap.ndim != 1 or len(np.unique(vmap)) != vmap.size:
            raise ValidationError("vertex_map must be a 1-D injective index array")
        if vmap.size != self.trimmed_graph.n:
            raise ValidationError("vertex_map must index every retained vertex")
        object.__setattr__(self, "vertex_map", vmap)
        e1 = np.asarray(self.aligned_embedding_1, dtype=np.float64)
        e2 = np.asarray(self.embedding_2, dtype=np.float64)
        if e1.ndim != 2 or e2.ndim != 2 or e1.shape[1] != e2.shape[1]:
            raise ValidationError(
                "aligned_embedding_1 and embedding_2 must be matrices of equal width"
            )
        if e2.shape[0] != vmap.size:
            raise ValidationError("embedding_2 must have one row per retained vertex")
        object.__setattr__(self, "aligned_embedding_1", e1)
        object.__setattr__(self, "embedding_2", e2)


@dataclass(frozen=True)
class SeparationReport:
    """Margins of the block-matrix separation conditions.

    ``margins`` maps condition names (``"A1.1"`` ... or ``"A2.1"`` ...) to the
    minimum absolute gap each condition requires to be bounded away from zero.
    Conditions whose margin is not positive appear in ``flagged``; ``ok`` is
    true when nothing is flagged.  A condition with no applicable index pairs
    reports an infinite margin.
    """

    mode: str
    margins: dict[str, float]
    flagged: tuple[str, ...]
    ok: bool


# --------------------------------------------------------------------------
# Block-matrix matching
# --------------------------------------------------------------------------


def _as_square_matrix(M, name: str) -> np.ndarray:
    out = np.asarray(M, dtype=np.float64)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise ValidationError(f"{name} must be a square matrix")
    if out.shape[0] < 1:
        raise ValidationError(f"{name} must be nonempty")
    if not np.all(np.isfinite(out)):
        raise ValidationError(f"{name} must contain finite values")
    return out


def match_block_matrices(Bhat, Bhat_c, hard_cap: int = 12) -> MatchResult:
    """Exhaustively match the blocks of ``Bhat`` into ``Bhat_c``.

    Enumerates every injection of the ``K1`` reference blocks into the ``K2``
    contaminated blocks and returns the one whose selected principal submatrix
    of ``Bhat_c`` is closest to ``Bhat`` in squared Frobenius error.  Ties go
    to the lexicographically smallest mapping (enumeration order).

    Raises :class:`DimensionError` if ``K1 > K2`` and :class:`SizeError` if
    ``K2`` exceeds ``hard_cap``, since the enumeration has
    ``K2!/(K2-K1)!`` candidates.
    """

    B1 = _as_square_matrix(Bhat, "Bhat")
    B2 = _as_square_matrix(Bhat_c, "Bhat_c")
    k1, k2 = B1.shape[0], B2.shape[0]
    if k1 > k2:
        raise DimensionError(
            f"cannot match {k1} blocks into {k2}: the reference graph has more "
            "estimated blocks than the contaminated graph"
        )
    if k2 > hard_cap:
        raise SizeError(
            f"exhaustive matching over {k2} blocks exceeds the cap of {hard_cap}; "
            "reduce the cluster search range or raise hard_cap if the "
            "factorial enumeration cost is acceptable"
        )
    best_sq = math.inf
    best_mapping: tuple[int, ...] | None = None
    for mapping in itertools.permutations(range(k2), k1):
        idx = np.asarray(mapping)
        diff = B1 - B2[np.ix_(idx, idx)]
        sq = float(np.sum(diff * diff))
        if sq < best_sq:
            best_sq = sq
            best_mapping = mapping
    assert best_mapping is not None
    return MatchResult(
        mapping=best_mapping,
        objective=math.sqrt(best_sq),
        retained_blocks=tuple(sorted(best_mapping)),
    )


# --------------------------------------------------------------------------
# Procrustes alignment
# --------------------------------------------------------------------------


def procrustes_align(source_centers, target_centers, source_points) -> np.ndarray:
    """Rotate ``source_points`` so ``source_centers`` best match ``target_centers``.

    Solves the orthogonal Procrustes problem ``min_O ||source_centers @ O -
    target_centers||_F`` (reflections allowed) via the SVD of the cross-product
    matrix and returns ``source_points @ O``.  A rank-deficient cross-product
    makes the optimum non-unique; a valid solution is still returned, with an
    :class:`AlignmentWarning`.
    """

    S = np.asarray(source_centers, dtype=np.float64)
    T = np.asarray(target_centers, dtype=np.float64)
    P = np.asarray(source_points, dtype=np.float64)
    if S.ndim != 2 or T.ndim != 2 or S.shape != T.shape:
        raise ValidationError("source and target centers must be matrices of equal shape")
    if P.ndim != 2 or P.shape[1] != S.shape[1]:
        raise ValidationError("source_points must have the same width as the centers")
    cross = S.T @ T
    U, sv, Vt = np.linalg.svd(cross)
    d = cross.shape[0]
    tol = max(cross.shape) * np.finfo(np.float64).eps * (sv[0] if sv.size else 0.0)
    if np.sum(sv > tol) < d:
        warnings.warn(
            "cross-product of centers is rank deficient; the alignment is "
            "valid but not unique",
            AlignmentWarning,
            stacklevel=2,
        )
    return P @ (U @ Vt)


# --------------------------------------------------------------------------
# Block trimming pipeline
# --------------------------------------------------------------------------


def empirical_block_matrix(g: Graph, assignments, num_blocks: int | None = None) -> np.ndarray:
    """Edge density between every pair of estimated blocks.

    ``assignments`` uses 1-based cluster labels (label 0 rows are ignored).
    Entry ``(a, b)`` is the observed edge fraction between clusters ``a`` and
    ``b``; diagonal entries divide by the number of within-cluster pairs.
    This estimates the same connectivity matrix as the cluster-center gram
    but stays accurate even when part of the model's spectrum is too weak to
    recover from the adjacency eigendecomposition.
    """

    labels = np.asarray(assignments)
    if labels.shape != (g.n,):
        raise ValidationError("assignments must label every vertex")
    K = int(num_blocks) if num_blocks is not None else int(labels.max())
    if K < 1:
        raise ValidationError("at least one block is required")
    members = [np.nonzero(labels == c + 1)[0] for c in range(K)]
    A = g.adjacency
    out = np.zeros((K, K))
    for a in range(K):
        na = members[a].size
        for b in range(a, K):
            if a == b:
                pairs = na * (na - 1) / 2.0
                total = float(A[np.ix_(members[a], members[a])].sum()) / 2.0
            else:
                pairs = float(na * members[b].size)
                total = float(A[np.ix_(members[a], members[b])].sum())
            value = total / pairs if pairs > 0 else 0.0
            out[a, b] = out[b, a] = value
    return out


def _group_means(points: np.ndarray, labels: np.ndarray, groups) -> np.ndarray:
    """Mean of ``points`` rows within each requested label group."""

    out = np.empty((len(groups), points.shape[1]))
    for row, g in enumerate(groups):
        members = points[labels == g]
        if members.shape[0] == 0:
            raise TrimError(
                f"matched block {g} has no vertices left after trimming; "
                "the cluster structure is too degenerate to align"
            )
        out[row] = members.mean(axis=0)
    return out


def block_trim(g1: Graph, g2: Graph, config: TrimConfig | None = None) -> TrimOutcome:
    """Trim block-structured contamination from ``g2`` using ``g1`` as reference.

    Pipeline: embed both graphs, fit Gaussian mixtures to both embeddings,
    estimate each graph's block connectivity matrix from the cluster centers,
    match the reference blocks into the contaminated blocks, keep only the
    vertices of matched clusters, re-embed that induced subgraph at the
    reference dimension, and rotate the reference embedding onto the matched
    cluster centers.  The result feeds directly into Mahalanobis ranking.
    """

    cfg = config if config is not None else TrimConfig()
    if g1.n == 0 or g2.n == 0:
        raise ValidationError("both graphs must be nonempty")
    d1 = cfg.d1 if cfg.d1 is not None else select_dimension(g1, cfg.elbow_index)
    d2 = cfg.d2 if cfg.d2 is not None else select_dimension(g2, cfg.elbow_index)
    emb1 = ase(g1, d1)
    emb2 = ase(g2, d2)
    rng1, rng2 = op_streams(cfg.seed, 2)
    model1 = gmm_bic(emb1.Xhat, k_range=cfg.k_range_1, seed=rng1, restarts=cfg.restarts)
    model2 = gmm_bic(emb2.Xhat, k_range=cfg.k_range_2, seed=rng2, restarts=cfg.restarts)
    if cfg.block_estimator == "density":
        Bhat1 = empirical_block_matrix(g1, model1.assignments, model1.K)
        Bhat2 = empirical_block_matrix(g2, model2.assignments, model2.K)
    else:
        Bhat1 = estimate_block_matrix(model1.centers, emb1.signature)
        Bhat2 = estimate_block_matrix(model2.centers, emb2.signature)
    try:
        match = match_block_matrices(Bhat1, Bhat2, hard_cap=cfg.match_cap)
    except DimensionError as exc:
        raise TrimError(
            f"matching failed: {exc}; supply k_range_2 wide enough for the "
            "contaminated graph's block count"
        ) from exc
    wanted = np.asarray(match.mapping) + 1  # cluster labels are 1-based
    retained = np.nonzero(np.isin(model2.assignments, wanted))[0]
    if retained.size == 0:
        raise TrimError("no vertices fall in the matched blocks; nothing retained")
    trimmed = g2.induced_subgraph(retained)
    emb2t = ase(trimmed, d1)
    labels_retained = model2.assignments[retained]
    target_centers = _group_means(emb2t.Xhat, labels_retained, wanted)
    aligned1 = procrustes_align(model1.centers, target_centers, emb1.Xhat)
    return TrimOutcome(
        trimmed_graph=trimmed,
        vertex_map=retained,
        aligned_embedding_1=aligned1,
        embedding_2=emb2t.Xhat,
        match=replace(match, retained_vertices=retained),
    )


def two_stage_clean(
    g1: Graph,
    g2: Graph,
    robust_config: RobustKmeansConfig,
    trim_config: TrimConfig | None = None,
    *,
    clean_d: int | None = None,
) -> TrimOutcome:
    """Robust K-means pre-clean of ``g2`` followed by :func:`block_trim`.

    Stage 1 embeds ``g2`` and runs the noise-absorbing robust K-means;
    vertices assigned to the noise label are dropped.  Stage 2 runs
    :func:`block_trim` against the cleaned subgraph.  The returned outcome's
    ``vertex_map`` composes both stages, so it indexes into the original
    ``g2``.

    ``clean_d`` sets the embedding dimension for stage 1 and defaults to the
    reference dimension ``d1``.  Diffuse noise cannot manufacture strong
    eigenvalues, so it scatters widely in the leading coordinates where the
    signal blocks stay tight; cleaning there separates far better than
    cleaning in the full ``d2``-dimensional embedding, whose trailing
    coordinates are dominated by spectral-bulk fuzz for signal and noise
    alike.
    """

    cfg = trim_config if trim_config is not None else TrimConfig()
    if g1.n == 0 or g2.n == 0:
        raise ValidationError("both graphs must be nonempty")
    rng_stage1, rng_trim = op_streams(cfg.seed, 2)
    if clean_d is None:
        clean_d = cfg.d1 if cfg.d1 is not None else select_dimension(g1, cfg.elbow_index)
    emb2 = ase(g2, clean_d)
    stage1 = robust_kmeans(emb2.Xhat, robust_config, seed=rng_stage1)
    keep = np.nonzero(stage1.assignments != 0)[0]
    cleaned = g2.induced_subgraph(keep)
    outcome = block_trim(g1, cleaned, replace(cfg, seed=rng_trim))
    vertex_map = keep[outcome.vertex_map]
    return TrimOutcome(
        trimmed_graph=outcome.trimmed_graph,
        vertex_map=vertex_map,
        aligned_embedding_1=outcome.aligned_embedding_1,
        embedding_2=outcome.embedding_2,
        match=replace(outcome.match, retained_vertices=vertex_map),
    )


# --------------------------------------------------------------------------
# Degree-trimming baseline
# --------------------------------------------------------------------------


def degree_trim(g: Graph, h: float, l: float) -> tuple[Graph, np.ndarray]:
    """Remove the top ``h``% and bottom ``l``% of vertices by degree.

    Percentile counts are floored.  The top slice is removed first (highest
    degree first, index breaking ties); the bottom slice is then taken from
    the remaining vertices by ascending original degree.  Returns the induced
    subgraph and the kept original indices.
    """

    if not (0 <= h <= 100 and 0 <= l <= 100):
        raise ValidationError("trim percentages must lie in [0, 100]")
    n = g.n
    top_count = int(math.floor(h / 100.0 * n))
    bottom_count = int(math.floor(l / 100.0 * n))
    if top_count + bottom_count >= n:
        raise SizeError(f"trimming {h}% + {l}% would remove every vertex")
    degrees = g.degrees()
    idx = np.arange(n)
    top_order = np.lexsort((idx, -degrees))
    removed = set(top_order[:top_count].tolist())
    bottom_order = np.lexsort((idx, degrees))
    taken = 0
    for v in bottom_order:
        if taken == bottom_count:
            break
        if v not in removed:
            removed.add(int(v))
            taken += 1
    kept = np.asarray([v for v in range(n) if v not in removed], dtype=np.int64)
    return g.induced_subgraph(kept), kept


def newman_modularity(g: Graph, labels) -> float:
    """Newman modularity of a vertex partition.

    ``Q = (1/2m) * sum_ij (A_ij - k_i k_j / 2m) * [c_i == c_j]``, computed
    per community.  An empty graph has modularity 0.
    """

    labels = np.asarray(labels)
    if labels.shape != (g.n,):
        raise ValidationError("labels must assign one community per vertex")
    two_m = 2.0 * g.num_edges()
    if two_m == 0:
        return 0.0
    degrees = g.degrees().astype(np.float64)
    A = g.adjacency
    total = 0.0
    for c in np.unique(labels):
        members = np.nonzero(labels == c)[0]
        internal = float(A[np.ix_(members, members)].sum())
        deg_sum = float(degrees[members].sum())
        total += internal / two_m - (deg_sum / two_m) ** 2
    return total


def degree_trim_baseline(
    g: Graph,
    grid_step: float = 5.0,
    *,
    d: int | None = None,
    num_clusters: int | None = None,
    k_range=(1, 9),
    seed=None,
) -> tuple[Graph, float, float]:
    """Degree-percentile trimming with modularity-driven percentile selection.

    Grid-searches ``(h, l)`` over ``{0, grid_step, ..., 25}^2``.  Each cell
    trims by degree rank, embeds the trimmed graph, partitions it with
    K-means (``K`` fitted once on the untrimmed graph unless supplied), and
    scores the partition by Newman modularity.  Returns the trimmed graph for
    the modularity-maximizing cell along with its ``(h, l)``; ties resolve to
    the smallest ``(h, l)`` in row-major order, so an all-tie grid returns
    ``(0, 0)``.
    """

    if g.n == 0:
        raise ValidationError("graph must be nonempty")
    if grid_step <= 0:
        raise ValidationError("grid_step must be positive")
    levels = [i * grid_step for i in range(int(math.floor(25.0 / grid_step)) + 1)]
    levels = [v for v in levels if v <= 25.0 + 1e-9]
    streams = op_streams(seed, 1 + len(levels) ** 2)
    if d is None:
        d = select_dimension(g, 1)
    if num_clusters is None:
        num_clusters = gmm_bic(ase(g, d).Xhat, k_range=k_range, seed=streams[0]).K
    # Errors that mark a single grid cell as infeasible rather than aborting
    # the whole search (e.g. the trimmed graph lost rank).
    cell_errors = (
        SizeError,
        ValidationError,
        RankError,
        ConvergenceError,
        DegenerateClusteringError,
    )
    best: tuple[float, float, float, Graph] | None = None
    cell = 0
    for h in levels:
        for l in levels:
            cell += 1
            try:
                trimmed, _ = degree_trim(g, h, l)
                if trimmed.n < max(num_clusters, d):
                    continue
                emb = ase(trimmed, d)
                model = kmeans(emb.Xhat, num_clusters, seed=streams[cell])
            except cell_errors:
                continue
            score = newman_modularity(trimmed, model.assignments)
            if best is None or score > best[0]:
                best = (score, h, l, trimmed)
    if best is None:
        raise SizeError(
            "no feasible trim level: every grid cell left too few vertices "
            "to embed and cluster"
        )
    return best[3], best[1], best[2]


# --------------------------------------------------------------------------
# Separation diagnostics
# --------------------------------------------------------------------------


def _min_or_inf(values) -> float:
    vals = list(values)
    return min(vals) if vals else math.inf


def check_separation(B, s_plus: float, s_minus: float, mode: str = "A1") -> SeparationReport:
    """Margins of the conditions that make block matching well posed.

    Diagonal mode (``"A1"``) measures how distinguishable the within-block
    probabilities stay after contamination shifts them up by
    ``s_plus * (1 - p)`` or down by ``s_minus * p``; off-diagonal mode
    (``"A2"``) does the same for between-block probabilities.  A margin of
    zero means two entries that the matcher must tell apart coincide exactly,
    so matching may have multiple optima.
    """

    Bm = _as_square_matrix(B, "B")
    for name, s in (("s_plus", s_plus), ("s_minus", s_minus)):
        if not (0.0 <= s <= 1.0):
            raise ValidationError(f"{name} must lie in [0, 1]")
    mode_norm = str(mode).upper()
    if mode_norm not in {"A1", "A2"}:
        raise ValidationError("mode must be 'A1' or 'A2'")
    K = Bm.shape[0]
    margins: dict[str, float] = {}
    if mode_norm == "A1":
        diag = np.diag(Bm)
        margins["A1.1"] = _min_or_inf(
            abs(diag[i] - diag[j]) for i in range(K) for j in range(K) if i != j
        )
        margins["A1.2"] = _min_or_inf(
            abs(diag[i] - diag[j] - s_plus * (1.0 - diag[j]))
            for i in range(K)
            for j in range(K)
        )
        margins["A1.3"] = _min_or_inf(
            abs(diag[i] - diag[j] * (1.0 - s_minus))
            for i in range(K)
            for j in range(K)
        )
    else:
        off = [(i, j) for i in range(K) for j in range(K) if i != j]
        margins["A2.1"] = _min_or_inf(
            abs(Bm[i, j] - Bm[k, l])
            for (i, j) in off
            for (k, l) in off
            if {i, j} != {k, l}
        )
        margins["A2.2"] = _min_or_inf(
            abs(Bm[i, j] - Bm[k, l] - s_plus * (1.0 - Bm[k, l]))
            for (i, j) in off
            for (k, l) in off
        )
        margins["A2.3"] = _min_or_inf(
            abs(Bm[i, j] - Bm[k, l] * (1.0 - s_minus))
            for (i, j) in off
            for (k, l) in off
        )
    flagged = tuple(name for name, margin in margins.items() if margin <= 0.0)
    return SeparationReport(
        mode=mode_norm, margins=margins, flagged=flagged, ok=not flagged
    )


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def _write_matrix_csv(M: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"dim_{j + 1}" for j in range(M.shape[1])])
        for row in M:
            writer.writerow([repr(float(x)) for x in row])


def _read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = [[float(x) for x in row] for row in rows[1:]]
    return np.asarray(data, dtype=np.float64)


def save_trim_outcome(outcome: TrimOutcome, directory) -> None:
    """Write a trim outcome to ``directory`` (created if needed).

    Files: ``trimmed_edges.txt`` (edge list), ``vertex_map.csv``
    (retained_index, original_index), ``match.json`` and two embedding CSVs.
    """

    os.makedirs(directory, exist_ok=True)
    save_edge_list(outcome.trimmed_graph, os.path.join(directory, "trimmed_edges.txt"))
    with open(os.path.join(directory, "vertex_map.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["retained_index", "original_index"])
        for i, orig in enumerate(outcome.vertex_map):
            writer.writerow([i, int(orig)])
    match = outcome.match
    payload = {
        "mapping": list(match.mapping),
        "objective": match.objective,
        "retained_blocks": list(match.retained_blocks),
        "retained_vertices": None
        if match.retained_vertices is None
        else [int(v) for v in match.retained_vertices],
    }
    with open(os.path.join(directory, "match.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_matrix_csv(
        outcome.aligned_embedding_1, os.path.join(directory, "aligned_embedding_1.csv")
    )
    _write_matrix_csv(outcome.embedding_2, os.path.join(directory, "embedding_2.csv"))


def load_trim_outcome(directory) -> TrimOutcome:
    """Inverse of :func:`save_trim_outcome`."""

    trimmed = load_edge_list(os.path.join(directory, "trimmed_edges.txt"))
    with open(os.path.join(directory, "vertex_map.csv"), newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    vertex_map = np.asarray([int(row[1]) for row in rows], dtype=np.int64)
    with open(os.path.join(directory, "match.json")) as fh:
        payload = json.load(fh)
    match = MatchResult(
        mapping=tuple(payload["mapping"]),
        objective=float(payload["objective"]),
        retained_blocks=tuple(payload["retained_blocks"]),
        retained_vertices=None
        if payload["retained_vertices"] is None
        else np.asarray(payload["retained_vertices"], dtype=np.int64),
    )
    return TrimOutcome(
        trimmed_graph=trimmed,
        vertex_map=vertex_map,
        aligned_embedding_1=_read_matrix_csv(
            os.path.join(directory, "aligned_embedding_1.csv")
        ),
        embedding_2=_read_matrix_csv(os.path.join(directory, "embedding_2.csv")),
        match=match,
    )
