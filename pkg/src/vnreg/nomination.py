"""Ranking candidate matches across two aligned embeddings.

Given a joint Gaussian-mixture model over the stacked rows of two aligned
embeddings, :func:`mahalanobis_rank` orders the second graph's vertices by a
symmetrized Mahalanobis distance to each query vertex of the first graph.
:func:`rank_at_k_curve` and :func:`precision_at_k` turn collections of such
rankings into the evaluation curves used throughout the experiment harness,
and :func:`nominate_with_seeds` provides the seed-based alignment variant
that skips trimming entirely.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .clustering import ClusterModel, gmm_bic
from .errors import CoverageError, QueryError, ValidationError
from .regularization import procrustes_align

__all__ = [
    "AGGREGATE_QUERY",
    "NominationList",
    "EvalCurve",
    "mahalanobis_rank",
    "relabel_candidates",
    "rank_at_k_curve",
    "precision_at_k",
    "nominate_with_seeds",
    "save_nomination_lists",
    "load_nomination_lists",
    "save_eval_curve",
    "load_eval_curve",
]

# Query id used for a ranking aggregated over a whole query set.
AGGREGATE_QUERY = -1


@dataclass(frozen=True)
class NominationList:
    """A query vertex and every clustered candidate ordered by score.

    ``ranked`` holds ``(candidate id, score)`` pairs with scores non-decreasing;
    lower scores mean stronger nominations.  ``query`` is
    :data:`AGGREGATE_QUERY` when the list aggregates several queries.
    """

    query: int
    ranked: tuple[tuple[int, float], ...]

    def __post_init__(self):
        scores = [s for _, s in self.ranked]
        if any(b < a for a, b in zip(scores, scores[1:])):
            raise ValidationError("scores must be non-decreasing down the list")
        ids = [c for c, _ in self.ranked]
        if len(set(ids)) != len(ids):
            raise ValidationError("candidates must not repeat within a list")

    def rank_of(self, candidate: int) -> int | None:
        """1-based position of ``candidate``, or ``None`` if absent."""

        for pos, (cand, _) in enumerate(self.ranked, start=1):
            if cand == candidate:
                return pos
        return None


@dataclass(frozen=True)
class EvalCurve:
    """An evaluation value per cutoff ``k``, with a chance baseline."""

    k_values: np.ndarray
    values: np.ndarray
    chance: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k_values, dtype=np.int64)
        v = np.asarray(self.values, dtype=np.float64)
        c = np.asarray(self.chance, dtype=np.float64)
        if not (k.shape == v.shape == c.shape) or k.ndim != 1 or k.size == 0:
            raise ValidationError("curve arrays must be equal-length and nonempty")
        if np.any(k < 1) or np.any(np.diff(k) <= 0):
            raise ValidationError("k_values must be strictly increasing positive integers")
        object.__setattr__(self, "k_values", k)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "chance", c)

    def value_at(self, k: int) -> float:
        idx = np.nonzero(self.k_values == k)[0]
        if idx.size == 0:
            raise ValidationError(f"k={k} is not on this curve")
        return float(self.values[idx[0]])


def _as_points(points, name: str) -> np.ndarray:
    if hasattr(points, "Xhat"):
        points = points.Xhat
    out = np.asarray(points, dtype=np.float64)
    if out.ndim != 2:
        raise ValidationError(f"{name} must be a 2-D point matrix")
    return out


def _cluster_pseudoinverses(model: ClusterModel) -> np.ndarray:
    """Moore-Penrose pseudoinverse of every cluster covariance.

    Singular values below 1e-10 of the largest are treated as zero, so
    degenerate (flat) clusters measure distance only inside their span.
    """

    return np.stack(
        [np.linalg.pinv(cov, rcond=1e-10) for cov in model.covariances]
    )


def mahalanobis_rank(
    joint_model: ClusterModel,
    points_1,
    points_2,
    queries,
    aggregate: bool = False,
) -> list[NominationList]:
    """Rank every clustered row of ``points_2`` against each query row of ``points_1``.

    The score between query ``u`` and candidate ``v`` is the larger of the two
    directed Mahalanobis distances, each using the pseudoinverse covariance of
    the endpoint's assigned cluster in ``joint_model`` (which must have been
    fitted on ``[points_1; points_2]`` stacked in that order).  Ties order by
    candidate id.

    With ``aggregate=True`` the whole query set is treated as one entity of
    interest: a single list is returned, scored by the minimum over queries.
    """

    X1 = _as_points(points_1, "points_1")
    X2 = _as_points(points_2, "points_2")
    if X1.shape[1] != X2.shape[1]:
        raise ValidationError("points_1 and points_2 must share a dimension")
    n1, n2 = X1.shape[0], X2.shape[0]
    assignments = joint_model.assignments
    if assignments.size != n1 + n2:
        raise ValidationError(
            "joint_model must be fitted on the stacked rows of points_1 and points_2"
        )
    labels_1 = assignments[:n1]
    labels_2 = assignments[n1:]
    candidates = np.nonzero(labels_2 != 0)[0]
    if candidates.size == 0:
        raise ValidationError("no clustered candidates to rank")
    query_ids = [int(q) for q in queries]
    if not query_ids:
        raise ValidationError("queries must be nonempty")
    for q in query_ids:
        if not (0 <= q < n1):
            raise QueryError(f"query {q} is outside the first point set")
        if labels_1[q] == 0:
            raise QueryError(f"query {q} was assigned to the noise cluster")
    pinvs = _cluster_pseudoinverses(joint_model)
    cand_points = X2[candidates]
    cand_pinvs = pinvs[labels_2[candidates] - 1]

    def scores_for(q: int) -> np.ndarray:
        diff = cand_points - X1[q]
        pinv_q = pinvs[labels_1[q] - 1]
        d_query = np.einsum("ij,jk,ik->i", diff, pinv_q, diff)
        d_cand = np.einsum("ij,ijk,ik->i", diff, cand_pinvs, diff)
        return np.sqrt(np.maximum(np.maximum(d_query, d_cand), 0.0))

    def build_list(query: int, scores: np.ndarray) -> NominationList:
        order = np.lexsort((candidates, scores))
        ranked = tuple(
            (int(candidates[i]), float(scores[i])) for i in order
        )
        return NominationList(query=query, ranked=ranked)

    if aggregate and len(query_ids) > 1:
        all_scores = np.min(
            np.stack([scores_for(q) for q in query_ids]), axis=0
        )
        return [build_list(AGGREGATE_QUERY, all_scores)]
    return [build_list(q, scores_for(q)) for q in query_ids]


def relabel_candidates(lists, vertex_map) -> list[NominationList]:
    """Translate candidate ids through ``vertex_map`` (retained -> original).

    Used after trimming so nomination lists refer to vertices of the original
    contaminated graph rather than rows of the trimmed one.
    """

    vmap = np.asarray(vertex_map, dtype=np.int64)
    out = []
    for lst in lists:
        ranked = tuple((int(vmap[c]), s) for c, s in lst.ranked)
        out.append(NominationList(query=lst.query, ranked=ranked))
    return out


def rank_at_k_curve(lists, truth, k_max: int) -> EvalCurve:
    """Count queries whose true match ranks within each cutoff.

    ``truth`` maps query id to the true corresponding candidate id.  Queries
    whose true match does not appear in their list (for example, trimmed away)
    never count.  The chance baseline is ``(#queries) * k / (#candidates)``,
    the expected count under uniformly random ranking.
    """

    lists = list(lists)
    if not lists:
        raise ValidationError("at least one nomination list is required")
    if k_max < 1:
        raise ValidationError("k_max must be >= 1")
    pools = {frozenset(cand for cand, _ in lst.ranked) for lst in lists}
    if len(pools) != 1:
        raise ValidationError("all lists must rank the same candidate pool")
    n_candidates = len(pools.pop())
    if n_candidates == 0:
        raise ValidationError("candidate pool is empty")
    true_ranks = []
    for lst in lists:
        if lst.query not in truth:
            raise CoverageError(f"truth does not cover query {lst.query}")
        rank = lst.rank_of(truth[lst.query])
        true_ranks.append(np.inf if rank is None else rank)
    ranks = np.asarray(true_ranks, dtype=np.float64)
    k_values = np.arange(1, k_max + 1)
    counts = np.asarray([(ranks <= k).sum() for k in k_values], dtype=np.float64)
    chance = len(lists) * k_values / n_candidates
    return EvalCurve(k_values=k_values, values=counts, chance=chance)


def _precision_curve(lst: NominationList, labels, k_max: int) -> tuple[np.ndarray, float]:
    if lst.query not in labels:
        raise CoverageError(f"labels do not cover query {lst.query}")
    own = labels[lst.query]
    hits = []
    for cand, _ in lst.ranked:
        if cand not in labels:
            raise CoverageError(f"labels do not cover candidate {cand}")
        hits.append(1.0 if labels[cand] == own else 0.0)
    hits_arr = np.asarray(hits, dtype=np.float64)
    cumulative = np.cumsum(hits_arr)
    k_values = np.arange(1, k_max + 1)
    capped = np.minimum(k_values, hits_arr.size) - 1
    precision = np.where(
        hits_arr.size > 0, cumulative[capped] / k_values, 0.0
    )
    prevalence = float(hits_arr.mean()) if hits_arr.size else 0.0
    return precision, prevalence


def precision_at_k(lists, labels, k_max: int, per_class: bool = False):
    """Average fraction of same-class candidates in each query's top ``k``.

    ``labels`` maps every query and candidate id to a class.  By default the
    per-query precision curves are averaged over all queries; with
    ``per_class=True`` a dict of one averaged curve per query class is
    returned.  The chance baseline is the class prevalence among candidates.
    """

    lists = list(lists)
    if not lists:
        raise ValidationError("at least one nomination list is required")
    if k_max < 1:
        raise ValidationError("k_max must be >= 1")
    k_values = np.arange(1, k_max + 1)
    by_class: dict[object, list[tuple[np.ndarray, float]]] = {}
    for lst in lists:
        curve = _precision_curve(lst, labels, k_max)
        by_class.setdefault(labels[lst.query], []).append(curve)

    def averaged(entries) -> EvalCurve:
        values = np.mean([c for c, _ in entries], axis=0)
        prevalence = float(np.mean([p for _, p in entries]))
        return EvalCurve(
            k_values=k_values,
            values=values,
            chance=np.full(k_values.shape, prevalence),
        )

    if per_class:
        return {cls: averaged(entries) for cls, entries in by_class.items()}
    return averaged([entry for entries in by_class.values() for entry in entries])


def nominate_with_seeds(
    embedding_1,
    embedding_2,
    seeds,
    queries,
    *,
    k_range=(1, 9),
    seed=None,
    aggregate: bool = False,
) -> list[NominationList]:
    """Seed-aligned nomination without any trimming.

    ``seeds`` is a sequence of ``(i, j)`` row pairs asserting that row ``i`` of
    ``embedding_1`` and row ``j`` of ``embedding_2`` are the same entity.  The
    first embedding is rotated onto the second by orthogonal Procrustes over
    the seed rows (an :class:`~vnreg.errors.AlignmentWarning` is emitted when
    the seeds underdetermine the rotation), the stacked rows are clustered,
    and the queries are ranked exactly as in :func:`mahalanobis_rank`.
    """

    X1 = _as_points(embedding_1, "embedding_1")
    X2 = _as_points(embedding_2, "embedding_2")
    if X1.shape[1] != X2.shape[1]:
        raise ValidationError("embeddings must share a dimension to be aligned")
    seed_pairs = [(int(i), int(j)) for i, j in seeds]
    if len(seed_pairs) < 1:
        raise ValidationError("at least one seed pair is required")
    rows_1 = np.asarray([i for i, _ in seed_pairs])
    rows_2 = np.asarray([j for _, j in seed_pairs])
    if rows_1.min() < 0 or rows_1.max() >= X1.shape[0]:
        raise ValidationError("seed indices out of range for embedding_1")
    if rows_2.min() < 0 or rows_2.max() >= X2.shape[0]:
        raise ValidationError("seed indices out of range for embedding_2")
    aligned_1 = procrustes_align(X1[rows_1], X2[rows_2], X1)
    joint = np.vstack([aligned_1, X2])
    joint_model = gmm_bic(joint, k_range=k_range, seed=seed)
    return mahalanobis_rank(joint_model, aligned_1, X2, queries, aggregate=aggregate)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def save_nomination_lists(lists, path) -> None:
    """Write lists as CSV rows of ``query_id, rank, candidate_id, score``."""

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["query_id", "rank", "candidate_id", "score"])
        for lst in lists:
            for rank, (cand, score) in enumerate(lst.ranked, start=1):
                writer.writerow([lst.query, rank, cand, repr(float(score))])


def load_nomination_lists(path) -> list[NominationList]:
    """Inverse of :func:`save_nomination_lists` (row order preserved)."""

    grouped: dict[int, list[tuple[int, float]]] = {}
    order: list[int] = []
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    for row in rows[1:]:
        query, _, cand, score = int(row[0]), int(row[1]), int(row[2]), float(row[3])
        if query not in grouped:
            grouped[query] = []
            order.append(query)
        grouped[query].append((cand, score))
    return [NominationList(query=q, ranked=tuple(grouped[q])) for q in order]


def save_eval_curve(curve: EvalCurve, path) -> None:
    """Write a curve as CSV rows of ``k, value, chance``."""

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "value", "chance"])
        for k, value, chance in zip(curve.k_values, curve.values, curve.chance):
            writer.writerow([int(k), repr(float(value)), repr(float(chance))])


def load_eval_curve(path) -> EvalCurve:
    """Inverse of :func:`save_eval_curve`."""

    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    k_values = [int(row[0]) for row in rows[1:]]
    values = [float(row[1]) for row in rows[1:]]
    chance = [float(row[2]) for row in rows[1:]]
    return EvalCurve(
        k_values=np.asarray(k_values),
        values=np.asarray(values),
        chance=np.asarray(chance),
    )
