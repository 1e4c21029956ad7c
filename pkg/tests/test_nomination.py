"""Cross-graph candidate ranking and its evaluation curves."""

import numpy as np
import pytest

from vnreg import (
    AGGREGATE_QUERY,
    AlignmentWarning,
    ClusterModel,
    CoverageError,
    EvalCurve,
    NominationList,
    QueryError,
    ValidationError,
    load_eval_curve,
    load_nomination_lists,
    mahalanobis_rank,
    nominate_with_seeds,
    precision_at_k,
    rank_at_k_curve,
    relabel_candidates,
    save_eval_curve,
    save_nomination_lists,
)


def one_d_model(covs, assignments):
    covs = np.asarray(covs, dtype=np.float64).reshape(-1, 1, 1)
    K = covs.shape[0]
    return ClusterModel(
        K=K,
        centers=np.zeros((K, 1)),
        covariances=covs,
        weights=np.full(K, 1.0 / K),
        assignments=np.asarray(assignments),
    )


def spd(rng, d):
    M = rng.standard_normal((d, d))
    return M @ M.T + 0.5 * np.eye(d)


# ---------------------------------------------------------------------------
# pairwise score
# ---------------------------------------------------------------------------


def test_score_is_worse_directed_distance():
    # query at 0 in a cluster with variance 4, candidate at 1 with variance 1:
    # the two directed distances are 0.5 and 1.0 and the larger one wins
    model = one_d_model([4.0, 1.0], [1, 2])
    lists = mahalanobis_rank(model, np.array([[0.0]]), np.array([[1.0]]), [0])
    assert len(lists) == 1
    assert lists[0].query == 0
    assert lists[0].ranked == ((0, pytest.approx(1.0, abs=1e-12)),)

    # swapping which side has the tight covariance leaves the score alone
    swapped = one_d_model([1.0, 4.0], [1, 2])
    lists2 = mahalanobis_rank(swapped, np.array([[0.0]]), np.array([[1.0]]), [0])
    assert lists2[0].ranked[0][1] == pytest.approx(1.0, abs=1e-12)


def test_score_invariant_under_invertible_linear_maps():
    rng = np.random.default_rng(17)
    X1 = rng.standard_normal((4, 2))
    X2 = rng.standard_normal((6, 2))
    covs = np.stack([spd(rng, 2), spd(rng, 2)])
    assignments = np.array([1, 2, 1, 2, 2, 1, 2, 1, 1, 2])
    model = ClusterModel(
        K=2,
        centers=rng.standard_normal((2, 2)),
        covariances=covs,
        weights=np.array([0.5, 0.5]),
        assignments=assignments,
    )
    base = mahalanobis_rank(model, X1, X2, [0, 1, 2, 3])

    T = np.array([[2.0, 1.0], [0.5, 3.0]])
    model_t = ClusterModel(
        K=2,
        centers=model.centers @ T,
        covariances=np.stack([T.T @ C @ T for C in covs]),
        weights=model.weights,
        assignments=assignments,
    )
    mapped = mahalanobis_rank(model_t, X1 @ T, X2 @ T, [0, 1, 2, 3])
    for lst, lst_t in zip(base, mapped):
        assert [c for c, _ in lst.ranked] == [c for c, _ in lst_t.ranked]
        for (_, s), (_, s_t) in zip(lst.ranked, lst_t.ranked):
            assert s_t == pytest.approx(s, abs=1e-9)


def test_degenerate_covariance_uses_pseudoinverse():
    # displacement entirely inside the covariance's null space scores zero
    cov = np.array([[1.0, 0.0], [0.0, 0.0]])
    model = ClusterModel(
        K=1,
        centers=np.zeros((1, 2)),
        covariances=cov[None],
        weights=np.array([1.0]),
        assignments=np.array([1, 1]),
    )
    lists = mahalanobis_rank(
        model, np.array([[0.0, 0.0]]), np.array([[0.0, 5.0]]), [0]
    )
    assert lists[0].ranked[0][1] == pytest.approx(0.0, abs=1e-12)


def test_ties_order_by_candidate_id():
    model = one_d_model([1.0], [1, 1, 1, 1])
    X2 = np.array([[1.0], [-1.0], [3.0]])
    lists = mahalanobis_rank(model, np.array([[0.0]]), X2, [0])
    assert [c for c, _ in lists[0].ranked] == [0, 1, 2]


def test_query_errors():
    model = one_d_model([1.0, 1.0], [1, 0, 1])
    X1 = np.array([[0.0], [1.0]])
    X2 = np.array([[2.0]])
    with pytest.raises(QueryError, match="outside"):
        mahalanobis_rank(model, X1, X2, [2])
    with pytest.raises(QueryError, match="noise"):
        mahalanobis_rank(model, X1, X2, [1])


def test_noise_candidates_are_not_ranked():
    model = one_d_model([1.0], [1, 1, 0, 1])
    X1 = np.array([[0.0]])
    X2 = np.array([[1.0], [2.0], [3.0]])  # middle row assigned to noise
    lists = mahalanobis_rank(model, X1, X2, [0])
    assert [c for c, _ in lists[0].ranked] == [0, 2]


# ---------------------------------------------------------------------------
# aggregate mode
# ---------------------------------------------------------------------------


def test_aggregate_takes_minimum_over_queries():
    rng = np.random.default_rng(19)
    X1 = rng.standard_normal((3, 2))
    X2 = rng.standard_normal((5, 2))
    model = ClusterModel(
        K=1,
        centers=np.zeros((1, 2)),
        covariances=np.eye(2)[None],
        weights=np.array([1.0]),
        assignments=np.ones(8, dtype=int),
    )
    individual = mahalanobis_rank(model, X1, X2, [0, 1, 2])
    agg = mahalanobis_rank(model, X1, X2, [0, 1, 2], aggregate=True)
    assert len(agg) == 1
    assert agg[0].query == AGGREGATE_QUERY
    per_candidate = {}
    for lst in individual:
        for cand, score in lst.ranked:
            per_candidate[cand] = min(per_candidate.get(cand, np.inf), score)
    for cand, score in agg[0].ranked:
        assert score == pytest.approx(per_candidate[cand], abs=1e-12)
    scores = [s for _, s in agg[0].ranked]
    assert scores == sorted(scores)


# ---------------------------------------------------------------------------
# evaluation curves
# ---------------------------------------------------------------------------


def two_hand_lists():
    a = NominationList(query=0, ranked=((10, 0.1), (11, 0.2), (12, 0.3)))
    b = NominationList(query=1, ranked=((11, 0.1), (10, 0.2), (12, 0.4)))
    return [a, b]


def test_rank_at_k_frozen_counts():
    lists = two_hand_lists()
    curve = rank_at_k_curve(lists, {0: 10, 1: 12}, k_max=3)
    assert curve.k_values.tolist() == [1, 2, 3]
    assert curve.values.tolist() == [1.0, 1.0, 2.0]  # ranks 1 and 3
    assert np.allclose(curve.chance, [2 / 3, 4 / 3, 2.0])
    assert curve.value_at(2) == 1.0
    with pytest.raises(ValidationError):
        curve.value_at(7)


def test_rank_at_k_missing_truth_never_counts():
    lists = two_hand_lists()
    curve = rank_at_k_curve(lists, {0: 10, 1: 99}, k_max=3)
    assert curve.values.tolist() == [1.0, 1.0, 1.0]


def test_rank_at_k_requires_covering_truth():
    with pytest.raises(CoverageError):
        rank_at_k_curve(two_hand_lists(), {0: 10}, k_max=3)


def test_rank_at_k_requires_common_pool():
    a = NominationList(query=0, ranked=((10, 0.1),))
    b = NominationList(query=1, ranked=((11, 0.1),))
    with pytest.raises(ValidationError):
        rank_at_k_curve([a, b], {0: 10, 1: 11}, k_max=1)


def test_precision_hand_curve():
    lst = NominationList(
        query=0, ranked=((1, 0.1), (2, 0.2), (3, 0.3), (4, 0.4))
    )
    labels = {0: "a", 1: "a", 2: "b", 3: "a", 4: "b"}
    curve = precision_at_k([lst], labels, k_max=4)
    assert np.allclose(curve.values, [1.0, 0.5, 2 / 3, 0.5])
    assert np.allclose(curve.chance, 0.5)  # two of four candidates share "a"


def test_precision_beyond_pool_divides_by_k():
    lst = NominationList(
        query=0, ranked=((1, 0.1), (2, 0.2), (3, 0.3), (4, 0.4))
    )
    labels = {0: "a", 1: "a", 2: "b", 3: "a", 4: "b"}
    curve = precision_at_k([lst], labels, k_max=6)
    assert curve.values[4] == pytest.approx(2 / 5)
    assert curve.values[5] == pytest.approx(2 / 6)


def test_precision_per_class_splits_queries():
    lists = [
        NominationList(query=0, ranked=((2, 0.1), (3, 0.2))),
        NominationList(query=1, ranked=((3, 0.1), (2, 0.2))),
    ]
    labels = {0: "a", 1: "b", 2: "a", 3: "b"}
    curves = precision_at_k(lists, labels, k_max=2, per_class=True)
    assert set(curves) == {"a", "b"}
    assert curves["a"].values.tolist() == [1.0, 0.5]
    assert curves["b"].values.tolist() == [1.0, 0.5]


def test_precision_requires_covering_labels():
    lst = NominationList(query=0, ranked=((1, 0.1),))
    with pytest.raises(CoverageError, match="candidate 1"):
        precision_at_k([lst], {0: "a"}, k_max=1)
    with pytest.raises(CoverageError, match="query 0"):
        precision_at_k([lst], {1: "a"}, k_max=1)


# ---------------------------------------------------------------------------
# seeded nomination
# ---------------------------------------------------------------------------


def test_seeded_nomination_undoes_rotation():
    rng = np.random.default_rng(23)
    X1 = rng.uniform(-1, 1, size=(30, 2))
    theta = 0.7
    Q = np.array(
        [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
    )
    X2 = X1 @ Q
    lists = nominate_with_seeds(
        X1, X2, seeds=[(0, 0), (1, 1), (2, 2)], queries=[5, 9], seed=3,
        k_range=(1, 3),
    )
    for lst in lists:
        assert lst.ranked[0][0] == lst.query
        assert lst.ranked[0][1] == pytest.approx(0.0, abs=1e-6)


def test_single_seed_underdetermines_rotation():
    rng = np.random.default_rng(29)
    X1 = rng.uniform(-1, 1, size=(20, 2))
    with pytest.warns(AlignmentWarning):
        nominate_with_seeds(X1, X1, seeds=[(0, 0)], queries=[3], seed=1,
                            k_range=(1, 2))


def test_seed_validation():
    X = np.zeros((4, 2))
    with pytest.raises(ValidationError):
        nominate_with_seeds(X, X, seeds=[], queries=[0])
    with pytest.raises(ValidationError):
        nominate_with_seeds(X, X, seeds=[(9, 0)], queries=[0])


# ---------------------------------------------------------------------------
# bookkeeping
# ---------------------------------------------------------------------------


def test_relabel_candidates_translates_through_map():
    lst = NominationList(query=0, ranked=((0, 0.1), (2, 0.2)))
    out = relabel_candidates([lst], np.array([10, 11, 12]))
    assert out[0].query == 0
    assert out[0].ranked == ((10, 0.1), (12, 0.2))


def test_nomination_list_validation():
    with pytest.raises(ValidationError, match="non-decreasing"):
        NominationList(query=0, ranked=((1, 0.5), (2, 0.1)))
    with pytest.raises(ValidationError, match="repeat"):
        NominationList(query=0, ranked=((1, 0.1), (1, 0.2)))
    lst = NominationList(query=0, ranked=((4, 0.1), (7, 0.2)))
    assert lst.rank_of(7) == 2
    assert lst.rank_of(5) is None


def test_lists_round_trip(tmp_path):
    lists = two_hand_lists() + [
        NominationList(query=2, ranked=((12, 1 / 3), (10, 2 / 3), (11, 0.99)))
    ]
    path = tmp_path / "lists.csv"
    save_nomination_lists(lists, path)
    loaded = load_nomination_lists(path)
    assert len(loaded) == len(lists)
    for a, b in zip(loaded, lists):
        assert a.query == b.query
        assert a.ranked == b.ranked  # exact: floats survive the round trip


def test_curve_round_trip(tmp_path):
    curve = rank_at_k_curve(two_hand_lists(), {0: 10, 1: 12}, k_max=3)
    path = tmp_path / "curve.csv"
    save_eval_curve(curve, path)
    loaded = load_eval_curve(path)
    assert loaded.k_values.tolist() == curve.k_values.tolist()
    assert loaded.values.tolist() == curve.values.tolist()
    assert loaded.chance.tolist() == curve.chance.tolist()
