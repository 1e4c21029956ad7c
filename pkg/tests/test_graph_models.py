"""Samplers, contamination operators, and graph file formats."""

import numpy as np
import pytest

from vnreg import (
    BlockContaminationSpec,
    DiffuseNoiseSpec,
    FeasibilityError,
    Graph,
    GrdpgSpec,
    ParseError,
    SbmSpec,
    SphereOrthantRegion,
    ValidationError,
    build_contaminated_block_matrix,
    contaminate_block,
    contaminate_diffuse,
    load_edge_list,
    load_memberships,
    sample_correlated_sbm,
    sample_grdpg,
    sample_sbm,
    save_edge_list,
    save_memberships,
)
from vnreg.graph_models import sample_correlated_edge_matrix, sample_edge_matrix

from oracles import (
    GOLDEN_CONTAMINATED,
    TWO_BLOCK_B,
    pearson_binary,
    upper_triangle,
)


# ---------------------------------------------------------------------------
# contaminated block matrix
# ---------------------------------------------------------------------------


def test_contaminated_block_matrix_golden_value():
    Bc = build_contaminated_block_matrix(TWO_BLOCK_B, 0.2, 0.2)
    assert np.max(np.abs(Bc - GOLDEN_CONTAMINATED)) < 1e-12


def test_contaminated_block_matrix_core_submatrix_is_original():
    rng = np.random.default_rng(7)
    for _ in range(20):
        K = int(rng.integers(1, 4))
        B = rng.uniform(0, 1, size=(K, K))
        B = (B + B.T) / 2
        s_plus, s_minus = rng.uniform(0, 1, size=2)
        Bc = build_contaminated_block_matrix(B, s_plus, s_minus)
        cores = np.arange(0, 3 * K, 3)
        assert np.array_equal(Bc[np.ix_(cores, cores)], B)


def test_contaminated_block_matrix_structural_invariants():
    rng = np.random.default_rng(21)
    for _ in range(20):
        K = int(rng.integers(1, 4))
        B = rng.uniform(0, 1, size=(K, K))
        B = (B + B.T) / 2
        s_plus, s_minus = rng.uniform(0, 1, size=2)
        Bc = build_contaminated_block_matrix(B, s_plus, s_minus)
        assert Bc.shape == (3 * K, 3 * K)
        assert np.allclose(Bc, Bc.T)
        assert Bc.min() >= 0 and Bc.max() <= 1
        for i in range(K):
            for j in range(K):
                v = B[i, j]
                # additions only raise probabilities, deletions only lower them
                assert Bc[3 * i + 1, 3 * j] >= v - 1e-12
                assert Bc[3 * i + 2, 3 * j] <= v + 1e-12
                # adder-deleter pairs are excluded from both tampering rules
                assert Bc[3 * i + 1, 3 * j + 2] == pytest.approx(v, abs=1e-12)


def test_contaminated_block_matrix_validation():
    with pytest.raises(ValidationError):
        build_contaminated_block_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]), 0.2, 0.2)
    with pytest.raises(ValidationError):
        build_contaminated_block_matrix(TWO_BLOCK_B, 1.5, 0.2)
    with pytest.raises(ValidationError):
        build_contaminated_block_matrix(np.array([[1.2]]), 0.2, 0.2)


# ---------------------------------------------------------------------------
# correlated pair coupling
# ---------------------------------------------------------------------------


def test_correlated_pair_conditional_rates_monte_carlo():
    # n=450 gives 101,025 vertex pairs; at p=0.7 the conditional rate
    # estimates have standard error below 0.002, so 0.01 is a safe margin.
    n, p, rho = 450, 0.7, 0.5
    rng = np.random.default_rng(314)
    P = np.full((n, n), p)
    A1 = sample_edge_matrix(P, rng)
    A2 = sample_correlated_edge_matrix(P, A1, rho, rng)
    e1 = upper_triangle(A1).astype(bool)
    e2 = upper_triangle(A2).astype(bool)
    rate_given_edge = e2[e1].mean()
    rate_given_gap = e2[~e1].mean()
    assert rate_given_edge == pytest.approx(p + rho * (1 - p), abs=0.01)  # 0.85
    assert rate_given_gap == pytest.approx(p * (1 - rho), abs=0.01)  # 0.35
    assert e2.mean() == pytest.approx(p, abs=0.01)  # marginal preserved
    assert pearson_binary(e1, e2) == pytest.approx(rho, abs=0.02)


def test_correlated_pair_extreme_rho():
    n = 200
    rng = np.random.default_rng(5)
    P = np.full((n, n), 0.4)
    A1 = sample_edge_matrix(P, rng)
    exact_copy = sample_correlated_edge_matrix(P, A1, 1.0, rng)
    assert np.array_equal(exact_copy, A1)
    independent = sample_correlated_edge_matrix(P, A1, 0.0, rng)
    r = pearson_binary(upper_triangle(A1), upper_triangle(independent))
    assert abs(r) < 0.02


def test_sample_correlated_sbm_shares_memberships():
    spec = SbmSpec(n=300, K=2, B=TWO_BLOCK_B, sizes=(150, 150))
    g1, g2, memberships = sample_correlated_sbm(spec, rho=0.7, seed=11)
    assert g1.n == g2.n == 300
    assert np.array_equal(memberships, np.repeat([0, 1], 150))
    r = pearson_binary(upper_triangle(g1.adjacency), upper_triangle(g2.adjacency))
    assert r > 0.5  # rho=0.7 with estimation noise


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def test_sbm_sampler_block_densities():
    spec = SbmSpec(n=600, K=2, B=TWO_BLOCK_B, sizes=(300, 300))
    g, mem = sample_sbm(spec, seed=3)
    for a in range(2):
        for b in range(2):
            rows = np.nonzero(mem == a)[0]
            cols = np.nonzero(mem == b)[0]
            sub = g.adjacency[np.ix_(rows, cols)]
            density = upper_triangle(sub).mean() if a == b else sub.mean()
            assert density == pytest.approx(TWO_BLOCK_B[a, b], abs=0.02)


def test_sbm_iid_memberships_respect_pi():
    spec = SbmSpec(n=2000, K=2, B=TWO_BLOCK_B, pi=(0.8, 0.2))
    _, mem = sample_sbm(spec, seed=9)
    assert np.mean(mem == 0) == pytest.approx(0.8, abs=0.03)


def test_sample_edge_matrix_extremes():
    rng = np.random.default_rng(0)
    ones = sample_edge_matrix(np.ones((5, 5)), rng)
    assert np.array_equal(ones, 1 - np.eye(5, dtype=np.uint8))
    zeros = sample_edge_matrix(np.zeros((5, 5)), rng)
    assert zeros.sum() == 0


def test_grdpg_from_block_matrix_and_sampling():
    spec, mem = GrdpgSpec.from_block_matrix(TWO_BLOCK_B, sizes=(100, 100))
    assert spec.signature == (2, 0)  # assortative B is positive definite
    P = spec.edge_probabilities()
    expected = TWO_BLOCK_B[np.ix_(mem, mem)]
    np.fill_diagonal(expected, 0.0)
    assert np.max(np.abs(P - expected)) < 1e-12
    g = sample_grdpg(spec, seed=1)
    assert g.n == 200


def test_grdpg_indefinite_signature():
    B = np.array([[0.2, 0.7], [0.7, 0.2]])  # eigenvalues 0.9 and -0.5
    spec, _ = GrdpgSpec.from_block_matrix(B, sizes=(50, 50))
    assert spec.signature == (1, 1)
    P = spec.edge_probabilities()
    assert P.min() >= 0 and P.max() <= 1


# ---------------------------------------------------------------------------
# block contamination operator
# ---------------------------------------------------------------------------


def test_contaminate_block_core_pairs_untouched():
    spec = SbmSpec(n=400, K=2, B=TWO_BLOCK_B, sizes=(200, 200))
    g, mem = sample_sbm(spec, seed=2)
    contamination = BlockContaminationSpec(
        s_plus=0.3, s_minus=0.3, sizes_plus=(50, 50), sizes_minus=(50, 50)
    )
    g2, w_plus, w_minus = contaminate_block(g, contamination, seed=4, memberships=mem)
    assert len(np.intersect1d(w_plus, w_minus)) == 0
    for k in range(2):
        assert np.sum(mem[w_plus] == k) == 50
        assert np.sum(mem[w_minus] == k) == 50
    untouched = np.setdiff1d(np.arange(400), np.union1d(w_plus, w_minus))
    sub = np.ix_(untouched, untouched)
    assert np.array_equal(g2.adjacency[sub], g.adjacency[sub])


def test_contaminate_block_tamper_rates():
    spec = SbmSpec(n=400, K=1, B=np.array([[0.4]]), sizes=(400,))
    g, mem = sample_sbm(spec, seed=8)
    contamination = BlockContaminationSpec(
        s_plus=0.5, s_minus=0.5, sizes_plus=100, sizes_minus=100
    )
    g2, w_plus, w_minus = contaminate_block(g, contamination, seed=6)
    untouched = np.setdiff1d(np.arange(400), np.union1d(w_plus, w_minus))
    # adder-untouched pairs: density 0.4 + 0.5 * 0.6 = 0.7
    add_zone = g2.adjacency[np.ix_(w_plus, untouched)]
    assert add_zone.mean() == pytest.approx(0.7, abs=0.02)
    # deleter-untouched pairs: density 0.4 * 0.5 = 0.2
    del_zone = g2.adjacency[np.ix_(w_minus, untouched)]
    assert del_zone.mean() == pytest.approx(0.2, abs=0.02)
    # adder-deleter pairs keep the original edges bitwise
    cross = np.ix_(w_plus, w_minus)
    assert np.array_equal(g2.adjacency[cross], g.adjacency[cross])


def test_contaminate_block_bernoulli_sets():
    spec = SbmSpec(n=500, K=1, B=np.array([[0.3]]), sizes=(500,))
    g, _ = sample_sbm(spec, seed=1)
    g2, w_plus, w_minus = contaminate_block(
        g, BlockContaminationSpec(pi_plus=0.2, pi_minus=0.2, s_plus=0.5, s_minus=0.5),
        seed=3,
    )
    assert len(np.intersect1d(w_plus, w_minus)) == 0
    assert 55 <= len(w_plus) <= 145  # Binomial(500, 0.2) within ~4 sigma
    assert g2.n == 500


# ---------------------------------------------------------------------------
# diffuse noise
# ---------------------------------------------------------------------------


def _feasible_noise_rotation(spec: GrdpgSpec, scale: float) -> np.ndarray:
    # Map the orthant patch into the cone spanned by the block positions so
    # every induced probability stays in [0, 1].
    block_rows = np.unique(spec.X, axis=0)
    return scale * block_rows


def test_contaminate_diffuse_appends_feasible_noise():
    spec, _ = GrdpgSpec.from_block_matrix(TWO_BLOCK_B, sizes=(100, 100))
    noise = DiffuseNoiseSpec(
        m=50,
        region=SphereOrthantRegion(2),
        rotation=_feasible_noise_rotation(spec, 0.45),
    )
    full, mask = contaminate_diffuse(spec.X, noise, nu=1.0, seed=5, signature=spec.signature)
    assert full.n == 250
    assert mask.sum() == 50 and mask[:200].sum() == 0
    P = full.edge_probabilities()
    assert P.min() >= 0 and P.max() <= 1


def test_contaminate_diffuse_infeasible_raises():
    spec, _ = GrdpgSpec.from_block_matrix(TWO_BLOCK_B, sizes=(40, 40))
    oversized = DiffuseNoiseSpec(
        m=10, region=SphereOrthantRegion(2), rotation=3.0 * np.eye(2)
    )
    with pytest.raises(FeasibilityError):
        contaminate_diffuse(spec.X, oversized, nu=1.0, seed=2, signature=spec.signature)


# ---------------------------------------------------------------------------
# Graph container
# ---------------------------------------------------------------------------


def test_graph_validation():
    with pytest.raises(ValidationError):
        Graph(2, np.array([[0, 1], [0, 0]]))  # asymmetric
    with pytest.raises(ValidationError):
        Graph(2, np.array([[1, 0], [0, 0]]))  # self-loop
    with pytest.raises(ValidationError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(ValidationError):
        Graph.from_edges(3, [(0, 5)])


def test_graph_induced_subgraph_and_degrees():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    assert np.array_equal(g.degrees(), [2, 2, 2, 2, 2])
    assert g.num_edges() == 5
    sub = g.induced_subgraph([0, 1, 4])
    assert sub.n == 3
    assert np.array_equal(
        sub.adjacency, np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]], dtype=np.uint8)
    )


def test_sbm_spec_validation():
    with pytest.raises(ValidationError):
        SbmSpec(n=10, K=2, B=TWO_BLOCK_B)  # neither pi nor sizes
    with pytest.raises(ValidationError):
        SbmSpec(n=10, K=2, B=TWO_BLOCK_B, pi=(0.5, 0.5), sizes=(5, 5))  # both
    with pytest.raises(ValidationError):
        SbmSpec(n=10, K=2, B=TWO_BLOCK_B, sizes=(4, 4))  # does not sum to n


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def test_edge_list_round_trip(tmp_path):
    g = Graph.from_edges(6, [(0, 1), (2, 3), (0, 5)])
    path = tmp_path / "graph.txt"
    save_edge_list(g, path)
    loaded = load_edge_list(path)
    assert loaded.n == 6  # isolated vertex 4 survives via the header
    assert np.array_equal(loaded.adjacency, g.adjacency)


def test_edge_list_parse_error_carries_line_number(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# vertices: 4\n0 1\n2 banana\n")
    with pytest.raises(ParseError, match=r":3"):
        load_edge_list(path)


def test_edge_list_vertex_out_of_range(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1\n0 9\n")
    with pytest.raises((ParseError, ValidationError)):
        load_edge_list(path, n=4)


def test_memberships_round_trip(tmp_path):
    labels = np.array([0, 0, 1, 2, 1])
    path = tmp_path / "labels.txt"
    save_memberships(labels, path)
    assert np.array_equal(load_memberships(path), labels)
