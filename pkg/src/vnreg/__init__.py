"""Vertex nomination on contaminated graphs.

Random-graph samplers with controllable contamination, adjacency spectral
embedding, Gaussian-mixture and noise-robust clustering, model-space block
trimming, and Mahalanobis-distance nomination, plus an experiment harness
exposed through the ``vnreg`` command line tool.
"""

from .clustering import (
    DEFAULT_LAMBDA,
    ClusterModel,
    RobustKmeansConfig,
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
from .errors import (
    AlignmentWarning,
    ConfigError,
    ConvergenceError,
    CoverageError,
    DegenerateClusteringError,
    DegenerateRowError,
    DegenerateSpectrumError,
    DimensionError,
    FeasibilityError,
    ParseError,
    QueryError,
    RangeError,
    RankError,
    SizeError,
    TrimError,
    ValidationError,
    VnregError,
)
from .graph_models import (
    BlockContaminationSpec,
    BoxRegion,
    DiffuseNoiseSpec,
    Graph,
    GrdpgSpec,
    SbmSpec,
    SphereOrthantRegion,
    build_contaminated_block_matrix,
    contaminate_block,
    contaminate_diffuse,
    load_edge_list,
    load_memberships,
    sample_correlated_grdpg,
    sample_correlated_sbm,
    sample_grdpg,
    sample_sbm,
    save_edge_list,
    save_memberships,
)
from .harness import (
    DEFAULT_BLOCK_MATRIX,
    ExperimentConfig,
    ScenarioSample,
    bundled_config_path,
    difference_curve,
    load_experiment_config,
    parse_experiment_config,
    mean_curve,
    run_experiment,
    run_replicate,
    sample_scenario,
)
from .nomination import (
    AGGREGATE_QUERY,
    EvalCurve,
    NominationList,
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
from .regularization import (
    MatchResult,
    SeparationReport,
    TrimConfig,
    TrimOutcome,
    block_trim,
    check_separation,
    degree_trim,
    degree_trim_baseline,
    empirical_block_matrix,
    load_trim_outcome,
    match_block_matrices,
    newman_modularity,
    procrustes_align,
    save_trim_outcome,
    two_stage_clean,
)
from .spectral import (
    Embedding,
    ase,
    estimate_signature,
    load_embedding,
    profile_likelihood_elbows,
    save_embedding,
    select_dimension,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # graph models
    "Graph",
    "SbmSpec",
    "GrdpgSpec",
    "BlockContaminationSpec",
    "BoxRegion",
    "SphereOrthantRegion",
    "DiffuseNoiseSpec",
    "sample_sbm",
    "sample_correlated_sbm",
    "sample_grdpg",
    "sample_correlated_grdpg",
    "contaminate_block",
    "contaminate_diffuse",
    "build_contaminated_block_matrix",
    "save_edge_list",
    "load_edge_list",
    "save_memberships",
    "load_memberships",
    # spectral
    "Embedding",
    "ase",
    "select_dimension",
    "estimate_signature",
    "profile_likelihood_elbows",
    "save_embedding",
    "load_embedding",
    # clustering
    "DEFAULT_LAMBDA",
    "ClusterModel",
    "RobustKmeansConfig",
    "kmeans",
    "gmm_bic",
    "robust_kmeans",
    "robust_gamma",
    "cluster_radius",
    "suggest_lambda",
    "estimate_block_matrix",
    "sphere_project",
    "save_cluster_model",
    "load_cluster_model",
    # regularization
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
    # harness
    "DEFAULT_BLOCK_MATRIX",
    "ExperimentConfig",
    "ScenarioSample",
    "bundled_config_path",
    "difference_curve",
    "load_experiment_config",
    "parse_experiment_config",
    "mean_curve",
    "run_experiment",
    "run_replicate",
    "sample_scenario",
    # nomination
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
    # errors
    "VnregError",
    "ValidationError",
    "FeasibilityError",
    "RankError",
    "DegenerateSpectrumError",
    "RangeError",
    "ConvergenceError",
    "DegenerateClusteringError",
    "DegenerateRowError",
    "DimensionError",
    "SizeError",
    "TrimError",
    "QueryError",
    "CoverageError",
    "ParseError",
    "ConfigError",
    "AlignmentWarning",
]
