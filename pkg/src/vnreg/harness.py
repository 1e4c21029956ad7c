"""Monte-Carlo experiment harness for the nomination pipeline.

Two scenarios are supported:

``"block"``
    A reference SBM graph paired with a block-contaminated copy whose core
    blocks are edge-correlated with the reference.  Each replicate runs the
    model-space trimming pipeline and (optionally) the degree-trimming
    baseline, producing rank-at-k curves.

``"two-stage"``
    The block scenario plus diffuse noise vertices.  Each replicate runs the
    robust-clean + trim pipeline ("post"), the seeded no-trimming comparator
    ("pre"), and a seeded variant of the trimmed pipeline ("seeded") on the
    same graphs, producing paired curves.

Replicates are seeded independently from ``(master_seed, replicate)`` so
results are identical whatever the execution order or job count.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .clustering import RobustKmeansConfig, gmm_bic
from .errors import ConfigError, TrimError, ValidationError
from .graph_models import (
    DiffuseNoiseSpec,
    Graph,
    GrdpgSpec,
    SphereOrthantRegion,
    build_contaminated_block_matrix,
    contaminate_diffuse,
    sample_correlated_edge_matrix,
    sample_edge_matrix,
)
from .nomination import (
    EvalCurve,
    mahalanobis_rank,
    nominate_with_seeds,
    rank_at_k_curve,
    relabel_candidates,
    save_eval_curve,
)
from .regularization import (
    TrimConfig,
    block_trim,
    degree_trim,
    degree_trim_baseline,
    procrustes_align,
    two_stage_clean,
)
from .spectral import ase, select_dimension
from .svg import LineSeries, write_line_plot

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_MATRIX = np.array([[0.7, 0.2], [0.2, 0.3]])

_SCENARIOS = ("block", "two-stage")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one simulation study.

    ``m`` counts block-noise vertices (split evenly over the 2K adder and
    deleter blocks) and ``diffuse_m`` counts diffuse-noise vertices.  The
    diffuse positions are drawn from the positive sphere orthant and mapped
    into the feasible signal cone by ``noise_scale`` times the stack of block
    latent rows.  ``lam``/``r_star``/``stage1_k`` parameterize the robust
    pre-clean of the two-stage scenario; ``num_seeds`` controls the seeded
    comparators.  ``None`` for ``d1``/``d2`` selects dimensions by the
    profile-likelihood elbow.
    """

    scenario: str = "block"
    replicates: int = 30
    master_seed: int = 0
    out_dir: str | None = None
    # model parameters
    block_matrix: np.ndarray = field(default_factory=lambda: DEFAULT_BLOCK_MATRIX.copy())
    core_sizes: tuple[int, ...] = (250, 250)
    m: int = 400
    rho: float = 0.7
    s_plus: float = 0.2
    s_minus: float = 0.2
    nu: float = 1.0
    diffuse_m: int = 0
    noise_scale: float = 0.45
    # pipeline parameters
    d1: int | None = 2
    d2: int | None = 6
    elbow_index: int = 1
    k_range_1: tuple[int, int] = (2, 2)
    k_range_2: tuple[int, int] = (6, 6)
    joint_k_range: tuple[int, int] = (2, 2)
    restarts: int = 20
    lam: float = 0.2
    r_star: float = 0.10
    stage1_k: int | None = None
    stage1_restarts: int = 10
    num_seeds: int = 10
    # degree-trimming baseline (block scenario only)
    include_baseline: bool = False
    grid_step: float = 5.0
    baseline_clusters: int | None = None
    # evaluation
    k_max: int = 100
    write_svg: bool = True

    def __post_init__(self):
        if self.scenario not in _SCENARIOS:
            raise ValidationError(
                f"unknown scenario {self.scenario!r}; expected one of {_SCENARIOS}"
            )
        if self.replicates < 1:
            raise ValidationError("replicates must be >= 1")
        B = np.asarray(self.block_matrix, dtype=np.float64)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValidationError("block_matrix must be square")
        if not np.allclose(B, B.T):
            raise ValidationError("block_matrix must be symmetric")
        if B.min() < 0.0 or B.max() > 1.0:
            raise ValidationError("block_matrix entries must lie in [0, 1]")
        object.__setattr__(self, "block_matrix", B)
        sizes = tuple(int(c) for c in self.core_sizes)
        if len(sizes) != B.shape[0] or any(c < 1 for c in sizes):
            raise ValidationError("core_sizes needs one positive size per block")
        object.__setattr__(self, "core_sizes", sizes)
        K = len(sizes)
        if self.m < 0 or self.m % (2 * K) != 0:
            raise ValidationError(
                f"m must be a nonnegative multiple of {2 * K} so the noise "
                "splits evenly over the adder and deleter blocks"
            )
        for name in ("rho", "s_plus", "s_minus"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1]")
        if not 0.0 < self.nu <= 1.0:
            raise ValidationError("nu must lie in (0, 1]")
        if self.diffuse_m < 0:
            raise ValidationError("diffuse_m must be >= 0")
        if self.num_seeds < 1:
            raise ValidationError("num_seeds must be >= 1")
        if self.num_seeds >= sum(sizes):
            raise ValidationError("num_seeds must leave at least one query")
        if self.k_max < 1:
            raise ValidationError("k_max must be >= 1")
        if self.lam <= 0 or self.r_star <= 0:
            raise ValidationError("lam and r_star must be positive")
        object.__setattr__(self, "k_range_1", _as_range(self.k_range_1, "k_range_1"))
        object.__setattr__(self, "k_range_2", _as_range(self.k_range_2, "k_range_2"))
        object.__setattr__(
            self, "joint_k_range", _as_range(self.joint_k_range, "joint_k_range")
        )

    @property
    def variants(self) -> tuple[str, ...]:
        """Curve names each replicate of this configuration produces."""
        if self.scenario == "two-stage":
            return ("post", "pre", "seeded")
        return ("model", "baseline") if self.include_baseline else ("model",)


def _as_range(value, name: str) -> tuple[int, int]:
    if isinstance(value, (int, np.integer)):
        value = (int(value), int(value))
    pair = tuple(int(v) for v in value)
    if len(pair) != 2 or pair[0] < 1 or pair[1] < pair[0]:
        raise ValidationError(f"{name} must be an inclusive (lo, hi) pair with lo >= 1")
    return pair


@dataclass(frozen=True)
class ScenarioSample:
    """One replicate's simulated graph pair with its ground truth.

    ``core_index[i]`` is the contaminated-graph vertex corresponding to
    reference vertex ``i``; ``noise_mask`` flags diffuse-noise vertices.
    """

    g1: Graph
    g2: Graph
    core_index: np.ndarray
    noise_mask: np.ndarray


def _noise_block_sizes(cfg: ExperimentConfig) -> tuple[int, ...]:
    """Vertex counts of the 3K contaminated blocks, core/adder/deleter per block."""
    per = cfg.m // (2 * len(cfg.core_sizes))
    out: list[int] = []
    for core in cfg.core_sizes:
        out.extend((core, per, per))
    return tuple(out)


def sample_scenario(cfg: ExperimentConfig, replicate: int) -> ScenarioSample:
    """Draw one replicate's correlated (reference, contaminated) graph pair.

    The contaminated graph stacks, per reference block, a core block plus
    adder and deleter noise blocks, then optionally ``diffuse_m`` diffuse
    vertices.  Core-vs-core edges are resampled conditionally on the
    reference graph so matched pairs correlate at ``rho`` while keeping
    their marginal probabilities.
    """

    ss = np.random.SeedSequence([int(cfg.master_seed), int(replicate)])
    rng_noise, rng_g1, rng_g2, rng_core = [np.random.default_rng(c) for c in ss.spawn(4)]
    B = cfg.block_matrix
    K = len(cfg.core_sizes)
    sizes = _noise_block_sizes(cfg)
    Bc = build_contaminated_block_matrix(B, cfg.s_plus, cfg.s_minus)
    if cfg.m == 0:
        # No block noise: the core-only rows of the contaminated model are B.
        cores_only = np.arange(0, 3 * K, 3)
        Bc = Bc[np.ix_(cores_only, cores_only)]
        sizes = cfg.core_sizes
    gspec, _ = GrdpgSpec.from_block_matrix(Bc, sizes, nu=cfg.nu)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    if cfg.diffuse_m > 0:
        block_rows = gspec.X[starts]
        spec = DiffuseNoiseSpec(
            m=cfg.diffuse_m,
            region=SphereOrthantRegion(gspec.X.shape[1]),
            rotation=cfg.noise_scale * block_rows,
        )
        full, noise_mask = contaminate_diffuse(
            gspec.X, spec, nu=1.0, seed=rng_noise, signature=gspec.signature
        )
        P2 = full.edge_probabilities()
    else:
        noise_mask = np.zeros(sum(sizes), dtype=bool)
        P2 = gspec.edge_probabilities()

    mem1 = np.repeat(np.arange(K), cfg.core_sizes)
    P1 = cfg.nu * B[mem1][:, mem1]
    A1 = sample_edge_matrix(P1, rng_g1)
    A2 = sample_edge_matrix(P2, rng_g2)
    step = 3 if cfg.m > 0 else 1
    core = np.concatenate(
        [
            np.arange(starts[step * k], starts[step * k] + cfg.core_sizes[k])
            for k in range(K)
        ]
    )
    A2[np.ix_(core, core)] = sample_correlated_edge_matrix(P1, A1, cfg.rho, rng_core)
    return ScenarioSample(
        g1=Graph(len(mem1), A1),
        g2=Graph(P2.shape[0], A2),
        core_index=core,
        noise_mask=noise_mask,
    )


def _replicate_rngs(cfg: ExperimentConfig, replicate: int) -> dict[str, np.random.Generator]:
    """Named per-operation generators, disjoint from the sampling streams."""
    ss = np.random.SeedSequence([int(cfg.master_seed), int(replicate), 1])
    names = ("seeds", "trim", "joint", "pre", "seeded", "baseline")
    return dict(zip(names, (np.random.default_rng(c) for c in ss.spawn(len(names)))))


def _trim_config(cfg: ExperimentConfig, seed) -> TrimConfig:
    return TrimConfig(
        d1=cfg.d1,
        d2=cfg.d2,
        elbow_index=cfg.elbow_index,
        k_range_1=cfg.k_range_1,
        k_range_2=cfg.k_range_2,
        restarts=cfg.restarts,
        seed=seed,
    )


def _rank_trimmed(outcome, queries, truth, cfg, seed) -> EvalCurve:
    """Joint-cluster a trim outcome's embeddings and rank the queries."""
    joint = np.vstack([outcome.aligned_embedding_1, outcome.embedding_2])
    model = gmm_bic(joint, k_range=cfg.joint_k_range, seed=seed, restarts=cfg.restarts)
    lists = mahalanobis_rank(
        model, outcome.aligned_embedding_1, outcome.embedding_2, queries
    )
    lists = relabel_candidates(lists, outcome.vertex_map)
    return rank_at_k_curve(lists, truth, cfg.k_max)


def run_block_replicate(cfg: ExperimentConfig, replicate: int) -> dict[str, EvalCurve]:
    """Model trimming (and optionally the degree baseline) on one replicate."""

    sample = sample_scenario(cfg, replicate)
    rngs = _replicate_rngs(cfg, replicate)
    n1 = sample.g1.n
    queries = list(range(n1))
    truth = {i: int(sample.core_index[i]) for i in queries}

    outcome = block_trim(sample.g1, sample.g2, _trim_config(cfg, rngs["trim"]))
    curves = {"model": _rank_trimmed(outcome, queries, truth, cfg, rngs["joint"])}

    if cfg.include_baseline:
        curves["baseline"] = _run_degree_baseline(cfg, sample, queries, truth, rngs)
    return curves


def _run_degree_baseline(cfg, sample, queries, truth, rngs) -> EvalCurve:
    """Adaptive degree trimming followed by seeded nomination."""

    d1 = cfg.d1 if cfg.d1 is not None else select_dimension(sample.g1, cfg.elbow_index)
    _, h, l = degree_trim_baseline(
        sample.g2,
        cfg.grid_step,
        d=d1,
        num_clusters=cfg.baseline_clusters,
        k_range=cfg.k_range_2,
        seed=rngs["baseline"],
    )
    trimmed, kept = degree_trim(sample.g2, h, l)
    position = {int(orig): i for i, orig in enumerate(kept)}
    survivors = [q for q in queries if int(sample.core_index[q]) in position]
    if not survivors:
        # Trimming removed every known correspondent; report a flat miss.
        k = np.arange(1, cfg.k_max + 1)
        chance = len(queries) * k / max(trimmed.n, 1)
        return EvalCurve(k, np.zeros(cfg.k_max), chance)
    chosen = rngs["seeds"].choice(
        np.asarray(survivors), size=min(cfg.num_seeds, len(survivors)), replace=False
    )
    seed_pairs = [(int(q), position[int(sample.core_index[q])]) for q in chosen]
    emb1 = ase(sample.g1, d1)
    emb_t = ase(trimmed, d1)
    lists = nominate_with_seeds(
        emb1,
        emb_t,
        seed_pairs,
        queries,
        k_range=cfg.k_range_2,
        seed=rngs["joint"],
    )
    lists = relabel_candidates(lists, kept)
    return rank_at_k_curve(lists, truth, cfg.k_max)


def run_two_stage_replicate(cfg: ExperimentConfig, replicate: int) -> dict[str, EvalCurve]:
    """Post/pre/seeded comparison on one diffuse-plus-block-noise replicate."""

    sample = sample_scenario(cfg, replicate)
    rngs = _replicate_rngs(cfg, replicate)
    n1 = sample.g1.n
    seed_queries = rngs["seeds"].choice(n1, size=cfg.num_seeds, replace=False)
    seed_set = {int(q) for q in seed_queries}
    queries = [i for i in range(n1) if i not in seed_set]
    truth = {i: int(sample.core_index[i]) for i in queries}
    seed_pairs = [(int(q), int(sample.core_index[q])) for q in sorted(seed_set)]

    robust = RobustKmeansConfig(
        K=cfg.stage1_k if cfg.stage1_k is not None else 3 * len(cfg.core_sizes),
        lam=cfg.lam,
        r_star=cfg.r_star,
        restarts=cfg.stage1_restarts,
    )
    outcome = two_stage_clean(
        sample.g1, sample.g2, robust, _trim_config(cfg, rngs["trim"])
    )
    curves = {"post": _rank_trimmed(outcome, queries, truth, cfg, rngs["joint"])}

    d1 = cfg.d1 if cfg.d1 is not None else select_dimension(sample.g1, cfg.elbow_index)
    emb1 = ase(sample.g1, d1)
    emb2 = ase(sample.g2, d1)
    pre_lists = nominate_with_seeds(
        emb1, emb2, seed_pairs, queries, k_range=cfg.k_range_2, seed=rngs["pre"]
    )
    curves["pre"] = rank_at_k_curve(pre_lists, truth, cfg.k_max)

    curves["seeded"] = _rank_seeded_trim(
        cfg, emb1, outcome, seed_pairs, queries, truth, rngs["seeded"]
    )
    return curves


def _rank_seeded_trim(cfg, emb1, outcome, seed_pairs, queries, truth, seed) -> EvalCurve:
    """The trimmed pipeline with seed-row Procrustes instead of center alignment."""

    position = {int(orig): i for i, orig in enumerate(outcome.vertex_map)}
    surviving = [(i, position[j]) for i, j in seed_pairs if j in position]
    if not surviving:
        raise TrimError("no seed correspondents survived trimming")
    rows_1 = emb1.Xhat[[i for i, _ in surviving]]
    rows_2 = outcome.embedding_2[[j for _, j in surviving]]
    aligned_1 = procrustes_align(rows_1, rows_2, emb1.Xhat)
    joint = np.vstack([aligned_1, outcome.embedding_2])
    model = gmm_bic(joint, k_range=cfg.joint_k_range, seed=seed, restarts=cfg.restarts)
    lists = mahalanobis_rank(model, aligned_1, outcome.embedding_2, queries)
    lists = relabel_candidates(lists, outcome.vertex_map)
    return rank_at_k_curve(lists, truth, cfg.k_max)


def run_replicate(cfg: ExperimentConfig, replicate: int) -> dict[str, EvalCurve]:
    """Run one replicate of whichever scenario ``cfg`` describes."""
    if cfg.scenario == "two-stage":
        return run_two_stage_replicate(cfg, replicate)
    return run_block_replicate(cfg, replicate)


def mean_curve(curves) -> EvalCurve:
    """Pointwise mean of same-grid curves (values and chance baselines)."""
    curves = list(curves)
    if not curves:
        raise ValidationError("at least one curve is required")
    k = curves[0].k_values
    for c in curves[1:]:
        if not np.array_equal(c.k_values, k):
            raise ValidationError("curves must share one k grid to be averaged")
    values = np.mean([c.values for c in curves], axis=0)
    chance = np.mean([c.chance for c in curves], axis=0)
    return EvalCurve(k, values, chance)


def difference_curve(a: EvalCurve, b: EvalCurve) -> tuple[np.ndarray, np.ndarray]:
    """``a - b`` pointwise, returned as (k_values, differences)."""
    if not np.array_equal(a.k_values, b.k_values):
        raise ValidationError("curves must share one k grid to be differenced")
    return a.k_values.copy(), a.values - b.values


_DIFF_PAIRS = {
    "block": (("model", "baseline", "diff_model_minus_baseline"),),
    "two-stage": (
        ("post", "pre", "diff_post_minus_pre"),
        ("post", "seeded", "diff_seedless_minus_seeded"),
    ),
}

_SERIES_COLORS = {
    "model": "#1f77b4",
    "baseline": "#d62728",
    "post": "#1f77b4",
    "pre": "#d62728",
    "seeded": "#2ca02c",
}


def _write_difference_csv(path, k_values, differences) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("k,difference\n")
        for k, d in zip(k_values, differences):
            fh.write(f"{int(k)},{float(d)!r}\n")


def _worker(args) -> dict[str, EvalCurve]:
    cfg, replicate = args
    return run_replicate(cfg, replicate)


def run_experiment(
    cfg: ExperimentConfig, jobs: int = 1, out_dir: str | None = None
) -> dict:
    """Run every replicate, write artifacts, and return the summary.

    Artifacts in the output directory: ``rep_###_<variant>.csv`` per
    replicate, ``mean_<variant>.csv``, difference CSVs between paired
    variants, one SVG of the mean curves plus one per difference, and
    ``summary.json``.  Replicates may run in parallel (``jobs``); outputs are
    merged and written single-threaded, so files are identical whatever the
    job count.
    """

    out = out_dir if out_dir is not None else cfg.out_dir
    if out is None:
        raise ValidationError("an output directory is required (out_dir)")
    if jobs < 1:
        raise ValidationError("jobs must be >= 1")
    os.makedirs(out, exist_ok=True)

    tasks = [(cfg, r) for r in range(cfg.replicates)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_rep = list(pool.map(_worker, tasks))
    else:
        per_rep = []
        for task in tasks:
            per_rep.append(_worker(task))
            logger.info("replicate %d/%d done", task[1] + 1, cfg.replicates)

    names = cfg.variants
    for r, curves in enumerate(per_rep):
        for name in names:
            save_eval_curve(curves[name], os.path.join(out, f"rep_{r:03d}_{name}.csv"))

    means = {name: mean_curve([c[name] for c in per_rep]) for name in names}
    for name, curve in means.items():
        save_eval_curve(curve, os.path.join(out, f"mean_{name}.csv"))

    differences = {}
    for a, b, stem in _DIFF_PAIRS[cfg.scenario]:
        if a in means and b in means:
            k, diff = difference_curve(means[a], means[b])
            differences[stem] = (k, diff)
            _write_difference_csv(os.path.join(out, f"{stem}.csv"), k, diff)

    if cfg.write_svg:
        series = []
        for name in names:
            series.append(
                LineSeries(
                    label=name,
                    x=means[name].k_values,
                    y=means[name].values,
                    color=_SERIES_COLORS.get(name),
                )
            )
        series.append(
            LineSeries(
                label="chance",
                x=means[names[0]].k_values,
                y=means[names[0]].chance,
                color="#7f7f7f",
                dashed=True,
            )
        )
        write_line_plot(
            os.path.join(out, "curves.svg"),
            series,
            title=f"{cfg.scenario} scenario, {cfg.replicates} replicates",
            xlabel="k",
            ylabel="queries with true match in top k",
        )
        for stem, (k, diff) in differences.items():
            write_line_plot(
                os.path.join(out, f"{stem}.svg"),
                [LineSeries(label=stem[5:].replace("_", " "), x=k, y=diff)],
                title=stem.replace("_", " "),
                xlabel="k",
                ylabel="difference in queries matched",
            )

    summary = {
        "scenario": cfg.scenario,
        "replicates": cfg.replicates,
        "master_seed": cfg.master_seed,
        "variants": {
            name: {
                "value_at_50": _value_at(means[name], 50),
                "value_at_100": _value_at(means[name], 100),
                "chance_at_50": _chance_at(means[name], 50),
                "chance_at_100": _chance_at(means[name], 100),
            }
            for name in names
        },
        "differences": {
            stem: {"at_50": _diff_at(k, diff, 50), "at_100": _diff_at(k, diff, 100)}
            for stem, (k, diff) in differences.items()
        },
    }
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"out_dir": out, "means": means, "summary": summary}


def _value_at(curve: EvalCurve, k: int) -> float | None:
    return float(curve.value_at(k)) if k <= curve.k_values[-1] else None


def _chance_at(curve: EvalCurve, k: int) -> float | None:
    if k > curve.k_values[-1]:
        return None
    return float(curve.chance[np.searchsorted(curve.k_values, k)])


def _diff_at(k_values, differences, k: int) -> float | None:
    if k > k_values[-1]:
        return None
    return float(differences[np.searchsorted(k_values, k)])


# --------------------------------------------------------------------------
# TOML configuration
# --------------------------------------------------------------------------

_TOML_TABLES = {
    "experiment": {
        "scenario": "scenario",
        "replicates": "replicates",
        "master_seed": "master_seed",
        "k_max": "k_max",
        "num_seeds": "num_seeds",
    },
    "model": {
        "block_matrix": "block_matrix",
        "core_sizes": "core_sizes",
        "m": "m",
        "rho": "rho",
        "s_plus": "s_plus",
        "s_minus": "s_minus",
        "nu": "nu",
        "diffuse_m": "diffuse_m",
        "noise_scale": "noise_scale",
    },
    "pipeline": {
        "d1": "d1",
        "d2": "d2",
        "elbow_index": "elbow_index",
        "k_range_1": "k_range_1",
        "k_range_2": "k_range_2",
        "joint_k_range": "joint_k_range",
        "restarts": "restarts",
        "lambda": "lam",
        "r_star": "r_star",
        "stage1_k": "stage1_k",
        "stage1_restarts": "stage1_restarts",
    },
    "baseline": {
        "include": "include_baseline",
        "grid_step": "grid_step",
        "num_clusters": "baseline_clusters",
    },
    "output": {
        "out_dir": "out_dir",
        "write_svg": "write_svg",
    },
}

_TUPLE_KEYS = {"core_sizes", "k_range_1", "k_range_2", "joint_k_range"}


def parse_experiment_config(data: dict, source: str = "<config>") -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from parsed TOML tables."""

    kwargs = {}
    for table_name, value in data.items():
        mapping = _TOML_TABLES.get(table_name)
        if mapping is None:
            raise ConfigError(
                f"{source}: unknown table [{table_name}]; expected one of "
                f"{sorted(_TOML_TABLES)}"
            )
        if not isinstance(value, dict):
            raise ConfigError(f"{source}: [{table_name}] must be a table")
        for key, item in value.items():
            attr = mapping.get(key)
            if attr is None:
                raise ConfigError(
                    f"{source}: unknown key {key!r} in [{table_name}]; expected one "
                    f"of {sorted(mapping)}"
                )
            if attr in _TUPLE_KEYS and isinstance(item, list):
                item = tuple(item)
            kwargs[attr] = item
    try:
        return ExperimentConfig(**kwargs)
    except (ValidationError, TypeError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_experiment_config(path) -> ExperimentConfig:
    """Parse a TOML experiment file into a validated config."""

    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return parse_experiment_config(data, source=str(path))


def bundled_config_path(name: str) -> str:
    """Absolute path of a packaged configuration file like ``fig4_twostage``."""

    filename = name if name.endswith(".toml") else f"{name}.toml"
    path = os.path.join(os.path.dirname(__file__), "configs", filename)
    if not os.path.exists(path):
        available = sorted(
            f[:-5]
            for f in os.listdir(os.path.join(os.path.dirname(__file__), "configs"))
            if f.endswith(".toml")
        )
        raise ConfigError(f"no bundled config {name!r}; available: {available}")
    return path
