"""Command-line interface for the nomination pipeline.

Subcommands: ``simulate`` (Monte-Carlo experiments from TOML configs),
``nominate`` (rank candidates for user-supplied edge lists), ``embed``
(adjacency spectral embedding), ``clean`` (robust K-means noise removal),
``resample-experiment`` (the synthetic resampling protocol on a real graph),
and ``check`` (block-matrix separation margins).

Exit codes: 0 success, 2 configuration error, 3 pipeline error, 4 I/O or
data-parse error.  Set ``VNREG_LOG`` (e.g. ``INFO``, ``DEBUG``) to control
logging.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import sys
from dataclasses import replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .clustering import (
    RobustKmeansConfig,
    gmm_bic,
    robust_kmeans,
    sphere_project,
)
from .errors import ConfigError, ParseError, ValidationError, VnregError
from .graph_models import (
    DiffuseNoiseSpec,
    SphereOrthantRegion,
    load_edge_list,
    load_memberships,
    sample_edge_matrix,
    Graph,
)
from .harness import (
    DEFAULT_BLOCK_MATRIX,
    bundled_config_path,
    load_experiment_config,
    run_experiment,
)
from .nomination import (
    mahalanobis_rank,
    precision_at_k,
    relabel_candidates,
    save_eval_curve,
    save_nomination_lists,
)
from .regularization import (
    TrimConfig,
    block_trim,
    check_separation,
    procrustes_align,
)
from .spectral import ase, save_embedding, select_dimension
from .svg import LineSeries, write_line_plot

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PIPELINE = 3
EXIT_IO = 4


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vnreg",
        description="Vertex nomination on contaminated graphs.",
    )
    parser.add_argument("--version", action="version", version=f"vnreg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a Monte-Carlo experiment from a config")
    p.add_argument("--config", required=True,
                   help="TOML file path or bundled config name (e.g. fig4_twostage)")
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--jobs", type=int, default=1, help="parallel replicate workers")
    p.add_argument("--out", default=None, help="output directory (overrides config)")

    p = sub.add_parser("nominate", help="rank candidate matches between two graphs")
    p.add_argument("edges_1", help="reference graph edge list")
    p.add_argument("edges_2", help="candidate graph edge list")
    p.add_argument("queries", help="file with one reference vertex id per line")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--d1", type=int, default=None, help="reference embedding dimension")
    p.add_argument("--d2", type=int, default=None, help="candidate embedding dimension")
    p.add_argument("--elbow", type=int, default=1,
                   help="scree elbow index used when a dimension is automatic")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="enable the robust pre-clean with this noise penalty")
    p.add_argument("--r-star", type=float, default=None,
                   help="cluster radius for the robust pre-clean")
    p.add_argument("--k", type=int, default=None,
                   help="cluster count for the robust pre-clean (default: BIC)")
    p.add_argument("--seeds-file", default=None,
                   help="CSV of known `ref,candidate` pairs; aligns by seeds "
                        "instead of block trimming")
    p.add_argument("--seed", type=int, default=None, help="random seed")

    p = sub.add_parser("embed", help="write a graph's spectral embedding")
    p.add_argument("edges", help="edge list path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--d1", type=int, default=None, help="embedding dimension")
    p.add_argument("--elbow", type=int, default=1, help="scree elbow index")

    p = sub.add_parser("clean", help="drop likely-noise vertices via robust K-means")
    p.add_argument("edges", help="edge list path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--d1", type=int, default=None, help="embedding dimension")
    p.add_argument("--elbow", type=int, default=1, help="scree elbow index")
    p.add_argument("--k", type=int, default=None, help="cluster count (default: BIC)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.2,
                   help="noise penalty")
    p.add_argument("--r-star", type=float, required=True, help="cluster radius")
    p.add_argument("--seed", type=int, default=None, help="random seed")

    p = sub.add_parser(
        "resample-experiment",
        help="embed a graph, resample it with added diffuse noise, clean, "
             "and score nomination precision per class",
    )
    p.add_argument("edges", help="edge list path")
    p.add_argument("labels", help="file with one integer class label per vertex")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--d1", type=int, default=None, help="embedding dimension")
    p.add_argument("--elbow", type=int, default=1, help="scree elbow index")
    p.add_argument("--m", type=int, default=500, help="diffuse noise vertices to add")
    p.add_argument("--noise-scale", type=float, default=1.0,
                   help="shrink factor applied to noise positions for feasibility")
    p.add_argument("--k", type=int, default=2, help="robust cluster count")
    p.add_argument("--lambda", dest="lam", type=float, default=0.2,
                   help="noise penalty")
    p.add_argument("--r-star", type=float, required=True, help="cluster radius")
    p.add_argument("--k-max", type=int, default=100, help="precision curve cutoff")
    p.add_argument("--seed", type=int, default=0, help="random seed")

    p = sub.add_parser("check", help="report block-matrix separation margins")
    p.add_argument("--config", default=None,
                   help="TOML with [model] block_matrix / s_plus / s_minus "
                        "(default: the bundled canonical model)")
    return parser


def main(argv=None) -> int:
    level = os.environ.get("VNREG_LOG", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(level=level)
    args = build_parser().parse_args(argv)
    handler = {
        "simulate": cmd_simulate,
        "nominate": cmd_nominate,
        "embed": cmd_embed,
        "clean": cmd_clean,
        "resample-experiment": cmd_resample_experiment,
        "check": cmd_check,
    }[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"vnreg: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"vnreg: parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"vnreg: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except VnregError as exc:
        print(f"vnreg: pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


# --------------------------------------------------------------------------
# simulate
# --------------------------------------------------------------------------


def _resolve_config_path(name: str) -> str:
    if os.path.exists(name):
        return name
    if os.sep not in name:
        return bundled_config_path(name)
    raise ConfigError(f"config file not found: {name}")


def cmd_simulate(args) -> int:
    cfg = load_experiment_config(_resolve_config_path(args.config))
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    out = args.out if args.out is not None else cfg.out_dir
    if out is None:
        raise ConfigError("an output directory is required (--out or [output] out_dir)")
    result = run_experiment(cfg, jobs=args.jobs, out_dir=out)
    report_k = min(50, cfg.k_max)
    for name, curve in sorted(result["means"].items()):
        value = float(curve.values[report_k - 1])
        print(f"{name}: mean matches in top {report_k} = {value:.1f}")
    print(f"wrote {result['out_dir']}")
    return EXIT_OK


# --------------------------------------------------------------------------
# nominate
# --------------------------------------------------------------------------


def _load_queries(path) -> list[int]:
    queries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                queries.append(int(stripped))
            except ValueError:
                raise ParseError(f"non-integer query {stripped!r}", path, lineno)
    if not queries:
        raise ParseError("no queries found", path, 1)
    return queries


def _load_seed_pairs(path) -> list[tuple[int, int]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.replace(",", " ").split()
            if len(tokens) != 2:
                raise ParseError(
                    f"expected `ref,candidate` pair, got {stripped!r}", path, lineno
                )
            try:
                pairs.append((int(tokens[0]), int(tokens[1])))
            except ValueError:
                raise ParseError(f"non-integer seed pair {stripped!r}", path, lineno)
    if not pairs:
        raise ParseError("no seed pairs found", path, 1)
    return pairs


def _stage(name: str):
    """Context manager that prefixes pipeline failures with the stage name."""

    class _Stage:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, VnregError):
                raise type(exc)(f"[{name}] {exc}") from exc
            return False

    return _Stage()


def _robust_clean(g2, emb_dim, args, rng) -> tuple[Graph, np.ndarray]:
    """Robust K-means on the embedding; returns the kept subgraph and ids."""
    emb = ase(g2, emb_dim)
    k = args.k
    if k is None:
        k = gmm_bic(emb.Xhat, k_range=(1, 9), seed=rng).K
    if args.r_star is None:
        raise ConfigError("--r-star is required when --lambda enables cleaning")
    robust = RobustKmeansConfig(K=k, lam=args.lam, r_star=args.r_star)
    model = robust_kmeans(emb.Xhat, robust, seed=rng)
    keep = np.nonzero(model.assignments != 0)[0]
    if keep.size == 0:
        raise ValidationError("robust cleaning labeled every vertex as noise")
    return g2.induced_subgraph(keep), keep


def cmd_nominate(args) -> int:
    with _stage("load"):
        g1 = load_edge_list(args.edges_1)
        g2 = load_edge_list(args.edges_2)
        queries = _load_queries(args.queries)
    rng_clean, rng_trim, rng_joint = np.random.default_rng(args.seed).spawn(3)

    with _stage("embed"):
        d1 = args.d1 if args.d1 is not None else select_dimension(g1, args.elbow)
        emb1 = ase(g1, d1)

    vertex_map = np.arange(g2.n)
    if args.lam is not None:
        with _stage("clean"):
            g2, vertex_map = _robust_clean(g2, d1, args, rng_clean)

    if args.seeds_file is not None:
        with _stage("align"):
            seed_pairs = _load_seed_pairs(args.seeds_file)
            position = {int(orig): i for i, orig in enumerate(vertex_map)}
            surviving = [
                (i, position[j]) for i, j in seed_pairs if j in position
            ]
            if not surviving:
                raise ValidationError(
                    "no seed candidates survive cleaning; cannot align"
                )
            emb2 = ase(g2, d1)  # seeded alignment needs a shared dimension
            rows_1 = emb1.Xhat[[i for i, _ in surviving]]
            rows_2 = emb2.Xhat[[j for _, j in surviving]]
            aligned_1 = procrustes_align(rows_1, rows_2, emb1.Xhat)
            points_2 = emb2.Xhat
    else:
        with _stage("trim"):
            trim = TrimConfig(
                d1=d1, d2=args.d2, elbow_index=args.elbow, seed=rng_trim
            )
            outcome = block_trim(g1, g2, trim)
            aligned_1 = outcome.aligned_embedding_1
            points_2 = outcome.embedding_2
            vertex_map = vertex_map[outcome.vertex_map]

    with _stage("rank"):
        joint = np.vstack([aligned_1, points_2])
        model = gmm_bic(joint, k_range=(1, 9), seed=rng_joint)
        lists = mahalanobis_rank(model, aligned_1, points_2, queries)
        lists = relabel_candidates(lists, vertex_map)

    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "nominations.csv")
    save_nomination_lists(lists, out_path)
    print(f"wrote {out_path} ({len(lists)} queries, {points_2.shape[0]} candidates)")
    return EXIT_OK


# --------------------------------------------------------------------------
# embed / clean
# --------------------------------------------------------------------------


def cmd_embed(args) -> int:
    g = load_edge_list(args.edges)
    d = args.d1 if args.d1 is not None else select_dimension(g, args.elbow)
    emb = ase(g, d)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "embedding.csv")
    save_embedding(emb, path)
    print(f"wrote {path} (n={g.n}, d={emb.d}, signature={emb.signature})")
    return EXIT_OK


def cmd_clean(args) -> int:
    g = load_edge_list(args.edges)
    d = args.d1 if args.d1 is not None else select_dimension(g, args.elbow)
    emb = ase(g, d)
    rng = np.random.default_rng(args.seed)
    k = args.k if args.k is not None else gmm_bic(emb.Xhat, k_range=(1, 9), seed=rng).K
    model = robust_kmeans(
        emb.Xhat, RobustKmeansConfig(K=k, lam=args.lam, r_star=args.r_star), seed=rng
    )
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "assignments.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("vertex_id,label\n")
        for v, lab in enumerate(model.assignments):
            fh.write(f"{v},{int(lab)}\n")
    dropped = int((model.assignments == 0).sum())
    print(f"wrote {path} (K={k}, dropped {dropped} of {g.n} vertices as noise)")
    return EXIT_OK


# --------------------------------------------------------------------------
# resample-experiment
# --------------------------------------------------------------------------


def _pair_centers(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Reorder ``target`` rows to best correspond with ``source`` rows.

    Tries every permutation (small K only) and keeps the one whose orthogonal
    Procrustes fit of source onto target leaves the smallest residual.
    """
    K = source.shape[0]
    if K > 6:
        raise ValidationError("center pairing supports at most 6 clusters")
    best, best_res = None, np.inf
    for perm in itertools.permutations(range(K)):
        t = target[list(perm)]
        u, _, vt = np.linalg.svd(source.T @ t)
        res = float(np.linalg.norm(source @ (u @ vt) - t))
        if res < best_res:
            best, best_res = t, res
    return best


def cmd_resample_experiment(args) -> int:
    with _stage("load"):
        g = load_edge_list(args.edges)
        labels = load_memberships(args.labels)
        if labels.size != g.n:
            raise ValidationError(
                f"{args.labels} has {labels.size} labels for {g.n} vertices"
            )
    rng_noise, rng_resample, rng_robust, rng_src, rng_joint = np.random.default_rng(
        args.seed
    ).spawn(5)

    with _stage("embed"):
        d = args.d1 if args.d1 is not None else select_dimension(g, args.elbow)
        emb = ase(g, d)

    with _stage("resample"):
        spec = DiffuseNoiseSpec(m=args.m, region=SphereOrthantRegion(d))
        noise_pos = spec.region.sample(spec.m, rng_noise) * args.noise_scale
        X = np.vstack([emb.Xhat, noise_pos])
        plus_dims, minus_dims = emb.signature
        signs = np.ones(plus_dims + minus_dims)
        signs[plus_dims:] = -1.0
        # Estimated positions carry sampling error, so a few induced
        # probabilities land a hair outside [0, 1]; the resampling protocol
        # clips them rather than rejecting the run.
        P = (X * signs) @ X.T
        overflow = float(np.max(np.abs(P - np.clip(P, 0.0, 1.0)), initial=0.0))
        if overflow > 0.0:
            logger.info("clipped resampled edge probabilities by up to %.3f", overflow)
        P = np.clip(P, 0.0, 1.0)
        np.fill_diagonal(P, 0.0)
        A2 = sample_edge_matrix(P, rng_resample)
        noise_mask = np.zeros(X.shape[0], dtype=bool)
        noise_mask[emb.Xhat.shape[0]:] = True
        g2 = Graph(A2.shape[0], A2)
        emb2 = ase(g2, d)

    with _stage("clean"):
        robust = RobustKmeansConfig(K=args.k, lam=args.lam, r_star=args.r_star)
        model2 = robust_kmeans(sphere_project(emb2.Xhat), robust, seed=rng_robust)
        keep = np.nonzero(model2.assignments != 0)[0]
        if keep.size == 0:
            raise ValidationError("robust cleaning labeled every vertex as noise")
        kept_points = emb2.Xhat[keep]
        kept_labels = model2.assignments[keep]

    with _stage("align"):
        src_model = gmm_bic(emb.Xhat, k_range=(args.k, args.k), seed=rng_src)
        target_centers = np.stack(
            [kept_points[kept_labels == c + 1].mean(axis=0) for c in range(args.k)]
        )
        ordered = _pair_centers(src_model.centers, target_centers)
        aligned_1 = procrustes_align(src_model.centers, ordered, emb.Xhat)

    with _stage("rank"):
        joint = np.vstack([aligned_1, kept_points])
        joint_model = gmm_bic(joint, k_range=(args.k, args.k), seed=rng_joint)
        lists = mahalanobis_rank(joint_model, aligned_1, kept_points, range(g.n))
        lists = relabel_candidates(lists, keep)
        # Candidates that are injected noise get a class no query carries.
        noise_class = int(labels.max()) + 1
        label_map = {i: int(c) for i, c in enumerate(labels)}
        label_map.update({g.n + j: noise_class for j in range(args.m)})
        overall = precision_at_k(lists, label_map, args.k_max)
        per_class = precision_at_k(lists, label_map, args.k_max, per_class=True)

    os.makedirs(args.out, exist_ok=True)
    save_nomination_lists(lists, os.path.join(args.out, "nominations.csv"))
    save_eval_curve(overall, os.path.join(args.out, "precision_overall.csv"))
    series = [
        LineSeries(label="overall", x=overall.k_values, y=overall.values),
        LineSeries(
            label="chance", x=overall.k_values, y=overall.chance, dashed=True
        ),
    ]
    for cls in sorted(per_class):
        curve = per_class[cls]
        save_eval_curve(curve, os.path.join(args.out, f"precision_class_{cls}.csv"))
        series.insert(
            -1, LineSeries(label=f"class {cls}", x=curve.k_values, y=curve.values)
        )
    write_line_plot(
        os.path.join(args.out, "precision.svg"),
        series,
        title="precision at k after resampling with diffuse noise",
        xlabel="k",
        ylabel="precision",
    )
    dropped_noise = int(noise_mask.sum() - np.isin(keep, np.nonzero(noise_mask)[0]).sum())
    print(
        f"wrote {args.out} (kept {keep.size} of {g2.n} vertices; "
        f"removed {dropped_noise} of {args.m} injected noise vertices)"
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# check
# --------------------------------------------------------------------------


def cmd_check(args) -> int:
    path = (
        _resolve_config_path(args.config)
        if args.config is not None
        else bundled_config_path("check_paper")
    )
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    model = data.get("model", {})
    B = np.asarray(model.get("block_matrix", DEFAULT_BLOCK_MATRIX), dtype=np.float64)
    s_plus = float(model.get("s_plus", 0.2))
    s_minus = float(model.get("s_minus", 0.2))
    flagged_any = False
    for mode in ("A1", "A2"):
        report = check_separation(B, s_plus, s_minus, mode=mode)
        margins = "  ".join(
            f"{name}={value:.6g}" for name, value in sorted(report.margins.items())
        )
        status = "ok" if report.ok else f"flagged: {', '.join(report.flagged)}"
        print(f"{mode} margins: {margins}  -> {status}")
        flagged_any = flagged_any or not report.ok
    print(f"verdict: {'FLAG' if flagged_any else 'PASS'}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
