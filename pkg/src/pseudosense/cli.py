"""Command-line pipeline: build-matrix, decompose, project, evaluate,
analyze, sweep, synth, and the end-to-end `pipeline` runner.

Conventions shared by all subcommands:
  - default output location is $PSEUDOSENSE_OUTPUT_DIR (else the
    current directory); explicit --out paths are used as given
  - artifacts are written to a `.partial` path first and renamed into
    place on success, so an aborted run never leaves a truncated file
    under the final name
  - report files carry full-precision floats; human-readable stdout
    rounds rho x 100 to one decimal
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import shutil
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__, _kernels, analysis
from .decompose import (
    Decomposition,
    SolverConfig,
    components_of,
    exrpca_convex,
    exrpca_iterative,
    load_decomposition,
    pca_decompose,
    save_decomposition,
)
from .diffmatrix import DiffMatrix, build_diff_matrix, load_matrix, save_matrix
from .evaluation import (
    EvalReport,
    SimilarityDataset,
    dimension_sweep,
    evaluate,
    load_scws,
    load_ws353,
)
from .projection import apply_projection, build_projection
from .store import load_embeddings, write_embeddings
from .synth import generate_planted, generate_toy_store

OUTPUT_DIR_ENV = "PSEUDOSENSE_OUTPUT_DIR"

METHODS = {
    "pca": "pca",
    "exrpca-iter": "exrpca_iterative",
    "exrpca-cvx": "exrpca_convex",
}


def _out_base() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, "") or "."

def _resolve_out(path: Optional[str], default_name: str) -> str:
    if path:
        return path
    base = _out_base()
    os.makedirs(base, exist_ok=True)
    return os.path.join(base, default_name)


# -- atomic artifact writes ---------------------------------------------------

def _partial(path: str) -> str:
    return path + ".partial"


def _clear(path: str) -> None:
    if os.path.isdir(path):
        shutil.rmtree(path)
    elif os.path.exists(path):
        os.remove(path)


def _commit(path: str) -> None:
    """Move path.partial into place, replacing any previous artifact."""
    _clear(path)
    os.replace(_partial(path), path)


def _write_text(path: str, text: str) -> None:
    tmp = _partial(path)
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    _commit(path)


def _write_json(path: str, obj) -> None:
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


# -- shared loaders -----------------------------------------------------------

def _load_store(path: str, fmt: str):
    return load_embeddings(path, format=fmt)


def _load_dataset(path: str, fmt: str) -> SimilarityDataset:
    if fmt == "ws353":
        return load_ws353(path)
    if fmt == "scws":
        return load_scws(path)
    raise ValueError(f"unknown dataset format {fmt!r}")


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        target_rank=args.rank,
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        max_iterations=args.max_iterations,
        residual_tolerance=args.residual_tolerance,
        rho=args.rho,
        epsilon_mu=args.epsilon_mu,
        seed=args.seed,
    )


def _decompose(data: np.ndarray, method: str, cfg: SolverConfig) -> Decomposition:
    if method == "pca":
        return pca_decompose(data, cfg.target_rank)
    if method == "exrpca-iter":
        return exrpca_iterative(data, cfg)
    if method == "exrpca-cvx":
        return exrpca_convex(data, cfg)
    raise ValueError(f"unknown method {method!r}; expected one of {sorted(METHODS)}")


def _projection_for(dec: Decomposition, k: int):
    # convex-solver components are orthonormal only to solver tolerance
    return build_projection(components_of(dec, k), reorthonormalize=True)


def _print_report(report: EvalReport) -> None:
    print(f"dataset: {report.dataset}")
    print(f"metric: {report.metric}")
    print(f"pairs_scored: {report.pairs_scored}")
    print(f"pairs_skipped_oov: {report.pairs_skipped_oov}")
    if report.metric == "localSim":
        print(f"pairs_context_fallback: {report.pairs_context_fallback}")
        print(f"window: {report.window}")
    if report.rank_of_L is not None:
        print(f"rank_of_L: {report.rank_of_L}")
    print(f"spearman_x100: {report.spearman_x100:.1f}")


# -- subcommand handlers ------------------------------------------------------

def cmd_build_matrix(args) -> int:
    store = _load_store(args.embeddings, args.embedding_format)
    m = build_diff_matrix(store)
    out = _resolve_out(args.out, "matrix.bin")
    tmp = _partial(out)
    save_matrix(m.data, tmp, m.labels)
    _commit(out)
    d, n = m.shape
    print(f"wrote {out}: {d}x{n} ({len(store.words)} words, {len(store)} senses)")
    return 0


def cmd_decompose(args) -> int:
    data, labels = load_matrix(args.matrix)
    cfg = _solver_config(args)
    dec = _decompose(data, args.method, cfg)
    out = _resolve_out(args.out, "decomposition")
    tmp = _partial(out)
    _clear(tmp)
    save_decomposition(dec, tmp, labels=labels, config=cfg)
    _commit(out)
    ratios = ", ".join(
        f"{100.0 * r:.1f}" for r in dec.explained_variance_ratio[:5]
    )
    print(f"wrote {out}: method={dec.method} components={dec.num_components}")
    print(f"iterations: {dec.iterations_used}  residual: {dec.final_residual:.3e}")
    print(f"explained variance x100 (top 5): {ratios}")
    return 0


def cmd_project(args) -> int:
    store = _load_store(args.embeddings, args.embedding_format)
    dec = load_decomposition(args.components)
    t = _projection_for(dec, args.k)
    projected = apply_projection(t, store)
    out = _resolve_out(args.out, "projected.txt")
    tmp = _partial(out)
    write_embeddings(projected, tmp)
    _commit(out)
    print(f"wrote {out}: annihilated {t.num_annihilated} directions")
    if args.save_projection:
        tmp = _partial(args.save_projection)
        save_matrix(t.data, tmp)
        _commit(args.save_projection)
        print(f"wrote {args.save_projection}")
    return 0


def cmd_evaluate(args) -> int:
    store = _load_store(args.embeddings, args.embedding_format)
    rank_of_l = None
    if args.components:
        if not args.k:
            raise ValueError("--components needs --k")
        dec = load_decomposition(args.components)
        store = apply_projection(_projection_for(dec, args.k), store)
        rank_of_l = args.k
    ds = _load_dataset(args.dataset, args.format)
    report = evaluate(store, ds, args.metric, window=args.window, rank_of_l=rank_of_l)
    _print_report(report)
    if args.report:
        _write_json(args.report, report.as_dict())
        print(f"wrote {args.report}")
    return 0


def _parse_pair(text: str) -> tuple[str, int, int]:
    parts = text.rsplit(":", 2)
    if len(parts) != 3:
        raise ValueError(f"expected word:sense_a:sense_b, got {text!r}")
    return parts[0], int(parts[1]), int(parts[2])


def cmd_analyze(args) -> int:
    lines: list[str] = []
    if (args.variance or args.top_pairs or args.noise) and not args.decomposition:
        raise ValueError("this analysis needs --decomposition")
    if args.noise and not (args.matrix and args.pair):
        raise ValueError("--noise needs --matrix and at least one --pair word:a:b")
    if args.neighbors and not (args.embeddings and args.word):
        raise ValueError("--neighbors needs --embeddings and --word")
    if args.variance or args.top_pairs:
        dec = load_decomposition(args.decomposition)
        m = None
        if args.matrix:
            data, labels = load_matrix(args.matrix)
            if labels is None:
                raise ValueError(f"{args.matrix} carries no pair labels")
            m = DiffMatrix(data=data, labels=labels, source_dimension=data.shape[0])
        if args.top_pairs and m is None:
            raise ValueError("--top-pairs needs --matrix with labels")
        reports = analysis.explained_variance_report(dec, m, top_n=args.top_n)
        if args.top_pairs:
            reports = [r for r in reports if r.component_index in args.component]
        lines.append(analysis.component_reports_tsv(reports).rstrip("\n"))
    elif args.noise:
        dec = load_decomposition(args.decomposition)
        data, labels = load_matrix(args.matrix)
        if labels is None:
            raise ValueError(f"{args.matrix} carries no pair labels")
        m = DiffMatrix(data=data, labels=labels, source_dimension=data.shape[0])
        store = (
            _load_store(args.embeddings, args.embedding_format)
            if args.embeddings
            else None
        )
        reports = []
        for pair in args.pair:
            label = _parse_pair(pair)
            rep = analysis.NoiseIndicatorReport(
                pair=label, s_norm=analysis.sparse_norm_for_pair(dec, m, label)
            )
            if store is not None:
                word, a, b = label
                da = store.get_by_original_id(word, a).sense_id
                db = store.get_by_original_id(word, b).sense_id
                rep.neighbors_a = analysis.nearest_neighbors(store, word, da, args.top_n)
                rep.neighbors_b = analysis.nearest_neighbors(store, word, db, args.top_n)
            reports.append(rep)
        lines.append(analysis.noise_reports_tsv(reports).rstrip("\n"))
    elif args.neighbors:
        store = _load_store(args.embeddings, args.embedding_format)
        found = analysis.nearest_neighbors(store, args.word, args.sense, args.top_n)
        lines.append("word\tsense\tcosine")
        lines.extend(f"{w}\t{s}\t{c:.6f}" for w, s, c in found)
    else:
        raise ValueError("pick one of --top-pairs / --noise / --neighbors / --variance")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_sweep(args) -> int:
    store = _load_store(args.embeddings, args.embedding_format)
    dec = load_decomposition(args.decomposition)
    ds = _load_dataset(args.dataset, args.format)
    ks = [int(k) for k in args.ks.split(",") if k.strip() != ""]
    curve = dimension_sweep(store, dec, ds, ks, metric=args.metric, window=args.window)
    lines = ["k\tspearman_x100"]
    lines.extend(f"{k}\t{rho:.6f}" for k, rho in curve)
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _parse_direction(text: str, d_dim: int, seed: int) -> Optional[np.ndarray]:
    if text == "none":
        return None
    if text == "random":
        rng = np.random.default_rng(seed + 1)
        v = rng.standard_normal(d_dim)
        return v / np.linalg.norm(v)
    axis = int(text)
    if not 0 <= axis < d_dim:
        raise ValueError(f"axis {axis} out of range for dimension {d_dim}")
    v = np.zeros(d_dim)
    v[axis] = 1.0
    return v


def cmd_synth(args) -> int:
    if args.kind == "planted":
        inst = generate_planted(
            d_dim=args.d,
            n_cols=args.n,
            rank=args.rank,
            sparse_density=args.density,
            sparse_magnitude=args.magnitude,
            sigma=args.sigma,
            seed=args.seed,
            mirror=args.mirror,
        )
        out = _resolve_out(args.out, "planted.bin")
        tmp = _partial(out)
        save_matrix(inst.matrix, tmp)
        _commit(out)
        support = int(inst.true_sparse_support.sum())
        print(f"wrote {out}: {args.d}x{args.n} rank={args.rank} support={support}")
    else:
        senses: object = args.senses
        if isinstance(senses, str) and "," in senses:
            senses = [int(s) for s in senses.split(",")]
        else:
            senses = int(senses)
        store = generate_toy_store(
            num_words=args.num_words,
            senses_per_word=senses,
            d_dim=args.dim,
            pseudo_direction=_parse_direction(args.pseudo_direction, args.dim, args.seed),
            seed=args.seed,
            noise_sigma=args.noise_sigma,
            offset_scale=args.offset_scale,
            with_cluster_centers=args.cluster_centers,
        )
        out = _resolve_out(args.out, "store.txt")
        tmp = _partial(out)
        write_embeddings(store, tmp)
        _commit(out)
        print(f"wrote {out}: {len(store.words)} words, {len(store)} senses")
    return 0


# -- end-to-end pipeline ------------------------------------------------------

@dataclass
class PipelineConfig:
    """Everything one pipeline run depends on; hashed into the manifest."""

    embeddings: str
    embedding_format: str = "canonical"
    dataset: Optional[str] = None
    dataset_format: str = "ws353"
    metric: str = "avgSim"
    window: int = 5
    method: str = "exrpca-iter"
    k: int = 1
    out_dir: str = ""
    solver: SolverConfig = field(default_factory=SolverConfig)

    def validate(self) -> None:
        if not os.path.exists(self.embeddings):
            raise FileNotFoundError(f"embeddings file not found: {self.embeddings}")
        if self.dataset is not None and not os.path.exists(self.dataset):
            raise FileNotFoundError(f"dataset file not found: {self.dataset}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.dataset_format not in ("ws353", "scws"):
            raise ValueError(f"unknown dataset format {self.dataset_format!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["solver"] = asdict(self.solver)
        return d


class StageError(RuntimeError):
    def __init__(self, stage: str, err: Exception):
        super().__init__(f"pipeline stage '{stage}' failed: {err}")
        self.stage = stage
        self.original = err


def _config_hash(cfg: PipelineConfig) -> str:
    d = cfg.as_dict()
    d.pop("out_dir")  # output location does not affect artifact content
    blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _versions() -> dict:
    try:
        import numba

        numba_version = numba.__version__
    except ImportError:
        numba_version = None
    return {
        "pseudosense": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "numba": numba_version,
    }


def run_pipeline(cfg: PipelineConfig) -> int:
    """build-matrix -> decompose -> project -> evaluate, plus a manifest.

    Returns 0 when every stage succeeded.  On failure prints a
    stage-tagged message to stderr, leaves any half-written artifact
    under a .partial name, and returns 1.
    """
    try:
        return _run_stages(cfg)
    except StageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def _run_stages(cfg: PipelineConfig) -> int:
    stage = "config"
    try:
        cfg.validate()
        out_dir = cfg.out_dir or os.path.join(_out_base(), "pipeline")
        os.makedirs(out_dir, exist_ok=True)
        path = lambda name: os.path.join(out_dir, name)
        artifacts: dict[str, str] = {}

        stage = "load-embeddings"
        store = _load_store(cfg.embeddings, cfg.embedding_format)

        stage = "build-matrix"
        m = build_diff_matrix(store)
        save_matrix(m.data, _partial(path("matrix.bin")), m.labels)
        _commit(path("matrix.bin"))
        artifacts["matrix"] = "matrix.bin"

        stage = "decompose"
        dec = _decompose(m.data, cfg.method, cfg.solver)
        _clear(_partial(path("decomposition")))
        save_decomposition(
            dec, _partial(path("decomposition")), labels=m.labels, config=cfg.solver
        )
        _commit(path("decomposition"))
        artifacts["decomposition"] = "decomposition"

        stage = "project"
        t = _projection_for(dec, cfg.k)
        save_matrix(t.data, _partial(path("projection.bin")))
        _commit(path("projection.bin"))
        artifacts["projection"] = "projection.bin"
        projected = apply_projection(t, store)
        write_embeddings(projected, _partial(path("projected.txt")))
        _commit(path("projected.txt"))
        artifacts["projected_embeddings"] = "projected.txt"

        if cfg.dataset is not None:
            stage = "evaluate"
            ds = _load_dataset(cfg.dataset, cfg.dataset_format)
            baseline = evaluate(store, ds, cfg.metric, window=cfg.window)
            after = evaluate(
                projected, ds, cfg.metric, window=cfg.window, rank_of_l=cfg.k
            )
            _write_json(
                path("eval.json"),
                {
                    "baseline": baseline.as_dict(),
                    "projected": after.as_dict(),
                    "improvement_x100": after.spearman_x100 - baseline.spearman_x100,
                },
            )
            artifacts["eval_report"] = "eval.json"
            print(f"baseline  spearman_x100: {baseline.spearman_x100:.1f}")
            print(f"projected spearman_x100: {after.spearman_x100:.1f}")

        stage = "manifest"
        _write_json(
            path("manifest.json"),
            {
                "config": cfg.as_dict(),
                "config_sha256": _config_hash(cfg),
                "versions": _versions(),
                "kernel_backend": _kernels.active_backend(),
                "artifacts": artifacts,
            },
        )
        print(f"pipeline complete: {out_dir}")
        return 0
    except StageError:
        raise
    except Exception as err:
        raise StageError(stage, err) from err


def _pipeline_config_from_args(args) -> PipelineConfig:
    """Merge precedence: built-in defaults < config file < explicit flags."""
    values: dict = {}
    solver_values: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError(f"{args.config}: expected a JSON object")
        solver_values = dict(raw.pop("solver", {}))
        unknown = set(raw) - {f for f in PipelineConfig.__dataclass_fields__}
        if unknown:
            raise ValueError(f"{args.config}: unknown keys {sorted(unknown)}")
        values = raw
    flag_map = {
        "embeddings": args.embeddings,
        "embedding_format": args.embedding_format,
        "dataset": args.dataset,
        "dataset_format": args.format,
        "metric": args.metric,
        "window": args.window,
        "method": args.method,
        "k": args.k,
        "out_dir": args.out_dir,
    }
    for key, val in flag_map.items():
        if val is not None:
            values[key] = val
    solver_flags = {
        "target_rank": args.rank,
        "lambda1": args.lambda1,
        "lambda2": args.lambda2,
        "max_iterations": args.max_iterations,
        "residual_tolerance": args.residual_tolerance,
        "rho": args.rho,
        "epsilon_mu": args.epsilon_mu,
        "seed": args.seed,
    }
    for key, val in solver_flags.items():
        if val is not None:
            solver_values[key] = val
    if "embeddings" not in values:
        raise ValueError("pipeline needs --embeddings (flag or config file)")
    values["solver"] = SolverConfig(**solver_values)
    return PipelineConfig(**values)


def cmd_pipeline(args) -> int:
    return run_pipeline(_pipeline_config_from_args(args))


# -- parser -------------------------------------------------------------------

def _add_embeddings_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--embeddings", required=required, help="embedding file")
    p.add_argument(
        "--embedding-format",
        choices=("canonical", "mssg"),
        default="canonical",
        help="input embedding layout (default: canonical)",
    )


def _add_solver_args(p: argparse.ArgumentParser, with_defaults: bool = True) -> None:
    defaults = SolverConfig()
    dv = lambda v: v if with_defaults else None
    p.add_argument("--rank", type=int, default=dv(defaults.target_rank),
                   help="target rank d (pca / iterative solver)")
    p.add_argument("--lambda1", type=float, default=None,
                   help="Gaussian term weight (default 1/sqrt(max(D,N)))")
    p.add_argument("--lambda2", type=float, default=None,
                   help="sparse term weight (default 1/sqrt(max(D,N)))")
    p.add_argument("--max-iterations", type=int,
                   default=dv(defaults.max_iterations))
    p.add_argument("--residual-tolerance", type=float,
                   default=dv(defaults.residual_tolerance))
    p.add_argument("--rho", type=float, default=dv(defaults.rho),
                   help="penalty growth factor of the convex solver")
    p.add_argument("--epsilon-mu", type=float, default=dv(defaults.epsilon_mu),
                   help="penalty growth gate of the convex solver")
    p.add_argument("--seed", type=int, default=dv(defaults.seed))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pseudosense",
        description="Detect and remove pseudo multi-sense directions "
        "from sense embeddings.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-matrix", help="build the sense-wise difference matrix")
    _add_embeddings_args(p)
    p.add_argument("--out", help="output matrix dump (default matrix.bin)")
    p.set_defaults(func=cmd_build_matrix)

    p = sub.add_parser("decompose", help="decompose a difference matrix")
    p.add_argument("--matrix", required=True, help="matrix dump from build-matrix")
    p.add_argument("--method", choices=sorted(METHODS), default="exrpca-iter")
    _add_solver_args(p)
    p.add_argument("--out", help="output directory (default decomposition)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("project", help="remove top-k directions from embeddings")
    _add_embeddings_args(p)
    p.add_argument("--components", required=True, help="decomposition directory")
    p.add_argument("--k", type=int, required=True, help="directions to annihilate")
    p.add_argument("--out", help="projected embedding file (default projected.txt)")
    p.add_argument("--save-projection", help="also dump the projection matrix here")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("evaluate", help="word-similarity evaluation")
    _add_embeddings_args(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=("ws353", "scws"), required=True)
    p.add_argument("--metric", choices=("avgsim", "localsim"), required=True)
    p.add_argument("--window", type=int, default=5,
                   help="context window for localsim (default 5)")
    p.add_argument("--components", help="project with this decomposition first")
    p.add_argument("--k", type=int, help="directions to annihilate before scoring")
    p.add_argument("--report", help="also write the report as JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("analyze", help="diagnostic reports")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--top-pairs", action="store_true",
                      help="sense pairs best aligned with chosen components")
    mode.add_argument("--noise", action="store_true",
                      help="sparse-term norms (real-sense indicator) for pairs")
    mode.add_argument("--neighbors", action="store_true",
                      help="nearest senses of one sense vector")
    mode.add_argument("--variance", action="store_true",
                      help="explained variance ratios per component")
    p.add_argument("--decomposition", help="decomposition directory")
    p.add_argument("--matrix", help="labeled matrix dump")
    p.add_argument("--component", type=int, action="append", default=None,
                   help="component index for --top-pairs (repeatable, default 0)")
    p.add_argument("--pair", action="append", default=[],
                   help="word:sense_a:sense_b for --noise (repeatable)")
    _add_embeddings_args(p, required=False)
    p.add_argument("--word", help="query word for --neighbors")
    p.add_argument("--sense", type=int, default=0,
                   help="query dense sense id for --neighbors")
    p.add_argument("--top-n", type=int, default=5)
    p.add_argument("--out", help="write the table here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="evaluation score vs directions removed")
    _add_embeddings_args(p)
    p.add_argument("--decomposition", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=("ws353", "scws"), required=True)
    p.add_argument("--metric", choices=("avgsim", "localsim"), default="avgsim")
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--ks", required=True, help="comma-separated k values, 0 = baseline")
    p.add_argument("--out", help="write the curve TSV here instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="synthetic fixtures")
    kind = p.add_subparsers(dest="kind", required=True)

    pp = kind.add_parser("planted", help="planted low-rank + sparse + noise matrix")
    pp.add_argument("--d", type=int, required=True, help="row dimension D")
    pp.add_argument("--n", type=int, required=True, help="column count N")
    pp.add_argument("--rank", type=int, required=True)
    pp.add_argument("--density", type=float, default=0.01)
    pp.add_argument("--magnitude", type=float, default=0.1)
    pp.add_argument("--sigma", type=float, default=0.01)
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--mirror", action="store_true",
                    help="second half of columns = exact negation of first half")
    pp.add_argument("--out", help="output matrix dump (default planted.bin)")
    pp.set_defaults(func=cmd_synth)

    ps = kind.add_parser("store", help="toy embedding store")
    ps.add_argument("--num-words", type=int, required=True)
    ps.add_argument("--senses", default="2",
                    help="senses per word: one int or a comma list (cycled)")
    ps.add_argument("--dim", type=int, required=True)
    ps.add_argument("--pseudo-direction", default="none",
                    help="'none', 'random', or an axis index")
    ps.add_argument("--noise-sigma", type=float, default=0.0)
    ps.add_argument("--offset-scale", type=float, default=1.0)
    ps.add_argument("--cluster-centers", action="store_true")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", help="output embedding file (default store.txt)")
    ps.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", help="matrix -> decompose -> project -> evaluate")
    p.add_argument("--config", help="JSON config file; explicit flags win")
    p.add_argument("--embeddings")
    p.add_argument("--embedding-format", choices=("canonical", "mssg"), default=None)
    p.add_argument("--dataset")
    p.add_argument("--format", choices=("ws353", "scws"), default=None)
    p.add_argument("--metric", choices=("avgsim", "localsim"), default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--method", choices=sorted(METHODS), default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out-dir", default=None)
    _add_solver_args(p, with_defaults=False)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "analyze" and args.component is None:
        args.component = [0]
    try:
        return args.func(args)
    except StageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError, TypeError, KeyError, IndexError, RuntimeError) as err:
        print(f"error [{args.command}]: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
