"""Detect and remove pseudo multi-sense directions from sense embeddings.

Pipeline: load sense vectors into an EmbeddingStore, stack all
same-word sense differences into a DiffMatrix, split it into low-rank +
Gaussian + sparse terms, then project the low-rank directions out of
every sense vector.  The sparse term flags pairs that are genuinely
distinct senses; everything else collapses.
"""

from ._kernels import active_backend, set_backend
from .analysis import (
    ComponentReport,
    NoiseIndicatorReport,
    explained_variance_report,
    nearest_neighbors,
    rank_pairs_by_component,
    sparse_norm_for_pair,
)
from .decompose import (
    Decomposition,
    SolverConfig,
    SolverDivergence,
    components_of,
    estimate_sigma,
    exrpca_convex,
    exrpca_iterative,
    load_decomposition,
    pca_decompose,
    save_decomposition,
    singular_value_threshold,
    soft_threshold,
    three_sigma_mask,
)
from .diffmatrix import (
    DiffMatrix,
    build_diff_matrix,
    column_label,
    load_diff_matrix,
    load_matrix,
    save_diff_matrix,
    save_matrix,
)
from .evaluation import (
    Context,
    EvalReport,
    SimilarityDataset,
    SimilarityPair,
    avg_sim,
    dimension_sweep,
    evaluate,
    load_scws,
    load_ws353,
    local_sim,
    spearman,
)
from .projection import (
    ProjectionMatrix,
    apply_projection,
    build_projection,
    pseudo_sense_distance,
)
from .store import (
    EmbeddingFormatError,
    EmbeddingStore,
    SenseVector,
    load_embeddings,
    write_embeddings,
)
from .synth import PlantedInstance, generate_planted, generate_toy_store

__version__ = "0.1.0"

__all__ = [
    "ComponentReport",
    "Context",
    "Decomposition",
    "DiffMatrix",
    "EmbeddingFormatError",
    "EmbeddingStore",
    "EvalReport",
    "NoiseIndicatorReport",
    "PlantedInstance",
    "ProjectionMatrix",
    "SenseVector",
    "SimilarityDataset",
    "SimilarityPair",
    "SolverConfig",
    "SolverDivergence",
    "active_backend",
    "apply_projection",
    "avg_sim",
    "build_diff_matrix",
    "build_projection",
    "column_label",
    "components_of",
    "dimension_sweep",
    "estimate_sigma",
    "evaluate",
    "explained_variance_report",
    "exrpca_convex",
    "exrpca_iterative",
    "generate_planted",
    "generate_toy_store",
    "load_decomposition",
    "load_diff_matrix",
    "load_embeddings",
    "load_matrix",
    "load_scws",
    "load_ws353",
    "local_sim",
    "nearest_neighbors",
    "pca_decompose",
    "pseudo_sense_distance",
    "rank_pairs_by_component",
    "save_decomposition",
    "save_diff_matrix",
    "save_matrix",
    "set_backend",
    "singular_value_threshold",
    "soft_threshold",
    "sparse_norm_for_pair",
    "spearman",
    "three_sigma_mask",
    "write_embeddings",
]
