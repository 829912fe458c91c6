"""Diagnostic analyses over decompositions and stores.

Covers the three qualitative views: which sense pairs align with each
principal direction, how much variance each direction explains, and the
sparse-noise column norm that flags real (as opposed to pseudo) multi
senses, together with nearest-neighbor listings.

Because the difference matrix carries both orientations of every pair,
pair rankings report only the orientation whose cosine is positive.
Ties are broken lexicographically on (word, sense_a, sense_b) everywhere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .decompose import Decomposition
from .diffmatrix import DiffMatrix, Label
from .store import EmbeddingStore

log = logging.getLogger(__name__)

UNIT_TOL = 1e-6


@dataclass
class ComponentReport:
    component_index: int
    top_pairs: list[tuple[Label, float]]
    explained_variance_ratio: float
    avg_cos_top: float
    annotation: str = ""  # free text; common-feature labeling needs a human


@dataclass
class NoiseIndicatorReport:
    pair: Label
    s_norm: float
    neighbors_a: list[tuple[str, int, float]] = field(default_factory=list)
    neighbors_b: list[tuple[str, int, float]] = field(default_factory=list)


def rank_pairs_by_component(
    m: DiffMatrix, component: np.ndarray, top_n: int
) -> list[tuple[Label, float]]:
    """Sense pairs whose difference best aligns with a principal direction.

    Returns the top_n (label, cosine) entries sorted by cosine descending.
    Only the positively-oriented twin of each pair appears; zero-norm
    columns are skipped (counted in a warning).
    """
    component = np.asarray(component, dtype=np.float64).ravel()
    if abs(np.linalg.norm(component) - 1.0) > UNIT_TOL:
        raise ValueError("component must have unit norm")
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    cosines = _kernels.column_cosines(m.data, component)
    skipped = int(np.isnan(cosines).sum())
    if skipped:
        log.warning("skipped %d zero-norm columns while ranking pairs", skipped)
    picked = []
    for j, label in enumerate(m.labels):
        c = cosines[j]
        if np.isnan(c):
            continue
        word, a, b = label
        # keep one orientation per pair: positive cosine, or the
        # lexicographically smaller label when the cosine is exactly zero
        if c > 0 or (c == 0 and a < b):
            picked.append((label, float(c)))
    picked.sort(key=lambda it: (-it[1], it[0]))
    return picked[:top_n]


def sparse_norm_for_pair(dec: Decomposition, m: DiffMatrix, pair: Label) -> float:
    """2-norm of the pair's column in the sparse noise term."""
    j = m.column_index(pair)
    return float(np.linalg.norm(dec.sparse[:, j]))


def nearest_neighbors(
    store: EmbeddingStore, word: str, sense_id: int, top_n: int
) -> list[tuple[str, int, float]]:
    """Closest senses of other words by cosine similarity.

    All senses of the query word itself are excluded.  Returns
    (word, original sense id, cosine) sorted by cosine descending with
    lexicographic tie-break.  Zero-norm candidates are skipped.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    query = store.get_sense(word, sense_id).vector
    qnorm = np.linalg.norm(query)
    if qnorm == 0:
        raise ValueError(f"query sense {word}#{sense_id} has a zero vector")
    mat, rows = store.sense_matrix()
    dots = mat @ query
    norms = np.linalg.norm(mat, axis=1) * qnorm
    scored = []
    for i, (w, dense_id) in enumerate(rows):
        if w == word:
            continue
        if norms[i] == 0:
            continue
        cos = float(dots[i] / norms[i])
        scored.append((w, store.get_sense(w, dense_id).original_id, cos))
    scored.sort(key=lambda it: (-it[2], it[0], it[1]))
    return scored[:top_n]


def explained_variance_report(
    dec: Decomposition,
    m: DiffMatrix | None = None,
    top_n: int = 5,
) -> list[ComponentReport]:
    """Per-component variance ratios, plus top pairs when a matrix is given.

    Without the source matrix the pair columns are left empty and
    avg_cos_top is NaN; the variance ratios alone never need it.
    """
    if dec.num_components < 1:
        raise ValueError("decomposition has no components")
    reports = []
    for i in range(dec.num_components):
        pairs: list[tuple[Label, float]] = []
        avg = float("nan")
        if m is not None:
            pairs = rank_pairs_by_component(m, dec.components[:, i], top_n)
            if pairs:
                avg = float(np.mean([c for _, c in pairs]))
        reports.append(
            ComponentReport(
                component_index=i,
                top_pairs=pairs,
                explained_variance_ratio=float(dec.explained_variance_ratio[i]),
                avg_cos_top=avg,
            )
        )
    return reports


# -- rendering ----------------------------------------------------------------

def _label_str(label: Label) -> str:
    word, a, b = label
    return f"{word}:{a}:{b}"


def component_reports_tsv(reports: list[ComponentReport]) -> str:
    """Tab-separated table: component, explained variance x100, avg cos, pairs."""
    lines = ["component\trho_var_x100\tavg_cos\ttop_pairs"]
    for r in reports:
        pairs = ", ".join(f"{_label_str(l)}={c:.6f}" for l, c in r.top_pairs)
        lines.append(
            f"{r.component_index}\t{100.0 * r.explained_variance_ratio:.4f}"
            f"\t{r.avg_cos_top:.6f}\t{pairs}"
        )
    return "\n".join(lines) + "\n"


def component_reports_json(reports: list[ComponentReport]) -> list[dict]:
    return [
        {
            "component_index": r.component_index,
            "explained_variance_ratio": r.explained_variance_ratio,
            "avg_cos_top": r.avg_cos_top,
            "annotation": r.annotation,
            "top_pairs": [
                {"word": l[0], "sense_a": l[1], "sense_b": l[2], "cosine": c}
                for l, c in r.top_pairs
            ],
        }
        for r in reports
    ]


def noise_reports_tsv(reports: list[NoiseIndicatorReport]) -> str:
    lines = ["pair\ts_norm\tneighbors_a\tneighbors_b"]
    for r in reports:
        na = ", ".join(f"{w}#{s}={c:.6f}" for w, s, c in r.neighbors_a)
        nb = ", ".join(f"{w}#{s}={c:.6f}" for w, s, c in r.neighbors_b)
        lines.append(f"{_label_str(r.pair)}\t{r.s_norm:.6f}\t{na}\t{nb}")
    return "\n".join(lines) + "\n"


def noise_reports_json(reports: list[NoiseIndicatorReport]) -> list[dict]:
    return [
        {
            "word": r.pair[0],
            "sense_a": r.pair[1],
            "sense_b": r.pair[2],
            "s_norm": r.s_norm,
            "neighbors_a": [
                {"word": w, "sense": s, "cosine": c} for w, s, c in r.neighbors_a
            ],
            "neighbors_b": [
                {"word": w, "sense": s, "cosine": c} for w, s, c in r.neighbors_b
            ],
        }
        for r in reports
    ]
