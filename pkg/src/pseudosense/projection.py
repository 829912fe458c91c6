"""Linear map that zeroes the pseudo-sense subspace and fixes its complement.

Given orthonormal directions a_1..a_k spanning a subspace W, the unique
matrix with T a_i = 0 and T x = x for x orthogonal to W is the orthogonal
projector onto the complement, T = I - sum_i a_i a_i^T.  It is symmetric,
idempotent and non-expansive, with rank D - k.

Applying T to a store replaces every sense vector by T v.  Context-cluster
centers and global vectors are deliberately left untouched: sense
selection against sentential context happens in the original context
space, which the elimination step does not alter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .store import EmbeddingStore, SenseVector

ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class ProjectionMatrix:
    """D x D projector T together with the annihilated orthonormal basis."""

    data: np.ndarray
    basis: np.ndarray  # (D, k), columns are the annihilated directions

    @property
    def dimension(self) -> int:
        return self.data.shape[0]

    @property
    def num_annihilated(self) -> int:
        return self.basis.shape[1]


def _as_basis(components: Union[Sequence[np.ndarray], np.ndarray]) -> np.ndarray:
    if isinstance(components, np.ndarray) and components.ndim == 2:
        basis = np.array(components, dtype=np.float64)
    else:
        cols = [np.asarray(c, dtype=np.float64).ravel() for c in components]
        if not cols:
            raise ValueError("components must be nonempty")
        basis = np.column_stack(cols)
    return basis


def build_projection(
    components: Union[Sequence[np.ndarray], np.ndarray],
    reorthonormalize: bool = False,
) -> ProjectionMatrix:
    """Build T = I - sum a_i a_i^T from orthonormal directions.

    Inputs must be pairwise orthonormal within 1e-8 unless
    reorthonormalize is set, in which case a thin QR pass cleans them up
    first (useful for convex-solver components, which are orthonormal
    only to solver tolerance).  k = 0 and k >= D are rejected.
    """
    basis = _as_basis(components)
    d, k = basis.shape
    if k == 0:
        raise ValueError("refusing to build an identity projection from k=0")
    if k >= d:
        raise ValueError(f"cannot annihilate {k} directions in dimension {d}")
    if reorthonormalize:
        q, r = np.linalg.qr(basis)
        basis = q * np.sign(np.diag(r))  # keep original orientations
    gram = basis.T @ basis
    dev = float(np.max(np.abs(gram - np.eye(k))))
    if dev > ORTHO_TOL:
        raise ValueError(
            f"components are not orthonormal (Gram deviation {dev:.2e} > {ORTHO_TOL})"
        )
    t = np.eye(d) - basis @ basis.T
    t = (t + t.T) / 2.0
    return ProjectionMatrix(data=t, basis=basis)


def apply_projection(t: ProjectionMatrix, store: EmbeddingStore) -> EmbeddingStore:
    """Map every sense vector through T, leaving context vectors unchanged."""
    if store.dimension != t.dimension:
        raise ValueError(
            f"projection is {t.dimension}-dimensional, store is {store.dimension}"
        )
    projected = [
        SenseVector(
            word=sv.word,
            sense_id=sv.sense_id,
            original_id=sv.original_id,
            vector=t.data @ sv.vector,
            cluster_center=sv.cluster_center,
        )
        for sv in store.iter_senses()
    ]
    return EmbeddingStore(store.dimension, projected, store.global_vectors)


def pseudo_sense_distance(
    store_before: EmbeddingStore,
    store_after: EmbeddingStore,
    pair: tuple[str, int, int],
) -> tuple[float, float]:
    """Euclidean distance of a sense pair before and after projection.

    The pair is (word, original sense id a, original sense id b); it must
    exist in both stores.
    """
    word, a, b = pair

    def dist(store: EmbeddingStore) -> float:
        va = store.get_by_original_id(word, a).vector
        vb = store.get_by_original_id(word, b).vector
        return float(np.linalg.norm(va - vb))

    return dist(store_before), dist(store_after)
