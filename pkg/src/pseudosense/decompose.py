"""Decompose the sense-difference matrix into low-rank + Gaussian + sparse.

Three solvers share one result type:

pca
    Plain PCA via SVD of the column-centered matrix; the sparse term is
    identically zero.

exrpca_iterative
    Alternates rank-d PCA with a three-sigma outlier sweep: residual
    entries outside (-3*sigma, 3*sigma) of the current Gaussian estimate
    are moved into the sparse term and subtracted from the working
    matrix, until a sweep finds nothing.

exrpca_convex
    Inexact augmented-Lagrangian solver for
        min ||L||_* + lambda1 ||E||_F^2 + lambda2 ||S||_1
        s.t. M = L + E + S
    with blockwise closed-form updates (singular-value thresholding for
    L, scaling for E, soft thresholding for S), dual ascent on Y, and a
    growing penalty mu.  Rank is not a parameter here; the effective rank
    is read off the converged L.

All solvers are deterministic for a fixed input and configuration.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, asdict
from typing import Optional, Union

import numpy as np

from . import _kernels
from .diffmatrix import DiffMatrix, Label, load_matrix, save_matrix
from .store import EmbeddingStore, SenseVector, load_embeddings, write_embeddings

MatrixLike = Union[DiffMatrix, np.ndarray]

# singular values of a converged L below this fraction of the largest are
# treated as numerically zero when counting effective rank
RANK_CUTOFF = 1e-8


class SolverDivergence(RuntimeError):
    """A solver produced non-finite intermediates (bad lambda scaling)."""


@dataclass
class SolverConfig:
    """Knobs shared by all decomposition solvers.

    lambda1/lambda2 default to 1/sqrt(max(D, N)) when left unset.
    """

    target_rank: int = 3
    lambda1: Optional[float] = None
    lambda2: Optional[float] = None
    max_iterations: int = 100
    residual_tolerance: float = 1e-7
    rho: float = 6.0
    epsilon_mu: float = 1e-3
    seed: int = 0

    def validate(self, d: int, n: int) -> None:
        if not 1 <= self.target_rank <= min(d, n):
            raise ValueError(
                f"target_rank {self.target_rank} out of range for a {d}x{n} matrix"
            )
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.residual_tolerance <= 0 or self.epsilon_mu <= 0:
            raise ValueError("tolerances must be positive")
        if self.rho <= 1:
            raise ValueError("rho must be > 1")
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")

    def resolved_lambdas(self, d: int, n: int) -> tuple[float, float]:
        lam2 = self.lambda2 if self.lambda2 is not None else 1.0 / np.sqrt(max(d, n))
        lam1 = self.lambda1 if self.lambda1 is not None else lam2
        return lam1, lam2


@dataclass
class Decomposition:
    """Additive split M = low_rank + gaussian + sparse, plus its basis.

    components holds the ordered orthonormal principal directions as the
    columns of a (D, k) array; their sign is fixed so each vector's
    largest-magnitude coordinate is positive.
    """

    low_rank: np.ndarray
    gaussian: np.ndarray
    sparse: np.ndarray
    components: np.ndarray
    singular_values: np.ndarray
    explained_variance_ratio: np.ndarray
    method: str
    iterations_used: int
    final_residual: float

    @property
    def num_components(self) -> int:
        return self.components.shape[1]


def soft_threshold(x: np.ndarray, a: float) -> np.ndarray:
    """Elementwise shrinkage toward zero: sgn(x) * max(|x| - a, 0)."""
    if a < 0:
        raise ValueError(f"threshold must be non-negative, got {a}")
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    return _kernels.soft_threshold_values(x, float(a))


def singular_value_threshold(x: np.ndarray, a: float) -> np.ndarray:
    """Shrink all singular values of x by a, truncating at zero."""
    if a < 0:
        raise ValueError(f"threshold must be non-negative, got {a}")
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("input has non-finite entries; SVD would fail")
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    s = np.maximum(s - a, 0.0)
    return (u * s) @ vt


def estimate_sigma(e: np.ndarray) -> float:
    """Gaussian scale of a residual matrix: RMS of all entries (zero mean)."""
    e = np.atleast_2d(np.asarray(e, dtype=np.float64))
    if e.size == 0:
        raise ValueError("cannot estimate sigma of an empty matrix")
    return _kernels.rms(e)


def three_sigma_mask(e: np.ndarray) -> np.ndarray:
    """Entries strictly beyond 3x the RMS scale of the residual.

    On pure Gaussian input this marks about 0.27% of entries; a much
    larger fraction signals heavy-tailed structure worth sweeping into
    the sparse term.
    """
    e = np.atleast_2d(np.asarray(e, dtype=np.float64))
    return np.abs(e) > 3.0 * estimate_sigma(e)


def _as_data(m: MatrixLike) -> np.ndarray:
    data = m.data if isinstance(m, DiffMatrix) else np.asarray(m, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {data.shape}")
    if data.shape[1] == 0:
        raise ValueError("matrix has no columns")
    if not np.all(np.isfinite(data)):
        raise ValueError("matrix has non-finite entries")
    return data


def _fix_signs(u: np.ndarray, vt: Optional[np.ndarray] = None):
    """Make each column of u have a positive largest-magnitude entry.

    When vt is given its rows are flipped along, so u @ diag(s) @ vt is
    unchanged.
    """
    u = u.copy()
    vt = None if vt is None else vt.copy()
    for j in range(u.shape[1]):
        i = int(np.argmax(np.abs(u[:, j])))
        if u[i, j] < 0:
            u[:, j] = -u[:, j]
            if vt is not None:
                vt[j, :] = -vt[j, :]
    return u if vt is None else (u, vt)


def _centered_svd(data: np.ndarray):
    mean = data.mean(axis=1, keepdims=True)
    u, s, vt = np.linalg.svd(data - mean, full_matrices=False)
    return mean, u, s, vt


def _variance_ratios(s: np.ndarray) -> np.ndarray:
    total = float(np.sum(s**2))
    if total == 0.0:
        return np.zeros_like(s)
    return s**2 / total


def pca_decompose(m: MatrixLike, d: int) -> Decomposition:
    """Rank-d PCA split M = L + E with E the residual, S = 0.

    Components are the top-d left singular vectors of the column-centered
    data; explained variance ratios are sigma_i^2 over the total.
    """
    data = _as_data(m)
    if not 1 <= d <= min(data.shape):
        raise ValueError(f"d={d} out of range for a {data.shape} matrix")
    mean, u, s, vt = _centered_svd(data)
    u, vt = _fix_signs(u, vt)
    low = (u[:, :d] * s[:d]) @ vt[:d] + mean
    gauss = data - low
    norm_m = np.linalg.norm(data)
    resid = 0.0 if norm_m == 0 else float(np.linalg.norm(data - low - gauss) / norm_m)
    return Decomposition(
        low_rank=low,
        gaussian=gauss,
        sparse=np.zeros_like(data),
        components=u[:, :d],
        singular_values=s[:d].copy(),
        explained_variance_ratio=_variance_ratios(s)[:d],
        method="pca",
        iterations_used=1,
        final_residual=resid,
    )


def exrpca_iterative(m: MatrixLike, cfg: SolverConfig) -> Decomposition:
    """Rank-constrained Ex-RPCA via repeated PCA + three-sigma sweeps.

    Each pass decomposes the working matrix at rank d, masks residual
    entries with |e| > 3*sigma, accumulates them into S and removes them
    from the working matrix.  Stops when a pass masks nothing; hitting
    max_iterations is not an error and is visible via iterations_used.
    """
    data = _as_data(m)
    d = cfg.target_rank
    cfg.validate(*data.shape)
    work = data.copy()
    sparse = np.zeros_like(data)
    iterations = 0
    while True:
        iterations += 1
        mean, u, s, vt = _centered_svd(work)
        u, vt = _fix_signs(u, vt)
        low = (u[:, :d] * s[:d]) @ vt[:d] + mean
        gauss = work - low
        sigma = _kernels.rms(gauss)
        swept, nnz = _kernels.threshold_split(gauss, 3.0 * sigma)
        if nnz == 0 or iterations >= cfg.max_iterations:
            break
        sparse += swept
        work = work - swept
    norm_m = np.linalg.norm(data)
    recon = low + gauss + sparse
    resid = 0.0 if norm_m == 0 else float(np.linalg.norm(data - recon) / norm_m)
    return Decomposition(
        low_rank=low,
        gaussian=gauss,
        sparse=sparse,
        components=u[:, :d],
        singular_values=s[:d].copy(),
        explained_variance_ratio=_variance_ratios(s)[:d],
        method="exrpca_iterative",
        iterations_used=iterations,
        final_residual=resid,
    )


def exrpca_convex(m: MatrixLike, cfg: SolverConfig) -> Decomposition:
    """Ex-RPCA via inexact augmented Lagrange multipliers.

    Updates per iteration, with R_a soft thresholding and D_a singular
    value thresholding:

        L <- D_{1/mu}(M - E - S + Y/mu)
        E <- mu/(mu + 2*lambda1) * (M - L - S + Y/mu)
        S <- R_{lambda2/mu}(M - L - E + Y/mu)
        Y <- Y + mu * (M - L - E - S)
        mu <- rho * mu   when sqrt(mu) * ||dE + dS||_F / ||M||_F < epsilon

    mu starts at 0.5 / ||sgn(M)||_2 and Y at M / ||sgn(M)||_2.  Stops when
    the relative constraint residual drops below residual_tolerance.
    """
    data = _as_data(m)
    cfg.validate(*data.shape)
    lam1, lam2 = cfg.resolved_lambdas(*data.shape)
    norm_m = float(np.linalg.norm(data))
    if norm_m == 0.0:
        zero = np.zeros_like(data)
        return Decomposition(
            low_rank=zero,
            gaussian=zero.copy(),
            sparse=zero.copy(),
            components=np.zeros((data.shape[0], 0)),
            singular_values=np.zeros(0),
            explained_variance_ratio=np.zeros(0),
            method="exrpca_convex",
            iterations_used=1,
            final_residual=0.0,
        )
    sgn_norm = float(np.linalg.norm(np.sign(data), 2))
    mu = 0.5 / sgn_norm
    dual = data / sgn_norm
    low = np.zeros_like(data)
    gauss = np.zeros_like(data)
    sparse = np.zeros_like(data)
    resid = np.inf
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        prev_es = gauss + sparse
        low = singular_value_threshold(data - gauss - sparse + dual / mu, 1.0 / mu)
        gauss = mu / (mu + 2.0 * lam1) * (data - low - sparse + dual / mu)
        sparse = _kernels.soft_threshold_values(
            data - low - gauss + dual / mu, lam2 / mu
        )
        residual_matrix = data - low - gauss - sparse
        if not np.all(np.isfinite(residual_matrix)):
            raise SolverDivergence(
                f"non-finite intermediate at iteration {iterations}; "
                f"check lambda1/lambda2 scaling"
            )
        dual = dual + mu * residual_matrix
        delta = float(np.linalg.norm(gauss + sparse - prev_es))
        if np.sqrt(mu) * delta / norm_m < cfg.epsilon_mu:
            mu *= cfg.rho
        resid = float(np.linalg.norm(residual_matrix) / norm_m)
        if resid < cfg.residual_tolerance:
            break
    u, s, _ = np.linalg.svd(low, full_matrices=False)
    keep = s > RANK_CUTOFF * s[0] if s.size and s[0] > 0 else np.zeros_like(s, bool)
    u = _fix_signs(u[:, keep])
    return Decomposition(
        low_rank=low,
        gaussian=gauss,
        sparse=sparse,
        components=u,
        singular_values=s[keep].copy(),
        explained_variance_ratio=_variance_ratios(s)[keep],
        method="exrpca_convex",
        iterations_used=iterations,
        final_residual=resid,
    )


def components_of(dec: Decomposition, k: int) -> list[np.ndarray]:
    """First k principal directions as D-vectors, orthonormal, sign-fixed."""
    if not 1 <= k <= dec.num_components:
        raise ValueError(
            f"k={k} out of range; decomposition has {dec.num_components} components"
        )
    return [dec.components[:, i].copy() for i in range(k)]


# -- on-disk layout -----------------------------------------------------------
#
# A decomposition directory contains:
#     meta.json        method, config, iterations_used, final_residual,
#                      singular_values, explained_variance_ratio
#     components.txt   canonical embedding file, word "component",
#                      sense ids 0..k-1
#     L.bin E.bin S.bin   binary matrix dumps (labels when available)

_PARTS = {"L.bin": "low_rank", "E.bin": "gaussian", "S.bin": "sparse"}


def save_decomposition(
    dec: Decomposition,
    out_dir: str,
    labels: Optional[list[Label]] = None,
    config: Optional[SolverConfig] = None,
) -> None:
    os.makedirs(out_dir, exist_ok=True)
    k = dec.num_components
    comps = [
        SenseVector(
            word="component",
            sense_id=i,
            original_id=i,
            vector=np.ascontiguousarray(dec.components[:, i]),
        )
        for i in range(k)
    ]
    comp_store = EmbeddingStore(dec.components.shape[0], comps)
    write_embeddings(comp_store, os.path.join(out_dir, "components.txt"))
    for fname, attr in _PARTS.items():
        save_matrix(getattr(dec, attr), os.path.join(out_dir, fname), labels)
    meta = {
        "method": dec.method,
        "iterations_used": dec.iterations_used,
        "final_residual": dec.final_residual,
        "singular_values": [float(v) for v in dec.singular_values],
        "explained_variance_ratio": [float(v) for v in dec.explained_variance_ratio],
        "config": None if config is None else asdict(config),
    }
    with open(os.path.join(out_dir, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_decomposition(out_dir: str) -> Decomposition:
    with open(os.path.join(out_dir, "meta.json"), encoding="utf-8") as fh:
        meta = json.load(fh)
    comp_store = load_embeddings(os.path.join(out_dir, "components.txt"))
    k = len(comp_store)
    dim = comp_store.dimension
    components = np.zeros((dim, k))
    for i in range(k):
        components[:, i] = comp_store.get_sense("component", i).vector
    parts = {}
    for fname, attr in _PARTS.items():
        parts[attr], _ = load_matrix(os.path.join(out_dir, fname))
    return Decomposition(
        low_rank=parts["low_rank"],
        gaussian=parts["gaussian"],
        sparse=parts["sparse"],
        components=components,
        singular_values=np.array(meta["singular_values"]),
        explained_variance_ratio=np.array(meta["explained_variance_ratio"]),
        method=meta["method"],
        iterations_used=meta["iterations_used"],
        final_residual=meta["final_residual"],
    )
