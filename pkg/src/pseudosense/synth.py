"""Synthetic planted-structure fixtures used as ground-truth oracles.

All generators draw from numpy's default PCG64 bit generator seeded
explicitly, with a fixed draw order, so instances are reproducible from
their seed (see README for the portability caveats of pinning a
generator algorithm).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .store import EmbeddingStore, SenseVector, _readonly


@dataclass(frozen=True)
class PlantedInstance:
    """A matrix built as low-rank + sparse spikes + Gaussian noise.

    true_sparse_support is a boolean (D, N) mask of the planted spike
    positions; true_subspace holds the planted orthonormal basis as the
    columns of a (D, rank) array.
    """

    matrix: np.ndarray
    true_subspace: np.ndarray
    true_sparse_support: np.ndarray
    sigma: float
    seed: int


def generate_planted(
    d_dim: int,
    n_cols: int,
    rank: int,
    sparse_density: float,
    sparse_magnitude: float,
    sigma: float,
    seed: int,
    mirror: bool = False,
) -> PlantedInstance:
    """Plant L* (random orthonormal basis times Gaussian coefficients),
    S* (iid Bernoulli support, values +-magnitude) and E* (iid Gaussian).

    With mirror=True the second half of the columns is the exact negation
    of the first half, mimicking the paired structure of a sense-wise
    difference matrix; n_cols must then be even.

    Draw order is fixed: basis, coefficients, support, spike signs, noise.
    """
    if not 1 <= rank < min(d_dim, n_cols):
        raise ValueError(f"rank {rank} out of range for {d_dim}x{n_cols}")
    if not 0.0 <= sparse_density < 1.0:
        raise ValueError(f"sparse_density must be in [0, 1), got {sparse_density}")
    if sparse_magnitude <= 0:
        raise ValueError("sparse_magnitude must be positive")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if mirror and n_cols % 2 != 0:
        raise ValueError("mirror requires an even number of columns")

    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((d_dim, rank)))
    half = n_cols // 2 if mirror else n_cols
    coeff = rng.standard_normal((rank, half))
    support = rng.random((d_dim, half)) < sparse_density
    spikes = np.zeros((d_dim, half))
    spikes[support] = sparse_magnitude * rng.choice(
        [-1.0, 1.0], size=int(support.sum())
    )
    noise = sigma * rng.standard_normal((d_dim, half))
    if mirror:
        coeff = np.hstack([coeff, -coeff])
        support = np.hstack([support, support])
        spikes = np.hstack([spikes, -spikes])
        noise = np.hstack([noise, -noise])
    matrix = basis @ coeff + spikes + noise
    return PlantedInstance(
        matrix=_readonly(matrix),
        true_subspace=_readonly(basis),
        true_sparse_support=support,
        sigma=sigma,
        seed=seed,
    )


def generate_toy_store(
    num_words: int,
    senses_per_word: Union[int, Sequence[int]],
    d_dim: int,
    pseudo_direction: Optional[np.ndarray] = None,
    seed: int = 0,
    noise_sigma: float = 0.0,
    offset_scale: float = 1.0,
    with_cluster_centers: bool = False,
) -> EmbeddingStore:
    """Toy embedding store with a known structure.

    Each word gets a unit base vector; its senses are the base plus
    per-sense offsets.  When pseudo_direction is given, every base is
    drawn orthogonal to it and every sense offset is a random multiple of
    that direction (scaled by offset_scale) plus Gaussian noise of scale
    noise_sigma, so all within-word sense pairs are planted pseudo
    senses whose differences lie on the planted direction.

    senses_per_word may be a single count or a per-word list (cycled
    when shorter than num_words).  Words are named w000, w001, ...
    """
    if num_words < 1 or d_dim < 2:
        raise ValueError("need at least one word and dimension >= 2")
    if isinstance(senses_per_word, int):
        counts = [senses_per_word] * num_words
    else:
        if not senses_per_word:
            raise ValueError("senses_per_word list is empty")
        counts = [senses_per_word[i % len(senses_per_word)] for i in range(num_words)]
    if any(c < 1 for c in counts):
        raise ValueError("every word needs at least one sense")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")

    direction = None
    if pseudo_direction is not None:
        direction = np.asarray(pseudo_direction, dtype=np.float64).ravel()
        if direction.shape != (d_dim,):
            raise ValueError("pseudo_direction has the wrong dimension")
        norm = np.linalg.norm(direction)
        if norm == 0:
            raise ValueError("pseudo_direction is the zero vector")
        direction = direction / norm

    rng = np.random.default_rng(seed)
    senses: list[SenseVector] = []
    for w in range(num_words):
        word = f"w{w:03d}"
        base = rng.standard_normal(d_dim)
        if direction is not None:
            base = base - (base @ direction) * direction
        base = base / np.linalg.norm(base)
        for s in range(counts[w]):
            if direction is not None:
                offset = (offset_scale * rng.standard_normal()) * direction
            else:
                offset = offset_scale * rng.standard_normal(d_dim)
            vec = base + offset
            if noise_sigma > 0:
                vec = vec + noise_sigma * rng.standard_normal(d_dim)
            center = None
            if with_cluster_centers:
                center = rng.standard_normal(d_dim)
                center = center / np.linalg.norm(center)
            senses.append(
                SenseVector(
                    word=word,
                    sense_id=s,
                    original_id=s,
                    vector=_readonly(vec),
                    cluster_center=None if center is None else _readonly(center),
                )
            )
    return EmbeddingStore(d_dim, senses)
