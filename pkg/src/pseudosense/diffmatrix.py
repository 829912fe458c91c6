"""Sense-wise difference matrix construction and its binary dump format.

The matrix has one column per ordered pair of distinct senses of the same
word: for each word (in store load order) and each ordered pair (a, b) of
its dense sense ids in lexicographic order, the column is v_a - v_b.
Both orientations are materialized, so every column has an exact negated
twin and the column sum is exactly zero.  The total column count is
sum over words of n_w * (n_w - 1).

Binary dump layout (little-endian):
    u64 D, u64 N
    D*N float64, column-major
    u64 num_labels (0 or N), then per label:
        u32 byte length of word, word (UTF-8), u64 sense_a, u64 sense_b
Labels carry the original (pre-normalization) sense ids.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass

import numpy as np

from .store import EmbeddingStore

log = logging.getLogger(__name__)

Label = tuple[str, int, int]


@dataclass(frozen=True)
class DiffMatrix:
    """D x N matrix of sense differences with per-column pair labels."""

    data: np.ndarray
    labels: list[Label]
    source_dimension: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def column_index(self, label: Label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no column labeled {label!r}") from None


def build_diff_matrix(store: EmbeddingStore) -> DiffMatrix:
    """Enumerate all ordered same-word sense pairs and stack v_a - v_b.

    Words with a single sense contribute nothing.  A store where no word
    has two senses yields a legal N = 0 matrix (logged as a warning).
    """
    if len(store) == 0:
        raise ValueError("store is empty")
    mat, rows = store.sense_matrix()
    row_of = {key: i for i, key in enumerate(rows)}
    ia: list[int] = []
    ib: list[int] = []
    labels: list[Label] = []
    for word in store.words:
        senses = store.senses_of(word)
        n = len(senses)
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                ia.append(row_of[(word, a)])
                ib.append(row_of[(word, b)])
                labels.append(
                    (word, senses[a].original_id, senses[b].original_id)
                )
    if not labels:
        log.warning("no word has more than one sense; difference matrix is empty")
        data = np.zeros((store.dimension, 0))
    else:
        data = (mat[ia] - mat[ib]).T
    data = np.ascontiguousarray(data)
    data.flags.writeable = False
    return DiffMatrix(data=data, labels=labels, source_dimension=store.dimension)


def column_label(m: DiffMatrix, j: int) -> Label:
    """Label of column j as (word, original sense id a, original sense id b)."""
    if not 0 <= j < len(m.labels):
        raise IndexError(f"column index {j} out of range for N={len(m.labels)}")
    return m.labels[j]


def save_matrix(data: np.ndarray, path: str, labels: list[Label] | None = None) -> None:
    """Write a matrix in the binary dump format; labels are optional."""
    data = np.asarray(data, dtype=np.float64)
    d, n = data.shape
    if labels is not None and len(labels) != n:
        raise ValueError(f"got {len(labels)} labels for {n} columns")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", d, n))
        fh.write(data.ravel(order="F").astype("<f8").tobytes())
        if labels is None:
            fh.write(struct.pack("<Q", 0))
        else:
            fh.write(struct.pack("<Q", len(labels)))
            for word, a, b in labels:
                enc = word.encode("utf-8")
                fh.write(struct.pack("<I", len(enc)))
                fh.write(enc)
                fh.write(struct.pack("<QQ", a, b))


def load_matrix(path: str) -> tuple[np.ndarray, list[Label] | None]:
    """Read a binary matrix dump; returns (data, labels or None)."""
    with open(path, "rb") as fh:
        d, n = struct.unpack("<QQ", fh.read(16))
        body = fh.read(8 * d * n)
        if len(body) != 8 * d * n:
            raise ValueError(f"{path}: truncated matrix body")
        data = np.frombuffer(body, dtype="<f8").reshape((d, n), order="F")
        (count,) = struct.unpack("<Q", fh.read(8))
        if count == 0:
            labels = None
        elif count == n:
            labels = []
            for _ in range(count):
                (wlen,) = struct.unpack("<I", fh.read(4))
                word = fh.read(wlen).decode("utf-8")
                a, b = struct.unpack("<QQ", fh.read(16))
                labels.append((word, int(a), int(b)))
        else:
            raise ValueError(f"{path}: label count {count} does not match N={n}")
    data = np.ascontiguousarray(data)
    data.flags.writeable = False
    return data, labels


def save_diff_matrix(m: DiffMatrix, path: str) -> None:
    save_matrix(m.data, path, m.labels)


def load_diff_matrix(path: str) -> DiffMatrix:
    data, labels = load_matrix(path)
    if labels is None:
        raise ValueError(f"{path}: dump has no label table")
    return DiffMatrix(data=data, labels=labels, source_dimension=data.shape[0])
