"""Multi-sense word embedding store: loading, validation, persistence.

Two on-disk formats are supported, both UTF-8 text:

canonical
    <num_sense_vectors> <D>
    <word>#<sense_id> <f_1> ... <f_D>
    ...
    #CLUSTERS                       (optional block, same line shape,
    <word>#<sense_id> <f_1> ... <f_D>     one line per sense that has a
    ...                                   context-cluster center)
    #GLOBALS                        (optional block, one line per word
    <word> <f_1> ... <f_D>                that has a global vector)

mssg (adapter for released multi-sense skip-gram vectors)
    <num_words> <D>
    <word> <n_senses>
    <global vector: D floats>
    <sense 0 vector: D floats>
    <sense 0 cluster center: D floats>
    ... sense/center line pairs repeated per sense

Sense ids in input files may be arbitrary non-negative integers; at load
time they are remapped to a dense 0..n_w-1 range (ascending original id)
and the original id is kept for display.  Floats are written with
round-trip-exact precision, so write_embeddings followed by
load_embeddings is the identity on a store.

Words are opaque strings without whitespace; no case folding is applied.
A word may contain '#' as long as the trailing '#<int>' is the sense id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np


class EmbeddingFormatError(ValueError):
    """Raised when an embedding file violates its declared format."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SenseVector:
    """One sense of one word.

    ``sense_id`` is the dense, store-normalized id (0..n_w-1);
    ``original_id`` is the id that appeared in the input file.
    """

    word: str
    sense_id: int
    original_id: int
    vector: np.ndarray
    cluster_center: Optional[np.ndarray] = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, SenseVector):
            return NotImplemented
        if (self.word, self.sense_id, self.original_id) != (
            other.word,
            other.sense_id,
            other.original_id,
        ):
            return False
        if not np.array_equal(self.vector, other.vector):
            return False
        if (self.cluster_center is None) != (other.cluster_center is None):
            return False
        if self.cluster_center is not None and not np.array_equal(
            self.cluster_center, other.cluster_center
        ):
            return False
        return True


class EmbeddingStore:
    """Immutable, indexed collection of sense vectors of one dimension.

    The store is the single source of truth for vocabulary and vectors.
    All arrays are read-only; the store is safe for concurrent reads.
    """

    def __init__(
        self,
        dimension: int,
        senses: Iterable[SenseVector],
        global_vectors: Optional[dict[str, np.ndarray]] = None,
    ):
        if dimension <= 0:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.dimension = int(dimension)
        self._by_word: dict[str, list[SenseVector]] = {}
        for sv in senses:
            if sv.vector.shape != (self.dimension,):
                raise ValueError(
                    f"sense vector {sv.word}#{sv.original_id} has length "
                    f"{sv.vector.shape[0]}, store dimension is {self.dimension}"
                )
            if sv.cluster_center is not None and sv.cluster_center.shape != (
                self.dimension,
            ):
                raise ValueError(
                    f"cluster center {sv.word}#{sv.original_id} has wrong length"
                )
            bucket = self._by_word.setdefault(sv.word, [])
            if sv.sense_id != len(bucket):
                raise ValueError(
                    f"sense ids of {sv.word!r} are not dense: expected "
                    f"{len(bucket)}, got {sv.sense_id}"
                )
            bucket.append(sv)
        self._globals: dict[str, np.ndarray] = {}
        for word, vec in (global_vectors or {}).items():
            if word not in self._by_word:
                raise ValueError(f"global vector for unknown word {word!r}")
            vec = _readonly(np.asarray(vec, dtype=np.float64))
            if vec.shape != (self.dimension,):
                raise ValueError(f"global vector for {word!r} has wrong length")
            self._globals[word] = vec
        self._matrix_cache: Optional[np.ndarray] = None
        self._matrix_rows: Optional[list[tuple[str, int]]] = None

    # -- lookups ---------------------------------------------------------

    @property
    def words(self) -> list[str]:
        """Vocabulary in load order."""
        return list(self._by_word.keys())

    @property
    def index(self) -> dict[str, list[int]]:
        """word -> ordered dense sense ids (always 0..n_w-1)."""
        return {w: list(range(len(svs))) for w, svs in self._by_word.items()}

    def __contains__(self, word: str) -> bool:
        return word in self._by_word

    def __len__(self) -> int:
        return sum(len(svs) for svs in self._by_word.values())

    def num_senses(self, word: str) -> int:
        return len(self._senses_or_raise(word))

    def senses_of(self, word: str) -> list[SenseVector]:
        return list(self._senses_or_raise(word))

    def get_sense(self, word: str, sense_id: int) -> SenseVector:
        """Return the stored sense vector, by dense sense id."""
        senses = self._senses_or_raise(word)
        if not 0 <= sense_id < len(senses):
            raise IndexError(
                f"sense id {sense_id} out of range for {word!r} "
                f"(has {len(senses)} senses)"
            )
        return senses[sense_id]

    def get_by_original_id(self, word: str, original_id: int) -> SenseVector:
        for sv in self._senses_or_raise(word):
            if sv.original_id == original_id:
                return sv
        raise IndexError(f"{word!r} has no sense with original id {original_id}")

    def global_vector(self, word: str) -> Optional[np.ndarray]:
        """Global (context-space) vector of a word, when the source had one."""
        return self._globals.get(word)

    @property
    def global_vectors(self) -> dict[str, np.ndarray]:
        return dict(self._globals)

    def _senses_or_raise(self, word: str) -> list[SenseVector]:
        try:
            return self._by_word[word]
        except KeyError:
            raise KeyError(f"unknown word {word!r}") from None

    def iter_senses(self) -> Iterable[SenseVector]:
        for senses in self._by_word.values():
            yield from senses

    def sense_matrix(self) -> tuple[np.ndarray, list[tuple[str, int]]]:
        """All sense vectors stacked as a (num_senses, D) read-only array.

        Rows follow store order; the returned label list maps each row to
        (word, dense sense id).  Cached after first call.
        """
        if self._matrix_cache is None:
            rows = []
            labels = []
            for sv in self.iter_senses():
                rows.append(sv.vector)
                labels.append((sv.word, sv.sense_id))
            mat = (
                np.stack(rows) if rows else np.zeros((0, self.dimension))
            )
            self._matrix_cache = _readonly(mat)
            self._matrix_rows = labels
        return self._matrix_cache, list(self._matrix_rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingStore):
            return NotImplemented
        if self.dimension != other.dimension:
            return False
        if self.words != other.words:
            return False
        for w in self.words:
            if self._by_word[w] != other._by_word[w]:
                return False
        if set(self._globals) != set(other._globals):
            return False
        return all(
            np.array_equal(v, other._globals[w]) for w, v in self._globals.items()
        )


def _parse_floats(parts: list[str], dim: int, lineno: int) -> np.ndarray:
    if len(parts) != dim:
        raise EmbeddingFormatError(
            f"line {lineno}: expected {dim} floats, got {len(parts)}"
        )
    try:
        return np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise EmbeddingFormatError(f"line {lineno}: bad float ({exc})") from None


def _split_token(token: str, lineno: int) -> tuple[str, int]:
    word, sep, sid = token.rpartition("#")
    if not sep or not word:
        raise EmbeddingFormatError(
            f"line {lineno}: token {token!r} is not of the form word#sense_id"
        )
    try:
        sense_id = int(sid)
    except ValueError:
        raise EmbeddingFormatError(
            f"line {lineno}: sense id {sid!r} is not an integer"
        ) from None
    if sense_id < 0:
        raise EmbeddingFormatError(f"line {lineno}: negative sense id {sense_id}")
    return word, sense_id


def _normalize(
    raw: dict[str, dict[int, np.ndarray]],
    centers: dict[str, dict[int, np.ndarray]],
    dimension: int,
    global_vectors: Optional[dict[str, np.ndarray]] = None,
) -> EmbeddingStore:
    """Remap original sense ids to dense 0..n_w-1 (ascending original id)."""
    senses: list[SenseVector] = []
    for word, by_id in raw.items():
        for dense, orig in enumerate(sorted(by_id)):
            center = centers.get(word, {}).get(orig)
            senses.append(
                SenseVector(
                    word=word,
                    sense_id=dense,
                    original_id=orig,
                    vector=_readonly(by_id[orig]),
                    cluster_center=None if center is None else _readonly(center),
                )
            )
    return EmbeddingStore(dimension, senses, global_vectors)


def _load_canonical(path: str) -> EmbeddingStore:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise EmbeddingFormatError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 2:
        raise EmbeddingFormatError(
            f"line 1: header must be '<num_sense_vectors> <D>', got {lines[0]!r}"
        )
    try:
        declared, dim = int(header[0]), int(header[1])
    except ValueError:
        raise EmbeddingFormatError(f"line 1: non-integer header {lines[0]!r}") from None
    if declared < 0 or dim <= 0:
        raise EmbeddingFormatError(f"line 1: bad header values {lines[0]!r}")

    raw: dict[str, dict[int, np.ndarray]] = {}
    centers: dict[str, dict[int, np.ndarray]] = {}
    global_vectors: dict[str, np.ndarray] = {}
    section = "senses"
    seen = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.strip() == "#CLUSTERS":
            section = "clusters"
            continue
        if line.strip() == "#GLOBALS":
            section = "globals"
            continue
        parts = line.split()
        if section == "globals":
            word = parts[0]
            if word not in raw:
                raise EmbeddingFormatError(
                    f"line {lineno}: global vector for undeclared word {word!r}"
                )
            if word in global_vectors:
                raise EmbeddingFormatError(
                    f"line {lineno}: duplicate global vector for {word!r}"
                )
            global_vectors[word] = _parse_floats(parts[1:], dim, lineno)
            continue
        word, sid = _split_token(parts[0], lineno)
        vec = _parse_floats(parts[1:], dim, lineno)
        if section == "senses":
            if sid in raw.get(word, {}):
                raise EmbeddingFormatError(
                    f"line {lineno}: duplicate sense {word}#{sid}"
                )
            raw.setdefault(word, {})[sid] = vec
            seen += 1
        else:
            if sid not in raw.get(word, {}):
                raise EmbeddingFormatError(
                    f"line {lineno}: cluster center for undeclared sense {word}#{sid}"
                )
            if sid in centers.get(word, {}):
                raise EmbeddingFormatError(
                    f"line {lineno}: duplicate cluster center {word}#{sid}"
                )
            centers.setdefault(word, {})[sid] = vec
    if seen != declared:
        raise EmbeddingFormatError(
            f"{path}: header declares {declared} sense vectors, found {seen}"
        )
    return _normalize(raw, centers, dim, global_vectors)


def _load_mssg(path: str) -> EmbeddingStore:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise EmbeddingFormatError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 2:
        raise EmbeddingFormatError(
            f"line 1: mssg header must be '<num_words> <D>', got {lines[0]!r}"
        )
    try:
        num_words, dim = int(header[0]), int(header[1])
    except ValueError:
        raise EmbeddingFormatError(f"line 1: non-integer header {lines[0]!r}") from None

    raw: dict[str, dict[int, np.ndarray]] = {}
    centers: dict[str, dict[int, np.ndarray]] = {}
    global_vectors: dict[str, np.ndarray] = {}
    pos = 1
    n = len(lines)

    def next_line() -> tuple[str, int]:
        nonlocal pos
        while pos < n and not lines[pos].strip():
            pos += 1
        if pos >= n:
            raise EmbeddingFormatError(f"{path}: unexpected end of file")
        pos += 1
        return lines[pos - 1], pos

    for _ in range(num_words):
        rec, lineno = next_line()
        parts = rec.split()
        if len(parts) != 2:
            raise EmbeddingFormatError(
                f"line {lineno}: expected 'word n_senses', got {rec!r}"
            )
        word = parts[0]
        try:
            n_senses = int(parts[1])
        except ValueError:
            raise EmbeddingFormatError(
                f"line {lineno}: sense count {parts[1]!r} is not an integer"
            ) from None
        if n_senses < 1:
            raise EmbeddingFormatError(f"line {lineno}: {word!r} has no senses")
        if word in raw:
            raise EmbeddingFormatError(f"line {lineno}: duplicate word {word!r}")
        gline, lineno = next_line()
        global_vectors[word] = _parse_floats(gline.split(), dim, lineno)
        raw[word] = {}
        centers[word] = {}
        for sid in range(n_senses):
            vline, lineno = next_line()
            raw[word][sid] = _parse_floats(vline.split(), dim, lineno)
            cline, lineno = next_line()
            centers[word][sid] = _parse_floats(cline.split(), dim, lineno)
    while pos < n:
        if lines[pos].strip():
            raise EmbeddingFormatError(
                f"line {pos + 1}: trailing content after {num_words} word records"
            )
        pos += 1
    return _normalize(raw, centers, dim, global_vectors)


def load_embeddings(path: str, format: str = "canonical") -> EmbeddingStore:
    """Load a multi-sense embedding file.

    Parameters
    ----------
    path : str
        Input file.
    format : {"canonical", "mssg"}
        On-disk layout, see module docstring.
    """
    if format == "canonical":
        return _load_canonical(path)
    if format == "mssg":
        return _load_mssg(path)
    raise ValueError(f"unknown embedding format {format!r}")


def _fmt(x: float) -> str:
    # repr of a Python float is shortest round-trip exact
    return repr(float(x))


def write_embeddings(store: EmbeddingStore, path: str) -> None:
    """Write a store in canonical format (round-trip exact)."""
    senses = list(store.iter_senses())
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(senses)} {store.dimension}\n")
        for sv in senses:
            vals = " ".join(_fmt(v) for v in sv.vector)
            fh.write(f"{sv.word}#{sv.original_id} {vals}\n")
        clustered = [sv for sv in senses if sv.cluster_center is not None]
        if clustered:
            fh.write("#CLUSTERS\n")
            for sv in clustered:
                vals = " ".join(_fmt(v) for v in sv.cluster_center)
                fh.write(f"{sv.word}#{sv.original_id} {vals}\n")
        if store.global_vectors:
            fh.write("#GLOBALS\n")
            for word in store.words:
                vec = store.global_vector(word)
                if vec is not None:
                    vals = " ".join(_fmt(v) for v in vec)
                    fh.write(f"{word} {vals}\n")


def get_sense(store: EmbeddingStore, word: str, sense_id: int) -> SenseVector:
    """Module-level alias for :meth:`EmbeddingStore.get_sense`."""
    return store.get_sense(word, sense_id)
