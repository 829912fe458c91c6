"""Word-similarity evaluation: datasets, avgSim/localSim, Spearman.

Dataset formats
---------------
Context-free (WordSim-353 style): one pair per line,

    word1,word2,score      (comma or tab separated, optional header line)

Contextual (SCWS style): tab-separated fields per line,

    id  word1  POS1  word2  POS2  context1  context2  rating  [ratings...]

where the target token inside each context is wrapped in literal
``<b>``/``</b>`` markers, either inline (``<b>bank</b>``) or spaced
(``<b> bank </b>``).  Contexts are whitespace-tokenized, case preserved.

Scoring conventions: cosine against a zero vector is 0.0; pairs with an
out-of-vocabulary word are skipped and counted; a contextual pair whose
contexts yield no usable representation falls back to avgSim (counted).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .decompose import Decomposition, components_of
from .projection import apply_projection, build_projection
from .store import EmbeddingStore

log = logging.getLogger(__name__)

WS353_EXPECTED_PAIRS = 353
SCWS_EXPECTED_PAIRS = 2003

METRICS = ("avgSim", "localSim")


class DatasetFormatError(ValueError):
    """Raised for malformed dataset lines; message carries the line number."""


@dataclass(frozen=True)
class Context:
    """Whitespace tokens of one sentence plus the target token's index."""

    tokens: tuple[str, ...]
    target_index: int

    def window_tokens(self, window: int) -> list[str]:
        """Tokens within +-window of the target, target itself excluded."""
        if window < 0:
            raise ValueError("window must be >= 0")
        lo = max(0, self.target_index - window)
        hi = min(len(self.tokens), self.target_index + window + 1)
        return [
            tok
            for i, tok in enumerate(self.tokens[lo:hi], start=lo)
            if i != self.target_index
        ]


@dataclass(frozen=True)
class SimilarityPair:
    word1: str
    word2: str
    gold_score: float
    context1: Optional[Context] = None
    context2: Optional[Context] = None


@dataclass(frozen=True)
class SimilarityDataset:
    name: str
    pairs: tuple[SimilarityPair, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def is_contextual(self) -> bool:
        return bool(self.pairs) and all(
            p.context1 is not None and p.context2 is not None for p in self.pairs
        )


@dataclass
class EvalReport:
    dataset: str
    metric: str
    spearman_x100: float
    pairs_scored: int
    pairs_skipped_oov: int
    pairs_context_fallback: int = 0
    rank_of_L: Optional[int] = None
    window: Optional[int] = None

    def as_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "metric": self.metric,
            "spearman_x100": self.spearman_x100,
            "pairs_scored": self.pairs_scored,
            "pairs_skipped_oov": self.pairs_skipped_oov,
            "pairs_context_fallback": self.pairs_context_fallback,
            "rank_of_L": self.rank_of_L,
            "window": self.window,
        }


# -- loading ------------------------------------------------------------------

def load_ws353(path: str) -> SimilarityDataset:
    """Load a context-free word1/word2/score file.

    Accepts comma or tab separators (sniffed per file) and skips one
    header line when the first line's score field does not parse.  A
    pair count other than 353 is a warning, not an error.
    """
    pairs: list[SimilarityPair] = []
    with open(path, encoding="utf-8") as fh:
        lines = [(n, ln.strip()) for n, ln in enumerate(fh, start=1) if ln.strip()]
    if not lines:
        raise DatasetFormatError(f"{path}: empty dataset")
    sep = "\t" if "\t" in lines[0][1] else ","
    for pos, (lineno, line) in enumerate(lines):
        parts = [p.strip() for p in line.split(sep)]
        if len(parts) < 3:
            raise DatasetFormatError(
                f"{path}:{lineno}: expected word1{sep}word2{sep}score, got {line!r}"
            )
        try:
            score = float(parts[2])
        except ValueError:
            if pos == 0:
                continue  # header line
            raise DatasetFormatError(
                f"{path}:{lineno}: score {parts[2]!r} is not a number"
            ) from None
        if not np.isfinite(score):
            raise DatasetFormatError(f"{path}:{lineno}: score must be finite")
        pairs.append(SimilarityPair(parts[0], parts[1], score))
    if len(pairs) != WS353_EXPECTED_PAIRS:
        log.warning(
            "%s: %d pairs (expected %d)", path, len(pairs), WS353_EXPECTED_PAIRS
        )
    return SimilarityDataset(name="ws353", pairs=tuple(pairs))


def _parse_context(raw: str, path: str, lineno: int, which: str) -> Context:
    open_m, close_m = "<b>", "</b>"
    i = raw.find(open_m)
    j = raw.find(close_m)
    if i < 0 or j < 0 or j < i:
        raise DatasetFormatError(
            f"{path}:{lineno}: {which} has no {open_m}target{close_m} marker"
        )
    before = raw[:i].split()
    target = raw[i + len(open_m):j].split()
    after = raw[j + len(close_m):].split()
    if not target:
        raise DatasetFormatError(f"{path}:{lineno}: {which} has an empty target")
    return Context(
        tokens=tuple(before + target + after), target_index=len(before)
    )


def load_scws(path: str) -> SimilarityDataset:
    """Load a contextual similarity file (see module docstring for format)."""
    pairs: list[SimilarityPair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) < 8:
                raise DatasetFormatError(
                    f"{path}:{lineno}: expected >= 8 tab-separated fields, "
                    f"got {len(parts)}"
                )
            word1, word2 = parts[1], parts[3]
            ctx1 = _parse_context(parts[5], path, lineno, "context1")
            ctx2 = _parse_context(parts[6], path, lineno, "context2")
            try:
                score = float(parts[7])
            except ValueError:
                raise DatasetFormatError(
                    f"{path}:{lineno}: rating {parts[7]!r} is not a number"
                ) from None
            if not np.isfinite(score):
                raise DatasetFormatError(f"{path}:{lineno}: rating must be finite")
            pairs.append(SimilarityPair(word1, word2, score, ctx1, ctx2))
    if len(pairs) != SCWS_EXPECTED_PAIRS:
        log.warning(
            "%s: %d pairs (expected %d)", path, len(pairs), SCWS_EXPECTED_PAIRS
        )
    return SimilarityDataset(name="scws", pairs=tuple(pairs))


# -- similarity metrics -------------------------------------------------------

def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def avg_sim(store: EmbeddingStore, w1: str, w2: str) -> float:
    """Mean cosine over all cross-word sense pairs."""
    m1 = np.stack([sv.vector for sv in store.senses_of(w1)])
    m2 = np.stack([sv.vector for sv in store.senses_of(w2)])
    n1 = np.linalg.norm(m1, axis=1)
    n2 = np.linalg.norm(m2, axis=1)
    dots = m1 @ m2.T
    denom = np.outer(n1, n2)
    cos = np.divide(dots, denom, out=np.zeros_like(dots), where=denom != 0)
    return float(cos.mean())


def _context_representation(
    store: EmbeddingStore, ctx: Context, window: int
) -> Optional[np.ndarray]:
    """Mean of the global (else first-sense) vectors of windowed tokens.

    Returns None when no token is in vocabulary or the mean is zero.
    """
    vecs = []
    for tok in ctx.window_tokens(window):
        if tok not in store:
            continue
        g = store.global_vector(tok)
        vecs.append(g if g is not None else store.get_sense(tok, 0).vector)
    if not vecs:
        return None
    rep = np.mean(vecs, axis=0)
    if not np.any(rep):
        return None
    return rep


def select_sense(store: EmbeddingStore, word: str, context_rep: np.ndarray) -> int:
    """Dense sense id whose cluster center best matches the context.

    Senses without a stored cluster center fall back to their own
    vectors.  Ties keep the lowest sense id.
    """
    best_id = 0
    best_cos = -np.inf
    for sv in store.senses_of(word):
        center = sv.cluster_center if sv.cluster_center is not None else sv.vector
        c = _cosine(context_rep, center)
        if c > best_cos:
            best_cos = c
            best_id = sv.sense_id
    return best_id


def _local_sim_impl(
    store: EmbeddingStore,
    w1: str,
    ctx1: Context,
    w2: str,
    ctx2: Context,
    window: int,
) -> tuple[float, bool]:
    """(score, fell_back): cosine of context-selected senses, else avgSim."""
    rep1 = _context_representation(store, ctx1, window)
    rep2 = _context_representation(store, ctx2, window)
    if rep1 is None or rep2 is None:
        return avg_sim(store, w1, w2), True
    s1 = select_sense(store, w1, rep1)
    s2 = select_sense(store, w2, rep2)
    return (
        _cosine(store.get_sense(w1, s1).vector, store.get_sense(w2, s2).vector),
        False,
    )


def local_sim(
    store: EmbeddingStore,
    w1: str,
    ctx1: Context,
    w2: str,
    ctx2: Context,
    window: int = 5,
) -> float:
    """Cosine of the sense per word best matching its sentential context."""
    score, _ = _local_sim_impl(store, w1, ctx1, w2, ctx2, window)
    return score


# -- rank correlation ---------------------------------------------------------

def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Rank correlation with average tied ranks; None when undefined.

    Equals the Pearson correlation of the two rank vectors.  A list
    whose ranks have zero variance (all values equal) has no defined
    correlation, hence the None marker rather than a number.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(
            f"score lists must have equal 1-d shapes, got {x.shape} and {y.shape}"
        )
    if len(x) < 2:
        raise ValueError("need at least 2 scores")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    vx = float(np.dot(dx, dx))
    vy = float(np.dot(dy, dy))
    if vx == 0.0 or vy == 0.0:
        return None
    return float(np.dot(dx, dy) / np.sqrt(vx * vy))


# -- dataset-level evaluation -------------------------------------------------

def _canonical_metric(metric: str) -> str:
    for m in METRICS:
        if metric.lower() == m.lower():
            return m
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def evaluate(
    store: EmbeddingStore,
    ds: SimilarityDataset,
    metric: str,
    window: int = 5,
    rank_of_l: Optional[int] = None,
) -> EvalReport:
    """Score every in-vocabulary pair and rank-correlate with gold scores.

    Pairs with an out-of-vocabulary word are skipped and counted;
    contextual pairs without a usable context fall back to avgSim and
    are counted separately.  Raises when every pair is skipped or the
    correlation is undefined.
    """
    metric = _canonical_metric(metric)
    if metric == "localSim" and not ds.is_contextual:
        raise ValueError("localSim needs a contextual dataset")
    gold: list[float] = []
    model: list[float] = []
    skipped = 0
    fallbacks = 0
    for p in ds.pairs:
        if p.word1 not in store or p.word2 not in store:
            skipped += 1
            continue
        if metric == "avgSim":
            score = avg_sim(store, p.word1, p.word2)
        else:
            assert p.context1 is not None and p.context2 is not None
            score, fell_back = _local_sim_impl(
                store, p.word1, p.context1, p.word2, p.context2, window
            )
            fallbacks += int(fell_back)
        gold.append(p.gold_score)
        model.append(score)
    if not gold:
        raise ValueError(f"all {len(ds)} pairs skipped as out-of-vocabulary")
    rho = spearman(gold, model)
    if rho is None:
        raise ValueError("rank correlation undefined: zero rank variance")
    return EvalReport(
        dataset=ds.name,
        metric=metric,
        spearman_x100=100.0 * rho,
        pairs_scored=len(gold),
        pairs_skipped_oov=skipped,
        pairs_context_fallback=fallbacks,
        rank_of_L=rank_of_l,
        window=window if metric == "localSim" else None,
    )


def dimension_sweep(
    store: EmbeddingStore,
    dec: Decomposition,
    ds: SimilarityDataset,
    ks: Sequence[int],
    metric: str = "avgSim",
    window: int = 5,
) -> list[tuple[int, float]]:
    """Evaluate after annihilating the top-k directions, for each k.

    k = 0 is the unprojected baseline.  Returns (k, spearman x 100)
    pairs in the order given.
    """
    ks = list(ks)
    if not ks:
        raise ValueError("ks must be nonempty")
    if min(ks) < 0:
        raise ValueError("k must be >= 0")
    if max(ks) > dec.num_components:
        raise ValueError(
            f"k={max(ks)} exceeds available components ({dec.num_components})"
        )
    curve = []
    for k in ks:
        if k == 0:
            target = store
        else:
            t = build_projection(components_of(dec, k), reorthonormalize=True)
            target = apply_projection(t, store)
        report = evaluate(target, ds, metric, window=window, rank_of_l=k)
        curve.append((k, report.spearman_x100))
    return curve
