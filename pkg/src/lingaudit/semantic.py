"""Semantic-spread metrics (axis A.2).

The headline number is the count of principal components needed to keep
95% of embedding variance: spread-out corpora need many, templated ones
need few.  The covariance is accumulated in one streaming pass so a
matrix of millions of rows never has to fit in memory.  The rest of the
axis reads dependency parses: who does what to what (verb-object
pairs), and how actions are modulated (adverbial and numeric profiles).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from lingaudit.ingest import EmbeddingMatrix, ParsedInstruction, iter_embedding_chunks
from lingaudit.lexicons import LexiconSet, default_lexicons

VARIANCE_TARGET = 0.95

_OBJECT_DEPRELS = frozenset({"obj", "dobj"})


class CovarianceAccumulator:
    """Single-pass covariance over row chunks, in float64.

    Accumulates raw second moments and column sums; ``finalize`` applies
    the mean correction with the n-1 divisor.
    """

    def __init__(self, dims: int) -> None:
        if dims < 1:
            raise ValueError("dims must be positive")
        self.dims = dims
        self._moment = np.zeros((dims, dims), dtype=np.float64)
        self._sums = np.zeros(dims, dtype=np.float64)
        self.rows = 0

    def update(self, chunk: np.ndarray) -> None:
        if chunk.ndim != 2 or chunk.shape[1] != self.dims:
            raise ValueError(f"chunk must have shape (n, {self.dims})")
        if chunk.shape[0] == 0:
            return
        block = chunk.astype(np.float64, copy=False)
        self._moment += block.T @ block
        self._sums += block.sum(axis=0)
        self.rows += chunk.shape[0]

    def finalize(self) -> np.ndarray:
        if self.rows < 2:
            raise ValueError("covariance needs at least two rows")
        centering = np.outer(self._sums, self._sums) / self.rows
        return (self._moment - centering) / (self.rows - 1)


def _components_for_target(cov: np.ndarray) -> int:
    eigenvalues = np.linalg.eigvalsh(cov)[::-1]
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    total = float(eigenvalues.sum())
    if total <= 0.0:
        raise ValueError("degenerate embedding matrix: zero variance")
    cumulative = np.cumsum(eigenvalues)
    return int(np.searchsorted(cumulative, VARIANCE_TARGET * total, side="left")) + 1


def _chunk_array(matrix: np.ndarray, chunk_rows: int) -> Iterable[np.ndarray]:
    for start in range(0, matrix.shape[0], chunk_rows):
        yield matrix[start : start + chunk_rows]


def pca_components_95(
    embeddings: EmbeddingMatrix | np.ndarray, chunk_rows: int = 8192
) -> int:
    """Number of principal components covering 95% of variance."""
    matrix = embeddings.matrix if isinstance(embeddings, EmbeddingMatrix) else embeddings
    if matrix.ndim != 2:
        raise ValueError("embeddings must be a 2-D array")
    if matrix.shape[0] < 2:
        raise ValueError("PCA needs at least two embedding rows")
    if not np.isfinite(matrix).all():
        raise ValueError("embeddings contain non-finite values")
    acc = CovarianceAccumulator(matrix.shape[1])
    for chunk in _chunk_array(matrix, chunk_rows):
        acc.update(chunk)
    return _components_for_target(acc.finalize())


def pca_components_95_streaming(
    data_path: str | Path,
    row_indices: np.ndarray | None = None,
    chunk_rows: int = 8192,
) -> int:
    """Streaming variant reading an embedding file chunk by chunk.

    ``row_indices`` (sorted, distinct) restricts the pass to a subset of
    rows, e.g. the rows of unique sentences.  Memory stays at one chunk
    plus a dims x dims accumulator regardless of file size.
    """
    if row_indices is not None:
        row_indices = np.asarray(row_indices, dtype=np.int64)
        if row_indices.size < 2:
            raise ValueError("PCA needs at least two embedding rows")
        if np.any(np.diff(row_indices) <= 0):
            raise ValueError("row_indices must be sorted and distinct")
    acc: CovarianceAccumulator | None = None
    for start, chunk in iter_embedding_chunks(data_path, chunk_rows):
        if acc is None:
            acc = CovarianceAccumulator(chunk.shape[1])
        if row_indices is None:
            acc.update(chunk)
        else:
            lo = np.searchsorted(row_indices, start, side="left")
            hi = np.searchsorted(row_indices, start + chunk.shape[0], side="left")
            if hi > lo:
                acc.update(chunk[row_indices[lo:hi] - start])
    if acc is None or acc.rows < 2:
        raise ValueError("PCA needs at least two embedding rows")
    return _components_for_target(acc.finalize())


def bertscore_f1(a: np.ndarray, b: np.ndarray) -> float:
    """Greedy-match F1 between two token-embedding matrices.

    Recall matches each row of ``a`` to its best row of ``b`` by cosine,
    precision the other way around; no idf weighting or rescaling.
    """
    for name, arr in (("a", a), ("b", b)):
        if arr.ndim != 2 or arr.shape[0] == 0:
            raise ValueError(f"argument {name!r} must be a non-empty 2-D array")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dims mismatch: {a.shape[1]} != {b.shape[1]}")
    xa = a.astype(np.float64, copy=False)
    xb = b.astype(np.float64, copy=False)
    for name, arr in (("a", xa), ("b", xb)):
        norms = np.linalg.norm(arr, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise ValueError(f"zero-norm token vector at row {int(zero[0])} of {name!r}")
    sims = (xa / np.linalg.norm(xa, axis=1, keepdims=True)) @ (
        xb / np.linalg.norm(xb, axis=1, keepdims=True)
    ).T
    recall = float(sims.max(axis=1).mean())
    precision = float(sims.max(axis=0).mean())
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True, slots=True)
class VerbObjectMatrix:
    """Counts of (verb lemma, object lemma) pairs, most frequent first."""

    verbs: tuple[str, ...]
    objects: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self) -> None:
        if self.counts.shape != (len(self.verbs), len(self.objects)):
            raise ValueError("counts shape does not match label lists")

    def total(self) -> int:
        return int(self.counts.sum())


def _object_lemma(parse: ParsedInstruction, obj_token) -> str:
    pieces = [
        (child.index, child.lemma.lower())
        for child in parse.children_of(obj_token)
        if child.deprel == "compound"
    ]
    pieces.append((obj_token.index, obj_token.lemma.lower()))
    return " ".join(lemma for _, lemma in sorted(pieces))


def _verb_lemma(parse: ParsedInstruction, verb_token) -> str:
    particles = [
        child.lemma.lower()
        for child in parse.children_of(verb_token)
        if child.deprel == "compound:prt"
    ]
    return " ".join([verb_token.lemma.lower(), *particles])


def verb_object_matrix(parses: Mapping[str, ParsedInstruction]) -> VerbObjectMatrix:
    """Count verb-object pairs across parses.

    An edge is a token with deprel obj/dobj whose head is a VERB; noun
    compounds merge into the object ("water bottle"), verb particles
    into the verb ("pick up").
    """
    pair_counts: Counter[tuple[str, str]] = Counter()
    for parse in parses.values():
        for tok in parse.tokens:
            if tok.deprel not in _OBJECT_DEPRELS:
                continue
            head = parse.head_of(tok)
            if head is None or head.upos != "VERB":
                continue
            pair_counts[(_verb_lemma(parse, head), _object_lemma(parse, tok))] += 1
    verb_totals: Counter[str] = Counter()
    object_totals: Counter[str] = Counter()
    for (verb, obj), count in pair_counts.items():
        verb_totals[verb] += count
        object_totals[obj] += count
    verbs = tuple(sorted(verb_totals, key=lambda v: (-verb_totals[v], v)))
    objects = tuple(sorted(object_totals, key=lambda o: (-object_totals[o], o)))
    counts = np.zeros((len(verbs), len(objects)), dtype=np.int64)
    v_index = {v: i for i, v in enumerate(verbs)}
    o_index = {o: j for j, o in enumerate(objects)}
    for (verb, obj), count in pair_counts.items():
        counts[v_index[verb], o_index[obj]] = count
    return VerbObjectMatrix(verbs=verbs, objects=objects, counts=counts)


def unique_verbs_per_object(matrix: VerbObjectMatrix) -> dict[str, int]:
    """How many distinct verbs act on each object lemma."""
    return {
        obj: int(np.count_nonzero(matrix.counts[:, j]))
        for j, obj in enumerate(matrix.objects)
    }


def _counts_adverbial(tok, parse: ParsedInstruction) -> bool:
    if tok.upos == "ADV":
        return True
    if tok.upos == "ADP":
        if tok.deprel in ("advmod", "obl"):
            return True
        head = parse.head_of(tok)
        if head is not None and head.deprel == "obl":
            return True
    return False


def adverbial_profile(
    parses: Mapping[str, ParsedInstruction], lexicons: LexiconSet | None = None
) -> dict[str, tuple[int, str]]:
    """Lemma -> (count, class) for adverbial modifiers across parses.

    Adverbs count directly; adpositions count when they modify an
    oblique.  Classes come from the lexicons, first match in the order
    directional, locative, manner, temporal; anything else is "other".
    """
    lex = lexicons or default_lexicons()
    classes = lex.adverb_classes()
    counts: Counter[str] = Counter()
    for parse in parses.values():
        for tok in parse.tokens:
            if _counts_adverbial(tok, parse):
                counts[tok.lemma.lower()] += 1
    profile: dict[str, tuple[int, str]] = {}
    for lemma in sorted(counts, key=lambda w: (-counts[w], w)):
        category = next((name for name, words in classes if lemma in words), "other")
        profile[lemma] = (counts[lemma], category)
    return profile


def numeric_profile(
    parses: Mapping[str, ParsedInstruction], lexicons: LexiconSet | None = None
) -> dict[str, int]:
    """Lemma -> count for numeric tokens (NUM tag or numeral lexicon)."""
    lex = lexicons or default_lexicons()
    counts: Counter[str] = Counter()
    for parse in parses.values():
        for tok in parse.tokens:
            lemma = tok.lemma.lower()
            if tok.upos == "NUM" or lemma in lex.numerals:
                counts[lemma] += 1
    return {lemma: counts[lemma] for lemma in sorted(counts, key=lambda w: (-counts[w], w))}
