"""Duplication and lexical-similarity metrics (axis A.1).

The corpus-level number everything starts from is the gzip compression
ratio; the rest are pairwise similarities estimated over seeded samples.
``pairwise_mean`` is the single entry point for those: it draws the same
sample for a given (seed, trial, metric) triple regardless of worker
count, and reduces chunk sums in a fixed order, so results are
bit-identical across thread configurations.
"""

from __future__ import annotations

import gzip
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Sequence

import numpy as np

from lingaudit import _kernels
from lingaudit.model import Corpus, InstructionRecord, unique_sentences
from lingaudit.sampling import MetricValue, SamplingPlan, draw_sample

PAIRWISE_METRICS = (
    "rouge_l",
    "bleu4",
    "jaccard",
    "levenshtein",
    "bertscore_f1",
    "tree_kernel",
)

_CHUNK_PAIRS = 4096


def compression_ratio(corpus: Corpus, level: int = 6) -> float:
    """Bytes of newline-joined clean text divided by its gzip size.

    Higher means more redundancy.  The gzip header timestamp is pinned
    to zero so the ratio is a pure function of the text.
    """
    data = "\n".join(rec.clean_text for rec in corpus.records).encode("utf-8")
    if not data:
        raise ValueError("corpus has no text to compress")
    compressed = gzip.compress(data, compresslevel=level, mtime=0)
    return len(data) / len(compressed)


def rouge_l(a: Sequence[str], b: Sequence[str]) -> float:
    """LCS-based F1 between two token sequences, in [0, 1]."""
    if not a or not b:
        raise ValueError("rouge_l requires non-empty token sequences")
    vocab: dict[str, int] = {}
    xa = np.array([vocab.setdefault(t, len(vocab)) for t in a], dtype=np.int64)
    xb = np.array([vocab.setdefault(t, len(vocab)) for t in b], dtype=np.int64)
    lcs = int(_kernels.lcs_length(xa, xb))
    if lcs == 0:
        return 0.0
    precision = lcs / len(b)
    recall = lcs / len(a)
    return 2.0 * precision * recall / (precision + recall)


def _ngram_counts(tokens: Sequence[str], max_n: int = 4) -> list[Counter]:
    counts: list[Counter] = []
    for n in range(1, max_n + 1):
        counts.append(Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)))
    return counts


def _bleu_directional(
    cand_counts: list[Counter], cand_len: int, ref_counts: list[Counter], ref_len: int
) -> float:
    log_sum = 0.0
    orders = 0
    for n in range(4):
        cand = cand_counts[n]
        total = cand_len - n
        if total <= 0:
            # candidate too short to form any n-grams of this order
            continue
        ref = ref_counts[n]
        clipped = sum(min(count, ref[gram]) for gram, count in cand.items())
        if clipped == 0:
            if n == 0:
                return 0.0
            # smoothed floor so one vanishing order does not zero the score
            p = 1.0 / (2.0 * total)
        else:
            p = clipped / total
        log_sum += math.log(p)
        orders += 1
    if orders == 0:
        return 0.0
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * math.exp(log_sum / orders)


def bleu4(a: Sequence[str], b: Sequence[str]) -> float:
    """Symmetrized sentence BLEU with n-grams up to 4, in [0, 1]."""
    if not a or not b:
        raise ValueError("bleu4 requires non-empty token sequences")
    ca, cb = _ngram_counts(a), _ngram_counts(b)
    forward = _bleu_directional(ca, len(a), cb, len(b))
    backward = _bleu_directional(cb, len(b), ca, len(a))
    return (forward + backward) / 2.0


def jaccard(a: Sequence[str], b: Sequence[str]) -> float:
    """Token-set overlap |A∩B| / |A∪B|, in [0, 1]."""
    sa, sb = set(a), set(b)
    if not sa and not sb:
        raise ValueError("jaccard requires at least one non-empty token set")
    return len(sa & sb) / len(sa | sb)


def levenshtein(a: str, b: str) -> int:
    """Character-level edit distance between two strings."""
    xa = np.array([ord(c) for c in a], dtype=np.int64)
    xb = np.array([ord(c) for c in b], dtype=np.int64)
    return int(_kernels.edit_distance(xa, xb))


def resolve_workers(workers: int | None = None) -> int:
    """Worker-thread count: explicit arg, else LINGAUDIT_THREADS, else 1."""
    if workers is not None:
        if workers < 1:
            raise ValueError("workers must be positive")
        return workers
    env = os.environ.get("LINGAUDIT_THREADS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"LINGAUDIT_THREADS must be an integer, got {env!r}")
        if value < 1:
            raise ValueError("LINGAUDIT_THREADS must be positive")
        return value
    return 1


def _pack_int_sequences(seqs: list[list[int]]) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.zeros(len(seqs) + 1, dtype=np.int64)
    for i, seq in enumerate(seqs):
        offsets[i + 1] = offsets[i] + len(seq)
    flat = np.empty(int(offsets[-1]), dtype=np.int64)
    for i, seq in enumerate(seqs):
        flat[offsets[i] : offsets[i + 1]] = seq
    return flat, offsets


def _chunked_kernel_mean(
    kernel, flat: np.ndarray, offsets: np.ndarray, k: int, workers: int
) -> float:
    left, right = np.triu_indices(k, 1)
    left = left.astype(np.int64)
    right = right.astype(np.int64)
    n_pairs = left.shape[0]
    bounds = list(range(0, n_pairs, _CHUNK_PAIRS)) + [n_pairs]
    chunks = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]

    def run(span: tuple[int, int]) -> float:
        lo, hi = span
        return kernel(flat, offsets, left[lo:hi], right[lo:hi])

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(run, chunks))
    else:
        sums = [run(span) for span in chunks]
    # fixed-order compensated combine keeps the total independent of workers
    total = 0.0
    comp = 0.0
    for s in sums:
        y = s - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total / n_pairs


def _sample_records(
    records: Sequence[InstructionRecord], idx: np.ndarray
) -> list[InstructionRecord]:
    return [records[int(i)] for i in idx]


def _trial_mean(
    metric: str,
    sample: list[InstructionRecord],
    workers: int,
    parses: Mapping | None,
    trees: Mapping | None,
    token_embeddings=None,
    tree_lambda: float = 0.4,
) -> float:
    k = len(sample)
    if metric == "rouge_l":
        vocab: dict[str, int] = {}
        seqs = [[vocab.setdefault(t, len(vocab)) for t in r.tokens] for r in sample]
        flat, offsets = _pack_int_sequences(seqs)
        return _chunked_kernel_mean(_kernels.rouge_l_pair_sum, flat, offsets, k, workers)
    if metric == "levenshtein":
        seqs = [[ord(c) for c in r.clean_text] for r in sample]
        flat, offsets = _pack_int_sequences(seqs)
        return _chunked_kernel_mean(
            _kernels.edit_distance_pair_sum, flat, offsets, k, workers
        )
    if metric == "bleu4":
        prepped = [(_ngram_counts(r.tokens), len(r.tokens)) for r in sample]
        return math.fsum(
            (
                _bleu_directional(prepped[i][0], prepped[i][1], prepped[j][0], prepped[j][1])
                + _bleu_directional(prepped[j][0], prepped[j][1], prepped[i][0], prepped[i][1])
            )
            / 2.0
            for i in range(k)
            for j in range(i + 1, k)
        ) / (k * (k - 1) / 2)
    if metric == "jaccard":
        sets = [frozenset(r.tokens) for r in sample]
        return math.fsum(
            len(sets[i] & sets[j]) / len(sets[i] | sets[j])
            for i in range(k)
            for j in range(i + 1, k)
        ) / (k * (k - 1) / 2)
    if metric == "bertscore_f1":
        from lingaudit.semantic import bertscore_f1

        arrays = []
        for rec in sample:
            if rec.id not in token_embeddings.arrays:
                raise ValueError(f"missing token embeddings for record {rec.id!r}")
            arrays.append(token_embeddings.arrays[rec.id])
        return math.fsum(
            bertscore_f1(arrays[i], arrays[j])
            for i in range(k)
            for j in range(i + 1, k)
        ) / (k * (k - 1) / 2)
    if metric == "tree_kernel":
        from lingaudit.structural import mean_pairwise_tree_kernel

        picked = []
        for rec in sample:
            if rec.id not in trees:
                raise ValueError(f"missing constituency tree for record {rec.id!r}")
            picked.append(trees[rec.id])
        return mean_pairwise_tree_kernel(picked, tree_lambda)
    raise ValueError(f"unknown pairwise metric {metric!r}")


def pairwise_mean(
    corpus: Corpus,
    metric: str,
    plan: SamplingPlan,
    *,
    on_unique: bool = False,
    parses: Mapping | None = None,
    trees: Mapping | None = None,
    token_embeddings=None,
    tree_lambda: float = 0.4,
    workers: int | None = None,
) -> MetricValue:
    """Estimate the mean pairwise ``metric`` over seeded sentence samples.

    Draws ``plan.trials`` independent samples of ``plan.sample_size``
    sentences and averages the metric over all unordered pairs in each.
    When the population fits inside one sample the estimate is exact, so
    a single exhaustive trial runs and the spread is zero.
    """
    if metric not in PAIRWISE_METRICS:
        raise ValueError(f"unknown pairwise metric {metric!r}")
    if metric == "tree_kernel" and trees is None:
        raise ValueError("tree_kernel needs constituency trees")
    if metric == "bertscore_f1" and token_embeddings is None:
        raise ValueError("bertscore_f1 needs token embeddings")
    workers = resolve_workers(workers)
    base = unique_sentences(corpus) if on_unique else corpus
    records = base.records
    if len(records) < 2:
        raise ValueError("pairwise metrics need at least two sentences")

    exhaustive = len(records) <= plan.sample_size
    n_trials = 1 if exhaustive else plan.trials
    purpose = f"pairwise:{metric}"
    means: list[float] = []
    for trial in range(n_trials):
        idx = draw_sample(len(records), plan, trial, purpose)
        sample = _sample_records(records, idx)
        means.append(
            _trial_mean(
                metric, sample, workers, parses, trees, token_embeddings, tree_lambda
            )
        )
    mean = math.fsum(means) / len(means)
    if len(means) > 1:
        var = math.fsum((m - mean) ** 2 for m in means) / (len(means) - 1)
        std = math.sqrt(var)
    else:
        std = 0.0
    note = "population within sample size; single exhaustive trial" if exhaustive else None
    return MetricValue(
        mean=mean,
        std=std,
        trials=n_trials,
        sample_size=min(plan.sample_size, len(records)),
        note=note,
    )


def category_vocabulary(parses: Mapping, category: str) -> tuple[str, ...]:
    """Sorted distinct lemmas carrying the given UPOS tag across parses."""
    if category not in ("NOUN", "VERB", "ADV"):
        raise ValueError(f"unsupported overlap category {category!r}")
    vocab = {
        tok.lemma.lower()
        for parse in parses.values()
        for tok in parse.tokens
        if tok.upos == category
    }
    return tuple(sorted(vocab))


def overlap_matrix(vocabularies: Sequence[Sequence[str]]) -> np.ndarray:
    """Pairwise shared-lemma counts; the diagonal is each vocabulary size."""
    sets = [set(v) for v in vocabularies]
    n = len(sets)
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            out[i, j] = len(sets[i] & sets[j]) if i != j else len(sets[i])
    return out


def lexical_overlap(
    corpora: Sequence[Corpus],
    parses_by_dataset: Mapping[str, Mapping],
    category: str,
) -> tuple[tuple[str, ...], np.ndarray]:
    """Shared-lemma counts between several corpora for one POS category."""
    if len(corpora) < 2:
        raise ValueError("lexical overlap needs at least two corpora")
    labels = []
    vocabs = []
    for corpus in corpora:
        if corpus.dataset_id not in parses_by_dataset:
            raise ValueError(f"missing parses for dataset {corpus.dataset_id!r}")
        labels.append(corpus.dataset_id)
        vocabs.append(category_vocabulary(parses_by_dataset[corpus.dataset_id], category))
    return tuple(labels), overlap_matrix(vocabs)
