"""Reference implementations the production code is checked against.

Each function here follows the textbook definition with no shortcuts,
shared helpers, or imports from the package under test.  They are slow
and obviously correct; that is the point.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import product

import numpy as np


def lcs_table(a, b) -> int:
    """Longest common subsequence length via the full quadratic table."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[n][m]


def edit_distance_table(a, b) -> int:
    """Levenshtein distance via the full quadratic table."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + cost,
            )
    return table[n][m]


def rouge_l_reference(a, b) -> float:
    lcs = lcs_table(a, b)
    if lcs == 0:
        return 0.0
    recall = lcs / len(a)
    precision = lcs / len(b)
    return 2.0 * precision * recall / (precision + recall)


def _modified_precisions(candidate, reference):
    """(p_n, total_n) for n = 1..4; total_n is the candidate n-gram count."""
    out = []
    for n in range(1, 5):
        cand_grams = [tuple(candidate[i : i + n]) for i in range(len(candidate) - n + 1)]
        ref_grams = Counter(tuple(reference[i : i + n]) for i in range(len(reference) - n + 1))
        total = len(cand_grams)
        if total == 0:
            out.append((None, 0))
            continue
        clipped = 0
        remaining = dict(ref_grams)
        for gram in cand_grams:
            if remaining.get(gram, 0) > 0:
                clipped += 1
                remaining[gram] -= 1
        out.append((clipped / total, total))
    return out


def bleu4_directional_reference(candidate, reference) -> float:
    precisions = _modified_precisions(candidate, reference)
    logs = []
    for n, (p, total) in enumerate(precisions, start=1):
        if p is None:
            continue
        if p == 0.0:
            if n == 1:
                return 0.0
            p = 1.0 / (2.0 * total)
        logs.append(math.log(p))
    if not logs:
        return 0.0
    geo = math.exp(sum(logs) / len(logs))
    c, r = len(candidate), len(reference)
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return bp * geo


def bleu4_reference(a, b) -> float:
    return (bleu4_directional_reference(a, b) + bleu4_directional_reference(b, a)) / 2.0


def jaccard_reference(a, b) -> float:
    sa, sb = set(a), set(b)
    union = sa | sb
    return len(sa & sb) / len(union)


def pca_components_reference(matrix: np.ndarray, target: float = 0.95) -> int:
    """Components for the variance target via a full SVD of the centered data."""
    x = np.asarray(matrix, dtype=np.float64)
    centered = x - x.mean(axis=0, keepdims=True)
    singular = np.linalg.svd(centered, compute_uv=False)
    variances = singular**2 / (x.shape[0] - 1)
    total = variances.sum()
    if total <= 0:
        raise ValueError("zero variance")
    ratios = np.cumsum(variances) / total
    for k, ratio in enumerate(ratios, start=1):
        if ratio >= target:
            return k
    return len(ratios)


# --- tree kernel via explicit fragment enumeration -------------------------
#
# A tree is nested tuples: ("S", ("NP", "token"), ...); a bare string is a
# leaf.  A fragment is any connected subgraph rooted at some node where each
# included internal node keeps either all of its children expanded or cut at
# a child label.  The kernel weights a shared fragment by
# lambda ** (number of production nodes in the fragment).


def _is_leaf(tree) -> bool:
    return isinstance(tree, str)


def fragment_counts(tree) -> Counter:
    """Counter of (canonical fragment, production count) over all nodes."""

    def rooted(node):
        label = node[0]
        child_options = []
        for child in node[1:]:
            if _is_leaf(child):
                child_options.append([(("leaf", child), 0)])
            else:
                options = [(("cut", child[0]), 0)]
                options.extend((("sub", shape), size) for shape, size in rooted(child))
                child_options.append(options)
        forms = []
        for combo in product(*child_options):
            shape = (label, tuple(item[0] for item in combo))
            size = 1 + sum(item[1] for item in combo)
            forms.append((shape, size))
        return forms

    counts: Counter = Counter()
    stack = [tree]
    while stack:
        node = stack.pop()
        if _is_leaf(node):
            continue
        for shape, size in rooted(node):
            counts[(shape, size)] += 1
        stack.extend(node[1:])
    return counts


def tree_kernel_reference(t1, t2, lam: float) -> float:
    """Normalized fragment-count kernel computed by brute enumeration."""

    def raw(c1: Counter, c2: Counter) -> float:
        return math.fsum(
            count * c2[key] * lam ** key[1] for key, count in c1.items() if key in c2
        )

    c1, c2 = fragment_counts(t1), fragment_counts(t2)
    cross = raw(c1, c2)
    if cross == 0.0:
        return 0.0
    return cross / math.sqrt(raw(c1, c1) * raw(c2, c2))


def tree_kernel_raw_reference(t1, t2, lam: float) -> float:
    def raw(c1: Counter, c2: Counter) -> float:
        return math.fsum(
            count * c2[key] * lam ** key[1] for key, count in c1.items() if key in c2
        )

    return raw(fragment_counts(t1), fragment_counts(t2))


def binomial_se(p: float, m: int) -> float:
    return math.sqrt(p * (1.0 - p) / m)
