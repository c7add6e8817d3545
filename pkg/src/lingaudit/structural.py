"""Structural metrics (axis A.3): POS patterns, tree kernel, detectors.

POS patterns summarize surface syntax over unique sentences; the subset
tree kernel scores how much constituency structure two parses share;
the detectors flag four behavioral structures (negation, conditional,
multi-step, cycle) from parse evidence plus surface keywords, so they
degrade gracefully when no parse is available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from lingaudit.ingest import (
    ConstituencyTree,
    GoldStructureLabels,
    ParsedInstruction,
    StructureLabel,
    TreeNode,
    STRUCTURE_FLAGS,
)
from lingaudit.lexicons import LexiconSet, default_lexicons
from lingaudit.model import Corpus, InstructionRecord, unique_sentences

# ---------------------------------------------------------------------------
# POS patterns


@dataclass(frozen=True, slots=True)
class PatternStat:
    """One UPOS sequence with its share of unique sentences."""

    pattern: tuple[str, ...]
    count: int
    frequency: float
    exemplar: str

    @property
    def text(self) -> str:
        return " ".join(self.pattern)


def pos_pattern_frequencies(
    corpus: Corpus, parses: Mapping[str, ParsedInstruction]
) -> tuple[PatternStat, ...]:
    """Frequency of each UPOS sequence over the unique sentences.

    Every unique sentence must have a parse.  Patterns come back sorted
    by descending count, ties broken lexicographically; the exemplar is
    the first sentence that exhibited the pattern.
    """
    uniques = unique_sentences(corpus)
    counts: dict[tuple[str, ...], int] = {}
    exemplars: dict[tuple[str, ...], str] = {}
    for rec in uniques.records:
        parse = parses.get(rec.id)
        if parse is None:
            raise ValueError(f"missing parse for record {rec.id!r}")
        pattern = tuple(tok.upos for tok in parse.tokens)
        counts[pattern] = counts.get(pattern, 0) + 1
        exemplars.setdefault(pattern, rec.clean_text)
    n = len(uniques.records)
    ordered = sorted(counts, key=lambda p: (-counts[p], " ".join(p)))
    return tuple(
        PatternStat(
            pattern=pattern,
            count=counts[pattern],
            frequency=counts[pattern] / n,
            exemplar=exemplars[pattern],
        )
        for pattern in ordered
    )


# ---------------------------------------------------------------------------
# subset tree kernel

ProductionKey = tuple


def _production(node: TreeNode) -> ProductionKey:
    return (
        node.label,
        tuple(
            ("leaf", child.label) if child.is_leaf else ("node", child.label)
            for child in node.children
        ),
    )


def _internal_nodes(root: TreeNode) -> list[TreeNode]:
    out: list[TreeNode] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            continue
        out.append(node)
        stack.extend(reversed(node.children))
    return out


class _TreeIndex:
    """Per-tree preprocessing shared by every kernel evaluation."""

    __slots__ = ("nodes", "positions", "productions", "by_production")

    def __init__(self, root: TreeNode) -> None:
        self.nodes = _internal_nodes(root)
        # keyed by object identity: structurally equal subtrees are distinct nodes
        self.positions = {id(n): i for i, n in enumerate(self.nodes)}
        self.productions = [_production(n) for n in self.nodes]
        self.by_production: dict[ProductionKey, list[int]] = {}
        for i, key in enumerate(self.productions):
            self.by_production.setdefault(key, []).append(i)


def _delta(
    ta: _TreeIndex,
    tb: _TreeIndex,
    i: int,
    j: int,
    lam: float,
    memo: dict[tuple[int, int], float],
) -> float:
    got = memo.get((i, j))
    if got is not None:
        return got
    if ta.productions[i] != tb.productions[j]:
        memo[(i, j)] = 0.0
        return 0.0
    value = lam
    node_a, node_b = ta.nodes[i], tb.nodes[j]
    for child_a, child_b in zip(node_a.children, node_b.children):
        if child_a.is_leaf:
            continue
        ia = ta.positions[id(child_a)]
        ib = tb.positions[id(child_b)]
        value *= 1.0 + _delta(ta, tb, ia, ib, lam, memo)
    memo[(i, j)] = value
    return value


def _raw_kernel(ta: _TreeIndex, tb: _TreeIndex, lam: float) -> float:
    memo: dict[tuple[int, int], float] = {}
    total = 0.0
    for key, rows in ta.by_production.items():
        cols = tb.by_production.get(key)
        if not cols:
            continue
        for i in rows:
            for j in cols:
                total += _delta(ta, tb, i, j, lam, memo)
    return total


def _root_of(tree: ConstituencyTree | TreeNode) -> TreeNode:
    root = tree.root if isinstance(tree, ConstituencyTree) else tree
    if root.is_leaf:
        raise ValueError("degenerate tree: root has no children")
    return root


def tree_kernel(
    a: ConstituencyTree | TreeNode, b: ConstituencyTree | TreeNode, lam: float = 0.4
) -> float:
    """Normalized subset tree kernel in [0, 1]; identical trees score 1.

    ``lam`` discounts larger shared fragments; it must be in (0, 1].
    """
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"lambda must be in (0, 1], got {lam}")
    ia, ib = _TreeIndex(_root_of(a)), _TreeIndex(_root_of(b))
    cross = _raw_kernel(ia, ib, lam)
    if cross == 0.0:
        return 0.0
    norm = math.sqrt(_raw_kernel(ia, ia, lam) * _raw_kernel(ib, ib, lam))
    return min(1.0, cross / norm)


def mean_pairwise_tree_kernel(
    trees: Sequence[ConstituencyTree | TreeNode], lam: float
) -> float:
    """Mean normalized kernel over all unordered pairs of ``trees``."""
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"lambda must be in (0, 1], got {lam}")
    if len(trees) < 2:
        raise ValueError("need at least two trees")
    indexes = [_TreeIndex(_root_of(t)) for t in trees]
    selfs = [_raw_kernel(ix, ix, lam) for ix in indexes]
    k = len(indexes)

    def score(i: int, j: int) -> float:
        cross = _raw_kernel(indexes[i], indexes[j], lam)
        if cross == 0.0:
            return 0.0
        return min(1.0, cross / math.sqrt(selfs[i] * selfs[j]))

    total = math.fsum(score(i, j) for i in range(k) for j in range(i + 1, k))
    return total / (k * (k - 1) / 2)


# ---------------------------------------------------------------------------
# structure detectors


def _parse_negation(parse: ParsedInstruction, lex: LexiconSet) -> bool:
    for tok in parse.tokens:
        if "neg" in tok.deprel:
            return True
        lemma = tok.lemma.lower()
        if lemma == "no":
            if tok.upos == "DET" or tok.index == 1:
                return True
        elif lemma in lex.negation:
            return True
    return False


def _token_negation(tokens: Sequence[str], lex: LexiconSet) -> bool:
    for pos, tok in enumerate(tokens):
        if tok == "no":
            if pos == 0:
                return True
        elif tok in lex.negation:
            return True
    return False


def _parse_conditional(parse: ParsedInstruction, lex: LexiconSet) -> bool:
    for tok in parse.tokens:
        if tok.lemma.lower() not in lex.conditional:
            continue
        if tok.deprel in ("mark", "advcl"):
            return True
        head = parse.head_of(tok)
        if head is not None and head.deprel == "advcl":
            return True
    return False


def _parse_multi_step(parse: ParsedInstruction) -> bool:
    roots = 0
    for tok in parse.tokens:
        if tok.upos != "VERB":
            continue
        if tok.head == 0:
            roots += 1
        elif tok.deprel == "conj":
            head = parse.head_of(tok)
            if head is not None and head.upos == "VERB":
                return True
    return roots >= 2


def detect_structures(
    record: InstructionRecord,
    parse: ParsedInstruction | None = None,
    lexicons: LexiconSet | None = None,
) -> StructureLabel:
    """Flag negation, conditionals, multi-step composition, and cycles.

    Surface-token evidence and parse evidence are OR-ed together, so
    providing a parse can only switch flags on, never off.
    """
    lex = lexicons or default_lexicons()
    tokens = record.tokens

    negation = _token_negation(tokens, lex)
    conditional = tokens[0] == "if"
    multi_step = "then" in tokens
    cycle = any(tok in lex.cycle for tok in tokens)

    if parse is not None:
        negation = negation or _parse_negation(parse, lex)
        conditional = conditional or _parse_conditional(parse, lex)
        multi_step = multi_step or _parse_multi_step(parse)
        cycle = cycle or any(tok.lemma.lower() in lex.cycle for tok in parse.tokens)

    return StructureLabel(
        negation=negation,
        conditional=conditional,
        multi_step=multi_step,
        cycle=cycle,
    )


@dataclass(frozen=True, slots=True)
class FlagStats:
    """Prevalence of one structure flag, plus gold agreement if known."""

    count: int
    fraction: float
    disagreement: float | None = None
    standard_error: float | None = None


@dataclass(frozen=True, slots=True)
class StructureReport:
    dataset_id: str
    n_sentences: int
    flags: dict[str, FlagStats]
    gold_size: int


def structure_report(
    corpus: Corpus,
    parses: Mapping[str, ParsedInstruction] | None = None,
    gold: GoldStructureLabels | None = None,
    lexicons: LexiconSet | None = None,
) -> StructureReport:
    """Detector counts over the whole corpus, validated against gold labels.

    For each flag the gold subset yields a disagreement rate p and its
    binomial standard error sqrt(p * (1-p) / m) over m labeled sentences.
    """
    lex = lexicons or default_lexicons()
    parse_map = parses or {}
    predictions: dict[str, StructureLabel] = {}
    totals = dict.fromkeys(STRUCTURE_FLAGS, 0)
    for rec in corpus.records:
        label = detect_structures(rec, parse_map.get(rec.id), lex)
        predictions[rec.id] = label
        for flag, value in zip(STRUCTURE_FLAGS, label.as_tuple()):
            totals[flag] += int(value)
    n = len(corpus.records)

    disagreements: dict[str, tuple[float, float]] = {}
    gold_size = 0
    if gold is not None:
        unknown = sorted(set(gold.labels) - set(predictions))
        if unknown:
            raise ValueError(f"gold ids not in corpus: {unknown[:5]}")
        gold_size = len(gold.labels)
        for flag in STRUCTURE_FLAGS:
            mismatches = sum(
                getattr(predictions[rec_id], flag) != getattr(label, flag)
                for rec_id, label in gold.labels.items()
            )
            p = mismatches / gold_size
            disagreements[flag] = (p, math.sqrt(p * (1.0 - p) / gold_size))

    flags = {
        flag: FlagStats(
            count=totals[flag],
            fraction=totals[flag] / n,
            disagreement=disagreements[flag][0] if flag in disagreements else None,
            standard_error=disagreements[flag][1] if flag in disagreements else None,
        )
        for flag in STRUCTURE_FLAGS
    }
    return StructureReport(
        dataset_id=corpus.dataset_id, n_sentences=n, flags=flags, gold_size=gold_size
    )
