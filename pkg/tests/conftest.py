"""Shared fixtures: bundled data files plus deterministic synthetic corpora."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from lingaudit.ingest import (
    EmbeddingMatrix,
    GoldStructureLabels,
    ParsedInstruction,
    StructureLabel,
    TokenAnnotation,
    TokenEmbeddingSet,
    TreeNode,
    ConstituencyTree,
    read_conllu,
    read_corpus,
    write_conllu,
    write_embeddings,
    write_gold_labels,
    write_token_embeddings,
    write_trees,
)
from lingaudit.model import Corpus, InstructionRecord, build_corpus

DATA_DIR = Path(__file__).parent / "data"


def record(rec_id: str, text: str, dataset: str = "test") -> InstructionRecord:
    return InstructionRecord(
        id=rec_id,
        raw_text=text,
        clean_text=text,
        tokens=tuple(text.split()),
        dataset_id=dataset,
    )


def corpus_from_texts(texts, dataset: str = "test") -> Corpus:
    rows = [(f"{dataset}-{i:04d}", text) for i, text in enumerate(texts)]
    return build_corpus(rows, dataset)


def simple_parse(rec_id: str, tokens) -> ParsedInstruction:
    """First token VERB root, second its object, the rest modifiers."""
    annotations = []
    for i, tok in enumerate(tokens, start=1):
        if i == 1:
            annotations.append(
                TokenAnnotation(index=1, form=tok, lemma=tok, upos="VERB", head=0, deprel="root")
            )
        elif i == 2:
            annotations.append(
                TokenAnnotation(index=2, form=tok, lemma=tok, upos="NOUN", head=1, deprel="obj")
            )
        else:
            annotations.append(
                TokenAnnotation(index=i, form=tok, lemma=tok, upos="NOUN", head=1, deprel="nmod")
            )
    return ParsedInstruction(id=rec_id, tokens=tuple(annotations))


def right_branching_tree(rec_id: str, tokens) -> ConstituencyTree:
    node = TreeNode(label="X", children=(TreeNode(label=tokens[-1]),))
    for tok in reversed(tokens[:-1]):
        node = TreeNode(
            label="X",
            children=(TreeNode(label="X", children=(TreeNode(label=tok),)), node),
        )
    return ConstituencyTree(id=rec_id, root=TreeNode(label="S", children=(node,)))


@pytest.fixture(scope="session")
def rt1_vocab_corpus() -> Corpus:
    return read_corpus(DATA_DIR / "rt1_vocab.jsonl", dataset_id="rt1-vocab")


@pytest.fixture(scope="session")
def rt1_examples_corpus() -> Corpus:
    return read_corpus(DATA_DIR / "rt1_examples.jsonl", dataset_id="rt1-examples")


@pytest.fixture(scope="session")
def exemplar_corpus() -> Corpus:
    return read_corpus(DATA_DIR / "exemplars.jsonl", dataset_id="exemplars")


@pytest.fixture(scope="session")
def exemplar_parses(exemplar_corpus) -> dict[str, ParsedInstruction]:
    return read_conllu(DATA_DIR / "exemplars.conllu", exemplar_corpus)


@pytest.fixture(scope="session")
def exemplar_expected() -> dict[str, dict[str, bool]]:
    with open(DATA_DIR / "exemplars_expected.json", "r", encoding="utf-8") as fh:
        return json.load(fh)


# --- 60-sentence gold corpus where hand labels are unambiguous -------------

_GOLD60_TEMPLATES = (
    # (text template, negation, conditional, multi_step, cycle)
    ("move the {} block to the tray", False, False, False, False),
    ("wipe the {} surface", False, False, False, False),
    ("don't drop the {} cup", True, False, False, False),
    ("if the {} light is on press the button", False, True, False, False),
    ("grab the {} plate then stack it", False, False, True, False),
    ("stir the {} pot again", False, False, False, True),
)
_GOLD60_FILLERS = (
    "red", "green", "blue", "yellow", "purple",
    "orange", "black", "white", "gray", "small",
)


def gold60_rows() -> list[tuple[str, str, StructureLabel]]:
    rows = []
    counter = 0
    for filler in _GOLD60_FILLERS:
        for template, neg, cond, multi, cyc in _GOLD60_TEMPLATES:
            counter += 1
            rows.append(
                (
                    f"g{counter:03d}",
                    template.format(filler),
                    StructureLabel(
                        negation=neg, conditional=cond, multi_step=multi, cycle=cyc
                    ),
                )
            )
    return rows


@pytest.fixture(scope="session")
def gold60():
    rows = gold60_rows()
    corpus = build_corpus(
        [(rec_id, text) for rec_id, text, _ in rows], "gold60"
    )
    gold = GoldStructureLabels(
        labels={rec_id: label for rec_id, _, label in rows}, annotators={}
    )
    return corpus, gold


# --- 500-sentence corpus with exactly 25 planted multi_step disagreements --


def se500() -> tuple[Corpus, GoldStructureLabels]:
    texts = [(f"s{i:03d}", f"do task {i} then report back") for i in range(500)]
    corpus = build_corpus(texts, "se500")
    labels = {}
    for i in range(500):
        # detector says multi_step ("then"); gold disagrees on the first 25
        labels[f"s{i:03d}"] = StructureLabel(
            negation=False, conditional=False, multi_step=(i >= 25), cycle=False
        )
    return corpus, GoldStructureLabels(labels=labels, annotators={})


# --- 100 unique sentences with a planted dominant POS pattern --------------

_PLANTED = ("VERB", "NOUN", "NOUN", "ADP", "ADJ", "NOUN")


def pattern_fixture() -> tuple[Corpus, dict[str, ParsedInstruction]]:
    tags = ("NOUN", "ADJ", "DET", "ADV", "ADP", "PRON", "NUM")
    patterns: list[tuple[str, ...]] = [_PLANTED] * 11
    suffixes: list[tuple[str, ...]] = [(t,) for t in tags]
    suffixes += [(a, b) for a in tags for b in tags]
    suffixes += [(a, b, c) for a in tags for b in tags for c in tags]
    for suffix in suffixes:
        if len(patterns) == 100:
            break
        candidate = ("VERB", *suffix)
        if candidate != _PLANTED:
            patterns.append(candidate)
    assert len(patterns) == 100

    texts = []
    parses: dict[str, ParsedInstruction] = {}
    for i, pattern in enumerate(patterns):
        rec_id = f"p{i:03d}"
        tokens = [f"w{i}t{j}" for j in range(len(pattern))]
        texts.append((rec_id, " ".join(tokens)))
        annotations = tuple(
            TokenAnnotation(
                index=j + 1,
                form=tok,
                lemma=tok,
                upos=tag,
                head=0 if j == 0 else 1,
                deprel="root" if j == 0 else "dep",
            )
            for j, (tok, tag) in enumerate(zip(tokens, pattern))
        )
        parses[rec_id] = ParsedInstruction(id=rec_id, tokens=annotations)
    return build_corpus(texts, "patterns"), parses


# --- random constituency trees, shared with the kernel oracle --------------


def tuple_to_node(tree) -> TreeNode:
    """Convert the oracle's nested-tuple tree form into a TreeNode."""
    if isinstance(tree, str):
        return TreeNode(label=tree)
    label = tree[0]
    return TreeNode(label=label, children=tuple(tuple_to_node(c) for c in tree[1:]))


def random_tuple_tree(rng, max_internal: int, labels=("S", "NP", "VP", "PP"), tokens=("a", "b", "c")):
    """Seeded random tree with at most ``max_internal`` internal nodes."""
    budget = [int(rng.integers(1, max_internal + 1))]

    def grow(depth: int):
        budget[0] -= 1
        label = str(rng.choice(labels))
        n_children = int(rng.integers(1, 4))
        children = []
        for _ in range(n_children):
            if budget[0] > 0 and depth < 4 and rng.random() < 0.6:
                children.append(grow(depth + 1))
            else:
                children.append(str(rng.choice(tokens)))
        return (label, *children)

    return grow(0)


# --- a complete annotation bundle on disk, for CLI and engine tests --------

_BUNDLE_TEXTS = (
    "pick up the red block",
    "place the cup on the table",
    "move left slowly",
    "don't touch the hot stove",
    "if the door is open close it",
    "open the drawer and put the spoon inside",
    "continue moving forward",
    "pick up the red block",
    "turn right then stop",
    "take a photo every ten degrees",
    "slide the green block left",
    "push the chair under the desk",
    "stack the bowls carefully",
    "never press the red switch",
    "rotate the valve until it stops",
    "wash the mug",
    "wash the mug",
    "carry the tray to the shelf",
    "flip the switch twice",
    "line up the bottles",
)


def build_bundle(root: Path) -> dict[str, Path]:
    """Write a corpus plus every annotation kind under ``root``."""
    root.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": root / "corpus.jsonl",
        "conllu": root / "parses.conllu",
        "trees": root / "trees.jsonl",
        "icem": root / "sentences.icem",
        "icem_index": root / "sentences.idx.jsonl",
        "icte": root / "tokens.icte",
        "gold": root / "gold.jsonl",
    }
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for i, text in enumerate(_BUNDLE_TEXTS):
            fh.write(json.dumps({"id": f"b{i:03d}", "text": text, "dataset": "bundle"}) + "\n")
    corpus = read_corpus(paths["corpus"])

    parses = {rec.id: simple_parse(rec.id, rec.tokens) for rec in corpus.records}
    write_conllu(parses, paths["conllu"], order=corpus.ids())

    trees = {rec.id: right_branching_tree(rec.id, rec.tokens) for rec in corpus.records}
    write_trees(trees, paths["trees"], order=corpus.ids())

    rng = np.random.default_rng(20260819)
    matrix = rng.normal(size=(len(corpus), 12)).astype(np.float32)
    write_embeddings(
        EmbeddingMatrix(ids=corpus.ids(), matrix=matrix, encoder_id="hash-12"),
        paths["icem"],
        paths["icem_index"],
    )

    arrays = {
        rec.id: rng.normal(size=(len(rec.tokens), 8)).astype(np.float32)
        for rec in corpus.records
    }
    write_token_embeddings(
        TokenEmbeddingSet(arrays=arrays, dims=8, encoder_id="hash-8"), paths["icte"]
    )

    # hand labels for the first six records; one deliberate mismatch (b000)
    gold_labels = {
        "b000": StructureLabel(True, False, False, False),
        "b003": StructureLabel(True, False, False, False),
        "b004": StructureLabel(False, True, False, False),
        "b005": StructureLabel(False, False, True, False),
        "b006": StructureLabel(False, False, False, True),
        "b008": StructureLabel(False, False, True, False),
    }
    write_gold_labels(
        GoldStructureLabels(labels=gold_labels, annotators={"b000": "a1"}), paths["gold"]
    )
    return paths


@pytest.fixture()
def bundle(tmp_path) -> dict[str, Path]:
    return build_bundle(tmp_path / "bundle")


@pytest.fixture(scope="session")
def session_bundle(tmp_path_factory) -> dict[str, Path]:
    return build_bundle(tmp_path_factory.mktemp("bundle"))
