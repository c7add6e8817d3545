"""Dependency and constituency output: core invariants and detector hooks."""

from __future__ import annotations

import pytest

from lingaudit import detect_structures, format_ptb, parse_ptb, tree_kernel
from lingaudit.model import build_corpus

from lingaudit_annotator.deps import parse_dependencies
from lingaudit_annotator.tagging import shipped_overrides, tag_tokens
from lingaudit_annotator.trees import build_tree

SENTENCES = [
    "place water bottle into white bowl",
    "pick up the red block",
    "if the light is on press the button",
    "never touch the stove",
    "wipe the counter and close the drawer",
    "grab the blue plate then stack it",
    "don't drop the cup",
    "move it to the left",
    "put the dishes in the sink before you leave",
    "stop",
    "no",
    "bring me a can of cold soda now",
]


def annotate_one(text: str):
    tokens = tuple(text.split())
    tags = tag_tokens(tokens, shipped_overrides())
    return tokens, tags


class TestDependencies:
    @pytest.mark.parametrize("text", SENTENCES)
    def test_parse_satisfies_core_invariants(self, text):
        # ParsedInstruction validates indices, head range, and root count
        tokens, tags = annotate_one(text)
        parse = parse_dependencies("r", tokens, tags)
        assert len(parse.tokens) == len(tokens)
        assert sum(1 for t in parse.tokens if t.head == 0) == 1

    def test_object_attaches_to_its_verb(self):
        tokens, tags = annotate_one("place water bottle into white bowl")
        parse = parse_dependencies("r", tokens, tags)
        bottle = parse.tokens[2]
        assert (bottle.head, bottle.deprel) == (1, "obj")
        bowl = parse.tokens[5]
        assert (bowl.head, bowl.deprel) == (1, "obl")

    def test_particle_joins_verb(self):
        tokens, tags = annotate_one("pick up the red block")
        parse = parse_dependencies("r", tokens, tags)
        assert (parse.tokens[1].head, parse.tokens[1].deprel) == (1, "compound:prt")

    def test_negator_gets_neg_label(self):
        tokens, tags = annotate_one("never touch the stove")
        parse = parse_dependencies("r", tokens, tags)
        assert parse.tokens[0].deprel == "neg"

    def test_subordinator_gets_mark_label(self):
        tokens, tags = annotate_one("if the light is on press the button")
        parse = parse_dependencies("r", tokens, tags)
        assert parse.tokens[0].deprel == "mark"

    def test_second_verb_conjoins(self):
        tokens, tags = annotate_one("wipe the counter and close the drawer")
        parse = parse_dependencies("r", tokens, tags)
        close = parse.tokens[4]
        assert (close.head, close.deprel) == (1, "conj")

    @pytest.mark.parametrize(
        ("text", "flag"),
        [
            ("never touch the stove", "negation"),
            ("if the light is on press the button", "conditional"),
            ("wipe the counter and close the drawer", "multi_step"),
        ],
    )
    def test_detectors_fire_on_rule_parses(self, text, flag):
        tokens, tags = annotate_one(text)
        parse = parse_dependencies("r1", tokens, tags)
        rec = build_corpus([("r1", text)], "d").records[0]
        assert getattr(detect_structures(rec, parse=parse), flag)


class TestTrees:
    @pytest.mark.parametrize("text", SENTENCES)
    def test_leaves_are_the_tokens(self, text):
        tokens, tags = annotate_one(text)
        tree = build_tree("r", tokens, tags)
        assert tree.leaves() == tokens

    @pytest.mark.parametrize("text", SENTENCES)
    def test_bracketed_round_trip(self, text):
        tokens, tags = annotate_one(text)
        tree = build_tree("r", tokens, tags)
        assert parse_ptb(format_ptb(tree.root)) == tree.root

    def test_kernel_accepts_built_trees(self):
        ta = build_tree("a", *annotate_one("pick up the red block"))
        tb = build_tree("b", *annotate_one("pick up the blue cup"))
        assert tree_kernel(ta.root, ta.root) == pytest.approx(1.0)
        assert 0.0 < tree_kernel(ta.root, tb.root) <= 1.0

    def test_empty_sentence_rejected(self):
        with pytest.raises(ValueError, match="no tokens"):
            build_tree("r", (), ())
