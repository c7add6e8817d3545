import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    corpus_from_texts,
    random_tuple_tree,
    record,
    se500,
    simple_parse,
    tuple_to_node,
)
from lingaudit.ingest import ParsedInstruction, TokenAnnotation, TreeNode
from lingaudit.structural import (
    StructureLabel,
    _raw_kernel,
    _TreeIndex,
    detect_structures,
    mean_pairwise_tree_kernel,
    pos_pattern_frequencies,
    structure_report,
    tree_kernel,
)
from oracles import binomial_se, tree_kernel_raw_reference, tree_kernel_reference


def tok(index, form, upos, head, deprel, lemma=None):
    return TokenAnnotation(
        index=index, form=form, lemma=lemma or form, upos=upos, head=head, deprel=deprel
    )


class TestPosPatterns:
    def test_ordering_frequency_and_exemplar(self):
        corpus = corpus_from_texts(["go left", "go right", "stop", "go LEFT"], "d")
        parses = {}
        for rec in corpus.records:
            tags = ["VERB"] + ["ADV"] * (len(rec.tokens) - 1)
            parses[rec.id] = ParsedInstruction(
                id=rec.id,
                tokens=tuple(
                    tok(i + 1, t, tag, 0 if i == 0 else 1, "root" if i == 0 else "advmod")
                    for i, (t, tag) in enumerate(zip(rec.tokens, tags))
                ),
            )
        stats = pos_pattern_frequencies(corpus, parses)
        # "go left" repeats, so there are 3 unique sentences
        assert stats[0].pattern == ("VERB", "ADV")
        assert stats[0].count == 2
        assert stats[0].frequency == pytest.approx(2 / 3)
        assert stats[0].exemplar == "go left"
        assert stats[1].pattern == ("VERB",)
        assert math.fsum(s.frequency for s in stats) == pytest.approx(1.0)

    def test_tie_broken_by_pattern_string(self):
        corpus = corpus_from_texts(["go", "now"], "d")
        parses = {
            corpus.records[0].id: ParsedInstruction(
                id=corpus.records[0].id, tokens=(tok(1, "go", "VERB", 0, "root"),)
            ),
            corpus.records[1].id: ParsedInstruction(
                id=corpus.records[1].id, tokens=(tok(1, "now", "ADV", 0, "root"),)
            ),
        }
        stats = pos_pattern_frequencies(corpus, parses)
        assert [s.pattern for s in stats] == [("ADV",), ("VERB",)]

    def test_missing_parse_named(self):
        corpus = corpus_from_texts(["go left", "stop"], "d")
        parses = {corpus.records[0].id: simple_parse(corpus.records[0].id, ("go", "left"))}
        with pytest.raises(ValueError, match="missing parse for record"):
            pos_pattern_frequencies(corpus, parses)


class TestTreeKernel:
    def tree(self, text):
        from lingaudit.ingest import parse_ptb

        return parse_ptb(text)

    def test_identity_is_one(self):
        t = self.tree("(S (NP (DET the) (NOUN cup)) (VP (VERB take)))")
        assert tree_kernel(t, t) == pytest.approx(1.0)

    def test_disjoint_is_zero(self):
        a = self.tree("(S (NP x))")
        b = self.tree("(T (VP y))")
        assert tree_kernel(a, b) == 0.0

    def test_lambda_validated(self):
        t = self.tree("(S x)")
        with pytest.raises(ValueError, match="lambda"):
            tree_kernel(t, t, lam=0.0)
        with pytest.raises(ValueError, match="lambda"):
            tree_kernel(t, t, lam=1.5)
        assert tree_kernel(t, t, lam=1.0) == pytest.approx(1.0)

    def test_leaf_root_rejected(self):
        with pytest.raises(ValueError, match="root has no children"):
            tree_kernel(TreeNode(label="S"), TreeNode(label="S"))

    def test_clamped_to_one(self):
        a = self.tree("(S (A x) (A x) (A x))")
        assert tree_kernel(a, a) <= 1.0

    @given(
        seed=st.integers(min_value=0, max_value=5000),
        lam=st.sampled_from([0.2, 0.4, 1.0]),
    )
    @settings(max_examples=150, deadline=None)
    def test_matches_enumeration_oracle(self, seed, lam):
        rng = np.random.default_rng(seed)
        ta = random_tuple_tree(rng, 6)
        tb = random_tuple_tree(rng, 6)
        got = tree_kernel(tuple_to_node(ta), tuple_to_node(tb), lam=lam)
        want = min(1.0, tree_kernel_reference(ta, tb, lam))
        assert got == pytest.approx(want, abs=1e-9)

    @given(seed=st.integers(min_value=0, max_value=5000))
    @settings(max_examples=100, deadline=None)
    def test_raw_kernel_non_decreasing_in_lambda(self, seed):
        # the unnormalized count grows with lambda; the normalized score
        # need not (shared fragments can grow slower than the self terms)
        rng = np.random.default_rng(seed)
        ta = _TreeIndex(tuple_to_node(random_tuple_tree(rng, 6)))
        tb = _TreeIndex(tuple_to_node(random_tuple_tree(rng, 6)))
        values = [_raw_kernel(ta, tb, lam) for lam in (0.1, 0.4, 0.7, 1.0)]
        for lo, hi in zip(values, values[1:]):
            assert hi >= lo - 1e-12

    @given(seed=st.integers(min_value=0, max_value=5000))
    @settings(max_examples=80, deadline=None)
    def test_raw_matches_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        ta = random_tuple_tree(rng, 6)
        tb = random_tuple_tree(rng, 6)
        got = _raw_kernel(_TreeIndex(tuple_to_node(ta)), _TreeIndex(tuple_to_node(tb)), 0.4)
        assert got == pytest.approx(tree_kernel_raw_reference(ta, tb, 0.4), abs=1e-9)

    def test_mean_pairwise_is_mean_of_pairs(self):
        trees = [
            self.tree("(S (NP (DET the) (NOUN cup)))"),
            self.tree("(S (NP (DET the) (NOUN plate)))"),
            self.tree("(S (VP (VERB go)))"),
        ]
        want = (
            tree_kernel(trees[0], trees[1])
            + tree_kernel(trees[0], trees[2])
            + tree_kernel(trees[1], trees[2])
        ) / 3
        assert mean_pairwise_tree_kernel(trees, 0.4) == pytest.approx(want, abs=1e-12)

    def test_mean_pairwise_needs_two(self):
        with pytest.raises(ValueError, match="at least two"):
            mean_pairwise_tree_kernel([self.tree("(S x)")], 0.4)


class TestDetectors:
    def detect(self, text, parse=None):
        return detect_structures(record("r", text), parse=parse)

    def test_exemplars_match_hand_labels(
        self, exemplar_corpus, exemplar_parses, exemplar_expected
    ):
        for rec in exemplar_corpus:
            got = detect_structures(rec, parse=exemplar_parses[rec.id])
            want = StructureLabel(**exemplar_expected[rec.id])
            assert got == want, rec.id

    def test_negation_lexicon_tokens(self):
        assert self.detect("don't touch that").negation
        assert self.detect("never cross the line").negation
        assert self.detect("move the block").negation is False

    def test_bare_no_only_sentence_initial(self):
        assert self.detect("no running in the hall").negation
        assert self.detect("there is no spoon").negation is False

    def test_conditional_token_path_needs_leading_if(self):
        assert self.detect("if it beeps stop").conditional
        assert self.detect("ask if it beeps").conditional is False

    def test_conditional_parse_path(self):
        parsed = ParsedInstruction(
            id="r",
            tokens=(
                tok(1, "stop", "VERB", 0, "root"),
                tok(2, "when", "SCONJ", 3, "mark"),
                tok(3, "done", "ADJ", 1, "advcl"),
            ),
        )
        assert self.detect("stop when done", parsed).conditional

    def test_multi_step_then_token(self):
        assert self.detect("grab the cup then pour").multi_step
        assert self.detect("grab the cup").multi_step is False

    def test_multi_step_conjoined_verbs(self):
        parsed = ParsedInstruction(
            id="r",
            tokens=(
                tok(1, "open", "VERB", 0, "root"),
                tok(2, "and", "CCONJ", 3, "cc"),
                tok(3, "close", "VERB", 1, "conj"),
            ),
        )
        assert self.detect("open and close", parsed).multi_step

    def test_cycle_lexicon(self):
        assert self.detect("stir the pot again").cycle
        assert self.detect("keep moving forward").cycle
        assert self.detect("move forward").cycle is False

    def test_monotone_parse_adds_flags_only(self):
        # a parse can add detections but never remove token-level ones
        text = "pour the tea then wait"
        parsed = simple_parse("r", tuple(text.split()))
        token_only = self.detect(text)
        with_parse = self.detect(text, parsed)
        for flag in ("negation", "conditional", "multi_step", "cycle"):
            assert getattr(with_parse, flag) >= getattr(token_only, flag)


class TestStructureReport:
    def test_counts_and_fractions(self):
        corpus = corpus_from_texts(
            ["don't stop", "if ready go", "walk then run", "loop forever", "plain move"],
            "d",
        )
        report = structure_report(corpus)
        assert report.n_sentences == 5
        assert report.flags["negation"].count == 1
        assert report.flags["conditional"].count == 1
        assert report.flags["multi_step"].count == 1
        assert report.flags["cycle"].count == 1
        assert report.flags["negation"].fraction == pytest.approx(0.2)
        assert report.gold_size == 0
        assert report.flags["negation"].disagreement is None

    def test_gold_disagreement_and_se(self):
        corpus, gold = se500()
        report = structure_report(corpus, gold=gold)
        flag = report.flags["multi_step"]
        assert report.gold_size == 500
        assert flag.disagreement == pytest.approx(0.05)
        assert flag.standard_error == pytest.approx(binomial_se(0.05, 500), abs=1e-15)
        # perfect agreement elsewhere
        assert report.flags["negation"].disagreement == 0.0
        assert report.flags["negation"].standard_error == 0.0

    def test_gold_ids_must_exist(self):
        corpus = corpus_from_texts(["go left"], "d")
        from lingaudit.ingest import GoldStructureLabels

        gold = GoldStructureLabels(
            labels={"ghost": StructureLabel(False, False, False, False)}, annotators={}
        )
        with pytest.raises(ValueError, match="gold ids not in corpus"):
            structure_report(corpus, gold=gold)
