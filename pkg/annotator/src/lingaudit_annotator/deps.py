"""Rule dependency parser over tagged tokens.

The grammar is deliberately small: the first verb is the root, later
verbs conjoin to it, nominal runs attach to their nearest verb, and
function words attach forward to the phrase they introduce.  Forward
searches never cross a verb, so clauses stay self-contained.  The output
always satisfies the core's parse invariants (sequential indices, a
root, no self-heads).
"""

from __future__ import annotations

from lingaudit import ParsedInstruction, TokenAnnotation

from lingaudit_annotator.tagging import _PARTICLES, lemma_of

PARSER_ID = "ruledep-v1"

_NOMINAL = ("NOUN", "PROPN", "PRON")
_NEGATORS = frozenset({"not", "never", "n't"})


def parse_dependencies(
    rec_id: str, tokens: tuple[str, ...], tags: tuple[str, ...]
) -> ParsedInstruction:
    n = len(tokens)
    lemmas = tuple(lemma_of(tok, tag) for tok, tag in zip(tokens, tags))
    verbs = [i for i in range(n) if tags[i] == "VERB"]

    root = _pick_root(tags, verbs)
    heads = [0] * n
    deprels = [""] * n
    heads[root], deprels[root] = 0, "root"

    run_final = _nominal_run_finals(tags)
    obj_taken: set[int] = set()

    def gov(i: int) -> int:
        best = root
        for v in verbs:
            if v >= i:
                break
            best = v
        return best

    def next_verb(i: int) -> int | None:
        for v in verbs:
            if v > i:
                return v
        return None

    def next_nominal_final(i: int) -> int | None:
        for j in range(i + 1, n):
            if tags[j] == "VERB":
                return None
            if tags[j] in _NOMINAL:
                return run_final[j]
        return None

    for i in range(n):
        if i == root or tags[i] == "VERB":
            continue
        tok, tag = tokens[i], tags[i]
        if lemmas[i] in _NEGATORS:
            heads[i], deprels[i] = _verbward(i, next_verb, gov), "neg"
        elif tag == "DET":
            target = next_nominal_final(i)
            heads[i] = target + 1 if target is not None else gov(i) + 1
            deprels[i] = "det"
        elif tag == "ADJ":
            target = next_nominal_final(i)
            heads[i] = target + 1 if target is not None else gov(i) + 1
            deprels[i] = "amod"
        elif tag == "NUM":
            target = next_nominal_final(i)
            if target is not None:
                heads[i], deprels[i] = target + 1, "nummod"
            else:
                heads[i], deprels[i] = gov(i) + 1, "obj" if gov(i) not in obj_taken else "obl"
                obj_taken.add(gov(i))
        elif tag in ("NOUN", "PROPN", "PRON"):
            if tag != "PRON" and run_final[i] != i:
                heads[i], deprels[i] = run_final[i] + 1, "compound"
            else:
                g = gov(i)
                if _has_left_case(i, tags, run_final):
                    heads[i], deprels[i] = g + 1, "obl"
                elif i < g:
                    heads[i], deprels[i] = g + 1, "nsubj"
                elif g not in obj_taken:
                    heads[i], deprels[i] = g + 1, "obj"
                    obj_taken.add(g)
                else:
                    heads[i], deprels[i] = g + 1, "obl"
        elif tag == "ADP":
            if i > 0 and i - 1 in verbs and tok in _PARTICLES:
                heads[i], deprels[i] = i, "compound:prt"
            else:
                target = next_nominal_final(i)
                if target is not None:
                    heads[i], deprels[i] = target + 1, "case"
                else:
                    heads[i], deprels[i] = _verbward(i, next_verb, gov), "advmod"
        elif tag == "ADV":
            if i > 0 and i - 1 in verbs and tok in _PARTICLES:
                heads[i], deprels[i] = i, "compound:prt"
            else:
                heads[i], deprels[i] = _verbward(i, next_verb, gov), "advmod"
        elif tag == "AUX":
            heads[i], deprels[i] = _verbward(i, next_verb, gov), "aux"
        elif tag == "SCONJ":
            heads[i], deprels[i] = _clauseward(i, tags, gov), "mark"
        elif tag == "CCONJ":
            heads[i], deprels[i] = _contentward(i, tags, gov), "cc"
        elif tag == "PART":
            heads[i], deprels[i] = _verbward(i, next_verb, gov), "mark"
        else:
            heads[i], deprels[i] = gov(i) + 1, "dep"

    # verbs other than the root conjoin to it
    for v in verbs:
        if v != root:
            heads[v], deprels[v] = root + 1, "conj"

    # a head may never point at its own token
    for i in range(n):
        if heads[i] == i + 1:
            heads[i] = root + 1 if i != root else 0

    annotations = tuple(
        TokenAnnotation(
            index=i + 1, form=tokens[i], lemma=lemmas[i], upos=tags[i],
            head=heads[i], deprel=deprels[i],
        )
        for i in range(n)
    )
    return ParsedInstruction(id=rec_id, tokens=annotations)


def _pick_root(tags: tuple[str, ...], verbs: list[int]) -> int:
    if verbs:
        return verbs[0]
    for i, tag in enumerate(tags):
        if tag == "AUX":
            return i
    run_final = _nominal_run_finals(tags)
    for i, tag in enumerate(tags):
        if tag in _NOMINAL:
            return run_final[i]
    return 0


def _nominal_run_finals(tags: tuple[str, ...]) -> list[int]:
    """Map each position to the last index of its NOUN/PROPN run."""
    n = len(tags)
    finals = list(range(n))
    i = n - 2
    while i >= 0:
        if tags[i] in ("NOUN", "PROPN") and tags[i + 1] in ("NOUN", "PROPN"):
            finals[i] = finals[i + 1]
        i -= 1
    return finals


def _has_left_case(i: int, tags: tuple[str, ...], run_final: list[int]) -> bool:
    start = i
    while start > 0 and run_final[start - 1] == i and tags[start - 1] in ("NOUN", "PROPN"):
        start -= 1
    p = start - 1
    while p >= 0 and tags[p] in ("DET", "ADJ", "NUM"):
        p -= 1
    return p >= 0 and tags[p] == "ADP"


def _verbward(i: int, next_verb, gov) -> int:
    target = next_verb(i)
    if target is None:
        target = gov(i)
    return target + 1


def _clauseward(i: int, tags: tuple[str, ...], gov) -> int:
    for j in range(i + 1, len(tags)):
        if tags[j] in ("VERB", "AUX"):
            return j + 1
    return gov(i) + 1


def _contentward(i: int, tags: tuple[str, ...], gov) -> int:
    content = ("VERB", "AUX", "NOUN", "PROPN", "PRON", "ADJ", "ADV")
    for j in range(i + 1, len(tags)):
        if tags[j] in content:
            return j + 1
    return gov(i) + 1
