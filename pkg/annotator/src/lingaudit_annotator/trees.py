"""Chunked constituency trees for tagged sentences.

Tokens are grouped into flat chunks (noun phrases, prepositional
phrases, verb-plus-particle groups, adverb phrases), then the chunks are
joined on a right-branching spine of S nodes.  Preterminals carry the
UPOS tag so the trees compose with tag-level tree kernels.
"""

from __future__ import annotations

from lingaudit import ConstituencyTree, TreeNode

from lingaudit_annotator.tagging import _PARTICLES

TREE_PARSER_ID = "chunk-rightbranch-v1"

_NP_TAGS = ("DET", "ADJ", "NUM", "NOUN", "PROPN", "PRON")


def build_tree(rec_id: str, tokens: tuple[str, ...], tags: tuple[str, ...]) -> ConstituencyTree:
    if not tokens:
        raise ValueError(f"record {rec_id!r} has no tokens to tree")
    chunks = _chunk(tokens, tags)
    return ConstituencyTree(id=rec_id, root=TreeNode("S", tuple(_spine(chunks))))


def _leaf(token: str, tag: str) -> TreeNode:
    return TreeNode(tag, (TreeNode(token, ()),))


def _chunk(tokens: tuple[str, ...], tags: tuple[str, ...]) -> list[TreeNode]:
    chunks: list[TreeNode] = []
    i, n = 0, len(tokens)
    while i < n:
        tag = tags[i]
        if tag in _NP_TAGS:
            j = i
            while j < n and tags[j] in _NP_TAGS:
                j += 1
            leaves = tuple(_leaf(tokens[k], tags[k]) for k in range(i, j))
            chunks.append(TreeNode("NP", leaves))
            i = j
        elif tag == "ADP" and i + 1 < n and tags[i + 1] in _NP_TAGS:
            j = i + 1
            while j < n and tags[j] in _NP_TAGS:
                j += 1
            inner = tuple(_leaf(tokens[k], tags[k]) for k in range(i + 1, j))
            chunks.append(TreeNode("PP", (_leaf(tokens[i], tag), TreeNode("NP", inner))))
            i = j
        elif tag == "VERB":
            parts = [_leaf(tokens[i], tag)]
            if i + 1 < n and tokens[i + 1] in _PARTICLES and tags[i + 1] in ("ADP", "ADV"):
                parts.append(_leaf(tokens[i + 1], tags[i + 1]))
                i += 1
            chunks.append(TreeNode("VP", tuple(parts)))
            i += 1
        elif tag == "ADV":
            chunks.append(TreeNode("ADVP", (_leaf(tokens[i], tag),)))
            i += 1
        else:
            chunks.append(TreeNode("X", (_leaf(tokens[i], tag),)))
            i += 1
    return chunks


def _spine(chunks: list[TreeNode]) -> tuple[TreeNode, ...]:
    """Right-branching join: (c1, S(c2, S(c3, ...)))."""
    if len(chunks) <= 2:
        return tuple(chunks)
    return (chunks[0], TreeNode("S", tuple(_spine(chunks[1:]))))
