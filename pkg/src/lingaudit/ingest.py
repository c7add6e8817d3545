"""Readers and writers for every on-disk format the auditor understands.

Formats: corpus JSONL, CoNLL-U dependency parses, PTB-style constituency
trees in JSONL, sentence embeddings (binary ICEM + JSONL row index),
per-token embeddings (binary ICTE), and gold structure labels in JSONL.

All readers are strict: malformed input raises :class:`IngestError` with
the file, line or byte offset, and what was wrong.  Nothing is repaired
or silently skipped.  Writers produce files the readers round-trip
exactly, including bit-identical floats.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator, Mapping, Sequence

import numpy as np

from lingaudit.model import Corpus, build_corpus

UPOS_TAGS = frozenset(
    {
        "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
        "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
    }
)

STRUCTURE_FLAGS = ("negation", "conditional", "multi_step", "cycle")

_ICEM_MAGIC = b"ICEM"
_ICTE_MAGIC = b"ICTE"
_FORMAT_VERSION = 1
_MAX_DIMS = 8192
_MAX_ID_BYTES = 4096


class IngestError(ValueError):
    """Malformed input file; the message carries the location."""


def _fail(path: str | Path, message: str, line: int | None = None) -> None:
    where = f"{path}:{line}" if line is not None else str(path)
    raise IngestError(f"{where}: {message}")


# ---------------------------------------------------------------------------
# corpus JSONL


def read_corpus(
    path: str | Path,
    dataset_id: str | None = None,
    cleaner: str = "default",
) -> Corpus:
    """Read a corpus from JSONL rows of ``{"id", "text"[, "dataset"]}``.

    The dataset id is resolved from the argument, else a consistent
    ``dataset`` key in the rows, else the file stem.  Rows whose text
    normalizes to nothing are dropped with a warning; structurally bad
    rows are errors.
    """
    path = Path(path)
    rows: list[tuple[str, str]] = []
    seen_ids: set[str] = set()
    row_datasets: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                _fail(path, f"invalid JSON ({exc.msg})", lineno)
            if not isinstance(obj, dict):
                _fail(path, "row is not a JSON object", lineno)
            extra = set(obj) - {"id", "text", "dataset"}
            if extra:
                _fail(path, f"unexpected keys {sorted(extra)}", lineno)
            rec_id = obj.get("id")
            text = obj.get("text")
            if not isinstance(rec_id, str) or not rec_id:
                _fail(path, "missing or empty 'id'", lineno)
            if not isinstance(text, str) or not text:
                _fail(path, f"record {rec_id!r}: missing or empty 'text'", lineno)
            if rec_id in seen_ids:
                _fail(path, f"duplicate record id {rec_id!r}", lineno)
            seen_ids.add(rec_id)
            if "dataset" in obj:
                if not isinstance(obj["dataset"], str) or not obj["dataset"]:
                    _fail(path, f"record {rec_id!r}: invalid 'dataset'", lineno)
                row_datasets.add(obj["dataset"])
            rows.append((rec_id, text))
    if not rows:
        _fail(path, "no records")
    if len(row_datasets) > 1:
        _fail(path, f"conflicting dataset ids {sorted(row_datasets)}")
    resolved = dataset_id or (row_datasets.pop() if row_datasets else path.stem)
    return build_corpus(rows, resolved, str(path), cleaner)


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    """Serialize the cleaned text; it is a fixed point of every cleaner."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in corpus.records:
            row = {"id": rec.id, "text": rec.clean_text, "dataset": rec.dataset_id}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# dependency parses (CoNLL-U)


@dataclass(frozen=True, slots=True)
class TokenAnnotation:
    """One parsed token: 1-based index, surface, lemma, UPOS, head, deprel."""

    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str

    def __post_init__(self) -> None:
        if self.upos not in UPOS_TAGS:
            raise ValueError(f"invalid UPOS tag {self.upos!r}")
        if not self.form or not self.lemma or not self.deprel:
            raise ValueError(f"token {self.index}: empty form, lemma, or deprel")


@dataclass(frozen=True, slots=True)
class ParsedInstruction:
    """Dependency parse of one instruction."""

    id: str
    tokens: tuple[TokenAnnotation, ...]

    def __post_init__(self) -> None:
        n = len(self.tokens)
        if n == 0:
            raise ValueError(f"parse {self.id!r} has no tokens")
        roots = 0
        for pos, tok in enumerate(self.tokens, start=1):
            if tok.index != pos:
                raise ValueError(f"parse {self.id!r}: token indices not sequential")
            if not (0 <= tok.head <= n) or tok.head == tok.index:
                raise ValueError(
                    f"parse {self.id!r}: token {tok.index} has invalid head {tok.head}"
                )
            if tok.head == 0:
                roots += 1
        if roots == 0:
            raise ValueError(f"parse {self.id!r} has no root token")

    def head_of(self, token: TokenAnnotation) -> TokenAnnotation | None:
        return self.tokens[token.head - 1] if token.head > 0 else None

    def children_of(self, token: TokenAnnotation) -> tuple[TokenAnnotation, ...]:
        return tuple(t for t in self.tokens if t.head == token.index)


def read_conllu(path: str | Path, corpus: Corpus) -> dict[str, ParsedInstruction]:
    """Read CoNLL-U sentence blocks keyed by their ``sent_id`` comments.

    Every block must name a record of ``corpus``; coverage may be partial.
    """
    path = Path(path)
    known = set(corpus.ids())
    parses: dict[str, ParsedInstruction] = {}
    sent_id: str | None = None
    sent_line = 0
    tokens: list[TokenAnnotation] = []

    def flush(lineno: int) -> None:
        nonlocal sent_id, tokens
        if sent_id is None and not tokens:
            return
        if sent_id is None:
            _fail(path, "sentence block without a '# sent_id =' comment", lineno)
        if not tokens:
            _fail(path, f"sentence {sent_id!r} has no token lines", lineno)
        if sent_id not in known:
            _fail(path, f"sentence id {sent_id!r} not in corpus", sent_line)
        if sent_id in parses:
            _fail(path, f"duplicate sentence id {sent_id!r}", sent_line)
        try:
            parses[sent_id] = ParsedInstruction(id=sent_id, tokens=tuple(tokens))
        except ValueError as exc:
            _fail(path, str(exc), sent_line)
        sent_id = None
        tokens = []

    with open(path, "r", encoding="utf-8") as fh:
        lineno = 0
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush(lineno)
                continue
            if line.startswith("#"):
                if tokens:
                    _fail(path, "comment inside a token block", lineno)
                body = line[1:].strip()
                if body.startswith("sent_id"):
                    _, sep, value = body.partition("=")
                    if not sep or not value.strip():
                        _fail(path, "malformed sent_id comment", lineno)
                    if sent_id is not None:
                        _fail(path, "repeated sent_id comment in one block", lineno)
                    sent_id = value.strip()
                    sent_line = lineno
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                _fail(path, f"expected 10 tab-separated columns, got {len(cols)}", lineno)
            idx_s, form, lemma, upos, _, _, head_s, deprel, _, _ = cols
            if "-" in idx_s or "." in idx_s:
                _fail(path, f"unsupported token index {idx_s!r}", lineno)
            try:
                idx = int(idx_s)
                head = int(head_s)
            except ValueError:
                _fail(path, f"non-integer token index or head: {idx_s!r}/{head_s!r}", lineno)
            if upos not in UPOS_TAGS:
                _fail(path, f"invalid UPOS tag {upos!r}", lineno)
            if form in ("", "_") or lemma in ("", "_") or deprel in ("", "_"):
                _fail(path, "form, lemma, and deprel must be filled in", lineno)
            try:
                tokens.append(
                    TokenAnnotation(
                        index=idx, form=form, lemma=lemma, upos=upos,
                        head=head, deprel=deprel,
                    )
                )
            except ValueError as exc:
                _fail(path, str(exc), lineno)
        flush(lineno + 1)
    if not parses:
        _fail(path, "no sentence blocks")
    return parses


def write_conllu(
    parses: Mapping[str, ParsedInstruction],
    path: str | Path,
    order: Sequence[str] | None = None,
) -> None:
    ids = list(order) if order is not None else list(parses)
    with open(path, "w", encoding="utf-8") as fh:
        for rec_id in ids:
            parse = parses[rec_id]
            fh.write(f"# sent_id = {rec_id}\n")
            for tok in parse.tokens:
                fh.write(
                    f"{tok.index}\t{tok.form}\t{tok.lemma}\t{tok.upos}"
                    f"\t_\t_\t{tok.head}\t{tok.deprel}\t_\t_\n"
                )
            fh.write("\n")


# ---------------------------------------------------------------------------
# constituency trees (PTB strings in JSONL)


@dataclass(frozen=True, slots=True)
class TreeNode:
    """Constituency node; a node without children is a leaf token."""

    label: str
    children: tuple["TreeNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True, slots=True)
class ConstituencyTree:
    id: str
    root: TreeNode

    def __post_init__(self) -> None:
        if self.root.is_leaf:
            raise ValueError(f"tree {self.id!r}: root has no children")

    def leaves(self) -> tuple[str, ...]:
        out: list[str] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.label)
            else:
                stack.extend(reversed(node.children))
        return tuple(out)


def parse_ptb(text: str) -> TreeNode:
    """Parse one bracketed tree, e.g. ``(S (NP (NOUN robot)) (VP (VERB go)))``.

    Raises :class:`IngestError` with a character offset on malformed input.
    """
    pos = 0
    n = len(text)

    def skip_ws() -> None:
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def read_atom() -> str:
        nonlocal pos
        start = pos
        while pos < n and not text[pos].isspace() and text[pos] not in "()":
            pos += 1
        return text[start:pos]

    def read_node() -> TreeNode:
        nonlocal pos
        skip_ws()
        if pos >= n or text[pos] != "(":
            raise IngestError(f"expected '(' at offset {pos}")
        open_at = pos
        pos += 1
        skip_ws()
        label = read_atom()
        if not label:
            raise IngestError(f"empty label at offset {pos}")
        children: list[TreeNode] = []
        while True:
            skip_ws()
            if pos >= n:
                raise IngestError(f"unbalanced parentheses at offset {open_at}")
            if text[pos] == ")":
                pos += 1
                break
            if text[pos] == "(":
                children.append(read_node())
            else:
                token = read_atom()
                children.append(TreeNode(label=token))
        if not children:
            raise IngestError(f"node {label!r} has no children at offset {open_at}")
        return TreeNode(label=label, children=tuple(children))

    root = read_node()
    skip_ws()
    if pos != n:
        raise IngestError(f"trailing content at offset {pos}")
    return root


def format_ptb(node: TreeNode) -> str:
    def emit(nd: TreeNode) -> str:
        if any(ch in nd.label for ch in " ()\t\n") or not nd.label:
            raise ValueError(f"label {nd.label!r} cannot be serialized")
        if nd.is_leaf:
            return nd.label
        return "(" + nd.label + " " + " ".join(emit(c) for c in nd.children) + ")"

    return emit(node)


def read_trees(path: str | Path, corpus: Corpus) -> dict[str, ConstituencyTree]:
    """Read JSONL rows of ``{"id", "ptb"}`` into trees keyed by record id."""
    path = Path(path)
    known = set(corpus.ids())
    trees: dict[str, ConstituencyTree] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                _fail(path, f"invalid JSON ({exc.msg})", lineno)
            if not isinstance(obj, dict) or set(obj) != {"id", "ptb"}:
                _fail(path, "row must be an object with exactly 'id' and 'ptb'", lineno)
            rec_id, ptb = obj["id"], obj["ptb"]
            if not isinstance(rec_id, str) or not rec_id:
                _fail(path, "missing or empty 'id'", lineno)
            if not isinstance(ptb, str):
                _fail(path, f"tree {rec_id!r}: 'ptb' must be a string", lineno)
            if rec_id not in known:
                _fail(path, f"tree id {rec_id!r} not in corpus", lineno)
            if rec_id in trees:
                _fail(path, f"duplicate tree id {rec_id!r}", lineno)
            try:
                root = parse_ptb(ptb)
                trees[rec_id] = ConstituencyTree(id=rec_id, root=root)
            except (IngestError, ValueError) as exc:
                _fail(path, f"tree {rec_id!r}: {exc}", lineno)
    if not trees:
        _fail(path, "no trees")
    return trees


def write_trees(
    trees: Mapping[str, ConstituencyTree],
    path: str | Path,
    order: Sequence[str] | None = None,
) -> None:
    ids = list(order) if order is not None else list(trees)
    with open(path, "w", encoding="utf-8") as fh:
        for rec_id in ids:
            row = {"id": rec_id, "ptb": format_ptb(trees[rec_id].root)}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# sentence embeddings (ICEM binary + JSONL index)


@dataclass(frozen=True, slots=True)
class EmbeddingMatrix:
    """Sentence embeddings: one float32 row per record, in index order."""

    ids: tuple[str, ...]
    matrix: np.ndarray
    encoder_id: str

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2 or self.matrix.dtype != np.float32:
            raise ValueError("matrix must be a 2-D float32 array")
        if self.matrix.shape[0] != len(self.ids):
            raise ValueError("row count does not match id count")
        if self.matrix.shape[0] == 0:
            raise ValueError("embedding matrix is empty")

    @property
    def dims(self) -> int:
        return int(self.matrix.shape[1])


def _read_icem_header(fh: IO[bytes], path: Path) -> tuple[int, int]:
    header = fh.read(13)
    if len(header) < 13:
        _fail(path, f"truncated header ({len(header)} bytes)")
    magic, version, n_rows, dims = struct.unpack("<4sBII", header)
    if magic != _ICEM_MAGIC:
        _fail(path, f"bad magic {magic!r}, expected {_ICEM_MAGIC!r}")
    if version != _FORMAT_VERSION:
        _fail(path, f"unsupported version {version}")
    if not (1 <= dims <= _MAX_DIMS):
        _fail(path, f"dims {dims} out of range 1..{_MAX_DIMS}")
    if n_rows == 0:
        _fail(path, "empty embedding matrix")
    return n_rows, dims


def embedding_shape(path: str | Path) -> tuple[int, int]:
    """Return (n_rows, dims) from an embedding file header, with size check."""
    path = Path(path)
    with open(path, "rb") as fh:
        n_rows, dims = _read_icem_header(fh, path)
    expected = 13 + 4 * n_rows * dims
    actual = path.stat().st_size
    if actual != expected:
        _fail(path, f"file is {actual} bytes, header implies {expected}")
    return n_rows, dims


def iter_embedding_chunks(
    path: str | Path, chunk_rows: int = 8192
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (start_row, float32 chunk) pairs without loading the whole file."""
    path = Path(path)
    n_rows, dims = embedding_shape(path)
    row_bytes = 4 * dims
    with open(path, "rb") as fh:
        fh.seek(13)
        start = 0
        while start < n_rows:
            count = min(chunk_rows, n_rows - start)
            raw = fh.read(count * row_bytes)
            if len(raw) != count * row_bytes:
                _fail(path, f"unexpected EOF at row {start}")
            chunk = np.frombuffer(raw, dtype="<f4").reshape(count, dims)
            finite = np.isfinite(chunk).all(axis=1)
            if not finite.all():
                bad = start + int(np.argmin(finite))
                _fail(path, f"non-finite value in row {bad}")
            yield start, chunk
            start += count


def _read_embedding_index(
    index_path: str | Path, n_rows: int
) -> tuple[tuple[str, ...], str | None]:
    index_path = Path(index_path)
    ids: list[str] = []
    seen: set[str] = set()
    encoders: set[str] = set()
    with open(index_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                _fail(index_path, f"invalid JSON ({exc.msg})", lineno)
            if not isinstance(obj, dict) or not {"row", "id"} <= set(obj) or (
                set(obj) - {"row", "id", "encoder"}
            ):
                _fail(
                    index_path,
                    "row must be an object with 'row', 'id'[, 'encoder']",
                    lineno,
                )
            if obj["row"] != len(ids):
                _fail(index_path, f"expected row {len(ids)}, got {obj['row']!r}", lineno)
            rec_id = obj["id"]
            if not isinstance(rec_id, str) or not rec_id:
                _fail(index_path, "missing or empty 'id'", lineno)
            if rec_id in seen:
                _fail(index_path, f"duplicate id {rec_id!r}", lineno)
            seen.add(rec_id)
            if "encoder" in obj:
                if not isinstance(obj["encoder"], str) or not obj["encoder"]:
                    _fail(index_path, "invalid 'encoder'", lineno)
                encoders.add(obj["encoder"])
            ids.append(rec_id)
    if len(ids) != n_rows:
        _fail(index_path, f"index has {len(ids)} rows, data file has {n_rows}")
    if len(encoders) > 1:
        _fail(index_path, f"conflicting encoder ids {sorted(encoders)}")
    return tuple(ids), (encoders.pop() if encoders else None)


def read_embeddings(
    data_path: str | Path,
    index_path: str | Path,
    encoder_id: str | None = None,
) -> EmbeddingMatrix:
    """Read a sentence-embedding matrix plus its row index.

    The encoder id resolves from the argument, else a consistent
    ``encoder`` key in the index, else the data file stem.
    """
    data_path = Path(data_path)
    n_rows, dims = embedding_shape(data_path)
    parts = [chunk for _, chunk in iter_embedding_chunks(data_path)]
    matrix = np.vstack(parts) if len(parts) > 1 else parts[0].copy()
    ids, index_encoder = _read_embedding_index(index_path, n_rows)
    resolved = encoder_id or index_encoder or data_path.stem
    return EmbeddingMatrix(ids=ids, matrix=matrix, encoder_id=resolved)


@dataclass(frozen=True, slots=True)
class SentenceEmbeddingSource:
    """Handle to an on-disk embedding matrix: ids loaded, rows streamed."""

    data_path: str
    index_path: str
    ids: tuple[str, ...]
    encoder_id: str
    dims: int


def open_embedding_source(
    data_path: str | Path,
    index_path: str | Path,
    encoder_id: str | None = None,
) -> SentenceEmbeddingSource:
    """Validate an embedding file pair and read only its index."""
    data_path = Path(data_path)
    n_rows, dims = embedding_shape(data_path)
    ids, index_encoder = _read_embedding_index(index_path, n_rows)
    resolved = encoder_id or index_encoder or data_path.stem
    return SentenceEmbeddingSource(
        data_path=str(data_path),
        index_path=str(index_path),
        ids=ids,
        encoder_id=resolved,
        dims=dims,
    )


def write_embeddings(
    emb: EmbeddingMatrix, data_path: str | Path, index_path: str | Path
) -> None:
    n_rows, dims = emb.matrix.shape
    with open(data_path, "wb") as fh:
        fh.write(struct.pack("<4sBII", _ICEM_MAGIC, _FORMAT_VERSION, n_rows, dims))
        fh.write(np.ascontiguousarray(emb.matrix, dtype="<f4").tobytes())
    with open(index_path, "w", encoding="utf-8") as fh:
        for row, rec_id in enumerate(emb.ids):
            obj = {"row": row, "id": rec_id, "encoder": emb.encoder_id}
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# per-token embeddings (ICTE binary)


@dataclass(frozen=True, slots=True)
class TokenEmbeddingSet:
    """Per-token embedding arrays keyed by record id; shared column count."""

    arrays: dict[str, np.ndarray]
    dims: int
    encoder_id: str | None = None

    def __post_init__(self) -> None:
        if not self.arrays:
            raise ValueError("token embedding set is empty")
        for rec_id, arr in self.arrays.items():
            if arr.ndim != 2 or arr.dtype != np.float32 or arr.shape[1] != self.dims:
                raise ValueError(f"array for {rec_id!r} must be float32 (n, {self.dims})")
            if arr.shape[0] == 0:
                raise ValueError(f"array for {rec_id!r} has no token rows")

    def ids(self) -> tuple[str, ...]:
        return tuple(self.arrays)


def read_token_embeddings(
    path: str | Path, encoder_id: str | None = None
) -> TokenEmbeddingSet:
    path = Path(path)
    arrays: dict[str, np.ndarray] = {}
    dims: int | None = None
    with open(path, "rb") as fh:
        header = fh.read(5)
        if len(header) < 5:
            _fail(path, f"truncated header ({len(header)} bytes)")
        magic, version = struct.unpack("<4sB", header)
        if magic != _ICTE_MAGIC:
            _fail(path, f"bad magic {magic!r}, expected {_ICTE_MAGIC!r}")
        if version != _FORMAT_VERSION:
            _fail(path, f"unsupported version {version}")
        record = 0
        while True:
            offset = fh.tell()
            head = fh.read(4)
            if not head:
                break
            if len(head) < 4:
                _fail(path, f"record {record}: truncated at offset {offset}")
            (id_len,) = struct.unpack("<I", head)
            if not (1 <= id_len <= _MAX_ID_BYTES):
                _fail(path, f"record {record}: id length {id_len} out of range")
            raw_id = fh.read(id_len)
            if len(raw_id) < id_len:
                _fail(path, f"record {record}: truncated id at offset {offset}")
            try:
                rec_id = raw_id.decode("utf-8")
            except UnicodeDecodeError:
                _fail(path, f"record {record}: id is not valid UTF-8")
            shape_raw = fh.read(8)
            if len(shape_raw) < 8:
                _fail(path, f"record {rec_id!r}: truncated shape at offset {offset}")
            n_tokens, rec_dims = struct.unpack("<II", shape_raw)
            if n_tokens == 0:
                _fail(path, f"record {rec_id!r}: zero token rows")
            if not (1 <= rec_dims <= _MAX_DIMS):
                _fail(path, f"record {rec_id!r}: dims {rec_dims} out of range")
            if dims is None:
                dims = rec_dims
            elif rec_dims != dims:
                _fail(path, f"record {rec_id!r}: dims {rec_dims} != {dims}")
            payload = fh.read(4 * n_tokens * rec_dims)
            if len(payload) < 4 * n_tokens * rec_dims:
                _fail(path, f"record {rec_id!r}: truncated payload at offset {offset}")
            arr = np.frombuffer(payload, dtype="<f4").reshape(n_tokens, rec_dims)
            if not np.isfinite(arr).all():
                bad = int(np.argmin(np.isfinite(arr).all(axis=1)))
                _fail(path, f"record {rec_id!r}: non-finite value in token row {bad}")
            if rec_id in arrays:
                _fail(path, f"duplicate record id {rec_id!r}")
            arrays[rec_id] = arr.copy()
            record += 1
    if dims is None:
        _fail(path, "no records")
    return TokenEmbeddingSet(arrays=arrays, dims=dims, encoder_id=encoder_id)


def write_token_embeddings(tes: TokenEmbeddingSet, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sB", _ICTE_MAGIC, _FORMAT_VERSION))
        for rec_id, arr in tes.arrays.items():
            raw_id = rec_id.encode("utf-8")
            fh.write(struct.pack("<I", len(raw_id)))
            fh.write(raw_id)
            fh.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


# ---------------------------------------------------------------------------
# gold structure labels (JSONL)


@dataclass(frozen=True, slots=True)
class StructureLabel:
    """Binary structure flags for one instruction."""

    negation: bool
    conditional: bool
    multi_step: bool
    cycle: bool

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return (self.negation, self.conditional, self.multi_step, self.cycle)


@dataclass(frozen=True, slots=True)
class GoldStructureLabels:
    """Human labels for a corpus subset, keyed by record id."""

    labels: dict[str, StructureLabel]
    annotators: dict[str, str]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("gold label set is empty")

    def __len__(self) -> int:
        return len(self.labels)


def read_gold_labels(path: str | Path, corpus: Corpus) -> GoldStructureLabels:
    """Read JSONL gold labels; ids must name records of ``corpus``."""
    path = Path(path)
    known = set(corpus.ids())
    labels: dict[str, StructureLabel] = {}
    annotators: dict[str, str] = {}
    required = {"id", *STRUCTURE_FLAGS}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                _fail(path, f"invalid JSON ({exc.msg})", lineno)
            if not isinstance(obj, dict):
                _fail(path, "row is not a JSON object", lineno)
            extra = set(obj) - required - {"annotator"}
            missing = required - set(obj)
            if extra or missing:
                _fail(
                    path,
                    f"row must have keys {sorted(required)} (optional 'annotator'); "
                    f"missing {sorted(missing)}, unexpected {sorted(extra)}",
                    lineno,
                )
            rec_id = obj["id"]
            if not isinstance(rec_id, str) or not rec_id:
                _fail(path, "missing or empty 'id'", lineno)
            if rec_id not in known:
                _fail(path, f"gold id {rec_id!r} not in corpus", lineno)
            if rec_id in labels:
                _fail(path, f"duplicate gold id {rec_id!r}", lineno)
            flags = {}
            for flag in STRUCTURE_FLAGS:
                if not isinstance(obj[flag], bool):
                    _fail(path, f"record {rec_id!r}: {flag!r} must be a boolean", lineno)
                flags[flag] = obj[flag]
            labels[rec_id] = StructureLabel(**flags)
            if "annotator" in obj:
                if not isinstance(obj["annotator"], str) or not obj["annotator"]:
                    _fail(path, f"record {rec_id!r}: invalid 'annotator'", lineno)
                annotators[rec_id] = obj["annotator"]
    if not labels:
        _fail(path, "no gold labels")
    return GoldStructureLabels(labels=labels, annotators=annotators)


def write_gold_labels(gold: GoldStructureLabels, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec_id, label in gold.labels.items():
            row: dict[str, object] = {"id": rec_id}
            for flag, value in zip(STRUCTURE_FLAGS, label.as_tuple()):
                row[flag] = value
            if rec_id in gold.annotators:
                row["annotator"] = gold.annotators[rec_id]
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
