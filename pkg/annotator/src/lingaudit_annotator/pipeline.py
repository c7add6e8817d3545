"""Batch annotation jobs and post-hoc verification.

:func:`annotate` reads a corpus, runs the rule tagger, dependency
parser, tree builder, and hashing encoder over it in batches, and writes
whichever output files the job requested, always in corpus order so
batch size never changes the bytes.  :func:`verify` re-reads a finished
output directory with the strict core readers and reports per-kind
coverage plus any violations it finds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lingaudit import (
    ConstituencyTree,
    EmbeddingMatrix,
    IngestError,
    ParsedInstruction,
    TokenEmbeddingSet,
    read_conllu,
    read_corpus,
    read_embeddings,
    read_token_embeddings,
    read_trees,
    write_conllu,
    write_embeddings,
    write_token_embeddings,
    write_trees,
)

from lingaudit_annotator import encode
from lingaudit_annotator.deps import PARSER_ID, parse_dependencies
from lingaudit_annotator.encode import AnnotatorError
from lingaudit_annotator.tagging import TAGGER_ID, load_upos_overrides, shipped_overrides, tag_tokens
from lingaudit_annotator.trees import TREE_PARSER_ID, build_tree

OUTPUT_KINDS = ("conllu", "trees", "embeddings", "token_embeddings")

_EMBEDDING_KINDS = ("embeddings", "token_embeddings")
_META_NAME = "annotator_meta.json"
_SKIPPED_NAME = "skipped_ids.json"

# core reader messages that mean the payload was cut short
_TRUNCATION_HINTS = ("truncated", "header implies", "unexpected eof")


@dataclass(frozen=True, slots=True)
class AnnotationJob:
    """What to annotate, where to put it, and which files to produce."""

    corpus_path: str | Path
    out_dir: str | Path
    outputs: tuple[str, ...] = OUTPUT_KINDS
    encoder: str | None = None
    batch_size: int = 64
    upos_overrides: str | Path | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not self.outputs:
            raise AnnotatorError("job requests no outputs")
        unknown = [kind for kind in self.outputs if kind not in OUTPUT_KINDS]
        if unknown:
            raise AnnotatorError(f"unknown output kinds: {', '.join(sorted(unknown))}")
        if self.batch_size < 1:
            raise AnnotatorError(f"batch size must be positive, got {self.batch_size}")
        if self.encoder is None and any(k in self.outputs for k in _EMBEDDING_KINDS):
            raise AnnotatorError("embedding outputs need an encoder model")
        if self.encoder is not None:
            encode.encoder_dims(self.encoder)


@dataclass(frozen=True, slots=True)
class AnnotationResult:
    """Where a finished job wrote its files and what it covered."""

    out_dir: Path
    paths: dict[str, Path]
    n_records: int
    n_annotated: int
    skipped: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class VerificationReport:
    """Per-kind coverage fractions and the violations that limit them."""

    coverage: dict[str, float]
    violations: tuple[str, ...] = ()

    @property
    def clean(self) -> bool:
        return not self.violations


def _overrides_for(job: AnnotationJob) -> dict[str, str]:
    overrides = dict(shipped_overrides())
    if job.upos_overrides is not None:
        overrides.update(load_upos_overrides(job.upos_overrides))
    return overrides


def annotate(job: AnnotationJob) -> AnnotationResult:
    """Run the job and return where everything landed.

    Outputs are written once, after all batches, in corpus order.  The
    sidecar files (`skipped_ids.json`, `annotator_meta.json`) are always
    written, even when nothing was skipped.
    """
    corpus = read_corpus(job.corpus_path)
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    overrides = _overrides_for(job)

    parses: dict[str, ParsedInstruction] = {}
    trees: dict[str, ConstituencyTree] = {}
    sent_rows: list[np.ndarray] = []
    token_arrays: dict[str, np.ndarray] = {}
    annotated: list[str] = []
    skipped: list[str] = []

    records = corpus.records
    for start in range(0, len(records), job.batch_size):
        for rec in records[start : start + job.batch_size]:
            if not rec.tokens:
                skipped.append(rec.id)
                continue
            tags = tag_tokens(rec.tokens, overrides)
            if "conllu" in job.outputs:
                parses[rec.id] = parse_dependencies(rec.id, rec.tokens, tags)
            if "trees" in job.outputs:
                trees[rec.id] = build_tree(rec.id, rec.tokens, tags)
            if "embeddings" in job.outputs:
                sent_rows.append(encode.sentence_vector(job.encoder, rec.tokens))
            if "token_embeddings" in job.outputs:
                token_arrays[rec.id] = encode.token_matrix(job.encoder, rec.tokens)
            annotated.append(rec.id)

    paths: dict[str, Path] = {}
    if "conllu" in job.outputs:
        paths["conllu"] = out_dir / "parses.conllu"
        write_conllu(parses, paths["conllu"], order=annotated)
    if "trees" in job.outputs:
        paths["trees"] = out_dir / "trees.jsonl"
        write_trees(trees, paths["trees"], order=annotated)
    if "embeddings" in job.outputs:
        paths["embeddings"] = out_dir / f"{job.encoder}.icem"
        paths["embeddings_index"] = out_dir / f"{job.encoder}.idx.jsonl"
        emb = EmbeddingMatrix(
            ids=tuple(annotated), matrix=np.vstack(sent_rows), encoder_id=job.encoder
        )
        write_embeddings(emb, paths["embeddings"], paths["embeddings_index"])
    if "token_embeddings" in job.outputs:
        paths["token_embeddings"] = out_dir / f"{job.encoder}.icte"
        tes = TokenEmbeddingSet(
            arrays={rec_id: token_arrays[rec_id] for rec_id in annotated},
            dims=encode.encoder_dims(job.encoder),
            encoder_id=job.encoder,
        )
        write_token_embeddings(tes, paths["token_embeddings"])

    paths["skipped"] = out_dir / _SKIPPED_NAME
    paths["skipped"].write_text(json.dumps(sorted(skipped)) + "\n", encoding="utf-8")
    paths["meta"] = out_dir / _META_NAME
    meta = {
        "corpus": str(job.corpus_path),
        "dataset_id": corpus.dataset_id,
        "outputs": list(job.outputs),
        "encoder": job.encoder,
        "tagger": TAGGER_ID,
        "parser": PARSER_ID,
        "tree_parser": TREE_PARSER_ID,
        "tree_fallback": True,
        "n_records": len(records),
        "n_annotated": len(annotated),
    }
    paths["meta"].write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    return AnnotationResult(
        out_dir=out_dir,
        paths=paths,
        n_records=len(records),
        n_annotated=len(annotated),
        skipped=tuple(sorted(skipped)),
    )


def _classify(exc: Exception) -> str:
    msg = str(exc)
    low = msg.lower()
    if any(hint in low for hint in _TRUNCATION_HINTS):
        return f"truncated payload: {msg}"
    return msg


def verify(out_dir: str | Path, corpus_path: str | Path | None = None) -> VerificationReport:
    """Re-read an output directory with the strict core readers.

    The directory's own metadata names the corpus and the output kinds;
    ``corpus_path`` overrides the recorded corpus location, which helps
    when the directory has moved.  Coverage is the fraction of corpus
    records each output file actually covers.
    """
    out_dir = Path(out_dir)
    meta_path = out_dir / _META_NAME
    if not meta_path.exists():
        return VerificationReport(coverage={}, violations=(f"missing {_META_NAME}",))
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    source = corpus_path if corpus_path is not None else meta["corpus"]
    corpus = read_corpus(source)
    n = len(corpus.records)
    encoder = meta.get("encoder")

    coverage: dict[str, float] = {}
    violations: list[str] = []

    def check(kind: str, filename: str, reader) -> None:
        path = out_dir / filename
        if not path.exists():
            coverage[kind] = 0.0
            violations.append(f"missing output: {filename}")
            return
        try:
            covered = reader(path)
        except (IngestError, ValueError, OSError) as exc:
            coverage[kind] = 0.0
            violations.append(_classify(exc))
            return
        coverage[kind] = covered / n if n else 0.0

    if "conllu" in meta["outputs"]:
        check("conllu", "parses.conllu", lambda p: len(read_conllu(p, corpus)))
    if "trees" in meta["outputs"]:
        check("trees", "trees.jsonl", lambda p: len(read_trees(p, corpus)))
    if "embeddings" in meta["outputs"]:
        def read_matrix(p: Path):
            emb = read_embeddings(p, out_dir / f"{encoder}.idx.jsonl", encoder_id=encoder)
            known = set(corpus.ids())
            return sum(1 for rec_id in emb.ids if rec_id in known)

        check("embeddings", f"{encoder}.icem", read_matrix)
    if "token_embeddings" in meta["outputs"]:
        def read_tokens(p: Path):
            tes = read_token_embeddings(p, encoder_id=encoder)
            known = set(corpus.ids())
            return sum(1 for rec_id in tes.ids() if rec_id in known)

        check("token_embeddings", f"{encoder}.icte", read_tokens)

    return VerificationReport(coverage=coverage, violations=tuple(violations))
