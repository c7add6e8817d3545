"""Core corpus model: instruction records, text normalization, and stats.

Normalization is the contract everything else builds on.  A record's
``clean_text`` is lowercase, free of punctuation except word-internal
apostrophes, and single-spaced; ``tokens`` is its whitespace split.  The
same raw text always normalizes to the same clean text, and normalizing
twice changes nothing.
"""

from __future__ import annotations

import logging
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

log = logging.getLogger("lingaudit")

CLEANERS = ("default", "scout")

DEFAULT_FILLERS = frozenset({"um", "uh", "er", "hmm"})

# Bracketed speaker/role tags as they appear in dialog transcripts,
# e.g. "[CMD]" or "<robot>".  Nested or unpaired brackets are left alone.
_ROLE_TAG = re.compile(r"<[^<>]*>|\[[^\[\]]*\]")

_APOSTROPHE_FOLD = str.maketrans({"’": "'", "ʼ": "'"})


def _is_removable(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat.startswith("P") or cat in ("Cc", "Cf")


def normalize_text(
    raw: str,
    cleaner: str = "default",
    fillers: frozenset[str] | None = None,
) -> str:
    """Normalize raw text to its canonical lowercase form.

    The ``default`` cleaner lowercases, folds curly apostrophes, replaces
    punctuation with spaces (keeping apostrophes that sit between two
    word characters, as in "don't"), and collapses whitespace.  The
    ``scout`` cleaner first strips bracketed role tags and a filler-word
    lexicon, then applies the default pipeline.  Idempotent for both.
    """
    if cleaner not in CLEANERS:
        raise ValueError(f"unknown cleaner {cleaner!r}; expected one of {CLEANERS}")
    text = raw
    if cleaner == "scout":
        text = _ROLE_TAG.sub(" ", text)
    text = text.lower().translate(_APOSTROPHE_FOLD)
    if cleaner == "scout":
        lexicon = DEFAULT_FILLERS if fillers is None else fillers
        if lexicon:
            pattern = "|".join(re.escape(w) for w in sorted(lexicon))
            text = re.sub(rf"\b(?:{pattern})\b", " ", text)
    chars: list[str] = []
    n = len(text)
    for i, ch in enumerate(text):
        if ch == "'":
            # keep only word-internal apostrophes ("don't", not "'hello")
            if 0 < i < n - 1 and text[i - 1].isalnum() and text[i + 1].isalnum():
                chars.append(ch)
            else:
                chars.append(" ")
        elif _is_removable(ch):
            chars.append(" ")
        else:
            chars.append(ch)
    return " ".join("".join(chars).split())


_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")


def split_sentences(raw: str) -> list[str]:
    """Split raw text into sentence-sized pieces on terminal punctuation.

    Intended for adapters that feed multi-sentence source rows into a
    corpus; instruction datasets are usually one sentence per row already.
    Empty pieces are dropped.
    """
    return [part for part in (_SENTENCE_BREAK.split(raw)) if part.strip()]


@dataclass(frozen=True, slots=True)
class InstructionRecord:
    """One instruction: stable id, raw text, and its normalized form."""

    id: str
    raw_text: str
    clean_text: str
    tokens: tuple[str, ...]
    dataset_id: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.clean_text:
            raise ValueError(f"record {self.id!r} has empty clean text")
        if tuple(self.clean_text.split()) != self.tokens:
            raise ValueError(f"record {self.id!r}: tokens do not match clean text")


@dataclass(frozen=True, slots=True)
class Corpus:
    """An ordered, id-unique collection of records from one dataset."""

    dataset_id: str
    records: tuple[InstructionRecord, ...]
    source_path: str | None = None
    cleaner: str = "default"

    def __post_init__(self) -> None:
        if not self.dataset_id:
            raise ValueError("dataset_id must be non-empty")
        if not self.records:
            raise ValueError(f"corpus {self.dataset_id!r} has no records")
        seen: set[str] = set()
        for rec in self.records:
            if rec.id in seen:
                raise ValueError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)
            if rec.dataset_id != self.dataset_id:
                raise ValueError(
                    f"record {rec.id!r} belongs to {rec.dataset_id!r}, "
                    f"not {self.dataset_id!r}"
                )

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[InstructionRecord]:
        return iter(self.records)

    def ids(self) -> tuple[str, ...]:
        return tuple(rec.id for rec in self.records)


@dataclass(frozen=True, slots=True)
class CorpusStats:
    """Duplication and size statistics for one corpus."""

    dataset_id: str
    n_sentences: int
    n_unique: int
    pct_unique: float
    n_unigrams: int
    length_histogram: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (0 < self.n_unique <= self.n_sentences):
            raise ValueError("n_unique must be in 1..n_sentences")
        if sum(self.length_histogram.values()) != self.n_sentences:
            raise ValueError("length histogram must cover every sentence")


def make_record(
    record_id: str,
    raw_text: str,
    dataset_id: str,
    cleaner: str = "default",
) -> InstructionRecord | None:
    """Build a record, or return None when the text normalizes to nothing."""
    clean = normalize_text(raw_text, cleaner)
    if not clean:
        return None
    return InstructionRecord(
        id=record_id,
        raw_text=raw_text,
        clean_text=clean,
        tokens=tuple(clean.split()),
        dataset_id=dataset_id,
    )


def build_corpus(
    rows: Iterable[tuple[str, str]],
    dataset_id: str,
    source_path: str | None = None,
    cleaner: str = "default",
) -> Corpus:
    """Assemble a corpus from (id, raw_text) rows, dropping empty texts."""
    records: list[InstructionRecord] = []
    dropped = 0
    for record_id, raw_text in rows:
        rec = make_record(record_id, raw_text, dataset_id, cleaner)
        if rec is None:
            dropped += 1
            log.warning("dropping record %r: empty after normalization", record_id)
            continue
        records.append(rec)
    if dropped:
        log.info("dropped %d empty record(s) from %s", dropped, dataset_id)
    return Corpus(
        dataset_id=dataset_id,
        records=tuple(records),
        source_path=source_path,
        cleaner=cleaner,
    )


def compute_stats(corpus: Corpus) -> CorpusStats:
    """Count sentences, distinct sentences, distinct unigrams, and lengths."""
    seen: set[str] = set()
    vocab: set[str] = set()
    lengths: Counter[int] = Counter()
    for rec in corpus.records:
        seen.add(rec.clean_text)
        vocab.update(rec.tokens)
        lengths[len(rec.tokens)] += 1
    n = len(corpus.records)
    n_unique = len(seen)
    return CorpusStats(
        dataset_id=corpus.dataset_id,
        n_sentences=n,
        n_unique=n_unique,
        pct_unique=100.0 * n_unique / n,
        n_unigrams=len(vocab),
        length_histogram=dict(sorted(lengths.items())),
    )


def unique_sentences(corpus: Corpus) -> Corpus:
    """Keep the first record for each distinct clean text, preserving order."""
    seen: set[str] = set()
    kept: list[InstructionRecord] = []
    for rec in corpus.records:
        if rec.clean_text in seen:
            continue
        seen.add(rec.clean_text)
        kept.append(rec)
    return Corpus(
        dataset_id=corpus.dataset_id,
        records=tuple(kept),
        source_path=corpus.source_path,
        cleaner=corpus.cleaner,
    )
