"""Audit orchestration: run every metric over one corpus, compare many.

``run_audit`` is resilient by design: a metric that cannot run (missing
annotations, degenerate input) becomes a ``"skipped: <reason>"`` entry
plus a note, and the rest of the report still comes out.  The only hard
failures are annotation kinds the caller explicitly required.

``compare_reports`` lines several report dictionaries up side by side,
marks which direction of each metric means more diversity, and bolds
the most diverse corpus per metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

import lingaudit
from lingaudit.ingest import (
    EmbeddingMatrix,
    GoldStructureLabels,
    ParsedInstruction,
    ConstituencyTree,
    SentenceEmbeddingSource,
    TokenEmbeddingSet,
    STRUCTURE_FLAGS,
)
from lingaudit.lexical import (
    category_vocabulary,
    compression_ratio,
    overlap_matrix,
    pairwise_mean,
)
from lingaudit.lexicons import LexiconSet, default_lexicons
from lingaudit.model import Corpus, compute_stats, unique_sentences
from lingaudit.sampling import MetricValue, SamplingPlan
from lingaudit.semantic import (
    adverbial_profile,
    numeric_profile,
    pca_components_95,
    pca_components_95_streaming,
    unique_verbs_per_object,
    verb_object_matrix,
)
from lingaudit.structural import pos_pattern_frequencies, structure_report

SCHEMA_VERSION = 1

ANNOTATION_KINDS = ("conllu", "trees", "embeddings", "token_embeddings", "gold")


class AuditError(Exception):
    """A problem that invalidates the requested audit or comparison."""


class MissingAnnotationError(AuditError):
    """A --require'd annotation kind was not supplied."""

    def __init__(self, kind: str) -> None:
        super().__init__(f"required annotation kind {kind!r} was not provided")
        self.kind = kind


@dataclass(frozen=True, slots=True)
class AnnotationBundle:
    """Optional side files accompanying a corpus for one audit run."""

    parses: Mapping[str, ParsedInstruction] | None = None
    trees: Mapping[str, ConstituencyTree] | None = None
    embeddings: tuple[EmbeddingMatrix, ...] = ()
    embedding_sources: tuple[SentenceEmbeddingSource, ...] = ()
    token_embeddings: TokenEmbeddingSet | None = None
    gold: GoldStructureLabels | None = None

    def has(self, kind: str) -> bool:
        if kind == "conllu":
            return self.parses is not None
        if kind == "trees":
            return self.trees is not None
        if kind == "embeddings":
            return bool(self.embeddings) or bool(self.embedding_sources)
        if kind == "token_embeddings":
            return self.token_embeddings is not None
        if kind == "gold":
            return self.gold is not None
        raise ValueError(f"unknown annotation kind {kind!r}")


@dataclass(frozen=True, slots=True)
class AuditConfig:
    """Knobs that change what an audit computes (and thus its bytes)."""

    cleaner: str = "default"
    tree_lambda: float = 0.4
    pairwise_on_unique: bool = False
    pca_on_all: bool = False
    gzip_level: int = 6
    workers: int | None = None
    require: frozenset[str] = frozenset()
    lexicons: LexiconSet = field(default_factory=default_lexicons)

    def __post_init__(self) -> None:
        if not (0.0 < self.tree_lambda <= 1.0):
            raise ValueError("tree_lambda must be in (0, 1]")
        if not (1 <= self.gzip_level <= 9):
            raise ValueError("gzip_level must be in 1..9")
        unknown = set(self.require) - set(ANNOTATION_KINDS)
        if unknown:
            raise ValueError(f"unknown annotation kinds in require: {sorted(unknown)}")


def _metric_dict(value: MetricValue) -> dict:
    out: dict = {
        "mean": value.mean,
        "std": value.std,
        "trials": value.trials,
        "sample_size": value.sample_size,
    }
    if value.note is not None:
        out["note"] = value.note
    return out


def _skip(reason: str) -> str:
    return f"skipped: {reason}"


def run_audit(
    corpus: Corpus,
    annotations: AnnotationBundle,
    plan: SamplingPlan,
    config: AuditConfig | None = None,
) -> dict:
    """Compute the full three-axis report for one corpus.

    Returns a plain dictionary ready for canonical JSON serialization.
    Worker count influences wall time only, never the report content.
    """
    config = config or AuditConfig()
    for kind in sorted(config.require):
        if not annotations.has(kind):
            raise MissingAnnotationError(kind)

    notes: list[str] = []

    def attempt(key: str, fn):
        try:
            return fn()
        except (ValueError, ArithmeticError, OSError) as exc:
            notes.append(f"{key}: {exc}")
            return _skip(str(exc))

    stats = compute_stats(corpus)
    uniques = unique_sentences(corpus)
    unique_ids = set(uniques.ids())
    pairwise_base = uniques if config.pairwise_on_unique else corpus

    def sampled(metric: str, **extra) -> dict | str:
        return attempt(
            metric,
            lambda: _metric_dict(
                pairwise_mean(
                    corpus,
                    metric,
                    plan,
                    on_unique=config.pairwise_on_unique,
                    workers=config.workers,
                    tree_lambda=config.tree_lambda,
                    **extra,
                )
            ),
        )

    lexical: dict = {
        "compression_ratio": attempt(
            "compression_ratio", lambda: compression_ratio(corpus, config.gzip_level)
        ),
        "rouge_l": sampled("rouge_l"),
        "bleu4": sampled("bleu4"),
        "jaccard": sampled("jaccard"),
        "levenshtein": sampled("levenshtein"),
    }

    semantic: dict = {}
    semantic["pca"] = _pca_section(corpus, annotations, config, unique_ids, notes)

    if annotations.token_embeddings is None:
        semantic["bertscore_f1"] = _skip("missing token embeddings")
    else:
        missing = _uncovered(pairwise_base.ids(), annotations.token_embeddings.arrays)
        if missing:
            reason = (
                f"token embeddings cover {len(pairwise_base) - missing} of "
                f"{len(pairwise_base)} sentences"
            )
            notes.append(f"bertscore_f1: {reason}")
            semantic["bertscore_f1"] = _skip(reason)
        else:
            semantic["bertscore_f1"] = sampled(
                "bertscore_f1", token_embeddings=annotations.token_embeddings
            )

    if annotations.parses is None:
        for key in (
            "verb_objects",
            "unique_verbs_per_object",
            "adverbial_profile",
            "numeric_profile",
        ):
            semantic[key] = _skip("missing dependency parses")
    else:
        parses = annotations.parses

        def build_verb_objects() -> dict:
            matrix = verb_object_matrix(parses)
            return {
                "verbs": list(matrix.verbs),
                "objects": list(matrix.objects),
                "counts": matrix.counts.tolist(),
            }

        semantic["verb_objects"] = attempt("verb_objects", build_verb_objects)
        semantic["unique_verbs_per_object"] = attempt(
            "unique_verbs_per_object",
            lambda: unique_verbs_per_object(verb_object_matrix(parses)),
        )
        semantic["adverbial_profile"] = attempt(
            "adverbial_profile",
            lambda: {
                lemma: {"count": count, "class": category}
                for lemma, (count, category) in adverbial_profile(
                    parses, config.lexicons
                ).items()
            },
        )
        semantic["numeric_profile"] = attempt(
            "numeric_profile", lambda: numeric_profile(parses, config.lexicons)
        )

    structural: dict = {}
    if annotations.parses is None:
        structural["pos_patterns"] = _skip("missing dependency parses")
    else:
        missing = _uncovered(uniques.ids(), annotations.parses)
        if missing:
            reason = (
                f"dependency parses cover {len(uniques) - missing} of "
                f"{len(uniques)} unique sentences"
            )
            notes.append(f"pos_patterns: {reason}")
            structural["pos_patterns"] = _skip(reason)
        else:
            structural["pos_patterns"] = attempt(
                "pos_patterns",
                lambda: [
                    {
                        "pattern": stat.text,
                        "count": stat.count,
                        "frequency": stat.frequency,
                        "exemplar": stat.exemplar,
                    }
                    for stat in pos_pattern_frequencies(corpus, annotations.parses)
                ],
            )

    if annotations.trees is None:
        structural["tree_kernel"] = _skip("missing constituency trees")
    else:
        missing = _uncovered(pairwise_base.ids(), annotations.trees)
        if missing:
            reason = (
                f"constituency trees cover {len(pairwise_base) - missing} of "
                f"{len(pairwise_base)} sentences"
            )
            notes.append(f"tree_kernel: {reason}")
            structural["tree_kernel"] = _skip(reason)
        else:
            structural["tree_kernel"] = sampled("tree_kernel", trees=annotations.trees)

    if annotations.parses is None:
        notes.append("structures: detectors ran on surface tokens only (no parses)")
    structural["structures"] = attempt(
        "structures",
        lambda: _structures_dict(
            structure_report(
                corpus, annotations.parses, annotations.gold, config.lexicons
            )
        ),
    )

    if annotations.parses is None:
        vocab_section: dict | str = _skip("missing dependency parses")
    else:
        vocab_section = attempt(
            "category_vocab",
            lambda: {
                category: list(category_vocabulary(annotations.parses, category))
                for category in ("NOUN", "VERB", "ADV")
            },
        )

    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "lingaudit",
        "tool_version": lingaudit.__version__,
        "dataset_id": corpus.dataset_id,
        "config": {
            "cleaner": corpus.cleaner,
            "seed": plan.seed,
            "sample_size": plan.sample_size,
            "trials": plan.trials,
            "tree_lambda": config.tree_lambda,
            "pairwise_on_unique": config.pairwise_on_unique,
            "pca_on_all": config.pca_on_all,
            "gzip_level": config.gzip_level,
        },
        "stats": {
            "n_sentences": stats.n_sentences,
            "n_unique": stats.n_unique,
            "pct_unique": stats.pct_unique,
            "n_unigrams": stats.n_unigrams,
            "length_histogram": [
                [length, count] for length, count in stats.length_histogram.items()
            ],
        },
        "lexical": lexical,
        "semantic": semantic,
        "structural": structural,
        "category_vocab": vocab_section,
        "notes": notes,
    }


def _uncovered(ids: Sequence[str], mapping: Mapping[str, object]) -> int:
    return sum(1 for rec_id in ids if rec_id not in mapping)


def _structures_dict(report) -> dict:
    flags = {}
    for flag in STRUCTURE_FLAGS:
        stat = report.flags[flag]
        entry: dict = {"count": stat.count, "fraction": stat.fraction}
        if stat.disagreement is not None:
            entry["disagreement"] = stat.disagreement
            entry["standard_error"] = stat.standard_error
        flags[flag] = entry
    return {
        "n_sentences": report.n_sentences,
        "gold_size": report.gold_size,
        "flags": flags,
    }


def _pca_section(
    corpus: Corpus,
    annotations: AnnotationBundle,
    config: AuditConfig,
    unique_ids: set[str],
    notes: list[str],
) -> dict | str:
    if not annotations.embeddings and not annotations.embedding_sources:
        return _skip("missing sentence embeddings")
    population = (
        set(corpus.ids()) if config.pca_on_all else unique_ids
    )
    section: dict = {}

    def run_one(encoder_id: str, ids: tuple[str, ...], compute) -> None:
        if encoder_id in section:
            raise AuditError(f"duplicate encoder id {encoder_id!r}")
        known = set(ids)
        foreign = sorted(set(population) - known)
        if foreign:
            reason = (
                f"embeddings cover {len(population) - len(foreign)} of "
                f"{len(population)} sentences"
            )
            notes.append(f"pca[{encoder_id}]: {reason}")
            section[encoder_id] = _skip(reason)
            return
        rows = sorted(i for i, rec_id in enumerate(ids) if rec_id in population)
        try:
            section[encoder_id] = {
                "components_95": compute(np.array(rows, dtype=np.int64)),
                "rows_used": len(rows),
                "dims": None,
            }
        except (ValueError, ArithmeticError, OSError) as exc:
            notes.append(f"pca[{encoder_id}]: {exc}")
            section[encoder_id] = _skip(str(exc))

    for emb in annotations.embeddings:
        run_one(
            emb.encoder_id,
            emb.ids,
            lambda rows, emb=emb: pca_components_95(emb.matrix[rows]),
        )
        if isinstance(section.get(emb.encoder_id), dict):
            section[emb.encoder_id]["dims"] = emb.dims
    for src in annotations.embedding_sources:
        run_one(
            src.encoder_id,
            src.ids,
            lambda rows, src=src: pca_components_95_streaming(src.data_path, rows),
        )
        if isinstance(section.get(src.encoder_id), dict):
            section[src.encoder_id]["dims"] = src.dims
    return section


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True, slots=True)
class ComparisonResult:
    markdown: str
    csv: str


_ARROW_UP = "higher = more diverse"
_ARROW_DOWN = "lower = more diverse"

# (title, path into the report, direction, decimals)
_SCALAR_COLUMNS = (
    ("Sentences", ("stats", "n_sentences"), None, 0),
    ("% unique", ("stats", "pct_unique"), "up", 3),
    ("Unigrams", ("stats", "n_unigrams"), None, 0),
    ("CR ↓", ("lexical", "compression_ratio"), "down", 3),
)
_SAMPLED_COLUMNS = (
    ("ROUGE-L ↓", ("lexical", "rouge_l"), "down"),
    ("BLEU-4 ↓", ("lexical", "bleu4"), "down"),
    ("Jaccard ↓", ("lexical", "jaccard"), "down"),
    ("Levenshtein ↑", ("lexical", "levenshtein"), "up"),
    ("BERTScore ↓", ("semantic", "bertscore_f1"), "down"),
    ("Tree kernel ↓", ("structural", "tree_kernel"), "down"),
)


def _lookup(report: dict, path: tuple[str, ...]):
    node = report
    for key in path:
        if not isinstance(node, dict) or key not in node:
            return None
        node = node[key]
    if isinstance(node, str):
        # a "skipped: ..." marker
        return None
    return node


def _best_indices(values: list[float | None], direction: str | None) -> set[int]:
    numeric = [(i, v) for i, v in enumerate(values) if v is not None]
    if direction is None or not numeric:
        return set()
    target = (
        max(v for _, v in numeric) if direction == "up" else min(v for _, v in numeric)
    )
    return {i for i, v in numeric if v == target}


def compare_reports(reports: Sequence[dict]) -> ComparisonResult:
    """Build a side-by-side diversity table plus vocabulary overlaps.

    Requires at least two reports with distinct dataset ids and matching
    schema versions.  With three or more reports, a correlation table
    relates PCA component counts to the other diversity metrics.
    """
    if len(reports) < 2:
        raise AuditError("comparison needs at least two reports")
    ids = []
    for report in reports:
        version = report.get("schema_version")
        if version != SCHEMA_VERSION:
            raise AuditError(
                f"schema_version mismatch: expected {SCHEMA_VERSION}, got {version!r}"
            )
        dataset_id = report.get("dataset_id")
        if not isinstance(dataset_id, str) or not dataset_id:
            raise AuditError("report missing dataset_id")
        if dataset_id in ids:
            raise AuditError(f"duplicate dataset id {dataset_id!r}")
        ids.append(dataset_id)

    encoders = sorted(
        {
            encoder
            for report in reports
            for encoder in (
                _lookup(report, ("semantic", "pca")) or {}
            )
        }
    )

    lines = ["# Corpus diversity comparison", ""]
    lines.append(
        "Arrows give the diverse direction; the most diverse corpus per "
        "metric is bold."
    )
    lines.append("")

    headers = ["Dataset"]
    headers += [title for title, _, _, _ in _SCALAR_COLUMNS]
    headers += [title for title, _, _ in _SAMPLED_COLUMNS]
    headers += [f"PCA-95 {encoder} ↑" for encoder in encoders]
    lines.append("| " + " | ".join(headers) + " |")
    lines.append("|" + "---|" * len(headers))

    cells: list[list[str]] = [[] for _ in reports]
    csv_rows = ["dataset,metric,value,std,trials,sample_size"]

    def fmt(value: float, decimals: int) -> str:
        return f"{value:.{decimals}f}"

    for title, path, direction, decimals in _SCALAR_COLUMNS:
        values = [_lookup(r, path) for r in reports]
        best = _best_indices(values, direction)
        for i, value in enumerate(values):
            if value is None:
                cells[i].append("—")
            else:
                text = fmt(float(value), decimals)
                cells[i].append(f"**{text}**" if i in best else text)
                csv_rows.append(
                    f"{ids[i]},{path[-1]},{format(float(value), '.17g')},,,"
                )

    for title, path, direction in _SAMPLED_COLUMNS:
        entries = [_lookup(r, path) for r in reports]
        means = [e["mean"] if isinstance(e, dict) else None for e in entries]
        best = _best_indices(means, direction)
        for i, entry in enumerate(entries):
            if entry is None:
                cells[i].append("—")
                continue
            text = f"{entry['mean']:.3f} ± {entry['std']:.3f}"
            cells[i].append(f"**{text}**" if i in best else text)
            csv_rows.append(
                f"{ids[i]},{path[-1]},{format(entry['mean'], '.17g')},"
                f"{format(entry['std'], '.17g')},{entry['trials']},{entry['sample_size']}"
            )

    for encoder in encoders:
        values = []
        for report in reports:
            section = _lookup(report, ("semantic", "pca")) or {}
            entry = section.get(encoder)
            values.append(
                entry["components_95"] if isinstance(entry, dict) else None
            )
        best = _best_indices(values, "up")
        for i, value in enumerate(values):
            if value is None:
                cells[i].append("—")
            else:
                text = str(int(value))
                cells[i].append(f"**{text}**" if i in best else text)
                csv_rows.append(f"{ids[i]},pca_95_{encoder},{int(value)},,,")

    for dataset_id, row in zip(ids, cells):
        lines.append("| " + " | ".join([dataset_id, *row]) + " |")
    lines.append("")

    _append_overlap_sections(lines, reports, ids)
    if len(reports) >= 3:
        _append_correlation_section(lines, reports, ids, encoders)

    return ComparisonResult(markdown="\n".join(lines) + "\n", csv="\n".join(csv_rows) + "\n")


def _append_overlap_sections(
    lines: list[str], reports: Sequence[dict], ids: list[str]
) -> None:
    for category in ("NOUN", "VERB", "ADV"):
        vocabs = []
        for report in reports:
            section = report.get("category_vocab")
            if not isinstance(section, dict) or category not in section:
                vocabs = None
                break
            vocabs.append(section[category])
        if vocabs is None:
            continue
        matrix = overlap_matrix(vocabs)
        lines.append(f"## Shared {category} lemmas")
        lines.append("")
        lines.append("Off-diagonal cells count shared lemmas; the diagonal is vocabulary size.")
        lines.append("")
        lines.append("| | " + " | ".join(ids) + " |")
        lines.append("|" + "---|" * (len(ids) + 1))
        for i, dataset_id in enumerate(ids):
            row = " | ".join(str(int(matrix[i, j])) for j in range(len(ids)))
            lines.append(f"| {dataset_id} | {row} |")
        lines.append("")


_CORRELATION_METRICS = (
    ("pct_unique", ("stats", "pct_unique"), False),
    ("n_unigrams", ("stats", "n_unigrams"), False),
    ("compression_ratio", ("lexical", "compression_ratio"), False),
    ("rouge_l", ("lexical", "rouge_l"), True),
    ("bleu4", ("lexical", "bleu4"), True),
    ("jaccard", ("lexical", "jaccard"), True),
    ("levenshtein", ("lexical", "levenshtein"), True),
    ("bertscore_f1", ("semantic", "bertscore_f1"), True),
    ("tree_kernel", ("structural", "tree_kernel"), True),
)


def _append_correlation_section(
    lines: list[str], reports: Sequence[dict], ids: list[str], encoders: list[str]
) -> None:
    rows: list[tuple[str, str, float, int]] = []
    for encoder in encoders:
        pca_by_report: list[float | None] = []
        for report in reports:
            section = _lookup(report, ("semantic", "pca")) or {}
            entry = section.get(encoder)
            pca_by_report.append(
                float(entry["components_95"]) if isinstance(entry, dict) else None
            )
        for name, path, sampled in _CORRELATION_METRICS:
            xs: list[float] = []
            ys: list[float] = []
            for report, pca in zip(reports, pca_by_report):
                if pca is None:
                    continue
                value = _lookup(report, path)
                if sampled:
                    value = value["mean"] if isinstance(value, dict) else None
                if value is None:
                    continue
                xs.append(pca)
                ys.append(float(value))
            if len(xs) < 3:
                continue
            if np.std(xs) == 0.0 or np.std(ys) == 0.0:
                continue
            r = float(np.corrcoef(xs, ys)[0, 1])
            rows.append((name, encoder, r, len(xs)))
    if not rows:
        return
    lines.append("## PCA vs other metrics (Pearson r)")
    lines.append("")
    lines.append("| Metric | Encoder | r | datasets |")
    lines.append("|---|---|---|---|")
    for name, encoder, r, n in rows:
        lines.append(f"| {name} | {encoder} | {r:.3f} | {n} |")
    lines.append("")
