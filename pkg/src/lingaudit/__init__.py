"""Corpus-auditing toolkit for natural-language instruction datasets.

The package measures how linguistically diverse an instruction corpus is
along three axes: duplication and lexical variety, semantic spread, and
syntactic structure.  Every metric is seeded and deterministic, so two runs
over the same inputs produce byte-identical reports.

Typical use goes through the command line (``lingaudit audit``), but the
underlying operations are importable directly:

    from lingaudit import read_corpus, compute_stats, run_audit
"""

from lingaudit.model import (
    Corpus,
    CorpusStats,
    InstructionRecord,
    build_corpus,
    compute_stats,
    normalize_text,
    split_sentences,
    unique_sentences,
)
from lingaudit.ingest import (
    ConstituencyTree,
    EmbeddingMatrix,
    GoldStructureLabels,
    IngestError,
    ParsedInstruction,
    TokenAnnotation,
    TokenEmbeddingSet,
    TreeNode,
    parse_ptb,
    format_ptb,
    read_conllu,
    read_corpus,
    read_embeddings,
    read_gold_labels,
    read_token_embeddings,
    read_trees,
    write_conllu,
    write_corpus,
    write_embeddings,
    write_gold_labels,
    write_token_embeddings,
    write_trees,
)
from lingaudit.sampling import MetricValue, SamplingPlan, draw_sample
from lingaudit.lexical import (
    bleu4,
    compression_ratio,
    jaccard,
    levenshtein,
    lexical_overlap,
    pairwise_mean,
    rouge_l,
)
from lingaudit.semantic import (
    CovarianceAccumulator,
    bertscore_f1,
    adverbial_profile,
    numeric_profile,
    pca_components_95,
    pca_components_95_streaming,
    unique_verbs_per_object,
    verb_object_matrix,
)
from lingaudit.structural import (
    StructureLabel,
    detect_structures,
    pos_pattern_frequencies,
    structure_report,
    tree_kernel,
)
from lingaudit.engine import (
    AnnotationBundle,
    AuditConfig,
    AuditError,
    compare_reports,
    run_audit,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationBundle",
    "AuditConfig",
    "AuditError",
    "ConstituencyTree",
    "Corpus",
    "CorpusStats",
    "CovarianceAccumulator",
    "EmbeddingMatrix",
    "GoldStructureLabels",
    "IngestError",
    "InstructionRecord",
    "MetricValue",
    "ParsedInstruction",
    "SamplingPlan",
    "StructureLabel",
    "TokenAnnotation",
    "TokenEmbeddingSet",
    "TreeNode",
    "adverbial_profile",
    "bertscore_f1",
    "bleu4",
    "build_corpus",
    "compare_reports",
    "compression_ratio",
    "compute_stats",
    "detect_structures",
    "draw_sample",
    "format_ptb",
    "jaccard",
    "levenshtein",
    "lexical_overlap",
    "normalize_text",
    "numeric_profile",
    "pairwise_mean",
    "parse_ptb",
    "pca_components_95",
    "pca_components_95_streaming",
    "pos_pattern_frequencies",
    "read_conllu",
    "read_corpus",
    "read_embeddings",
    "read_gold_labels",
    "read_token_embeddings",
    "read_trees",
    "rouge_l",
    "run_audit",
    "split_sentences",
    "structure_report",
    "tree_kernel",
    "unique_sentences",
    "unique_verbs_per_object",
    "verb_object_matrix",
    "write_conllu",
    "write_corpus",
    "write_embeddings",
    "write_gold_labels",
    "write_token_embeddings",
    "write_trees",
]
