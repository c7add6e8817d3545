"""Annotation sidecar producing the files the lingaudit core consumes.

Everything here is deterministic and model-free: a rule lexicon tagger,
a rule dependency parser, a chunked right-branching constituency builder,
and a hashing random-projection encoder.  Outputs are emitted through the
core's own writers so they always pass its strict readers.
"""

from lingaudit_annotator.pipeline import (
    AnnotationJob,
    AnnotationResult,
    AnnotatorError,
    VerificationReport,
    annotate,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationJob",
    "AnnotationResult",
    "AnnotatorError",
    "VerificationReport",
    "annotate",
    "verify",
    "__version__",
]
