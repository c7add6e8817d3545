"""Word-class lexicons used by the profile builders and structure detectors.

Each lexicon is a plain text file with one lowercase token per line;
blank lines and ``#`` comments are ignored.  The packaged defaults can
be replaced per-category through audit configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping

LEXICON_NAMES = (
    "directional",
    "locative",
    "manner",
    "temporal",
    "negation",
    "conditional",
    "cycle",
    "numerals",
    "fillers",
)


@dataclass(frozen=True, slots=True)
class LexiconSet:
    """All word lists the auditor consults, resolved to frozen sets."""

    directional: frozenset[str]
    locative: frozenset[str]
    manner: frozenset[str]
    temporal: frozenset[str]
    negation: frozenset[str]
    conditional: frozenset[str]
    cycle: frozenset[str]
    numerals: frozenset[str]
    fillers: frozenset[str]

    def adverb_classes(self) -> tuple[tuple[str, frozenset[str]], ...]:
        # first matching class wins, in this order
        return (
            ("directional", self.directional),
            ("locative", self.locative),
            ("manner", self.manner),
            ("temporal", self.temporal),
        )


def _parse_lexicon(text: str, where: str) -> frozenset[str]:
    entries: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        if any(ch.isspace() for ch in entry):
            raise ValueError(f"{where}:{lineno}: lexicon entries must be single tokens")
        entries.add(entry.lower())
    if not entries:
        raise ValueError(f"{where}: lexicon is empty")
    return frozenset(entries)


def load_lexicon_file(path: str | Path) -> frozenset[str]:
    path = Path(path)
    return _parse_lexicon(path.read_text(encoding="utf-8"), str(path))


@lru_cache(maxsize=None)
def _bundled(name: str) -> frozenset[str]:
    if name not in LEXICON_NAMES:
        raise ValueError(f"unknown lexicon {name!r}")
    text = resources.files("lingaudit.data").joinpath(f"{name}.txt").read_text("utf-8")
    return _parse_lexicon(text, f"lingaudit.data/{name}.txt")


def default_lexicons() -> LexiconSet:
    return LexiconSet(**{name: _bundled(name) for name in LEXICON_NAMES})


def lexicons_with_overrides(paths: Mapping[str, str | Path]) -> LexiconSet:
    """Default lexicons with some categories replaced by external files."""
    unknown = set(paths) - set(LEXICON_NAMES)
    if unknown:
        raise ValueError(f"unknown lexicon categories {sorted(unknown)}")
    base = default_lexicons()
    overrides = {name: load_lexicon_file(path) for name, path in paths.items()}
    return replace(base, **overrides)
