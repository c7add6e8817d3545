"""Rule lexicon UPOS tagger and suffix lemmatizer.

Tags are assigned left to right so later tokens can consult earlier tags.
A forced-override lexicon wins over every rule; the package ships one for
domain tokens that general-purpose taggers misread (brand names, "water"
as the first half of a compound), and callers may layer their own on top.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from lingaudit.ingest import UPOS_TAGS

_DET = frozenset({
    "the", "a", "an", "this", "that", "these", "those", "each", "every",
    "some", "any", "no", "all", "both", "another", "either", "neither",
})
_ADP = frozenset({
    "in", "on", "at", "by", "of", "for", "with", "without", "from", "to",
    "into", "onto", "under", "over", "above", "below", "behind", "beside",
    "between", "near", "through", "across", "inside", "outside", "toward",
    "towards", "upon", "off", "out", "up", "down", "within", "along",
    "around", "against", "atop", "beneath", "past", "via",
})
_PRON = frozenset({
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us",
    "them", "your", "my", "his", "their", "our", "its", "yours", "mine",
    "something", "anything", "everything", "nothing", "someone", "anyone",
    "everyone",
})
_AUX = frozenset({
    "am", "is", "are", "was", "were", "be", "been", "being", "do", "does",
    "did", "will", "would", "shall", "should", "may", "might", "must",
    "could", "don't", "doesn't", "didn't", "can't", "cannot", "won't",
    "wouldn't", "shouldn't", "couldn't", "isn't", "aren't", "wasn't",
    "weren't", "hasn't", "haven't", "mustn't",
})
_CCONJ = frozenset({"and", "or", "but", "nor"})
_SCONJ = frozenset({"if", "unless", "because", "while", "when", "whenever", "until"})
_PART = frozenset({"not"})
_NUM_WORDS = frozenset({
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "twenty", "thirty", "forty", "fifty",
    "sixty", "seventy", "eighty", "ninety", "hundred", "thousand", "million",
    "dozen",
})
_ADV = frozenset({
    "now", "then", "again", "always", "never", "here", "there", "twice",
    "once", "soon", "later", "very", "too", "also", "just", "back", "away",
})
_DIRECTIONAL = frozenset({
    "left", "right", "forward", "backward", "backwards", "ahead", "straight",
    "clockwise", "counterclockwise", "upward", "downward", "sideways",
})
_ADJ = frozenset({
    "red", "blue", "green", "yellow", "white", "black", "orange", "purple",
    "pink", "brown", "gray", "grey", "silver", "golden", "big", "small",
    "large", "tall", "short", "long", "tiny", "huge", "wide", "narrow",
    "clean", "dirty", "empty", "full", "open", "closed", "shut", "new",
    "old", "warm", "cold", "hot", "cool", "dry", "wet", "soft", "hard",
    "heavy", "round", "flat", "upper", "lower", "middle", "fresh", "sharp",
    "dull", "bright", "dark", "shiny", "smooth", "rough", "thick", "thin",
    "loose", "tight", "first", "last", "next", "previous", "final", "other",
    "same", "whole", "main", "ready",
})
# sentence-initial these order steps rather than modify a noun
_SEQUENCERS = frozenset({"first", "next", "last", "finally", "afterwards"})
_VERB = frozenset({
    "pick", "place", "put", "move", "push", "pull", "open", "close", "shut",
    "grab", "grasp", "lift", "lower", "drop", "wipe", "clean", "stir",
    "pour", "bring", "take", "go", "stop", "start", "begin", "finish",
    "turn", "rotate", "flip", "slide", "stack", "unstack", "press", "hold",
    "release", "wash", "dry", "fill", "empty", "knock", "fold", "unfold",
    "throw", "toss", "catch", "cut", "slice", "point", "wave", "shake",
    "drag", "carry", "fetch", "set", "get", "find", "locate", "scan",
    "check", "repeat", "continue", "keep", "report", "return", "insert",
    "remove", "attach", "detach", "align", "adjust", "wait", "pause",
    "resume", "switch", "toggle", "raise", "tilt", "twist", "squeeze",
    "tap", "touch", "swipe", "draw", "erase", "sort", "separate", "combine",
    "mix", "heat", "weigh", "measure", "count", "record", "say", "tell",
    "ask", "answer", "read", "write", "look", "watch", "listen", "walk",
    "run", "step", "reach", "extend", "retract", "grip", "sweep", "mop",
    "scrub", "rinse", "crush", "bend", "break", "fix", "replace", "swap",
    "store", "load", "unload", "pack", "unpack", "hang", "hook", "unhook",
    "plug", "unplug", "deliver", "collect", "gather", "arrange", "organize",
    "straighten", "center", "shift", "nudge", "roll", "spin", "sprinkle",
    "spray", "polish", "drain", "refill", "bake", "boil", "chop", "peel",
    "mash", "avoid", "skip", "ignore", "select", "choose", "confirm",
    "cancel", "retry", "undo", "redo", "save", "delete", "type", "enter",
    "exit", "follow", "approach", "leave", "stay", "have", "has", "had",
    "wipe", "stow", "knead",
})

# words that read as a verb only in verb-friendly left contexts
_REVERB_CONTEXT = frozenset({"CCONJ", "AUX", "PART", "PRON", "ADV", "SCONJ"})
# left contexts that force a nominal reading of an otherwise-verbal word
_NOMINAL_CONTEXT = frozenset({"DET", "ADJ", "NUM"})

_PARTICLES = frozenset({"up", "down", "off", "out", "over", "away", "back"})

TAGGER_ID = "rulepos-v1"


def shipped_overrides() -> dict[str, str]:
    """The domain UPOS override lexicon bundled with the package."""
    text = resources.files("lingaudit_annotator").joinpath("data/domain_upos.txt").read_text("utf-8")
    return _parse_overrides(text.splitlines(), "data/domain_upos.txt")


def load_upos_overrides(path: str | Path) -> dict[str, str]:
    """Read a ``token<TAB>TAG`` override file; '#' lines are comments."""
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_overrides(fh.read().splitlines(), str(path))


def _parse_overrides(lines: list[str], source: str) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        parts = body.split("\t")
        if len(parts) != 2 or not parts[0]:
            raise ValueError(f"{source}:{lineno}: expected 'token<TAB>TAG'")
        token, tag = parts[0].lower(), parts[1].strip()
        if tag not in UPOS_TAGS:
            raise ValueError(f"{source}:{lineno}: invalid UPOS tag {tag!r}")
        overrides[token] = tag
    return overrides


def tag_tokens(
    tokens: tuple[str, ...] | list[str], overrides: dict[str, str] | None = None
) -> tuple[str, ...]:
    """Assign one UPOS tag per token, left to right."""
    forced = overrides or {}
    tags: list[str] = []
    for pos, tok in enumerate(tokens):
        prev = tags[pos - 1] if pos else None
        tags.append(_tag_one(tok, pos, prev, forced))
    return tuple(tags)


def _tag_one(tok: str, pos: int, prev: str | None, forced: dict[str, str]) -> str:
    if tok in forced:
        return forced[tok]
    if tok == "can":
        return "NOUN" if prev in _NOMINAL_CONTEXT else "AUX"
    if tok[0].isdigit():
        return "NUM"
    if tok in _DET:
        return "DET"
    if tok in _ADP:
        return "ADP"
    if tok in _PRON:
        return "PRON"
    if tok in _AUX:
        return "AUX"
    if tok in _CCONJ:
        return "CCONJ"
    if tok in _SCONJ:
        return "SCONJ"
    if tok in _PART:
        return "PART"
    if tok in _NUM_WORDS:
        return "NUM"
    if pos == 0 and tok in _VERB:
        return "VERB"
    if pos == 0 and tok in _SEQUENCERS:
        return "ADV"
    if tok in _DIRECTIONAL:
        return "NOUN" if prev in ("DET", "ADJ") else "ADV"
    if tok in _ADV or (tok.endswith("ly") and len(tok) > 4):
        return "ADV"
    if tok in _ADJ:
        if tok in _VERB and prev in _REVERB_CONTEXT:
            return "VERB"
        return "ADJ"
    if tok in _VERB:
        return "NOUN" if prev in _NOMINAL_CONTEXT else "VERB"
    if pos == 0:
        return "VERB"
    return "NOUN"


# ---------------------------------------------------------------------------
# lemmatizer

_IRREGULAR_LEMMAS = {
    "is": "be", "are": "be", "was": "be", "were": "be", "been": "be",
    "being": "be", "am": "be",
    "does": "do", "did": "do", "done": "do", "doing": "do",
    "has": "have", "had": "have", "having": "have",
    "went": "go", "gone": "go", "goes": "go", "going": "go",
    "took": "take", "taken": "take", "taking": "take",
    "got": "get", "gotten": "get", "getting": "get",
    "made": "make", "making": "make",
    "putting": "put", "setting": "set", "cutting": "cut",
    "came": "come", "coming": "come",
    "gave": "give", "given": "give", "giving": "give",
    "left": "left",
    "closed": "close", "closing": "close",
    "wiped": "wipe", "wiping": "wipe",
    "children": "child", "shelves": "shelf", "knives": "knife",
    "dishes": "dish",
}

_SIBILANT_ENDINGS = ("ss", "x", "z", "ch", "sh")
_VOWELS = "aeiou"


def _dedouble(stem: str) -> str:
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in "sl":
        return stem[:-1]
    return stem


def _restore_e(stem: str) -> str:
    """Put back a final e that -ed/-ing stripping likely removed."""
    if stem.endswith(("c", "v", "u", "z")):
        return stem + "e"
    if len(stem) >= 3 and stem[-1] == "l" and stem[-2] not in _VOWELS + "wl":
        return stem + "e"
    if len(stem) > 4 and stem.endswith("at") and stem[-3] not in _VOWELS:
        return stem + "e"
    return stem


def lemma_of(form: str, upos: str) -> str:
    """Dictionary lookup plus conservative suffix stripping."""
    if form in _IRREGULAR_LEMMAS:
        return _IRREGULAR_LEMMAS[form]
    if upos in ("VERB", "AUX"):
        if form.endswith("ies") and len(form) > 4:
            return form[:-3] + "y"
        if form.endswith("ing") and len(form) > 5:
            return _restore_e(_dedouble(form[:-3]))
        if form.endswith("ied") and len(form) > 4:
            return form[:-3] + "y"
        if form.endswith("ed") and len(form) > 4:
            return _restore_e(_dedouble(form[:-2]))
        if form.endswith("es") and len(form) > 4 and form[:-2].endswith(_SIBILANT_ENDINGS):
            return form[:-2]
        if form.endswith("s") and not form.endswith("ss") and len(form) > 3:
            return form[:-1]
        return form
    if upos in ("NOUN", "PROPN"):
        if form.endswith("ies") and len(form) > 4:
            return form[:-3] + "y"
        if len(form) > 4 and form.endswith("es") and form[:-2].endswith(_SIBILANT_ENDINGS):
            return form[:-2]
        if (
            form.endswith("s")
            and len(form) > 3
            and not form.endswith(("ss", "us", "is"))
        ):
            return form[:-1]
    return form
