"""Figure rendering for the CLI report path.

Kept separate from the audit engine on purpose: the engine produces
numbers; this module turns an already-computed report dictionary into
PNG files.  Sections that were skipped simply produce no figure.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_DPI = 120
_MAX_HEATMAP = 12
_MAX_PATTERN_BARS = 15


def _skipped(value) -> bool:
    return isinstance(value, str)


def _save(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def _length_histogram(report: dict, outdir: Path) -> Path:
    pairs = report["stats"]["length_histogram"]
    lengths = [p[0] for p in pairs]
    counts = [p[1] for p in pairs]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(lengths, counts, color="#4878a8")
    ax.set_xlabel("tokens per sentence")
    ax.set_ylabel("sentences")
    ax.set_title(f"Sentence lengths: {report['dataset_id']}")
    path = outdir / "length_histogram.png"
    _save(fig, path)
    return path


def _pos_patterns(report: dict, outdir: Path) -> Path | None:
    patterns = report["structural"]["pos_patterns"]
    if _skipped(patterns):
        return None
    top = patterns[:_MAX_PATTERN_BARS]
    labels = [e["pattern"] for e in top][::-1]
    values = [100.0 * e["frequency"] for e in top][::-1]
    fig, ax = plt.subplots(figsize=(7, 0.35 * len(top) + 1.5))
    ax.barh(labels, values, color="#6a9a58")
    ax.set_xlabel("% of unique sentences")
    ax.set_title(f"Top POS patterns: {report['dataset_id']}")
    ax.tick_params(axis="y", labelsize=7)
    path = outdir / "pos_patterns.png"
    _save(fig, path)
    return path


def _verb_objects(report: dict, outdir: Path) -> Path | None:
    section = report["semantic"]["verb_objects"]
    if _skipped(section) or not section["verbs"]:
        return None
    verbs = section["verbs"][:_MAX_HEATMAP]
    objects = section["objects"][:_MAX_HEATMAP]
    counts = [row[: len(objects)] for row in section["counts"][: len(verbs)]]
    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    image = ax.imshow(counts, cmap="viridis", aspect="auto")
    ax.set_xticks(range(len(objects)), objects, rotation=45, ha="right", fontsize=7)
    ax.set_yticks(range(len(verbs)), verbs, fontsize=7)
    ax.set_xlabel("object lemma")
    ax.set_ylabel("verb lemma")
    ax.set_title(f"Verb-object pairs: {report['dataset_id']}")
    fig.colorbar(image, ax=ax, label="count")
    path = outdir / "verb_objects.png"
    _save(fig, path)
    return path


def _structures(report: dict, outdir: Path) -> Path | None:
    section = report["structural"]["structures"]
    if _skipped(section):
        return None
    flags = list(section["flags"])
    fractions = [100.0 * section["flags"][f]["fraction"] for f in flags]
    has_gold = section["gold_size"] > 0
    if has_gold:
        fig, (ax, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    else:
        fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.bar(flags, fractions, color="#a85858")
    ax.set_ylabel("% of sentences")
    ax.set_title(f"Structure flags: {report['dataset_id']}")
    ax.tick_params(axis="x", rotation=20)
    if has_gold:
        gaps = []
        errs = []
        for flag in flags:
            entry = section["flags"][flag]
            gaps.append(100.0 * entry.get("disagreement", 0.0))
            errs.append(100.0 * entry.get("standard_error", 0.0))
        ax2.bar(flags, gaps, yerr=errs, color="#888888", capsize=3)
        ax2.set_ylabel("% disagreement with gold")
        ax2.set_title(f"Detector error (n={section['gold_size']})")
        ax2.tick_params(axis="x", rotation=20)
    path = outdir / "structures.png"
    _save(fig, path)
    return path


def render_figures(report: dict, outdir: str | Path) -> list[Path]:
    """Render every figure whose section has data; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for renderer in (_length_histogram, _pos_patterns, _verb_objects, _structures):
        path = renderer(report, outdir)
        if path is not None:
            written.append(path)
    return written
