"""Report serialization: canonical JSON, Markdown, and plot-ready CSVs.

The JSON form is canonical so that equal reports are equal bytes: keys
sorted, floats printed with repr-faithful ``.17g``, ASCII-only strings,
no whitespace variation.  Markdown is for people; the CSVs carry the
full tables (POS patterns are tail-aggregated only in Markdown).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

PATTERN_TAIL_THRESHOLD = 0.005


def canonical_json(obj) -> str:
    """Serialize a report dictionary to its canonical byte-stable form."""

    def emit(value) -> str:
        if value is None:
            return "null"
        if value is True:
            return "true"
        if value is False:
            return "false"
        if isinstance(value, int):
            return str(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError("non-finite float in report")
            return format(value, ".17g")
        if isinstance(value, str):
            return json.dumps(value, ensure_ascii=True)
        if isinstance(value, (list, tuple)):
            return "[" + ",".join(emit(v) for v in value) + "]"
        if isinstance(value, dict):
            parts = []
            for key in sorted(value):
                if not isinstance(key, str):
                    raise TypeError(f"non-string report key {key!r}")
                parts.append(json.dumps(key, ensure_ascii=True) + ":" + emit(value[key]))
            return "{" + ",".join(parts) + "}"
        raise TypeError(f"unserializable value of type {type(value).__name__}")

    return emit(obj) + "\n"


def write_text_atomic(path: str | Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see halves."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_bytes_atomic(path: str | Path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _is_skipped(value) -> bool:
    return isinstance(value, str)


def _fmt_sampled(entry) -> str:
    if _is_skipped(entry):
        return f"*{entry}*"
    text = f"{entry['mean']:.3f} ± {entry['std']:.3f}"
    if entry.get("note"):
        text += f" ({entry['note']})"
    return text


def render_markdown(report: dict) -> str:
    """Human-readable summary of one audit report."""
    config = report["config"]
    stats = report["stats"]
    lines = [
        f"# Diversity report: {report['dataset_id']}",
        "",
        f"Produced by {report['tool']} {report['tool_version']} with seed "
        f"{config['seed']}, sampling {config['sample_size']} sentences "
        f"× {config['trials']} trials (cleaner: {config['cleaner']}).",
        "",
        "## Corpus",
        "",
        "| Sentences | Unique | % unique | Unigrams |",
        "|---|---|---|---|",
        f"| {stats['n_sentences']} | {stats['n_unique']} "
        f"| {stats['pct_unique']:.3f} | {stats['n_unigrams']} |",
        "",
        "## Duplication and lexical variety",
        "",
        "| Metric | Value |",
        "|---|---|",
    ]
    lexical = report["lexical"]
    cr = lexical["compression_ratio"]
    cr_text = f"*{cr}*" if _is_skipped(cr) else f"{cr:.3f}"
    lines.append(f"| Compression ratio | {cr_text} |")
    for title, key in (
        ("ROUGE-L", "rouge_l"),
        ("BLEU-4", "bleu4"),
        ("Jaccard", "jaccard"),
        ("Levenshtein", "levenshtein"),
    ):
        lines.append(f"| {title} | {_fmt_sampled(lexical[key])} |")
    lines.append("")

    lines.append("## Semantic spread")
    lines.append("")
    semantic = report["semantic"]
    pca = semantic["pca"]
    if _is_skipped(pca):
        lines.append(f"PCA: *{pca}*")
    else:
        lines.append("| Encoder | Components for 95% variance | Rows | Dims |")
        lines.append("|---|---|---|---|")
        for encoder in sorted(pca):
            entry = pca[encoder]
            if _is_skipped(entry):
                lines.append(f"| {encoder} | *{entry}* | — | — |")
            else:
                lines.append(
                    f"| {encoder} | {entry['components_95']} "
                    f"| {entry['rows_used']} | {entry['dims']} |"
                )
    lines.append("")
    lines.append(f"BERTScore F1: {_fmt_sampled(semantic['bertscore_f1'])}")
    lines.append("")

    verb_objects = semantic["verb_objects"]
    if _is_skipped(verb_objects):
        lines.append(f"Verb-object pairs: *{verb_objects}*")
    else:
        total = sum(sum(row) for row in verb_objects["counts"])
        lines.append(
            f"Verb-object pairs: {len(verb_objects['verbs'])} verbs × "
            f"{len(verb_objects['objects'])} objects, {total} edges."
        )
        per_object = semantic["unique_verbs_per_object"]
        if not _is_skipped(per_object) and per_object:
            ranked = sorted(per_object.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
            lines.append("")
            lines.append("| Object | Distinct verbs |")
            lines.append("|---|---|")
            for obj, n in ranked:
                lines.append(f"| {obj} | {n} |")
    lines.append("")

    adverbs = semantic["adverbial_profile"]
    if _is_skipped(adverbs):
        lines.append(f"Adverbial profile: *{adverbs}*")
    else:
        by_class: dict[str, int] = {}
        for entry in adverbs.values():
            by_class[entry["class"]] = by_class.get(entry["class"], 0) + entry["count"]
        summary = ", ".join(
            f"{name}: {by_class[name]}"
            for name in ("directional", "locative", "manner", "temporal", "other")
            if name in by_class
        )
        lines.append(f"Adverbial mentions by class — {summary or 'none'}.")
    numerics = semantic["numeric_profile"]
    if _is_skipped(numerics):
        lines.append(f"Numeric profile: *{numerics}*")
    else:
        top = list(numerics.items())[:10]
        rendered = ", ".join(f"{lemma} ({count})" for lemma, count in top)
        lines.append(f"Numeric mentions: {rendered or 'none'}.")
    lines.append("")

    lines.append("## Structure")
    lines.append("")
    patterns = report["structural"]["pos_patterns"]
    if _is_skipped(patterns):
        lines.append(f"POS patterns: *{patterns}*")
    else:
        lines.append("| POS pattern | % of unique | Exemplar |")
        lines.append("|---|---|---|")
        tail_count = 0
        tail_frequency = 0.0
        for entry in patterns:
            if entry["frequency"] < PATTERN_TAIL_THRESHOLD:
                tail_count += entry["count"]
                tail_frequency += entry["frequency"]
                continue
            lines.append(
                f"| {entry['pattern']} | {100.0 * entry['frequency']:.1f} "
                f"| {entry['exemplar']} |"
            )
        if tail_count:
            lines.append(f"| other | {100.0 * tail_frequency:.1f} | — |")
    lines.append("")
    lines.append(f"Tree kernel: {_fmt_sampled(report['structural']['tree_kernel'])}")
    lines.append("")

    structures = report["structural"]["structures"]
    if _is_skipped(structures):
        lines.append(f"Structure flags: *{structures}*")
    else:
        has_gold = structures["gold_size"] > 0
        header = "| Flag | Count | % |"
        divider = "|---|---|---|"
        if has_gold:
            header += " Gold disagreement | SE |"
            divider += "---|---|"
        lines.append(header)
        lines.append(divider)
        for flag, entry in structures["flags"].items():
            row = f"| {flag} | {entry['count']} | {100.0 * entry['fraction']:.2f} |"
            if has_gold:
                if "disagreement" in entry:
                    row += (
                        f" {entry['disagreement']:.4f} "
                        f"| {entry['standard_error']:.4f} |"
                    )
                else:
                    row += " — | — |"
            lines.append(row)
        if has_gold:
            lines.append("")
            lines.append(f"Gold subset size: {structures['gold_size']} sentences.")
    lines.append("")

    notes = report.get("notes") or []
    if notes:
        lines.append("## Notes")
        lines.append("")
        for note in notes:
            lines.append(f"- {note}")
        lines.append("")
    return "\n".join(lines)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_report_csvs(report: dict, outdir: str | Path) -> dict[str, Path]:
    """Emit the tabular report sections as CSV files; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    def put(name: str, header: list[str], rows: list[list]) -> None:
        path = outdir / f"{name}.csv"
        write_text_atomic(path, _csv_text(header, rows))
        written[name] = path

    histogram = report["stats"]["length_histogram"]
    put("length_histogram", ["length", "count"], [list(pair) for pair in histogram])

    patterns = report["structural"]["pos_patterns"]
    if not _is_skipped(patterns):
        put(
            "pos_patterns",
            ["pattern", "count", "frequency", "exemplar"],
            [
                [e["pattern"], e["count"], format(e["frequency"], ".17g"), e["exemplar"]]
                for e in patterns
            ],
        )

    verb_objects = report["semantic"]["verb_objects"]
    if not _is_skipped(verb_objects):
        rows = []
        for i, verb in enumerate(verb_objects["verbs"]):
            for j, obj in enumerate(verb_objects["objects"]):
                count = verb_objects["counts"][i][j]
                if count:
                    rows.append([verb, obj, count])
        put("verb_objects", ["verb", "object", "count"], rows)

    adverbs = report["semantic"]["adverbial_profile"]
    if not _is_skipped(adverbs):
        put(
            "adverbial_profile",
            ["lemma", "count", "class"],
            [[lemma, e["count"], e["class"]] for lemma, e in adverbs.items()],
        )

    numerics = report["semantic"]["numeric_profile"]
    if not _is_skipped(numerics):
        put("numeric_profile", ["lemma", "count"], [[k, v] for k, v in numerics.items()])

    structures = report["structural"]["structures"]
    if not _is_skipped(structures):
        rows = []
        for flag, entry in structures["flags"].items():
            rows.append(
                [
                    flag,
                    entry["count"],
                    format(entry["fraction"], ".17g"),
                    format(entry["disagreement"], ".17g") if "disagreement" in entry else "",
                    format(entry["standard_error"], ".17g") if "standard_error" in entry else "",
                ]
            )
        put("structures", ["flag", "count", "fraction", "disagreement", "standard_error"], rows)

    return written
