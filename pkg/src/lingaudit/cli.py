"""Command-line interface: ingest corpora, audit them, compare reports.

Exit codes: 0 on success, 2 for bad input or configuration, 3 when an
annotation kind named by --require was not supplied.  Each command ends
by printing a single JSON summary line to stdout; files are written
atomically so a crashed run never leaves half a report behind.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from lingaudit import __version__
from lingaudit.engine import (
    ANNOTATION_KINDS,
    AnnotationBundle,
    AuditConfig,
    AuditError,
    MissingAnnotationError,
    compare_reports,
    run_audit,
)
from lingaudit.ingest import (
    IngestError,
    open_embedding_source,
    read_conllu,
    read_corpus,
    read_gold_labels,
    read_token_embeddings,
    read_trees,
    write_corpus,
)
from lingaudit.lexicons import LEXICON_NAMES, lexicons_with_overrides
from lingaudit.model import CLEANERS, build_corpus, split_sentences
from lingaudit.report import (
    canonical_json,
    render_markdown,
    write_report_csvs,
    write_text_atomic,
)
from lingaudit.sampling import SamplingPlan


class InputError(click.ClickException):
    exit_code = 2


class RequiredAnnotationError(click.ClickException):
    exit_code = 3


_CONFIG_SCALARS = {
    "cleaner": str,
    "sample_size": int,
    "trials": int,
    "seed": int,
    "workers": int,
    "pairwise_on_unique": bool,
    "pca_on_all": bool,
    "gzip_level": int,
}


def _load_config(path: str | None) -> dict:
    """Parse and validate the TOML config; unknown keys are errors."""
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"invalid TOML in {path}: {exc}")
    out: dict = {}
    for key, value in raw.items():
        if key in _CONFIG_SCALARS:
            expected = _CONFIG_SCALARS[key]
            # bool is an int subtype; keep the check exact
            if not isinstance(value, expected) or (
                expected is int and isinstance(value, bool)
            ):
                raise InputError(
                    f"config key {key!r} must be {expected.__name__}, "
                    f"got {type(value).__name__}"
                )
            out[key] = value
        elif key == "tree_kernel":
            if not isinstance(value, dict) or set(value) - {"lambda"}:
                raise InputError("config table [tree_kernel] allows only 'lambda'")
            if "lambda" in value:
                if not isinstance(value["lambda"], (int, float)) or isinstance(
                    value["lambda"], bool
                ):
                    raise InputError("tree_kernel.lambda must be a number")
                out["tree_lambda"] = float(value["lambda"])
        elif key == "lexicons":
            if not isinstance(value, dict):
                raise InputError("config table [lexicons] must map names to paths")
            unknown = set(value) - set(LEXICON_NAMES)
            if unknown:
                raise InputError(f"unknown lexicon names in config: {sorted(unknown)}")
            for name, lex_path in value.items():
                if not isinstance(lex_path, str):
                    raise InputError(f"lexicons.{name} must be a path string")
            out["lexicons"] = dict(value)
        else:
            raise InputError(f"unknown config key {key!r}")
    if "cleaner" in out and out["cleaner"] not in CLEANERS:
        raise InputError(f"config cleaner must be one of {CLEANERS}")
    return out


def _pick(flag, config: dict, key: str, default):
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _resolve_workers(flag: int | None, config: dict) -> int | None:
    if flag is not None:
        return flag
    env = os.environ.get("LINGAUDIT_THREADS", "").strip()
    if env:
        return None  # let the metric layer read the environment
    return config.get("workers")


def _emit_summary(payload: dict) -> None:
    click.echo(json.dumps(payload, sort_keys=True))


@click.group()
@click.version_option(version=__version__, prog_name="lingaudit")
def cli() -> None:
    """Audit the linguistic diversity of instruction corpora."""
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(message)s")


# ---------------------------------------------------------------------------
# ingest


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--dataset-id", default=None, help="Dataset name; defaults to the input stem.")
@click.option("--cleaner", type=click.Choice(CLEANERS), default="default", show_default=True)
@click.option("--split-sentences", "do_split", is_flag=True, help="Split rows into sentences.")
def ingest(
    input_path: str, output_path: str, dataset_id: str | None, cleaner: str, do_split: bool
) -> None:
    """Convert raw text or loose JSONL into corpus JSONL, assigning ids."""
    source = Path(input_path)
    dataset = dataset_id or source.stem
    try:
        raw_rows = _read_raw_rows(source, dataset)
    except IngestError as exc:
        raise InputError(str(exc))
    rows: list[tuple[str, str]] = []
    for rec_id, text in raw_rows:
        if do_split:
            pieces = split_sentences(text)
            if len(pieces) <= 1:
                rows.append((rec_id, text))
            else:
                rows.extend(
                    (f"{rec_id}-s{k:02d}", piece) for k, piece in enumerate(pieces, 1)
                )
        else:
            rows.append((rec_id, text))
    try:
        corpus = build_corpus(rows, dataset, str(source), cleaner)
    except ValueError as exc:
        raise InputError(str(exc))
    write_corpus(corpus, output_path)
    _emit_summary(
        {
            "command": "ingest",
            "dataset_id": dataset,
            "records": len(corpus),
            "dropped": len(rows) - len(corpus),
            "output": output_path,
        }
    )


def _read_raw_rows(source: Path, dataset: str) -> list[tuple[str, str]]:
    rows: list[tuple[str, str]] = []
    if source.suffix == ".jsonl":
        seen: set[str] = set()
        counter = 0
        with open(source, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestError(f"{source}:{lineno}: invalid JSON ({exc.msg})")
                if not isinstance(obj, dict):
                    raise IngestError(f"{source}:{lineno}: row is not a JSON object")
                extra = set(obj) - {"id", "text", "dataset"}
                if extra:
                    raise IngestError(f"{source}:{lineno}: unexpected keys {sorted(extra)}")
                text = obj.get("text")
                if not isinstance(text, str) or not text:
                    raise IngestError(f"{source}:{lineno}: missing or empty 'text'")
                rec_id = obj.get("id")
                if rec_id is None:
                    counter += 1
                    rec_id = f"{dataset}-{counter:06d}"
                elif not isinstance(rec_id, str) or not rec_id:
                    raise IngestError(f"{source}:{lineno}: invalid 'id'")
                if rec_id in seen:
                    raise IngestError(f"{source}:{lineno}: duplicate id {rec_id!r}")
                seen.add(rec_id)
                rows.append((rec_id, text))
    else:
        with open(source, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if text:
                    rows.append((f"{dataset}-{lineno:06d}", text))
    if not rows:
        raise IngestError(f"{source}: no usable rows")
    return rows


# ---------------------------------------------------------------------------
# audit


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--dataset-id", default=None)
@click.option("--conllu", "conllu_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--trees", "trees_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--embeddings",
    "embedding_paths",
    nargs=2,
    multiple=True,
    type=click.Path(exists=True, dir_okay=False),
    metavar="DATA INDEX",
    help="Sentence embedding file plus its row index; repeatable.",
)
@click.option(
    "--token-embeddings",
    "token_embeddings_path",
    default=None,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option("--gold", "gold_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--sample-size", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--cleaner", type=click.Choice(CLEANERS), default=None)
@click.option("--tree-lambda", type=float, default=None)
@click.option("--pairwise-on-unique", "pairwise_on_unique", flag_value=True, default=None)
@click.option("--pairwise-on-all", "pairwise_on_unique", flag_value=False)
@click.option("--pca-on-all", "pca_on_all", flag_value=True, default=None)
@click.option("--pca-on-unique", "pca_on_all", flag_value=False)
@click.option("--workers", type=int, default=None)
@click.option(
    "--require",
    "require",
    multiple=True,
    type=click.Choice([k.replace("_", "-") for k in ANNOTATION_KINDS]),
    help="Fail (exit 3) if this annotation kind is missing; repeatable.",
)
@click.option("--no-figures", "no_figures", is_flag=True, help="Skip PNG rendering.")
def audit(
    corpus_path: str,
    out_dir: str,
    dataset_id: str | None,
    conllu_path: str | None,
    trees_path: str | None,
    embedding_paths: tuple[tuple[str, str], ...],
    token_embeddings_path: str | None,
    gold_path: str | None,
    config_path: str | None,
    seed: int | None,
    sample_size: int | None,
    trials: int | None,
    cleaner: str | None,
    tree_lambda: float | None,
    pairwise_on_unique: bool | None,
    pca_on_all: bool | None,
    workers: int | None,
    require: tuple[str, ...],
    no_figures: bool,
) -> None:
    """Run the full diversity audit over one corpus."""
    config = _load_config(config_path)
    cleaner = _pick(cleaner, config, "cleaner", "default")
    try:
        plan = SamplingPlan(
            sample_size=_pick(sample_size, config, "sample_size", 1000),
            trials=_pick(trials, config, "trials", 3),
            seed=_pick(seed, config, "seed", 0),
        )
        lexicons = lexicons_with_overrides(config.get("lexicons", {}))
        audit_config = AuditConfig(
            cleaner=cleaner,
            tree_lambda=_pick(tree_lambda, config, "tree_lambda", 0.4),
            pairwise_on_unique=_pick(pairwise_on_unique, config, "pairwise_on_unique", False),
            pca_on_all=_pick(pca_on_all, config, "pca_on_all", False),
            gzip_level=config.get("gzip_level", 6),
            workers=_resolve_workers(workers, config),
            require=frozenset(kind.replace("-", "_") for kind in require),
            lexicons=lexicons,
        )
    except ValueError as exc:
        raise InputError(str(exc))

    try:
        corpus = read_corpus(corpus_path, dataset_id=dataset_id, cleaner=cleaner)
        annotations = AnnotationBundle(
            parses=read_conllu(conllu_path, corpus) if conllu_path else None,
            trees=read_trees(trees_path, corpus) if trees_path else None,
            embedding_sources=tuple(
                open_embedding_source(data, index) for data, index in embedding_paths
            ),
            token_embeddings=(
                read_token_embeddings(token_embeddings_path)
                if token_embeddings_path
                else None
            ),
            gold=read_gold_labels(gold_path, corpus) if gold_path else None,
        )
    except (IngestError, ValueError) as exc:
        raise InputError(str(exc))

    try:
        report = run_audit(corpus, annotations, plan, audit_config)
    except MissingAnnotationError as exc:
        raise RequiredAnnotationError(str(exc))
    except AuditError as exc:
        raise InputError(str(exc))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    write_text_atomic(report_path, canonical_json(report))
    write_text_atomic(out / "report.md", render_markdown(report))
    write_report_csvs(report, out)
    figure_paths: list[str] = []
    if not no_figures:
        from lingaudit.figures import render_figures

        figure_paths = [str(p) for p in render_figures(report, out / "figures")]

    _emit_summary(
        {
            "command": "audit",
            "dataset_id": report["dataset_id"],
            "out": str(out),
            "report": str(report_path),
            "skipped": _skipped_keys(report),
            "figures": len(figure_paths),
        }
    )


def _skipped_keys(report: dict) -> list[str]:
    skipped: list[str] = []
    for section in ("lexical", "semantic", "structural"):
        for key, value in report[section].items():
            if isinstance(value, str):
                skipped.append(f"{section}.{key}")
            elif key == "pca" and isinstance(value, dict):
                skipped.extend(
                    f"semantic.pca.{encoder}"
                    for encoder, entry in value.items()
                    if isinstance(entry, str)
                )
    if isinstance(report.get("category_vocab"), str):
        skipped.append("category_vocab")
    return sorted(skipped)


# ---------------------------------------------------------------------------
# compare


@cli.command()
@click.argument("reports", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def compare(reports: tuple[str, ...], out_dir: str) -> None:
    """Render side-by-side diversity tables for two or more reports."""
    loaded = []
    for path in reports:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded.append(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read report {path}: {exc}")
    try:
        result = compare_reports(loaded)
    except AuditError as exc:
        raise InputError(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_text_atomic(out / "comparison.md", result.markdown)
    write_text_atomic(out / "comparison.csv", result.csv)
    _emit_summary(
        {
            "command": "compare",
            "reports": len(loaded),
            "out": str(out),
            "markdown": str(out / "comparison.md"),
            "csv": str(out / "comparison.csv"),
        }
    )


def main() -> None:
    cli(prog_name="lingaudit")


if __name__ == "__main__":
    main()
