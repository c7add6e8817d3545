"""Command-line entry point for the annotation sidecar.

Exit codes: 0 on success, 2 for bad input (unknown encoder model,
malformed override file, unreadable corpus).  The command ends by
printing one JSON summary line to stdout.
"""

from __future__ import annotations

import json

import click

from lingaudit import IngestError

from lingaudit_annotator import __version__
from lingaudit_annotator.pipeline import OUTPUT_KINDS, AnnotationJob, AnnotatorError, annotate, verify


class InputError(click.ClickException):
    exit_code = 2


@click.command(name="lingaudit-annotate")
@click.version_option(version=__version__)
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Corpus JSONL to annotate.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Directory for the annotation files.")
@click.option("--outputs", default=",".join(OUTPUT_KINDS), show_default=True, help="Comma-separated output kinds.")
@click.option("--encoder", default=None, help="Encoder model id, e.g. hashrp-512; required for embedding outputs.")
@click.option("--batch-size", default=64, show_default=True, type=int, help="Records annotated per batch.")
@click.option("--upos-overrides", default=None, type=click.Path(exists=True, dir_okay=False), help="Extra token<TAB>UPOS overrides layered over the shipped list.")
@click.option("--check/--no-check", default=True, show_default=True, help="Re-read the outputs with the strict readers after writing.")
def main(corpus_path: str, out_dir: str, outputs: str, encoder: str | None,
         batch_size: int, upos_overrides: str | None, check: bool) -> None:
    """Annotate a corpus with parses, trees, and embeddings."""
    kinds = tuple(part.strip() for part in outputs.split(",") if part.strip())
    try:
        job = AnnotationJob(
            corpus_path=corpus_path,
            out_dir=out_dir,
            outputs=kinds,
            encoder=encoder,
            batch_size=batch_size,
            upos_overrides=upos_overrides,
        )
        result = annotate(job)
    except (AnnotatorError, IngestError, ValueError) as exc:
        raise InputError(str(exc)) from exc

    summary: dict[str, object] = {
        "out_dir": str(result.out_dir),
        "n_records": result.n_records,
        "n_annotated": result.n_annotated,
        "skipped": list(result.skipped),
        "files": {kind: path.name for kind, path in result.paths.items()},
    }
    if check:
        report = verify(result.out_dir, corpus_path=corpus_path)
        summary["coverage"] = report.coverage
        summary["violations"] = list(report.violations)
        if not report.clean:
            click.echo(json.dumps(summary, sort_keys=True))
            raise InputError("verification found violations")
    click.echo(json.dumps(summary, sort_keys=True))


if __name__ == "__main__":
    main()
