"""Command-line front door: build, eval, serve.

`build` runs the whole pipeline on one document and writes the interchange
file plus the text rendering; `eval` scores a candidate index against
reference files; `serve` starts the validation service over a draft with
an append-only decision log beside it.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import PipelineConfig
from .corpus import ingest_plain_text, ingest_tagged
from .errors import IndexkitError
from .evaluation import (
    ReferenceIndex,
    compare_reports,
    evaluate,
    load_reference_index,
)
from .index import render_text
from .interchange import export_interchange, import_interchange
from .pipeline import build_draft


def _fail(exc: Exception) -> None:
    click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Build, validate, and evaluate back-of-the-book indexes."""


@main.command("build")
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--config", "config_path", type=click.Path(path_type=Path))
@click.option("--format", "input_format", type=click.Choice(["plain", "tagged"]), default="plain")
@click.option("--rules", "rules_path", type=click.Path(path_type=Path))
@click.option("--synonyms", "synonyms_path", type=click.Path(path_type=Path))
@click.option("--lexicon", "lexicon_path", type=click.Path(path_type=Path))
@click.option("--max-entries", "max_entries", type=int, help="Editorial budget.")
@click.option("--first-page", "first_page", type=int)
@click.option("--out", "out_prefix", required=True, type=click.Path(path_type=Path),
              help="Output prefix: writes <out>.json and <out>.txt.")
def cmd_build(
    input_path: Path,
    config_path: Path | None,
    input_format: str,
    rules_path: Path | None,
    synonyms_path: Path | None,
    lexicon_path: Path | None,
    max_entries: int | None,
    first_page: int | None,
    out_prefix: Path,
) -> None:
    """Build a draft index from a document."""
    try:
        config = PipelineConfig.load(config_path) if config_path else PipelineConfig()
        config.document_id = input_path.stem
        if rules_path is not None:
            config.rules_path = rules_path
        if synonyms_path is not None:
            config.synonyms_path = synonyms_path
        if lexicon_path is not None:
            config.lexicon_path = lexicon_path
        if max_entries is not None:
            config.budget = max_entries
        if first_page is not None:
            config.first_page = first_page
        config.validate()

        source = input_path.read_text(encoding="utf-8")
        options = config.ingest_options()
        if input_format == "tagged":
            doc = ingest_tagged(source, options)
        else:
            doc = ingest_plain_text(source, options)
        draft = build_draft(doc, config)

        interchange_path = out_prefix.with_suffix(".json")
        text_path = out_prefix.with_suffix(".txt")
        interchange_path.parent.mkdir(parents=True, exist_ok=True)
        interchange_path.write_text(export_interchange(draft), encoding="utf-8")
        text_path.write_text(render_text(draft), encoding="utf-8")
        entries = sum(1 for _ in draft.all_entries())
        click.echo(
            f"terms={len(draft.terms)} relations={len(draft.relations)} entries={entries}",
            err=True,
        )
    except (IndexkitError, OSError) as exc:
        _fail(exc)


def _load_reference_file(path: Path, source_kind: str) -> ReferenceIndex:
    """Reference files may be line-format indexes or interchange drafts."""
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        from .evaluation import as_reference

        return as_reference(import_interchange(text), source_kind)
    return load_reference_index(path, source_kind)


@main.command("eval")
@click.option("--draft", "draft_path", required=True, type=click.Path(path_type=Path))
@click.option("--reference", "reference_path", required=True, type=click.Path(path_type=Path))
@click.option("--traditional", "traditional_path", type=click.Path(path_type=Path))
@click.option("--k", "k", type=int, help="Ranked-precision cutoff (default: reference size).")
@click.option("--report", "report_format", type=click.Choice(["table", "machine"]), default="table")
@click.option("--label", "label", default="", help="Column label for the report.")
def cmd_eval(
    draft_path: Path,
    reference_path: Path,
    traditional_path: Path | None,
    k: int | None,
    report_format: str,
    label: str,
) -> None:
    """Score a draft against a validated reference (and optionally a
    traditional index)."""
    try:
        draft = import_interchange(draft_path.read_text(encoding="utf-8"))
        validated = _load_reference_file(reference_path, "validated")
        traditional = (
            _load_reference_file(traditional_path, "manual")
            if traditional_path
            else None
        )
        report = evaluate(
            draft, validated, traditional, k=k, corpus_label=label or draft.document_id
        )
        if report_format == "machine":
            import json

            payload = {
                "corpus_label": report.corpus_label,
                "descriptor_precision": report.descriptor_precision,
                "ranked_precision": report.ranked_precision,
                "relation_precision": report.relation_precision,
                "size_increase_pct": report.size_increase_pct,
                "relations_per_descriptor_increase_pct": report.relations_per_descriptor_increase_pct,
                "counts": report.counts,
            }
            click.echo(json.dumps(payload, indent=2, sort_keys=True))
        else:
            click.echo(compare_reports([report]), nl=False)
    except (IndexkitError, OSError) as exc:
        _fail(exc)


@main.command("serve")
@click.option("--draft", "draft_path", required=True, type=click.Path(path_type=Path))
@click.option("--port", type=int, default=8766)
@click.option("--host", default="127.0.0.1")
@click.option("--log", "log_path", type=click.Path(path_type=Path),
              help="Decision log (default: <draft>.decisions.log).")
@click.option("--ui", "ui_dir", type=click.Path(path_type=Path),
              help="Directory of built UI assets to serve at /ui.")
def cmd_serve(
    draft_path: Path,
    port: int,
    host: str,
    log_path: Path | None,
    ui_dir: Path | None,
) -> None:
    """Serve the validation API (and UI) for one draft."""
    try:
        from .service import create_app, load_draft_and_log

        draft, log = load_draft_and_log(
            draft_path, log_path or Path(str(draft_path) + ".decisions.log")
        )
        app = create_app(
            draft,
            log_path or Path(str(draft_path) + ".decisions.log"),
            initial_decisions=log,
            ui_dir=ui_dir,
        )
        import uvicorn

        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        if getattr(exc, "errno", None) == 98:  # EADDRINUSE
            click.echo(f"error: PortInUse: {port}", err=True)
            sys.exit(1)
        _fail(exc)
    except IndexkitError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
