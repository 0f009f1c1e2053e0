"""HTTP/JSON validation service.

One draft per process, matching the indexer workflow (one book at a time).
All mutation flows through POST /decisions; every accepted decision is
appended to a log file before it is visible, so the validated index is
always a pure function of (draft file, decision log) and a crashed or
restarted session replays to exactly the same state.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .errors import (
    CorruptDecisionLog,
    InvalidDecision,
    StaleDraft,
    UnknownSubject,
)
from .index import (
    Decision,
    DraftIndex,
    apply_validation_decisions,
    check_decision,
    render_text,
)
from .interchange import (
    decision_to_record,
    export_interchange,
    import_interchange,
    record_to_decision,
)

SCHEMA_VERSION_HEADER = "X-Schema-Version"
SCHEMA_VERSION = "1"

FILTERS = ("all", "undecided", "accepted", "rejected")


def load_decision_log(path: Path) -> list[Decision]:
    """Replay the append-only log; refuse to start on a bad line."""
    if not path.exists():
        return []
    decisions = []
    for lineno, line in enumerate(
        path.read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            decisions.append(record_to_decision(json.loads(line)))
        except Exception as exc:
            raise CorruptDecisionLog(f"{path}:{lineno}: {exc}") from exc
    return decisions


def load_draft_and_log(
    draft_path: Path, log_path: Path
) -> tuple[DraftIndex, list[Decision]]:
    draft = import_interchange(Path(draft_path).read_text(encoding="utf-8"))
    return draft, load_decision_log(Path(log_path))


class DecisionIn(BaseModel):
    subject_kind: str
    subject_id: str
    action: str
    payload: str | None = None
    author: str = "indexer"
    timestamp: int | None = None
    document_id: str | None = None


class ServiceState:
    def __init__(self, draft: DraftIndex, log_path: Path, decisions: list[Decision]):
        self.draft = draft
        self.log_path = Path(log_path)
        self.decisions = list(decisions)
        self.lock = threading.Lock()

    def snapshot(self) -> list[Decision]:
        with self.lock:
            return list(self.decisions)

    def term_states(self, decisions: list[Decision]) -> dict[int, str]:
        states: dict[int, str] = {t.id: "undecided" for t in self.draft.terms}
        for d in decisions:
            if d.subject_kind == "term" and d.subject_id.isdigit():
                tid = int(d.subject_id)
                if tid in states and d.action in ("accept", "reject"):
                    states[tid] = d.action + "ed"
        return states

    def tallies(self, decisions: list[Decision]) -> dict[str, int]:
        states = self.term_states(decisions)
        return {
            "terms": len(states),
            "accepted": sum(1 for s in states.values() if s == "accepted"),
            "rejected": sum(1 for s in states.values() if s == "rejected"),
            "undecided": sum(1 for s in states.values() if s == "undecided"),
            "decisions": len(decisions),
        }

    def append(self, decision: Decision) -> dict[str, int]:
        with self.lock:
            # validate against the full prospective log so an unreplayable
            # decision never reaches the file
            apply_validation_decisions(self.draft, self.decisions + [decision])
            with self.log_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(decision_to_record(decision), sort_keys=True) + "\n")
            self.decisions.append(decision)
            return self.tallies(self.decisions)


def create_app(
    draft: DraftIndex,
    log_path: Path,
    initial_decisions: list[Decision] | None = None,
    ui_dir: Path | None = None,
) -> FastAPI:
    state = ServiceState(draft, log_path, initial_decisions or [])
    app = FastAPI(title="index validation service")
    app.state.service = state

    @app.middleware("http")
    async def schema_version_header(request: Request, call_next):
        response: Response = await call_next(request)
        response.headers[SCHEMA_VERSION_HEADER] = SCHEMA_VERSION
        return response

    terms_by_id = {t.id: t for t in draft.terms}
    canonical = {t.id: t.canonical for t in draft.terms}
    breakdowns = dict(draft.ranking.entries)

    def entry_view(tid: int, states: dict[int, str]) -> dict[str, Any]:
        bd = breakdowns.get(tid)
        term = terms_by_id[tid]
        return {
            "term_id": tid,
            "canonical": term.canonical,
            "label": next(
                (e.label for e in draft.all_entries() if e.term_id == tid), term.canonical
            ),
            "tf": term.tf,
            "decision_state": states.get(tid, "undecided"),
            "components": {
                "frequency": bd.frequency_component if bd else 0.0,
                "dispersion": bd.dispersion_component if bd else 0.0,
                "salience": bd.salience_component if bd else 0.0,
                "cohesion": bd.cohesion_component if bd else 0.0,
            },
            "total": bd.total if bd else 0.0,
        }

    @app.get("/entries")
    def list_entries(page: int = 0, page_size: int = 50, filter: str = "all"):
        if page < 0 or page_size < 1 or page_size > 500:
            raise HTTPException(status_code=400, detail="bad pagination")
        if filter not in FILTERS:
            raise HTTPException(status_code=400, detail=f"unknown filter {filter!r}")
        decisions = state.snapshot()
        states = state.term_states(decisions)
        ranked_ids = draft.ranking.term_ids()
        if filter != "all":
            ranked_ids = [t for t in ranked_ids if states.get(t) == filter]
        window = ranked_ids[page * page_size: (page + 1) * page_size]
        return {
            "summary": {
                "document_id": draft.document_id,
                "status": draft.status,
                "budget": draft.budget,
                "truncation_warning": draft.truncation_warning,
                **state.tallies(decisions),
            },
            "page": page,
            "page_size": page_size,
            "total_entries": len(ranked_ids),
            "entries": [entry_view(tid, states) for tid in window],
        }

    @app.get("/terms/{term_id}")
    def get_term(term_id: int):
        term = terms_by_id.get(term_id)
        if term is None:
            raise HTTPException(status_code=404, detail=f"unknown term {term_id}")
        decisions = state.snapshot()
        states = state.term_states(decisions)
        entry = next((e for e in draft.all_entries() if e.term_id == term_id), None)
        relations = [
            {
                "subject_id": f"{r.source_id}:{r.target_id}:{r.kind}",
                "source_id": r.source_id,
                "target_id": r.target_id,
                "source": canonical.get(r.source_id, "?"),
                "target": canonical.get(r.target_id, "?"),
                "kind": r.kind,
                "evidence": r.evidence,
                "confidence": r.confidence,
            }
            for r in draft.relations
            if term_id in (r.source_id, r.target_id)
        ]
        return {
            **entry_view(term_id, states),
            "is_acronym": term.is_acronym,
            "relations": relations,
            "occurrences": [
                {
                    "page": o.page,
                    "segment_id": o.segment_id,
                    "span": list(o.token_span),
                    "in_heading": o.in_heading,
                    "emphasized": o.emphasized,
                    "cue_context": o.cue_context,
                }
                for o in term.occurrences
            ],
            "page_refs": [
                {"start": r.start, "end": r.end, "qualified": r.qualified,
                 "subject_id": f"{term_id}:{r.start}-{r.end}"}
                for r in (entry.page_refs if entry else [])
            ],
            "see": entry.see if entry else None,
            "see_also": list(entry.see_also) if entry else [],
            "segment_previews": [
                {
                    "segment_id": ref.segment_id,
                    "occurrence_count": ref.occurrence_count,
                    "score": ref.score,
                    "preview": ref.preview,
                    "subject_id": f"{term_id}:{ref.segment_id}",
                }
                for ref in draft.segment_refs.get(term_id, [])
            ],
        }

    @app.get("/decisions")
    def list_decisions():
        decisions = state.snapshot()
        return {
            "decisions": [decision_to_record(d) for d in decisions],
            "tallies": state.tallies(decisions),
        }

    @app.post("/decisions")
    def post_decision(body: DecisionIn):
        decision = Decision(
            subject_kind=body.subject_kind,
            subject_id=body.subject_id,
            action=body.action,
            payload=body.payload,
            author=body.author,
            timestamp=body.timestamp if body.timestamp is not None else int(time.time()),
            document_id=body.document_id,
        )
        try:
            check_decision(draft, decision)
            tallies = state.append(decision)
        except UnknownSubject as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except StaleDraft as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except InvalidDecision as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {"ok": True, "tallies": tallies}

    @app.get("/export")
    def export(format: str = "interchange"):
        decisions = state.snapshot()
        validated = apply_validation_decisions(draft, decisions)
        if format == "interchange":
            # exact exporter bytes so downloads round-trip through the CLI
            return Response(
                content=export_interchange(validated), media_type="application/json"
            )
        if format == "text":
            return PlainTextResponse(render_text(validated))
        raise HTTPException(status_code=400, detail=f"unknown format {format!r}")

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
