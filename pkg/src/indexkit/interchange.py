"""Versioned interchange format for draft indexes.

A draft index is fully self-contained in one JSON document (schema
version 1): terms with their occurrences, the entry tree, relations,
per-term references, the ranked list with score breakdowns, and the
decision trail. The validation service works from this file alone, and
export∘import is the identity. Field order is fixed so repeated exports of
the same draft are byte-identical.

The normative field-by-field description lives in docs/interchange_format.md.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Any

from .errors import MalformedDocument, SchemaVersionMismatch
from .index import Decision, DraftIndex, IndexEntry
from .ranking import RankedList, RankingWeights, ScoreBreakdown
from .references import PageRef, SegmentRef
from .relations import Relation
from .terms import CandidateTerm, TermOccurrence

SCHEMA_VERSION = 1
FORMAT_NAME = "index-draft"


def _occurrence_to_obj(occ: TermOccurrence) -> dict[str, Any]:
    return {
        "span": [occ.token_span[0], occ.token_span[1]],
        "page": occ.page,
        "segment_id": occ.segment_id,
        "in_heading": occ.in_heading,
        "emphasized": occ.emphasized,
        "cue_context": occ.cue_context,
    }


def _term_to_obj(term: CandidateTerm) -> dict[str, Any]:
    return {
        "id": term.id,
        "canonical": term.canonical,
        "head_lemma": term.head_lemma,
        "modifier_lemmas": list(term.modifier_lemmas),
        "is_acronym": term.is_acronym,
        "surfaces": {s: c for s, c in sorted(term.surface_counts.items())},
        "occurrences": [_occurrence_to_obj(o) for o in term.occurrences],
    }


def _page_ref_to_obj(ref: PageRef) -> list[Any]:
    return [ref.start, ref.end, ref.qualified]


def _entry_to_obj(entry: IndexEntry) -> dict[str, Any]:
    return {
        "term_id": entry.term_id,
        "label": entry.label,
        "page_refs": [_page_ref_to_obj(r) for r in entry.page_refs],
        "see": entry.see,
        "see_also": list(entry.see_also),
        "rank_score": entry.rank_score,
        "sub_entries": [_entry_to_obj(s) for s in entry.sub_entries],
    }


def _relation_to_obj(rel: Relation) -> dict[str, Any]:
    return {
        "source_id": rel.source_id,
        "target_id": rel.target_id,
        "kind": rel.kind,
        "evidence": rel.evidence,
        "confidence": rel.confidence,
        "provenance": list(rel.provenance),
    }


def _segment_ref_to_obj(ref: SegmentRef) -> dict[str, Any]:
    return {
        "segment_id": ref.segment_id,
        "occurrence_count": ref.occurrence_count,
        "score": ref.score,
        "preview": ref.preview,
    }


def decision_to_record(decision: Decision) -> dict[str, Any]:
    return {
        "subject_kind": decision.subject_kind,
        "subject_id": decision.subject_id,
        "action": decision.action,
        "payload": decision.payload,
        "author": decision.author,
        "timestamp": decision.timestamp,
        "document_id": decision.document_id,
    }


def record_to_decision(obj: dict[str, Any]) -> Decision:
    try:
        return Decision(
            subject_kind=str(obj["subject_kind"]),
            subject_id=str(obj["subject_id"]),
            action=str(obj["action"]),
            payload=obj.get("payload"),
            author=str(obj.get("author", "indexer")),
            timestamp=int(obj.get("timestamp", 0)),
            document_id=obj.get("document_id"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"bad decision record: {exc}") from exc


def _ranking_to_obj(ranking: RankedList) -> dict[str, Any]:
    weights = (
        ranking.entries[0][1].weights if ranking.entries else RankingWeights()
    )
    return {
        "ordering_key": ranking.ordering_key,
        "truncation_warning": ranking.truncation_warning,
        "weights": {
            "frequency": weights.frequency,
            "dispersion": weights.dispersion,
            "salience": weights.salience,
            "cohesion": weights.cohesion,
        },
        "entries": [
            {
                "term_id": tid,
                "frequency": bd.frequency_component,
                "dispersion": bd.dispersion_component,
                "salience": bd.salience_component,
                "cohesion": bd.cohesion_component,
                "total": bd.total,
            }
            for tid, bd in ranking.entries
        ],
    }


def draft_to_obj(draft: DraftIndex) -> dict[str, Any]:
    return {
        "format": FORMAT_NAME,
        "version": SCHEMA_VERSION,
        "document_id": draft.document_id,
        "status": draft.status,
        "budget": draft.budget,
        "truncation_warning": draft.truncation_warning,
        "max_depth": draft.max_depth,
        "terms": [_term_to_obj(t) for t in draft.terms],
        "entries": [_entry_to_obj(e) for e in draft.entries],
        "relations": [_relation_to_obj(r) for r in draft.relations],
        "own_page_refs": {
            str(tid): [_page_ref_to_obj(r) for r in refs]
            for tid, refs in sorted(draft.own_page_refs.items())
        },
        "segment_refs": {
            str(tid): [_segment_ref_to_obj(r) for r in refs]
            for tid, refs in sorted(draft.segment_refs.items())
        },
        "ranking": _ranking_to_obj(draft.ranking),
        "decisions": [decision_to_record(d) for d in draft.decisions],
    }


def export_interchange(draft: DraftIndex) -> str:
    return json.dumps(draft_to_obj(draft), indent=2, ensure_ascii=False) + "\n"


def _obj_to_occurrence(obj: dict[str, Any], term_id: int) -> TermOccurrence:
    return TermOccurrence(
        term_id=term_id,
        token_span=(int(obj["span"][0]), int(obj["span"][1])),
        page=int(obj["page"]),
        segment_id=int(obj["segment_id"]),
        in_heading=bool(obj["in_heading"]),
        emphasized=bool(obj["emphasized"]),
        cue_context=bool(obj["cue_context"]),
    )


def _obj_to_term(obj: dict[str, Any]) -> CandidateTerm:
    tid = int(obj["id"])
    return CandidateTerm(
        id=tid,
        canonical=str(obj["canonical"]),
        head_lemma=str(obj["head_lemma"]),
        modifier_lemmas=[str(w) for w in obj["modifier_lemmas"]],
        occurrences=[_obj_to_occurrence(o, tid) for o in obj["occurrences"]],
        surface_counts=Counter({str(s): int(c) for s, c in obj["surfaces"].items()}),
        is_acronym=bool(obj["is_acronym"]),
    )


def _obj_to_page_ref(obj: list[Any]) -> PageRef:
    return PageRef(start=int(obj[0]), end=int(obj[1]), qualified=bool(obj[2]))


def _obj_to_entry(obj: dict[str, Any]) -> IndexEntry:
    return IndexEntry(
        term_id=int(obj["term_id"]),
        label=str(obj["label"]),
        page_refs=[_obj_to_page_ref(r) for r in obj["page_refs"]],
        sub_entries=[_obj_to_entry(s) for s in obj["sub_entries"]],
        see=None if obj["see"] is None else int(obj["see"]),
        see_also=[int(t) for t in obj["see_also"]],
        rank_score=float(obj["rank_score"]),
    )


def _obj_to_relation(obj: dict[str, Any]) -> Relation:
    return Relation(
        source_id=int(obj["source_id"]),
        target_id=int(obj["target_id"]),
        kind=str(obj["kind"]),
        evidence=str(obj["evidence"]),
        confidence=float(obj["confidence"]),
        provenance=[str(p) for p in obj["provenance"]],
    )


def _obj_to_ranking(obj: dict[str, Any]) -> RankedList:
    weights = RankingWeights(
        frequency=float(obj["weights"]["frequency"]),
        dispersion=float(obj["weights"]["dispersion"]),
        salience=float(obj["weights"]["salience"]),
        cohesion=float(obj["weights"]["cohesion"]),
    )
    entries = []
    for e in obj["entries"]:
        bd = ScoreBreakdown(
            frequency_component=float(e["frequency"]),
            dispersion_component=float(e["dispersion"]),
            salience_component=float(e["salience"]),
            cohesion_component=float(e["cohesion"]),
            total=float(e["total"]),
            weights=weights,
        )
        entries.append((int(e["term_id"]), bd))
    return RankedList(
        entries=entries,
        ordering_key=str(obj["ordering_key"]),
        truncation_warning=bool(obj["truncation_warning"]),
    )


def obj_to_draft(obj: dict[str, Any]) -> DraftIndex:
    if not isinstance(obj, dict):
        raise MalformedDocument("interchange root must be an object")
    version = obj.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"unsupported schema version {version!r}")
    if obj.get("format") != FORMAT_NAME:
        raise MalformedDocument(f"unexpected format {obj.get('format')!r}")
    try:
        return DraftIndex(
            document_id=str(obj["document_id"]),
            entries=[_obj_to_entry(e) for e in obj["entries"]],
            relations=[_obj_to_relation(r) for r in obj["relations"]],
            segment_refs={
                int(tid): [
                    SegmentRef(
                        term_id=int(tid),
                        segment_id=int(r["segment_id"]),
                        occurrence_count=int(r["occurrence_count"]),
                        score=float(r["score"]),
                        preview=str(r["preview"]),
                    )
                    for r in refs
                ]
                for tid, refs in obj["segment_refs"].items()
            },
            ranking=_obj_to_ranking(obj["ranking"]),
            status=str(obj["status"]),
            decisions=[record_to_decision(d) for d in obj["decisions"]],
            terms=[_obj_to_term(t) for t in obj["terms"]],
            own_page_refs={
                int(tid): [_obj_to_page_ref(r) for r in refs]
                for tid, refs in obj["own_page_refs"].items()
            },
            budget=None if obj["budget"] is None else int(obj["budget"]),
            truncation_warning=bool(obj["truncation_warning"]),
            max_depth=int(obj["max_depth"]),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise MalformedDocument(f"bad interchange document: {exc}") from exc


def import_interchange(text: str | bytes) -> DraftIndex:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(str(exc)) from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from exc
    return obj_to_draft(obj)
