"""Draft index assembly, validation decisions, and rendering.

The draft index is the unit everything else exchanges: the pipeline builds
it, the service serves it, the UI edits it through decisions, the
evaluator compares it. Its nomenclature is a tree: each surviving term is
filed exactly once, nested under its strongest surviving generic ancestor
(one parent only; the printable index needs unique placement). Hypernym
parents that lost the placement race, plus synonymy/association edges,
surface as see-also cross references. Acronym variants become `see`
redirect lines and never carry page references of their own.
"""

from __future__ import annotations

import copy
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    InconsistentInputs,
    InvalidDecision,
    StaleDraft,
    UnknownSubject,
)
from .ranking import RankedList
from .references import PageRef, SegmentRef
from .relations import ASSOCIATION, HYPERNYMY, SYNONYMY, VARIANT, Relation
from .terms import CandidateTerm

DEFAULT_MAX_DEPTH = 2

# function words trimmed from the edges of a shortened sub-entry label
_LABEL_TRIM = frozenset(
    {"of", "for", "in", "on", "to", "and", "or", "the", "a", "an", "at",
     "by", "with", "from"}
)


@dataclass
class IndexEntry:
    term_id: int
    label: str
    page_refs: list[PageRef] = field(default_factory=list)
    sub_entries: list["IndexEntry"] = field(default_factory=list)
    see: int | None = None
    see_also: list[int] = field(default_factory=list)
    rank_score: float = 0.0


@dataclass
class Decision:
    subject_kind: str  # term | relation | page_ref | segment_ref
    subject_id: str
    action: str  # accept | reject | relabel | retarget
    payload: str | None = None
    author: str = "indexer"
    timestamp: int = 0
    document_id: str | None = None


SUBJECT_KINDS = ("term", "relation", "page_ref", "segment_ref")
ACTIONS = ("accept", "reject", "relabel", "retarget")


@dataclass
class DraftIndex:
    document_id: str
    entries: list[IndexEntry]
    relations: list[Relation]
    segment_refs: dict[int, list[SegmentRef]]
    ranking: RankedList
    status: str = "draft"
    decisions: list[Decision] = field(default_factory=list)
    terms: list[CandidateTerm] = field(default_factory=list)
    own_page_refs: dict[int, list[PageRef]] = field(default_factory=dict)
    budget: int | None = None
    truncation_warning: bool = False
    max_depth: int = DEFAULT_MAX_DEPTH

    def term_by_id(self, term_id: int) -> CandidateTerm | None:
        for t in self.terms:
            if t.id == term_id:
                return t
        return None

    def all_entries(self) -> Iterator[IndexEntry]:
        def walk(entries: Iterable[IndexEntry]) -> Iterator[IndexEntry]:
            for e in entries:
                yield e
                yield from walk(e.sub_entries)

        return walk(self.entries)

    def entry_by_term(self, term_id: int) -> IndexEntry | None:
        for e in self.all_entries():
            if e.term_id == term_id:
                return e
        return None

    def canonicals(self) -> list[str]:
        by_id = {t.id: t.canonical for t in self.terms}
        return [by_id[e.term_id] for e in self.all_entries()]

    def validate(self) -> None:
        """Re-check the structural invariants; raises InconsistentInputs."""
        term_ids = {t.id for t in self.terms}
        seen: set[int] = set()
        for e in self.all_entries():
            if e.term_id in seen:
                raise InconsistentInputs(f"term {e.term_id} filed twice")
            seen.add(e.term_id)
            if e.term_id not in term_ids:
                raise InconsistentInputs(f"entry references unknown term {e.term_id}")
            if e.see is not None and (e.page_refs or e.sub_entries):
                raise InconsistentInputs("redirect entry carries pages or sub-entries")
            for t in e.see_also:
                if t not in term_ids:
                    raise InconsistentInputs(f"see-also target {t} missing")
            for a, b in zip(e.page_refs, e.page_refs[1:]):
                if not (a.start <= a.end < b.start <= b.end):
                    raise InconsistentInputs("page refs not sorted/disjoint")
        if seen != term_ids:
            raise InconsistentInputs("terms and entry tree out of sync")
        for rel in self.relations:
            if rel.source_id not in term_ids or rel.target_id not in term_ids:
                raise InconsistentInputs("relation endpoint missing from nomenclature")


def display_label(term: CandidateTerm) -> str:
    """Preferred surface of the term, first letter capitalized."""
    surface = term.preferred_surface() if term.surface_counts else term.canonical
    if surface[:1].islower():
        return surface[:1].upper() + surface[1:]
    return surface


def sub_entry_label(child: CandidateTerm, parent: CandidateTerm) -> str:
    """Drop the parent's repeated words: 'knowledge acquisition' under
    'Knowledge' displays as 'Acquisition'."""
    pool = Counter(parent.words)
    remaining: list[str] = []
    for w in child.words:
        if pool[w] > 0:
            pool[w] -= 1
            continue
        remaining.append(w)
    while remaining and remaining[0] in _LABEL_TRIM:
        remaining.pop(0)
    while remaining and remaining[-1] in _LABEL_TRIM:
        remaining.pop()
    if not remaining:
        return display_label(child)
    label = " ".join(remaining)
    return label[:1].upper() + label[1:]


def resolve_redirects(relations: Sequence[Relation], survivors: set[int]) -> dict[int, int]:
    """source term -> final redirect target from variant edges."""
    best: dict[int, Relation] = {}
    for rel in relations:
        if rel.kind != VARIANT:
            continue
        if rel.source_id not in survivors or rel.target_id not in survivors:
            continue
        prev = best.get(rel.source_id)
        if prev is None or (rel.confidence, -rel.target_id) > (prev.confidence, -prev.target_id):
            best[rel.source_id] = rel
    redirect = {src: rel.target_id for src, rel in best.items()}
    resolved: dict[int, int] = {}
    for src in redirect:
        target = redirect[src]
        hops = {src}
        while target in redirect and target not in hops:
            hops.add(target)
            target = redirect[target]
        if target != src:
            resolved[src] = target
    return resolved


def build_draft_index(
    document_id: str,
    terms: Sequence[CandidateTerm],
    relations: Sequence[Relation],
    page_refs: Mapping[int, list[PageRef]],
    segment_refs: Mapping[int, list[SegmentRef]],
    ranked: RankedList,
    budget: int | None = None,
    own_page_refs: Mapping[int, list[PageRef]] | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> DraftIndex:
    """Assemble the entry tree from the pipeline products.

    `ranked` is expected to be budget-truncated already; it defines the
    surviving nomenclature. `page_refs` carries each entry's visible
    references (variant closure applied), `own_page_refs` the closure-free
    calculus used if a redirect is later dissolved by the indexer.
    """
    terms_by_id = {t.id: t for t in terms}
    for tid, _ in ranked.entries:
        if tid not in terms_by_id:
            raise InconsistentInputs(f"ranked term {tid} missing from term list")
    for rel in relations:
        if rel.source_id not in terms_by_id or rel.target_id not in terms_by_id:
            raise InconsistentInputs("relation endpoint missing from term list")
    for tid in list(page_refs) + list(segment_refs):
        if tid not in terms_by_id:
            raise InconsistentInputs(f"references for unknown term {tid}")

    survivors = set(ranked.term_ids())
    kept_relations = [
        r for r in relations
        if r.source_id in survivors and r.target_id in survivors
    ]
    redirect = resolve_redirects(kept_relations, survivors)
    scores = {tid: bd.total for tid, bd in ranked.entries}

    # one parent per term: strongest surviving hypernym; prefix parents win
    # confidence ties (compounds file under their first word)
    hyper_in: dict[int, list[Relation]] = {}
    for rel in kept_relations:
        if rel.kind == HYPERNYMY:
            hyper_in.setdefault(rel.target_id, []).append(rel)
    parent: dict[int, int | None] = {}
    see_also: dict[int, list[int]] = {tid: [] for tid in survivors}
    for tid in survivors:
        if tid in redirect:
            parent[tid] = None
            continue
        term = terms_by_id[tid]
        candidates = [
            r for r in hyper_in.get(tid, ())
            if r.source_id not in redirect and r.source_id != tid
        ]

        def rank_candidate(r: Relation) -> tuple:
            src = terms_by_id[r.source_id]
            is_prefix = term.words[: len(src.words)] == src.words
            return (-r.confidence, 0 if is_prefix else 1, src.canonical, r.source_id)

        candidates.sort(key=rank_candidate)
        parent[tid] = candidates[0].source_id if candidates else None
        for r in candidates[1:]:
            if r.source_id not in see_also[tid]:
                see_also[tid].append(r.source_id)

    # enforce the nesting depth cap by promoting offenders to top level
    def depth_of(tid: int) -> int:
        d = 1
        cur = parent.get(tid)
        while cur is not None:
            d += 1
            cur = parent.get(cur)
        return d

    while True:
        violators = sorted(
            (tid for tid in survivors if tid not in redirect and depth_of(tid) > max_depth),
            key=lambda t: (depth_of(t), terms_by_id[t].canonical),
        )
        if not violators:
            break
        tid = violators[0]
        old = parent[tid]
        parent[tid] = None
        if old is not None and old not in see_also[tid]:
            see_also[tid].append(old)

    # symmetric cross references
    for rel in kept_relations:
        if rel.kind not in (SYNONYMY, ASSOCIATION):
            continue
        a, b = rel.source_id, rel.target_id
        if a in redirect or b in redirect:
            continue
        if parent.get(a) != b and b not in see_also[a]:
            see_also[a].append(b)
        if parent.get(b) != a and a not in see_also[b]:
            see_also[b].append(a)

    nodes: dict[int, IndexEntry] = {}
    for tid in survivors:
        term = terms_by_id[tid]
        if tid in redirect:
            nodes[tid] = IndexEntry(
                term_id=tid,
                label=display_label(term),
                see=redirect[tid],
                rank_score=scores.get(tid, 0.0),
            )
            continue
        p = parent.get(tid)
        label = (
            sub_entry_label(term, terms_by_id[p]) if p is not None else display_label(term)
        )
        cleaned_see_also = sorted(
            (t for t in see_also[tid] if t != tid and t != p and t not in redirect),
            key=lambda t: terms_by_id[t].canonical,
        )
        nodes[tid] = IndexEntry(
            term_id=tid,
            label=label,
            page_refs=list(page_refs.get(tid, [])),
            see_also=cleaned_see_also,
            rank_score=scores.get(tid, 0.0),
        )

    top: list[IndexEntry] = []
    for tid in survivors:
        node = nodes[tid]
        p = parent.get(tid)
        if p is None or tid in redirect:
            top.append(node)
        else:
            nodes[p].sub_entries.append(node)
    canonical_of = {tid: terms_by_id[tid].canonical for tid in survivors}
    top.sort(key=lambda e: canonical_of[e.term_id])
    for node in nodes.values():
        node.sub_entries.sort(key=lambda e: (e.label.lower(), canonical_of[e.term_id]))

    draft = DraftIndex(
        document_id=document_id,
        entries=top,
        relations=kept_relations,
        segment_refs={tid: list(segment_refs.get(tid, [])) for tid in sorted(survivors)},
        ranking=ranked,
        status="draft",
        decisions=[],
        terms=[terms_by_id[tid] for tid in sorted(survivors)],
        own_page_refs={
            tid: list((own_page_refs or page_refs).get(tid, [])) for tid in sorted(survivors)
        },
        budget=budget,
        truncation_warning=ranked.truncation_warning,
        max_depth=max_depth,
    )
    draft.validate()
    return draft


# ---------------------------------------------------------------------------
# Validation decisions
# ---------------------------------------------------------------------------


def page_ref_subject_id(term_id: int, ref: PageRef) -> str:
    return f"{term_id}:{ref.start}-{ref.end}"


def segment_ref_subject_id(term_id: int, segment_id: int) -> str:
    return f"{term_id}:{segment_id}"


def relation_subject_id(rel: Relation) -> str:
    return f"{rel.source_id}:{rel.target_id}:{rel.kind}"


def _subject_exists(draft: DraftIndex, decision: Decision) -> bool:
    kind, sid = decision.subject_kind, decision.subject_id
    if kind == "term":
        return sid.isdigit() and any(t.id == int(sid) for t in draft.terms)
    if kind == "relation":
        return any(relation_subject_id(r) == sid for r in draft.relations)
    if kind == "page_ref":
        for e in draft.all_entries():
            for ref in e.page_refs:
                if page_ref_subject_id(e.term_id, ref) == sid:
                    return True
        return False
    if kind == "segment_ref":
        for tid, refs in draft.segment_refs.items():
            for ref in refs:
                if segment_ref_subject_id(tid, ref.segment_id) == sid:
                    return True
        return False
    return False


def check_decision(draft: DraftIndex, decision: Decision) -> None:
    """Raise if the decision cannot apply to this draft."""
    if decision.document_id and decision.document_id != draft.document_id:
        raise StaleDraft(
            f"decision for document {decision.document_id!r}, "
            f"draft is {draft.document_id!r}"
        )
    if decision.subject_kind not in SUBJECT_KINDS:
        raise InvalidDecision(f"unknown subject kind {decision.subject_kind!r}")
    if decision.action not in ACTIONS:
        raise InvalidDecision(f"unknown action {decision.action!r}")
    if decision.action == "relabel" and not (decision.payload or "").strip():
        raise InvalidDecision("relabel requires a non-empty payload")
    if decision.action in ("relabel", "retarget") and decision.subject_kind != "term":
        raise InvalidDecision(f"{decision.action} applies to term subjects only")
    if decision.action == "retarget" and decision.payload not in (None, ""):
        if not decision.payload.strip().isdigit():
            raise InvalidDecision("retarget payload must be a term id or empty")
    if not _subject_exists(draft, decision):
        raise UnknownSubject(
            f"{decision.subject_kind} {decision.subject_id!r} not in draft"
        )


def _last_per_subject(decisions: Sequence[Decision]) -> dict[tuple[str, str], Decision]:
    final: dict[tuple[str, str], Decision] = {}
    for d in decisions:
        final[(d.subject_kind, d.subject_id)] = d
    return final


def apply_validation_decisions(
    draft: DraftIndex, decisions: Sequence[Decision]
) -> DraftIndex:
    """Produce the validated index: last decision per subject wins.

    Rejected terms disappear, their sub-entries re-parented to the
    grandparent; rejected relations dissolve the nesting or cross reference
    they produced; relabels change display labels only. Pure function:
    applying the same list twice gives the same result.
    """
    for d in decisions:
        check_decision(draft, d)

    new = copy.deepcopy(draft)
    final = _last_per_subject(decisions)
    terms_by_id = {t.id: t for t in new.terms}

    parent_of: dict[int, int | None] = {}

    def reindex_parents() -> None:
        parent_of.clear()
        def walk(entries: Sequence[IndexEntry], parent: int | None) -> None:
            for e in entries:
                parent_of[e.term_id] = parent
                walk(e.sub_entries, e.term_id)
        walk(new.entries, None)

    def detach(tid: int) -> IndexEntry:
        container = (
            new.entries if parent_of[tid] is None
            else next(e for e in new.all_entries() if e.term_id == parent_of[tid]).sub_entries
        )
        node = next(e for e in container if e.term_id == tid)
        container.remove(node)
        return node

    def relabel_for_parent(node: IndexEntry, parent: int | None) -> None:
        term = terms_by_id[node.term_id]
        if parent is None:
            node.label = display_label(term)
        else:
            node.label = sub_entry_label(term, terms_by_id[parent])

    reindex_parents()

    # 1. rejected terms (and redirects left dangling by them)
    rejected = {
        int(d.subject_id)
        for (kind, _), d in final.items()
        if kind == "term" and d.action == "reject"
    }
    for e in list(new.all_entries()):
        if e.see is not None and e.see in rejected:
            rejected.add(e.term_id)
    for tid in sorted(rejected):
        if tid not in parent_of:
            continue
        node = detach(tid)
        grandparent = parent_of[tid]
        for child in node.sub_entries:
            relabel_for_parent(child, grandparent)
            if grandparent is None:
                new.entries.append(child)
            else:
                next(
                    e for e in new.all_entries() if e.term_id == grandparent
                ).sub_entries.append(child)
        reindex_parents()
    new.terms = [t for t in new.terms if t.id not in rejected]
    terms_by_id = {t.id: t for t in new.terms}
    new.relations = [
        r for r in new.relations
        if r.source_id not in rejected and r.target_id not in rejected
    ]
    new.segment_refs = {
        tid: refs for tid, refs in new.segment_refs.items() if tid not in rejected
    }
    new.own_page_refs = {
        tid: refs for tid, refs in new.own_page_refs.items() if tid not in rejected
    }
    new.ranking = RankedList(
        [(tid, bd) for tid, bd in new.ranking.entries if tid not in rejected],
        new.ranking.ordering_key,
        new.ranking.truncation_warning,
    )
    for e in new.all_entries():
        e.see_also = [t for t in e.see_also if t not in rejected]

    # 2. rejected relations
    rejected_rel_ids = {
        d.subject_id
        for (kind, _), d in final.items()
        if kind == "relation" and d.action == "reject"
    }
    if rejected_rel_ids:
        removed = [r for r in new.relations if relation_subject_id(r) in rejected_rel_ids]
        new.relations = [
            r for r in new.relations if relation_subject_id(r) not in rejected_rel_ids
        ]
        reindex_parents()
        for rel in removed:
            s, t = rel.source_id, rel.target_id
            if s not in terms_by_id or t not in terms_by_id:
                continue
            if rel.kind == HYPERNYMY and parent_of.get(t) == s:
                node = detach(t)
                relabel_for_parent(node, None)
                new.entries.append(node)
                reindex_parents()
            if rel.kind == VARIANT:
                entry = new.entry_by_term(s)
                if entry is not None and entry.see == t:
                    entry.see = None
                    entry.page_refs = list(new.own_page_refs.get(s, []))
            for e in new.all_entries():
                if e.term_id == s and t in e.see_also:
                    e.see_also.remove(t)
                if e.term_id == t and s in e.see_also:
                    e.see_also.remove(s)

    # 3. rejected page refs / segment refs
    for (kind, sid), d in final.items():
        if d.action != "reject":
            continue
        if kind == "page_ref":
            tid_s, _, span = sid.partition(":")
            start_s, _, end_s = span.partition("-")
            tid, start, end = int(tid_s), int(start_s), int(end_s)
            entry = new.entry_by_term(tid)
            if entry is not None:
                entry.page_refs = [
                    r for r in entry.page_refs if (r.start, r.end) != (start, end)
                ]
            if tid in new.own_page_refs:
                new.own_page_refs[tid] = [
                    r
                    for r in new.own_page_refs[tid]
                    if (r.start, r.end) != (start, end)
                ]
        elif kind == "segment_ref":
            tid_s, _, seg_s = sid.partition(":")
            tid, seg = int(tid_s), int(seg_s)
            if tid in new.segment_refs:
                new.segment_refs[tid] = [
                    r for r in new.segment_refs[tid] if r.segment_id != seg
                ]

    # 4. retargets
    reindex_parents()
    for (kind, sid), d in final.items():
        if kind != "term" or d.action != "retarget":
            continue
        tid = int(sid)
        if tid not in parent_of:
            continue
        target: int | None = None
        if d.payload not in (None, ""):
            target = int(str(d.payload).strip())
            if target not in terms_by_id:
                raise InvalidDecision(f"retarget parent {target} not in draft")
            target_entry = new.entry_by_term(target)
            if target_entry is None or target_entry.see is not None:
                raise InvalidDecision("cannot file an entry under a redirect")
            cursor: int | None = target
            while cursor is not None:
                if cursor == tid:
                    raise InvalidDecision("retarget would create a cycle")
                cursor = parent_of.get(cursor)
        moving = new.entry_by_term(tid)
        if moving is not None and moving.see is not None and target is not None:
            raise InvalidDecision("redirect entries stay at top level")
        node = detach(tid)
        relabel_for_parent(node, target)
        if target is None:
            new.entries.append(node)
        else:
            new.entry_by_term(target).sub_entries.append(node)
        reindex_parents()

    # 5. relabels win over any recomputed label
    for (kind, sid), d in final.items():
        if kind == "term" and d.action == "relabel":
            tid = int(sid)
            entry = new.entry_by_term(tid)
            if entry is not None:
                entry.label = str(d.payload)

    canonical_of = {t.id: t.canonical for t in new.terms}
    new.entries.sort(key=lambda e: canonical_of[e.term_id])
    for e in new.all_entries():
        e.sub_entries.sort(key=lambda s: (s.label.lower(), canonical_of[s.term_id]))
        e.see_also = [t for t in e.see_also if t in canonical_of]

    new.status = "validated"
    new.decisions = list(draft.decisions) + list(decisions)
    new.validate()
    return new


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _refs_string(refs: Sequence[PageRef]) -> str:
    return ", ".join(r.label() for r in refs)


def _target_labels(index: DraftIndex) -> dict[int, str]:
    """How cross references name their targets: a top-level entry by its
    (possibly relabeled) label, a nested entry by the term's full display
    label so the pointer still names the whole concept."""
    top_level = {e.term_id: e.label for e in index.entries}
    labels: dict[int, str] = {}
    terms_by_id = {t.id: t for t in index.terms}
    for e in index.all_entries():
        if e.term_id in top_level:
            labels[e.term_id] = top_level[e.term_id]
        else:
            term = terms_by_id.get(e.term_id)
            labels[e.term_id] = display_label(term) if term else e.label
    return labels


def render_text(index: DraftIndex) -> str:
    """Figure-style plain text: one entry per line, tab-indented sub-entries,
    `a-b` ranges, `Label see Target` redirects, `(see also X)` suffixes."""
    labels = _target_labels(index)
    lines: list[str] = []

    def emit(entry: IndexEntry, depth: int) -> None:
        indent = "\t" * depth
        if entry.see is not None:
            lines.append(f"{indent}{entry.label} see {labels.get(entry.see, '?')}")
            return
        line = indent + entry.label
        if entry.page_refs:
            line += "\t" + _refs_string(entry.page_refs)
        if entry.see_also:
            targets = ", ".join(labels[t] for t in entry.see_also if t in labels)
            if targets:
                line += f" (see also {targets})"
        lines.append(line)
        for sub in entry.sub_entries:
            emit(sub, depth + 1)

    for entry in index.entries:
        emit(entry, 0)
    return "\n".join(lines) + "\n" if lines else ""


def render_macros(index: DraftIndex) -> str:
    """Print-targeted rendering: one generic typesetting macro per entry."""
    labels = _target_labels(index)
    lines: list[str] = []

    def emit(entry: IndexEntry, depth: int) -> None:
        if entry.see is not None:
            lines.append(
                "\\seeentry{%s}{%s}" % (entry.label, labels.get(entry.see, "?"))
            )
            return
        macro = "\\entry" if depth == 0 else "\\subentry"
        also = ", ".join(labels[t] for t in entry.see_also if t in labels)
        lines.append(
            "%s{%s}{%s}{%s}" % (macro, entry.label, _refs_string(entry.page_refs), also)
        )
        for sub in entry.sub_entries:
            emit(sub, depth + 1)

    for entry in index.entries:
        emit(entry, 0)
    return "\n".join(lines) + "\n" if lines else ""
