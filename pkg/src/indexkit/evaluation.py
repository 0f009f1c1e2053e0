"""Index-against-index evaluation.

Three comparison shapes are supported: a built index against the
hand-authored index the document was published with (size increase), a
built index against a dumb all-noun-phrases baseline, and a draft against
its human-validated final version (precision of descriptors, of the ranked
prefix, and of relations). Descriptor sets are compared on normalized
canonical strings so externally authored index files and pipeline output
meet on the same normal form.

`ranked_precision` is precision@k over the draft's relevance ranking, with
k defaulting to the size of the validated index; the cutoff is exposed
because other interpretations are reasonable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import Document, singularize
from .errors import (
    EmptyDraft,
    EmptyTraditional,
    NoRelations,
    NonApplicable,
)
from .index import DraftIndex
from .relations import SYMMETRIC_KINDS
from .terms import CandidateTerm

SOURCE_KINDS = ("manual", "validated", "baseline")

_DETERMINERS = frozenset({"the", "a", "an", "this", "that", "these", "those"})
_FUNCTION_WORDS = _DETERMINERS | frozenset(
    {"of", "for", "in", "on", "to", "and", "or", "at", "by", "with", "from", "as"}
)


def normalize_phrase(text: str) -> str:
    """Normal form used on both sides of every comparison: lowercase,
    determiners dropped, content words singularized."""
    words = []
    for w in text.lower().split():
        w = w.strip(",;:")
        if not w or w in _DETERMINERS:
            continue
        words.append(w if w in _FUNCTION_WORDS else singularize(w))
    if not words:
        # a descriptor made only of determiners still needs an identity
        return " ".join(text.lower().split())
    return " ".join(words)


Triple = tuple[str, str, str]


def _normalize_triple(source: str, target: str, kind: str) -> Triple:
    if kind in SYMMETRIC_KINDS and source > target:
        source, target = target, source
    return (source, target, kind)


@dataclass
class ReferenceIndex:
    descriptors: set[str] = field(default_factory=set)
    relations: set[Triple] = field(default_factory=set)
    source_kind: str = "manual"


@dataclass
class CandidateIndex:
    """Descriptors in rank order plus relation triples.

    Stand-in accepted everywhere a DraftIndex is: lets synthetic indexes
    and externally parsed final indexes run through the same metrics.
    """

    ranked_descriptors: list[str]
    relations: set[Triple] = field(default_factory=set)


def _dedupe(seq: Sequence[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for s in seq:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def as_candidate(draft: DraftIndex | CandidateIndex) -> CandidateIndex:
    if isinstance(draft, CandidateIndex):
        return CandidateIndex(
            _dedupe([normalize_phrase(d) for d in draft.ranked_descriptors]),
            {
                _normalize_triple(normalize_phrase(s), normalize_phrase(t), k)
                for s, t, k in draft.relations
            },
        )
    canonical = {t.id: t.canonical for t in draft.terms}
    ranked = _dedupe(
        [normalize_phrase(canonical[tid]) for tid in draft.ranking.term_ids()]
    )
    triples = {
        _normalize_triple(
            normalize_phrase(canonical[r.source_id]),
            normalize_phrase(canonical[r.target_id]),
            r.kind,
        )
        for r in draft.relations
    }
    return CandidateIndex(ranked, triples)


def as_reference(
    index: DraftIndex | CandidateIndex | ReferenceIndex, source_kind: str
) -> ReferenceIndex:
    if isinstance(index, ReferenceIndex):
        return ReferenceIndex(
            {normalize_phrase(d) for d in index.descriptors},
            {_normalize_triple(*t) for t in index.relations},
            source_kind,
        )
    cand = as_candidate(index)
    return ReferenceIndex(set(cand.ranked_descriptors), set(cand.relations), source_kind)


def _reference_descriptors(reference: ReferenceIndex) -> set[str]:
    return {normalize_phrase(d) for d in reference.descriptors}


def _reference_triples(reference: ReferenceIndex) -> set[Triple]:
    return {
        _normalize_triple(normalize_phrase(s), normalize_phrase(t), k)
        for s, t, k in reference.relations
    }


def descriptor_precision(
    draft: DraftIndex | CandidateIndex, validated: ReferenceIndex
) -> float:
    cand = as_candidate(draft)
    drafted = set(cand.ranked_descriptors)
    if not drafted:
        raise EmptyDraft("no descriptors in candidate index")
    good = _reference_descriptors(validated)
    return len(drafted & good) / len(drafted)


def ranked_precision(
    draft: DraftIndex | CandidateIndex,
    validated: ReferenceIndex,
    k: int | None = None,
) -> float:
    cand = as_candidate(draft)
    if not cand.ranked_descriptors:
        raise EmptyDraft("no descriptors in candidate index")
    good = _reference_descriptors(validated)
    if k is None:
        k = len(good)
    if k < 1:
        raise ValueError("k must be >= 1")
    k = min(k, len(cand.ranked_descriptors))
    hits = sum(1 for d in cand.ranked_descriptors[:k] if d in good)
    return hits / k


def relation_precision(
    draft: DraftIndex | CandidateIndex, validated: ReferenceIndex
) -> float:
    cand = as_candidate(draft)
    if not cand.relations:
        raise NoRelations("no relations in candidate index")
    good = _reference_triples(validated)
    return len(cand.relations & good) / len(cand.relations)


def size_increase(
    candidate: ReferenceIndex, traditional: ReferenceIndex | None
) -> tuple[float, float]:
    """Percent growth in descriptor count and in relations per descriptor."""
    if traditional is None:
        raise NonApplicable("no traditional index to compare against")
    n_trad = len(_reference_descriptors(traditional))
    if n_trad == 0:
        raise EmptyTraditional("traditional index has no descriptors")
    n_cand = len(_reference_descriptors(candidate))
    descriptor_pct = 100.0 * (n_cand - n_trad) / n_trad
    avg_trad = len(_reference_triples(traditional)) / n_trad
    if avg_trad == 0:
        raise NonApplicable("traditional index has no relations")
    avg_cand = len(_reference_triples(candidate)) / max(n_cand, 1)
    relations_pct = 100.0 * (avg_cand - avg_trad) / avg_trad
    return descriptor_pct, relations_pct


def baseline_all_np_index(
    doc: Document, terms: Sequence[CandidateTerm]
) -> ReferenceIndex:
    """What a no-filtering tool would propose: every noun phrase, no
    relations."""
    del doc  # present for signature symmetry with the pipeline stages
    return ReferenceIndex(
        descriptors={normalize_phrase(t.canonical) for t in terms},
        relations=set(),
        source_kind="baseline",
    )


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------


@dataclass
class EvalReport:
    corpus_label: str = ""
    descriptor_precision: float | None = None
    ranked_precision: float | None = None
    relation_precision: float | None = None
    size_increase_pct: float | None = None
    relations_per_descriptor_increase_pct: float | None = None
    counts: dict[str, float] = field(default_factory=dict)


def evaluate(
    draft: DraftIndex | CandidateIndex,
    validated: ReferenceIndex,
    traditional: ReferenceIndex | None = None,
    k: int | None = None,
    corpus_label: str = "",
) -> EvalReport:
    cand = as_candidate(draft)
    drafted = set(cand.ranked_descriptors)
    good = _reference_descriptors(validated)
    report = EvalReport(corpus_label=corpus_label)
    report.descriptor_precision = descriptor_precision(cand, validated)
    report.ranked_precision = ranked_precision(cand, validated, k)
    effective_k = min(k if k is not None else len(good), len(cand.ranked_descriptors))
    try:
        report.relation_precision = relation_precision(cand, validated)
    except NoRelations:
        report.relation_precision = None
    good_triples = _reference_triples(validated)
    report.counts = {
        "draft_descriptors": len(drafted),
        "validated_descriptors": len(good),
        "descriptor_hits": len(drafted & good),
        "ranked_k": effective_k,
        "ranked_hits": sum(1 for d in cand.ranked_descriptors[:effective_k] if d in good),
        "draft_relations": len(cand.relations),
        "relation_hits": len(cand.relations & good_triples),
        # beyond the primary rows: recall comes free from the same counts
        "descriptor_recall": (len(drafted & good) / len(good)) if good else 0.0,
        "relation_recall": (
            len(cand.relations & good_triples) / len(good_triples)
        ) if good_triples else 0.0,
    }
    if traditional is not None:
        try:
            desc_pct, rel_pct = size_increase(
                as_reference(cand, "validated"), traditional
            )
            report.size_increase_pct = desc_pct
            report.relations_per_descriptor_increase_pct = rel_pct
        except NonApplicable:
            report.size_increase_pct = None
            report.relations_per_descriptor_increase_pct = None
    return report


def _fmt_ratio(value: float | None) -> str:
    if value is None:
        return "Non applicable"
    return f"{int(value * 100)}%"


def _fmt_signed(value: float | None) -> str:
    if value is None:
        return "Non applicable"
    whole = int(value)  # truncate toward zero
    return f"+{whole}%" if whole > 0 else f"{whole}%"


REPORT_ROWS = (
    ("Precision of descriptor extraction – comparison 3",
     lambda r: _fmt_ratio(r.descriptor_precision)),
    ("Ranked precision of descriptor extraction – comparison 3",
     lambda r: _fmt_ratio(r.ranked_precision)),
    ("Precision of relation extraction – comparison 3",
     lambda r: _fmt_ratio(r.relation_precision)),
    ("Size increase (# of descriptors) – comparison 1",
     lambda r: _fmt_signed(r.size_increase_pct)),
    ("Size increase (average # of relations per descriptor) – comparison 1",
     lambda r: _fmt_signed(r.relations_per_descriptor_increase_pct)),
    ("Recall of descriptor extraction (supplementary)",
     lambda r: _fmt_ratio(r.counts.get("descriptor_recall"))),
    ("Recall of relation extraction (supplementary)",
     lambda r: _fmt_ratio(r.counts.get("relation_recall"))),
)


def compare_reports(reports: Sequence[EvalReport]) -> str:
    """Side-by-side text table, one column per report."""
    assert reports, "need at least one report"
    headers = [""] + [r.corpus_label or f"report {i + 1}" for i, r in enumerate(reports)]
    rows = [[label] + [fmt(r) for r in reports] for label, fmt in REPORT_ROWS]
    widths = [
        max(len(row[col]) for row in [headers] + rows)
        for col in range(len(headers))
    ]
    lines = []
    for row in [headers] + rows:
        cells = [cell.ljust(widths[i]) for i, cell in enumerate(row)]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Reference index files
# ---------------------------------------------------------------------------

_SEE_ALSO_SUFFIX = "(see also "


def _split_label_cell(cell: str) -> tuple[str, str | None, list[str]]:
    """label, see-target, see-also targets."""
    see_also: list[str] = []
    cell = cell.strip()
    if _SEE_ALSO_SUFFIX in cell:
        head, _, tail = cell.partition(_SEE_ALSO_SUFFIX)
        targets = tail.rstrip(")").strip()
        see_also = [t.strip() for t in targets.split(",") if t.strip()]
        cell = head.strip()
    if " see also " in cell:
        head, _, tail = cell.partition(" see also ")
        see_also.extend(t.strip() for t in tail.split(",") if t.strip())
        cell = head.strip()
    if " see " in cell:
        label, _, target = cell.partition(" see ")
        return label.strip(), target.strip(), see_also
    return cell, None, see_also


def parse_reference_index(text: str, source_kind: str = "manual") -> ReferenceIndex:
    """Parse the line-oriented index format.

    One descriptor per line, refs after a tab (ignored here); sub-entries
    indented with tabs denote hypernymy, the child's canonical being the
    parent's words plus its own; `X see Y` and `(see also Z)` become
    variant and association triples.
    """
    descriptors: set[str] = set()
    relations: set[Triple] = set()
    stack: list[str] = []  # canonical per depth
    for raw in text.splitlines():
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        depth = len(raw) - len(raw.lstrip("\t"))
        cells = raw.strip().split("\t")
        label, see_target, see_also = _split_label_cell(cells[0])
        if not label:
            continue
        canonical = normalize_phrase(label)
        if depth > 0 and len(stack) >= depth:
            parent = stack[depth - 1]
            canonical = normalize_phrase(parent + " " + label)
            relations.add(_normalize_triple(parent, canonical, "hypernymy"))
        descriptors.add(canonical)
        del stack[depth:]
        stack.append(canonical)
        if see_target:
            relations.add(
                _normalize_triple(canonical, normalize_phrase(see_target), "variant")
            )
        for target in see_also:
            relations.add(
                _normalize_triple(canonical, normalize_phrase(target), "association")
            )
    return ReferenceIndex(descriptors, relations, source_kind)


def load_reference_index(path: str | Path, source_kind: str = "manual") -> ReferenceIndex:
    return parse_reference_index(Path(path).read_text(encoding="utf-8"), source_kind)
