"""Reference calculus: map a term's occurrences to page refs and segments.

Pages qualify as real references (a discussion rather than a passing
mention) when the term occurs there often enough or prominently enough
(heading/emphasis); maximal runs of consecutive qualified pages collapse
into ranges. Mentions are kept as single-page refs by default since
published indexes mix both forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import Document
from .errors import ForeignTerm
from .terms import CandidateTerm, TermOccurrence


@dataclass
class RefPolicy:
    mention_threshold: int = 2
    keep_mentions: bool = True
    variant_closure: bool = True


@dataclass(frozen=True)
class PageRef:
    start: int
    end: int
    qualified: bool = True

    def __post_init__(self) -> None:
        assert self.end >= self.start

    def label(self) -> str:
        return str(self.start) if self.start == self.end else f"{self.start}-{self.end}"


@dataclass
class SegmentRef:
    term_id: int
    segment_id: int
    occurrence_count: int
    score: float
    preview: str = ""


@dataclass
class OccurrenceGroups:
    by_page: dict[int, list[TermOccurrence]] = field(default_factory=dict)
    by_segment: dict[int, list[TermOccurrence]] = field(default_factory=dict)


def _check_occurrence(doc: Document, occ: TermOccurrence) -> None:
    a, b = occ.token_span
    if not (0 <= a < b <= len(doc.tokens)):
        raise ForeignTerm(f"occurrence span {occ.token_span} outside document")
    if not (0 <= occ.segment_id < len(doc.segments)):
        raise ForeignTerm(f"unknown segment {occ.segment_id}")
    seg = doc.segments[occ.segment_id]
    if not (seg.token_span[0] <= a and b <= seg.token_span[1]):
        raise ForeignTerm(f"occurrence span {occ.token_span} not inside segment {seg.id}")
    if doc.page_of_token(a).number != occ.page:
        raise ForeignTerm(f"occurrence page {occ.page} inconsistent with document")


def locate_occurrences(
    term: CandidateTerm,
    doc: Document,
    variants: Sequence[CandidateTerm] = (),
) -> OccurrenceGroups:
    """Group occurrences by page and by segment.

    When the caller passes the term's variant closure (e.g. the acronym of
    an expanded form), variant occurrences are counted too: the expanded
    form owns the references while the variant only carries a redirect.
    """
    groups = OccurrenceGroups()
    for source in (term, *variants):
        for occ in source.occurrences:
            _check_occurrence(doc, occ)
            groups.by_page.setdefault(occ.page, []).append(occ)
            groups.by_segment.setdefault(occ.segment_id, []).append(occ)
    return groups


def compute_page_refs(groups: OccurrenceGroups, policy: RefPolicy | None = None) -> list[PageRef]:
    """Merge consecutive qualified pages into ranges; keep mentions single."""
    policy = policy or RefPolicy()
    qualified_pages: list[int] = []
    mention_pages: list[int] = []
    for page in sorted(groups.by_page):
        occs = groups.by_page[page]
        qualified = len(occs) >= policy.mention_threshold or any(
            o.in_heading or o.emphasized for o in occs
        )
        if qualified:
            qualified_pages.append(page)
        elif policy.keep_mentions:
            mention_pages.append(page)

    refs: list[PageRef] = []
    run_start: int | None = None
    prev = None
    for page in qualified_pages:
        if run_start is None:
            run_start, prev = page, page
        elif page == prev + 1:
            prev = page
        else:
            refs.append(PageRef(run_start, prev, qualified=True))
            run_start, prev = page, page
    if run_start is not None:
        refs.append(PageRef(run_start, prev, qualified=True))
    refs.extend(PageRef(p, p, qualified=False) for p in mention_pages)
    refs.sort(key=lambda r: (r.start, r.end))
    return refs


def select_reference_segments(
    term: CandidateTerm,
    doc: Document,
    segment_scores: Mapping[int, float],
) -> list[SegmentRef]:
    """One SegmentRef per segment containing the term, best first."""
    counts: dict[int, int] = {}
    for occ in term.occurrences:
        counts[occ.segment_id] = counts.get(occ.segment_id, 0) + 1
    refs = [
        SegmentRef(
            term_id=term.id,
            segment_id=seg_id,
            occurrence_count=count,
            score=float(segment_scores.get(seg_id, 0.0)),
        )
        for seg_id, count in counts.items()
    ]
    refs.sort(key=lambda r: (-r.score, r.segment_id))
    return refs
