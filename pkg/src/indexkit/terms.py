"""Candidate descriptor extraction.

Shallow noun-phrase chunking over the tagged token stream. The chunk
grammar is ``ADJ* (NOUN|PROPN)+ (PREP DET? ADJ* (NOUN|PROPN)+)*``, applied
greedily left to right for maximal chunks; every grammar-valid contiguous
sub-sequence of a maximal chunk is emitted as an occurrence of its own
candidate ("knowledge representation" also yields "knowledge" and
"representation"), which is what later lets the index nest specific terms
under generic ones even when the generic never appears alone.

Candidates with the same canonical form (lowercased lemma sequence,
determiners dropped) merge; acronyms are linked to their expansions as
variant relations rather than merged, so the index can render a
"see" redirect.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import ADJ, DET, NOUN, PREP, PROPN, Document, Token
from .errors import UntaggedDocument

DEFAULT_CUE_PHRASES = (
    "is defined as",
    "is called",
    "so-called",
    "refers to",
    "we call",
)

CHUNK_RE = re.compile(r"A*N+(?:PD?A*N+)*")

_POS_CODE = {NOUN: "N", PROPN: "N", ADJ: "A", PREP: "P", DET: "D"}


@dataclass
class ChunkOptions:
    min_frequency: int = 1
    cue_phrases: Sequence[str] = DEFAULT_CUE_PHRASES


@dataclass
class TermOccurrence:
    term_id: int
    token_span: tuple[int, int]
    page: int
    segment_id: int
    in_heading: bool = False
    emphasized: bool = False
    cue_context: bool = False


@dataclass
class CandidateTerm:
    id: int
    canonical: str
    head_lemma: str
    modifier_lemmas: list[str]
    occurrences: list[TermOccurrence]
    surface_counts: Counter = field(default_factory=Counter)
    is_acronym: bool = False

    @property
    def surface_forms(self) -> set[str]:
        return set(self.surface_counts)

    @property
    def tf(self) -> int:
        return len(self.occurrences)

    @property
    def words(self) -> list[str]:
        return self.canonical.split()

    def preferred_surface(self) -> str:
        """Most frequent surface form; ties resolved lexicographically."""
        best = min(self.surface_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return best[0]

    def content_lemmas(self) -> list[str]:
        """Canonical words that are heads/modifiers (no prepositions)."""
        pool = Counter(self.modifier_lemmas)
        pool[self.head_lemma] += 1
        out = []
        for w in self.words:
            if pool[w] > 0:
                out.append(w)
                pool[w] -= 1
        return out


@dataclass
class TermStats:
    tf: int
    segment_coverage: float
    heading_count: int
    emphasis_count: int
    cue_count: int


def normalize_term(tokens: Sequence[Token]) -> str:
    """Canonical form: lowercased lemmas joined by spaces, determiners dropped."""
    return " ".join(t.lemma.lower() for t in tokens if t.pos != DET)


def _head_and_modifiers(tokens: Sequence[Token]) -> tuple[str, list[str]]:
    """Head = last noun before the first preposition (head-final compounds)."""
    first_group: list[Token] = []
    for t in tokens:
        if t.pos == PREP:
            break
        first_group.append(t)
    head = ""
    for t in reversed(first_group):
        if t.pos in (NOUN, PROPN):
            head = t.lemma.lower()
            break
    head_seen = False
    modifiers: list[str] = []
    for t in tokens:
        if t.pos not in (NOUN, PROPN, ADJ):
            continue
        lemma = t.lemma.lower()
        if not head_seen and lemma == head and t in first_group:
            head_seen = True
            continue
        modifiers.append(lemma)
    return head, modifiers


def _is_acronym_surface(surface: str) -> bool:
    return len(surface) >= 2 and surface.isalpha() and surface.isupper()


def _sentence_texts(doc: Document) -> dict[int, str]:
    parts: dict[int, list[str]] = {}
    for tok in doc.tokens:
        parts.setdefault(tok.sentence_id, []).append(tok.surface.lower())
    return {sid: " ".join(ws) for sid, ws in parts.items()}


def extract_candidates(
    doc: Document, options: ChunkOptions | None = None
) -> list[CandidateTerm]:
    """Chunk the document and merge equal canonical forms into candidates."""
    options = options or ChunkOptions()
    if not doc.is_tagged():
        raise UntaggedDocument(doc.id)

    cue_sentences: set[int] = set()
    if options.cue_phrases:
        for sid, text in _sentence_texts(doc).items():
            if any(phrase in text for phrase in options.cue_phrases):
                cue_sentences.add(sid)

    by_canonical: dict[str, dict] = {}
    for segment in doc.segments:
        a, b = segment.token_span
        toks = doc.tokens[a:b]
        codes = "".join(_POS_CODE.get(t.pos, "X") for t in toks)
        i = 0
        while i < len(codes):
            m = CHUNK_RE.match(codes, i)
            if not m or m.end() == i:
                i += 1
                continue
            lo, hi = i, m.end()
            for x in range(lo, hi):
                for y in range(x + 1, hi + 1):
                    if not CHUNK_RE.fullmatch(codes, x, y):
                        continue
                    span = (a + x, a + y)
                    slice_ = toks[x:y]
                    canonical = normalize_term(slice_)
                    if not canonical:
                        continue
                    rec = by_canonical.get(canonical)
                    if rec is None:
                        head, mods = _head_and_modifiers(slice_)
                        rec = by_canonical[canonical] = {
                            "head": head,
                            "mods": mods,
                            "occ": [],
                            "surfaces": Counter(),
                            "acronym": False,
                        }
                    surface = " ".join(t.surface for t in slice_)
                    rec["surfaces"][surface] += 1
                    if y - x == 1 and _is_acronym_surface(slice_[0].surface):
                        rec["acronym"] = True
                    rec["occ"].append(
                        TermOccurrence(
                            term_id=-1,
                            token_span=span,
                            page=doc.page_of_token(span[0]).number,
                            segment_id=segment.id,
                            in_heading=segment.kind == "heading",
                            emphasized=any(t.emphasis for t in slice_),
                            cue_context=toks[x].sentence_id in cue_sentences,
                        )
                    )
            i = hi
    terms: list[CandidateTerm] = []
    ordered = sorted(
        by_canonical.items(),
        key=lambda kv: (kv[1]["occ"][0].token_span, kv[0]),
    )
    next_id = 0
    for canonical, rec in ordered:
        if len(rec["occ"]) < options.min_frequency:
            continue
        term = CandidateTerm(
            id=next_id,
            canonical=canonical,
            head_lemma=rec["head"],
            modifier_lemmas=rec["mods"],
            occurrences=rec["occ"],
            surface_counts=rec["surfaces"],
            is_acronym=rec["acronym"] and len(canonical.split()) == 1,
        )
        for occ in term.occurrences:
            occ.term_id = term.id
        terms.append(term)
        next_id += 1
    return terms


# Function words ignored when matching acronym initials against a
# multiword expansion.
_ACRONYM_SKIP = frozenset(
    {"of", "for", "in", "on", "to", "and", "or", "the", "a", "an", "at", "by",
     "with", "from"}
)


def group_variants(
    terms: Sequence[CandidateTerm],
) -> tuple[list[CandidateTerm], list["Relation"]]:
    """Merge duplicate canonicals and link acronyms to their expansions.

    Returns the merged term list plus variant relations (acronym -> expanded
    form). Variants are linked, never merged, so the rendered index can keep
    the redirect entry.
    """
    from .relations import Relation  # local import to avoid a cycle

    merged: dict[str, CandidateTerm] = {}
    for term in terms:
        existing = merged.get(term.canonical)
        if existing is None:
            merged[term.canonical] = term
            continue
        existing.occurrences.extend(term.occurrences)
        existing.surface_counts.update(term.surface_counts)
        existing.is_acronym = existing.is_acronym or term.is_acronym
        for occ in existing.occurrences:
            occ.term_id = existing.id
    out = sorted(merged.values(), key=lambda t: t.id)
    for term in out:
        term.occurrences.sort(key=lambda o: o.token_span)

    relations: list[Relation] = []
    multiword = [t for t in out if len(t.words) > 1]
    for acro in out:
        if not acro.is_acronym:
            continue
        letters = acro.canonical
        for target in multiword:
            content = [w for w in target.words if w not in _ACRONYM_SKIP]
            initials = "".join(w[0] for w in content if w)
            if initials == letters:
                relations.append(
                    Relation(
                        source_id=acro.id,
                        target_id=target.id,
                        kind="variant",
                        evidence="acronym",
                        confidence=0.9,
                        provenance=[f"initials match: {target.canonical}"],
                    )
                )
    return out, relations


def compute_term_stats(term: CandidateTerm, doc: Document) -> TermStats:
    """Frequency and repartition counters feeding the relevance ranking."""
    paragraph_ids = {s.id for s in doc.segments if s.kind == "paragraph"}
    covered = {
        o.segment_id for o in term.occurrences if o.segment_id in paragraph_ids
    }
    coverage = len(covered) / len(paragraph_ids) if paragraph_ids else 0.0
    return TermStats(
        tf=term.tf,
        segment_coverage=coverage,
        heading_count=sum(1 for o in term.occurrences if o.in_heading),
        emphasis_count=sum(1 for o in term.occurrences if o.emphasized),
        cue_count=sum(1 for o in term.occurrences if o.cue_context),
    )


def load_cue_phrases(path) -> tuple[str, ...]:
    """One cue phrase per line; `#` comments."""
    from pathlib import Path

    phrases = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            phrases.append(line.lower())
    return tuple(phrases)
