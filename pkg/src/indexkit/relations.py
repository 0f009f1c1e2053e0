"""Terminological network construction.

Three extractors contribute typed edges between candidate terms:

* lexico-syntactic patterns matched inside sentences (the classic
  "X such as Y, Z" family), loaded from a small rule language;
* head expansion over the candidates themselves ("knowledge" is generic
  for "knowledge representation"; "representation" likewise via the head);
* projection of a flat synonym dictionary (whole-term and one-word
  substitution matches).

`merge_relations` is the single reducer: duplicate edges combine noisy-or
style, opposed hypernymy directions resolve by confidence (the loser is
demoted to an association), and a final cycle-breaking pass guarantees the
hypernymy subgraph is a DAG.

Pattern matching semantics: a rule is matched at every anchor position of
every sentence; slots must align with extracted term occurrences and are
filled greedy-longest (regex style, with backtracking), so the match chosen
at an anchor is the one maximizing per-slot lengths lexicographically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence, TYPE_CHECKING

from .corpus import Document
from .errors import BadDictionaryRow, BadRule

if TYPE_CHECKING:  # pragma: no cover
    from .terms import CandidateTerm

HYPERNYMY = "hypernymy"
SYNONYMY = "synonymy"
VARIANT = "variant"
ASSOCIATION = "association"
RELATION_KINDS = (HYPERNYMY, SYNONYMY, VARIANT, ASSOCIATION)

# symmetric kinds are stored once with source_id < target_id
SYMMETRIC_KINDS = frozenset({SYNONYMY, ASSOCIATION})

_KIND_ORDER = {k: i for i, k in enumerate(RELATION_KINDS)}


@dataclass
class Relation:
    source_id: int
    target_id: int
    kind: str
    evidence: str
    confidence: float
    provenance: list[str] = field(default_factory=list)

    def normalized(self) -> "Relation":
        if self.kind in SYMMETRIC_KINDS and self.source_id > self.target_id:
            return Relation(
                self.target_id,
                self.source_id,
                self.kind,
                self.evidence,
                self.confidence,
                list(self.provenance),
            )
        return self

    @property
    def key(self) -> tuple[int, int, str]:
        return (self.source_id, self.target_id, self.kind)


# ---------------------------------------------------------------------------
# Pattern rules
# ---------------------------------------------------------------------------

TERM_SLOT = "<TERM>"
TERMLIST_SLOT = "<TERMLIST>"

_TAIL_RE = re.compile(
    r"=>\s*(\w+)\s*\(\s*generic\s*=\s*(\d+)\s*(?:,\s*conf\s*=\s*([0-9.]+)\s*)?\)\s*$"
)


@dataclass
class PatternRule:
    name: str
    items: list[tuple[str, str | None]]  # ("lit", word) | ("term"|"termlist", None)
    relation_kind: str
    generic_slot: int  # 1-based slot index
    base_confidence: float = 0.8

    def validate(self) -> None:
        slots = [i for i in self.items if i[0] in ("term", "termlist")]
        if self.relation_kind not in RELATION_KINDS:
            raise BadRule(f"{self.name}: unknown relation kind {self.relation_kind}")
        if not 1 <= self.generic_slot <= len(slots):
            raise BadRule(f"{self.name}: generic slot index out of range")
        if len(slots) < 2:
            raise BadRule(f"{self.name}: need a generic and at least one specific slot")
        if not 0 < self.base_confidence <= 1:
            raise BadRule(f"{self.name}: confidence must be in (0, 1]")
        for kind, word in self.items:
            if kind == "lit" and not word:
                raise BadRule(f"{self.name}: empty literal")


def parse_rule(line: str) -> PatternRule:
    name, _, rest = line.partition(":")
    name = name.strip()
    if not name or not rest:
        raise BadRule(f"cannot parse rule line: {line!r}")
    m = _TAIL_RE.search(rest)
    if not m:
        raise BadRule(f"{name}: missing '=> kind(generic=N)' tail")
    body = rest[: m.start()].strip()
    items: list[tuple[str, str | None]] = []
    for raw in body.split():
        if raw == TERM_SLOT:
            items.append(("term", None))
        elif raw == TERMLIST_SLOT:
            items.append(("termlist", None))
        else:
            items.append(("lit", raw.lower()))
    rule = PatternRule(
        name=name,
        items=items,
        relation_kind=m.group(1).lower(),
        generic_slot=int(m.group(2)),
        base_confidence=float(m.group(3)) if m.group(3) else 0.8,
    )
    rule.validate()
    return rule


def parse_rules(text: str) -> list[PatternRule]:
    rules = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rules.append(parse_rule(line))
    return rules


def load_rules(path: str | Path) -> list[PatternRule]:
    return parse_rules(Path(path).read_text(encoding="utf-8"))


DEFAULT_RULES_TEXT = """\
such_as: <TERM> such as <TERMLIST> => hypernymy(generic=1)
including: <TERM> including <TERMLIST> => hypernymy(generic=1)
especially: <TERM> especially <TERMLIST> => hypernymy(generic=1)
kind_of: <TERM> is a kind of <TERM> => hypernymy(generic=2)
and_other: <TERMLIST> and other <TERM> => hypernymy(generic=2)
or_other: <TERMLIST> or other <TERM> => hypernymy(generic=2)
"""

DEFAULT_RULES = parse_rules(DEFAULT_RULES_TEXT)


# ---------------------------------------------------------------------------
# Pattern matching
# ---------------------------------------------------------------------------

_LIST_SEPARATORS = (",", "and", "or")


def _sentence_ranges(doc: Document) -> list[tuple[int, int]]:
    ranges: list[tuple[int, int]] = []
    for i, tok in enumerate(doc.tokens):
        if not ranges or doc.tokens[i - 1].sentence_id != tok.sentence_id:
            ranges.append((i, i + 1))
        else:
            ranges[-1] = (ranges[-1][0], i + 1)
    return ranges


def _occurrence_starts(terms: Sequence["CandidateTerm"]) -> dict[int, list[tuple[int, int]]]:
    """start index -> [(end, term_id)] sorted longest-first."""
    occs: dict[int, list[tuple[int, int]]] = {}
    for term in terms:
        for occ in term.occurrences:
            a, b = occ.token_span
            occs.setdefault(a, []).append((b, term.id))
    for lst in occs.values():
        lst.sort(key=lambda x: (-x[0], x[1]))
    return occs


def _separator_ends(doc: Document, pos: int, limit: int) -> list[int]:
    """Token positions following a term-list separator starting at pos.

    Longer separators first (", and" before ","), mirroring the
    greedy-longest slot policy.
    """
    ends: list[int] = []
    if pos >= limit:
        return ends
    first = doc.tokens[pos].surface.lower()
    if first == "," and pos + 1 < limit and doc.tokens[pos + 1].surface.lower() in ("and", "or"):
        ends.append(pos + 2)
    if first in _LIST_SEPARATORS:
        ends.append(pos + 1)
    return ends


class _Matcher:
    def __init__(self, doc: Document, occs_at: dict[int, list[tuple[int, int]]]):
        self.doc = doc
        self.occs_at = occs_at

    def _lit_matches(self, word: str, pos: int) -> bool:
        tok = self.doc.tokens[pos]
        return tok.lemma.lower() == word or tok.surface.lower() == word

    def _chains(self, pos: int, limit: int) -> Iterator[tuple[list[int], int]]:
        """Term-list chains starting at pos, in greedy preference order."""
        for end, tid in self.occs_at.get(pos, []):
            if end > limit:
                continue
            for sep_end in _separator_ends(self.doc, end, limit):
                for members, chain_end in self._chains(sep_end, limit):
                    yield [tid] + members, chain_end
            yield [tid], end

    def match(
        self, items: Sequence[tuple[str, str | None]], pos: int, limit: int
    ) -> list[list[int]] | None:
        """First (greedy-preferred) assignment of slot term-ids, or None."""
        if not items:
            return []
        kind, word = items[0]
        if kind == "lit":
            if pos < limit and self._lit_matches(word or "", pos):
                return self.match(items[1:], pos + 1, limit)
            return None
        if kind == "term":
            for end, tid in self.occs_at.get(pos, []):
                if end > limit:
                    continue
                rest = self.match(items[1:], end, limit)
                if rest is not None:
                    return [[tid]] + rest
            return None
        # termlist
        for members, chain_end in self._chains(pos, limit):
            rest = self.match(items[1:], chain_end, limit)
            if rest is not None:
                return [members] + rest
        return None


def extract_pattern_relations(
    doc: Document,
    terms: Sequence["CandidateTerm"],
    rules: Sequence[PatternRule] | None = None,
) -> list[Relation]:
    """Match every rule at every sentence position; emit one relation per
    (generic, specific) term pair of each canonical match."""
    rules = DEFAULT_RULES if rules is None else rules
    for rule in rules:
        rule.validate()
    matcher = _Matcher(doc, _occurrence_starts(terms))
    relations: list[Relation] = []
    for (lo, hi) in _sentence_ranges(doc):
        for anchor in range(lo, hi):
            for rule in rules:
                slots = matcher.match(rule.items, anchor, hi)
                if slots is None:
                    continue
                generic = slots[rule.generic_slot - 1]
                specific = [
                    tid
                    for i, slot in enumerate(slots)
                    if i != rule.generic_slot - 1
                    for tid in slot
                ]
                pairs = []
                for g in generic:
                    for s in specific:
                        if g != s and (g, s) not in pairs:
                            pairs.append((g, s))
                for g, s in pairs:
                    relations.append(
                        Relation(
                            source_id=g,
                            target_id=s,
                            kind=rule.relation_kind,
                            evidence="pattern",
                            confidence=rule.base_confidence,
                            provenance=[rule.name],
                        ).normalized()
                    )
    return relations


# ---------------------------------------------------------------------------
# Head expansion
# ---------------------------------------------------------------------------


def extract_head_expansion_relations(
    terms: Sequence["CandidateTerm"], confidence: float = 0.9
) -> list[Relation]:
    """Generic -> specific edges read off the terms' own structure.

    t1 is generic for t2 when t1's canonical is a strict word-prefix of
    t2's (anchored at the head-group start) or when t1 is exactly t2's
    head noun ("representation" -> "knowledge representation").
    """
    relations: list[Relation] = []
    for t2 in terms:
        w2 = t2.words
        for t1 in terms:
            if t1.id == t2.id or t1.canonical == t2.canonical:
                continue
            w1 = t1.words
            notes = []
            if len(w1) < len(w2) and w2[: len(w1)] == w1:
                notes.append("prefix of " + t2.canonical)
            if len(w1) == 1 and len(w2) > 1 and w1[0] == t2.head_lemma:
                notes.append("head of " + t2.canonical)
            if notes:
                relations.append(
                    Relation(
                        source_id=t1.id,
                        target_id=t2.id,
                        kind=HYPERNYMY,
                        evidence="head_expansion",
                        confidence=confidence,
                        provenance=notes,
                    )
                )
    return relations


# ---------------------------------------------------------------------------
# Synonym dictionary projection
# ---------------------------------------------------------------------------


def _normalize_entry(entry: str) -> str:
    return " ".join(entry.lower().split())


@dataclass
class SynonymDictionary:
    synsets: list[frozenset[str]] = field(default_factory=list)

    @classmethod
    def parse(cls, text: str) -> "SynonymDictionary":
        synsets = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            entries = {_normalize_entry(e) for e in line.split(";") if e.strip()}
            if len(entries) < 2:
                raise BadDictionaryRow(f"line {lineno}: need at least 2 entries")
            synsets.append(frozenset(entries))
        return cls(synsets)

    @classmethod
    def load(cls, path: str | Path) -> "SynonymDictionary":
        return cls.parse(Path(path).read_text(encoding="utf-8"))


def project_synonym_dictionary(
    terms: Sequence["CandidateTerm"],
    dictionary: SynonymDictionary,
    whole_confidence: float = 0.95,
    component_confidence: float = 0.7,
) -> list[Relation]:
    """Whole-term synset matches and one-word-substitution matches."""
    relations: list[Relation] = []
    member_sets = dictionary.synsets

    # (a) whole-term matches
    for i, synset in enumerate(member_sets):
        hits = [t for t in terms if t.canonical in synset]
        for x in range(len(hits)):
            for y in range(x + 1, len(hits)):
                relations.append(
                    Relation(
                        source_id=hits[x].id,
                        target_id=hits[y].id,
                        kind=SYNONYMY,
                        evidence="dictionary",
                        confidence=whole_confidence,
                        provenance=["synset: " + "; ".join(sorted(synset))],
                    ).normalized()
                )

    # (b) multiword terms differing in exactly one co-synset word
    word_synsets: dict[str, set[int]] = {}
    for i, synset in enumerate(member_sets):
        for w in synset:
            if " " not in w:
                word_synsets.setdefault(w, set()).add(i)

    buckets: dict[tuple[int, tuple[str, ...]], list["CandidateTerm"]] = {}
    for term in terms:
        words = term.words
        if len(words) < 2:
            continue
        for pos in range(len(words)):
            skeleton = tuple(words[:pos] + ["\x00"] + words[pos + 1:])
            buckets.setdefault((pos, skeleton), []).append(term)
    for (pos, _), bucket in sorted(buckets.items()):
        for x in range(len(bucket)):
            for y in range(x + 1, len(bucket)):
                a, b = bucket[x], bucket[y]
                wa, wb = a.words[pos], b.words[pos]
                if wa == wb:
                    continue
                shared = word_synsets.get(wa, set()) & word_synsets.get(wb, set())
                if shared:
                    relations.append(
                        Relation(
                            source_id=a.id,
                            target_id=b.id,
                            kind=SYNONYMY,
                            evidence="dictionary",
                            confidence=component_confidence,
                            provenance=[f"co-synset words: {wa} ~ {wb}"],
                        ).normalized()
                    )
    return relations


# ---------------------------------------------------------------------------
# Merge
# ---------------------------------------------------------------------------


def _noisy_or(confidences: Iterator[float]) -> float:
    acc = 1.0
    for c in confidences:
        acc *= 1.0 - c
    return 1.0 - acc


def _find_cycle(adj: dict[int, list[int]]) -> list[tuple[int, int]] | None:
    """First hypernymy cycle found by DFS over sorted nodes, as edge list."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[int, int] = {n: 0 for n in adj}
    stack: list[tuple[int, Iterator[int]]] = []
    path: list[int] = []
    for start in sorted(adj):
        if color[start] != WHITE:
            continue
        color[start] = GRAY
        path.append(start)
        stack.append((start, iter(sorted(adj[start]))))
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color.get(nxt, WHITE) == GRAY:
                    i = path.index(nxt)
                    cycle_nodes = path[i:] + [nxt]
                    return list(zip(cycle_nodes, cycle_nodes[1:]))
                if color.get(nxt, WHITE) == WHITE:
                    color[nxt] = GRAY
                    path.append(nxt)
                    stack.append((nxt, iter(sorted(adj.get(nxt, [])))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                path.pop()
                stack.pop()
    return None


def merge_relations(batches: Sequence[Sequence[Relation]]) -> list[Relation]:
    """Deduplicate, combine confidences, resolve direction conflicts, and
    guarantee an acyclic hypernymy subgraph.

    Duplicate (source, target, kind) edges merge with confidence
    1 - prod(1 - c_i). When both hypernymy directions exist for a pair the
    higher-confidence edge wins and the other is demoted to an association.
    Any remaining hypernymy cycle loses its lowest-confidence edge.
    """
    grouped: dict[tuple[int, int, str], list[Relation]] = {}
    order: list[tuple[int, int, str]] = []
    for batch in batches:
        for rel in batch:
            if rel.source_id == rel.target_id:
                continue
            norm = rel.normalized()
            if norm.key not in grouped:
                grouped[norm.key] = []
                order.append(norm.key)
            grouped[norm.key].append(norm)

    merged: dict[tuple[int, int, str], Relation] = {}
    for key in order:
        group = grouped[key]
        provenance: list[str] = []
        for rel in group:
            provenance.extend(rel.provenance)
        merged[key] = Relation(
            source_id=key[0],
            target_id=key[1],
            kind=key[2],
            evidence=group[0].evidence,
            confidence=_noisy_or(r.confidence for r in group),
            provenance=provenance,
        )

    # demote the weaker of two opposed hypernymy edges to an association
    for key in list(merged):
        if key[2] != HYPERNYMY or key not in merged:
            continue
        opposite = (key[1], key[0], HYPERNYMY)
        if opposite not in merged:
            continue
        a, b = merged[key], merged[opposite]
        if (a.confidence, (b.source_id, b.target_id)) >= (
            b.confidence,
            (a.source_id, a.target_id),
        ):
            winner, loser = a, b
        else:
            winner, loser = b, a
        del merged[loser.key]
        demoted = Relation(
            source_id=loser.source_id,
            target_id=loser.target_id,
            kind=ASSOCIATION,
            evidence=loser.evidence,
            confidence=loser.confidence,
            provenance=loser.provenance + ["demoted opposite-direction generic link"],
        ).normalized()
        if demoted.key in merged:
            prev = merged[demoted.key]
            merged[demoted.key] = Relation(
                source_id=demoted.source_id,
                target_id=demoted.target_id,
                kind=ASSOCIATION,
                evidence=prev.evidence,
                confidence=_noisy_or(iter([prev.confidence, demoted.confidence])),
                provenance=prev.provenance + demoted.provenance,
            )
        else:
            merged[demoted.key] = demoted

    # cycle breaking on what remains
    while True:
        adj: dict[int, list[int]] = {}
        for key in merged:
            if key[2] != HYPERNYMY:
                continue
            adj.setdefault(key[0], []).append(key[1])
            adj.setdefault(key[1], [])
        cycle = _find_cycle(adj)
        if cycle is None:
            break
        candidates = [merged[(s, t, HYPERNYMY)] for s, t in cycle]
        drop = min(candidates, key=lambda r: (r.confidence, (r.source_id, r.target_id)))
        del merged[drop.key]

    return sorted(
        merged.values(),
        key=lambda r: (r.source_id, r.target_id, _KIND_ORDER[r.kind]),
    )
