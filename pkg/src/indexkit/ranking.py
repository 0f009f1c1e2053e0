"""Relevance scoring and ranking of descriptors and reference segments.

A descriptor's score blends four bounded components: frequency
(log-normalized against the corpus maximum), dispersion (paragraph-segment
coverage), salience (heading/emphasis/defining-cue occurrences, capped),
and cohesion (Dice association between the components of a multiword
term). The blend weights are configuration, not ground truth; defaults are
0.4 / 0.2 / 0.2 / 0.2.

`truncate_to_budget` enforces an editorial length limit without orphaning
sub-entries: cutting a term whose generic ancestor was also cut would
leave the index tree dangling, so ancestors are pulled back in and the
lowest-ranked expendable entries dropped, to fixpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import Document, Segment
from .errors import BadWeights
from .relations import HYPERNYMY, Relation
from .terms import CandidateTerm, TermStats


@dataclass(frozen=True)
class RankingWeights:
    frequency: float = 0.4
    dispersion: float = 0.2
    salience: float = 0.2
    cohesion: float = 0.2

    def validate(self) -> None:
        total = self.frequency + self.dispersion + self.salience + self.cohesion
        if abs(total - 1.0) > 1e-9:
            raise BadWeights(f"weights sum to {total}, expected 1")


@dataclass(frozen=True)
class SalienceMultipliers:
    heading: float = 3.0
    emphasis: float = 2.0
    cue: float = 2.0


@dataclass
class ScoreBreakdown:
    frequency_component: float
    dispersion_component: float
    salience_component: float
    cohesion_component: float
    total: float
    weights: RankingWeights

    @classmethod
    def blend(
        cls,
        frequency: float,
        dispersion: float,
        salience: float,
        cohesion: float,
        weights: RankingWeights,
    ) -> "ScoreBreakdown":
        total = (
            weights.frequency * frequency
            + weights.dispersion * dispersion
            + weights.salience * salience
            + weights.cohesion * cohesion
        )
        return cls(frequency, dispersion, salience, cohesion, total, weights)


@dataclass
class RankedList:
    entries: list[tuple[int, ScoreBreakdown]] = field(default_factory=list)
    ordering_key: str = "total desc, canonical asc"
    truncation_warning: bool = False

    def term_ids(self) -> list[int]:
        return [tid for tid, _ in self.entries]


@dataclass
class ScoringContext:
    """Corpus-level frequencies needed to normalize per-term scores."""

    max_tf: int
    tf_by_canonical: dict[str, int]

    @classmethod
    def build(cls, terms: Sequence[CandidateTerm]) -> "ScoringContext":
        tf = {t.canonical: t.tf for t in terms}
        return cls(max_tf=max(tf.values(), default=1), tf_by_canonical=tf)


def _dice(pair_tf: int, left_tf: int, right_tf: int) -> float:
    # component frequencies are at least the compound's own frequency;
    # floor the lookups so the coefficient stays in [0, 1] even when a
    # component (e.g. a bare adjective) is never a standalone term
    left = max(left_tf, pair_tf)
    right = max(right_tf, pair_tf)
    if left + right == 0:
        return 0.0
    return 2.0 * pair_tf / (left + right)


def _cohesion(term: CandidateTerm, context: ScoringContext) -> float:
    content = term.content_lemmas()
    if len(content) <= 1:
        return 1.0
    tf = context.tf_by_canonical
    if len(content) == 2:
        return _dice(
            term.tf,
            tf.get(term.head_lemma, 0),
            tf.get((term.modifier_lemmas or [""])[0], 0),
        )
    # longer terms: geometric mean of adjacent content-pair Dice values,
    # each pair taken as the contiguous sub-chunk between the two words
    words = term.words
    positions = []
    used = set()
    for c in content:
        for i, w in enumerate(words):
            if w == c and i not in used:
                positions.append(i)
                used.add(i)
                break
    dices = []
    for (i, j) in zip(positions, positions[1:]):
        pair_canonical = " ".join(words[i: j + 1])
        pair_tf = tf.get(pair_canonical, 0)
        d = _dice(
            pair_tf,
            tf.get(words[i], 0),
            tf.get(words[j], 0),
        )
        dices.append(d)
    if not dices or any(d == 0.0 for d in dices):
        return 0.0
    log_sum = sum(math.log(d) for d in dices)
    return math.exp(log_sum / len(dices))


def score_descriptor(
    term: CandidateTerm,
    stats: TermStats,
    context: ScoringContext,
    weights: RankingWeights | None = None,
    multipliers: SalienceMultipliers | None = None,
) -> ScoreBreakdown:
    weights = weights or RankingWeights()
    weights.validate()
    multipliers = multipliers or SalienceMultipliers()
    frequency = math.log(1 + stats.tf) / math.log(1 + context.max_tf) if context.max_tf else 0.0
    dispersion = stats.segment_coverage
    raw_salience = (
        multipliers.heading * stats.heading_count
        + multipliers.emphasis * stats.emphasis_count
        + multipliers.cue * stats.cue_count
    )
    salience = min(1.0, raw_salience / stats.tf * 0.5) if stats.tf else 0.0
    cohesion = _cohesion(term, context)
    return ScoreBreakdown.blend(frequency, dispersion, salience, cohesion, weights)


def score_descriptors(
    terms: Sequence[CandidateTerm],
    stats_by_id: Mapping[int, TermStats],
    weights: RankingWeights | None = None,
    multipliers: SalienceMultipliers | None = None,
) -> dict[int, ScoreBreakdown]:
    context = ScoringContext.build(terms)
    return {
        t.id: score_descriptor(t, stats_by_id[t.id], context, weights, multipliers)
        for t in terms
    }


def score_segment(term: CandidateTerm, segment: Segment, doc: Document) -> float:
    """Relevance of one segment as a reference candidate for a term."""
    counts: dict[int, int] = {}
    for occ in term.occurrences:
        counts[occ.segment_id] = counts.get(occ.segment_id, 0) + 1
    here = counts.get(segment.id, 0)
    if here == 0:
        return 0.0
    max_count = max(counts.values())
    score = 0.5 * (here / max_count)
    heading = doc.group_heading(segment)
    if heading is not None and any(
        o.segment_id == heading.id for o in term.occurrences
    ):
        score += 0.3
    if any(
        o.segment_id == segment.id and (o.emphasized or o.cue_context)
        for o in term.occurrences
    ):
        score += 0.2
    return score


def rank_descriptors(
    terms: Sequence[CandidateTerm],
    breakdowns: Mapping[int, ScoreBreakdown],
) -> RankedList:
    canonical = {t.id: t.canonical for t in terms}
    entries = sorted(
        ((t.id, breakdowns[t.id]) for t in terms),
        key=lambda e: (-e[1].total, canonical[e[0]]),
    )
    return RankedList(entries=entries)


def _ancestor_map(relations: Sequence[Relation]) -> dict[int, set[int]]:
    """term id -> transitive generic ancestors via the hypernymy DAG."""
    parents: dict[int, set[int]] = {}
    for rel in relations:
        if rel.kind == HYPERNYMY:
            parents.setdefault(rel.target_id, set()).add(rel.source_id)
    cache: dict[int, set[int]] = {}

    def ancestors(tid: int, guard: frozenset[int] = frozenset()) -> set[int]:
        if tid in cache:
            return cache[tid]
        result: set[int] = set()
        for p in parents.get(tid, ()):
            if p in guard:
                continue  # tolerate cycles from un-merged inputs
            result.add(p)
            result |= ancestors(p, guard | {tid})
        cache[tid] = result
        return result

    return {tid: ancestors(tid) for tid in set(parents)}


def truncate_to_budget(
    ranked: RankedList,
    budget: int,
    relations: Sequence[Relation] = (),
    terms: Sequence[CandidateTerm] = (),
) -> RankedList:
    """Keep the top entries without orphaning generic ancestors.

    If a kept term's hypernymy ancestor fell below the cut, the ancestor is
    pulled back in and the lowest-ranked entry that nothing depends on is
    dropped, iterating to fixpoint. When even the top entry's ancestor
    closure exceeds the budget, exactly that closure is returned and the
    truncation warning is set.
    """
    assert budget >= 1
    if budget >= len(ranked.entries):
        return RankedList(list(ranked.entries), ranked.ordering_key, ranked.truncation_warning)

    position = {tid: i for i, (tid, _) in enumerate(ranked.entries)}
    in_rank = set(position)
    anc_map = _ancestor_map(relations)

    def ancestors(tid: int) -> set[int]:
        return {a for a in anc_map.get(tid, ()) if a in in_rank}

    top = ranked.entries[0][0]
    top_closure = {top} | ancestors(top)
    warning = False
    if len(top_closure) > budget:
        kept = top_closure
        warning = True
    else:
        kept = {tid for tid, _ in ranked.entries[:budget]}
        while True:
            missing = set()
            for tid in kept:
                missing |= ancestors(tid) - kept
            if not missing:
                break
            kept |= missing
        while len(kept) > budget:
            required = set()
            for tid in kept:
                required |= ancestors(tid)
            droppable = [tid for tid in kept if tid not in required]
            if not droppable:
                warning = True
                break
            kept.discard(max(droppable, key=lambda t: position[t]))

    entries = [(tid, bd) for tid, bd in ranked.entries if tid in kept]
    return RankedList(entries, ranked.ordering_key, truncation_warning=warning)
