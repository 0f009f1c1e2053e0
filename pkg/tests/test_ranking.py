import math
import random

import pytest

from indexkit.errors import BadWeights
from indexkit.ranking import (
    RankedList,
    RankingWeights,
    ScoreBreakdown,
    ScoringContext,
    rank_descriptors,
    score_descriptor,
    score_descriptors,
    score_segment,
    truncate_to_budget,
)
from indexkit.relations import Relation
from indexkit.terms import TermStats, compute_term_stats, extract_candidates

from .conftest import make_doc


def test_bad_weights_rejected():
    with pytest.raises(BadWeights):
        RankingWeights(frequency=0.9, dispersion=0.2, salience=0.2, cohesion=0.2).validate()


def test_max_frequency_term_scores_one():
    doc = make_doc("Knowledge helps. Knowledge grows. Knowledge wins. Frames exist.")
    terms = extract_candidates(doc)
    stats = {t.id: compute_term_stats(t, doc) for t in terms}
    breakdowns = score_descriptors(terms, stats)
    top = next(t for t in terms if t.canonical == "knowledge")
    assert breakdowns[top.id].frequency_component == pytest.approx(1.0)


def test_single_word_cohesion_is_one():
    doc = make_doc("Knowledge helps.")
    terms = extract_candidates(doc)
    stats = {t.id: compute_term_stats(t, doc) for t in terms}
    breakdowns = score_descriptors(terms, stats)
    term = next(t for t in terms if t.canonical == "knowledge")
    assert breakdowns[term.id].cohesion_component == 1.0


def test_dice_hand_computation():
    """f(compound)=4, f(head)=10, f(mod)=6 -> Dice = 8/16 = 0.5."""
    from indexkit.terms import CandidateTerm, TermOccurrence
    from collections import Counter

    occurrences = [TermOccurrence(0, (i, i + 2), 1, 0) for i in range(4)]
    term = CandidateTerm(
        id=0,
        canonical="knowledge representation",
        head_lemma="representation",
        modifier_lemmas=["knowledge"],
        occurrences=occurrences,
        surface_counts=Counter({"knowledge representation": 4}),
    )
    context = ScoringContext(
        max_tf=10,
        tf_by_canonical={
            "knowledge representation": 4,
            "knowledge": 10,
            "representation": 6,
        },
    )
    stats = TermStats(4, 0.5, 0, 0, 0)
    bd = score_descriptor(term, stats, context)
    assert bd.cohesion_component == pytest.approx(0.5)


def test_components_bounded_and_total_blend():
    doc = make_doc(
        "# Knowledge representation\n"
        "We call *knowledge representation* a craft. Knowledge representation "
        "is defined as encoding. Knowledge representation helps."
    )
    terms = extract_candidates(doc)
    stats = {t.id: compute_term_stats(t, doc) for t in terms}
    weights = RankingWeights()
    for t in terms:
        bd = score_descriptors(terms, stats)[t.id]
        for c in (
            bd.frequency_component,
            bd.dispersion_component,
            bd.salience_component,
            bd.cohesion_component,
        ):
            assert 0.0 <= c <= 1.0
        expected = (
            weights.frequency * bd.frequency_component
            + weights.dispersion * bd.dispersion_component
            + weights.salience * bd.salience_component
            + weights.cohesion * bd.cohesion_component
        )
        assert bd.total == pytest.approx(expected)
        assert 0.0 <= bd.total <= 1.0


def test_score_segment_weight_structure():
    doc = make_doc("Knowledge helps.\n\nKnowledge and knowledge again.")
    term = {t.canonical: t for t in extract_candidates(doc)}["knowledge"]
    seg1 = doc.segments[1]  # two occurrences: the max segment
    assert score_segment(term, seg1, doc) == pytest.approx(0.5)
    seg0 = doc.segments[0]
    assert score_segment(term, seg0, doc) == pytest.approx(0.25)


def test_score_segment_full_house():
    doc = make_doc(
        "# Knowledge\nWe call this *knowledge*: knowledge is defined as power."
    )
    term = {t.canonical: t for t in extract_candidates(doc)}["knowledge"]
    paragraph = doc.segments[1]
    assert score_segment(term, paragraph, doc) == pytest.approx(1.0)


def test_rank_all_equal_scores_alphabetical():
    doc = make_doc("Zebra strolls. Knowledge helps. Frames exist.")
    # zebra is unknown -> OTHER; use two single nouns with equal stats
    terms = extract_candidates(doc)
    stats = {t.id: compute_term_stats(t, doc) for t in terms}
    ranked = rank_descriptors(terms, score_descriptors(terms, stats))
    canonicals = [
        next(t.canonical for t in terms if t.id == tid) for tid, _ in ranked.entries
    ]
    assert canonicals == sorted(canonicals, key=lambda c: (-ranked_total(ranked, terms, c), c))


def ranked_total(ranked, terms, canonical):
    tid = next(t.id for t in terms if t.canonical == canonical)
    return next(bd.total for t, bd in ranked.entries if t == tid)


def test_rank_empty():
    assert rank_descriptors([], {}).entries == []


def test_rank_matches_independent_stable_sort():
    rng = random.Random(11)
    from collections import Counter

    from indexkit.terms import CandidateTerm, TermOccurrence

    terms = []
    breakdowns = {}
    for i in range(40):
        canonical = f"term{rng.randrange(1000):03d}x{i}"
        terms.append(
            CandidateTerm(
                id=i,
                canonical=canonical,
                head_lemma=canonical,
                modifier_lemmas=[],
                occurrences=[TermOccurrence(i, (0, 1), 1, 0)],
                surface_counts=Counter({canonical: 1}),
            )
        )
        total = rng.choice([0.25, 0.5, 0.75])
        breakdowns[i] = ScoreBreakdown(total, 0, 0, 0, total, RankingWeights())
    ranked = rank_descriptors(terms, breakdowns)
    expected = sorted(
        ((t.id, breakdowns[t.id]) for t in terms),
        key=lambda e: (-e[1].total, terms[e[0]].canonical),
    )
    assert ranked.entries == expected


def test_frequency_component_monotone_in_tf():
    context = ScoringContext(max_tf=50, tf_by_canonical={})
    values = [
        math.log(1 + tf) / math.log(51)
        for tf in range(1, 51)
    ]
    assert values == sorted(values)


def test_ranking_monotone_in_single_component():
    """With other components fixed, a higher frequency component never
    drops a term below an unchanged competitor."""
    weights = RankingWeights()
    fixed = ScoreBreakdown.blend(0.5, 0.3, 0.2, 0.6, weights)
    lo = ScoreBreakdown.blend(0.2, 0.3, 0.2, 0.6, weights)
    hi = ScoreBreakdown.blend(0.9, 0.3, 0.2, 0.6, weights)
    from collections import Counter

    from indexkit.terms import CandidateTerm, TermOccurrence

    def term(i, canonical):
        return CandidateTerm(
            id=i, canonical=canonical, head_lemma=canonical, modifier_lemmas=[],
            occurrences=[TermOccurrence(i, (0, 1), 1, 0)],
            surface_counts=Counter({canonical: 1}),
        )

    terms = [term(0, "mover"), term(1, "anchor")]
    before = rank_descriptors(terms, {0: lo, 1: fixed}).term_ids()
    after = rank_descriptors(terms, {0: hi, 1: fixed}).term_ids()
    assert before.index(0) >= after.index(0)


def budget_fixture():
    """Four ranked terms where the generic ancestor sits below the cut."""
    weights = RankingWeights()

    def bd(total):
        return ScoreBreakdown(total, 0, 0, 0, total, weights)

    entries = [(0, bd(0.9)), (1, bd(0.8)), (2, bd(0.7)), (3, bd(0.2))]
    ranked = RankedList(entries=entries)
    relations = [Relation(3, 0, "hypernymy", "head_expansion", 0.9)]
    return ranked, relations


def test_truncate_identity_when_budget_big():
    ranked, relations = budget_fixture()
    assert truncate_to_budget(ranked, 10, relations).entries == ranked.entries


def test_truncate_top1_independent():
    weights = RankingWeights()
    entries = [
        (i, ScoreBreakdown(0.9 - i / 10, 0, 0, 0, 0.9 - i / 10, weights))
        for i in range(3)
    ]
    out = truncate_to_budget(RankedList(entries=entries), 1, [])
    assert out.term_ids() == [0]


def test_truncate_restores_cut_ancestor():
    ranked, relations = budget_fixture()
    out = truncate_to_budget(ranked, 3, relations)
    assert out.term_ids() == [0, 1, 3]  # ancestor 3 pulled in, 2 dropped
    assert not out.truncation_warning


def test_truncate_warning_when_top_closure_exceeds_budget():
    weights = RankingWeights()
    entries = [(i, ScoreBreakdown(0.9, 0, 0, 0, 0.9 - i / 100, weights)) for i in range(4)]
    relations = [
        Relation(1, 0, "hypernymy", "head_expansion", 0.9),
        Relation(2, 1, "hypernymy", "head_expansion", 0.9),
        Relation(3, 2, "hypernymy", "head_expansion", 0.9),
    ]
    out = truncate_to_budget(RankedList(entries=entries), 2, relations)
    assert out.truncation_warning
    assert set(out.term_ids()) == {0, 1, 2, 3}  # exactly the closure of the top entry


def test_truncate_closure_property_random():
    rng = random.Random(5)
    weights = RankingWeights()
    for _ in range(150):
        n = rng.randint(2, 16)
        entries = []
        for i in range(n):
            total = round(rng.uniform(0, 1), 3)
            entries.append((i, ScoreBreakdown(total, 0, 0, 0, total, weights)))
        entries.sort(key=lambda e: -e[1].total)
        relations = [
            Relation(a, b, "hypernymy", "head_expansion", 0.9)
            for a, b in {
                (rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, n))
            }
            if a < b  # parents rank-independent but acyclic by construction
        ]
        budget = rng.randint(1, n)
        out = truncate_to_budget(RankedList(entries=entries), budget, relations)
        kept = set(out.term_ids())
        parents = {}
        for r in relations:
            parents.setdefault(r.target_id, set()).add(r.source_id)

        def ancestors(t, seen=frozenset()):
            out_ = set()
            for p in parents.get(t, ()):
                if p not in seen:
                    out_ |= {p} | ancestors(p, seen | {t})
            return out_

        for t in kept:
            assert ancestors(t) <= kept
        if not out.truncation_warning:
            assert len(kept) <= budget
