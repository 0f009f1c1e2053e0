"""End-to-end draft construction.

Composes the stages in their natural order: candidate extraction, variant
grouping, relation extraction from all three sources, merge, scoring and
ranking, budget truncation, reference calculus for the survivors, and tree
assembly. This is the one place where the variant closure is applied: an
expanded form absorbs its acronym's occurrences into the visible page
refs, the acronym itself becoming a pure redirect.
"""

from __future__ import annotations

from .config import PipelineConfig
from .corpus import Document
from .index import DraftIndex, resolve_redirects, build_draft_index
from .ranking import (
    rank_descriptors,
    score_descriptors,
    score_segment,
    truncate_to_budget,
)
from .references import compute_page_refs, locate_occurrences, select_reference_segments
from .relations import (
    DEFAULT_RULES,
    SynonymDictionary,
    extract_head_expansion_relations,
    extract_pattern_relations,
    load_rules,
    merge_relations,
    project_synonym_dictionary,
)
from .terms import compute_term_stats, extract_candidates, group_variants


def _preview(doc: Document, term, segment_id: int) -> str:
    """Snippet around the term's first occurrence in the segment:
    the occurrence's sentence plus one sentence either side, clipped to
    the segment."""
    occ = next(o for o in term.occurrences if o.segment_id == segment_id)
    seg = doc.segment_by_id(segment_id)
    sid = doc.tokens[occ.token_span[0]].sentence_id
    lo, hi = seg.token_span
    picked = [
        t.surface
        for t in doc.tokens[lo:hi]
        if sid - 1 <= t.sentence_id <= sid + 1
    ]
    return " ".join(picked)


def build_draft(doc: Document, config: PipelineConfig | None = None) -> DraftIndex:
    config = config or PipelineConfig()
    config.validate()

    terms = extract_candidates(doc, config.chunk_options())
    terms, variant_relations = group_variants(terms)
    stats = {t.id: compute_term_stats(t, doc) for t in terms}

    rules = load_rules(config.rules_path) if config.rules_path else DEFAULT_RULES
    batches = [
        variant_relations,
        extract_pattern_relations(doc, terms, rules),
        extract_head_expansion_relations(terms),
    ]
    if config.synonyms_path:
        dictionary = SynonymDictionary.load(config.synonyms_path)
        batches.append(project_synonym_dictionary(terms, dictionary))
    relations = merge_relations(batches)

    breakdowns = score_descriptors(terms, stats, config.weights, config.salience)
    ranked = rank_descriptors(terms, breakdowns)
    if config.budget is not None:
        ranked = truncate_to_budget(ranked, config.budget, relations, terms)

    survivors = set(ranked.term_ids())
    terms_by_id = {t.id: t for t in terms}
    surviving_relations = [
        r for r in relations if r.source_id in survivors and r.target_id in survivors
    ]
    redirects = resolve_redirects(surviving_relations, survivors)
    variants_of: dict[int, list] = {}
    if config.ref_policy.variant_closure:
        for src, dst in redirects.items():
            variants_of.setdefault(dst, []).append(terms_by_id[src])

    page_refs = {}
    own_page_refs = {}
    segment_refs = {}
    for tid in sorted(survivors):
        term = terms_by_id[tid]
        own_groups = locate_occurrences(term, doc)
        own_page_refs[tid] = compute_page_refs(own_groups, config.ref_policy)
        if tid in redirects:
            page_refs[tid] = []
        elif tid in variants_of:
            closure_groups = locate_occurrences(term, doc, variants_of[tid])
            page_refs[tid] = compute_page_refs(closure_groups, config.ref_policy)
        else:
            page_refs[tid] = own_page_refs[tid]
        scores = {
            seg_id: score_segment(term, doc.segment_by_id(seg_id), doc)
            for seg_id in {o.segment_id for o in term.occurrences}
        }
        refs = select_reference_segments(term, doc, scores)
        for ref in refs:
            ref.preview = _preview(doc, term, ref.segment_id)
        segment_refs[tid] = refs

    return build_draft_index(
        document_id=doc.id,
        terms=terms,
        relations=relations,
        page_refs=page_refs,
        segment_refs=segment_refs,
        ranked=ranked,
        budget=config.budget,
        own_page_refs=own_page_refs,
        max_depth=config.max_depth,
    )
