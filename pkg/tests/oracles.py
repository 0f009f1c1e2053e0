"""Independent brute-force oracles.

These deliberately share no code with the implementation paths they
check: pattern alignments are enumerated exhaustively and selected by an
explicit key, and metric arithmetic is plain counting loops.
"""

from __future__ import annotations

from indexkit.relations import SYMMETRIC_KINDS

_SEPARATORS = (",", "and", "or")


def _lit_ok(tokens, pos, limit, word):
    if pos >= limit:
        return False
    return tokens[pos].lemma.lower() == word or tokens[pos].surface.lower() == word


def _all_chains(tokens, occs, pos, limit):
    """Every possible term-list chain from pos: (members, end, lengths)."""
    out = []
    for end, tid in occs.get(pos, ()):
        if end > limit:
            continue
        out.append(([tid], end, [end - pos]))
        sep_ends = []
        if end < limit and tokens[end].surface.lower() == ",":
            if end + 1 < limit and tokens[end + 1].surface.lower() in ("and", "or"):
                sep_ends.append(end + 2)
            sep_ends.append(end + 1)
        elif end < limit and tokens[end].surface.lower() in ("and", "or"):
            sep_ends.append(end + 1)
        for sep_end in sep_ends:
            for members, chain_end, lens in _all_chains(tokens, occs, sep_end, limit):
                out.append(([tid] + members, chain_end, [end - pos] + lens))
    return out


def enumerate_rule_matches(rule, tokens, occs, anchor, limit):
    """All alignments of the rule at this anchor: (slots, key)."""

    def go(idx, pos):
        if idx == len(rule.items):
            yield [], ()
            return
        kind, word = rule.items[idx]
        if kind == "lit":
            if _lit_ok(tokens, pos, limit, word):
                for slots, key in go(idx + 1, pos + 1):
                    yield slots, key
        elif kind == "term":
            for end, tid in occs.get(pos, ()):
                if end > limit:
                    continue
                for slots, key in go(idx + 1, end):
                    yield [[tid]] + slots, ((end - pos,),) + key
        else:  # termlist
            for members, chain_end, lens in _all_chains(tokens, occs, pos, limit):
                for slots, key in go(idx + 1, chain_end):
                    yield [members] + slots, (tuple(lens),) + key

    return list(go(0, anchor))


def oracle_pattern_relations(doc, terms, rules):
    """Exhaustive enumeration + canonical (greedy-longest) selection.

    Returns a sorted list of (source, target, kind, confidence, rule name)
    tuples, one per (generic, specific) pair of the canonical alignment at
    each (rule, anchor).
    """
    occs: dict[int, list[tuple[int, int]]] = {}
    for term in terms:
        for occ in term.occurrences:
            occs.setdefault(occ.token_span[0], []).append(
                (occ.token_span[1], term.id)
            )

    sentences = []
    for i, tok in enumerate(doc.tokens):
        if not sentences or doc.tokens[i - 1].sentence_id != tok.sentence_id:
            sentences.append([i, i + 1])
        else:
            sentences[-1][1] = i + 1

    results = []
    for lo, hi in sentences:
        for anchor in range(lo, hi):
            for rule in rules:
                matches = enumerate_rule_matches(rule, doc.tokens, occs, anchor, hi)
                if not matches:
                    continue
                best_key = max(key for _, key in matches)
                best = [slots for slots, key in matches if key == best_key]
                pair_sets = []
                for slots in best:
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
                    pair_sets.append(pairs)
                # ties on the key must agree on the emitted pairs
                assert all(p == pair_sets[0] for p in pair_sets)
                for g, s in pair_sets[0]:
                    if rule.relation_kind in SYMMETRIC_KINDS and g > s:
                        g, s = s, g
                    results.append(
                        (g, s, rule.relation_kind, rule.base_confidence, rule.name)
                    )
    return sorted(results)


# ---------------------------------------------------------------------------
# Metric oracles: plain counting, no set algebra
# ---------------------------------------------------------------------------


def oracle_descriptor_precision(draft_descriptors, reference_descriptors):
    hits = 0
    for d in draft_descriptors:
        found = False
        for r in reference_descriptors:
            if d == r:
                found = True
        if found:
            hits += 1
    return hits / len(draft_descriptors)


def oracle_ranked_precision(ranked_descriptors, reference_descriptors, k):
    k = min(k, len(ranked_descriptors))
    hits = 0
    for d in ranked_descriptors[:k]:
        for r in reference_descriptors:
            if d == r:
                hits += 1
                break
    return hits / k


def _triple_hit(triple, reference_triples):
    s, t, k = triple
    for rs, rt, rk in reference_triples:
        if rk != k:
            continue
        if (rs, rt) == (s, t):
            return True
        if k in SYMMETRIC_KINDS and (rt, rs) == (s, t):
            return True
    return False


def oracle_relation_precision(draft_triples, reference_triples):
    # a symmetric triple and its flip are the same relation: count once
    distinct = []
    for t in draft_triples:
        duplicate = False
        for u in distinct:
            if u == t:
                duplicate = True
            elif t[2] in SYMMETRIC_KINDS and u == (t[1], t[0], t[2]):
                duplicate = True
        if not duplicate:
            distinct.append(t)
    hits = 0
    for triple in distinct:
        if _triple_hit(triple, reference_triples):
            hits += 1
    return hits / len(distinct)


def _distinct_triples(triples):
    distinct = []
    for t in triples:
        duplicate = False
        for u in distinct:
            if u == t:
                duplicate = True
            elif t[2] in SYMMETRIC_KINDS and u == (t[1], t[0], t[2]):
                duplicate = True
        if not duplicate:
            distinct.append(t)
    return distinct


def oracle_size_increase(
    candidate_descriptors,
    candidate_triples,
    traditional_descriptors,
    traditional_triples,
):
    n_c = len(candidate_descriptors)
    n_t = len(traditional_descriptors)
    desc = 100.0 * (n_c - n_t) / n_t
    avg_c = len(_distinct_triples(candidate_triples)) / n_c
    avg_t = len(_distinct_triples(traditional_triples)) / n_t
    rels = 100.0 * (avg_c - avg_t) / avg_t
    return desc, rels
