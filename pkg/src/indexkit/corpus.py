"""Canonical document model and ingestion.

A document is a flat token stream tiled twice: by pages and by segments
(headings and paragraphs). Everything downstream — term extraction, the
reference calculus, ranking — consumes this model and nothing else, so the
two ingestion paths here are the only places raw text is touched.

Two input formats are supported:

* plain text with lightweight markers: form feed (U+000C) breaks pages,
  leading ``#`` characters mark a heading (count = depth), ``*...*`` marks
  emphasis, blank lines separate paragraphs;
* a pre-tagged one-token-per-line format (``surface<TAB>lemma<TAB>pos[<TAB>flags]``
  with ``##PAGE n`` / ``##SEG kind depth`` directives), the escape hatch for
  plugging in an external tagger.

The built-in tagger is deliberately small: a lexicon of function words plus
three fallback rules (all-caps/capitalized unknowns, nominal suffixes). It is
meant to be good enough for English technical prose and to be replaceable.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .errors import (
    BadColumnCount,
    BadDirective,
    EmptyDocument,
    MalformedMarker,
)

# Coarse part-of-speech tags.
NOUN = "NOUN"
PROPN = "PROPN"
ADJ = "ADJ"
PREP = "PREP"
DET = "DET"
VERB = "VERB"
PUNCT = "PUNCT"
OTHER = "OTHER"

VALID_POS = frozenset({NOUN, PROPN, ADJ, PREP, DET, VERB, PUNCT, OTHER})

PAGE_BREAK = ""

SENTENCE_TERMINATORS = frozenset({".", "!", "?"})

# Words whose trailing period must not end a sentence.
DEFAULT_ABBREVIATIONS = frozenset(
    {"mr", "mrs", "ms", "dr", "prof", "fig", "eq", "sec", "e.g", "i.e",
     "etc", "vs", "cf", "al", "no", "p", "pp"}
)

# Nominal suffixes used by the fallback tagging rule (tested against the
# singularized form).
DEFAULT_NOUN_SUFFIXES = (
    "tion", "sion", "ment", "ness", "ity", "ism", "ence", "ance",
    "ship", "hood", "logy", "ics",
)

TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:['\-][A-Za-z0-9]+)*|\S")

HEADING_RE = re.compile(r"^(#+)\s*(.*)$")


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str
    emphasis: bool = False
    char_offset: int = 0
    sentence_id: int = 0


@dataclass(frozen=True)
class Page:
    number: int
    token_span: tuple[int, int]


@dataclass(frozen=True)
class Segment:
    id: int
    kind: str  # "heading" | "paragraph"
    depth: int  # heading level, 0 for paragraphs
    token_span: tuple[int, int]
    title_of: int | None = None  # group id this heading titles


@dataclass
class Document:
    """Immutable-by-convention container for one ingested document."""

    id: str
    pages: list[Page]
    segments: list[Segment]
    tokens: list[Token]
    language: str = "en"

    def __post_init__(self) -> None:
        self._page_starts = [p.token_span[0] for p in self.pages]
        self._segment_starts = [s.token_span[0] for s in self.segments]
        # group id per segment: nearest preceding heading's group
        self._group_of: list[int | None] = []
        current: int | None = None
        for seg in self.segments:
            if seg.kind == "heading":
                current = seg.title_of
            self._group_of.append(current)

    def page_of_token(self, index: int) -> Page:
        pos = bisect_right(self._page_starts, index) - 1
        page = self.pages[max(pos, 0)]
        while index >= page.token_span[1] and pos + 1 < len(self.pages):
            pos += 1
            page = self.pages[pos]
        return page

    def segment_of_token(self, index: int) -> Segment:
        pos = bisect_right(self._segment_starts, index) - 1
        return self.segments[max(pos, 0)]

    def segment_by_id(self, segment_id: int) -> Segment:
        return self.segments[segment_id]

    def group_heading(self, segment: Segment) -> Segment | None:
        """Heading that titles the group this segment belongs to.

        A heading is its own group heading; a paragraph belongs to the
        nearest preceding heading's group.
        """
        group = self._group_of[segment.id]
        if group is None:
            return None
        for seg in self.segments[: segment.id + 1][::-1]:
            if seg.kind == "heading" and seg.title_of == group:
                return seg
        return None

    def tokens_in(self, span: tuple[int, int]) -> list[Token]:
        return self.tokens[span[0]:span[1]]

    def sentence_span(self, sentence_id: int) -> tuple[int, int]:
        lo = None
        hi = 0
        for i, tok in enumerate(self.tokens):
            if tok.sentence_id == sentence_id:
                if lo is None:
                    lo = i
                hi = i + 1
        return (lo or 0, hi)

    def is_tagged(self) -> bool:
        return all(t.pos in VALID_POS for t in self.tokens)

    def validate(self) -> None:
        """Assert the tiling and ordering invariants. Test/debug helper."""
        n = len(self.tokens)
        cursor = 0
        last_number = None
        for page in self.pages:
            a, b = page.token_span
            assert a == cursor and a <= b, "pages must tile the token stream"
            assert last_number is None or page.number > last_number
            last_number = page.number
            cursor = b
        assert cursor == n, "pages must cover all tokens"
        cursor = 0
        for seg in self.segments:
            a, b = seg.token_span
            assert a == cursor and a < b, "segments must tile without gaps"
            if seg.kind == "heading":
                assert seg.depth >= 1
            else:
                assert seg.depth == 0
            cursor = b
        assert cursor == n, "segments must cover all tokens"
        last_sid = 0
        for tok in self.tokens:
            assert tok.lemma, "lemma must be non-empty"
            assert tok.sentence_id >= last_sid
            last_sid = tok.sentence_id

    def structurally_equal(self, other: "Document") -> bool:
        """Equality modulo char offsets (tagged normal form loses them)."""
        if (self.id, self.language) != (other.id, other.language):
            return False
        if self.pages != other.pages or self.segments != other.segments:
            return False
        if len(self.tokens) != len(other.tokens):
            return False
        for a, b in zip(self.tokens, other.tokens):
            if (a.surface, a.lemma, a.pos, a.emphasis, a.sentence_id) != (
                b.surface, b.lemma, b.pos, b.emphasis, b.sentence_id
            ):
                return False
        return True


# ---------------------------------------------------------------------------
# Tag lexicon and the rule tagger
# ---------------------------------------------------------------------------

_DEFAULT_ENTRIES: dict[str, tuple[str, str]] = {}
for _w in ("the", "a", "an", "this", "that", "these", "those", "its",
           "their", "his", "her", "our", "your", "my", "some", "many",
           "several", "each", "every", "no", "all", "both", "any", "other",
           "such", "more", "most", "few"):
    _DEFAULT_ENTRIES[_w] = (_w, DET)
for _w in ("of", "in", "on", "for", "with", "to", "by", "from", "at", "as",
           "into", "over", "under", "between", "about", "through", "during",
           "before", "after", "without", "within", "across", "against",
           "among", "toward", "towards", "via", "per", "upon"):
    _DEFAULT_ENTRIES[_w] = (_w, PREP)
for _w, _lemma in (("is", "be"), ("are", "be"), ("was", "be"), ("were", "be"),
                   ("be", "be"), ("been", "be"), ("being", "be"),
                   ("has", "have"), ("have", "have"), ("had", "have"),
                   ("does", "do"), ("do", "do"), ("did", "do"),
                   ("can", "can"), ("could", "can"), ("may", "may"),
                   ("might", "may"), ("will", "will"), ("would", "will"),
                   ("shall", "shall"), ("should", "shall"), ("must", "must")):
    _DEFAULT_ENTRIES[_w] = (_lemma, VERB)
for _w in ("and", "or", "but", "nor", "not", "also", "than", "then", "when",
           "while", "where", "which", "who", "whose", "what", "how", "if",
           "because", "so", "it", "they", "we", "he", "she", "there", "here"):
    _DEFAULT_ENTRIES[_w] = (_w, OTHER)


@dataclass
class TagLexicon:
    """Maps lowercase surfaces to (lemma, pos)."""

    entries: dict[str, tuple[str, str]] = field(default_factory=dict)

    def lookup(self, surface_lower: str) -> tuple[str, str] | None:
        return self.entries.get(surface_lower)

    @classmethod
    def default(cls) -> "TagLexicon":
        return cls(dict(_DEFAULT_ENTRIES))

    @classmethod
    def load(cls, path: str | Path, include_defaults: bool = True) -> "TagLexicon":
        """Load `surface<TAB>lemma<TAB>pos` lines; `#` starts a comment."""
        entries = dict(_DEFAULT_ENTRIES) if include_defaults else {}
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise BadColumnCount(
                    f"{path}:{lineno}: expected 3 tab-separated columns"
                )
            surface, lemma, pos = cols
            pos = pos.strip().upper()
            if pos not in VALID_POS:
                pos = OTHER
            entries[surface.strip().lower()] = (lemma.strip().lower(), pos)
        return cls(entries)


def singularize(word: str) -> str:
    """Naive English plural stripper for unknown nouns."""
    if len(word) < 4 or not word.endswith("s") or word.endswith("ss"):
        return word
    if word.endswith("ies"):
        return word[:-3] + "y"
    for suf in ("ches", "shes", "xes", "ses", "zes"):
        if word.endswith(suf):
            return word[:-2]
    return word[:-1]


def _is_punct(surface: str) -> bool:
    return not any(ch.isalnum() for ch in surface)


def assign_sentence_ids(
    tokens: Sequence[Token],
    segment_spans: Sequence[tuple[int, int]],
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> list[Token]:
    """Token-level sentence splitting shared by both ingestion paths.

    A sentence ends after a terminal punctuation token followed (within the
    same segment) by a token starting with an uppercase letter, unless the
    preceding word is a known abbreviation. Segment starts always begin a
    new sentence, so the rule is stable regardless of how the document
    arrived.
    """
    out: list[Token] = []
    sid = -1
    for (a, b) in segment_spans:
        if a == b:
            continue
        sid += 1
        prev_word: str | None = None
        for i in range(a, b):
            tok = tokens[i]
            out.append(replace(tok, sentence_id=sid))
            if tok.surface in SENTENCE_TERMINATORS and i + 1 < b:
                nxt = tokens[i + 1].surface
                if nxt[:1].isupper() and (prev_word is None or prev_word not in abbreviations):
                    sid += 1
            if not _is_punct(tok.surface):
                prev_word = tok.surface.lower()
    return out


def tag_tokens(
    tokens: Sequence[Token],
    lexicon: TagLexicon | None = None,
    noun_suffixes: Sequence[str] = DEFAULT_NOUN_SUFFIXES,
) -> list[Token]:
    """Fill lemma/pos on a token list.

    Order of rules: punctuation, lexicon hit, all-caps or capitalized
    mid-sentence unknown -> PROPN, nominal suffix -> NOUN, else OTHER.
    Total and deterministic over valid input.
    """
    lexicon = lexicon or TagLexicon.default()
    tagged: list[Token] = []
    sentence_started: set[int] = set()
    for tok in tokens:
        surface = tok.surface
        lower = surface.lower()
        first_in_sentence = tok.sentence_id not in sentence_started
        if not _is_punct(surface):
            sentence_started.add(tok.sentence_id)
        if _is_punct(surface):
            tagged.append(replace(tok, lemma=surface, pos=PUNCT))
            continue
        hit = lexicon.lookup(lower)
        if hit is not None:
            tagged.append(replace(tok, lemma=hit[0], pos=hit[1]))
            continue
        if len(surface) >= 2 and surface.isalpha() and surface.isupper():
            tagged.append(replace(tok, lemma=lower, pos=PROPN))
            continue
        if surface[:1].isupper() and not first_in_sentence:
            tagged.append(replace(tok, lemma=lower, pos=PROPN))
            continue
        singular = singularize(lower)
        if any(singular.endswith(suf) for suf in noun_suffixes):
            tagged.append(replace(tok, lemma=singular, pos=NOUN))
            continue
        tagged.append(replace(tok, lemma=lower, pos=OTHER))
    return tagged


# ---------------------------------------------------------------------------
# Plain-text ingestion
# ---------------------------------------------------------------------------


@dataclass
class IngestOptions:
    document_id: str = "doc"
    first_page: int = 1
    language: str = "en"
    lexicon: TagLexicon | None = None
    noun_suffixes: Sequence[str] = DEFAULT_NOUN_SUFFIXES
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS


@dataclass
class _Block:
    kind: str
    depth: int
    text: str
    offset: int  # char offset of the block in the source


def _split_blocks(page_text: str, page_offset: int) -> list[_Block]:
    blocks: list[_Block] = []
    para_lines: list[tuple[str, int]] = []

    def flush() -> None:
        nonlocal para_lines
        if para_lines:
            start = para_lines[0][1]
            text = "\n".join(line for line, _ in para_lines)
            blocks.append(_Block("paragraph", 0, text, start))
            para_lines = []

    offset = page_offset
    for line in page_text.split("\n"):
        stripped = line.strip()
        m = HEADING_RE.match(stripped)
        if not stripped:
            flush()
        elif m:
            flush()
            depth = len(m.group(1))
            leading = len(line) - len(line.lstrip())
            body_offset = offset + leading + m.start(2)
            blocks.append(_Block("heading", depth, m.group(2), body_offset))
        else:
            para_lines.append((line, offset))
        offset += len(line) + 1
    flush()
    return blocks


def _tokenize_block(block: _Block) -> list[Token]:
    """Tokenize one block, consuming `*...*` emphasis markers."""
    text = block.text
    if text.count("*") % 2 != 0:
        raise MalformedMarker(
            f"unbalanced '*' emphasis marker near offset {block.offset}"
        )
    # Emphasis ranges in block-local offsets; markers blanked for tokenizing.
    ranges: list[tuple[int, int]] = []
    chars = list(text)
    open_at: int | None = None
    for i, ch in enumerate(chars):
        if ch == "*":
            chars[i] = " "
            if open_at is None:
                open_at = i
            else:
                ranges.append((open_at, i))
                open_at = None
    cleaned = "".join(chars)
    tokens: list[Token] = []
    for m in TOKEN_RE.finditer(cleaned):
        start = m.start()
        emphasized = any(a < start < b for a, b in ranges)
        tokens.append(
            Token(
                surface=m.group(),
                lemma="",
                pos="",
                emphasis=emphasized,
                char_offset=block.offset + start,
            )
        )
    return tokens


def ingest_plain_text(source: str, options: IngestOptions | None = None) -> Document:
    """Ingest marker-annotated plain text into a tagged Document."""
    options = options or IngestOptions()
    pages: list[Page] = []
    segments: list[Segment] = []
    tokens: list[Token] = []
    segment_spans: list[tuple[int, int]] = []
    seg_meta: list[tuple[str, int]] = []

    page_offset = 0
    for page_index, page_text in enumerate(source.split(PAGE_BREAK)):
        page_start = len(tokens)
        for block in _split_blocks(page_text, page_offset):
            block_tokens = _tokenize_block(block)
            if not block_tokens:
                continue
            a = len(tokens)
            tokens.extend(block_tokens)
            segment_spans.append((a, len(tokens)))
            seg_meta.append((block.kind, block.depth))
        pages.append(
            Page(number=options.first_page + page_index,
                 token_span=(page_start, len(tokens)))
        )
        page_offset += len(page_text) + 1

    if not tokens:
        raise EmptyDocument("no tokens in input")

    tokens = assign_sentence_ids(tokens, segment_spans, options.abbreviations)
    tokens = tag_tokens(tokens, options.lexicon, options.noun_suffixes)

    group_counter = 0
    for seg_id, ((a, b), (kind, depth)) in enumerate(zip(segment_spans, seg_meta)):
        title_of = None
        if kind == "heading":
            title_of = group_counter
            group_counter += 1
        segments.append(Segment(seg_id, kind, depth, (a, b), title_of))

    return Document(
        id=options.document_id,
        pages=pages,
        segments=segments,
        tokens=tokens,
        language=options.language,
    )


# ---------------------------------------------------------------------------
# Tagged format: ingestion and serialization
# ---------------------------------------------------------------------------


def ingest_tagged(source: str, options: IngestOptions | None = None) -> Document:
    """Ingest the one-token-per-line tagged format.

    Taggings are taken verbatim; unknown pos tags map to OTHER. ``##PAGE n``
    starts page n (strictly increasing); ``##SEG kind depth`` starts a
    segment. A page break without a following ``##SEG`` opens a fresh
    paragraph segment so segments never straddle pages.
    """
    options = options or IngestOptions()
    tokens: list[Token] = []
    page_bounds: list[tuple[int, int]] = [(options.first_page, 0)]
    explicit_page = False
    segment_spans: list[tuple[int, int]] = []
    seg_meta: list[tuple[str, int]] = []

    seg_start: int | None = None
    open_meta: tuple[str, int] = ("paragraph", 0)
    pending: tuple[str, int] | None = None
    char_offset = 0

    def close_segment() -> None:
        nonlocal seg_start
        if seg_start is not None and seg_start < len(tokens):
            segment_spans.append((seg_start, len(tokens)))
            seg_meta.append(open_meta)
        seg_start = None

    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("##"):
            parts = line.split()
            if parts[0] == "##PAGE":
                if len(parts) != 2 or not parts[1].isdigit():
                    raise BadDirective(f"line {lineno}: bad ##PAGE directive")
                number = int(parts[1])
                close_segment()
                if not explicit_page and not tokens:
                    page_bounds[0] = (number, 0)
                elif number <= page_bounds[-1][0]:
                    raise BadDirective(
                        f"line {lineno}: page numbers must increase"
                    )
                else:
                    page_bounds.append((number, len(tokens)))
                explicit_page = True
            elif parts[0] == "##SEG":
                if (
                    len(parts) != 3
                    or parts[1] not in ("heading", "paragraph")
                    or not parts[2].isdigit()
                ):
                    raise BadDirective(f"line {lineno}: bad ##SEG directive")
                kind, depth = parts[1], int(parts[2])
                if kind == "heading" and depth < 1:
                    raise BadDirective(
                        f"line {lineno}: heading depth must be >= 1"
                    )
                if kind == "paragraph" and depth != 0:
                    raise BadDirective(
                        f"line {lineno}: paragraph depth must be 0"
                    )
                close_segment()
                pending = (kind, depth)
            else:
                raise BadDirective(f"line {lineno}: unknown directive {parts[0]}")
            continue
        cols = line.split("\t")
        if len(cols) not in (3, 4):
            raise BadColumnCount(
                f"line {lineno}: expected 3 or 4 tab-separated columns, got {len(cols)}"
            )
        surface, lemma, pos = cols[0], cols[1], cols[2].strip().upper()
        flags = cols[3] if len(cols) == 4 else ""
        if not surface or not lemma:
            raise BadColumnCount(f"line {lineno}: empty surface or lemma")
        if pos not in VALID_POS:
            pos = OTHER
        if seg_start is None:
            seg_start = len(tokens)
            open_meta = pending if pending is not None else ("paragraph", 0)
            pending = None
        tokens.append(
            Token(
                surface=surface,
                lemma=lemma,
                pos=pos,
                emphasis="E" in flags,
                char_offset=char_offset,
            )
        )
        char_offset += len(surface) + 1

    close_segment()
    if not tokens:
        raise EmptyDocument("no tokens in input")

    pages: list[Page] = []
    for i, (number, start) in enumerate(page_bounds):
        end = page_bounds[i + 1][1] if i + 1 < len(page_bounds) else len(tokens)
        pages.append(Page(number=number, token_span=(start, end)))

    tokens = assign_sentence_ids(tokens, segment_spans, options.abbreviations)

    segments: list[Segment] = []
    group_counter = 0
    for seg_id, ((a, b), (kind, depth)) in enumerate(zip(segment_spans, seg_meta)):
        title_of = None
        if kind == "heading":
            title_of = group_counter
            group_counter += 1
        segments.append(Segment(seg_id, kind, depth, (a, b), title_of))

    return Document(
        id=options.document_id,
        pages=pages,
        segments=segments,
        tokens=tokens,
        language=options.language,
    )


def to_tagged(doc: Document) -> str:
    """Serialize a Document to the tagged format (round-trip safe)."""
    lines: list[str] = []
    seg_starts = {s.token_span[0]: s for s in doc.segments}
    page_iter = iter(sorted(doc.pages, key=lambda p: (p.token_span[0], p.number)))
    next_page = next(page_iter, None)
    for i in range(len(doc.tokens) + 1):
        while next_page is not None and next_page.token_span[0] == i:
            lines.append(f"##PAGE {next_page.number}")
            next_page = next(page_iter, None)
        if i == len(doc.tokens):
            break
        seg = seg_starts.get(i)
        if seg is not None:
            lines.append(f"##SEG {seg.kind} {seg.depth}")
        tok = doc.tokens[i]
        if tok.emphasis:
            lines.append(f"{tok.surface}\t{tok.lemma}\t{tok.pos}\tE")
        else:
            lines.append(f"{tok.surface}\t{tok.lemma}\t{tok.pos}")
    return "\n".join(lines) + "\n"
