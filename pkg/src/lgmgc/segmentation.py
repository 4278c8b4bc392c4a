"""Sentence segmentation and separator-hierarchy chunking.

Words are whitespace-delimited tokens throughout (``str.split()``), and all
character offsets count Unicode scalar values.  Sentences are atomic: no
chunker in this package ever places a boundary inside a sentence, so a chunk
is always a contiguous run of sentence spans and its text is a verbatim slice
of the source document.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .errors import EmptyInput, MissingDocument

__all__ = [
    "ChunkLevel",
    "Document",
    "SentenceSpan",
    "Chunk",
    "ChunkerConfig",
    "DEFAULT_HIERARCHY",
    "word_count",
    "load_abbreviations",
    "split_sentences",
    "recursive_chunk",
    "paragraph_chunk",
    "chunk_text",
]

#: Separator levels tried coarsest-first; anything finer than a sentence is a
#: no-op because sentences are never divided.
DEFAULT_HIERARCHY: tuple[str, ...] = ("\n\n", "\n", " ")

# A blank line: two newlines with nothing but spaces/tabs between them.
_BLANK_LINE_RE = re.compile(r"\n[^\S\n]*\n")

# Terminator run plus any closing quotes/brackets attached to it.
_TERMINATOR_RE = re.compile(r"[.!?]+[\"'\)\]’”]*")

_OPENING = "\"'([‘“"


def word_count(text: str) -> int:
    """Number of whitespace-delimited tokens in ``text``."""
    return len(text.split())


class ChunkLevel(str, Enum):
    PARENT = "parent"
    CHILD_HALF = "child_half"
    CHILD_QUARTER = "child_quarter"


@dataclass(frozen=True)
class Document:
    """A source document identified by ``id`` within its corpus."""

    id: str
    text: str
    word_count: int = field(default=-1)

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")
        if not self.text.strip():
            raise EmptyInput(f"document {self.id!r} has no text")
        if self.word_count < 0:
            object.__setattr__(self, "word_count", word_count(self.text))


@dataclass(frozen=True)
class SentenceSpan:
    """Half-open character span ``[start, end)`` of one sentence."""

    start: int
    end: int
    word_count: int


@dataclass(frozen=True)
class Chunk:
    """A sentence-aligned span of one document.

    ``chunk_id`` is deterministic, so identical inputs always produce
    identical ids across runs and processes.
    """

    doc_id: str
    start: int
    end: int
    word_count: int
    level: ChunkLevel = ChunkLevel.PARENT

    @property
    def chunk_id(self) -> str:
        return f"{self.doc_id}:{self.start}-{self.end}:{self.level.value}"


@dataclass(frozen=True)
class ChunkerConfig:
    """Size budget and separator hierarchy for the fixed-size chunkers."""

    theta: int
    separator_hierarchy: tuple[str, ...] = DEFAULT_HIERARCHY
    stop_threshold: int | None = None
    window_cap: int | None = None

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.stop_threshold is not None and self.stop_threshold > self.theta:
            raise ValueError("stop_threshold must be <= theta")
        if self.window_cap is not None and self.window_cap < self.theta:
            raise ValueError("window_cap must be >= theta")


def load_abbreviations(path: str | None = None) -> frozenset[str]:
    """Load the abbreviation guard list (one token per line, UTF-8).

    Tokens are compared case-insensitively against the word preceding a
    candidate period.  ``path=None`` loads the list bundled with the package.
    """
    if path is None:
        data = resources.files("lgmgc.data").joinpath("abbreviations.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            data = fh.read()
    return frozenset(tok.strip().lower() for tok in data.splitlines() if tok.strip())


_DEFAULT_ABBREVIATIONS: frozenset[str] | None = None


def _default_abbreviations() -> frozenset[str]:
    global _DEFAULT_ABBREVIATIONS
    if _DEFAULT_ABBREVIATIONS is None:
        _DEFAULT_ABBREVIATIONS = load_abbreviations()
    return _DEFAULT_ABBREVIATIONS


def _is_abbreviation(text: str, end: int, guard: frozenset[str]) -> bool:
    """True if the word ending at ``end`` (exclusive) is a guarded token."""
    start = end - 1
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start:end].lstrip(_OPENING)
    return token.lower() in guard


def split_sentences(
    text: str, abbreviations: Iterable[str] | None = None
) -> list[SentenceSpan]:
    """Split ``text`` into ordered, non-overlapping sentence spans.

    A sentence ends at a terminal-punctuation run (``.``, ``!``, ``?`` plus
    any closing quotes/brackets) that is followed by whitespace and then an
    upper-case letter, digit, or opening quote, unless the preceding word is
    in the abbreviation guard list.  Newlines always end a sentence.  Spans
    are trimmed, so every non-whitespace character lies in exactly one span.

    Raises:
        EmptyInput: if ``text`` is empty or whitespace-only.
    """
    if not text.strip():
        raise EmptyInput("cannot segment empty or whitespace-only text")
    guard = (
        _default_abbreviations()
        if abbreviations is None
        else frozenset(t.lower() for t in abbreviations)
    )

    cuts = set()
    for i, ch in enumerate(text):
        if ch == "\n":
            cuts.add(i)
    for m in _TERMINATOR_RE.finditer(text):
        end = m.end()
        if end >= len(text) or not text[end].isspace():
            continue
        nxt = end
        while nxt < len(text) and text[nxt].isspace():
            nxt += 1
        if nxt == len(text):
            continue
        head = text[nxt:].lstrip(_OPENING)
        if not head or not (head[0].isupper() or head[0].isdigit()):
            continue
        if "." in m.group() and _is_abbreviation(text, end, guard):
            continue
        cuts.add(end)

    spans: list[SentenceSpan] = []
    boundaries = sorted(cuts | {0, len(text)})
    for lo, hi in zip(boundaries, boundaries[1:]):
        segment = text[lo:hi]
        stripped = segment.strip()
        if not stripped:
            continue
        start = lo + (len(segment) - len(segment.lstrip()))
        end = start + len(stripped)
        spans.append(SentenceSpan(start, end, word_count(stripped)))
    return spans


def _gap_breaks(text: str, spans: Sequence[SentenceSpan], separator: str) -> set[int]:
    """Gap indices g where ``separator`` occurs between spans g and g+1.

    ``"\\n\\n"`` is matched as a blank line (whitespace between the newlines
    allowed), consistent with :func:`paragraph_chunk`.
    """
    breaks = set()
    for g in range(len(spans) - 1):
        gap = text[spans[g].end : spans[g + 1].start]
        if separator == "\n\n":
            if _BLANK_LINE_RE.search(gap):
                breaks.add(g)
        elif separator in gap:
            breaks.add(g)
    return breaks


def _pack_ranges(
    prefix: Sequence[int],
    level_breaks: Sequence[set[int]],
    lo: int,
    hi: int,
    budget: int,
    level: int,
) -> list[tuple[int, int]]:
    """Greedy packing of sentences ``[lo, hi)`` into ranges of <= budget words.

    Units at the current separator level are accumulated while they fit; a
    unit that exceeds the budget is recursed into at the next level.  A single
    sentence over budget is emitted whole.
    """
    if level >= len(level_breaks):
        units = [(i, i + 1) for i in range(lo, hi)]
    else:
        units = []
        a = lo
        for g in range(lo, hi - 1):
            if g in level_breaks[level]:
                units.append((a, g + 1))
                a = g + 1
        units.append((a, hi))

    out: list[tuple[int, int]] = []
    cur: tuple[int, int] | None = None
    for a, b in units:
        unit_wc = prefix[b] - prefix[a]
        if unit_wc > budget and b - a > 1:
            if cur is not None:
                out.append(cur)
                cur = None
            out.extend(_pack_ranges(prefix, level_breaks, a, b, budget, level + 1))
        elif unit_wc > budget:
            if cur is not None:
                out.append(cur)
                cur = None
            out.append((a, b))
        elif cur is not None and prefix[b] - prefix[cur[0]] <= budget:
            cur = (cur[0], b)
        else:
            if cur is not None:
                out.append(cur)
            cur = (a, b)
    if cur is not None:
        out.append(cur)
    return out


def _word_prefix(spans: Sequence[SentenceSpan]) -> list[int]:
    prefix = [0]
    for span in spans:
        prefix.append(prefix[-1] + span.word_count)
    return prefix


def chunk_sentence_range(
    doc: Document,
    spans: Sequence[SentenceSpan],
    lo: int,
    hi: int,
    budget: int,
    hierarchy: Sequence[str],
    level: ChunkLevel,
) -> list[Chunk]:
    """Chunk the sentence range ``[lo, hi)`` of ``doc`` under ``budget`` words.

    Shared by the top-level recursive chunker, the logits-chunker feed stream,
    and child-chunk construction inside parents.
    """
    if hi <= lo:
        return []
    level_breaks = [_gap_breaks(doc.text, spans, sep) for sep in hierarchy]
    prefix = _word_prefix(spans)
    ranges = _pack_ranges(prefix, level_breaks, lo, hi, budget, 0)
    return [
        Chunk(
            doc_id=doc.id,
            start=spans[a].start,
            end=spans[b - 1].end,
            word_count=prefix[b] - prefix[a],
            level=level,
        )
        for a, b in ranges
    ]


def recursive_chunk(
    doc: Document,
    theta: int,
    hierarchy: Sequence[str] | None = None,
    spans: Sequence[SentenceSpan] | None = None,
) -> list[Chunk]:
    """Fixed-size chunking over a separator hierarchy.

    Greedily accumulates units split by the coarsest separator that keeps
    pieces within ``theta`` words, recursing to finer separators for oversize
    pieces.  Every chunk is <= ``theta`` words unless it is a single oversize
    sentence, and every boundary is a sentence boundary.

    ``spans`` may be passed to reuse a cached sentence segmentation.
    """
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if hierarchy is None:
        hierarchy = DEFAULT_HIERARCHY
    if spans is None:
        spans = split_sentences(doc.text)
    return chunk_sentence_range(
        doc, spans, 0, len(spans), theta, hierarchy, ChunkLevel.PARENT
    )


def paragraph_chunk(
    doc: Document, spans: Sequence[SentenceSpan] | None = None
) -> list[Chunk]:
    """One chunk per blank-line-delimited paragraph.

    Runs of blank lines collapse into a single boundary; empty paragraphs
    are skipped (they contain no sentences).
    """
    if spans is None:
        spans = split_sentences(doc.text)
    para_breaks = _gap_breaks(doc.text, spans, "\n\n")
    prefix = _word_prefix(spans)
    chunks = []
    a = 0
    for g in range(len(spans)):
        if g == len(spans) - 1 or g in para_breaks:
            chunks.append(
                Chunk(
                    doc_id=doc.id,
                    start=spans[a].start,
                    end=spans[g].end,
                    word_count=prefix[g + 1] - prefix[a],
                    level=ChunkLevel.PARENT,
                )
            )
            a = g + 1
    return chunks


def chunk_text(chunk: Chunk, corpus: Mapping[str, Document]) -> str:
    """Verbatim text of ``chunk`` from its source document."""
    try:
        doc = corpus[chunk.doc_id]
    except KeyError:
        raise MissingDocument(f"unknown doc_id {chunk.doc_id!r}") from None
    return doc.text[chunk.start : chunk.end]
