"""Small-to-big index: parent chunks, finer child chunks, group-max scoring.

Each parent is subdivided with the same separator-hierarchy chunker into
half-budget and quarter-budget children (floor division of the parent
budget), so the method composes identically whether parents come from the
fixed-size chunker or the logits-guided chunker.  A parent's retrieval score
is the maximum over the parent itself and all of its children.
"""

from __future__ import annotations

import hashlib
import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Corpus
from .errors import IncompleteScores, InvalidK, InvalidParent
from .segmentation import (
    Chunk,
    ChunkLevel,
    DEFAULT_HIERARCHY,
    Document,
    chunk_sentence_range,
)

__all__ = [
    "GranularIndex",
    "ScoredParent",
    "build_index",
    "score_parents",
    "top_k_parents",
    "save_index",
    "load_index",
    "index_file_hash",
]

SCHEMA_VERSION = 1


@dataclass
class GranularIndex:
    """Parents, children, and the child -> parent links.

    ``children_of`` is derived once so group-max scoring does not rebuild
    the grouping per query.  An index with no children degrades cleanly to
    plain single-granularity retrieval (every group is just the parent).
    """

    parents: list[Chunk]
    children: list[Chunk] = field(default_factory=list)
    parent_of: dict[str, str] = field(default_factory=dict)
    children_of: dict[str, list[Chunk]] = field(init=False)

    def __post_init__(self):
        self.children_of = {p.chunk_id: [] for p in self.parents}
        for child in self.children:
            self.children_of[self.parent_of[child.chunk_id]].append(child)

    def unit_ids(self) -> list[str]:
        """Ids of every retrieval unit: all parents and all children."""
        return [c.chunk_id for c in self.parents] + [c.chunk_id for c in self.children]

    def units(self) -> list[Chunk]:
        return list(self.parents) + list(self.children)


@dataclass(frozen=True)
class ScoredParent:
    """A parent with its propagated (group-max) similarity score."""

    parent: Chunk
    score: float
    best_unit_id: str


def _sentence_range(doc: Document, corpus: Corpus, chunk: Chunk) -> tuple[int, int]:
    """Indices of the sentence spans covered by ``chunk``."""
    spans = corpus.sentences(doc.id)
    starts = [s.start for s in spans]
    ends = [s.end for s in spans]
    lo = bisect_left(starts, chunk.start)
    hi = bisect_right(ends, chunk.end)
    return lo, hi


def build_index(
    parents: Sequence[Chunk],
    theta: int,
    corpus: Corpus,
    hierarchy: Sequence[str] | None = None,
) -> GranularIndex:
    """Subdivide each parent into half- and quarter-budget children.

    Children are derived from the parent spans, never re-chunked from the
    raw document, so every child is contained in exactly one parent.  A
    single sentence larger than a child budget is kept whole.

    Raises:
        InvalidParent: a parent covers no sentence spans.
    """
    if hierarchy is None:
        hierarchy = DEFAULT_HIERARCHY
    children: list[Chunk] = []
    parent_of: dict[str, str] = {}
    budgets = (
        (ChunkLevel.CHILD_HALF, max(1, theta // 2)),
        (ChunkLevel.CHILD_QUARTER, max(1, theta // 4)),
    )
    for parent in parents:
        doc = corpus[parent.doc_id]
        lo, hi = _sentence_range(doc, corpus, parent)
        if hi <= lo:
            raise InvalidParent(f"parent {parent.chunk_id} contains no sentences")
        spans = corpus.sentences(doc.id)
        for level, budget in budgets:
            for child in chunk_sentence_range(doc, spans, lo, hi, budget, hierarchy, level):
                children.append(child)
                parent_of[child.chunk_id] = parent.chunk_id
    return GranularIndex(parents=list(parents), children=children, parent_of=parent_of)


def score_parents(
    index: GranularIndex, unit_scores: Mapping[str, float]
) -> list[ScoredParent]:
    """Propagate unit scores to parents by group max.

    The group of a parent is the parent itself plus all of its children;
    ``best_unit_id`` records which unit achieved the max (the parent wins exact
    ties, then earlier children).  Results follow index order, one entry per
    parent.

    Raises:
        IncompleteScores: any parent or child id is missing from the map.
    """
    scored = []
    for parent in index.parents:
        best_id = parent.chunk_id
        try:
            best = unit_scores[parent.chunk_id]
            for child in index.children_of[parent.chunk_id]:
                value = unit_scores[child.chunk_id]
                if value > best:
                    best, best_id = value, child.chunk_id
        except KeyError as exc:
            raise IncompleteScores(f"no score for unit {exc.args[0]!r}") from None
        scored.append(ScoredParent(parent=parent, score=best, best_unit_id=best_id))
    return scored


def top_k_parents(scored: Sequence[ScoredParent], k: int) -> list[ScoredParent]:
    """The k highest-scoring parents, descending; ties keep input order.

    ``score_parents`` emits parents in document order, so ties resolve to the
    earlier span.  Duplicate parents are dropped (best occurrence kept).  If
    fewer than k distinct parents exist, all are returned.
    """
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    ranked = sorted(scored, key=lambda sp: -sp.score)
    out = []
    seen = set()
    for sp in ranked:
        if sp.parent.chunk_id in seen:
            continue
        seen.add(sp.parent.chunk_id)
        out.append(sp)
        if len(out) == k:
            break
    return out


def _chunk_to_dict(chunk: Chunk) -> dict:
    return {
        "doc_id": chunk.doc_id,
        "start": chunk.start,
        "end": chunk.end,
        "word_count": chunk.word_count,
        "level": chunk.level.value,
    }


def _chunk_from_dict(data: dict) -> Chunk:
    return Chunk(
        doc_id=data["doc_id"],
        start=data["start"],
        end=data["end"],
        word_count=data["word_count"],
        level=ChunkLevel(data["level"]),
    )


def canonical_json(obj) -> str:
    """Stable serialization used for all persisted artifacts."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def save_index(
    path: str | Path,
    index: GranularIndex,
    corpus: Corpus,
    config_echo: Mapping[str, object],
) -> str:
    """Write the versioned index JSON; returns the file's content hash."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": dict(config_echo),
        "documents": [{"id": d.id, "text": d.text} for d in corpus.documents],
        "parents": [_chunk_to_dict(c) for c in index.parents],
        "children": [_chunk_to_dict(c) for c in index.children],
        "parent_of": dict(index.parent_of),
    }
    data = canonical_json(payload)
    Path(path).write_text(data, encoding="utf-8")
    return hashlib.sha256(data.encode("utf-8")).hexdigest()


def load_index(path: str | Path) -> tuple[Corpus, GranularIndex, dict]:
    """Load an index file; returns (corpus, index, config echo)."""
    raw = Path(path).read_text(encoding="utf-8")
    payload = json.loads(raw)
    corpus = Corpus(Document(id=d["id"], text=d["text"]) for d in payload["documents"])
    index = GranularIndex(
        parents=[_chunk_from_dict(c) for c in payload["parents"]],
        children=[_chunk_from_dict(c) for c in payload["children"]],
        parent_of=dict(payload["parent_of"]),
    )
    return corpus, index, payload.get("config", {})


def index_file_hash(path: str | Path) -> str:
    """Content hash pairing a vector store with the exact index file."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
