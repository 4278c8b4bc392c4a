"""Dense retrieval over the granular index and context assembly.

Search is exhaustive (flat) cosine similarity: corpora here are books or
long documents, where an ANN index would only add moving parts.  The store
is built once, frozen, and is then safe for concurrent readers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .errors import (
    DegenerateVector,
    EmptyInput,
    EmptyRanking,
    IncompleteScores,
    InvalidK,
    ProviderProtocolError,
)
from .granularity import GranularIndex, ScoredParent, score_parents, top_k_parents
from .providers import EmbeddingProvider
from .segmentation import chunk_text

__all__ = [
    "VectorStore",
    "AssembledContext",
    "embed",
    "cosine",
    "retrieve",
    "assemble_context",
]

STORE_SCHEMA_VERSION = 1


def embed(provider: EmbeddingProvider, texts: Sequence[str]) -> list[list[float]]:
    """Embed ``texts``; one vector per text, in order.

    Batching happens inside the provider client (per its configured
    batch_size); this wrapper enforces the count contract.
    """
    if not texts:
        raise EmptyInput("cannot embed an empty list of texts")
    vectors = provider.embed(list(texts))
    if len(vectors) != len(texts):
        raise ProviderProtocolError(
            f"provider returned {len(vectors)} vectors for {len(texts)} texts"
        )
    return vectors


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity in [-1, 1].

    Raises:
        DegenerateVector: either vector has zero norm.
        ValueError: dimension mismatch.
    """
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise DegenerateVector("cosine similarity is undefined for a zero vector")
    value = float(np.dot(a, b)) / (na * nb)
    return max(-1.0, min(1.0, value))


class VectorStore:
    """Frozen chunk_id -> vector map with exhaustive cosine scoring."""

    def __init__(self, dimension: int):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._ids: list[str] = []
        self._index: dict[str, int] = {}
        self._rows: list[list[float]] = []
        self._matrix: np.ndarray | None = None
        self.normalized = False

    def add(self, chunk_id: str, vector: Sequence[float]) -> None:
        if self._matrix is not None:
            raise RuntimeError("store is frozen; no further writes")
        if len(vector) != self.dimension:
            raise ValueError(
                f"vector for {chunk_id!r} has length {len(vector)}, expected {self.dimension}"
            )
        if chunk_id in self._index:
            raise ValueError(f"duplicate chunk_id {chunk_id!r}")
        self._index[chunk_id] = len(self._ids)
        self._ids.append(chunk_id)
        self._rows.append([float(x) for x in vector])

    def freeze(self) -> "VectorStore":
        if self._matrix is None:
            self._matrix = np.asarray(self._rows, dtype=np.float64)
            norms = np.linalg.norm(self._matrix, axis=1) if self._rows else np.array([])
            self.normalized = bool(len(norms) and np.all(np.abs(norms - 1.0) <= 1e-6))
        return self

    def __contains__(self, chunk_id: str) -> bool:
        return chunk_id in self._index

    def __len__(self) -> int:
        return len(self._ids)

    def ids(self) -> list[str]:
        return list(self._ids)

    def vector(self, chunk_id: str) -> np.ndarray:
        if self._matrix is None:
            self.freeze()
        return self._matrix[self._index[chunk_id]]

    def unit_scores(self, query_vec: Sequence[float], unit_ids: Sequence[str]) -> dict[str, float]:
        """Cosine of the query against each requested unit."""
        missing = [uid for uid in unit_ids if uid not in self._index]
        if missing:
            raise IncompleteScores(f"store is missing vectors for {missing[:3]}...")
        return {uid: cosine(self.vector(uid), query_vec) for uid in unit_ids}

    def save(self, path: str | Path, index_hash: str) -> None:
        if self._matrix is None:
            self.freeze()
        payload = {
            "schema_version": STORE_SCHEMA_VERSION,
            "index_hash": index_hash,
            "dimension": self.dimension,
            "normalized": self.normalized,
            "vectors": {cid: self._rows[i] for cid, i in self._index.items()},
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> tuple["VectorStore", str]:
        """Load a store file; returns (store, recorded index hash)."""
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        store = cls(dimension=payload["dimension"])
        for chunk_id in sorted(payload["vectors"]):
            store.add(chunk_id, payload["vectors"][chunk_id])
        store.freeze()
        return store, payload["index_hash"]


def _query_text(provider: EmbeddingProvider, query: str) -> str:
    prefix = getattr(getattr(provider, "spec", None), "query_prefix", "")
    return prefix + query if prefix else query


def retrieve(
    query: str,
    index: GranularIndex,
    store: VectorStore,
    provider: EmbeddingProvider,
    k: int,
) -> list[ScoredParent]:
    """Top-k parents for ``query`` by group-max cosine over all units."""
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    query_vec = embed(provider, [_query_text(provider, query)])[0]
    scores = store.unit_scores(query_vec, index.unit_ids())
    return top_k_parents(score_parents(index, scores), k)


@dataclass(frozen=True)
class AssembledContext:
    """Concatenated parent texts under the synthesizer word cap."""

    text: str
    used_parents: list[str]
    word_count: int


def assemble_context(
    ranking: Sequence[ScoredParent],
    corpus: Corpus,
    context_cap: int = 1500,
) -> AssembledContext:
    """Concatenate ranked parents (blank-line separated) under the cap.

    Parents are taken in rank order and assembly stops before the first one
    that would exceed ``context_cap`` words; separators carry no words.  If
    even the top parent is over the cap, it is truncated at the last sentence
    boundary within the cap (a top parent whose first sentence alone exceeds
    the cap yields an empty context).

    Raises:
        EmptyRanking: ``ranking`` is empty.
    """
    if not ranking:
        raise EmptyRanking("cannot assemble a context from an empty ranking")
    top = ranking[0].parent
    if top.word_count > context_cap:
        spans = corpus.sentences(top.doc_id)
        inside = [s for s in spans if s.start >= top.start and s.end <= top.end]
        total = 0
        last_end = None
        for span in inside:
            if total + span.word_count > context_cap:
                break
            total += span.word_count
            last_end = span.end
        if last_end is None:
            return AssembledContext(text="", used_parents=[], word_count=0)
        text = corpus[top.doc_id].text[top.start : last_end]
        return AssembledContext(
            text=text, used_parents=[top.chunk_id], word_count=total
        )

    parts: list[str] = []
    used: list[str] = []
    total = 0
    for sp in ranking:
        if total + sp.parent.word_count > context_cap:
            break
        parts.append(chunk_text(sp.parent, corpus))
        used.append(sp.parent.chunk_id)
        total += sp.parent.word_count
    return AssembledContext(text="\n\n".join(parts), used_parents=used, word_count=total)
