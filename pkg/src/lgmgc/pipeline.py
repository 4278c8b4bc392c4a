"""Wiring from a corpus to a searchable index.

The CLI and the evaluation harness both run the same three steps: parent
chunking per document, optional subdivision into retrieval units, and
embedding every unit into a vector store.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from .config import PipelineConfig
from .corpus import Corpus
from .granularity import GranularIndex, build_index
from .logits import LGConfig, lg_parent_chunks
from .providers import EmbeddingProvider, LogitsProvider
from .retrieval import VectorStore, embed
from .segmentation import Chunk, chunk_text, paragraph_chunk, recursive_chunk

__all__ = ["parent_chunks", "build_pipeline_index", "embed_index"]


def parent_chunks(
    doc_id: str,
    corpus: Corpus,
    cfg: PipelineConfig,
    logits_provider: LogitsProvider | None = None,
) -> list[Chunk]:
    """Parent chunks for one document under the configured chunker."""
    doc = corpus[doc_id]
    spans = corpus.sentences(doc_id)
    if cfg.chunker == "paragraph":
        return paragraph_chunk(doc, spans=spans)
    if cfg.logits_parents:
        if logits_provider is None:
            raise ValueError(f"chunker {cfg.chunker!r} needs a logits provider")
        lg_cfg = LGConfig(
            theta=cfg.theta,
            stop_threshold=cfg.stop_threshold,
            window_cap=cfg.window_cap,
        )
        return lg_parent_chunks(doc, lg_cfg, logits_provider, spans=spans)
    return recursive_chunk(doc, cfg.theta, spans=spans)


def build_pipeline_index(
    corpus: Corpus,
    cfg: PipelineConfig,
    logits_provider: LogitsProvider | None = None,
    jobs: int | None = None,
) -> GranularIndex:
    """Chunk every document and assemble the retrieval index.

    Documents are chunked independently, so with ``jobs > 1`` they run on a
    thread pool (useful when each window is a provider round trip).  Results
    are reassembled in corpus order either way.
    """
    doc_ids = list(corpus)
    workers = jobs if jobs is not None else cfg.jobs
    if workers > 1 and len(doc_ids) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_doc = list(
                pool.map(lambda d: parent_chunks(d, corpus, cfg, logits_provider), doc_ids)
            )
    else:
        per_doc = [parent_chunks(d, corpus, cfg, logits_provider) for d in doc_ids]
    parents = [chunk for chunks in per_doc for chunk in chunks]
    if cfg.multi_granular:
        return build_index(parents, cfg.theta, corpus)
    return GranularIndex(parents=parents)


def embed_index(
    index: GranularIndex,
    corpus: Corpus,
    provider: EmbeddingProvider,
) -> VectorStore:
    """Embed every retrieval unit (parents and children) into a frozen store."""
    units = index.units()
    texts = [chunk_text(u, corpus) for u in units]
    vectors = embed(provider, texts)
    store = VectorStore(dimension=len(vectors[0]))
    for unit, vec in zip(units, vectors):
        store.add(unit.chunk_id, vec)
    return store.freeze()
