"""Logits-guided multi-granular chunking and retrieval for long documents.

The package splits documents into sentence-aligned chunks (recursively, by
paragraph, or at points where a language model judges the text complete),
indexes each parent chunk together with finer-grained children, retrieves
parents by the best score across their units, and evaluates the result with
rank metrics and answer F1.
"""

from .config import PipelineConfig, build_providers, config_echo, load_config
from .corpus import Corpus, ingest_corpus, normalize_text
from .errors import (
    ConfigError,
    DataError,
    DegenerateVector,
    DuplicateDocId,
    EmptyEvaluation,
    EmptyInput,
    EmptyRanking,
    IncompleteScores,
    InvalidK,
    InvalidParent,
    LgmgcError,
    MalformedRecord,
    MissingDocument,
    NoCandidates,
    ProviderError,
    ProviderProtocolError,
    ProviderUnavailable,
    StaleVectorStore,
)
from .evaluation import (
    AnswerExample,
    EvalReport,
    QueryResult,
    RetrievalExample,
    dcg_at_k,
    evaluate_qa,
    evaluate_retrieval,
    load_answer_examples,
    load_retrieval_examples,
    mean_std,
    qa_f1,
    recall_at_k,
    relabel_gold,
    render_report,
    rouge_l_f,
)
from .granularity import (
    GranularIndex,
    ScoredParent,
    build_index,
    canonical_json,
    index_file_hash,
    load_index,
    save_index,
    score_parents,
    top_k_parents,
)
from .kernels import LCS_BACKEND, lcs_length
from .logits import BreakCandidate, LGConfig, eos_scores, lg_parent_chunks, logits_chunk, select_break
from .pipeline import build_pipeline_index, embed_index, parent_chunks
from .providers import (
    EmbeddingProviderSpec,
    ExtractiveGenerator,
    GenerationProviderSpec,
    HashEmbedder,
    HashLogitsProvider,
    HttpEmbeddingClient,
    HttpGenerationClient,
    HttpLogitsClient,
    LogitsProviderSpec,
    ReplayLogitsProvider,
    ScriptedLogitsProvider,
)
from .retrieval import AssembledContext, VectorStore, assemble_context, cosine, embed, retrieve
from .segmentation import (
    Chunk,
    ChunkLevel,
    ChunkerConfig,
    Document,
    SentenceSpan,
    chunk_text,
    paragraph_chunk,
    recursive_chunk,
    split_sentences,
    word_count,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "LCS_BACKEND",
    # segmentation
    "Document",
    "SentenceSpan",
    "Chunk",
    "ChunkLevel",
    "ChunkerConfig",
    "split_sentences",
    "recursive_chunk",
    "paragraph_chunk",
    "chunk_text",
    "word_count",
    # logits-guided chunking
    "LGConfig",
    "BreakCandidate",
    "eos_scores",
    "select_break",
    "logits_chunk",
    "lg_parent_chunks",
    # corpus
    "Corpus",
    "ingest_corpus",
    "normalize_text",
    # granularity
    "GranularIndex",
    "ScoredParent",
    "build_index",
    "score_parents",
    "top_k_parents",
    "save_index",
    "load_index",
    "index_file_hash",
    "canonical_json",
    # retrieval
    "VectorStore",
    "AssembledContext",
    "embed",
    "cosine",
    "retrieve",
    "assemble_context",
    # evaluation
    "rouge_l_f",
    "relabel_gold",
    "dcg_at_k",
    "recall_at_k",
    "qa_f1",
    "RetrievalExample",
    "AnswerExample",
    "QueryResult",
    "EvalReport",
    "load_retrieval_examples",
    "load_answer_examples",
    "evaluate_retrieval",
    "evaluate_qa",
    "render_report",
    "mean_std",
    # pipeline and config
    "PipelineConfig",
    "load_config",
    "build_providers",
    "config_echo",
    "parent_chunks",
    "build_pipeline_index",
    "embed_index",
    # providers
    "LogitsProviderSpec",
    "EmbeddingProviderSpec",
    "GenerationProviderSpec",
    "HttpLogitsClient",
    "HttpEmbeddingClient",
    "HttpGenerationClient",
    "ScriptedLogitsProvider",
    "ReplayLogitsProvider",
    "HashLogitsProvider",
    "HashEmbedder",
    "ExtractiveGenerator",
    # errors
    "LgmgcError",
    "ConfigError",
    "ProviderError",
    "DataError",
    "EmptyInput",
    "MissingDocument",
    "DuplicateDocId",
    "MalformedRecord",
    "StaleVectorStore",
    "ProviderUnavailable",
    "ProviderProtocolError",
    "InvalidK",
    "NoCandidates",
    "IncompleteScores",
    "DegenerateVector",
    "EmptyRanking",
    "InvalidParent",
    "EmptyEvaluation",
]
