"""Evaluation: gold relabeling, rank metrics, and answer F1.

Evidence strings in benchmark files rarely match chunk boundaries, so each
query's gold is relabeled to the parent chunk with the highest ROUGE-L F
score against the evidence.  Rank metrics (DCG@k, Recall@k) are computed on
the retriever's full parent ranking; answer quality uses the token-level F1
common to extractive QA benchmarks.
"""

from __future__ import annotations

import math
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Corpus
from .errors import EmptyEvaluation, MalformedRecord
from .granularity import GranularIndex, canonical_json, score_parents, top_k_parents
from .kernels import lcs_length
from .providers import EmbeddingProvider, GenerationProvider
from .retrieval import VectorStore, assemble_context, embed, retrieve, _query_text
from .segmentation import Chunk, chunk_text

import json

__all__ = [
    "rouge_l_f",
    "relabel_gold",
    "dcg_at_k",
    "recall_at_k",
    "qa_f1",
    "RetrievalExample",
    "AnswerExample",
    "load_retrieval_examples",
    "load_answer_examples",
    "QueryResult",
    "EvalReport",
    "evaluate_retrieval",
    "evaluate_qa",
    "render_report",
    "mean_std",
    "QA_PROMPT_TEMPLATE",
    "DEFAULT_K_LIST",
]

DEFAULT_K_LIST = (1, 2, 5, 10, 20)

QA_PROMPT_TEMPLATE = "{context}\n\nQuestion: {question}\nAnswer:"


# ---------------------------------------------------------------------------
# ROUGE-L


def _rouge_tokens(text: str) -> list[str]:
    return text.lower().split()


def _token_ids(a: list[str], b: list[str]) -> tuple[list[int], list[int]]:
    # lcs_length wants ints; map tokens through a shared vocabulary
    vocab: dict[str, int] = {}
    for tok in a:
        if tok not in vocab:
            vocab[tok] = len(vocab)
    for tok in b:
        if tok not in vocab:
            vocab[tok] = len(vocab)
    return [vocab[t] for t in a], [vocab[t] for t in b]


def rouge_l_f(candidate: str, reference: str) -> float:
    """ROUGE-L F-measure (beta=1) over lowercased whitespace tokens.

    Returns 0.0 when either side has no tokens.
    """
    cand = _rouge_tokens(candidate)
    ref = _rouge_tokens(reference)
    if not cand or not ref:
        return 0.0
    ids_a, ids_b = _token_ids(cand, ref)
    lcs = lcs_length(ids_a, ids_b)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 2.0 * precision * recall / (precision + recall)


def relabel_gold(evidence: str, parents: Sequence[Chunk], corpus: Corpus) -> Chunk:
    """Parent with the highest ROUGE-L F against ``evidence``.

    Ties go to the parent earlier in document order (the order of
    ``parents``), so relabeling is deterministic.
    """
    if not parents:
        raise EmptyEvaluation("no parent chunks to relabel against")
    best = parents[0]
    best_score = -1.0
    for parent in parents:
        score = rouge_l_f(chunk_text(parent, corpus), evidence)
        if score > best_score:
            best, best_score = parent, score
    return best


# ---------------------------------------------------------------------------
# Rank metrics


def dcg_at_k(ranks: Sequence[int | None], k: int) -> float:
    """Mean discounted gain of the single gold chunk, scaled to [0, 100].

    Each query contributes 1/log2(rank+1) when its gold ranks within the
    top k and 0 otherwise; ``None`` means the gold was never retrieved.
    """
    if not ranks:
        raise EmptyEvaluation("no ranks to aggregate")
    total = 0.0
    for rank in ranks:
        if rank is not None and rank <= k:
            total += 1.0 / math.log2(rank + 1)
    return 100.0 * total / len(ranks)


def recall_at_k(ranks: Sequence[int | None], k: int) -> float:
    """Percentage of queries whose gold chunk ranks within the top k."""
    if not ranks:
        raise EmptyEvaluation("no ranks to aggregate")
    hits = sum(1 for rank in ranks if rank is not None and rank <= k)
    return 100.0 * hits / len(ranks)


# ---------------------------------------------------------------------------
# Answer F1


_ARTICLES_RE = re.compile(r"\b(a|an|the)\b")
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def _normalize_answer(text: str) -> list[str]:
    text = text.lower()
    text = _ARTICLES_RE.sub(" ", text)
    text = text.translate(_PUNCT_TABLE)
    return text.split()


def _f1_single(pred: list[str], gold: list[str]) -> float:
    if not pred or not gold:
        return 1.0 if pred == gold else 0.0
    common = Counter(pred) & Counter(gold)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred)
    recall = overlap / len(gold)
    return 2.0 * precision * recall / (precision + recall)


def qa_f1(prediction: str, gold_answers: Sequence[str]) -> float:
    """Token F1 of the prediction against its best-matching gold answer.

    Both strings are lowercased, stripped of punctuation and the articles
    a/an/the, then compared as token multisets.  Two empty normalizations
    count as a perfect match.
    """
    if not gold_answers:
        raise EmptyEvaluation("no gold answers")
    pred = _normalize_answer(prediction)
    return max(_f1_single(pred, _normalize_answer(g)) for g in gold_answers)


# ---------------------------------------------------------------------------
# Example records


@dataclass(frozen=True)
class RetrievalExample:
    query_id: str
    question: str
    evidence: str
    doc_id: str


@dataclass(frozen=True)
class AnswerExample:
    query_id: str
    question: str
    answers: tuple[str, ...]
    doc_id: str


def _load_jsonl(path: str | Path) -> list[tuple[int, dict]]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise MalformedRecord(f"{path}:{lineno}: expected an object")
            records.append((lineno, obj))
    if not records:
        raise EmptyEvaluation(f"{path}: no examples")
    return records


def _require(obj: dict, key: str, path, lineno: int) -> object:
    if key not in obj:
        raise MalformedRecord(f"{path}:{lineno}: missing field {key!r}")
    return obj[key]


def load_retrieval_examples(path: str | Path) -> list[RetrievalExample]:
    """Read JSONL records with question, evidence, and doc_id fields."""
    examples = []
    for lineno, obj in _load_jsonl(path):
        examples.append(
            RetrievalExample(
                query_id=str(obj.get("id", f"q{lineno:04d}")),
                question=str(_require(obj, "question", path, lineno)),
                evidence=str(_require(obj, "evidence", path, lineno)),
                doc_id=str(_require(obj, "doc_id", path, lineno)),
            )
        )
    return examples


def load_answer_examples(path: str | Path) -> list[AnswerExample]:
    """Read JSONL records with question, answers, and doc_id fields."""
    examples = []
    for lineno, obj in _load_jsonl(path):
        answers = _require(obj, "answers", path, lineno)
        if not isinstance(answers, list) or not answers:
            raise MalformedRecord(f"{path}:{lineno}: answers must be a non-empty list")
        examples.append(
            AnswerExample(
                query_id=str(obj.get("id", f"q{lineno:04d}")),
                question=str(_require(obj, "question", path, lineno)),
                answers=tuple(str(a) for a in answers),
                doc_id=str(_require(obj, "doc_id", path, lineno)),
            )
        )
    return examples


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class QueryResult:
    query_id: str
    gold_chunk_id: str | None = None
    rank: int | None = None
    f1: float | None = None


@dataclass(frozen=True)
class EvalReport:
    num_queries: int
    per_query: tuple[QueryResult, ...]
    dcg_at: Mapping[int, float] = field(default_factory=dict)
    recall_at: Mapping[int, float] = field(default_factory=dict)
    f1_mean: float | None = None
    config: Mapping[str, object] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "num_queries": self.num_queries,
            "per_query": [
                {
                    "query_id": q.query_id,
                    "gold_chunk_id": q.gold_chunk_id,
                    "rank": q.rank,
                    "f1": q.f1,
                }
                for q in self.per_query
            ],
            "dcg_at": {str(k): v for k, v in self.dcg_at.items()},
            "recall_at": {str(k): v for k, v in self.recall_at.items()},
            "f1_mean": self.f1_mean,
            "config": dict(self.config),
        }
        return canonical_json(payload)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        payload = json.loads(text)
        return cls(
            num_queries=payload["num_queries"],
            per_query=tuple(QueryResult(**q) for q in payload["per_query"]),
            dcg_at={int(k): v for k, v in payload["dcg_at"].items()},
            recall_at={int(k): v for k, v in payload["recall_at"].items()},
            f1_mean=payload["f1_mean"],
            config=payload["config"],
        )


def _full_ranking_rank(
    index: GranularIndex,
    store: VectorStore,
    query_vec: Sequence[float],
    gold_chunk_id: str,
) -> int:
    scores = store.unit_scores(query_vec, index.unit_ids())
    ranking = top_k_parents(score_parents(index, scores), len(index.parents))
    for position, sp in enumerate(ranking, start=1):
        if sp.parent.chunk_id == gold_chunk_id:
            return position
    raise EmptyEvaluation(f"gold chunk {gold_chunk_id!r} missing from ranking")


def evaluate_retrieval(
    examples: Sequence[RetrievalExample],
    index: GranularIndex,
    store: VectorStore,
    provider: EmbeddingProvider,
    corpus: Corpus,
    k_list: Sequence[int] = DEFAULT_K_LIST,
    config: Mapping[str, object] | None = None,
) -> EvalReport:
    """Rank the gold chunk for every query and aggregate DCG/Recall."""
    if not examples:
        raise EmptyEvaluation("no retrieval examples")
    per_query = []
    ranks: list[int | None] = []
    for ex in examples:
        doc_parents = [p for p in index.parents if p.doc_id == ex.doc_id]
        gold = relabel_gold(ex.evidence, doc_parents, corpus)
        query_vec = embed(provider, [_query_text(provider, ex.question)])[0]
        rank = _full_ranking_rank(index, store, query_vec, gold.chunk_id)
        ranks.append(rank)
        per_query.append(
            QueryResult(query_id=ex.query_id, gold_chunk_id=gold.chunk_id, rank=rank)
        )
    return EvalReport(
        num_queries=len(examples),
        per_query=tuple(per_query),
        dcg_at={k: dcg_at_k(ranks, k) for k in k_list},
        recall_at={k: recall_at_k(ranks, k) for k in k_list},
        config=dict(config or {}),
    )


def evaluate_qa(
    examples: Sequence[AnswerExample],
    index: GranularIndex,
    store: VectorStore,
    provider: EmbeddingProvider,
    generator: GenerationProvider,
    corpus: Corpus,
    k: int = 5,
    context_cap: int = 1500,
    max_answer_words: int = 64,
    config: Mapping[str, object] | None = None,
) -> EvalReport:
    """Retrieve, assemble a context, generate an answer, score token F1."""
    if not examples:
        raise EmptyEvaluation("no answer examples")
    per_query = []
    scores = []
    for ex in examples:
        ranking = retrieve(ex.question, index, store, provider, k)
        context = assemble_context(ranking, corpus, context_cap)
        prompt = QA_PROMPT_TEMPLATE.format(context=context.text, question=ex.question)
        prediction = generator.generate(prompt, max_answer_words)
        score = qa_f1(prediction, ex.answers)
        scores.append(score)
        per_query.append(QueryResult(query_id=ex.query_id, f1=score))
    return EvalReport(
        num_queries=len(examples),
        per_query=tuple(per_query),
        f1_mean=sum(scores) / len(scores),
        config=dict(config or {}),
    )


def render_report(report: EvalReport) -> str:
    """Plain-text table of the aggregate metrics."""
    lines = [f"queries: {report.num_queries}"]
    if report.dcg_at:
        lines.append(f"{'k':>4}  {'DCG@k':>8}  {'Recall@k':>8}")
        for k in sorted(report.dcg_at):
            lines.append(f"{k:>4}  {report.dcg_at[k]:>8.2f}  {report.recall_at[k]:>8.2f}")
    if report.f1_mean is not None:
        lines.append(f"answer F1 (mean): {report.f1_mean:.4f}")
    return "\n".join(lines) + "\n"


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Sample mean and standard deviation (ddof=1; a single value has std 0)."""
    if not values:
        raise EmptyEvaluation("no values to aggregate")
    m = sum(values) / len(values)
    if len(values) == 1:
        return m, 0.0
    var = sum((x - m) ** 2 for x in values) / (len(values) - 1)
    return m, math.sqrt(var)
