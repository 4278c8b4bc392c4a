"""Break-point selection by end-of-sequence probability.

A document is turned into a stream of fixed-size feed chunks; each window
(carry-over remainder plus the next feed chunk) is scored sentence prefix by
sentence prefix, and the window is cut where the provider's EOS token is most
probable.  Only the argmax of the scores is consumed, so any strictly
monotone transform of the EOS probability (raw logit, log-probability,
probability) is an acceptable provider output.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .errors import NoCandidates, ProviderError, ProviderProtocolError
from .providers import _DEFAULT_PROMPT, LogitsProvider
from .segmentation import (
    Chunk,
    ChunkLevel,
    DEFAULT_HIERARCHY,
    Document,
    SentenceSpan,
    split_sentences,
)
from .segmentation import _gap_breaks, _pack_ranges, _word_prefix

__all__ = ["LGConfig", "BreakCandidate", "eos_scores", "select_break", "logits_chunk", "lg_parent_chunks"]


@dataclass(frozen=True)
class LGConfig:
    """Window sizing for the logits-guided loop.

    ``theta`` is the feed size, ``stop_threshold`` ends the loop once the
    stream is exhausted and the window is small enough (default: theta), and
    ``window_cap`` bounds emitted chunks via a forced, provider-free split
    (default: 2 * theta).
    """

    theta: int
    stop_threshold: int | None = None
    window_cap: int | None = None

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.stop_threshold is None:
            object.__setattr__(self, "stop_threshold", self.theta)
        if self.window_cap is None:
            object.__setattr__(self, "window_cap", 2 * self.theta)
        if not (self.stop_threshold <= self.theta <= self.window_cap <= 2 * self.theta):
            raise ValueError(
                "require stop_threshold <= theta <= window_cap <= 2*theta, got "
                f"{self.stop_threshold} / {self.theta} / {self.window_cap}"
            )


@dataclass(frozen=True)
class BreakCandidate:
    """EOS score for the window prefix ending at 1-based ``sentence_index``."""

    sentence_index: int
    eos_score: float


def eos_scores(
    provider: LogitsProvider, prompt: str, sentence_prefixes: Sequence[str]
) -> list[BreakCandidate]:
    """Score every sentence prefix of a window in one batched provider call.

    Raises:
        ProviderProtocolError: wrong score count or a non-finite score.
    """
    if not sentence_prefixes:
        raise ValueError("at least one sentence prefix is required")
    scores = provider.eos_scores(prompt, list(sentence_prefixes))
    if len(scores) != len(sentence_prefixes):
        raise ProviderProtocolError(
            f"provider returned {len(scores)} scores for {len(sentence_prefixes)} prefixes"
        )
    candidates = []
    for i, score in enumerate(scores, start=1):
        if not math.isfinite(score):
            raise ProviderProtocolError(f"non-finite EOS score {score!r} at prefix {i}")
        candidates.append(BreakCandidate(sentence_index=i, eos_score=float(score)))
    return candidates


def select_break(candidates: Sequence[BreakCandidate]) -> int:
    """Argmax sentence index; ties break toward the largest index."""
    if not candidates:
        raise NoCandidates("cannot select a break point from zero candidates")
    best = candidates[0]
    for cand in candidates[1:]:
        if cand.eos_score >= best.eos_score:
            best = cand
    return best.sentence_index


def _forced_break(prefix: Sequence[int], lo: int, hi: int, cap: int) -> int:
    """Largest j with sentences [lo, j) within ``cap`` words; at least lo+1."""
    j = lo + 1
    for cand in range(lo + 2, hi + 1):
        if prefix[cand] - prefix[lo] <= cap:
            j = cand
        else:
            break
    return j


def logits_chunk(
    doc: Document,
    cfg: LGConfig,
    provider: LogitsProvider,
    prompt: str | None = None,
    spans: Sequence[SentenceSpan] | None = None,
    hierarchy: Sequence[str] | None = None,
) -> list[Chunk]:
    """Segment ``doc`` into variable-size, semantically cut chunks.

    The loop feeds ``theta``-word recursive chunks; each window is the
    carried remainder plus the next feed chunk.  Once the stream is exhausted
    and the window falls below ``stop_threshold`` it is emitted as the final
    chunk, so no text is ever dropped.  Windows over ``window_cap`` are cut at
    the last sentence boundary within the cap without a provider call, which
    bounds both chunk size and the carried remainder.

    Provider failures abort the document with a diagnostic naming the window.
    """
    if prompt is None:
        prompt = getattr(getattr(provider, "spec", None), "prompt", None) or _DEFAULT_PROMPT
    if hierarchy is None:
        hierarchy = DEFAULT_HIERARCHY
    if spans is None:
        spans = split_sentences(doc.text)
    prefix = _word_prefix(spans)
    level_breaks = [_gap_breaks(doc.text, spans, sep) for sep in hierarchy]
    feed = deque(_pack_ranges(prefix, level_breaks, 0, len(spans), cfg.theta, 0))

    chunks: list[Chunk] = []

    def emit(a: int, b: int) -> None:
        chunks.append(
            Chunk(
                doc_id=doc.id,
                start=spans[a].start,
                end=spans[b - 1].end,
                word_count=prefix[b] - prefix[a],
                level=ChunkLevel.PARENT,
            )
        )

    rem: tuple[int, int] | None = None
    while True:
        if feed:
            nxt_lo, nxt_hi = feed.popleft()
            # The remainder always abuts the next feed chunk, so the window
            # stays a contiguous sentence range of the document.
            assert rem is None or rem[1] == nxt_lo
            lo = rem[0] if rem is not None else nxt_lo
            hi = nxt_hi
        elif rem is not None:
            lo, hi = rem
        else:
            break
        rem = None
        window_wc = prefix[hi] - prefix[lo]
        if not feed and window_wc < cfg.stop_threshold:
            emit(lo, hi)
            break
        if window_wc > cfg.window_cap:
            cut = _forced_break(prefix, lo, hi, cfg.window_cap)
        else:
            prefixes = [doc.text[spans[lo].start : spans[j].end] for j in range(lo, hi)]
            try:
                candidates = eos_scores(provider, prompt, prefixes)
            except ProviderError as exc:
                raise type(exc)(
                    f"document {doc.id!r}, window sentences [{lo}, {hi}): {exc}"
                ) from exc
            cut = lo + select_break(candidates)
        emit(lo, cut)
        if cut < hi:
            rem = (cut, hi)
    return chunks


def lg_parent_chunks(
    doc: Document,
    cfg: LGConfig,
    provider: LogitsProvider,
    prompt: str | None = None,
    spans: Sequence[SentenceSpan] | None = None,
) -> list[Chunk]:
    """Logits-guided chunks tagged as parents for the multi-granular index."""
    return logits_chunk(doc, cfg, provider, prompt=prompt, spans=spans)
