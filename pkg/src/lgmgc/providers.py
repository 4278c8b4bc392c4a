"""Model providers: HTTP clients and deterministic in-process mocks.

All model access goes through three small duck-typed interfaces so that no
model internals leak into the chunking/retrieval core:

* logits provider:     ``eos_scores(prompt, texts) -> list[float]``
* embedding provider:  ``embed(texts) -> list[list[float]]``
* generation provider: ``generate(prompt, max_words) -> str``

Wire protocol (HTTP, JSON bodies, UTF-8), relative to the configured base
endpoint:

* ``POST /v1/eos_score``  request ``{"prompt": str, "texts": [str, ...]}``,
  response ``{"scores": [number, ...]}``.  ``scores[i]`` is the log
  probability of the provider's end-of-sequence token immediately following
  ``prompt + texts[i]``.
* ``POST /v1/embed``      request ``{"texts": [str, ...]}``, response
  ``{"vectors": [[number, ...], ...]}``.
* ``POST /v1/generate``   request ``{"prompt": str, "max_words": int}``,
  response ``{"text": str}``.

Non-200 responses, malformed bodies, and length/dimension mismatches raise
ProviderProtocolError; connection failures are retried and finally raise
ProviderUnavailable.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import time
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import requests

from .errors import ProviderProtocolError, ProviderUnavailable

_DEFAULT_PROMPT = "Continue writing the following text."


class LogitsProvider(Protocol):
    def eos_scores(self, prompt: str, texts: Sequence[str]) -> list[float]: ...


class EmbeddingProvider(Protocol):
    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


class GenerationProvider(Protocol):
    def generate(self, prompt: str, max_words: int) -> str: ...


@dataclass(frozen=True)
class LogitsProviderSpec:
    """Connection settings for a logits provider.

    ``prompt`` is the instruction prepended before each sentence prefix;
    ``eos_token_label`` names the end-of-sequence token on the provider side
    (token ids are model-specific and stay out of this package).
    """

    endpoint: str
    prompt: str = _DEFAULT_PROMPT
    eos_token_label: str = "<|end_of_text|>"
    timeout: float = 30.0
    max_retries: int = 2

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class EmbeddingProviderSpec:
    endpoint: str
    dimension: int
    timeout: float = 30.0
    max_retries: int = 2
    batch_size: int = 32
    query_prefix: str = ""

    def __post_init__(self):
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True)
class GenerationProviderSpec:
    endpoint: str
    timeout: float = 120.0
    max_retries: int = 2


def _post_json(url: str, payload: dict, timeout: float, max_retries: int) -> dict:
    for attempt in range(max_retries + 1):
        try:
            resp = requests.post(url, json=payload, timeout=timeout)
        except requests.RequestException as exc:
            if attempt < max_retries:
                time.sleep(min(0.1 * 2**attempt, 2.0))
                continue
            raise ProviderUnavailable(
                f"{url} unreachable after {max_retries + 1} attempt(s): {exc}"
            ) from exc
        if resp.status_code != 200:
            raise ProviderProtocolError(f"{url} returned HTTP {resp.status_code}")
        try:
            body = resp.json()
        except ValueError as exc:
            raise ProviderProtocolError(f"{url} returned a non-JSON body") from exc
        if not isinstance(body, dict):
            raise ProviderProtocolError(f"{url} returned a non-object body")
        return body
    raise AssertionError("unreachable")


class HttpLogitsClient:
    """Logits provider backed by the ``/v1/eos_score`` endpoint."""

    def __init__(self, spec: LogitsProviderSpec):
        self.spec = spec

    def eos_scores(self, prompt: str, texts: Sequence[str]) -> list[float]:
        url = self.spec.endpoint.rstrip("/") + "/v1/eos_score"
        body = _post_json(
            url,
            {"prompt": prompt, "texts": list(texts)},
            self.spec.timeout,
            self.spec.max_retries,
        )
        scores = body.get("scores")
        if not isinstance(scores, list) or len(scores) != len(texts):
            raise ProviderProtocolError(
                f"{url}: expected {len(texts)} scores, got "
                f"{len(scores) if isinstance(scores, list) else type(scores).__name__}"
            )
        try:
            return [float(s) for s in scores]
        except (TypeError, ValueError) as exc:
            raise ProviderProtocolError(f"{url}: non-numeric score in response") from exc


class HttpEmbeddingClient:
    """Embedding provider backed by the ``/v1/embed`` endpoint.

    Batches requests per ``spec.batch_size`` and validates that every vector
    has the declared dimension.
    """

    def __init__(self, spec: EmbeddingProviderSpec):
        self.spec = spec
        self.dimension = spec.dimension

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        url = self.spec.endpoint.rstrip("/") + "/v1/embed"
        out: list[list[float]] = []
        for i in range(0, len(texts), self.spec.batch_size):
            batch = list(texts[i : i + self.spec.batch_size])
            body = _post_json(url, {"texts": batch}, self.spec.timeout, self.spec.max_retries)
            vectors = body.get("vectors")
            if not isinstance(vectors, list) or len(vectors) != len(batch):
                raise ProviderProtocolError(
                    f"{url}: expected {len(batch)} vectors, got "
                    f"{len(vectors) if isinstance(vectors, list) else type(vectors).__name__}"
                )
            for vec in vectors:
                if not isinstance(vec, list) or len(vec) != self.spec.dimension:
                    raise ProviderProtocolError(
                        f"{url}: vector dimension != declared {self.spec.dimension}"
                    )
                out.append([float(x) for x in vec])
        return out


class HttpGenerationClient:
    """Generation provider backed by the ``/v1/generate`` endpoint."""

    def __init__(self, spec: GenerationProviderSpec):
        self.spec = spec

    def generate(self, prompt: str, max_words: int) -> str:
        url = self.spec.endpoint.rstrip("/") + "/v1/generate"
        body = _post_json(
            url,
            {"prompt": prompt, "max_words": max_words},
            self.spec.timeout,
            self.spec.max_retries,
        )
        text = body.get("text")
        if not isinstance(text, str):
            raise ProviderProtocolError(f"{url}: response is missing a 'text' string")
        return text


def _stable_unit(data: str) -> float:
    """Deterministic hash of ``data`` to a float in (0, 1]."""
    digest = hashlib.sha1(data.encode("utf-8")).digest()
    return (int.from_bytes(digest[:8], "big") + 1) / 2.0**64


class ScriptedLogitsProvider:
    """In-process logits provider driven by a scoring rule.

    ``rule(prompt, text) -> float`` is applied per prefix.  Counts invocations
    (``calls``) and scored prefixes (``scored``) so tests can assert the
    provider-call budget.
    """

    def __init__(self, rule: Callable[[str, str], float]):
        self.rule = rule
        self.calls = 0
        self.scored = 0

    @classmethod
    def constant(cls, value: float) -> "ScriptedLogitsProvider":
        return cls(lambda prompt, text: value)

    @classmethod
    def first_sentence(cls) -> "ScriptedLogitsProvider":
        """Adversarial rule: the shortest prefix always wins the argmax."""
        return cls(lambda prompt, text: -float(len(text)))

    def eos_scores(self, prompt: str, texts: Sequence[str]) -> list[float]:
        self.calls += 1
        self.scored += len(texts)
        return [float(self.rule(prompt, text)) for text in texts]


class ReplayLogitsProvider:
    """Replays recorded score arrays, one array per call, in order.

    The replay source is either a list of score arrays or a path to a JSON
    file containing one.
    """

    def __init__(self, arrays: Sequence[Sequence[float]] | str):
        if isinstance(arrays, str):
            with open(arrays, encoding="utf-8") as fh:
                arrays = json.load(fh)
        self.arrays = [list(map(float, arr)) for arr in arrays]
        self.cursor = 0
        self.calls = 0
        self.scored = 0

    def eos_scores(self, prompt: str, texts: Sequence[str]) -> list[float]:
        if self.cursor >= len(self.arrays):
            raise ProviderProtocolError("replay exhausted: no score array left")
        scores = self.arrays[self.cursor]
        self.cursor += 1
        self.calls += 1
        self.scored += len(texts)
        if len(scores) != len(texts):
            raise ProviderProtocolError(
                f"replay array {self.cursor - 1} has {len(scores)} scores "
                f"for {len(texts)} prefixes"
            )
        return scores


class HashLogitsProvider:
    """Deterministic pseudo-random logits mock used by ``--mock`` runs.

    Scores are log of a stable hash of (prompt, prefix) mapped into (0, 1],
    so break points look arbitrary but are reproducible across runs and
    platforms.
    """

    def __init__(self, spec: LogitsProviderSpec | None = None):
        self.spec = spec
        self.calls = 0
        self.scored = 0

    def eos_scores(self, prompt: str, texts: Sequence[str]) -> list[float]:
        self.calls += 1
        self.scored += len(texts)
        return [math.log(_stable_unit(prompt + "\x1f" + text)) for text in texts]


class HashEmbedder:
    """Deterministic mock embedder: feature hashing of word unigrams.

    For each lower-cased whitespace token, sha1(token) picks a bucket
    (first 8 digest bytes mod dimension) and a sign (9th byte parity);
    the resulting count vector is L2-normalized.  Shared vocabulary between
    two texts yields positive cosine similarity, so retrieval rewards
    lexical overlap while staying fully offline.
    """

    def __init__(self, dimension: int = 256, spec: EmbeddingProviderSpec | None = None):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.spec = spec

    def _embed_one(self, text: str) -> list[float]:
        vec = [0.0] * self.dimension
        for token in text.lower().split():
            digest = hashlib.sha1(token.encode("utf-8")).digest()
            idx = int.from_bytes(digest[:8], "big") % self.dimension
            sign = 1.0 if digest[8] % 2 == 0 else -1.0
            vec[idx] += sign
        norm = math.sqrt(sum(x * x for x in vec))
        if norm > 0.0:
            vec = [x / norm for x in vec]
        return vec

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [self._embed_one(t) for t in texts]


_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+|\n+")


class ExtractiveGenerator:
    """Deterministic mock synthesizer used by ``--mock`` QA runs.

    Returns the context sentence with the highest word overlap against the
    last ``Question:`` line of the prompt, truncated to ``max_words``.
    """

    def generate(self, prompt: str, max_words: int) -> str:
        question = ""
        context_lines = []
        for line in prompt.splitlines():
            if line.strip().lower().startswith("question:"):
                question = line.split(":", 1)[1]
            elif not line.strip().lower().startswith("answer"):
                context_lines.append(line)
        q_words = set(question.lower().split())
        best, best_overlap = "", -1
        for sentence in _SENTENCE_SPLIT_RE.split("\n".join(context_lines)):
            sentence = sentence.strip()
            if not sentence:
                continue
            overlap = len(q_words & set(sentence.lower().split()))
            if overlap > best_overlap:
                best, best_overlap = sentence, overlap
        return " ".join(best.split()[:max_words])
