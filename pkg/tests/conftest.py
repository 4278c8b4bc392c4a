"""Shared fixtures: synthetic documents and a local provider server."""

from __future__ import annotations

import json
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from lgmgc import Document, HashEmbedder

DATA_DIR = Path(__file__).parent / "data"

_VOCAB = (
    "harbor lantern granite meadow copper signal winter archive ledger "
    "voyage timber orchard quarry beacon salt fog summit tide hollow crane "
    "mill anchor cinder valley spruce ridge ferry cellar hinge prairie"
).split()

_TERMINATORS = (".", ".", ".", "!", "?")


def make_sentence(rng: random.Random, n_words: int) -> str:
    words = [rng.choice(_VOCAB) for _ in range(n_words)]
    words[0] = words[0].capitalize()
    return " ".join(words) + rng.choice(_TERMINATORS)


def make_document(
    rng: random.Random,
    doc_id: str,
    n_sentences: int = 60,
    min_words: int = 3,
    max_words: int = 18,
) -> Document:
    """Random prose with paragraph breaks, line breaks, and plain spaces."""
    parts: list[str] = []
    for i in range(n_sentences):
        if i > 0:
            roll = rng.random()
            if roll < 0.12:
                parts.append("\n\n")
            elif roll < 0.22:
                parts.append("\n")
            else:
                parts.append(" ")
        parts.append(make_sentence(rng, rng.randint(min_words, max_words)))
    return Document(id=doc_id, text="".join(parts))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


class _ProviderHandler(BaseHTTPRequestHandler):
    """Provider endpoints backed by simple deterministic rules."""

    embedder = HashEmbedder(dimension=16)
    fail_next: list[int] = []  # shared mutable knob: HTTP codes to emit first

    def log_message(self, *args):
        pass

    def _read(self) -> dict:
        length = int(self.headers["Content-Length"])
        return json.loads(self.rfile.read(length))

    def _send(self, payload: dict, status: int = 200) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        if _ProviderHandler.fail_next:
            code = _ProviderHandler.fail_next.pop(0)
            self._send({"error": "scripted failure"}, status=code)
            return
        req = self._read()
        if self.path == "/v1/eos_score":
            if req["prompt"] == "wrong-length":
                self._send({"scores": [0.0]})
            elif req["prompt"] == "non-finite":
                self._send({"scores": [float("nan") for _ in req["texts"]]})
            else:
                # longer prefixes look more complete: score = word count
                self._send({"scores": [float(len(t.split())) for t in req["texts"]]})
        elif self.path == "/v1/embed":
            if any(t == "wrong-dim" for t in req["texts"]):
                self._send({"vectors": [[0.0, 0.0] for _ in req["texts"]]})
            else:
                self._send({"vectors": [self.embedder.embed([t])[0] for t in req["texts"]]})
        elif self.path == "/v1/generate":
            words = req["prompt"].split()[: req["max_words"]]
            self._send({"text": " ".join(words)})
        else:
            self._send({"error": "no such endpoint"}, status=404)


@pytest.fixture(scope="module")
def provider_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _ProviderHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()
        thread.join(timeout=5)


@pytest.fixture(autouse=True)
def _reset_fail_next():
    _ProviderHandler.fail_next = []
    yield
    _ProviderHandler.fail_next = []
