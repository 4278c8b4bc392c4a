"""Corpus ingestion and cached sentence segmentation.

Accepted corpus layouts:

* a JSONL file, one ``{"id": ..., "text": ...}`` object per line, or
* a directory of ``.txt`` files, where the filename stem is the document id.

Text is normalized to NFC with Unix newlines before any offsets are taken,
so chunk spans are stable across ingestion paths.
"""

from __future__ import annotations

import json
import unicodedata
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import DuplicateDocId, EmptyInput, MalformedRecord
from .segmentation import Document, SentenceSpan, split_sentences


def normalize_text(text: str) -> str:
    """NFC normalization plus newline normalization to ``\\n``."""
    return unicodedata.normalize("NFC", text.replace("\r\n", "\n").replace("\r", "\n"))


class Corpus(Mapping[str, Document]):
    """Ordered id -> Document mapping with per-document sentence caching.

    Sentence spans are segmented once per document and shared by every
    chunker, the granular index builder, and context assembly, so all of
    them see identical boundaries.
    """

    def __init__(self, documents: Iterable[Document]):
        self._docs: dict[str, Document] = {}
        for doc in documents:
            if doc.id in self._docs:
                raise DuplicateDocId(f"duplicate document id {doc.id!r}")
            self._docs[doc.id] = doc
        self._spans: dict[str, list[SentenceSpan]] = {}

    def __getitem__(self, doc_id: str) -> Document:
        return self._docs[doc_id]

    def __iter__(self) -> Iterator[str]:
        return iter(self._docs)

    def __len__(self) -> int:
        return len(self._docs)

    @property
    def documents(self) -> list[Document]:
        return list(self._docs.values())

    def sentences(self, doc_id: str) -> list[SentenceSpan]:
        if doc_id not in self._spans:
            self._spans[doc_id] = split_sentences(self._docs[doc_id].text)
        return self._spans[doc_id]


def _load_jsonl(path: Path) -> list[Document]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict) or "id" not in record or "text" not in record:
                raise MalformedRecord(f"{path}:{lineno}: expected an object with 'id' and 'text'")
            try:
                docs.append(Document(id=str(record["id"]), text=normalize_text(record["text"])))
            except (EmptyInput, ValueError) as exc:
                raise MalformedRecord(f"{path}:{lineno}: {exc}") from exc
    return docs


def _load_txt_dir(path: Path) -> list[Document]:
    docs = []
    for file in sorted(path.glob("*.txt")):
        text = normalize_text(file.read_text(encoding="utf-8"))
        try:
            docs.append(Document(id=file.stem, text=text))
        except (EmptyInput, ValueError) as exc:
            raise MalformedRecord(f"{file}: {exc}") from exc
    return docs


def ingest_corpus(path: str | Path) -> Corpus:
    """Load and normalize documents from a JSONL file or a .txt directory.

    Raises:
        MalformedRecord: unparsable record, missing fields, or empty text.
        DuplicateDocId: two records share an id.
        EmptyInput: the path yields no documents at all.
    """
    path = Path(path)
    if path.is_dir():
        docs = _load_txt_dir(path)
    elif path.is_file():
        docs = _load_jsonl(path)
    else:
        raise MalformedRecord(f"corpus path {path} does not exist")
    if not docs:
        raise EmptyInput(f"corpus at {path} contains no documents")
    try:
        return Corpus(docs)
    except DuplicateDocId as exc:
        raise DuplicateDocId(f"{exc} in {path}") from None
