"""Sentence splitting and the recursive/paragraph chunkers."""

import random

import pytest

from lgmgc import (
    Chunk,
    ChunkLevel,
    ChunkerConfig,
    Document,
    EmptyInput,
    MissingDocument,
    chunk_text,
    paragraph_chunk,
    recursive_chunk,
    split_sentences,
    word_count,
)
from lgmgc.corpus import Corpus

from conftest import make_document


def spans_text(doc, spans):
    return [doc.text[s.start : s.end] for s in spans]


def assert_span_invariants(text, spans):
    prev_end = 0
    for span in spans:
        assert 0 <= span.start < span.end <= len(text)
        assert span.start >= prev_end
        # only whitespace between consecutive spans
        assert text[prev_end : span.start].strip() == ""
        # spans are trimmed on both sides
        assert not text[span.start].isspace() and not text[span.end - 1].isspace()
        assert span.word_count == len(text[span.start : span.end].split())
        prev_end = span.end
    assert text[prev_end:].strip() == ""


def assert_chunk_invariants(doc, spans, chunks, budget=None):
    starts = {s.start for s in spans}
    ends = {s.end for s in spans}
    prev_end = 0
    for chunk in chunks:
        assert chunk.start in starts and chunk.end in ends
        assert chunk.start >= prev_end
        assert doc.text[prev_end : chunk.start].strip() == ""
        assert chunk.word_count == len(doc.text[chunk.start : chunk.end].split())
        prev_end = chunk.end
    assert doc.text[prev_end:].strip() == ""
    # reconstruction modulo whitespace
    joined = " ".join(doc.text[c.start : c.end] for c in chunks)
    assert joined.split() == doc.text.split()
    # every sentence inside exactly one chunk
    for span in spans:
        owners = [c for c in chunks if c.start <= span.start and span.end <= c.end]
        assert len(owners) == 1
    if budget is not None:
        for chunk in chunks:
            inside = [s for s in spans if s.start >= chunk.start and s.end <= chunk.end]
            assert chunk.word_count <= budget or len(inside) == 1


class TestSplitSentences:
    def test_two_terminated_sentences(self):
        spans = split_sentences("A cat. A dog.")
        assert spans_text(Document(id="d", text="A cat. A dog."), spans) == ["A cat.", "A dog."]

    def test_no_terminator_is_one_span(self):
        spans = split_sentences("Hello")
        assert len(spans) == 1
        assert (spans[0].start, spans[0].end) == (0, 5)

    def test_abbreviation_guard(self):
        text = "Dr. Smith left. He ran."
        spans = split_sentences(text)
        assert spans_text(Document(id="d", text=text), spans) == ["Dr. Smith left.", "He ran."]

    def test_title_mid_sentence(self):
        text = "He met Prof. Lang at noon. She waved."
        assert len(split_sentences(text)) == 2

    def test_latin_abbreviation(self):
        text = "Bring fruit, e.g. apples, to the stand."
        assert len(split_sentences(text)) == 1

    def test_decimal_number_not_split(self):
        text = "He paid 3.5 dollars for it."
        assert len(split_sentences(text)) == 1

    def test_split_before_digit(self):
        text = "Results follow. 42 samples passed."
        assert len(split_sentences(text)) == 2

    def test_closing_quote_stays_with_sentence(self):
        text = 'He said "Stop." Then he ran.'
        spans = split_sentences(text)
        assert spans_text(Document(id="d", text=text), spans) == ['He said "Stop."', "Then he ran."]

    def test_newline_is_hard_boundary(self):
        spans = split_sentences("alpha beta\ngamma delta")
        assert len(spans) == 2

    def test_exclamation_and_question(self):
        spans = split_sentences("Wait! Why now? Because.")
        assert len(spans) == 3

    @pytest.mark.parametrize("text", ["", "   ", "\n\n\t "])
    def test_empty_input(self, text):
        with pytest.raises(EmptyInput):
            split_sentences(text)

    def test_invariants_on_random_documents(self, rng):
        for i in range(25):
            doc = make_document(rng, f"doc{i}", n_sentences=rng.randint(5, 80))
            assert_span_invariants(doc.text, split_sentences(doc.text))

    def test_unicode_offsets_are_code_points(self):
        text = "Café núlla opened early. The street stayed quiet."
        spans = split_sentences(text)
        assert text[spans[0].start : spans[0].end] == "Café núlla opened early."


class TestWordCount:
    def test_whitespace_tokens(self):
        assert word_count("a  b\tc\nd") == 4

    def test_empty(self):
        assert word_count("   ") == 0


class TestDocumentAndChunk:
    def test_document_word_count_auto(self):
        assert Document(id="d", text="one two three").word_count == 3

    def test_document_empty_text_rejected(self):
        with pytest.raises(EmptyInput):
            Document(id="d", text="   ")

    def test_document_empty_id_rejected(self):
        with pytest.raises(ValueError):
            Document(id="", text="hello")

    def test_chunk_id_format(self):
        chunk = Chunk(doc_id="d", start=0, end=5, word_count=1, level=ChunkLevel.PARENT)
        assert chunk.chunk_id == "d:0-5:parent"

    def test_chunker_config_validation(self):
        with pytest.raises(ValueError):
            ChunkerConfig(theta=0)


GOLDEN_SENTENCES = [
    "The survey team reached the coastline.",
    "Their first camp stood above a narrow inlet.",
    "Rain fell through the night.",
    "By morning the instruments were wet but still serviceable.",
    "Work began at dawn.",
    "The chief cartographer sketched the headland while two assistants measured the shallows.",
    "Progress was slow.",
    "Every reading had to be logged twice.",
    "The tide tables disagreed with observation.",
    "On the third day a supply boat arrived from town.",
    "It carried fresh paper, spare lenses, and a sealed letter.",
    "Nobody rested.",
    "The letter ordered the survey finished within weeks.",
    "The team worked faster afterward.",
]

GOLDEN_TEXT = (
    " ".join(GOLDEN_SENTENCES[0:5])
    + "\n\n"
    + " ".join(GOLDEN_SENTENCES[5:9])
    + "\n\n"
    + " ".join(GOLDEN_SENTENCES[9:11])
    + "\n"
    + " ".join(GOLDEN_SENTENCES[11:14])
)

# Greedy grouping at theta=20, traced over the sentence word counts
# [6,8,5,9,4 | 12,3,7,6 | 10,10 / 2,8,5]: each paragraph exceeds 20 words,
# paragraphs one and two fall through to sentence packing, paragraph three
# splits at its internal line break first.
GOLDEN_GROUPS = [
    (0, 2, 19),
    (3, 4, 13),
    (5, 6, 15),
    (7, 8, 13),
    (9, 10, 20),
    (11, 13, 15),
]


class TestRecursiveChunk:
    def test_exact_fit(self):
        doc = Document(id="d", text="One two three four five. Six seven eight nine ten.")
        chunks = recursive_chunk(doc, theta=5)
        assert [c.word_count for c in chunks] == [5, 5]

    def test_oversize_single_sentence(self):
        doc = Document(id="d", text="w1 w2 w3 w4 w5 w6 w7 w8 w9 w10 w11 w12.")
        chunks = recursive_chunk(doc, theta=5)
        assert len(chunks) == 1
        assert chunks[0].word_count == 12

    def test_golden_fixture(self):
        doc = Document(id="fix", text=GOLDEN_TEXT)
        spans = split_sentences(doc.text)
        assert len(spans) == 14
        assert [s.word_count for s in spans] == [6, 8, 5, 9, 4, 12, 3, 7, 6, 10, 10, 2, 8, 5]
        chunks = recursive_chunk(doc, theta=20)
        assert len(chunks) == len(GOLDEN_GROUPS)
        for chunk, (first, last, words) in zip(chunks, GOLDEN_GROUPS):
            assert chunk.start == spans[first].start
            assert chunk.end == spans[last].end
            assert chunk.word_count == words
            expected_text = " ".join(GOLDEN_SENTENCES[first : last + 1])
            assert doc.text[chunk.start : chunk.end].split() == expected_text.split()

    def test_invariants_on_random_documents(self, rng):
        for i in range(20):
            doc = make_document(rng, f"doc{i}", n_sentences=rng.randint(5, 80))
            spans = split_sentences(doc.text)
            for theta in (10, 25, 60):
                chunks = recursive_chunk(doc, theta)
                assert_chunk_invariants(doc, spans, chunks, budget=theta)

    def test_determinism(self, rng):
        doc = make_document(rng, "doc", n_sentences=50)
        assert recursive_chunk(doc, 30) == recursive_chunk(doc, 30)

    def test_all_parent_level(self, rng):
        doc = make_document(rng, "doc", n_sentences=20)
        assert all(c.level is ChunkLevel.PARENT for c in recursive_chunk(doc, 25))


class TestParagraphChunk:
    def test_two_paragraphs(self):
        doc = Document(id="d", text="First one here.\n\nSecond one there.")
        assert len(paragraph_chunk(doc)) == 2

    def test_no_blank_line(self):
        doc = Document(id="d", text="First one here.\nStill the same paragraph.")
        assert len(paragraph_chunk(doc)) == 1

    def test_blank_line_runs_collapse(self):
        doc = Document(id="d", text="First one here.\n\n\n\nSecond one there.")
        assert len(paragraph_chunk(doc)) == 2

    def test_blank_line_with_spaces(self):
        doc = Document(id="d", text="First one here.\n   \nSecond one there.")
        assert len(paragraph_chunk(doc)) == 2

    def test_invariants(self, rng):
        for i in range(10):
            doc = make_document(rng, f"doc{i}", n_sentences=rng.randint(5, 60))
            spans = split_sentences(doc.text)
            assert_chunk_invariants(doc, spans, paragraph_chunk(doc))


class TestChunkText:
    def test_verbatim(self):
        doc = Document(id="d", text="Alpha beta. Gamma delta.")
        corpus = Corpus([doc])
        chunk = recursive_chunk(doc, theta=2)[0]
        assert chunk_text(chunk, corpus) == "Alpha beta."

    def test_missing_document(self):
        corpus = Corpus([Document(id="d", text="Alpha beta.")])
        orphan = Chunk(doc_id="ghost", start=0, end=5, word_count=1, level=ChunkLevel.PARENT)
        with pytest.raises(MissingDocument):
            chunk_text(orphan, corpus)
