"""Embedding plumbing, cosine scoring, vector store, retrieval, context assembly."""

import numpy as np
import pytest

from lgmgc import (
    DegenerateVector,
    Document,
    EmbeddingProviderSpec,
    EmptyInput,
    EmptyRanking,
    HashEmbedder,
    IncompleteScores,
    InvalidK,
    ProviderProtocolError,
    VectorStore,
    assemble_context,
    build_index,
    chunk_text,
    cosine,
    embed,
    recursive_chunk,
    retrieve,
    score_parents,
    top_k_parents,
)
from lgmgc.corpus import Corpus
from conftest import make_document


class TestCosine:
    def test_identical(self):
        assert cosine([0.1, 0.2, 0.7], [0.1, 0.2, 0.7]) == 1.0

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_known_value(self):
        assert cosine([1.0, 2.0, 2.0], [2.0, 1.0, 2.0]) == pytest.approx(8.0 / 9.0, abs=1e-12)

    def test_zero_vector(self):
        with pytest.raises(DegenerateVector):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine([1.0], [1.0, 2.0])

    def test_clamped_to_unit_interval(self):
        u = [0.1] * 7
        assert cosine(u, u) <= 1.0
        assert cosine(u, [-x for x in u]) >= -1.0


class TestEmbed:
    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            embed(HashEmbedder(8), [])

    def test_identical_texts_identical_vectors(self):
        vecs = embed(HashEmbedder(16), ["same words here", "same words here"])
        assert vecs[0] == vecs[1]

    def test_count_mismatch(self):
        class Short:
            def embed(self, texts):
                return [[0.0] * 4]

        with pytest.raises(ProviderProtocolError):
            embed(Short(), ["a", "b"])


class TestVectorStore:
    def test_add_and_lookup(self):
        store = VectorStore(dimension=2)
        store.add("a", [1.0, 0.0])
        store.add("b", [0.0, 1.0])
        assert "a" in store and len(store) == 2
        assert store.ids() == ["a", "b"]
        assert list(store.vector("b")) == [0.0, 1.0]

    def test_frozen_rejects_writes(self):
        store = VectorStore(dimension=1)
        store.add("a", [1.0])
        store.freeze()
        with pytest.raises(RuntimeError):
            store.add("b", [1.0])

    def test_duplicate_id(self):
        store = VectorStore(dimension=1)
        store.add("a", [1.0])
        with pytest.raises(ValueError):
            store.add("a", [2.0])

    def test_dimension_check(self):
        store = VectorStore(dimension=3)
        with pytest.raises(ValueError):
            store.add("a", [1.0, 2.0])

    def test_normalized_flag(self):
        unit = VectorStore(dimension=2)
        unit.add("a", [0.6, 0.8])
        assert unit.freeze().normalized is True
        raw = VectorStore(dimension=2)
        raw.add("a", [3.0, 4.0])
        assert raw.freeze().normalized is False

    def test_unit_scores_missing_id(self):
        store = VectorStore(dimension=2)
        store.add("a", [1.0, 0.0])
        with pytest.raises(IncompleteScores):
            store.unit_scores([1.0, 0.0], ["a", "ghost"])

    def test_save_load_round_trip(self, tmp_path):
        store = VectorStore(dimension=2)
        store.add("b", [0.6, 0.8])
        store.add("a", [1.0, 0.0])
        path = tmp_path / "store.json"
        store.save(path, index_hash="deadbeef")
        loaded, recorded = VectorStore.load(path)
        assert recorded == "deadbeef"
        assert loaded.dimension == 2
        assert sorted(loaded.ids()) == ["a", "b"]
        assert list(loaded.vector("b")) == [0.6, 0.8]
        assert loaded.normalized is True


def indexed_corpus(rng, n_docs=3, theta=32):
    docs = [make_document(rng, f"doc{i}", n_sentences=rng.randint(20, 50)) for i in range(n_docs)]
    corpus = Corpus(docs)
    parents = [c for d in docs for c in recursive_chunk(d, theta)]
    index = build_index(parents, theta, corpus)
    provider = HashEmbedder(16)
    store = VectorStore(dimension=16)
    units = index.units()
    for unit, vec in zip(units, embed(provider, [chunk_text(u, corpus) for u in units])):
        store.add(unit.chunk_id, vec)
    store.freeze()
    return corpus, index, store, provider


class TestRetrieve:
    def test_invalid_k(self, rng):
        corpus, index, store, provider = indexed_corpus(rng, n_docs=1)
        with pytest.raises(InvalidK):
            retrieve("anything", index, store, provider, k=0)

    def test_single_unit_corpus(self):
        doc = Document(id="d", text="Only one sentence here today.")
        corpus = Corpus([doc])
        parents = recursive_chunk(doc, 50)
        index = build_index(parents, 50, corpus)
        provider = HashEmbedder(8)
        store = VectorStore(dimension=8)
        for unit in index.units():
            store.add(unit.chunk_id, embed(provider, [chunk_text(unit, corpus)])[0])
        ranking = retrieve("one sentence", index, store.freeze(), provider, k=5)
        assert [sp.parent.chunk_id for sp in ranking] == [parents[0].chunk_id]

    def test_matches_brute_force(self, rng):
        corpus, index, store, provider = indexed_corpus(rng)
        query = "river stone mountain morning"
        ranking = retrieve(query, index, store, provider, k=4)

        qv = np.asarray(provider.embed([query])[0])
        expected = {}
        for unit in index.units():
            uv = store.vector(unit.chunk_id)
            expected[unit.chunk_id] = float(qv @ uv / (np.linalg.norm(qv) * np.linalg.norm(uv)))
        oracle = top_k_parents(score_parents(index, expected), 4)
        assert [sp.parent.chunk_id for sp in ranking] == [
            sp.parent.chunk_id for sp in oracle
        ]
        for mine, ref in zip(ranking, oracle):
            assert mine.score == pytest.approx(ref.score, abs=1e-9)

    def test_scaling_invariance(self, rng):
        corpus, index, store, provider = indexed_corpus(rng, n_docs=2)

        class Scaled:
            def embed(self, texts):
                return [[7.0 * x for x in v] for v in provider.embed(texts)]

        plain = retrieve("morning light", index, store, provider, k=3)
        scaled = retrieve("morning light", index, store, Scaled(), k=3)
        assert [sp.parent.chunk_id for sp in plain] == [sp.parent.chunk_id for sp in scaled]

    def test_query_prefix_applied(self, rng):
        corpus, index, store, _ = indexed_corpus(rng, n_docs=1)
        seen = []

        class Recording:
            spec = EmbeddingProviderSpec(endpoint="", dimension=16, query_prefix="query: ")

            def embed(self, texts):
                seen.extend(texts)
                return HashEmbedder(16).embed(texts)

        retrieve("where is the lamp", index, store, Recording(), k=1)
        assert seen == ["query: where is the lamp"]


def uniform_doc(doc_id, n_sentences, words_per_sentence=10):
    sentences = []
    for i in range(n_sentences):
        words = [f"Sent{i}"] + [f"{doc_id}w{i}x{j}" for j in range(words_per_sentence - 2)]
        sentences.append(" ".join(words) + " stop.")
    return Document(id=doc_id, text=" ".join(sentences))


def ranked_parents(doc, theta):
    corpus = Corpus([doc])
    parents = recursive_chunk(doc, theta)
    return corpus, [
        type("SP", (), {"parent": p, "score": 1.0 - 0.01 * i, "best_unit_id": p.chunk_id})()
        for i, p in enumerate(parents)
    ]


class TestAssembleContext:
    def test_two_parents_fit(self):
        corpus, ranking = ranked_parents(uniform_doc("d", 120), theta=600)
        assert [sp.parent.word_count for sp in ranking] == [600, 600]
        ctx = assemble_context(ranking, corpus, context_cap=1500)
        assert ctx.word_count == 1200
        assert ctx.used_parents == [sp.parent.chunk_id for sp in ranking]
        assert "\n\n" in ctx.text

    def test_second_parent_would_overflow(self):
        corpus, ranking = ranked_parents(uniform_doc("d", 160), theta=900)
        assert [sp.parent.word_count for sp in ranking] == [900, 700]
        ctx = assemble_context(ranking, corpus, context_cap=1500)
        assert ctx.word_count == 900
        assert ctx.used_parents == [ranking[0].parent.chunk_id]

    def test_oversize_top_parent_truncated_at_sentence_boundary(self):
        corpus, ranking = ranked_parents(uniform_doc("d", 160), theta=1600)
        assert ranking[0].parent.word_count == 1600
        ctx = assemble_context(ranking, corpus, context_cap=1500)
        assert ctx.word_count == 1500
        assert ctx.text.endswith("stop.")
        assert len(ctx.text.split()) == 1500
        assert ctx.used_parents == [ranking[0].parent.chunk_id]

    def test_first_sentence_alone_exceeds_cap(self):
        doc = uniform_doc("d", 1, words_per_sentence=30)
        corpus, ranking = ranked_parents(doc, theta=10)
        ctx = assemble_context(ranking, corpus, context_cap=20)
        assert ctx.text == "" and ctx.word_count == 0 and ctx.used_parents == []

    def test_empty_ranking(self):
        corpus, _ = ranked_parents(uniform_doc("d", 5), theta=50)
        with pytest.raises(EmptyRanking):
            assemble_context([], corpus, context_cap=1500)

    def test_skips_nothing_after_first_overflow(self):
        # stop at the first parent that overflows even if a later one would fit
        corpus, ranking = ranked_parents(uniform_doc("d", 30), theta=100)
        assert [sp.parent.word_count for sp in ranking] == [100, 100, 100]
        ctx = assemble_context(ranking, corpus, context_cap=150)
        assert ctx.word_count == 100
        assert ctx.used_parents == [ranking[0].parent.chunk_id]

    def test_never_exceeds_cap_randomized(self, rng):
        for _ in range(40):
            doc = uniform_doc("d", rng.randint(5, 60))
            corpus, ranking = ranked_parents(doc, theta=rng.choice([40, 90, 200]))
            rng.shuffle(ranking)
            cap = rng.randint(30, 800)
            ctx = assemble_context(ranking, corpus, context_cap=cap)
            assert ctx.word_count <= cap
            assert len(ctx.text.split()) == ctx.word_count
