"""Subword skip-gram training, the vector file format, and abstract-form vectors."""

import numpy as np
import pytest

from morphmine.abstract import AbstractForm
from morphmine.corpus import build_corpus
from morphmine.embed import (
    EmbeddingTable,
    abstract_form_vector,
    cosine,
    load_embeddings,
    save_embeddings,
    train_embeddings,
)
from morphmine.errors import DataError, MissingEmbeddingError


def contrastive_corpus():
    """'walks' and 'runs' always share contexts; 'zebra' never does."""
    sents = []
    for i in range(60):
        frame = [f"ctx{i % 6}", "", f"end{i % 6}"]
        for verb in ("walks", "runs"):
            s = list(frame)
            s[1] = verb
            sents.append(s)
        sents.append([f"other{i % 4}", "zebra", f"tail{i % 4}"])
    return build_corpus(sents)


class TestTraining:
    def test_every_type_gets_a_finite_vector(self):
        c = contrastive_corpus()
        table = train_embeddings(c, dim=16, window=2, epochs=2, seed=0)
        assert set(table.vectors) == set(c.type_counts)
        for v in table.vectors.values():
            assert v.shape == (16,)
            assert np.isfinite(v).all()

    def test_shared_contexts_pull_vectors_together(self):
        c = contrastive_corpus()
        table = train_embeddings(c, dim=16, window=2, epochs=20, seed=0)
        together = cosine(table.vectors["walks"], table.vectors["runs"])
        apart = cosine(table.vectors["walks"], table.vectors["zebra"])
        assert together > apart

    def test_same_seed_identical_tables(self):
        c = contrastive_corpus()
        a = train_embeddings(c, dim=8, window=2, epochs=2, seed=7)
        b = train_embeddings(c, dim=8, window=2, epochs=2, seed=7)
        assert set(a.vectors) == set(b.vectors)
        for w in a.vectors:
            assert np.array_equal(a.vectors[w], b.vectors[w])

    def test_single_type_corpus(self):
        c = build_corpus([["a"]])
        table = train_embeddings(c, dim=4, window=2, epochs=1, seed=0)
        assert table.vectors["a"].shape == (4,)
        assert np.isfinite(table.vectors["a"]).all()

    def test_rejects_tiny_dim(self):
        with pytest.raises(ValueError):
            train_embeddings(build_corpus([["a", "b"]]), dim=1, window=2, epochs=1, seed=0)

    def test_serialization_is_byte_stable(self, tmp_path):
        c = contrastive_corpus()
        pa, pb = tmp_path / "a.vec", tmp_path / "b.vec"
        save_embeddings(train_embeddings(c, dim=8, window=2, epochs=2, seed=3), str(pa))
        save_embeddings(train_embeddings(c, dim=8, window=2, epochs=2, seed=3), str(pb))
        assert pa.read_bytes() == pb.read_bytes()


class TestVectorFile:
    def test_load_basic(self, tmp_path):
        p = tmp_path / "v.vec"
        p.write_text("2 3\ncat 1.0 0.0 0.0\ndog 0.0 1.0 0.0\n", encoding="utf-8")
        table = load_embeddings(str(p))
        assert table.dim == 3
        assert table.vectors["cat"].tolist() == [1.0, 0.0, 0.0]

    def test_wrong_arity_cites_line(self, tmp_path):
        p = tmp_path / "v.vec"
        p.write_text("1 3\ncat 1.0 0.0\n", encoding="utf-8")
        with pytest.raises(DataError, match=r"v\.vec:2"):
            load_embeddings(str(p))

    def test_duplicate_word_cites_first_occurrence(self, tmp_path):
        p = tmp_path / "v.vec"
        p.write_text("2 2\ncat 1.0 0.0\ncat 0.0 1.0\n", encoding="utf-8")
        with pytest.raises(DataError, match="line 2"):
            load_embeddings(str(p))

    def test_row_count_mismatch(self, tmp_path):
        p = tmp_path / "v.vec"
        p.write_text("3 2\ncat 1.0 0.0\n", encoding="utf-8")
        with pytest.raises(DataError):
            load_embeddings(str(p))

    def test_round_trip_exact(self, tmp_path):
        c = contrastive_corpus()
        table = train_embeddings(c, dim=8, window=2, epochs=2, seed=1)
        p = tmp_path / "v.vec"
        save_embeddings(table, str(p))
        back = load_embeddings(str(p))
        assert back.dim == table.dim
        assert set(back.vectors) == set(table.vectors)
        for w in table.vectors:
            # repr round trip must be exact, not approximate
            assert np.array_equal(back.vectors[w], table.vectors[w])


class TestAbstractFormVector:
    def _table(self):
        return EmbeddingTable(
            dim=2,
            vectors={
                "walk": np.array([1.0, 0.0]),
                "talk": np.array([0.0, 1.0]),
                "balk": np.array([0.4, 0.2]),
            },
        )

    def test_single_member(self):
        form = AbstractForm("X0", {(0, "walk")})
        got = abstract_form_vector(form, self._table())
        assert got.pattern == "X0"
        assert got.vector.tolist() == [1.0, 0.0]

    def test_mean_of_two(self):
        form = AbstractForm("X0", {(0, "walk"), (1, "talk")})
        got = abstract_form_vector(form, self._table())
        assert got.vector.tolist() == [0.5, 0.5]

    def test_missing_member_skipped_with_warning(self):
        form = AbstractForm("X0", {(0, "walk"), (1, "talk"), (2, "gone")})
        with pytest.warns(UserWarning, match="no vector"):
            got = abstract_form_vector(form, self._table())
        assert got.vector.tolist() == [0.5, 0.5]

    def test_no_members_in_table(self):
        form = AbstractForm("X0", {(0, "gone"), (1, "also-gone")})
        with pytest.raises(MissingEmbeddingError):
            with pytest.warns(UserWarning):
                abstract_form_vector(form, self._table())

    def test_permutation_invariant(self):
        members = [(0, "walk"), (1, "talk"), (2, "balk")]
        a = abstract_form_vector(AbstractForm("X0", set(members)), self._table())
        b = abstract_form_vector(AbstractForm("X0", set(reversed(members))), self._table())
        assert np.array_equal(a.vector, b.vector)


class TestCosine:
    def test_self_similarity(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            v = rng.normal(size=6)
            assert cosine(v, v) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_zero_vector_gives_zero(self):
        assert cosine(np.zeros(3), np.array([1.0, 2.0, 3.0])) == 0.0

    def test_table_vectors_self_cosine(self):
        c = contrastive_corpus()
        table = train_embeddings(c, dim=8, window=2, epochs=1, seed=0)
        for v in table.vectors.values():
            if np.any(v != 0):
                assert cosine(v, v) == pytest.approx(1.0, abs=1e-9)
