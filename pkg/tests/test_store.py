import numpy as np
import pytest

from pseudosense.store import (
    EmbeddingFormatError,
    EmbeddingStore,
    SenseVector,
    get_sense,
    load_embeddings,
    write_embeddings,
)


def _sv(word, sense_id, vec, original_id=None, center=None):
    v = np.asarray(vec, dtype=np.float64)
    v.flags.writeable = False
    c = None
    if center is not None:
        c = np.asarray(center, dtype=np.float64)
        c.flags.writeable = False
    return SenseVector(
        word=word,
        sense_id=sense_id,
        original_id=sense_id if original_id is None else original_id,
        vector=v,
        cluster_center=c,
    )


@pytest.fixture
def small_store():
    senses = [
        _sv("bank", 0, [1.0, 0.0, 0.0], original_id=0, center=[0.9, 0.1, 0.0]),
        _sv("bank", 1, [0.0, 1.0, 0.0], original_id=2, center=[0.1, 0.9, 0.0]),
        _sv("rock", 0, [0.0, 0.0, 1.0]),
    ]
    return EmbeddingStore(3, senses, {"bank": np.array([0.5, 0.5, 0.0])})


class TestConstruction:
    def test_basic_lookup(self, small_store):
        assert small_store.words == ["bank", "rock"]
        assert small_store.dimension == 3
        assert len(small_store) == 3
        assert small_store.num_senses("bank") == 2
        assert "bank" in small_store and "river" not in small_store
        np.testing.assert_array_equal(
            small_store.get_sense("bank", 1).vector, [0.0, 1.0, 0.0]
        )

    def test_get_by_original_id(self, small_store):
        sv = small_store.get_by_original_id("bank", 2)
        assert sv.sense_id == 1
        with pytest.raises(IndexError):
            small_store.get_by_original_id("bank", 1)

    def test_module_level_alias(self, small_store):
        assert get_sense(small_store, "rock", 0) is small_store.get_sense("rock", 0)

    def test_unknown_word_raises_keyerror(self, small_store):
        with pytest.raises(KeyError):
            small_store.get_sense("river", 0)

    def test_out_of_range_sense_raises_indexerror(self, small_store):
        with pytest.raises(IndexError):
            small_store.get_sense("bank", 2)

    def test_non_dense_sense_ids_rejected(self):
        with pytest.raises(ValueError, match="not dense"):
            EmbeddingStore(2, [_sv("w", 1, [1.0, 0.0])])

    def test_wrong_vector_length_rejected(self):
        with pytest.raises(ValueError, match="length"):
            EmbeddingStore(3, [_sv("w", 0, [1.0, 0.0])])

    def test_global_for_unknown_word_rejected(self):
        with pytest.raises(ValueError, match="unknown word"):
            EmbeddingStore(2, [_sv("w", 0, [1.0, 0.0])], {"x": np.zeros(2)})

    def test_vectors_are_readonly(self, small_store):
        vec = small_store.get_sense("bank", 0).vector
        with pytest.raises(ValueError):
            vec[0] = 5.0
        mat, _ = small_store.sense_matrix()
        with pytest.raises(ValueError):
            mat[0, 0] = 5.0

    def test_sense_matrix_rows_follow_store_order(self, small_store):
        mat, rows = small_store.sense_matrix()
        assert rows == [("bank", 0), ("bank", 1), ("rock", 0)]
        np.testing.assert_array_equal(mat[2], [0.0, 0.0, 1.0])

    def test_sense_matrix_is_cached(self, small_store):
        m1, _ = small_store.sense_matrix()
        m2, _ = small_store.sense_matrix()
        assert m1 is m2

    def test_global_vector_lookup(self, small_store):
        np.testing.assert_array_equal(
            small_store.global_vector("bank"), [0.5, 0.5, 0.0]
        )
        assert small_store.global_vector("rock") is None


class TestCanonicalFormat:
    def test_round_trip_is_identity(self, small_store, tmp_path):
        path = tmp_path / "emb.txt"
        write_embeddings(small_store, path)
        loaded = load_embeddings(path)
        assert loaded == small_store

    def test_round_trip_exact_on_awkward_floats(self, tmp_path):
        rng = np.random.default_rng(7)
        vec = rng.standard_normal(5) * np.array([1e-17, 1e12, 1.0, np.pi, 1e-300])
        store = EmbeddingStore(5, [_sv("w", 0, vec)])
        path = tmp_path / "emb.txt"
        write_embeddings(store, path)
        loaded = load_embeddings(path)
        assert np.array_equal(loaded.get_sense("w", 0).vector, vec)

    def test_sense_ids_remapped_dense_ascending(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("3 2\nw#7 1 0\nw#3 0 1\nv#0 1 1\n")
        store = load_embeddings(path)
        assert [sv.original_id for sv in store.senses_of("w")] == [3, 7]
        assert [sv.sense_id for sv in store.senses_of("w")] == [0, 1]
        np.testing.assert_array_equal(store.get_sense("w", 0).vector, [0.0, 1.0])

    def test_clusters_and_globals_blocks(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text(
            "2 2\nw#0 1 0\nw#1 0 1\n#CLUSTERS\nw#1 2 2\n#GLOBALS\nw 3 3\n"
        )
        store = load_embeddings(path)
        assert store.get_sense("w", 0).cluster_center is None
        np.testing.assert_array_equal(
            store.get_sense("w", 1).cluster_center, [2.0, 2.0]
        )
        np.testing.assert_array_equal(store.global_vector("w"), [3.0, 3.0])

    def test_word_containing_hash(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("1 2\nc#net#0 1 2\n")
        store = load_embeddings(path)
        assert store.words == ["c#net"]

    @pytest.mark.parametrize(
        "content,message",
        [
            ("", "empty file"),
            ("2\nw#0 1 0\n", "header"),
            ("x 2\nw#0 1 0\n", "non-integer header"),
            ("1 2\nw0 1 0\n", "word#sense_id"),
            ("1 2\nw#x 1 0\n", "not an integer"),
            ("1 2\nw#-1 1 0\n", "negative sense id"),
            ("1 2\nw#0 1\n", "expected 2 floats"),
            ("1 2\nw#0 1 zap\n", "bad float"),
            ("2 2\nw#0 1 0\nw#0 0 1\n", "duplicate sense"),
            ("2 2\nw#0 1 0\n", "declares 2 sense vectors, found 1"),
            ("1 2\nw#0 1 0\n#CLUSTERS\nv#0 1 1\n", "undeclared sense"),
            ("1 2\nw#0 1 0\n#CLUSTERS\nw#0 1 1\nw#0 1 1\n", "duplicate cluster"),
            ("1 2\nw#0 1 0\n#GLOBALS\nv 1 1\n", "undeclared word"),
            ("1 2\nw#0 1 0\n#GLOBALS\nw 1 1\nw 1 1\n", "duplicate global"),
        ],
    )
    def test_malformed_files_rejected(self, tmp_path, content, message):
        path = tmp_path / "bad.txt"
        path.write_text(content)
        with pytest.raises(EmbeddingFormatError, match=message):
            load_embeddings(path)

    def test_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\nw#0 1 0\nw#1 1 zap\n")
        with pytest.raises(EmbeddingFormatError, match="line 3"):
            load_embeddings(path)


class TestMssgFormat:
    def _write(self, tmp_path, text):
        path = tmp_path / "vec.mssg"
        path.write_text(text)
        return path

    def test_loads_globals_senses_and_centers(self, tmp_path):
        path = self._write(
            tmp_path,
            "2 2\n"
            "apple 2\n0.5 0.5\n1 0\n0.9 0.1\n0 1\n0.1 0.9\n"
            "pear 1\n0.2 0.8\n1 1\n0.5 0.5\n",
        )
        store = load_embeddings(path, format="mssg")
        assert store.words == ["apple", "pear"]
        assert store.num_senses("apple") == 2
        np.testing.assert_array_equal(store.global_vector("apple"), [0.5, 0.5])
        np.testing.assert_array_equal(
            store.get_sense("apple", 1).cluster_center, [0.1, 0.9]
        )

    def test_mssg_round_trips_through_canonical(self, tmp_path):
        path = self._write(
            tmp_path, "1 3\nkiwi 2\n1 2 3\n1 0 0\n0.9 0 0\n0 1 0\n0 0.9 0\n"
        )
        store = load_embeddings(path, format="mssg")
        out = tmp_path / "canonical.txt"
        write_embeddings(store, out)
        assert load_embeddings(out) == store

    @pytest.mark.parametrize(
        "content,message",
        [
            ("", "empty file"),
            ("1\n", "header"),
            ("1 2\napple\n", "word n_senses"),
            ("1 2\napple x\n", "not an integer"),
            ("1 2\napple 0\n", "no senses"),
            ("1 2\napple 1\n1 2\n1 2\n", "unexpected end of file"),
            ("2 2\na 1\n1 2\n1 2\n1 2\na 1\n1 2\n1 2\n1 2\n", "duplicate word"),
            ("1 2\na 1\n1 2\n1 2\n1 2\nx 1\n", "trailing content"),
        ],
    )
    def test_malformed_mssg_rejected(self, tmp_path, content, message):
        path = self._write(tmp_path, content)
        with pytest.raises(EmbeddingFormatError, match=message):
            load_embeddings(path, format="mssg")

    def test_unknown_format_rejected(self, tmp_path):
        path = self._write(tmp_path, "1 1\nw#0 1\n")
        with pytest.raises(ValueError, match="unknown embedding format"):
            load_embeddings(path, format="word2vec")
