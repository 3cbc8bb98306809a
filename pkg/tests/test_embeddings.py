import numpy as np
import pytest

from checkworthy.embeddings import (
    EmbeddingTable,
    OrthogonalMap,
    SeedDictionary,
    align_procrustes,
    apply_map,
    load_embeddings,
    save_embeddings,
    sentence_embedding,
)
from checkworthy.errors import DimMismatch, EmptyDictionary, ParseError
from checkworthy.text_pipeline import Token, segment_arabic


def _random_orthogonal(dim, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q


def _random_table(words, dim, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    return EmbeddingTable(dim=dim, vectors={w: rng.normal(size=dim) for w in words})


class TestLoadSave:
    def test_plain_file(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text("house 1 2 3\ncar 4 5 6\n", encoding="utf-8")
        table = load_embeddings(path)
        assert table.dim == 3 and len(table.vectors) == 2
        assert np.array_equal(table.vectors["car"], [4.0, 5.0, 6.0])

    def test_header_accepted(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text("2 3\nhouse 1 2 3\ncar 4 5 6\n", encoding="utf-8")
        table = load_embeddings(path)
        assert table.dim == 3 and len(table.vectors) == 2

    def test_dim_mismatch_reports(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text("house 1 2 3\ncar 4 5\n", encoding="utf-8")
        with pytest.raises(DimMismatch):
            load_embeddings(path)

    def test_duplicates_keep_first(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text("house 1 2\nhouse 9 9\n", encoding="utf-8")
        table = load_embeddings(path)
        assert np.array_equal(table.vectors["house"], [1.0, 2.0])

    def test_bad_float(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text("house one two\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_embeddings(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "v.vec"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ParseError):
            load_embeddings(path)

    def test_round_trip_is_exact(self, tmp_path):
        table = _random_table(["a", "b", "c"], dim=7, seed=1)
        path = tmp_path / "v.vec"
        save_embeddings(table, path)
        loaded = load_embeddings(path)
        for word, vec in table.vectors.items():
            assert np.array_equal(loaded.vectors[word], vec)


class TestSentenceEmbedding:
    def test_single_word(self):
        table = _random_table(["tax"], dim=4, seed=2)
        out = sentence_embedding([Token("tax")], table)
        assert np.array_equal(out, table.vectors["tax"])

    def test_mean_of_two(self):
        table = _random_table(["tax", "plan"], dim=4, seed=3)
        out = sentence_embedding([Token("tax"), Token("plan")], table)
        expected = (table.vectors["tax"] + table.vectors["plan"]) / 2
        assert np.allclose(out, expected, atol=1e-15)

    def test_all_oov_zero_vector(self):
        table = _random_table(["tax"], dim=4, seed=4)
        assert np.array_equal(sentence_embedding([Token("zorp")], table), np.zeros(4))

    def test_lowercased_lookup(self):
        table = _random_table(["tax"], dim=4, seed=5)
        assert np.array_equal(sentence_embedding([Token("TAX")], table), table.vectors["tax"])

    def test_arabic_stem_lookup_first(self):
        table = _random_table(["بيت", "وبيته"], dim=4, seed=6)
        token = Token("وبيته", tuple(segment_arabic("وبيته")))
        assert np.array_equal(sentence_embedding([token], table), table.vectors["بيت"])

    def test_permutation_invariant(self):
        table = _random_table(list("abcde"), dim=6, seed=7)
        tokens = [Token(w) for w in "a b c d e".split()]
        fwd = sentence_embedding(tokens, table)
        rev = sentence_embedding(list(reversed(tokens)), table)
        assert np.allclose(fwd, rev, atol=1e-15)


class TestProcrustes:
    def test_identity_dictionary_on_same_table(self):
        table = _random_table([f"w{i}" for i in range(40)], dim=8, seed=8)
        seed_dict = SeedDictionary(pairs=tuple((w, w) for w in table.vectors))
        omap = align_procrustes(table, table, seed_dict)
        assert np.abs(omap.matrix - np.eye(8)).max() < 1e-10

    def test_exact_rotation_recovery(self):
        words = [f"w{i}" for i in range(60)]
        src = _random_table(words, dim=12, seed=9)
        rotation = _random_orthogonal(12, seed=10)
        tgt = EmbeddingTable(dim=12, vectors={w: v @ rotation for w, v in src.vectors.items()})
        omap = align_procrustes(src, tgt, SeedDictionary(pairs=tuple((w, w) for w in words)))
        assert np.linalg.norm(omap.matrix - rotation) <= 1e-6

    def test_noisy_pairs_beat_random_rotations(self):
        rng = np.random.Generator(np.random.PCG64(11))
        words = [f"w{i}" for i in range(80)]
        src = _random_table(words, dim=10, seed=12)
        rotation = _random_orthogonal(10, seed=13)
        tgt = EmbeddingTable(
            dim=10,
            vectors={w: v @ rotation + 0.05 * rng.normal(size=10) for w, v in src.vectors.items()},
        )
        seed_dict = SeedDictionary(pairs=tuple((w, w) for w in words))
        omap = align_procrustes(src, tgt, seed_dict)
        x = np.array([src.vectors[w] for w in words])
        z = np.array([tgt.vectors[w] for w in words])
        best = np.linalg.norm(x @ omap.matrix - z)
        for trial in range(100):
            w_rand = _random_orthogonal(10, seed=1000 + trial)
            assert best <= np.linalg.norm(x @ w_rand - z) + 1e-12

    def test_missing_pairs_dropped(self):
        src = _random_table(["a", "b"], dim=4, seed=14)
        tgt = _random_table(["a", "b"], dim=4, seed=15)
        seed_dict = SeedDictionary(pairs=(("a", "a"), ("b", "missing"), ("ghost", "b")))
        omap = align_procrustes(src, tgt, seed_dict)  # one usable pair is enough to solve
        assert omap.dim == 4

    def test_no_usable_pairs(self):
        src = _random_table(["a"], dim=4, seed=16)
        tgt = _random_table(["b"], dim=4, seed=17)
        with pytest.raises(EmptyDictionary):
            align_procrustes(src, tgt, SeedDictionary(pairs=(("x", "y"),)))

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            align_procrustes(_random_table(["a"], 3, 1), _random_table(["a"], 4, 2), SeedDictionary(pairs=(("a", "a"),)))

    def test_orthogonality_invariant(self):
        for seed in range(5):
            src = _random_table([f"w{i}" for i in range(30)], dim=6, seed=seed)
            tgt = _random_table([f"w{i}" for i in range(30)], dim=6, seed=seed + 100)
            omap = align_procrustes(src, tgt, SeedDictionary(pairs=tuple((w, w) for w in src.vectors)))
            gram = omap.matrix.T @ omap.matrix
            assert np.abs(gram - np.eye(6)).max() <= 1e-8


class TestApplyMap:
    def test_identity_map_unchanged(self):
        table = _random_table(["a", "b"], dim=5, seed=18)
        mapped = apply_map(table, OrthogonalMap(matrix=np.eye(5)))
        for w in table.vectors:
            assert np.array_equal(mapped.vectors[w], table.vectors[w])

    def test_inverse_restores(self):
        table = _random_table(["a", "b", "c"], dim=6, seed=19)
        rotation = _random_orthogonal(6, seed=20)
        omap = OrthogonalMap(matrix=rotation)
        inverse = OrthogonalMap(matrix=rotation.T)
        back = apply_map(apply_map(table, omap), inverse)
        for w in table.vectors:
            assert np.abs(back.vectors[w] - table.vectors[w]).max() <= 1e-8

    def test_norm_preserved(self):
        table = _random_table(["a", "b", "c"], dim=9, seed=21)
        omap = OrthogonalMap(matrix=_random_orthogonal(9, seed=22))
        mapped = apply_map(table, omap)
        for w, vec in table.vectors.items():
            n0, n1 = np.linalg.norm(vec), np.linalg.norm(mapped.vectors[w])
            assert abs(n1 - n0) <= 1e-8 * n0

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            apply_map(_random_table(["a"], 3, 23), OrthogonalMap(matrix=np.eye(4)))

    def test_non_orthogonal_rejected(self):
        with pytest.raises(DimMismatch):
            OrthogonalMap(matrix=np.array([[1.0, 0.0], [0.0, 2.0]]))


class TestSeedDictionary:
    def test_load(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("# comment\nبيت\thouse\nسيارة\tcar\n", encoding="utf-8")
        seed_dict = SeedDictionary.load(path)
        assert seed_dict.pairs == (("بيت", "house"), ("سيارة", "car"))

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("justoneword\n", encoding="utf-8")
        with pytest.raises(ParseError):
            SeedDictionary.load(path)
