import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from codemix.embeddings import (EmbeddingTable, language_tag_vector, load_embeddings,
                                load_lexicon, merge_tables, project_lexicon, random_embedding)


class TestLoad:
    def test_plain(self):
        t = load_embeddings("a 1 2 3\nb 4 5 6\n")
        assert len(t) == 2 and t.dimension == 3
        np.testing.assert_array_equal(t["b"], [4, 5, 6])

    def test_header(self):
        t = load_embeddings("2 3\na 1 2 3\nb 4 5 6\n")
        assert len(t) == 2 and t.dimension == 3

    def test_ragged_row_names_line(self):
        with pytest.raises(ValueError, match="line 2"):
            load_embeddings("a 1 2 3\nb 4 5\n")

    def test_expected_dim_mismatch(self):
        with pytest.raises(ValueError, match="header"):
            load_embeddings("2 3\na 1 2 3\n", expected_dim=4)

    def test_oov_is_seeded_vector(self):
        t = load_embeddings("a 1 2 3\n", seed=7)
        np.testing.assert_array_equal(t["zzz"], random_embedding(7, 3))


class TestRandomEmbedding:
    @given(st.integers(0, 2**32 - 1), st.integers(1, 64))
    def test_range_and_determinism(self, seed, dim):
        v = random_embedding(seed, dim)
        assert v.shape == (dim,)
        assert np.all(np.abs(v) <= 0.25)
        np.testing.assert_array_equal(v, random_embedding(seed, dim))

    def test_zero_dim(self):
        with pytest.raises(ValueError):
            random_embedding(0, 0)


class TestLanguageVector:
    def test_values(self):
        np.testing.assert_array_equal(language_tag_vector("hi"), [-0.25, 0.25])
        np.testing.assert_array_equal(language_tag_vector("en"), [0.25, -0.25])

    def test_unresolved_tag(self):
        with pytest.raises(ValueError):
            language_tag_vector("ne")


class TestProjection:
    def setup_method(self):
        self.src = EmbeddingTable({"house": np.array([1.0, 0.0]), "home": np.array([0.0, 1.0])}, 2)

    def test_single_translation_exact(self):
        out = project_lexicon(self.src, {"ghar": ["house"]})
        np.testing.assert_array_equal(out["ghar"], [1.0, 0.0])

    def test_mean_of_translations(self):
        out = project_lexicon(self.src, {"ghar": ["house", "home", "hut"]})
        np.testing.assert_array_equal(out["ghar"], [0.5, 0.5])

    def test_oov_translations_dropped(self):
        out = project_lexicon(self.src, {"ghar": ["house"], "x": ["hut"]})
        assert "x" not in out and out.dimension == 2

    def test_empty_projection(self):
        with pytest.raises(ValueError):
            project_lexicon(self.src, {"x": ["hut"]})

    def test_lexicon_tsv(self):
        lex = load_lexicon("ghar\thouse\nghar\thome\nghar\thouse\n")
        assert lex == {"ghar": ["house", "home"]}
        with pytest.raises(ValueError, match="line 1"):
            load_lexicon("ghar house\n")

    def test_merge_prefers_primary(self):
        other = EmbeddingTable({"house": np.array([9.0, 9.0]), "x": np.array([2.0, 2.0])}, 2)
        merged = merge_tables(self.src, other)
        np.testing.assert_array_equal(merged["house"], [1.0, 0.0])
        np.testing.assert_array_equal(merged["x"], [2.0, 2.0])
        with pytest.raises(ValueError):
            merge_tables(self.src, EmbeddingTable({}, 3))

    @given(st.text(max_size=12))
    def test_any_lookup_has_table_dimension(self, word):
        assert self.src[word].shape == (2,)
