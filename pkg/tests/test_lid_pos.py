import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from codemix import lid, pos
from codemix.conllu import LANGS, Sentence, load
from codemix.metrics import pos_accuracy
from codemix.network import TrainerConfig
from codemix.segment import Fragment, matrix_language, resolve_languages, segment_fragments
from codemix.training import train_lid, train_tagger
from conftest import DATA

FAST = TrainerConfig(learning_rate=0.05, batch_size=16, dropout_prob=0.0, epochs=15, seed=0)


def tagged(tags, forms=None):
    forms = forms or [f"w{i}" for i in range(len(tags))]
    return Sentence.from_forms(forms, tags)


class TestSegmentation:
    def test_two_fragments_matrix_en(self):
        seg = segment_fragments(tagged(["hi", "hi", "en", "en", "en"]))
        assert seg.fragments == (Fragment(1, 2, "hi"), Fragment(3, 5, "en"))
        assert seg.matrix_language == "en" and seg.subordinate_language == "hi"

    def test_univ_merges_into_preceding(self):
        seg = segment_fragments(tagged(["hi", "univ", "hi"]))
        assert seg.fragments == (Fragment(1, 3, "hi"),)

    def test_tie_goes_to_hi(self):
        assert segment_fragments(tagged(["hi", "hi", "en", "en"])).matrix_language == "hi"
        assert matrix_language([]) == "hi"

    def test_sentence_initial_other_takes_following(self):
        seg = segment_fragments(tagged(["ne", "univ", "en", "hi", "acro"]))
        assert seg.fragments == (Fragment(1, 3, "en"), Fragment(4, 5, "hi"))
        assert seg.token_langs == ("en", "en", "en", "hi", "hi")

    def test_no_hi_en_rejected(self):
        with pytest.raises(ValueError, match="no hi/en"):
            segment_fragments(tagged(["ne", "univ"]))

    def test_resolve_default_for_untagged(self):
        assert resolve_languages(tagged([None, None]), "en") == ("en", "en")

    @given(st.lists(st.sampled_from(list(LANGS)), min_size=1, max_size=15).filter(
        lambda tags: any(t in ("hi", "en") for t in tags)))
    def test_partition_invariants(self, tags):
        seg = segment_fragments(tagged(tags))
        covered = [i for f in seg.fragments for i in f.indices]
        assert covered == list(range(1, len(tags) + 1))
        for a, b in zip(seg.fragments, seg.fragments[1:]):
            assert a.lang != b.lang
        for tag, resolved in zip(tags, seg.token_langs):
            if tag in ("hi", "en"):
                assert tag == resolved
        hi, en = tags.count("hi"), tags.count("en")
        assert seg.matrix_language == ("en" if en > hi else "hi")


class TestLidFeatures:
    def test_capitalized(self):
        s = Sentence.from_forms(["Modi", "ji"])
        ex = lid.extract_lid_features(s, 0)
        assert ex.is_capitalized and ex.prev_word == "<s>" and ex.next_word == "ji"

    def test_digit_and_suffix(self):
        ex = lid.extract_lid_features(Sentence.from_forms(["2day"]), 0)
        assert ex.has_digit and ex.suffixes[2] == "day"
        assert ex.next_word == "</s>"

    def test_punct(self):
        ex = lid.extract_lid_features(Sentence.from_forms(["!!"]), 0)
        assert ex.has_punct and not ex.has_digit

    @given(st.lists(st.text(min_size=1, max_size=8), min_size=1, max_size=6))
    def test_total(self, forms):
        s = Sentence.from_forms(forms)
        for i in range(len(forms)):
            feats = lid.extract_lid_features(s, i).features()
            assert {name for name, _ in lid.lid_slots()} <= set(feats)


@pytest.fixture(scope="module")
def lid_model():
    corpus = load(DATA / "lid_train.conllu")
    return train_lid(corpus, FAST, hidden_size=64).model


class TestLidModel:
    def test_labels_in_fixed_order(self, lid_model):
        assert lid_model.labels == list(LANGS)

    def test_fits_training_data(self, lid_model):
        corpus = load(DATA / "lid_train.conllu")
        gold = [t.lang for s in corpus for t in s.tokens]
        pred = [t.lang for s in corpus for t in lid.tag_languages(lid_model, s).tokens]
        assert np.mean([g == p for g, p in zip(gold, pred)]) > 0.95

    def test_every_token_tagged(self, lid_model):
        out = lid.tag_languages(lid_model, Sentence.from_forms(["xyzzy", "the", "42", "!"]))
        assert all(t.lang in LANGS for t in out.tokens)

    def test_ties_go_to_label_order(self):
        model = lid.build_lid_model(lid.training_examples(load(DATA / "lid_train.conllu")),
                                    hidden_size=4)
        model.W2[:] = 0.0
        model.b2[:] = 0.0
        out = lid.tag_languages(model, Sentence.from_forms(["a", "b"]))
        assert [t.lang for t in out.tokens] == ["hi", "hi"]

    def test_missing_tag_in_training(self):
        with pytest.raises(ValueError, match="no Lang tag"):
            lid.training_examples([Sentence.from_forms(["a"])])


@pytest.fixture(scope="module")
def taggers():
    hi = load(DATA / "toy_hi.conllu")
    en = load(DATA / "toy_en.conllu")
    return {
        "hi": train_tagger(hi, FAST, hidden_size=64).model,
        "en": train_tagger(en, FAST, hidden_size=64).model,
        "multi": train_tagger(hi + en, FAST, multilingual=True, hidden_size=64).model,
    }


class TestPos:
    def test_features(self):
        f = pos.pos_features(["a", "bcde"], 1, ["DET"], "hi")
        assert f["w-2"] == "<s>" and f["w-1"] == "a" and f["w+0"] == "bcde" and f["w+1"] == "</s>"
        assert f["t-1"] == "DET" and f["t-2"] == "<s>" and f["suf3"] == "cde" and f["lang"] == "hi"

    def test_training_uses_gold_previous_tags(self):
        s = load(DATA / "toy_hi.conllu")[0]
        ex = pos.training_examples([s])
        assert ex[2][0]["t-1"] == s.tokens[1].upos
        assert ex[2][0]["t-2"] == s.tokens[0].upos

    def test_monolingual_single_language_identical(self, taggers):
        """A one-language sentence is tagged exactly as by that language's model."""
        for s in load(DATA / "toy_en.conllu")[:5]:
            out = pos.tag_pos_monolingual(taggers, s)
            direct = pos.tag_span(taggers["en"], [t.norm.lower() for t in s.tokens])
            assert [t.upos for t in out.tokens] == direct

    def test_fragments_tagged_standalone(self, taggers):
        s = tagged(["hi", "hi", "en", "en"], ["mera", "ghar", "the", "city"])
        out = pos.tag_pos_monolingual(taggers, s)
        assert [t.upos for t in out.tokens[:2]] == pos.tag_span(taggers["hi"], ["mera", "ghar"])
        assert [t.upos for t in out.tokens[2:]] == pos.tag_span(taggers["en"], ["the", "city"])

    def test_tags_from_label_set(self, taggers, cm_fixture):
        labels = set(taggers["multi"].labels)
        for s in cm_fixture:
            out = pos.tag_pos_multilingual(taggers["multi"], s)
            assert {t.upos for t in out.tokens} <= labels

    def test_language_vector_changes_input(self, taggers):
        model = taggers["multi"]
        words = ["mera", "ghar"]
        a = model.inputs(model.encode(pos.pos_features(words, 0, [], "hi"))[None, :])
        b = model.inputs(model.encode(pos.pos_features(words, 0, [], "en"))[None, :])
        assert not np.array_equal(a, b)
        np.testing.assert_array_equal(a[0, -2:], [-0.25, 0.25])

    def test_deterministic(self, taggers, cm_fixture):
        s = cm_fixture[0]
        a = pos.tag_pos_multilingual(taggers["multi"], s)
        b = pos.tag_pos_multilingual(taggers["multi"], s)
        assert [t.upos for t in a.tokens] == [t.upos for t in b.tokens]

    def test_accuracy_on_fixture(self, taggers, cm_fixture):
        pred = [pos.tag_pos_monolingual(taggers, s) for s in cm_fixture]
        assert pos_accuracy(cm_fixture, pred)["total"] > 0.6
