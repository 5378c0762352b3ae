import random

import numpy as np
import pytest

from codemix import arceager, strategies
from codemix.arceager import Configuration, extract_parse_features, greedy_parse, parse_with_scorer
from codemix.conllu import Sentence, Token
from codemix.segment import segment_fragments
from codemix.strategies import (FRAGMENT_WISE, SUBORDINATE_FIRST, IncompatibleModels,
                                InterpolationConfig, configuration_matrix_language)
from oracles import is_tree


def random_sentences(treebanks, n, seed):
    """Tagged sentences drawn from the toy vocabularies with random language runs."""
    rng = random.Random(seed)
    pools = {lang: [(t.form, t.upos) for s in tb for t in s.tokens] for lang, tb in treebanks.items()}
    out = []
    for k in range(n):
        length = rng.randint(1, 12)
        lang = rng.choice(["hi", "en"])
        tokens = []
        for i in range(1, length + 1):
            if rng.random() < 0.3:
                lang = "en" if lang == "hi" else "hi"
            form, upos = rng.choice(pools[lang])
            tokens.append(Token(i, form, upos=upos, lang="univ" if upos == "PUNCT" else lang))
        if not any(t.lang in ("hi", "en") for t in tokens):
            tokens[0].lang = lang
        out.append(Sentence(tokens, sent_id=f"r{k}"))
    return out


@pytest.fixture(scope="module")
def sample(toy_hi, toy_en):
    return random_sentences({"hi": toy_hi, "en": toy_en}, 50, seed=0)


@pytest.fixture(scope="module")
def pair(toy_parsers):
    return {"hi": toy_parsers["hi"], "en": toy_parsers["en"]}


def parse_fixed_mix(models, sentence, weight_matrix):
    """Reference: the lambda mixture written out directly, matrix per configuration."""
    seg = segment_fragments(sentence)

    def score(c):
        m = configuration_matrix_language(c, sentence, seg)
        s = "en" if m == "hi" else "hi"
        f = extract_parse_features(c, sentence, seg.token_langs)
        return weight_matrix * models[m].forward(f) + (1 - weight_matrix) * models[s].forward(f)

    return parse_with_scorer(sentence, models["hi"].labels, score)


def tree_of(s):
    return [(t.head, t.deprel) for t in s.tokens]


class TestConfigurationMatrix:
    def sent(self, rows):
        return Sentence([Token(i, f"w{i}", upos=u, lang=l) for i, (u, l) in enumerate(rows, 1)])

    def test_all_hindi_verbs(self):
        s = self.sent([("VERB", "hi"), ("AUX", "hi"), ("VERB", "hi"), ("NOUN", "en"), ("NOUN", "en"),
                       ("NOUN", "en"), ("NOUN", "en")])
        seg = segment_fragments(s)
        assert seg.matrix_language == "en"
        c = Configuration(7)
        arceager.apply_in_place(c, arceager.Transition("SHIFT"))
        assert configuration_matrix_language(c, s, seg) == "hi"

    def test_no_pos_match_falls_back(self):
        s = self.sent([("NOUN", "en"), ("NOUN", "en"), ("NOUN", "hi")])
        seg = segment_fragments(s)
        assert configuration_matrix_language(Configuration(3), s, seg) == "en"

    def test_tie_falls_back(self):
        s = self.sent([("AUX", "hi"), ("VERB", "en"), ("NOUN", "en")])
        seg = segment_fragments(s)
        assert seg.matrix_language == "en"
        assert configuration_matrix_language(Configuration(3), s, seg) == "en"

    def test_root_excluded(self):
        s = self.sent([("NOUN", "hi"), ("ADP", "en")])
        seg = segment_fragments(s)  # tie -> hi
        # ROOT on the stack must not count; only b1 (en ADP) votes
        assert configuration_matrix_language(Configuration(2), s, seg) == "en"


class TestInterpolationLaws:
    def test_lambda_one_is_matrix_only(self, pair, sample):
        for s in sample:
            got = strategies.parse_interpolated(pair, s, InterpolationConfig(1.0))
            assert tree_of(got) == tree_of(parse_fixed_mix(pair, s, 1.0))

    def test_lambda_zero_is_subordinate_only(self, pair, sample):
        for s in sample:
            got = strategies.parse_interpolated(pair, s, InterpolationConfig(0.0))
            assert tree_of(got) == tree_of(parse_fixed_mix(pair, s, 0.0))

    def test_half_is_swap_symmetric(self, pair, sample):
        swapped = {"hi": pair["en"], "en": pair["hi"]}
        for s in sample:
            a = strategies.parse_interpolated(pair, s, InterpolationConfig(0.5))
            b = strategies.parse_interpolated(swapped, s, InterpolationConfig(0.5))
            assert tree_of(a) == tree_of(b)

    def test_lambda_one_single_language_is_monolingual(self, pair, toy_en):
        for s in toy_en:
            got = strategies.parse_interpolated(pair, s, InterpolationConfig(1.0))
            assert tree_of(got) == tree_of(greedy_parse(pair["en"], s))

    def test_lambda_validated(self):
        for bad in (-0.1, 1.5):
            with pytest.raises(ValueError):
                InterpolationConfig(bad)

    def test_incompatible_inventories(self, pair, toy_hi):
        other = arceager.build_parser_model(toy_hi, hidden_size=8)
        with pytest.raises(IncompatibleModels, match="differ"):
            strategies.parse_interpolated({"hi": other, "en": pair["en"]}, toy_hi[0])


class TestWellFormed:
    @pytest.mark.parametrize("strategy", strategies.STRATEGIES)
    def test_trees(self, strategy, toy_parsers, pair, sample):
        for s in sample:
            out = strategies.parse(strategy, s, pair, toy_parsers["multi"])
            assert len(out) == len(s)
            assert is_tree(out.heads)

    def test_unknown_strategy(self, pair, sample):
        with pytest.raises(ValueError, match="unknown strategy"):
            strategies.parse("beam", sample[0], pair)

    def test_multilingual_needs_model(self, pair, sample):
        with pytest.raises(ValueError, match="multilingual parser"):
            strategies.parse("multilingual", sample[0], pair)


class TestSingleLanguage:
    @pytest.mark.parametrize("strategy", ["monolingual", "multipass-f", "multipass-s"])
    def test_matches_monolingual_model(self, strategy, pair, toy_hi, toy_en):
        for lang, tb in (("hi", toy_hi), ("en", toy_en)):
            for s in tb[:10]:
                got = strategies.parse(strategy, s, pair)
                assert tree_of(got) == tree_of(greedy_parse(pair[lang], s))

    def test_multilingual_uses_language_vectors(self, toy_parsers, toy_en):
        model = toy_parsers["multi"]
        s = toy_en[0]
        c = Configuration(len(s))
        en = model.inputs(model.encode(extract_parse_features(c, s, ["en"] * len(s)))[None, :])
        hi = model.inputs(model.encode(extract_parse_features(c, s, ["hi"] * len(s)))[None, :])
        assert not np.array_equal(en, hi)


class TestMultipass:
    def test_fragment_wise_pass_one_stays_inside(self, pair, sample):
        """Only fragment roots may have heads outside their own fragment."""
        for s in sample:
            seg = segment_fragments(s)
            out = strategies.parse_multipass(pair, s, seg, FRAGMENT_WISE)
            for frag in seg.fragments:
                outside = [i for i in frag.indices
                           if not frag.start <= out.tokens[i - 1].head <= frag.end]
                assert len(outside) <= 1

    def test_subordinate_interiors_untouched(self, pair, sample):
        for s in sample:
            seg = segment_fragments(s)
            out = strategies.parse_multipass(pair, s, seg, SUBORDINATE_FIRST)
            for frag in seg.fragments:
                if frag.lang == seg.matrix_language:
                    continue
                outside = [i for i in frag.indices
                           if not frag.start <= out.tokens[i - 1].head <= frag.end]
                assert len(outside) == 1
                # the fragment root joins pass 2; the rest of the fragment is closed to outside heads
                interior = set(frag.indices) - set(outside)
                for tok in out.tokens:
                    if tok.index not in frag.indices and tok.head in interior:
                        pytest.fail(f"{s.sent_id}: arc into the interior of {frag}")

    def test_two_fragment_structure(self, pair, toy_hi):
        """[hi hi][en]: the matrix model parses the 2-node sentence of fragment roots."""
        s = Sentence([Token(1, "mera", upos="PRON", lang="hi"), Token(2, "ghar", upos="NOUN", lang="hi"),
                      Token(3, "today", upos="ADV", lang="en")])
        seg = segment_fragments(s)
        out = strategies.parse_multipass(pair, s, seg, FRAGMENT_WISE)
        frag1 = greedy_parse(pair["hi"], Sentence([Token(1, "mera", upos="PRON", lang="hi"),
                                                   Token(2, "ghar", upos="NOUN", lang="hi")]))
        r1 = next(t.index for t in frag1.tokens if t.head == 0)
        reduced = greedy_parse(pair["hi"], Sentence([Token(1, s.tokens[r1 - 1].form, upos=s.tokens[r1 - 1].upos,
                                                           lang="hi"),
                                                     Token(2, "today", upos="ADV", lang="en")]))
        mapping = {1: r1, 2: 3, 0: 0}
        assert out.tokens[r1 - 1].head == mapping[reduced.tokens[0].head]
        assert out.tokens[2].head == mapping[reduced.tokens[1].head]
        for t in frag1.tokens:
            if t.index != r1:
                assert out.tokens[t.index - 1].head == t.head

    def test_bad_mode(self, pair, sample):
        with pytest.raises(ValueError, match="mode"):
            strategies.parse_multipass(pair, sample[0], mode="sideways")
