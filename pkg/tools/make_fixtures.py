"""Regenerate the desk-scale fixtures shipped in src/codemix/data/.

Sentences come from two small phrase grammars: Hindi (romanized, SOV,
postpositions, verb + auxiliary) and English (SVO, prepositions).  Code-mixed
sentences keep the clause frame of a matrix language and draw some phrases
from the other language with that language's internal word order.

    python tools/make_fixtures.py
"""
from __future__ import annotations

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from codemix.conllu import Sentence, Token, write_conllu  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "codemix" / "data"

HI = {
    "PRON": ["main", "vo", "hum", "tum", "ye"],
    "POSS": ["mera", "uska", "hamara", "tumhara"],
    "NOUN": ["dost", "ghar", "kitaab", "khaana", "paani", "kaam", "bazaar", "gaadi",
             "chai", "shahar", "kamra", "bhai", "maa", "subah", "kahani"],
    "ADJ": ["accha", "bada", "naya", "sundar", "garam", "chhota"],
    "VERB": ["khaata", "padhta", "dekhta", "peeta", "karta", "likhta", "banata", "chalata"],
    "IVERB": ["rehta", "jaata", "sota", "baithta"],
    "AUX": ["hai", "tha"],
    "LOC": ["mein", "par"],
    "ADV": ["bahut", "kal", "aaj"],
}
EN = {
    "PRON": ["i", "he", "she", "we", "they"],
    "POSS": ["my", "his", "our", "your"],
    "DET": ["the", "a"],
    "NOUN": ["friend", "house", "book", "food", "water", "work", "market", "car",
             "tea", "city", "room", "brother", "mother", "morning", "story", "office", "movie"],
    "ADJ": ["good", "big", "new", "beautiful", "hot", "small"],
    "VERB": ["eats", "reads", "watches", "drinks", "does", "writes", "makes", "drives"],
    "IVERB": ["lives", "goes", "sleeps", "sits"],
    "AUX": ["is", "was"],
    "LOC": ["in", "at", "on"],
    "ADV": ["very", "yesterday", "today"],
}
NAMES = ["rahul", "priya", "delhi", "mumbai"]


def t(form, upos, lang, head, rel):
    """Phrase-local token: ``head`` is a phrase index, or None for the phrase head."""
    return {"form": form, "upos": upos, "lang": lang, "head": head, "rel": rel}


def hi_np(rng, allow_pron=True):
    kind = rng.choice(["pron", "poss", "adj", "noun", "name"] if allow_pron else ["poss", "adj", "noun"])
    if kind == "pron":
        return [t(rng.choice(HI["PRON"]), "PRON", "hi", None, "")]
    if kind == "name":
        return [t(rng.choice(NAMES), "PROPN", "ne", None, "")]
    noun = rng.choice(HI["NOUN"])
    if kind == "poss":
        return [t(rng.choice(HI["POSS"]), "PRON", "hi", 1, "nmod:poss"), t(noun, "NOUN", "hi", None, "")]
    if kind == "adj":
        return [t(rng.choice(HI["ADJ"]), "ADJ", "hi", 1, "amod"), t(noun, "NOUN", "hi", None, "")]
    return [t(noun, "NOUN", "hi", None, "")]


def en_np(rng, allow_pron=True):
    kind = rng.choice(["pron", "poss", "det", "detadj", "name"] if allow_pron else ["poss", "det", "detadj"])
    if kind == "pron":
        return [t(rng.choice(EN["PRON"]), "PRON", "en", None, "")]
    if kind == "name":
        return [t(rng.choice(NAMES).capitalize(), "PROPN", "ne", None, "")]
    noun = rng.choice(EN["NOUN"])
    if kind == "poss":
        return [t(rng.choice(EN["POSS"]), "PRON", "en", 1, "nmod:poss"), t(noun, "NOUN", "en", None, "")]
    if kind == "det":
        return [t(rng.choice(EN["DET"]), "DET", "en", 1, "det"), t(noun, "NOUN", "en", None, "")]
    return [t(rng.choice(EN["DET"]), "DET", "en", 2, "det"), t(rng.choice(EN["ADJ"]), "ADJ", "en", 2, "amod"),
            t(noun, "NOUN", "en", None, "")]


def hi_pp(rng):
    np_ = hi_np(rng, allow_pron=False)
    head = next(i for i, x in enumerate(np_) if x["head"] is None)
    return np_ + [t(rng.choice(HI["LOC"]), "ADP", "hi", head, "case")]


def en_pp(rng):
    np_ = en_np(rng, allow_pron=False)
    shifted = [dict(x, head=None if x["head"] is None else x["head"] + 1) for x in np_]
    head = next(i for i, x in enumerate(shifted) if x["head"] is None) + 1
    return [t(rng.choice(EN["LOC"]), "ADP", "en", head, "case")] + shifted


def phrase(rng, lang, kind):
    if kind == "np":
        return hi_np(rng) if lang == "hi" else en_np(rng)
    if kind == "obj":
        return hi_np(rng, allow_pron=False) if lang == "hi" else en_np(rng, allow_pron=False)
    return hi_pp(rng) if lang == "hi" else en_pp(rng)


def assemble(parts, sent_id):
    """parts: list of (phrase tokens, relation to clause head or 'HEAD')."""
    tokens = []
    offsets = []
    for toks, _ in parts:
        offsets.append(len(tokens))
        tokens.extend(toks)
    head_idx = None
    for (toks, rel), off in zip(parts, offsets):
        if rel == "HEAD":
            head_idx = off + next(i for i, x in enumerate(toks) if x["head"] is None) + 1
    out = []
    for (toks, rel), off in zip(parts, offsets):
        for i, x in enumerate(toks):
            if x["head"] is not None:
                head, deprel = off + x["head"] + 1, x["rel"]
            elif rel == "HEAD":
                head, deprel = 0, "root"
            else:
                head, deprel = head_idx, rel
            out.append(Token(len(out) + 1, x["form"], upos=x["upos"], head=head, deprel=deprel,
                             lang=x["lang"]))
    return Sentence(out, sent_id, " ".join(tok.form for tok in out))


def single(form, upos, lang):
    return [t(form, upos, lang, None, "")]


def hindi_clause(rng, langs):
    """SOV frame; ``langs`` chooses the language of subject, object and PP."""
    subj_l, obj_l, pp_l = langs
    kind = rng.choice(["trans", "intrans", "neg", "adv"])
    parts = [(phrase(rng, subj_l, "np"), "nsubj")]
    if kind == "intrans":
        parts.append((phrase(rng, pp_l, "pp"), "obl"))
        verb = rng.choice(HI["IVERB"])
    else:
        if kind == "adv":
            parts.append((single(rng.choice(HI["ADV"][1:]), "ADV", "hi"), "advmod"))
        if rng.random() < 0.5:
            parts.append((phrase(rng, pp_l, "pp"), "obl"))
        parts.append((phrase(rng, obj_l, "obj"), "obj"))
        if kind == "neg":
            parts.append((single("nahi", "PART", "hi"), "advmod"))
        verb = rng.choice(HI["VERB"])
    parts.append((single(verb, "VERB", "hi"), "HEAD"))
    parts.append((single(rng.choice(HI["AUX"]), "AUX", "hi"), "aux"))
    parts.append((single(".", "PUNCT", "univ"), "punct"))
    return parts


def english_clause(rng, langs):
    subj_l, obj_l, pp_l = langs
    kind = rng.choice(["trans", "intrans", "neg", "adv"])
    parts = [(phrase(rng, subj_l, "np"), "nsubj")]
    if kind == "neg":
        parts.append((single("does", "AUX", "en"), "aux"))
        parts.append((single("not", "PART", "en"), "advmod"))
    if kind == "intrans":
        parts.append((single(rng.choice(EN["IVERB"]), "VERB", "en"), "HEAD"))
        parts.append((phrase(rng, pp_l, "pp"), "obl"))
    else:
        parts.append((single(rng.choice(EN["VERB"]), "VERB", "en"), "HEAD"))
        parts.append((phrase(rng, obj_l, "obj"), "obj"))
        if rng.random() < 0.5:
            parts.append((phrase(rng, pp_l, "pp"), "obl"))
        if kind == "adv":
            parts.append((single(rng.choice(EN["ADV"][1:]), "ADV", "en"), "advmod"))
    parts.append((single(".", "PUNCT", "univ"), "punct"))
    return parts


def monolingual(rng, lang, n, prefix):
    build = hindi_clause if lang == "hi" else english_clause
    return [assemble(build(rng, (lang, lang, lang)), f"{prefix}-{i + 1}") for i in range(n)]


def code_mixed(rng, n, prefix):
    sents = []
    while len(sents) < n:
        matrix = rng.choice(["hi", "en"])
        other = "en" if matrix == "hi" else "hi"
        langs = tuple(other if rng.random() < 0.5 else matrix for _ in range(3))
        build = hindi_clause if matrix == "hi" else english_clause
        sent = assemble(build(rng, langs), f"{prefix}-{len(sents) + 1}")
        tags = {tok.lang for tok in sent.tokens}
        # keep only genuinely mixed sentences whose frame language stays the majority
        hi = sum(tok.lang == "hi" for tok in sent.tokens)
        en = sum(tok.lang == "en" for tok in sent.tokens)
        if {"hi", "en"} <= tags and (hi > en) == (matrix == "hi") and hi != en:
            sents.append(sent)
    return sents


# -- transliteration pairs -----------------------------------------------------

DEVANAGARI_WORDS = """
मेरा मेरी तेरा उसका हमारा घर दोस्त किताब खाना पानी काम बाज़ार गाड़ी चाय शहर कमरा भाई माँ
सुबह कहानी अच्छा बड़ा नया सुंदर गरम छोटा खाता पढ़ता देखता पीता करता लिखता बनाता चलाता
रहता जाता सोता बैठता है था हैं थे नहीं बहुत कल आज में पर से को का की के और भी क्या
कौन कब कहाँ क्यों कैसे यहाँ वहाँ अब फिर लोग बात दिन रात साल समय दुनिया देश पैसा प्यार
दिल जीवन सच झूठ खुश दुखी गाना फिल्म खेल बच्चा लड़का लड़की आदमी औरत पिता बहन बेटा
बेटी नाम सवाल जवाब मदद ज़रूरत सपना रास्ता दरवाज़ा खिड़की पेड़ फूल आसमान बारिश धूप हवा
मौसम खबर अख़बार स्कूल कॉलेज दफ़्तर मंदिर सड़क गाँव नदी पहाड़ समंदर जानवर कुत्ता बिल्ली
चिड़िया मछली दूध रोटी चावल सब्ज़ी फल मीठा खट्टा ठंडा तेज़ धीरे जल्दी देर सही गलत आसान
मुश्किल पूरा आधा पहला आखिरी बोलना सुनना समझना सोचना जानना मिलना आना देना लेना रखना
""".split()

_CONS = {
    "क": ["k"], "ख": ["kh"], "ग": ["g"], "घ": ["gh"], "च": ["ch"], "छ": ["chh", "ch"],
    "ज": ["j"], "झ": ["jh"], "ट": ["t"], "ठ": ["th"], "ड": ["d"], "ढ": ["dh"], "ण": ["n"],
    "त": ["t"], "थ": ["th"], "द": ["d"], "ध": ["dh"], "न": ["n"], "प": ["p"], "फ": ["ph", "f"],
    "ब": ["b"], "भ": ["bh"], "म": ["m"], "य": ["y"], "र": ["r"], "ल": ["l"], "व": ["v", "w"],
    "श": ["sh"], "ष": ["sh"], "स": ["s"], "ह": ["h"],
}
_NUKTA = {"ज": ["z", "j"], "फ": ["f"], "ड": ["d", "r"], "ढ": ["dh", "rh"], "ख": ["kh"], "क": ["q", "k"]}
_VOWELS = {"अ": ["a"], "आ": ["aa", "a"], "इ": ["i"], "ई": ["ee", "i"], "उ": ["u"], "ऊ": ["oo", "u"],
           "ए": ["e"], "ऐ": ["ai"], "ओ": ["o"], "औ": ["au"]}
_MATRAS = {"ा": ["aa", "a"], "ि": ["i"], "ी": ["ee", "i"], "ु": ["u"], "ू": ["oo", "u"],
           "े": ["e"], "ै": ["ai"], "ो": ["o"], "ौ": ["au"], "ॉ": ["o"]}
_NASAL = {"ं": ["n"], "ँ": ["n", ""]}
_HALANT, _NUKTA_SIGN = "्", "़"


def romanizations(word, rng, limit=4):
    """Plausible Roman spellings of a Devanagari word (schwa handling included)."""
    units = []  # list of option lists
    chars = list(word)
    i = 0
    while i < len(chars):
        ch = chars[i]
        if ch in _CONS:
            opts = _CONS[ch]
            if i + 1 < len(chars) and chars[i + 1] == _NUKTA_SIGN:
                opts = _NUKTA.get(ch, opts)
                i += 1
            units.append(opts)
            nxt = chars[i + 1] if i + 1 < len(chars) else None
            if nxt in _MATRAS or nxt == _HALANT:
                pass
            elif nxt is None:
                units.append(["", "a"] if len(units) > 1 else ["a"])
            elif len(units) == 1:
                units.append(["a"])
            else:
                units.append(["a", ""])
        elif ch in _MATRAS:
            units.append(_MATRAS[ch])
        elif ch in _VOWELS:
            units.append(_VOWELS[ch])
        elif ch in _NASAL:
            units.append(_NASAL[ch])
        i += 1
    seen = []
    first = "".join(u[0] for u in units)
    seen.append(first)
    for _ in range(40):
        cand = "".join(rng.choice(u) for u in units)
        if cand and cand not in seen:
            seen.append(cand)
        if len(seen) >= limit:
            break
    return seen


ENGLISH_WORDS = sorted(set("""
put pit pat pot pet please people thanks thank you your what when where why how good great
friend friends house book food water work market car tea city room brother mother morning
story office movie small big new beautiful hot eats reads watches drinks does writes makes
drives lives goes sleeps sits very yesterday today tomorrow really love like know think
because before after again always never something nothing everyone someone tonight weekend
message phone call later sorry happy birthday awesome cool right wrong same with without
about actually little school college party music dance coffee lunch dinner time money
""".split()))


def english_lm_corpus(rng, n):
    return [" ".join(tok.form.lower() for tok in s.tokens)
            for s in monolingual(rng, "en", n, "lm")]


def main():
    rng = random.Random(1457)
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "toy_hi.conllu").write_text(write_conllu(monolingual(rng, "hi", 20, "hi")), encoding="utf-8")
    (DATA / "toy_en.conllu").write_text(write_conllu(monolingual(rng, "en", 20, "en")), encoding="utf-8")
    (DATA / "cm_fixture.conllu").write_text(write_conllu(code_mixed(rng, 30, "cm")), encoding="utf-8")
    (DATA / "lid_train.conllu").write_text(
        write_conllu(code_mixed(rng, 40, "lid") + monolingual(rng, "hi", 10, "lidhi")
                     + monolingual(rng, "en", 10, "liden")), encoding="utf-8")
    pairs = []
    for word in DEVANAGARI_WORDS:
        for roman in romanizations(word, rng):
            pairs.append((roman, word))
    (DATA / "translit_hi.tsv").write_text("".join(f"{a}\t{b}\n" for a, b in pairs), encoding="utf-8")
    (DATA / "english_words.txt").write_text("\n".join(ENGLISH_WORDS) + "\n", encoding="utf-8")
    (DATA / "lm_en.txt").write_text("\n".join(english_lm_corpus(rng, 300)) + "\n", encoding="utf-8")
    print(f"{len(pairs)} transliteration pairs, {len(ENGLISH_WORDS)} English words")


if __name__ == "__main__":
    main()
