"""Independent reference implementations and generators used by the tests."""
import itertools
import math
import random

from codemix.arceager import is_projective
from codemix.conllu import Sentence, Token
from codemix.normalize.lm import BOS, EOS

UPOS = ("NOUN", "VERB", "ADP", "DET", "ADJ", "PRON", "AUX", "PART", "ADV", "PUNCT")
RELS = ("nsubj", "obj", "obl", "det", "amod", "case", "aux", "advmod", "punct")


def random_projective_heads(n, rng):
    """Uniform-ish random single-rooted projective tree as a 1-based head list."""
    heads = [None] * (n + 1)

    def fill(lo, hi, head):
        # split [lo, hi] into contiguous blocks, each headed by a node attached to ``head``
        pos = lo
        while pos <= hi:
            end = rng.randint(pos, hi)
            r = rng.randint(pos, end)
            heads[r] = head
            fill(pos, r - 1, r)
            fill(r + 1, end, r)
            pos = end + 1

    root = rng.randint(1, n)
    heads[root] = 0
    fill(1, root - 1, root)
    fill(root + 1, n, root)
    return heads[1:]


def is_tree(heads):
    if sum(1 for h in heads if h == 0) != 1:
        return False
    for d in range(1, len(heads) + 1):
        seen, node = set(), d
        while node != 0:
            if node in seen:
                return False
            seen.add(node)
            node = heads[node - 1]
    return True


def all_projective_trees(n):
    for heads in itertools.product(range(n + 1), repeat=n):
        if any(h == d for d, h in enumerate(heads, start=1)):
            continue
        if is_tree(heads) and is_projective(heads):
            yield list(heads)


def sentence_from_heads(heads, rng, langs=None):
    tokens = []
    for i, h in enumerate(heads, start=1):
        lang = langs[i - 1] if langs else rng.choice(("hi", "en"))
        tokens.append(Token(i, f"w{rng.randint(0, 30)}", upos=rng.choice(UPOS), head=h,
                            deprel="root" if h == 0 else rng.choice(RELS), lang=lang))
    return Sentence(tokens, sent_id="rand")


def brute_force_decode(lattice, lm, eos=True):
    """argmax over every candidate combination; ties to the smallest rank tuple."""
    best, best_ranks = -math.inf, None
    for ranks in itertools.product(*(range(len(c)) for c in lattice)):
        words = [lattice[i][r] for i, r in enumerate(ranks)]
        hist = [BOS]
        score = 0.0
        for w in words + ([EOS] if eos else []):
            score += lm.logprob(w, hist)
            hist.append(w)
        if score > best:  # product order is lexicographic, so ties keep the first
            best, best_ranks = score, ranks
    return [lattice[i][r] for i, r in enumerate(best_ranks)], best


def random_corpus(rng, vocab, n_sent=40, max_len=8):
    return [[rng.choice(vocab) for _ in range(rng.randint(1, max_len))] for _ in range(n_sent)]


def set_seed(seed):
    return random.Random(seed)
