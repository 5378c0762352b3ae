"""Model construction + training for the three classifier heads."""
from __future__ import annotations

import logging
from typing import Iterable, Optional, Sequence

from . import arceager, lid, pos
from .conllu import Sentence
from .embeddings import EmbeddingTable
from .metrics import attachment_scores, label_prf, pos_accuracy
from .network import FeedForwardModel, TrainerConfig, TrainResult, train
from .segment import resolve_languages

log = logging.getLogger(__name__)

PARSER_BATCH = 256
TAGGER_BATCH = 32


def train_parser(treebank: Sequence[Sentence], config: TrainerConfig,
                 multilingual: bool = False, default_lang: Optional[str] = None,
                 extra_deprels: Iterable[str] = (), hidden_size: int = 200,
                 dev: Optional[Sequence[Sentence]] = None,
                 word_vectors: Optional[EmbeddingTable] = None) -> TrainResult:
    """Train a transition classifier on oracle sequences.

    ``multilingual`` adds a language-vector input per feature node; tokens
    without hi/en tags take ``default_lang``.
    """
    langs_for = (lambda s: resolve_languages(s, default_lang)) if multilingual else None
    examples = arceager.training_examples(treebank, langs_for)
    model = arceager.build_parser_model(treebank, use_lang=multilingual, extra_deprels=extra_deprels,
                                        hidden_size=hidden_size, seed=config.seed,
                                        word_vectors=word_vectors)
    dev_eval = None
    if dev:
        def dev_eval(m: FeedForwardModel) -> float:
            pred = [arceager.greedy_parse(m, s, langs_for(s) if langs_for else None) for s in dev]
            return attachment_scores(dev, pred)[1]
    return train(model, examples, config, dev_eval)


def train_tagger(corpus: Sequence[Sentence], config: TrainerConfig, multilingual: bool = False,
                 default_lang: Optional[str] = None, hidden_size: int = 200,
                 dev: Optional[Sequence[Sentence]] = None,
                 word_vectors: Optional[EmbeddingTable] = None) -> TrainResult:
    examples = pos.training_examples(corpus, use_lang=multilingual, default_lang=default_lang)
    model = pos.build_pos_model(examples, use_lang=multilingual, hidden_size=hidden_size,
                                seed=config.seed, word_vectors=word_vectors)
    dev_eval = None
    if dev:
        def dev_eval(m: FeedForwardModel) -> float:
            pred = []
            for s in dev:
                words = [t.norm.lower() for t in s.tokens]
                langs = resolve_languages(s, default_lang) if multilingual else None
                out = s.copy()
                for tok, tag in zip(out.tokens, pos.tag_span(m, words, langs)):
                    tok.upos = tag
                pred.append(out)
            return pos_accuracy(dev, pred, all_tokens=True)["total"]
    return train(model, examples, config, dev_eval)


def train_lid(corpus: Sequence[Sentence], config: TrainerConfig, hidden_size: int = 200,
              dev: Optional[Sequence[Sentence]] = None,
              word_vectors: Optional[EmbeddingTable] = None) -> TrainResult:
    examples = lid.training_examples(corpus)
    model = lid.build_lid_model(examples, hidden_size=hidden_size, seed=config.seed,
                                word_vectors=word_vectors)
    dev_eval = None
    if dev:
        def dev_eval(m: FeedForwardModel) -> float:
            gold = [t.lang for s in dev for t in s.tokens]
            pred = [t.lang for s in dev for t in lid.tag_languages(m, s).tokens]
            return label_prf(gold, pred)[1]
    return train(model, examples, config, dev_eval)
