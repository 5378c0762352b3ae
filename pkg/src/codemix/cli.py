"""Command-line entry point: training, the parsing pipeline and evaluation.

Exit codes: 0 ok, 2 usage or file error, 3 data validation error,
4 incompatible models.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import arceager, lid, pos, strategies
from .conllu import ConlluError, Sentence, mixing_ratio, read_conllu, write_conllu
from .embeddings import load_embeddings
from .metrics import (AlignmentError, check_aligned, attachment_scores, flatten_langs, label_prf,
                      pos_accuracy)
from .network import ModelFormatError, TrainerConfig, load_model_file, save_model_file
from .normalize import (TransducerModel, generate_noisy_pairs, normalize_sentence, read_arpa,
                        train_lm, train_transducer)
from .normalize.transducer import BEAM_WIDTH, greedy_transduce
from .segment import resolve_languages, segment_fragments
from .training import train_lid, train_parser, train_tagger

log = logging.getLogger("codemix")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MODEL = 0, 2, 3, 4
DATA_ENV = "CODEMIX_DATA_DIR"


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


# -- files -------------------------------------------------------------------

def data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("codemix").joinpath("data")))


def resolve(path: str) -> Path:
    """An existing path as given, else the same name under the data directory."""
    p = Path(path)
    if p.exists():
        return p
    alt = data_dir() / path
    if not p.is_absolute() and alt.exists():
        return alt
    raise CliError(f"file not found: {path}")


def read_treebanks(paths: Sequence[str]) -> list:
    return [s for path in paths for s in read_treebank(path)]


def read_treebank(path: str) -> list:
    p = resolve(path)
    try:
        with open(p, encoding="utf-8") as f:
            return read_conllu(f)
    except ConlluError as exc:
        raise CliError(f"{p}: {exc}", EXIT_DATA) from None


def read_model(path: str):
    p = resolve(path)
    try:
        return load_model_file(p)
    except ModelFormatError as exc:
        raise CliError(f"{p}: {exc}", EXIT_DATA) from None


def read_transducer(path: str) -> TransducerModel:
    p = resolve(path)
    try:
        with open(p, encoding="utf-8") as f:
            return TransducerModel.load(f)
    except (ValueError, KeyError) as exc:
        raise CliError(f"{p}: {exc}", EXIT_DATA) from None


def read_lines(path: str) -> list:
    with open(resolve(path), encoding="utf-8") as f:
        return [line.split() for line in f if line.strip()]


def read_raw(text: str) -> list:
    """One sentence per line, whitespace-tokenized."""
    out = []
    for k, line in enumerate(l for l in text.splitlines() if l.strip()):
        out.append(Sentence.from_forms(line.split(), sent_id=str(k + 1)))
        out[-1].raw_text = line.strip()
    return out


def read_pairs(path: str) -> list:
    pairs = []
    with open(resolve(path), encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise CliError(f"{path}: line {lineno}: expected two tab-separated words", EXIT_DATA)
            pairs.append((parts[0], parts[1]))
    if not pairs:
        raise CliError(f"{path}: no training pairs", EXIT_DATA)
    return pairs


def write_output(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


# -- config --------------------------------------------------------------------

def read_config(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment.  Dashes in keys become underscores."""
    values = {}
    with open(resolve(path), encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}: line {lineno}: expected key = value")
            key, value = (x.strip() for x in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def apply_config(parser: argparse.ArgumentParser, argv: Sequence[str],
                 config: dict) -> argparse.Namespace:
    """Re-parse ``argv`` with config values as defaults, so explicit flags win."""
    actions = {a.dest: a for a in parser._actions}
    defaults = {}
    for key, value in config.items():
        action = actions.get(key)
        if action is None or key in ("help", "config", "command"):
            raise CliError(f"unknown config key {key!r} for {parser.prog}")
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            low = value.lower()
            if low not in _TRUE | _FALSE:
                raise CliError(f"config key {key!r}: expected a boolean, got {value!r}")
            defaults[key] = low in _TRUE
        elif action.nargs in ("*", "+"):
            defaults[key] = [action.type(v) if action.type else v for v in value.split()]
        else:
            if action.choices is not None and value not in [str(c) for c in action.choices]:
                raise CliError(f"config key {key!r}: invalid choice {value!r}")
            defaults[key] = value  # argparse converts string defaults with the action's type
    parser.set_defaults(**defaults)
    return parser.parse_args(argv)


# -- training ----------------------------------------------------------------

def trainer_config(args) -> TrainerConfig:
    try:
        return TrainerConfig(learning_rate=args.learning_rate, l2_lambda=args.l2,
                             dropout_prob=args.dropout, batch_size=args.batch_size,
                             epochs=args.epochs, seed=args.seed)
    except ValueError as exc:
        raise CliError(f"invalid training configuration: {exc}") from None


def report_epochs(result, metric: str) -> None:
    for k, loss in enumerate(result.losses, start=1):
        line = f"epoch {k}\tloss {loss:.6f}"
        if result.dev_scores:
            line += f"\tdev-{metric} {result.dev_scores[k - 1]:.4f}"
        print(line)
    print(f"best epoch {result.best_epoch}")


def word_vectors(args):
    if not args.embeddings:
        return None
    try:
        with open(resolve(args.embeddings), encoding="utf-8") as f:
            return load_embeddings(f, seed=args.seed)
    except ValueError as exc:
        raise CliError(f"{args.embeddings}: {exc}", EXIT_DATA) from None


def cmd_train_parser(args) -> int:
    treebank = read_treebanks(args.train)
    dev = read_treebank(args.dev) if args.dev else None
    extra = set()
    for path in args.extra_deprels_from:
        extra.update(t.deprel for s in read_treebank(path) for t in s.tokens)
    try:
        result = train_parser(treebank, trainer_config(args), multilingual=args.multilingual,
                              default_lang=args.default_lang, extra_deprels=extra,
                              hidden_size=args.hidden_size, dev=dev, word_vectors=word_vectors(args))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_DATA) from None
    report_epochs(result, "las")
    pred = [arceager.greedy_parse(result.model, s, _langs(s, args) if args.multilingual else None)
            for s in treebank]
    uas, las = attachment_scores(treebank, pred)
    print(f"train UAS {uas:.2f}\tLAS {las:.2f}")
    save_model_file(result.model, args.out)
    return EXIT_OK


def _langs(sentence, args):
    return resolve_languages(sentence, args.default_lang)


def cmd_train_pos(args) -> int:
    corpus = read_treebanks(args.train)
    dev = read_treebank(args.dev) if args.dev else None
    try:
        result = train_tagger(corpus, trainer_config(args), multilingual=args.multilingual,
                              default_lang=args.default_lang, hidden_size=args.hidden_size,
                              dev=dev, word_vectors=word_vectors(args))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_DATA) from None
    report_epochs(result, "acc")
    save_model_file(result.model, args.out)
    return EXIT_OK


def cmd_train_lid(args) -> int:
    corpus = read_treebanks(args.train)
    dev = read_treebank(args.dev) if args.dev else None
    try:
        result = train_lid(corpus, trainer_config(args), hidden_size=args.hidden_size, dev=dev,
                           word_vectors=word_vectors(args))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_DATA) from None
    report_epochs(result, "acc")
    save_model_file(result.model, args.out)
    return EXIT_OK


def cmd_train_translit(args) -> int:
    if bool(args.pairs) == bool(args.clean_words):
        raise CliError("give exactly one of --pairs or --clean-words")
    if args.pairs:
        pairs = read_pairs(args.pairs)
    else:
        words = [w for line in read_lines(args.clean_words) for w in line]
        # clean words must also map to themselves
        pairs = [(w, w) for w in words] + generate_noisy_pairs(words, seed=args.seed,
                                                              variants=args.variants)
    model = train_transducer(pairs, epochs=args.epochs, seed=args.seed, beam=args.beam)
    correct = sum(greedy_transduce(model, src)[0] == tgt for src, tgt in pairs)
    print(f"pairs {len(pairs)}\ttrain top-1 accuracy {correct / len(pairs):.4f}")
    with open(args.out, "w", encoding="utf-8") as f:
        model.save(f)
    return EXIT_OK


def cmd_train_lm(args) -> int:
    corpus = read_lines(args.corpus)
    try:
        lm = train_lm(corpus)
    except ValueError as exc:
        raise CliError(f"{args.corpus}: {exc}", EXIT_DATA) from None
    with open(args.out, "w", encoding="utf-8") as f:
        lm.write_arpa(f)
    print(f"sentences {len(corpus)}\tvocabulary {len(lm.vocab)}")
    return EXIT_OK


# -- pipeline ----------------------------------------------------------------

class Pipeline:
    """Loaded models plus the per-sentence processing chain."""

    def __init__(self, args):
        self.args = args
        self.lid = None if args.gold_lid else read_model(_need(args.lid, "--lid"))
        self.transducers = {}
        if args.translit_hi:
            self.transducers["hi"] = read_transducer(args.translit_hi)
        if args.normalize_en:
            self.transducers["en"] = read_transducer(args.normalize_en)
        self.lm = None
        if args.lm:
            with open(resolve(args.lm), encoding="utf-8") as f:
                try:
                    self.lm = read_arpa(f)
                except ValueError as exc:
                    raise CliError(f"{args.lm}: {exc}", EXIT_DATA) from None
        self.pos_models = {}
        self.pos_multi = None
        if not args.gold_pos:
            if args.pos_mode == "multilingual":
                self.pos_multi = read_model(_need(args.pos_multi, "--pos-multi"))
            else:
                self.pos_models = {"hi": read_model(_need(args.pos_hi, "--pos-hi")),
                                   "en": read_model(_need(args.pos_en, "--pos-en"))}
        self.parsers = {}
        self.multilingual = None
        if args.strategy == "multilingual":
            self.multilingual = read_model(_need(args.parser_multi, "--parser-multi"))
        else:
            self.parsers = {"hi": read_model(_need(args.parser_hi, "--parser-hi")),
                            "en": read_model(_need(args.parser_en, "--parser-en"))}
        if args.strategy == "interpolated":
            try:
                strategies.check_compatible(self.parsers)
            except strategies.IncompatibleModels as exc:
                raise CliError(f"cannot interpolate these parsers: {exc}", EXIT_MODEL) from None
        try:
            self.cfg = strategies.InterpolationConfig(lambda_m=args.lambda_m)
        except ValueError as exc:
            raise CliError(str(exc)) from None

    def process(self, sentence: Sentence) -> Sentence:
        args = self.args
        if args.gold_lid:
            missing = [t.index for t in sentence.tokens if not t.lang]
            if missing:
                raise CliError(f"sentence {sentence.sent_id}: --gold-lid but tokens {missing} "
                               "have no Lang tag", EXIT_DATA)
            out = sentence.copy()
        else:
            out = lid.tag_languages(self.lid, sentence)
        if self.transducers:
            out = normalize_sentence(out, self.transducers, self.lm, args.beam)
        if not any(t.lang in ("hi", "en") for t in out.tokens):
            # nothing to segment on: treat the sentence as the default language
            for t in out.tokens:
                t.lang = args.default_lang
        seg = segment_fragments(out)
        if args.gold_pos:
            if any(t.upos in ("", "_") for t in out.tokens):
                raise CliError(f"sentence {sentence.sent_id}: --gold-pos but some tokens lack UPOS",
                               EXIT_DATA)
        elif self.pos_multi is not None:
            out = pos.tag_pos_multilingual(self.pos_multi, out, seg)
        else:
            out = pos.tag_pos_monolingual(self.pos_models, out, seg)
        return strategies.parse(args.strategy, out, self.parsers, self.multilingual, self.cfg)

    def run(self, sentences: Sequence[Sentence]) -> list:
        if self.args.threads > 1:
            with ThreadPoolExecutor(self.args.threads) as pool:
                return list(pool.map(self.process, sentences))  # map keeps input order
        return [self.process(s) for s in sentences]


def _need(value, flag: str):
    if not value:
        raise CliError(f"missing required model: {flag}")
    return value


def cmd_pipeline(args) -> int:
    if args.threads < 1:
        raise CliError("--threads must be at least 1")
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(resolve(args.input), encoding="utf-8") as f:
            text = f.read()
    if args.input_format == "raw":
        sentences = read_raw(text)
    else:
        try:
            sentences = read_conllu(text)
        except ConlluError as exc:
            raise CliError(f"{args.input}: {exc}", EXIT_DATA) from None
    pipeline = Pipeline(args)
    write_output(write_conllu(pipeline.run(sentences)), args.output)
    return EXIT_OK


# -- evaluation / stats --------------------------------------------------------

def _format(rows: list, fmt: str) -> str:
    """``rows`` are (key, value) pairs; text output aligns them."""
    if fmt == "kv":
        return "".join(f"{k}={v}\n" for k, v in rows)
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in rows)


def cmd_evaluate(args) -> int:
    gold = read_treebank(args.gold)
    pred = read_treebank(args.pred)
    try:
        if args.metric == "attachment":
            uas, las = attachment_scores(gold, pred, ignore_punct=args.ignore_punct)
            text = _format([("UAS", f"{uas:.2f}"), ("LAS", f"{las:.2f}")], args.format)
        elif args.metric == "pos":
            acc = pos_accuracy(gold, pred, all_tokens=args.all_tokens)
            text = _format([(k, f"{100 * acc[k]:.2f}") for k in ("hi", "en", "total") if k in acc],
                           args.format)
        else:
            check_aligned(gold, pred)
            report, acc = label_prf(flatten_langs(gold), flatten_langs(pred))
            text = _lid_report(report, acc, args.format)
    except AlignmentError as exc:
        raise CliError(str(exc), EXIT_DATA) from None
    write_output(text, args.output)
    return EXIT_OK


def _lid_report(report: dict, accuracy: float, fmt: str) -> str:
    if fmt == "kv":
        rows = []
        for label, s in report.items():
            rows += [(f"{label}.precision", f"{s.precision:.3f}"), (f"{label}.recall", f"{s.recall:.3f}"),
                     (f"{label}.f1", f"{s.f1:.3f}"), (f"{label}.count", str(s.count))]
        rows.append(("accuracy", f"{accuracy:.3f}"))
        return _format(rows, "kv")
    lines = [f"{'Label':<8}{'Precision':>10}{'Recall':>10}{'F1':>10}{'Count':>8}"]
    for label, s in report.items():
        lines.append(f"{label:<8}{s.precision:>10.3f}{s.recall:>10.3f}{s.f1:>10.3f}{s.count:>8d}")
    lines.append(f"{'Accuracy':<8}{accuracy:>30.3f}")
    return "\n".join(lines) + "\n"


def cmd_stats(args) -> int:
    corpus = read_treebank(args.treebank)
    try:
        ratio = mixing_ratio(corpus)
    except ValueError as exc:
        raise CliError(f"{args.treebank}: {exc}", EXIT_DATA) from None
    tokens = sum(map(len, corpus))
    print(_format([("sentences", str(len(corpus))), ("tokens", str(tokens)),
                   ("mixing_ratio", f"{ratio:.4f}")], args.format), end="")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------

def _add_trainer_flags(p: argparse.ArgumentParser, epochs: int = 20) -> None:
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--l2", type=float, default=1e-8, help="l2 regularization strength")
    p.add_argument("--dropout", type=float, default=0.5)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epochs", type=int, default=epochs)
    p.add_argument("--hidden-size", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embeddings", help="word2vec-style text vectors used to initialize word embeddings")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="codemix",
                                 description="Parse code-mixed Hindi-English text with monolingual resources.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def command(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="flat key = value file; command-line flags take precedence")
        p.set_defaults(func=func)
        return p

    p = command("train-parser", cmd_train_parser, "train an arc-eager parser")
    p.add_argument("--train", required=True, nargs="+", metavar="TREEBANK")
    p.add_argument("--dev")
    p.add_argument("--out", required=True)
    p.add_argument("--multilingual", action="store_true", help="add language-tag inputs")
    p.add_argument("--default-lang", choices=("hi", "en"), default=None,
                   help="language for training sentences without Lang tags")
    p.add_argument("--extra-deprels-from", nargs="*", default=[], metavar="TREEBANK",
                   help="include these treebanks' relations so label inventories match")
    _add_trainer_flags(p)

    p = command("train-pos", cmd_train_pos, "train a POS tagger")
    p.add_argument("--train", required=True, nargs="+", metavar="TREEBANK")
    p.add_argument("--dev")
    p.add_argument("--out", required=True)
    p.add_argument("--multilingual", action="store_true")
    p.add_argument("--default-lang", choices=("hi", "en"), default=None)
    _add_trainer_flags(p)

    p = command("train-lid", cmd_train_lid, "train a token-level language identifier")
    p.add_argument("--train", required=True, nargs="+", metavar="TREEBANK")
    p.add_argument("--dev")
    p.add_argument("--out", required=True)
    _add_trainer_flags(p)

    p = command("train-translit", cmd_train_translit, "train a normalization/transliteration transducer")
    p.add_argument("--pairs", help="TSV of source<TAB>target words")
    p.add_argument("--clean-words", help="clean word list; noisy variants are generated")
    p.add_argument("--variants", type=int, default=3)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--beam", type=int, default=BEAM_WIDTH)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = command("train-lm", cmd_train_lm, "train a trigram Kneser-Ney LM and write it as ARPA")
    p.add_argument("--corpus", required=True, help="one whitespace-tokenized sentence per line")
    p.add_argument("--out", required=True)

    p = command("pipeline", cmd_pipeline, "LID, normalization, POS tagging and parsing")
    p.add_argument("--input", required=True, help="input file or - for stdin")
    p.add_argument("--input-format", choices=("conllu", "raw"), default="conllu")
    p.add_argument("--output", help="output CoNLL-U file (default stdout)")
    p.add_argument("--strategy", choices=strategies.STRATEGIES, default="interpolated")
    p.add_argument("--lambda", dest="lambda_m", type=float, default=0.75,
                   help="weight of the matrix-language parser when interpolating")
    p.add_argument("--gold-lid", action="store_true", help="use the input's Lang tags")
    p.add_argument("--gold-pos", action="store_true", help="use the input's UPOS tags")
    p.add_argument("--lid")
    p.add_argument("--translit-hi", help="Roman-to-Devanagari transducer (normalization skipped if absent)")
    p.add_argument("--normalize-en", help="English normalization transducer")
    p.add_argument("--lm", help="ARPA language model for rescoring normalization candidates")
    p.add_argument("--beam", type=int, default=BEAM_WIDTH)
    p.add_argument("--pos-mode", choices=("monolingual", "multilingual"), default="monolingual")
    p.add_argument("--pos-hi")
    p.add_argument("--pos-en")
    p.add_argument("--pos-multi")
    p.add_argument("--parser-hi")
    p.add_argument("--parser-en")
    p.add_argument("--parser-multi")
    p.add_argument("--default-lang", choices=("hi", "en"), default="hi",
                   help="language for sentences without any hi/en token")
    p.add_argument("--threads", type=int, default=1)

    p = command("evaluate", cmd_evaluate, "score predictions against gold CoNLL-U")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--metric", choices=("attachment", "pos", "lid"), default="attachment")
    p.add_argument("--ignore-punct", action="store_true")
    p.add_argument("--all-tokens", action="store_true", help="POS total over every token, not just hi/en")
    p.add_argument("--format", choices=("text", "kv"), default="text")
    p.add_argument("--output")

    p = command("stats", cmd_stats, "corpus size and mixing ratio")
    p.add_argument("treebank")
    p.add_argument("--format", choices=("text", "kv"), default="text")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.config:
            sub = ap._subparsers._group_actions[0].choices[args.command]
            sub_argv = argv[argv.index(args.command) + 1:]
            args = apply_config(sub, sub_argv, read_config(args.config))
            args.verbose = getattr(args, "verbose", False)
        return args.func(args)
    except CliError as exc:
        print(f"codemix: error: {exc}", file=sys.stderr)
        return exc.code
    except SystemExit as exc:
        return int(exc.code or 0)
    except OSError as exc:
        print(f"codemix: error: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
