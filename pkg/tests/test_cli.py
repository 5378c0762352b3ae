import io
import re
import sys

import pytest

from codemix import arceager, cli
from codemix.conllu import load, write_conllu
from codemix.network import TrainerConfig, save_model_file
from codemix.normalize import read_arpa
from codemix.training import train_lid, train_tagger
from conftest import DATA, TOY_CONFIG

TOY_FLAGS = ["--learning-rate", "0.05", "--batch-size", "16", "--dropout", "0", "--seed", "0"]
MIXING5 = str(DATA.parents[2] / "tests" / "data" / "mixing5.conllu")


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def model_files(tmp_path_factory, toy_parsers):
    d = tmp_path_factory.mktemp("models")
    paths = {}
    for name, model in toy_parsers.items():
        paths[name] = d / f"parser_{name}.bin"
        save_model_file(model, paths[name])
    # same data, no shared deprel inventory: cannot be interpolated with the en parser
    paths["hi_own"] = d / "parser_hi_own.bin"
    save_model_file(arceager.build_parser_model(load(DATA / "toy_hi.conllu"), hidden_size=8), paths["hi_own"])
    return paths


def pipeline_args(model_files, extra=()):
    return ["pipeline", "--input", DATA / "cm_fixture.conllu", "--gold-lid", "--gold-pos",
            "--parser-hi", model_files["hi"], "--parser-en", model_files["en"],
            "--parser-multi", model_files["multi"], *extra]


class TestTraining:
    def test_train_parser_overfits(self, tmp_path, capsys):
        out_path = tmp_path / "p.bin"
        code, out, _ = run(["train-parser", "--train", DATA / "toy_hi.conllu", "--out", out_path,
                            "--epochs", TOY_CONFIG["epochs"], *TOY_FLAGS], capsys)
        assert code == 0 and out_path.exists()
        uas = float(re.search(r"train UAS ([\d.]+)", out).group(1))
        assert uas >= 95.0
        assert out.count("\nepoch ") + out.startswith("epoch ") == TOY_CONFIG["epochs"]
        assert "best epoch" in out

    def test_train_lm_writes_arpa(self, tmp_path, capsys):
        out_path = tmp_path / "en.arpa"
        code, _, _ = run(["train-lm", "--corpus", DATA / "lm_en.txt", "--out", out_path], capsys)
        assert code == 0
        lm = read_arpa(out_path.read_text(encoding="utf-8"))
        assert 0 < lm.prob("the", ["<s>"]) < 1

    def test_train_translit_pairs(self, tmp_path, capsys):
        pairs = tmp_path / "pairs.tsv"
        pairs.write_text("pt\tput\nput\tput\nct\tcat\ncat\tcat\n", encoding="utf-8")
        out_path = tmp_path / "t.json"
        code, _, _ = run(["train-translit", "--pairs", pairs, "--epochs", 2, "--out", out_path], capsys)
        assert code == 0 and '"codemix-transducer"' in out_path.read_text(encoding="utf-8")

    def test_train_translit_needs_one_source(self, tmp_path, capsys):
        code, _, err = run(["train-translit", "--out", tmp_path / "t.json"], capsys)
        assert code == 2 and "--pairs" in err

    def test_bad_pairs_file(self, tmp_path, capsys):
        pairs = tmp_path / "pairs.tsv"
        pairs.write_text("only-one-column\n", encoding="utf-8")
        code, _, err = run(["train-translit", "--pairs", pairs, "--out", tmp_path / "t.json"], capsys)
        assert code == 3 and "line 1" in err


class TestErrors:
    def test_missing_file_names_path(self, tmp_path, capsys):
        code, _, err = run(["train-parser", "--train", "nope.conllu", "--out", tmp_path / "x"], capsys)
        assert code == 2 and "nope.conllu" in err

    def test_unknown_subcommand(self, capsys):
        code, _, _ = run(["frobnicate"], capsys)
        assert code == 2

    def test_invalid_conllu(self, tmp_path, capsys):
        bad = tmp_path / "bad.conllu"
        bad.write_text("1\ta\n\n", encoding="utf-8")
        code, _, err = run(["stats", bad], capsys)
        assert code == 3 and "bad.conllu" in err

    def test_token_count_mismatch(self, tmp_path, capsys):
        gold = load(DATA / "toy_hi.conllu")
        pred = load(DATA / "toy_hi.conllu")
        # drop a final leaf so the shortened sentence is still a valid tree
        k = next(i for i, s in enumerate(pred)
                 if len(s) > 1 and s.tokens[-1].head != 0
                 and all(t.head != len(s) for t in s.tokens))
        pred[k].tokens.pop()
        path = tmp_path / "short.conllu"
        with open(path, "w", encoding="utf-8") as f:
            write_conllu(pred, f)
        code, _, err = run(["evaluate", "--gold", DATA / "toy_hi.conllu", "--pred", path], capsys)
        assert code == 3
        assert gold[k].sent_id in err

    def test_incompatible_interpolation(self, model_files, capsys):
        args = pipeline_args(model_files)
        args[args.index("--parser-hi") + 1] = model_files["hi_own"]
        code, _, err = run(args + ["--strategy", "interpolated"], capsys)
        assert code == 4 and "interpolate" in err

    def test_not_a_model_file(self, model_files, tmp_path, capsys):
        junk = tmp_path / "junk.bin"
        junk.write_bytes(b"hello")
        args = pipeline_args(model_files)
        args[args.index("--parser-hi") + 1] = junk
        code, _, err = run(args, capsys)
        assert code in (3, 4) and "junk.bin" in err


class TestEvaluate:
    def test_self_evaluation_perfect(self, capsys):
        code, out, _ = run(["evaluate", "--gold", DATA / "toy_en.conllu", "--pred", DATA / "toy_en.conllu",
                            "--format", "kv"], capsys)
        assert code == 0 and out == "UAS=100.00\nLAS=100.00\n"

    def test_lid_table(self, capsys):
        code, out, _ = run(["evaluate", "--metric", "lid", "--gold", DATA / "cm_fixture.conllu",
                            "--pred", DATA / "cm_fixture.conllu"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].split() == ["Label", "Precision", "Recall", "F1", "Count"]
        rows = {l.split()[0]: l.split()[1:] for l in lines[1:-1]}
        assert {"hi", "en"} <= set(rows)
        assert all(r[:3] == ["1.000"] * 3 for r in rows.values())
        assert lines[-1].split() == ["Accuracy", "1.000"]

    def test_pos_report(self, capsys):
        code, out, _ = run(["evaluate", "--metric", "pos", "--gold", DATA / "cm_fixture.conllu",
                            "--pred", DATA / "cm_fixture.conllu", "--format", "kv"], capsys)
        assert code == 0 and out == "hi=100.00\nen=100.00\ntotal=100.00\n"

    def test_output_file(self, tmp_path, capsys):
        target = tmp_path / "report.txt"
        code, out, _ = run(["evaluate", "--gold", DATA / "toy_en.conllu", "--pred", DATA / "toy_en.conllu",
                            "--output", target], capsys)
        assert code == 0 and out == "" and "UAS" in target.read_text()


class TestPipeline:
    @pytest.mark.parametrize("strategy", ["monolingual", "multipass-f", "multipass-s", "interpolated",
                                          "multilingual"])
    def test_every_strategy_writes_trees(self, strategy, model_files, tmp_path, capsys):
        target = tmp_path / "out.conllu"
        code, _, _ = run(pipeline_args(model_files, ["--strategy", strategy, "--output", target]), capsys)
        assert code == 0
        out = load(target)
        gold = load(DATA / "cm_fixture.conllu")
        assert [s.sent_id for s in out] == [s.sent_id for s in gold]
        assert all(len(s) == len(g) for s, g in zip(out, gold))

    def test_deterministic_across_threads(self, model_files, capsys):
        code1, one, _ = run(pipeline_args(model_files, ["--threads", 1]), capsys)
        code3, three, _ = run(pipeline_args(model_files, ["--threads", 3]), capsys)
        assert code1 == code3 == 0
        assert one == three
        code, again, _ = run(pipeline_args(model_files, ["--threads", 3]), capsys)
        assert again == one

    def test_missing_parser(self, model_files, capsys):
        code, _, err = run(["pipeline", "--input", DATA / "cm_fixture.conllu", "--gold-lid", "--gold-pos",
                            "--parser-hi", model_files["hi"]], capsys)
        assert code == 2 and "--parser-en" in err

    def test_raw_input_from_stdin(self, model_files, tmp_path, capsys, monkeypatch):
        """Raw text through LID, POS and parsing with quickly trained models."""
        fast = TrainerConfig(**{**TOY_CONFIG, "epochs": 3})
        lid_path, pos_hi, pos_en = tmp_path / "lid.bin", tmp_path / "pos_hi.bin", tmp_path / "pos_en.bin"
        save_model_file(train_lid(load(DATA / "lid_train.conllu"), fast, hidden_size=16).model, lid_path)
        save_model_file(train_tagger(load(DATA / "toy_hi.conllu"), fast, hidden_size=16).model, pos_hi)
        save_model_file(train_tagger(load(DATA / "toy_en.conllu"), fast, hidden_size=16).model, pos_en)
        monkeypatch.setattr(sys, "stdin", io.StringIO("mera ghar is big\nthe city bahut bada hai\n"))
        code, out, _ = run(["pipeline", "--input", "-", "--input-format", "raw", "--lid", lid_path,
                            "--pos-hi", pos_hi, "--pos-en", pos_en, "--parser-hi", model_files["hi"],
                            "--parser-en", model_files["en"], "--strategy", "multipass-s"], capsys)
        assert code == 0
        sentences = [b for b in out.strip().split("\n\n") if b]
        assert len(sentences) == 2
        rows = [l.split("\t") for l in sentences[0].splitlines() if not l.startswith("#")]
        assert [r[1] for r in rows] == ["mera", "ghar", "is", "big"]
        assert sum(r[6] == "0" for r in rows) == 1


class TestConfigAndStats:
    def test_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "train.cfg"
        cfg.write_text("# toy run\nepochs = 1\nhidden_size = 8\nlearning_rate = 0.05\n", encoding="utf-8")
        code, out, _ = run(["train-parser", "--config", cfg, "--train", DATA / "toy_en.conllu",
                            "--out", tmp_path / "a.bin"], capsys)
        assert code == 0 and len(re.findall(r"^epoch \d", out, re.M)) == 1
        code, out, _ = run(["train-parser", "--config", cfg, "--train", DATA / "toy_en.conllu",
                            "--out", tmp_path / "b.bin", "--epochs", 2], capsys)
        assert code == 0 and len(re.findall(r"^epoch \d", out, re.M)) == 2

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("epoch = 3\n", encoding="utf-8")
        code, _, err = run(["train-parser", "--config", cfg, "--train", DATA / "toy_en.conllu",
                            "--out", tmp_path / "a.bin"], capsys)
        assert code == 2 and "'epoch'" in err

    def test_stats_mixing_ratio(self, capsys):
        code, out, _ = run(["stats", MIXING5, "--format", "kv"], capsys)
        assert code == 0
        assert out.splitlines() == ["sentences=5", "tokens=21", "mixing_ratio=0.5500"]

    def test_bare_names_resolve_to_shipped_data(self, monkeypatch, capsys):
        monkeypatch.delenv("CODEMIX_DATA_DIR", raising=False)
        monkeypatch.chdir(DATA.parents[2])
        code, out, _ = run(["stats", "toy_en.conllu", "--format", "kv"], capsys)
        assert code == 0 and out.startswith("sentences=")

    def test_data_dir_from_environment(self, monkeypatch, tmp_path, capsys):
        (tmp_path / "mine.conllu").write_text((DATA / "toy_en.conllu").read_text(encoding="utf-8"),
                                              encoding="utf-8")
        monkeypatch.setenv("CODEMIX_DATA_DIR", str(tmp_path))
        monkeypatch.chdir(DATA.parents[2])
        code, out, _ = run(["stats", "mine.conllu", "--format", "kv"], capsys)
        assert code == 0 and out.startswith("sentences=")
