import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from codemix.conllu import load
from codemix.network import TrainerConfig
from codemix.training import train_parser

DATA = Path(__file__).resolve().parents[1] / "src" / "codemix" / "data"

# Desk-scale parser settings: the toy treebanks are tiny, so no dropout and a
# larger step size than the full-scale defaults.
TOY_CONFIG = dict(learning_rate=0.05, batch_size=16, dropout_prob=0.0, epochs=50, seed=0)

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, text): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    number = getattr(report, "_acceptance", None)
    if number is None:
        return
    prev = _acceptance.get(number[0], (number[1], "PASS"))
    ok = prev[1] == "PASS" and report.outcome == "passed"
    _acceptance[number[0]] = (number[1], "PASS" if ok else "FAIL")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result()._acceptance = marker.args


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        text, status = _acceptance[number]
        terminalreporter.write_line(f"[{status}] {number:>2}. {text}")


@pytest.fixture(scope="session")
def toy_hi():
    return load(DATA / "toy_hi.conllu")


@pytest.fixture(scope="session")
def toy_en():
    return load(DATA / "toy_en.conllu")


@pytest.fixture(scope="session")
def cm_fixture():
    return load(DATA / "cm_fixture.conllu")


@pytest.fixture(scope="session")
def toy_parsers(toy_hi, toy_en):
    """hi, en and multilingual parsers sharing one transition inventory."""
    rels = {t.deprel for s in toy_hi + toy_en for t in s.tokens}
    cfg = TrainerConfig(**TOY_CONFIG)
    hi = train_parser(toy_hi, cfg, extra_deprels=rels).model
    en = train_parser(toy_en, cfg, extra_deprels=rels).model
    multi = train_parser(toy_hi + toy_en, cfg, multilingual=True, extra_deprels=rels).model
    return {"hi": hi, "en": en, "multi": multi}
