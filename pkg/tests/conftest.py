import os
import sys

import pytest

from bxsynth.surface import parse_spec
from bxsynth.typecheck import build_input

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "bxsynth", "corpus")
REFERENCE = os.path.join(CORPUS, "reference")


def corpus_path(name: str, reference: bool = False) -> str:
    return os.path.join(REFERENCE if reference else CORPUS, name + ".bxs")


def load(name: str, reference: bool = False):
    path = corpus_path(name, reference)
    with open(path, encoding="utf-8") as fh:
        spec = parse_spec(fh.read(), path)
    return spec, build_input(spec, require_examples=not reference)


@pytest.fixture
def append_ref():
    return load("appendB", reference=True)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda l: int(l.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
