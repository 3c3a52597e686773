import pytest
from hypothesis import given, settings

from bxsynth.bx import run_get, run_put
from bxsynth.config import Config
from bxsynth.filtering import final_check, original_get
from bxsynth.surface import parse_spec
from bxsynth.synth import synthesize
from bxsynth.typecheck import entry_type

from conftest import load
from strategies import values

FUEL = 100_000


@pytest.fixture(scope="module")
def append_solution():
    spec, inp = load("append")
    out = synthesize(inp, Config(seconds=120))
    assert out.status == "ok"
    return spec, inp, out


def test_append_solution_text_reparses(append_solution):
    _, inp, out = append_solution
    again = parse_spec(out.solution.text, "sol.bxs")
    originals = [original_get(inp, ex.source, FUEL) for ex in inp.examples]
    assert final_check(again.definitions, again.entry, inp, originals, FUEL) is None
    assert out.solution.cost > 0
    assert out.sketches >= 1 and out.candidates >= 1


def test_deterministic(append_solution):
    _, inp, out = append_solution
    again = synthesize(inp, Config(seconds=120))
    assert again.solution.text == out.solution.text


def test_timeout_zero_budget():
    _, inp = load("append")
    assert synthesize(inp, Config(seconds=0)).status == "timeout"


def test_several_solutions():
    _, inp = load("flip")
    out = synthesize(inp, Config(seconds=60), limit=3)
    assert out.status == "ok"
    assert 1 <= len(out.solutions) <= 3
    texts = [s.text for s in out.solutions]
    assert len(set(texts)) == len(texts)
    costs = [s.cost for s in out.solutions]
    assert costs == sorted(costs)


def test_trace_dump_lines():
    _, inp = load("append")
    out = synthesize(inp, Config(seconds=120), trace_dump=True)
    assert out.dump
    assert any("True" in line for line in out.dump)


def _source_strategy(spec):
    src, _ = entry_type(spec.datas, spec.signatures, spec.entry)
    return values(spec.datas, src, depth=3, max_len=4)


_spec, _inp = load("append")


@settings(max_examples=60, deadline=None)
@given(_source_strategy(_spec))
def test_synthesized_get_agrees_with_original(append_solution, s):
    _, inp, out = append_solution
    sol = parse_spec(out.solution.text, "sol.bxs")
    assert run_get(sol.definitions, sol.entry, s, FUEL) == original_get(inp, s, FUEL)
    # putting back the unchanged view is the identity
    v = run_get(sol.definitions, sol.entry, s, FUEL)
    assert run_put(sol.definitions, sol.entry, s, v, FUEL) == s
