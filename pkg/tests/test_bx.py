import pytest
from hypothesis import given, settings, strategies as st

from bxsynth.bx import (
    DomainViolation, LiftMismatch, MergeConflict, MissingBinding, env_default, env_merge,
    env_split, get_t, pat_build, put_t, run_get, run_put,
)
from bxsynth.evaluate import pat_match
from bxsynth.surface import parse_expr, parse_pattern, to_value
from bxsynth.syntax import (
    EPS, INT, Br, DataEnv, PCon, PVar, TTuple, list_of, pattern_vars, tuple_of, vint, vlist,
    vstr, vtuple,
)

from conftest import load
from strategies import values

L = lambda *xs: vlist([vint(x) for x in xs])
D = DataEnv()


def test_pat_match_and_build():
    p = parse_pattern("a : x")
    assert pat_match(p, L(6, 2)) == {"a": vint(6), "x": L(2)}
    assert pat_build(p, {"a": vint(6), "x": L(2)}) == L(6, 2)
    assert pat_build(parse_pattern("[]"), {}) == L()
    assert pat_match(parse_pattern("y"), L(1)) == {"y": L(1)}
    assert pat_match(p, L()) is None
    with pytest.raises(MissingBinding):
        pat_build(p, {"a": vint(1)})


PATTERNS = [parse_pattern(s) for s in ("a : x", "(a, b : c)", "[]", "(x, [])", "y")]
PAT_TYPES = [list_of(INT), tuple_of(INT, list_of(INT)), list_of(INT), tuple_of(INT, list_of(INT)),
             list_of(INT)]


@settings(max_examples=500)
@given(st.integers(0, len(PATTERNS) - 1).flatmap(
    lambda i: st.tuples(st.just(i), values(D, PAT_TYPES[i]))))
def test_pattern_round_trip(case):
    i, v = case
    p = PATTERNS[i]
    mu = pat_match(p, v)
    if mu is not None:
        assert set(mu) == set(pattern_vars(p))
        assert pat_build(p, mu) == v
        assert pat_match(p, pat_build(p, mu)) == mu


def test_env_algebra_examples():
    assert env_merge({"ys": L()}, {"xs": L(6, 2)}) == {"ys": L(), "xs": L(6, 2)}
    mu = {"x": vint(1)}
    assert env_merge(mu, mu) == mu
    with pytest.raises(MergeConflict):
        env_merge({"x": vint(1)}, {"x": vint(2)})
    assert env_split({"ys": L(), "a": vint(6), "x": L(2)}, {"ys"}, {"a", "x"}) == (
        {"ys": L()}, {"a": vint(6), "x": L(2)})
    assert env_split({}, set(), set()) == ({}, {})
    with pytest.raises(DomainViolation):
        env_split({"q": L()}, {"a"}, {"b"})
    assert env_default({"a": vint(6), "x": L(2)}, {"a": vint(1), "x": L(2, 3)}) == {"a": vint(6), "x": L(2)}
    assert env_default({}, mu) == mu


ENVS = st.dictionaries(st.sampled_from("abcdef"), st.integers(0, 3).map(vint), max_size=6)


@given(ENVS, ENVS)
def test_default_domain(upd, orig):
    r = env_default(upd, orig)
    assert set(r) == set(upd) | set(orig)
    assert all(r[k] == v for k, v in upd.items())


@given(ENVS, st.sets(st.sampled_from("abcdef")))
def test_split_then_merge(mu, xs):
    ys = set("abcdef") - xs
    left, right = env_split(mu, xs, ys)
    assert set(left) <= xs and set(right) <= ys
    assert env_merge(left, right) == mu


def test_worked_trace(append_ref):
    spec, _ = append_ref
    body = parse_expr("appendB xs ys", spec.datas)
    v, tr = get_t(spec.definitions, {"xs": L(6, 2), "ys": L()}, body)
    assert v == L(6, 2)
    assert tr == Br(EPS, 1, TTuple((EPS, Br(EPS, 1, TTuple((EPS, Br(EPS, 0, EPS)))))))
    mu, tr2 = put_t(spec.definitions, {"xs": L(1, 2, 3), "ys": L(4, 5)}, body, L(6, 2), guide=tr)
    assert mu == {"xs": L(6, 2), "ys": L()}
    assert tr2 == tr


def test_var_rule():
    assert get_t({}, {"x": vint(3)}, parse_expr("x")) == (vint(3), EPS)


def test_run_get_put(append_ref):
    spec, _ = append_ref
    P, e = spec.definitions, spec.entry
    s = vtuple(L(1, 2), L(3, 4))
    assert run_get(P, e, s) == L(1, 2, 3, 4)
    assert run_put(P, e, s, L(5)) == vtuple(L(5), L())
    assert run_put(P, e, s, L(5, 6, 7, 8, 9)) == vtuple(L(5, 6), L(7, 8, 9))
    assert run_put(P, e, s, L(5, 6, 7, 8)) == vtuple(L(5, 6), L(7, 8))


def test_lift_rejects_changed_constant():
    spec, _ = load("appendBc", reference=True)
    with pytest.raises(LiftMismatch):
        run_put(spec.definitions, spec.entry, vstr("apple"), vstr("apple."))
    assert run_put(spec.definitions, spec.entry, vstr("apple"), vstr("plum;")) == vstr("plum")


@settings(max_examples=100)
@given(values(D, tuple_of(list_of(INT), list_of(INT)), max_len=4), values(D, list_of(INT), max_len=7))
def test_trace_coherence(s, v):
    spec, _ = load("appendB", reference=True)
    P = spec.definitions
    body = parse_expr("uncurryB appendB p", spec.datas)
    mu, tr = put_t(P, {"p": s}, body, v)
    v2, tr2 = get_t(P, mu, body)
    assert v2 == v and tr2 == tr
    mu_g, _ = put_t(P, {"p": s}, body, v, guide=tr2)
    assert mu_g == mu
