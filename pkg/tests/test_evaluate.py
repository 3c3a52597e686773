import pytest
from hypothesis import given, strategies as st

from bxsynth.evaluate import (
    Evaluator, FuelExhausted, PatternMatchFailure, eval_u, eval_u_bool,
)
from bxsynth.surface import parse_expr, parse_spec
from bxsynth.syntax import (
    App, Case, Closure, Con, Lam, PCon, RBCase, RVar, Var, FALSE, TRUE, vint, vlist,
)

APPEND = parse_spec("""
append : [Int] -> [Int] -> [Int]
append xs ys = case xs of { [] -> ys ; a : x -> a : append x ys }
loop : Int
loop = loop
""")


def test_lambda_is_a_closure():
    v = eval_u({}, parse_expr("\\x -> x"))
    assert isinstance(v, Closure) and v.param == "x"


def test_append():
    r = eval_u(APPEND.definitions, parse_expr("append [1, 2] [3]"))
    assert r == vlist([vint(1), vint(2), vint(3)])


def test_fuel_stops_divergence():
    with pytest.raises(FuelExhausted):
        eval_u(APPEND.definitions, parse_expr("loop"), fuel=1000)


def test_pattern_match_failure():
    with pytest.raises(PatternMatchFailure):
        eval_u({}, parse_expr("case [] of { a : x -> a }"))


def test_exit_condition_application():
    null_def = parse_spec("null : [Int] -> Bool\nnull l = case l of { [] -> True ; _ : _ -> False }")
    f = eval_u(null_def.definitions, parse_expr("\\v -> not (null v)"))
    assert eval_u_bool(null_def.definitions, f, vlist([vint(6), vint(2)]), ) == TRUE
    k = eval_u({}, parse_expr("\\_ -> True"))
    assert eval_u_bool({}, k, vint(0)) == TRUE


def test_bx_case_residualizes_without_running_bodies():
    spec = parse_spec("""
appendB : BX [Int] -> BX [Int] -> BX [Int]
appendB xs ys = case* xs of { [] -> ys with \\_ -> True by \\_ _ -> [] ;
    a : x -> a :* appendB x ys with \\v -> True by \\s _ -> s }
""")
    ev = Evaluator(spec.definitions)
    r = ev.apply_all(ev.eval(Var("appendB"), {}), RVar("x"), RVar("ys"))
    assert isinstance(r, RBCase)
    assert r.scrut == RVar("x")
    assert all(isinstance(b.exit, Closure) and isinstance(b.recon, Closure) for b in r.branches)


# -- substitution interpreter as an independent oracle on closed Bool terms

def subst(e, x, v):
    if isinstance(e, Var):
        return v if e.name == x else e
    if isinstance(e, Lam):
        return e if e.param == x else Lam(e.param, subst(e.body, x, v))
    if isinstance(e, App):
        return App(subst(e.fun, x, v), subst(e.arg, x, v))
    if isinstance(e, Con):
        return Con(e.con, tuple(subst(a, x, v) for a in e.args))
    if isinstance(e, Case):
        return Case(subst(e.scrut, x, v), tuple((p, b) for p, b in e.branches))
    return e


def oracle(e):
    if isinstance(e, Con):
        return e.con
    if isinstance(e, App):
        f = e.fun
        if isinstance(f, Var) and f.name == "not":
            return "False" if oracle(e.arg) == "True" else "True"
        if isinstance(f, App) and isinstance(f.fun, Var) and f.fun.name in ("&&", "||"):
            a, b = oracle(f.arg), oracle(e.arg)
            if f.fun.name == "&&":
                return "True" if a == b == "True" else "False"
            return "True" if "True" in (a, b) else "False"
        assert isinstance(f, Lam)
        return oracle(subst(f.body, f.param, Con(oracle(e.arg))))
    if isinstance(e, Case):
        c = oracle(e.scrut)
        for p, b in e.branches:
            if p.con == c:
                return oracle(b)
    raise AssertionError(e)


def bool_terms(names=("b",)):
    leaf = st.sampled_from([Con("True"), Con("False")])

    def extend(inner):
        return st.one_of(
            inner.map(lambda e: App(Var("not"), e)),
            st.tuples(st.sampled_from(["&&", "||"]), inner, inner).map(
                lambda t: App(App(Var(t[0]), t[1]), t[2])),
            st.tuples(inner, inner, inner).map(
                lambda t: Case(t[0], ((PCon("True", ()), t[1]), (PCon("False", ()), t[2])))),
            st.tuples(inner, inner).map(lambda t: App(Lam("b", Case(Var("b"), (
                (PCon("True", ()), t[0]), (PCon("False", ()), Con("False"))))), t[1])),
        )

    return st.recursive(leaf, extend, max_leaves=10)


@given(bool_terms())
def test_closed_bool_terms_agree_with_substitution(e):
    got = eval_u({}, e)
    assert got == (TRUE if oracle(e) == "True" else FALSE)


def test_determinism():
    e = parse_expr("append [1] [2, 3]")
    assert eval_u(APPEND.definitions, e) == eval_u(APPEND.definitions, e)
