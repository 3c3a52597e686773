import pytest
from hypothesis import given, settings

from bxsynth.surface import (
    ParseError, parse_expr, parse_pattern, parse_spec, parse_type, print_spec, show_expr,
    show_pattern, to_value, ValueError_,
)
from bxsynth.syntax import (
    BCase, BCon, CHAR, INT, NAT, DataEnv, Lift, TBX, TData, canonical, list_of, show_type,
    show_value, tuple_of, vint, vnat, vstr, Val,
)

from strategies import exprs, values


SPEC = """
data Shape = Circle Int | Rect Int Int
area : Shape -> Int
area s = case s of { Circle r -> r ; Rect w h -> w }
#entry area
#component area
#class 1
#example put (Circle 3) 4 = Circle 4
"""


def test_parse_spec_directives():
    spec = parse_spec(SPEC, "shape.bxs")
    assert "Shape" in spec.datas.decls
    assert set(spec.definitions) == {"area"}
    assert spec.components == ["area"]
    assert spec.meta["class"] == "1"
    assert len(spec.examples) == 1
    assert show_expr(spec.entry) == "area"


def test_spec_round_trip():
    spec = parse_spec(SPEC)
    again = parse_spec(print_spec(spec))
    assert canonical(again.definitions["area"]) == canonical(spec.definitions["area"])
    assert again.signatures == spec.signatures


def test_infix_and_sugar():
    e = parse_expr("a && b || not c")
    assert show_expr(e) == "a && b || not c"
    assert show_expr(parse_expr("[1, 2]")) == "[1, 2]"
    assert show_expr(parse_expr('"ab"')) == '"ab"'
    assert show_expr(parse_expr("(x, y : ys)")) == "(x, y : ys)"


def test_bidirectional_syntax():
    e = parse_expr("case* x of { [] -> []* with \\v -> True by \\s v -> [] ; a : r -> a :* !r "
                   "with \\v -> False by \\s v -> s }")
    assert isinstance(e, BCase)
    body = e.branches[1].body
    assert isinstance(body, BCon) and isinstance(body.args[1], Lift)
    assert canonical(parse_expr(show_expr(e))) == canonical(e)


def test_types():
    assert show_type(parse_type("BX [Int] -> BX [Int]")) == "BX [Int] -> BX [Int]"
    assert parse_type("(Int, [Char])") == tuple_of(INT, list_of(CHAR))
    assert parse_type("BX Nat") == TBX(NAT)


def test_patterns():
    p = parse_pattern("(a : x, _)")
    assert show_pattern(p).startswith("(a : x, ")


def test_parse_error_location():
    with pytest.raises(ParseError) as err:
        parse_spec("f : Int\nf = case x of {", "bad.bxs")
    assert err.value.line == 2


def test_unknown_constructor():
    with pytest.raises(ParseError):
        parse_expr("Foo 1")


def test_to_value():
    d = DataEnv()
    assert to_value(parse_expr("3"), NAT, d) == vnat(3)
    assert to_value(parse_expr("3"), INT, d) == vint(3)
    assert to_value(parse_expr('"ok"'), list_of(CHAR), d) == vstr("ok")
    with pytest.raises(ValueError_):
        to_value(parse_expr("-1"), NAT, d)
    with pytest.raises(ValueError_):
        to_value(parse_expr("x"), INT, d)


@given(exprs())
def test_expression_print_parse_round_trip(e):
    assert canonical(parse_expr(show_expr(e))) == canonical(e)


SHAPES = parse_spec("data T = Leaf | Node T Int T\nf : Int\nf = 0").datas


@settings(max_examples=60)
@given(values(SHAPES, TData("T"), depth=3))
def test_value_print_parse_round_trip(v):
    back = to_value(parse_expr(show_value(v), SHAPES), TData("T"), SHAPES)
    assert back == v


@given(values(DataEnv(), tuple_of(list_of(CHAR), list_of(INT), NAT)))
def test_builtin_value_round_trip(v):
    t = tuple_of(list_of(CHAR), list_of(INT), NAT)
    assert to_value(parse_expr(show_value(v)), t, DataEnv()) == v
