import glob

import pytest

from bxsynth.surface import parse_expr, parse_spec
from bxsynth.syntax import BOOL, INT, PCon, PVar, TBX, DataEnv, Var, list_of
from bxsynth.typecheck import (
    Checker, ConstructorArity, NonLinearPattern, TypeCheckError, TypeEnvs, UnboundVariable,
    build_input, check_pattern, check_program, entry_type,
)

from conftest import CORPUS, REFERENCE, load


def check(src):
    spec = parse_spec(src, "t.bxs")
    check_program(spec.datas, spec.definitions, spec.signatures)


def test_reference_append_checks(append_ref):
    spec, inp = append_ref
    assert inp.entry_is_bx
    assert str(spec.signatures["appendB"]) == "BX [Int] -> BX [Int] -> BX [Int]"


def test_variable_rule():
    Checker(DataEnv()).check(TypeEnvs({"x": BOOL}), Var("x"), BOOL)


def test_check_pattern_binds_exactly_its_variables():
    d = DataEnv()
    env = check_pattern(d, PCon(":", (PVar("a"), PVar("x"))), list_of(INT))
    assert env == {"a": INT, "x": list_of(INT)}
    assert check_pattern(d, PVar("y"), BOOL) == {"y": BOOL}
    with pytest.raises(ConstructorArity):
        check_pattern(d, PCon(":", (PVar("a"),)), list_of(INT))


def test_nonlinear_pattern():
    with pytest.raises(NonLinearPattern):
        check("f : [Int] -> Int\nf x = case x of { a : a -> a ; [] -> 0 }")


def test_unbound_variable_keeps_its_class():
    with pytest.raises(UnboundVariable):
        check("f : Int -> Int\nf x = y")


def test_ill_founded_program_is_well_typed():
    check("f : Int\nf = f")


def test_bx_values_are_not_unidirectional():
    with pytest.raises(TypeCheckError):
        check("f : BX Int -> Int\nf x = x")
    with pytest.raises(TypeCheckError):
        check("f : BX Nat -> BX Nat\nf x = S x")
    check("f : BX Nat -> BX Nat\nf x = S* x")
    check("f : Int -> BX Int\nf x = !x")


def test_bx_pattern_variables_invisible_in_exit_and_recon():
    ok = ("f : BX [Int] -> BX [Int]\nf x = case* x of { [] -> []* with \\v -> True by \\s v -> [] ;"
          " a : r -> a :* r with \\v -> True by \\s v -> s }")
    check(ok)
    with pytest.raises(UnboundVariable):
        check(ok.replace("with \\v -> True by \\s v -> s", "with \\v -> True by \\s v -> r"))
    with pytest.raises(TypeCheckError):
        check(ok.replace("a :* r with \\v -> True", "a :* r with \\v -> case a of { _ -> True }"))


def test_exit_and_recon_types_are_fixed():
    bad = ("f : BX [Int] -> BX Int\nf x = case* x of { [] -> 0* with \\v -> v by \\s v -> [] ;"
           " a : r -> a with \\v -> True by \\s v -> s }")
    with pytest.raises(TypeCheckError):
        check(bad)


def test_error_rendering_has_position():
    src = "f : Int -> Int\nf x = x\ng : Int -> Bool\ng x = x\n#entry g\n#example put 1 True = 2"
    with pytest.raises(TypeCheckError) as err:
        build_input(parse_spec(src, "pos.bxs"))
    assert str(err.value) == "pos.bxs:4:1: expected Bool, found Int"


def test_entry_type():
    spec, _ = load("appendB", reference=True)
    src, view = entry_type(spec.datas, spec.signatures, spec.entry)
    assert isinstance(src, TBX) and isinstance(view, TBX)


@pytest.mark.parametrize("path", sorted(glob.glob(CORPUS + "/*.bxs")))
def test_every_benchmark_checks(path):
    with open(path) as fh:
        spec = parse_spec(fh.read(), path)
    inp = build_input(spec)
    assert inp.examples


@pytest.mark.parametrize("path", sorted(glob.glob(REFERENCE + "/*.bxs")))
def test_every_reference_program_checks(path):
    with open(path) as fh:
        build_input(parse_spec(fh.read(), path), require_examples=False)
