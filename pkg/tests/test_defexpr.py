import numpy as np
import pytest

from _astgen import random_ast
from qgauge import calculus
from qgauge.defexpr import (
    Add, BareComplexVariable, Call, ExprSyntaxError, IndexOutOfRange, Mul, ParseError, PowInt, RealConst, Sub,
    UnknownIdentifier, Var, compile, compile_source, parse, print_canonical,
)
from qgauge.domains import CATALOG
from qgauge.errors import EvaluationError


def test_parse_examples():
    ast = parse("abs2(z1) + abs2(z2) - 1", 2)
    assert ast == Sub(Add(Var("abs2", 1), Var("abs2", 2)), RealConst(1.0))
    assert parse("abs2(z1)^2", 2) == PowInt(Var("abs2", 1), 2)
    assert parse("2*re(z1)*im(z2)", 2) == Mul(Mul(RealConst(2.0), Var("re", 1)), Var("im", 2))
    assert parse("exp(-abs2(z1))", 1) == Call("exp", Sub(RealConst(0.0), Var("abs2", 1)))
    assert parse("-3", 1) == RealConst(-3.0)
    assert parse("  abs2( z1 )  ", 1) == Var("abs2", 1)


def test_precedence_and_associativity():
    assert parse("1 - 2 - 3", 1) == Sub(Sub(RealConst(1.0), RealConst(2.0)), RealConst(3.0))
    assert parse("1 + 2 * 3", 1) == Add(RealConst(1.0), Mul(RealConst(2.0), RealConst(3.0)))
    assert parse("re(z1)^2^3", 1) == PowInt(Var("re", 1), 8)
    assert parse("re(z1)^-2", 1) == PowInt(Var("re", 1), -2)


def test_documented_errors_carry_positions():
    with pytest.raises(BareComplexVariable) as e:
        parse("z1 + 1", 2)
    assert e.value.position == 0
    with pytest.raises(IndexOutOfRange) as e:
        parse("abs2(z3)", 2)
    assert e.value.position == 5 and e.value.index == 3 and e.value.n == 2
    with pytest.raises(ExprSyntaxError) as e:
        parse("abs2(z1) +", 2)
    assert e.value.position == 10
    for exc in (BareComplexVariable, IndexOutOfRange, ExprSyntaxError, UnknownIdentifier):
        assert issubclass(exc, ParseError)


@pytest.mark.parametrize(
    "src, exc, pos",
    [
        ("", ExprSyntaxError, 0),
        ("abs2(z1", ExprSyntaxError, 7),
        ("abs2(z1) $ 1", ExprSyntaxError, 9),
        ("foo(z1)", UnknownIdentifier, 0),
        ("abs2(z1)^1.5", ExprSyntaxError, 9),
        ("abs2(z0)", IndexOutOfRange, 5),
        ("1 + re(1)", ExprSyntaxError, 7),
        ("(1", ExprSyntaxError, 2),
        ("1 2", ExprSyntaxError, 2),
    ],
)
def test_error_cases(src, exc, pos):
    with pytest.raises(exc) as e:
        parse(src, 2)
    assert e.value.position == pos


def test_positions_are_byte_offsets():
    with pytest.raises(ExprSyntaxError) as e:
        parse("1 + é", 1)
    assert e.value.position == 4
    with pytest.raises(ExprSyntaxError) as e:
        parse("éé + 1", 1)
    assert e.value.position == 0
    # a no-break space is two bytes in UTF-8
    with pytest.raises(BareComplexVariable) as e:
        parse("\u00a0z1", 1)
    assert e.value.position == 2
    with pytest.raises(UnknownIdentifier) as e:
        parse("1 + foo", 1)
    assert e.value.position == 4


def test_deep_nesting_is_rejected_cleanly():
    with pytest.raises(ExprSyntaxError):
        parse("(" * 400 + "1" + ")" * 400, 1)
    assert parse("(" * 60 + "1" + ")" * 60, 1) == RealConst(1.0)


def test_canonical_examples():
    assert print_canonical(parse("abs2(z1) + abs2(z2) - 1", 2)) == "((abs2(z1) + abs2(z2)) - 1)"
    assert print_canonical(RealConst(-3.0)) == "(-3)"
    assert print_canonical(RealConst(0.5)) == "0.5"


def test_round_trip_random(rng):
    for _ in range(300):
        ast = random_ast(rng, 3)
        text = print_canonical(ast)
        assert parse(text, 3) == ast
        assert print_canonical(parse(text, 3)) == text


def test_compiled_matches_hand_code(rng):
    f = compile_source("abs2(z1)^2 + abs2(z2) - 1", 2)
    for _ in range(50):
        x = rng.standard_normal(4)
        assert f(list(x)) == pytest.approx((x[0] ** 2 + x[1] ** 2) ** 2 + x[2] ** 2 + x[3] ** 2 - 1, rel=1e-15, abs=1e-15)


@pytest.mark.parametrize("name", [n for n, e in CATALOG.items() if e.resolved.expression])
def test_catalog_expressions_match_builtins(name, rng):
    b = CATALOG[name].resolved
    f = compile_source(b.expression, len(b.weights))
    for _ in range(100):
        x = list(rng.uniform(-1.5, 1.5, 2 * len(b.weights)))
        assert abs(f(x) - b.psi(x)) <= 1e-14 * max(1.0, abs(b.psi(x)))
        jf = calculus.eval_jet(f, x, 2)
        jb = calculus.eval_jet(b.psi, x, 2)
        np.testing.assert_allclose(jf.grad, jb.grad, rtol=1e-13, atol=1e-13)
        np.testing.assert_allclose(jf.hess, jb.hess, rtol=1e-13, atol=1e-13)


def test_compiled_evaluation_errors():
    with pytest.raises(EvaluationError):
        compile_source("1 / (abs2(z1) - 1)", 1)([1.0, 0.0])
    with pytest.raises(EvaluationError):
        compile_source("log(re(z1))", 1)([-1.0, 0.0])
    with pytest.raises(EvaluationError):
        compile_source("re(z1)^-1", 1)([0.0, 0.0])
    with pytest.raises(EvaluationError):
        compile_source("exp(re(z1))", 1)([1e6, 0.0])


def test_compile_checks_dimension():
    ast = parse("abs2(z3)", 3)
    with pytest.raises(IndexOutOfRange):
        compile(ast, 2)
    assert compile(ast, 3).source == "abs2(z3)"


def test_compile_examples():
    assert compile_source("abs2(z1)+abs2(z2)-1", 2)([0.3, 0.4, 0.0, 0.0]) == pytest.approx(-0.75, abs=1e-15)
    assert compile_source("abs2(z1)^2+abs2(z2)-1", 2)([1.0, 0.0, 0.0, 0.0]) == 0.0
    j = calculus.eval_jet(compile_source("re(z1)", 1), [2.0, 3.0], 1)
    assert j.value == 2.0 and j.grad.tolist() == [1.0, 0.0]


def test_print_examples():
    assert print_canonical(Sub(Var("abs2", 1), RealConst(1.0))) == "(abs2(z1) - 1)"
    assert print_canonical(PowInt(Var("abs2", 2), 3)) == "(abs2(z2) ^ 3)"
    egg = parse("abs2(z1)^2 + abs2(z2) - 1", 2)
    assert egg == Sub(Add(PowInt(Var("abs2", 1), 2), Var("abs2", 2)), RealConst(1.0))
    assert parse(print_canonical(egg), 2) == egg


def test_order_zero_jet_equals_plain_evaluation(rng):
    f = compile_source("exp(re(z1)*im(z2)) / (1 + abs2(z1)) - sqrt(2 + abs2(z2))^3 + log(3 + re(z2))", 2)
    for _ in range(100):
        x = list(rng.uniform(-1, 1, 4))
        assert calculus.eval_jet(f, x, 0).value == f(x)
