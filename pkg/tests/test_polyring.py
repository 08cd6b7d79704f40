from fractions import Fraction

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, strategies as st

from kirchsok.polyring import (Polynomial, RationalFunction, Ring, StructuralError, UnknownVariableError,
                               default_ring, parse, to_rational)
from strategies import SMALL, polynomials, rationals

X, Y, Z = sp.symbols("x y z")


def to_sympy(p: Polynomial):
    syms = [sp.Symbol(n) for n in p.ring.names]
    out = 0
    for e, c in p.terms.items():
        term = sp.Rational(int(c.numerator), int(c.denominator))
        for s, k in zip(syms, e):
            term *= s ** k
        out += term
    return sp.expand(out)


@given(polynomials(), polynomials())
def test_arithmetic_agrees_with_sympy(p, q):
    assert to_sympy(p + q) == sp.expand(to_sympy(p) + to_sympy(q))
    assert to_sympy(p - q) == sp.expand(to_sympy(p) - to_sympy(q))
    assert to_sympy(p * q) == sp.expand(to_sympy(p) * to_sympy(q))


@given(polynomials())
def test_print_parse_round_trip(p):
    assert parse(str(p), SMALL) == p


@given(polynomials(), st.sampled_from(["x", "y", "z"]))
def test_derivative_agrees_with_sympy(p, v):
    assert to_sympy(p.differentiate(v)) == sp.diff(to_sympy(p), sp.Symbol(v))


@given(polynomials(), polynomials())
def test_product_rule(p, q):
    assert (p * q).differentiate("x") == p.differentiate("x") * q + p * q.differentiate("x")


@given(polynomials(), rationals(), rationals())
def test_substitution_then_evaluation(p, a, b):
    partial = p.substitute({"x": a, "y": b})
    assert partial.evaluate({"z": Fraction(3, 7)}) == p.evaluate({"x": a, "y": b, "z": Fraction(3, 7)})


@given(polynomials(max_terms=3, max_exp=2))
def test_power_matches_repeated_product(p):
    assert p ** 3 == p * p * p


def test_grammar_examples():
    R = default_ring()
    p = parse("3/4*s1^2*r3 - alpha*l0 + 2", R)
    assert p.degree() == 3
    assert str(parse(str(p), R)) == str(p)
    assert parse("-(s1 - r1)^2", R) == -(R.var("s1") - R.var("r1")) ** 2
    assert parse("2/4*s1", R) == parse("1/2*s1", R)


def test_parse_rejects_unknown_symbols_and_garbage():
    with pytest.raises((StructuralError, UnknownVariableError)):
        parse("s1 + w7", default_ring())
    with pytest.raises(StructuralError):
        parse("s1 + * s2", default_ring())
    with pytest.raises(StructuralError):
        parse("s1 $ 2", default_ring())


def test_to_rational():
    assert to_rational("-3/9") == mpq(-1, 3)
    assert to_rational(Fraction(2, 6)) == mpq(1, 3)
    assert to_rational(5) == 5
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)


def test_rings_are_interned_and_mismatch_is_caught():
    assert Ring(("x", "y", "z")) is SMALL
    other = Ring(("u", "v"))
    with pytest.raises(StructuralError):
        SMALL.var("x") + other.var("u")
    with pytest.raises(StructuralError):
        Ring(("a", "a"))


def test_embed_and_coefficients_in():
    R = default_ring()
    p = parse("alpha*s1^2 + 3*s1*r1 - l0", R)
    parts = p.coefficients_in(["s1"])
    assert parts[(2,)] == R.var("alpha")
    assert parts[(1,)] == parse("3*r1", R)
    assert parts[(0,)] == -R.var("l0")
    small = Ring(("s1", "r1", "alpha", "l0"))
    assert str(p.embed(small)) == str(parse(str(p), small))


def test_rational_function_equality_and_calculus():
    x, y = SMALL.var("x"), SMALL.var("y")
    f = RationalFunction(x * x - y * y, x - y)
    assert f == RationalFunction(x + y)
    g = RationalFunction(SMALL.one(), x)
    assert g.differentiate("x") == RationalFunction(-SMALL.one(), x * x)
    assert (g + g).evaluate({"x": 4}) == Fraction(1, 2)
    with pytest.raises(ZeroDivisionError):
        RationalFunction(x, SMALL.zero())


def test_json_round_trip():
    R = default_ring()
    p = parse("1/3*s1*r2^2 - 7*l3", R)
    assert Polynomial.from_json(p.to_json()) == p
