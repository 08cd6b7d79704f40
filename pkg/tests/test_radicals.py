import mpmath
import pytest
from gmpy2 import mpq

from kirchsok.radicals import NegativeRadicand, RadicalExpr, parse_radical


def test_parse_and_evaluate_to_fifty_digits():
    e = parse_radical("(1 + sqrt(5))/2")
    with mpmath.workdps(60):
        want = (1 + mpmath.sqrt(5)) / 2
    got = e.evaluate({}, dps=50)
    assert abs(got - want) < mpmath.mpf(10) ** -48


def test_enclosure_contains_the_value():
    e = parse_radical("sqrt(a^2 + b) - a")
    ev = e.enclose({"a": mpq(3), "b": mpq(1, 7)}, dps=50)
    with mpmath.workdps(80):
        exact = mpmath.sqrt(mpmath.mpf(9) + mpmath.mpf(1) / 7) - 3
        assert abs(mpmath.mpf(ev.value) - exact) <= mpmath.mpf(ev.error_bound) + mpmath.mpf(10) ** -70


def test_exact_value_with_perfect_square_radicand():
    e = parse_radical("sqrt(4*alpha^2*l0^2 + l1^2)")
    assert e.exact_value({"alpha": 2, "l0": 1, "l1": 3}) == 5
    with pytest.raises(ValueError):
        e.exact_value({"alpha": 1, "l0": 1, "l1": 1})


def test_negative_radicand_is_reported():
    with pytest.raises(NegativeRadicand):
        parse_radical("sqrt(x)").evaluate({"x": -1})


def test_substitution_and_folding():
    e = parse_radical("x*sqrt(y) + 1")
    f = e.substitute({"y": parse_radical("4")}).fold({})
    assert f.exact_value({"x": mpq(1, 2)}) == 2
    assert e.variables() == {"x", "y"}
    assert e.has_radicals() and not parse_radical("x + 1").has_radicals()


def test_arithmetic_builds_equal_keys():
    x = RadicalExpr.var("x")
    assert (x + 1) * 2 == parse_radical("(x + 1)*2")
