"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from kirchsok.polyring import Polynomial, Ring

SMALL = Ring(("x", "y", "z"))


def rationals(bound: int = 20):
    return st.builds(Fraction, st.integers(-bound, bound), st.integers(1, bound))


@st.composite
def polynomials(draw, ring: Ring = SMALL, max_terms: int = 5, max_exp: int = 3):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        e = tuple(draw(st.integers(0, max_exp)) for _ in ring.names)
        terms[e] = draw(rationals())
    return Polynomial(ring, terms)
