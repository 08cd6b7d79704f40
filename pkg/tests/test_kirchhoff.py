import random

import pytest
import sympy as sp
from gmpy2 import mpq

from kirchsok.groebner import MonomialOrder, buchberger, normal_form, sample_admissible
from kirchsok.kirchhoff import (FULL_VARIABLES, GRADIENT_SIGNS, REDUCED_VARIABLES, DegeneratePencil,
                                IntegralCombination, build_full_model, build_reduced_model,
                                displayed_stationary_system, eliminated_system, jacobian_factors,
                                reference_lex_basis, stationary_system, transformation_bindings,
                                transformed_integral_relations, zero_jacobian)
from kirchsok.polyring import default_ring, parse

R = default_ring()


def sym(p):
    return sp.sympify(str(p).replace("^", "**"))


# independent sympy transcription of the reduced model
s1, s2, s3, r1, r2, r3, a = sp.symbols("s1 s2 s3 r1 r2 r3 alpha")
SYM_FIELD = {
    "s1": (a * r1 + s3) * s2 - a ** 2 * r2 * r3,
    "s2": (a * r3 - s1) * (a * r1 + s3),
    "s3": -a * r2 * s3,
    "r1": (a * r1 + 2 * s3) * r2 - r3 * s2,
    "r2": r3 * s1 - r1 * (a * r1 + 2 * s3),
    "r3": r1 * s2 - r2 * s1,
}
SYM_INTEGRALS = {
    "H": (s1 ** 2 + s2 ** 2 + 2 * s3 ** 2 + 2 * a * r1 * s3 - a ** 2 * r3 ** 2) / 2,
    "V1": s1 * r1 + s2 * r2 + s3 * r3,
    "V2": r1 ** 2 + r2 ** 2 + r3 ** 2,
    "V3": ((a * r1 * s1 + a * r2 * s2 + s1 * s3) ** 2 + s3 ** 2 * (s2 ** 2 + (a * r1 + s3) ** 2)) / 2,
}


def test_reduced_model_matches_sympy_transcription():
    f, ints = build_reduced_model()
    for v in REDUCED_VARIABLES:
        assert sp.expand(sym(f[v]) - SYM_FIELD[v]) == 0
    for I in ints:
        assert sp.expand(sym(I.expression) - SYM_INTEGRALS[I.name]) == 0


def test_sympy_confirms_conservation():
    X = sp.symbols("s1 s2 s3 r1 r2 r3")
    for name, I in SYM_INTEGRALS.items():
        lie = sum(sp.diff(I, x) * SYM_FIELD[str(x)] for x in X)
        assert sp.expand(lie) == 0, name


@pytest.mark.parametrize("build", [build_full_model, build_reduced_model])
def test_integrals_have_zero_lie_derivative(build):
    f, ints = build()
    assert len(ints) == 4
    for I in ints:
        assert f.lie_derivative(I.expression).is_zero()


def test_transformation_relations():
    rel = transformed_integral_relations()
    assert set(rel) == {"H", "V1", "V2", "V3"}
    for got, want in rel.values():
        assert got == want
    sub = transformation_bindings()
    assert sub["M1"] == parse("s1 - 1/3*alpha*r3", R)


def test_random_point_lie_derivative_of_non_integral_is_nonzero():
    f, _ = build_reduced_model()
    assert not f.lie_derivative(parse("s1", R)).is_zero()


def test_gradient_matches_reference_up_to_sign():
    K = IntegralCombination.symbolic()
    shown, elim = displayed_stationary_system()
    for sgn, g, d in zip(GRADIENT_SIGNS, stationary_system(K), shown):
        assert g * sgn == d


def test_elimination_matches_reference_after_clearing():
    K = IntegralCombination.symbolic()
    E = eliminated_system(K)
    _, elim = displayed_stationary_system()
    assert E.cleared == ("s3",)
    assert E.denominator == parse("alpha^2*l0 + 2*l2", R)
    for g, d in zip(E, elim):
        assert g == d or g == -d


def test_printed_sign_of_the_eliminated_term_differs():
    # the reference display prints "- l1^2/(alpha^2 l0 + 2 l2) s3"; the derivation gives "+"
    E = eliminated_system(IntegralCombination.symbolic())
    third_as_printed = parse("(alpha^2*l0 + 2*l2)*(alpha*l0*r1 - alpha*l3*r1*s1^2 - alpha*l3*r2*s1*s2"
                             " + 2*l0*s3 - alpha^2*l3*r1^2*s3 - l3*s1^2*s3 - l3*s2^2*s3"
                             " - 3*alpha*l3*r1*s3^2 - 2*l3*s3^3) - l1^2*s3", R)
    assert E[2] - third_as_printed == parse("2*l1^2*s3", R)


def test_specialized_elimination_commutes_with_substitution():
    pt = {"alpha": mpq(2), "l0": mpq(3), "l1": mpq(-1), "l2": mpq(1, 2), "l3": mpq(5)}
    a = eliminated_system(IntegralCombination.at(**pt))
    b = eliminated_system(IntegralCombination.symbolic())
    for x, y in zip(a, b):
        y = y.substitute(pt)
        assert x == y or x * (pt["alpha"] ** 2 * pt["l0"] + 2 * pt["l2"]) == y


def test_degenerate_pencil_raises():
    with pytest.raises(DegeneratePencil):
        eliminated_system(IntegralCombination.at(alpha=1, l0=2, l2=-1))


def test_zero_jacobian_factor_is_minus_one():
    zj = zero_jacobian()
    assert zj.factor == -1
    prod = jacobian_factors()[0] * jacobian_factors()[1] * jacobian_factors()[2]
    assert zj.determinant == -prod


def test_zero_jacobian_against_sympy():
    l0, l1, l2, l3 = sp.symbols("l0 l1 l2 l3")
    K = l0 * SYM_INTEGRALS["H"] - l1 * SYM_INTEGRALS["V1"] - l2 * SYM_INTEGRALS["V2"] - l3 * SYM_INTEGRALS["V3"]
    X = sp.symbols("s1 s2 s3 r1 r2 r3")
    Hm = sp.hessian(K, X).subs({x: 0 for x in X})
    assert sp.expand(sym(zero_jacobian().determinant) - Hm.det()) == 0


def test_reference_basis_generates_the_same_ideal():
    order = MonomialOrder.lex("r1", "r2", "s2", "s1", "s3")
    B = reference_lex_basis()
    assert len(B) == 8
    pt = sample_admissible(random.Random(11))
    Es = list(eliminated_system(IntegralCombination.at(**pt)))
    G = buchberger(Es, order)
    ref = [b.substitute(pt) for b in B]
    GB = buchberger(ref, order)
    assert all(normal_form(b, G).is_zero() for b in ref)
    assert all(normal_form(e, GB).is_zero() for e in Es)


def test_unknown_weight_rejected():
    with pytest.raises(ValueError):
        IntegralCombination.at(l9=1)


def test_full_variables():
    f, _ = build_full_model()
    assert tuple(f.variables) == FULL_VARIABLES
