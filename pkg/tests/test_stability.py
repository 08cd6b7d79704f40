import math

import numpy as np
import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import assume, given, settings, strategies as st

from kirchsok.kirchhoff import IntegralCombination
from kirchsok.report import framed_line_forms
from kirchsok.stability import (ConstraintSet, NoRealEquilibrium, NonStationaryBase, NotAnEquilibrium,
                                QuadraticForm, adjunct_survey, characteristic_polynomial,
                                cylinder_equilibrium, deviation_frame, fullspace_linearization,
                                leading_minors, reduced_1d_stability, restrict, second_variation, soften,
                                sylvester, zero_solution_stability)

a, l0, l1, l2, l3, s = sp.symbols("alpha l0 l1 l2 l3 s30")
P = a ** 2 * l0 ** 2 + l1 ** 2
E = l0 - l3 * s ** 2
F = a ** 2 * l0 ** 3 - P * l3 * s ** 2
G = l1 ** 4 + a ** 2 * l0 * P * E


def S(x):
    return sp.sympify(str(x).replace("^", "**"))


@pytest.fixture(scope="module")
def forms():
    return framed_line_forms()


def table(q):
    return {m: S(c) for m, c in q.terms()}


def same(got, want):
    assert set(got) == set(want), (sorted(got), sorted(want))
    for k in want:
        assert sp.simplify(got[k] - want[k]) == 0, k


def test_second_variation_on_framed_line(forms):
    q = forms[0]
    same(table(q), {"z1^2": P * E / (2 * l0 ** 2), "z2^2": P / (2 * l0), "z3^2": l1 ** 2 / (2 * l0),
                    "z1*z4": -l1, "z4^2": l0 / 2, "z2*z5": -l1, "z5^2": E / 2})
    # every one of the 21 upper-triangle entries is pinned by the table above
    assert len(q.variables) == 6


def test_constraint_variations(forms):
    C = forms[1]
    assert C.rank == 2
    want = {
        "H": [a * s, 0, -a ** 2 * l0 / l1 * s, -l1 / (a * l0) * s, 0,
              (l1 ** 4 - a ** 4 * l0 ** 4) / (a ** 2 * l0 ** 2 * l1 ** 2) * s],
        "V1": [-l1 / (a * l0) * s, 0, s, -s / a, 0, 2 * P / (a ** 2 * l0 * l1) * s],
        "V2": [-2 * s / a, 0, 2 * l0 / l1 * s, 0, 0, 2 * P / (a ** 2 * l1 ** 2) * s],
    }
    for name, row in want.items():
        for var, w in zip(C.variables, row):
            assert sp.simplify(S(C.coefficient(name, var)) - w) == 0, (name, var)


def test_restricted_form(forms):
    sub = forms[3]
    same(table(sub), {"z2^2": P / (2 * l0), "z3^2": G / (2 * l0 * l1 ** 2), "z2*z5": -l1,
                      "z5^2": E / 2, "z3*z6": P * F / (l0 * l1 ** 3),
                      "z6^2": P ** 2 * F / (2 * a ** 2 * l0 ** 2 * l1 ** 4)})


def test_symbolic_sylvester_minors(forms):
    got = [S(m) for m in leading_minors(forms[3])]
    want = [P / (2 * l0), P * G / (4 * l0 ** 2 * l1 ** 2), F * G / (8 * l0 ** 2 * l1 ** 2),
            P ** 3 * (l1 ** 2 * l3 * s ** 2 + a ** 2 * l0 ** 2 * (l3 * s ** 2 - l0)) ** 2
            / (16 * a ** 2 * l0 ** 4 * l1 ** 4)]
    for g, w in zip(got, want):
        assert sp.simplify(g - w) == 0


def test_sylvester_at_sample_point(forms):
    v = sylvester(forms[3], {"alpha": 1, "l0": 1, "l1": 1, "l3": -1, "s30": 1})
    assert v.kind == "definite-positive"
    assert v.minors == [mpq(1), mpq(5, 2), mpq(15, 8), mpq(9, 2)]


def test_non_stationary_base_is_rejected():
    fr = deviation_frame(conditions={})
    with pytest.raises(NonStationaryBase):
        second_variation(IntegralCombination.symbolic(), fr)


def sym_matrices(n):
    entry = st.fractions(min_value=-5, max_value=5, max_denominator=7)
    return st.lists(entry, min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2).map(
        lambda xs: _sym(xs, n))


def _sym(xs, n):
    m = [[mpq(0)] * n for _ in range(n)]
    it = iter(xs)
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = mpq(next(it))
    return m


@settings(deadline=None)
@given(st.one_of(sym_matrices(4), sym_matrices(6)))
def test_sylvester_agrees_with_eigenvalues(m):
    q = QuadraticForm(tuple(f"z{i}" for i in range(len(m))), m)
    v = sylvester(q)
    eig = np.linalg.eigvalsh(np.array([[float(x) for x in r] for r in m]))
    if v.kind == "definite-positive":
        assert eig.min() > 0
    elif v.kind == "definite-negative":
        assert eig.max() < 0
    elif v.kind == "indefinite":
        assert eig.min() < 0 < eig.max()
        assert v.witnesses["positive_value"] > 0 or v.witnesses["negative_value"] < 0
    else:
        assert any(x == 0 for x in v.minors)


@settings(deadline=None)
@given(sym_matrices(4), st.lists(st.integers(-4, 4), min_size=8, max_size=8),
       st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_restriction_matches_form_on_the_kernel(m, rows, w):
    names = ("a", "b", "c", "d")
    c = [[mpq(x) for x in rows[:4]], [mpq(x) for x in rows[4:]]]
    det = c[0][0] * c[1][1] - c[0][1] * c[1][0]
    assume(det != 0)
    q = QuadraticForm(names, m)
    qr = restrict(q, ConstraintSet(names, ("p", "q"), c, 2), ["a", "b"])
    # solve the constraints for a, b given c, d = w
    rhs = [-(c[k][2] * w[0] + c[k][3] * w[1]) for k in range(2)]
    x_a = (rhs[0] * c[1][1] - rhs[1] * c[0][1]) / det
    x_b = (c[0][0] * rhs[1] - c[1][0] * rhs[0]) / det
    assert q.value([x_a, x_b, mpq(w[0]), mpq(w[1])]) == qr.value([mpq(w[0]), mpq(w[1])])


@settings(deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=16, max_size=16))
def test_characteristic_polynomial_matches_numpy(xs):
    A = [[mpq(x) for x in xs[4 * i: 4 * i + 4]] for i in range(4)]
    cp = [float(c) for c in characteristic_polynomial(A)]
    want = np.poly(np.array([[float(x) for x in r] for r in A]))
    assert np.allclose(cp, want, atol=1e-6 * max(1.0, np.abs(want).max()))


def test_zero_solution_stability():
    z = zero_solution_stability({"alpha": 1, "l0": 1, "l1": 0, "l2": -2, "l3": 0})
    assert z.definite and z.witnesses["inequality_holds"]
    z = zero_solution_stability({"alpha": 1, "l0": 1, "l1": 0, "l2": 1, "l3": 0})
    assert not z.definite and not z.witnesses["inequality_holds"]


def test_softening_extremum():
    rep = soften()
    assert S(rep.root) - (-l2 / a ** 2) == 0
    assert sp.simplify(S(rep.value) - (-(l2 ** 2 + a ** 2 * l1 ** 2) / a ** 2)) == 0
    at = soften(params={"alpha": 2, "l1": 1, "l2": 3})
    assert at.numeric_root == mpq(-3, 4) and at.numeric_value == mpq(-13, 4)
    with pytest.raises(ZeroDivisionError):
        soften(params={"alpha": 0, "l1": 1, "l2": 1})


def test_reduced_one_dimensional_flow_and_sign_flip():
    p = {"alpha": 1, "l0": 1, "l1": 1, "l3": 1}
    first = reduced_1d_stability(p)[0]
    golden = (1 - math.sqrt(5)) / 2
    assert abs(float(first.coefficient) - 2 * golden) < 1e-12
    assert first.verdict == "asymptotically stable"
    flipped = reduced_1d_stability(dict(p, alpha=-1))[0]
    assert flipped.verdict == "unstable" and abs(float(flipped.coefficient) + 2 * golden) < 1e-12
    with pytest.raises(NoRealEquilibrium):
        reduced_1d_stability(dict(p, l3=-1))


def test_full_space_linearization_is_unstable():
    for alpha in (1, -1):
        p = {"alpha": alpha, "l0": 1, "l1": 1, "l3": 1}
        rep = fullspace_linearization(cylinder_equilibrium(p), p)
        assert rep.unstable
        assert abs(rep.max_re - (math.sqrt(5) - 1) / 2) < 1e-8


def test_linearization_needs_an_equilibrium():
    with pytest.raises(NotAnEquilibrium):
        fullspace_linearization({"s1": 1, "s2": 1, "s3": 1, "r1": 0, "r2": 0, "r3": 0}, {"alpha": 1})


def test_exact_spectrum_of_a_given_matrix():
    d = [1, -1, 2, -2, 0, 0]
    rep = fullspace_linearization({}, matrix=[[d[i] if i == j else 0 for j in range(6)] for i in range(6)])
    assert sorted(rep.exact_roots) == sorted(mpq(x) for x in d) and rep.unstable


def test_origin_linearization_is_nilpotent():
    rep = fullspace_linearization({v: 0 for v in ("s1", "s2", "s3", "r1", "r2", "r3")}, {"alpha": 1})
    assert all(c == 0 for c in rep.charpoly[1:]) and rep.max_re == 0


def test_definite_zero_solution_confines_trajectories():
    from kirchsok.kirchhoff import build_reduced_model
    from kirchsok.numerics import compile_polynomials, integrate

    p = {"alpha": 1, "l0": 1, "l1": 0, "l2": -2, "l3": 0}
    assert zero_solution_stability(p).definite
    f, _ = build_reduced_model()
    K = IntegralCombination.at(**p).expression
    k = compile_polynomials([K], f.variables)
    rng = np.random.default_rng(4)
    for _ in range(3):
        x0 = rng.normal(size=6)
        x0 *= 1e-3 / np.linalg.norm(x0)
        tr = integrate(f, x0, 100.0, params={"alpha": 1}, step=1e-2, save_every=50)
        dev = np.abs([k(x)[0] for x in tr.states])
        assert dev.max() <= 2 * dev[0]
        assert np.linalg.norm(tr.states, axis=1).max() < 1e-2


def test_equilibrium_line_survey():
    found = {f.family: f.finding for f in adjunct_survey(seed=1, samples=1)}
    assert found["framed-line"].startswith("inconclusive")
    assert found["zero-adjunct-plane"].startswith("inconclusive")
    for name in ("zero-adjunct-axis", "zero-adjunct-shear", "zero-adjunct-skew", "zero-adjunct-tilt"):
        assert found[name] == "unstable in the first approximation"


def test_compatibility_sampling_is_definite():
    from kirchsok.report import compatibility_samples

    for label, d in compatibility_samples(seed=2, samples=10).items():
        assert d["definite"] == d["samples"], label
