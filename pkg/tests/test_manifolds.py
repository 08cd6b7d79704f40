import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from kirchsok.kirchhoff import IntegralCombination
from kirchsok.manifolds import (ChartSingularity, ManifoldSpec, NotInvariant, catalog, check_invariance,
                                check_stationarity, ideal_contains, implicitize, load_catalog,
                                reduce_field, reduced_integrals, same_ideal, sample_point)

IMPLICIT = ("origin", "force-free", "framed-line", "zero-adjunct-plane", "zero-adjunct-axis",
            "zero-adjunct-shear", "zero-adjunct-skew", "zero-adjunct-tilt", "force-plane",
            "ellipse-cylinder-minus-stationary", "ellipse-cylinder-plus-stationary")
PARAMETRIC = ("quartic-chart-a", "quartic-chart-b", "isolated-pair-axis", "isolated-pair-tilted",
              "cylinder-map-minus", "cylinder-map-plus")


@pytest.mark.parametrize("name", IMPLICIT)
def test_implicit_family_is_stationary_and_invariant(name):
    spec = catalog()[name]
    assert check_stationarity(spec).passed
    assert check_invariance(spec).require().passed


@pytest.mark.parametrize("name", PARAMETRIC)
def test_parametric_family_is_stationary_at_fifty_digits(name):
    rep = check_stationarity(catalog()[name], samples=10, tol=1e-30, dps=50, seed=3)
    assert rep.passed and rep.samples >= 10


def test_printed_ellipse_cylinder_is_not_stationary():
    # the tabulated ideal carries a mirror component off the critical set
    for name in ("ellipse-cylinder-minus", "ellipse-cylinder-plus"):
        assert not check_stationarity(catalog()[name]).passed


def test_unavailable_family_reports_instead_of_guessing():
    rep = check_stationarity(catalog()["unlisted-families"])
    assert not rep.passed and rep.note == "family not available"


def test_condition_violation_is_reported():
    K = IntegralCombination.at(alpha=1, l0=1, l1=1, l2=5, l3=1)
    rep = check_stationarity(catalog()["framed-line"], K)
    assert not rep.passed and "condition" in rep.note


def test_non_invariant_surface_raises_on_require():
    spec = ManifoldSpec.implicit("plane", ["s1"], free=("s2", "s3", "r1", "r2", "r3"))
    rep = check_invariance(spec)
    assert not rep.passed
    with pytest.raises(NotInvariant):
        rep.require()


def test_reduced_field_on_force_free_and_its_integrals():
    rf = reduce_field(catalog()["force-free"])
    assert rf.matches("s1", "s2*s3") and rf.matches("s2", "-s1*s3") and rf.matches("s3", "0")
    found = [str(e) for e in reduced_integrals(rf)]
    assert len(found) == 3


def test_reduced_field_on_force_plane():
    rf = reduce_field(catalog()["force-plane"])
    assert rf.matches("r1", "alpha*r1*r2")
    assert rf.matches("r2", "-alpha*r1^2")
    assert not rf.matches("r2", "-alpha^2*r1^2")


def test_reduce_field_rejects_undetermined_chart():
    spec = ManifoldSpec.implicit("plane", ["s1"], free=("s2",))
    with pytest.raises(ChartSingularity):
        reduce_field(spec)


def test_quartic_chart_linear_relation():
    imp = implicitize(catalog()["quartic-chart-a"], keep=("s3", "r3"))
    assert imp.kind == "implicit" and len(imp.equations) >= 1


def test_cylinder_map_matches_stationary_refinement():
    cat = catalog()
    rng = random.Random(5)
    for param, ref in (("cylinder-map-minus", "ellipse-cylinder-minus-stationary"),
                       ("cylinder-map-plus", "ellipse-cylinder-plus-stationary")):
        pt = sample_point(cat[param], rng, exact=True, free=False)
        im = implicitize(cat[param], pt)
        assert same_ideal(im, cat[ref], pt)
        printed = cat[ref.replace("-stationary", "")]
        # the image sits inside the tabulated variety but not conversely
        assert ideal_contains(im, printed, pt)


def test_catalog_round_trips_through_json(tmp_path):
    cat = catalog()
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"families": [s.to_dict() for s in cat.values()]}))
    again = load_catalog(path)
    assert set(again) == set(cat)
    for k in cat:
        assert again[k].to_dict() == cat[k].to_dict()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_exact_samples_satisfy_the_conditions(seed):
    spec = catalog()["cylinder-map-minus"]
    pt = sample_point(spec, random.Random(seed), exact=True)
    for k, e in spec.conditions:
        assert e.exact_value(pt) == pt[k]
