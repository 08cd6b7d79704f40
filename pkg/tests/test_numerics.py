import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kirchsok.kirchhoff import REDUCED_VARIABLES, build_full_model, build_reduced_model
from kirchsok.manifolds import catalog
from kirchsok.numerics import (StepUnderflow, Trajectory, compile_field, compile_polynomials, integrate,
                               monitor, probe_stability)
from kirchsok.polyring import Ring, StructuralError, parse

X0 = {"s1": 0.3, "s2": -0.2, "s3": 0.5, "r1": 0.4, "r2": 0.1, "r3": -0.6}
P = {"alpha": 0.8}


def test_compiled_polynomials_match_exact_evaluation():
    R = Ring(("x", "y", "a"))
    ps = [parse("a*x^2*y - 1/3*y + 2", R), parse("x*y^3", R)]
    fn = compile_polynomials(ps, ("x", "y"), {"a": "3/2"})
    got = fn([0.5, -2.0])
    want = [float(p.evaluate({"x": 0.5, "y": -2.0, "a": 1.5})) for p in ps]
    assert np.allclose(got, want, rtol=1e-15)


def test_compile_rejects_unbound_symbols():
    f, _ = build_reduced_model()
    with pytest.raises(StructuralError):
        compile_field(f)


def test_rk4_is_fourth_order():
    f, _ = build_reduced_model()
    ref = integrate(f, X0, 1.0, params=P, adaptive=True, rtol=1e-13, atol=1e-15).final
    errs = [np.abs(integrate(f, X0, 1.0, params=P, step=h).final - ref).max() for h in (0.05, 0.025)]
    assert 12 <= errs[0] / errs[1] <= 20


def test_rk4_is_time_reversible():
    f, _ = build_reduced_model()
    fwd = integrate(f, X0, 2.0, params=P, step=1e-3).final
    fn = compile_field(f, P)
    back = integrate(lambda x: -fn(x), fwd, 2.0, step=1e-3, variables=REDUCED_VARIABLES).final
    assert np.abs(back - np.array([X0[v] for v in REDUCED_VARIABLES])).max() < 1e-10


@pytest.mark.parametrize("build", [build_reduced_model, build_full_model])
def test_integral_drift_is_small(build):
    f, ints = build()
    p = dict(P, beta=-0.3) if "beta" in f.parameters() else P
    x0 = {v: 0.1 * (i + 1) * (-1) ** i for i, v in enumerate(f.variables)}
    tr = integrate(f, x0, 10.0, params=p, step=1e-3, save_every=50)
    assert monitor(tr, ints, params=p).max_relative() <= 1e-8


def test_adaptive_integrator_conserves():
    f, ints = build_reduced_model()
    tr = integrate(f, X0, 10.0, params=P, adaptive=True)
    assert tr.method == "dop853"
    assert monitor(tr, ints, params=P).max_relative() <= 1e-8


def test_invariant_manifold_residual_stays_zero():
    f, _ = build_reduced_model()
    tr = integrate(f, {"s1": 0.3, "s2": -0.5, "s3": 0.7}, 5.0, params=P, step=1e-3, save_every=10)
    assert monitor(tr, [], [catalog()["force-free"]], params=P).manifolds["force-free"] == 0.0


def test_csv_export_has_header_and_rows():
    f, _ = build_reduced_model()
    tr = integrate(f, X0, 0.01, params=P, step=1e-3)
    lines = tr.to_csv().splitlines()
    assert lines[0] == "t," + ",".join(REDUCED_VARIABLES)
    assert len(lines) == len(tr.times) + 1


def test_bad_inputs_are_rejected():
    f, _ = build_reduced_model()
    with pytest.raises(ValueError):
        integrate(f, X0, 0.0, params=P)
    with pytest.raises(StructuralError):
        integrate(f, [1.0, 2.0], 1.0, params=P)
    with pytest.raises(StructuralError):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 1)), ("x",))


def test_adaptive_failure_raises_step_underflow():
    with pytest.raises(StepUnderflow):
        integrate(lambda x: np.array([x[0] ** 2]), [1.0], 2.0, adaptive=True)


def test_probe_of_stable_origin_stays_bounded():
    f, _ = build_reduced_model()
    rep = probe_stability(f, {v: 0.0 for v in REDUCED_VARIABLES}, 1e-3, n=3, t_end=5.0, params=P)
    assert rep.bounded and rep.max_excursion < 1e-2


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-0.7, 0.7), min_size=6, max_size=6), st.floats(0.3, 1.5))
def test_conservation_along_random_trajectories(x, alpha):
    f, ints = build_reduced_model()
    tr = integrate(f, x, 2.0, params={"alpha": alpha}, step=1e-3, save_every=100)
    for name, d in monitor(tr, ints, params={"alpha": alpha}).integrals.items():
        assert d["absolute"] <= 1e-9 * max(1.0, abs(d["initial"])), name
