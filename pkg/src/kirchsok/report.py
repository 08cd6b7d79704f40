"""End-to-end reproduction run: every check as a pass/fail item in one JSON report."""

from __future__ import annotations

import json
import math
import platform
import random
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable, Mapping

import numpy as np
from gmpy2 import mpq

from . import __version__
from .groebner import MonomialOrder, buchberger, normal_form, sample_admissible
from .kirchhoff import (GRADIENT_SIGNS, IntegralCombination, REDUCED_VARIABLES, build_full_model,
                        build_reduced_model, displayed_stationary_system, eliminated_system,
                        reference_lex_basis, stationary_system, transformed_integral_relations, zero_jacobian)
from .manifolds import (catalog, check_invariance, check_stationarity, implicitize,
                        sample_point, same_ideal, ideal_contains)
from .polyring import Ring, parse
from .stability import (QuadraticForm, adjunct_survey, constraint_variations, cylinder_equilibrium,
                        deviation_frame, fullspace_linearization, reduced_1d_stability, restrict,
                        second_variation, soften, sylvester, zero_solution_stability)
from .numerics import integrate, monitor

BLOCKS = ("model", "stationary", "gb", "families", "jacobian", "stability", "simulation")
DEFAULT_SEED = 20240601

# families whose defining equations are stationary and invariant for K
STATIONARY_IMPLICIT = ("origin", "force-free", "framed-line", "zero-adjunct-plane", "zero-adjunct-axis",
                       "zero-adjunct-shear", "zero-adjunct-skew", "zero-adjunct-tilt", "force-plane",
                       "ellipse-cylinder-minus-stationary", "ellipse-cylinder-plus-stationary")
PARAMETRIC = ("quartic-chart-a", "quartic-chart-b", "isolated-pair-axis", "isolated-pair-tilted",
              "cylinder-map-minus", "cylinder-map-plus")
CYLINDER_PAIRS = (("cylinder-map-minus", "ellipse-cylinder-minus"), ("cylinder-map-plus", "ellipse-cylinder-plus"))


@dataclass
class Item:
    block: str
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    gating: bool = True
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"block": self.block, "name": self.name, "passed": bool(self.passed), "gating": self.gating,
                "seconds": round(self.seconds, 4), "detail": _plain(self.detail)}


@dataclass
class Report:
    seed: int
    items: list[Item] = field(default_factory=list)
    figures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items if i.gating)

    def to_json(self) -> dict:
        return {
            "tool": "kirchsok",
            "version": __version__,
            "seed": self.seed,
            "python": platform.python_version(),
            "passed": self.passed,
            "summary": {"items": len(self.items),
                        "failed": sum(1 for i in self.items if i.gating and not i.passed),
                        "informational": sum(1 for i in self.items if not i.gating)},
            "items": [i.to_json() for i in self.items],
            "figures": self.figures,
        }


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return x if np.isfinite(x) else str(x)
    if isinstance(x, (np.floating, np.integer)):
        return _plain(x.item())
    return str(x)


def schema() -> dict:
    return json.loads(resources.files("kirchsok").joinpath("data/report.schema.json").read_text())


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------


def _model(seed: int, ctx: dict) -> Iterable[Item]:
    full, fi = build_full_model()
    yield Item("model", "full-integrals-conserved",
               all(full.lie_derivative(I.expression).is_zero() for I in fi), {"integrals": [I.name for I in fi]})
    red, ri = build_reduced_model()
    yield Item("model", "reduced-integrals-conserved",
               all(red.lie_derivative(I.expression).is_zero() for I in ri), {"integrals": [I.name for I in ri]})
    rel = transformed_integral_relations()
    yield Item("model", "transformation-maps-full-onto-reduced", all(a == b for a, b in rel.values()),
               {"H": "H + (2/9) alpha^2 V2", "V3": "(2/9) alpha^2 V3"})


def _stationary(seed: int, ctx: dict) -> Iterable[Item]:
    K = IntegralCombination.symbolic()
    shown, elim = displayed_stationary_system()
    grads = stationary_system(K)
    ok = [s * g == d for s, g, d in zip(GRADIENT_SIGNS, grads, shown)]
    yield Item("stationary", "gradient-matches-reference", all(ok),
               {"per_equation": dict(zip(REDUCED_VARIABLES, ok)), "signs": list(GRADIENT_SIGNS)})
    E = eliminated_system(K)
    ok = [g == d or g == -d for g, d in zip(E, elim)]
    yield Item("stationary", "elimination-matches-reference", all(ok) and len(E) == 5,
               {"per_equation": dict(zip(REDUCED_VARIABLES[:5], ok)), "r3": str(E.r3), "cleared": list(E.cleared)})


def gb_check(point: Mapping[str, mpq], **budget) -> dict:
    """Lex basis of the specialized eliminated system against the shipped reference basis."""
    order = MonomialOrder.lex("r1", "r2", "s2", "s1", "s3")
    Es = eliminated_system(IntegralCombination.at(**point))
    G = buchberger(list(Es), order, **budget)
    ref = [b.substitute(point) for b in reference_lex_basis()]
    GB = buchberger(ref, order, **budget)
    fwd = all(normal_form(b, G).is_zero() for b in ref)
    back = all(normal_form(e, GB).is_zero() for e in Es)
    return {"reference_in_computed": fwd, "computed_in_reference": back, **G.summary()}


def _gb(seed: int, ctx: dict) -> Iterable[Item]:
    rng = random.Random(seed)
    for i in range(ctx.get("gb_samples", 5)):
        pt = sample_admissible(rng)
        t0 = time.perf_counter()
        d = gb_check(pt, **ctx.get("budget", {}))
        d["point"] = {k: str(v) for k, v in pt.items()}
        yield Item("gb", f"reference-ideal-equality-{i + 1}",
                   d["reference_in_computed"] and d["computed_in_reference"], d,
                   seconds=time.perf_counter() - t0)


def _families(seed: int, ctx: dict) -> Iterable[Item]:
    cat = catalog()
    for name in STATIONARY_IMPLICIT:
        rep = check_stationarity(cat[name])
        inv = check_invariance(cat[name])
        yield Item("families", f"stationarity-of-{name}", rep.passed, rep.to_json())
        yield Item("families", f"invariance-of-{name}", inv.passed, inv.to_json())
    for name in PARAMETRIC:
        rep = check_stationarity(cat[name], samples=ctx.get("samples", 10), tol=1e-30, dps=50, seed=seed)
        yield Item("families", f"numeric-stationarity-of-{name}", rep.passed and rep.samples >= 10, rep.to_json())
    imp = implicitize(cat["quartic-chart-a"], keep=("s3", "r3"))
    ring = Ring(("s3", "r3", "alpha", "l0", "l1", "l2"))
    want = parse("(alpha^2*l0 + 2*l2)*r3 + l1*s3", ring)
    got = [str(e) for e in imp.equations]
    found = any(_proportional(e, want, ring) for e in imp.equations)
    yield Item("families", "quartic-chart-linear-relation", found, {"relations": got, "expected": str(want)})
    rng = random.Random(seed)
    for param, printed in CYLINDER_PAIRS:
        refined = printed + "-stationary"
        for k in range(ctx.get("cylinder_samples", 2)):
            pt = sample_point(cat[param], rng, exact=True, free=False)
            im = implicitize(cat[param], pt)
            d = {"point": {a: str(b) for a, b in pt.items()}}
            yield Item("families", f"{param}-equals-{refined}-{k + 1}", same_ideal(im, cat[refined], pt), d)
            d2 = dict(d, printed_in_image=ideal_contains(im, cat[printed], pt),
                      image_in_printed=ideal_contains(cat[printed], im, pt))
            yield Item("families", f"{param}-equals-{printed}-{k + 1}",
                       d2["printed_in_image"] and d2["image_in_printed"], d2, gating=False)
    for name in ("ellipse-cylinder-minus", "ellipse-cylinder-plus"):
        rep = check_stationarity(cat[name])
        yield Item("families", f"stationarity-of-{name}", rep.passed, rep.to_json(), gating=False)


def _proportional(e, want, ring) -> bool:
    from .radicals import AuxiliaryRadicals

    try:
        p = e.to_rational_function(ring, AuxiliaryRadicals([], prefix="q")).num
    except Exception:
        return False
    if p.is_zero() or len(p.terms) != len(want.terms):
        return False
    mono, c = next(iter(want.terms.items()))
    if mono not in p.terms:
        return False
    return p.scale(c / p.terms[mono]) == want


def _jacobian(seed: int, ctx: dict) -> Iterable[Item]:
    zj = zero_jacobian()
    yield Item("jacobian", "determinant-is-constant-times-product", zj.matches,
               {"factor": str(zj.factor), "determinant_terms": len(zj.determinant)})
    loci = {"l0=0,l1=0": {"l0": 0, "l1": 0}, "l1=0,l2=0": {"l1": 0, "l2": 0}}
    for label, sub in loci.items():
        yield Item("jacobian", f"vanishes-on-{label}", zj.determinant.substitute(sub).is_zero(), {})
    ring = zj.determinant.ring
    for label, text in (("l1^2 + 2*l0*l2", "l1^2 + 2*l0*l2"),
                        ("alpha^2*l0^2 + l1^2 + 2*l0*l2", "alpha^2*l0^2 + l1^2 + 2*l0*l2"),
                        ("alpha^2*l0^2 + l1^2 + 4*l0*l2", "alpha^2*l0^2 + l1^2 + 4*l0*l2")):
        from .polyring import _exact_quotient

        q = _exact_quotient(zj.determinant, parse(text, ring))
        yield Item("jacobian", f"vanishes-where-{label}-is-zero", q is not None, {})


def framed_line_forms():
    fr = deviation_frame()
    q = second_variation(frame=fr, at=catalog()["framed-line"])
    C = constraint_variations(frame=fr)
    qr = restrict(q, C, ["z1", "z4"])
    keep = ("z2", "z3", "z5", "z6")
    sub = QuadraticForm(keep, [[qr.matrix[qr.variables.index(a)][qr.variables.index(b)] for b in keep]
                               for a in keep])
    return q, C, qr, sub


def _stability(seed: int, ctx: dict) -> Iterable[Item]:
    q, C, qr, sub = framed_line_forms()
    yield Item("stability", "framed-line-constraint-rank", C.rank == 2, {"rank": C.rank})
    pt = {"alpha": 1, "l0": 1, "l1": 1, "l3": -1, "s30": 1}
    v = sylvester(sub, pt)
    yield Item("stability", "framed-line-sylvester-positive", v.kind == "definite-positive",
               {"params": pt, "minors": [str(m) for m in v.minors]})
    comp = compatibility_samples(seed, ctx.get("compatibility_samples", 20), sub)
    yield Item("stability", "framed-line-compatibility-sampling",
               all(d["definite"] == d["samples"] for d in comp.values()), comp, gating=False)
    z = zero_solution_stability({"alpha": 1, "l0": 1, "l1": 0, "l2": -2, "l3": 0})
    yield Item("stability", "zero-solution-definite", z.definite and z.witnesses["inequality_holds"], z.to_json())
    s = soften()
    yield Item("stability", "softening-formulas", softening_matches(s), s.to_json())
    params = {"alpha": 1, "l0": 1, "l1": 1, "l3": 1}
    flipped = dict(params, alpha=-1)
    a = reduced_1d_stability(params)[0]
    b = reduced_1d_stability(flipped)[0]
    yield Item("stability", "reduced-1d-verdict-and-flip",
               a.verdict == "asymptotically stable" and b.verdict == "unstable",
               {"alpha=1": a.to_json(), "alpha=-1": b.to_json()})
    conv = reduced_1d_convergence(params)
    yield Item("stability", "reduced-1d-trajectories-converge", conv["max_final_distance"] <= 1e-6, conv)
    spec = fullspace_linearization(cylinder_equilibrium(params), params)
    yield Item("stability", "full-space-linearization-unstable", spec.max_re > 1e-6, spec.to_json())
    findings = adjunct_survey(seed=seed, samples=ctx.get("survey_samples", 1))
    yield Item("stability", "equilibrium-line-survey", True, {"findings": [f.to_json() for f in findings]},
               gating=False)


def compatibility_samples(seed: int, samples: int = 20, sub=None) -> dict:
    """Sylvester verdicts of the restricted framed-line form at random weights.

    Draws l0 > 0, l3 < 0 and nonzero alpha, l1, s30, the sub-region where
    every printed minor is a product of positive factors; a second batch
    takes l3 > 0 with s30^2 inside the interval that keeps those factors
    positive.  Both batches report how many samples come out definite.
    """
    if sub is None:
        sub = framed_line_forms()[3]
    rng = random.Random(seed)

    def draw(lo, hi):
        return mpq(lo) + (mpq(hi) - mpq(lo)) * mpq(rng.randrange(1, 256), 256)

    out = {}
    for label in ("l3<0", "l3>0 inside the s30 interval"):
        kinds = []
        for _ in range(samples):
            a = draw(1, 3) * rng.choice((-1, 1))
            l0 = draw(mpq(1, 4), 4)
            l1 = draw(mpq(1, 4), 4) * rng.choice((-1, 1))
            if label == "l3<0":
                l3 = -draw(mpq(1, 4), 4)
                s30 = draw(mpq(1, 4), 2) * rng.choice((-1, 1))
            else:
                l3 = draw(mpq(1, 4), 4)
                # alpha^2 l0^3 > (alpha^2 l0^2 + l1^2) l3 s30^2 bounds s30^2 from above
                cap = a ** 2 * l0 ** 3 / ((a ** 2 * l0 ** 2 + l1 ** 2) * l3)
                s30 = mpq(rng.randrange(1, 256), 256) * cap
                s30 = mpq(int(math.sqrt(float(s30)) * 4096), 4096)
                if s30 == 0:
                    s30 = mpq(1, 4096)
            v = sylvester(sub, {"alpha": a, "l0": l0, "l1": l1, "l3": l3, "s30": s30})
            kinds.append(v.kind)
        out[label] = {"samples": samples, "definite": kinds.count("definite-positive"),
                      "verdicts": sorted(set(kinds))}
    return out


def softening_matches(s) -> bool:
    from .polyring import RationalFunction

    ring = s.root.num.ring
    root = RationalFunction(parse("-l2", ring), parse("alpha^2", ring))
    value = RationalFunction(parse("-l2^2 - alpha^2*l1^2", ring), parse("alpha^2", ring))
    return s.root == root and s.value == value


def reduced_1d_convergence(params, branch: str = "minus", offset: float = 1e-2, t_end: float = 100.0,
                           step: float = 1e-2) -> dict:
    eq = float(reduced_1d_stability(params, branch)[0].equilibrium)
    out = {}
    worst = 0.0
    for sgn in (-1, 1):
        x0 = eq + sgn * offset
        tr = integrate(_vectorize(params, branch), [x0], t_end, step=step, variables=("s2",), save_every=100)
        d = abs(float(tr.final[0]) - eq)
        out[f"start {x0:+.6f}"] = d
        worst = max(worst, d)
    return {"equilibrium": eq, "final_distance": out, "max_final_distance": worst, "t_end": t_end}


def _vectorize(params, branch):
    a, l0, l1, l3 = (float(mpq(str(params[k]))) for k in ("alpha", "l0", "l1", "l3"))
    Q = math.sqrt(4 * a * a * l0 * l0 + l1 * l1)
    den = (l1 + Q if branch == "minus" else l1 - Q) * l3

    def fn(x):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.array([-2 * a * l0 * (l0 - l3 * x[0] ** 2) / den])
    return fn


def _simulation(seed: int, ctx: dict) -> Iterable[Item]:
    f, ints = build_reduced_model()
    rng = np.random.default_rng(seed)
    p = {"alpha": float(rng.uniform(0.5, 1.5))}
    x0 = dict(zip(REDUCED_VARIABLES, rng.uniform(-0.8, 0.8, size=6)))
    tr = integrate(f, x0, 10.0, params=p, step=1e-3, save_every=10)
    rep = monitor(tr, ints, params=p)
    ctx["drift_trajectory"] = (tr, ints, p)
    yield Item("simulation", "rk4-integral-drift", rep.max_relative() <= 1e-8,
               {"params": p, "x0": x0, **rep.to_json()})
    cat = catalog()
    for name, start in (("force-free", {"s1": 0.3, "s2": -0.5, "s3": 0.7}),
                        ("force-plane", {"r1": 0.6, "r2": -0.4})):
        tr = integrate(f, start, 10.0, params=p, step=1e-3, save_every=10)
        rep = monitor(tr, [], [cat[name]], params=p)
        yield Item("simulation", f"{name}-stays-invariant", rep.manifolds[name] <= 1e-6, rep.to_json())


RUNNERS: dict[str, Callable] = {
    "model": _model,
    "stationary": _stationary,
    "gb": _gb,
    "families": _families,
    "jacobian": _jacobian,
    "stability": _stability,
    "simulation": _simulation,
}


def run(only: Iterable[str] | None = None, seed: int = DEFAULT_SEED, figures: str | None = None,
        progress: Callable[[Item], None] | None = None, **options) -> Report:
    chosen = list(only) if only else list(BLOCKS)
    for b in chosen:
        if b not in RUNNERS:
            raise KeyError(f"unknown block {b!r}; choose from {', '.join(BLOCKS)}")
    report = Report(seed)
    ctx = dict(options)
    for b in BLOCKS:
        if b not in chosen:
            continue
        t0 = time.perf_counter()
        for item in RUNNERS[b](seed, ctx):
            if not item.seconds:
                item.seconds = time.perf_counter() - t0
            report.items.append(item)
            if progress:
                progress(item)
            t0 = time.perf_counter()
    if figures:
        from .figures import render

        report.figures = render(figures, ctx, seed)
    return report
