"""Candidate stationary sets and invariant manifolds of the reduced system.

A :class:`ManifoldSpec` is either *implicit* (polynomial equations whose
coefficients may contain square roots of parameter expressions) or
*parametric* (a map from free variables to radical expressions).  The
shipped catalog lives in ``data/families.json``.

Exact checks work over the field of rational functions in the parameters.
A square root of a parameter expression becomes an extra variable ``q`` with
its quadratic relation added to the ideal.  Parametric families are checked
numerically in high precision, with interval enclosures bounding the
rounding error.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence

import mpmath
from gmpy2 import mpq

from .groebner import (
    IdealBasis,
    MonomialOrder,
    buchberger,
    buchberger_field,
    eliminate,
    field_normal_form,
    normal_form,
)
from .kirchhoff import (
    REDUCED_VARIABLES,
    IntegralCombination,
    VectorField,
    build_reduced_model,
    stationary_system,
)
from .polyring import Polynomial, RationalFunction, Ring, StructuralError, default_ring, to_rational
from .radicals import AuxiliaryRadicals, NegativeRadicand, RadicalExpr, from_polynomial, parse_radical

__all__ = [
    "ManifoldSpec",
    "ReducedField",
    "StationarityReport",
    "InvarianceReport",
    "EmptyChart",
    "ChartSingularity",
    "NotInvariant",
    "catalog",
    "load_catalog",
    "check_stationarity",
    "check_invariance",
    "reduce_field",
    "reduced_integrals",
    "implicitize",
    "same_ideal",
    "ideal_contains",
    "sample_point",
]

WEIGHT_NAMES = ("alpha", "l0", "l1", "l2", "l3")
DEFAULT_BOX = ((mpq(1, 4), mpq(4)), (mpq(-4), mpq(-1, 4)))


class EmptyChart(RuntimeError):
    """No admissible sample was found within the budget."""


class ChartSingularity(ZeroDivisionError):
    """The manifold relations do not express the field on the chosen variables."""


class NotInvariant(AssertionError):
    def __init__(self, name: str, residual: str):
        super().__init__(f"{name} is not invariant; offending residual {residual}")
        self.residual = residual


# ---------------------------------------------------------------------------
# Specs and catalog
# ---------------------------------------------------------------------------


def _interval(pair) -> tuple[mpq, mpq]:
    lo, hi = (to_rational(x) for x in pair)
    if lo > hi:
        lo, hi = hi, lo
    return lo, hi


@dataclass(frozen=True)
class ManifoldSpec:
    name: str
    kind: str
    variables: tuple[str, ...] = REDUCED_VARIABLES
    free: tuple[str, ...] = ()
    equations: tuple[RadicalExpr, ...] = ()
    mapping: tuple[tuple[str, RadicalExpr], ...] = ()
    conditions: tuple[tuple[str, RadicalExpr], ...] = ()
    signs: tuple[str, ...] = ()
    region: tuple[tuple[str, tuple[tuple[mpq, mpq], ...]], ...] = ()
    chart: tuple[tuple[str, RadicalExpr], ...] = ()
    description: str = ""
    available: bool = True
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("implicit", "parametric"):
            raise StructuralError(f"unknown manifold kind {self.kind!r}")
        if not self.available:
            return
        if self.kind == "implicit":
            if not self.equations:
                raise StructuralError(f"{self.name}: an implicit spec needs equations")
            for e in self.equations:
                if e.fold().op == "const" and e.fold().args[0] == 0:
                    raise StructuralError(f"{self.name}: zero defining equation")
        else:
            bound = {v for v, _ in self.mapping}
            missing = [v for v in self.variables if v not in bound]
            if missing:
                raise StructuralError(f"{self.name}: map does not bind {', '.join(missing)}")

    @property
    def map(self) -> dict[str, RadicalExpr]:
        return dict(self.mapping)

    @property
    def condition_map(self) -> dict[str, RadicalExpr]:
        return dict(self.conditions)

    @property
    def region_map(self) -> dict[str, tuple[tuple[mpq, mpq], ...]]:
        return dict(self.region)

    def parameters(self) -> tuple[str, ...]:
        """Parameter names the family depends on, conditioned ones excluded."""
        used = set()
        for e in self.expressions():
            used |= e.variables()
        used -= set(self.variables) | set(self.free) | set(self.signs)
        used -= {k for k, _ in self.conditions}
        order = {n: i for i, n in enumerate(default_ring().names)}
        return tuple(sorted(used, key=lambda n: (order.get(n, len(order)), n)))

    def expressions(self) -> list[RadicalExpr]:
        out = list(self.equations) + [e for _, e in self.mapping] + [e for _, e in self.conditions]
        return out

    # -- serialisation --------------------------------------------------

    @classmethod
    def from_dict(cls, d: Mapping) -> "ManifoldSpec":
        env: dict[str, RadicalExpr] = {}
        for name, text in d.get("definitions", []):
            env[name] = parse_radical(text, env)
        variables = tuple(d.get("variables", REDUCED_VARIABLES))
        conditions = tuple((k, parse_radical(str(v), env)) for k, v in d.get("conditions", {}).items())
        equations = tuple(parse_radical(t, env) for t in d.get("equations", []))
        mapping = tuple((k, parse_radical(str(v), env)) for k, v in d.get("map", {}).items())
        region = tuple((k, tuple(_interval(p) for p in v)) for k, v in d.get("region", {}).items())
        chart = tuple((k, parse_radical(str(v), env)) for k, v in d.get("chart", {}).items())
        return cls(
            name=d["name"],
            kind=d["kind"],
            variables=variables,
            free=tuple(d.get("free", ())),
            equations=equations,
            mapping=mapping,
            conditions=conditions,
            signs=tuple(d.get("signs", ())),
            region=region,
            chart=chart,
            description=d.get("description", ""),
            available=d.get("available", True),
            source=dict(d),
        )

    def to_dict(self) -> dict:
        if self.source:
            return dict(self.source)
        d = {"name": self.name, "kind": self.kind, "description": self.description}
        if self.variables != REDUCED_VARIABLES:
            d["variables"] = list(self.variables)
        if self.free:
            d["free"] = list(self.free)
        if self.signs:
            d["signs"] = list(self.signs)
        if self.conditions:
            d["conditions"] = {k: str(v) for k, v in self.conditions}
        if self.equations:
            d["equations"] = [str(e) for e in self.equations]
        if self.mapping:
            d["map"] = {k: str(v) for k, v in self.mapping}
        if self.region:
            d["region"] = {k: [[str(a), str(b)] for a, b in v] for k, v in self.region}
        if self.chart:
            d["chart"] = {k: str(v) for k, v in self.chart}
        if not self.available:
            d["available"] = False
        return d

    @classmethod
    def implicit(cls, name: str, equations: Iterable, **kw) -> "ManifoldSpec":
        eqs = tuple(e if isinstance(e, RadicalExpr) else
                    from_polynomial(e) if isinstance(e, Polynomial) else parse_radical(e)
                    for e in equations)
        return cls(name=name, kind="implicit", equations=eqs, **kw)

    def with_signs(self, **values) -> "ManifoldSpec":
        """The branch with the given sign symbols fixed."""
        fixed = {k: mpq(v) for k, v in values.items()}
        mapping = tuple((k, e.fold(fixed)) for k, e in self.mapping)
        eqs = tuple(e.fold(fixed) for e in self.equations)
        suffix = ",".join(f"{k}={'+' if v > 0 else '-'}" for k, v in sorted(values.items()))
        return ManifoldSpec(self.name + f"[{suffix}]", self.kind, self.variables, self.free, eqs, mapping,
                            self.conditions, tuple(s for s in self.signs if s not in values),
                            self.region, self.chart, self.description, self.available)


def load_catalog(path=None) -> dict[str, ManifoldSpec]:
    if path is None:
        text = resources.files("kirchsok").joinpath("data/families.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    data = json.loads(text)
    out = {}
    for entry in data["families"]:
        spec = ManifoldSpec.from_dict(entry)
        if spec.name in out:
            raise StructuralError(f"duplicate family name {spec.name!r}")
        out[spec.name] = spec
    return out


@lru_cache(maxsize=1)
def _shipped():
    return load_catalog()


def catalog() -> dict[str, ManifoldSpec]:
    """The shipped family catalog (name -> spec)."""
    return dict(_shipped())


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _draw(rng: random.Random, box) -> mpq:
    lo, hi = box[rng.randrange(len(box))]
    return lo + (hi - lo) * mpq(rng.randrange(1, 512), 512)


def sample_point(spec: ManifoldSpec, rng: random.Random, *, exact: bool = False,
                 fixed: Mapping[str, object] | None = None, free: bool = True) -> dict:
    """One random parameter point (plus free variables) inside the family's box.

    With ``exact`` the family's rational chart is used so that parameter
    radicals come out rational; conditioned parameters are then exact too.
    Otherwise conditioned parameters are left to the caller (they may be
    irrational).
    """
    fixed = {k: to_rational(v) for k, v in (fixed or {}).items()}
    region = spec.region_map
    chart = spec.condition_map
    point: dict = {}
    chart_names = set()
    if exact:
        for _, e in spec.chart:
            chart_names |= e.variables()
        chart_names -= set(WEIGHT_NAMES)
    names = [n for n in WEIGHT_NAMES if n not in chart and n not in fixed]
    for n in sorted(chart_names):
        point[n] = _draw(rng, region.get(n, DEFAULT_BOX))
    for n in names:
        point[n] = _draw(rng, region.get(n, DEFAULT_BOX))
    point.update(fixed)
    if exact:
        for k, e in spec.chart:
            if k not in fixed:
                point[k] = e.exact_value(point)
        for k, e in spec.conditions:
            point[k] = e.exact_value(point)
    if free:
        for v in spec.free:
            point[v] = _draw(rng, region.get(v, DEFAULT_BOX))
    return point


# ---------------------------------------------------------------------------
# Polynomials with rational-function coefficients
# ---------------------------------------------------------------------------
# A "field polynomial" is a dict: exponent tuple -> RationalFunction.


def _fp_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = (c if sign > 0 else -c) if v is None else (v + c if sign > 0 else v - c)
        if v.is_zero():
            out.pop(e, None)
        else:
            out[e] = v
    return out


def _fp_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = ca * cb
            w = out.get(e)
            v = v if w is None else w + v
            if v.is_zero():
                out.pop(e, None)
            else:
                out[e] = v
    return out


def _fp_diff(a: dict, i: int) -> dict:
    out = {}
    for e, c in a.items():
        if e[i]:
            k = list(e)
            k[i] -= 1
            out[tuple(k)] = c * e[i]
    return out


def _fp_str(a: dict, names: Sequence[str]) -> str:
    if not a:
        return "0"
    parts = []
    for e, c in sorted(a.items(), reverse=True):
        mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
        parts.append(f"({c})" + (f"*{mono}" if mono else ""))
    return " + ".join(parts)


class _Context:
    """Exact arithmetic for one family: variables over Q(parameters)[aux]."""

    def __init__(self, spec: ManifoldSpec, fixed: Mapping[str, object] | None = None,
                 keep: Sequence[str] | None = None, extra: Sequence[RadicalExpr] = ()):
        self.spec = spec
        self.fixed = {k: to_rational(v) for k, v in (fixed or {}).items()}
        exprs = [e.fold(self.fixed) for e in spec.equations]
        conds = [(k, e.fold(self.fixed)) for k, e in spec.conditions]
        extra = [e.fold(self.fixed) for e in extra]
        varset = set(spec.variables)
        for e in exprs + [e for _, e in conds] + extra:
            for r in e.radicands():
                if r.variables() & varset:
                    raise StructuralError(
                        f"{spec.name}: variable under a radical; use a parametric spec")
        names = set(default_ring().names) | set(spec.variables)
        for e in exprs + [e for _, e in conds] + extra:
            names |= e.variables()
        self.aux = AuxiliaryRadicals(exprs + [e for _, e in conds] + extra, prefix="q", taken=names)
        self.vars = tuple(spec.variables)
        self.gb_names = self.vars + tuple(self.aux.names)
        self.params = tuple(sorted(names - set(self.vars)))
        self.ext = Ring(self.gb_names + self.params)
        self.pring = Ring(self.params)
        self.gb_ring = Ring(self.gb_names)
        self.equations = exprs
        self.conditions = {}
        for k, e in conds:
            self.conditions[k] = e.to_rational_function(self.ext, self.aux)
        for k, v in self.fixed.items():
            if k in self.ext.index and k not in self.conditions:
                self.conditions[k] = RationalFunction(self.ext.const(v))
        self.relations = [self.from_polynomial(p) for p in self.aux.relations(self.ext).values()]
        self.keep = tuple(keep) if keep is not None else None
        self._basis: dict = {}

    # conversions ------------------------------------------------------

    def _split(self, rf: RationalFunction) -> dict:
        den_vars = set(rf.den.variables())
        if den_vars & set(self.gb_names):
            # clear a denominator that involves system variables; only the
            # numerator matters for membership
            den = self.pring.one()
        else:
            den = rf.den.embed(self.pring)
        out = {}
        for e, coeff in rf.num.coefficients_in(self.gb_names).items():
            out[e] = RationalFunction(coeff.embed(self.pring), den)
        return out

    def from_rational(self, rf: RationalFunction) -> dict:
        if self.conditions:
            num = rf.num.compose(self.conditions)
            den = rf.den.compose(self.conditions)
            rf = num / den
        return self._split(rf)

    def from_polynomial(self, p: Polynomial) -> dict:
        return self.from_rational(RationalFunction(p.embed(self.ext)))

    def from_expr(self, e: RadicalExpr) -> dict:
        return self.from_rational(self.to_rational(e))

    def to_rational(self, e: RadicalExpr) -> RationalFunction:
        return e.fold(self.fixed).to_rational_function(self.ext, self.aux)

    def generators(self) -> list[dict]:
        return [self.from_expr(e) for e in self.equations] + list(self.relations)

    # ideal operations ----------------------------------------------------

    def order(self, keep: Sequence[str] | None = None) -> MonomialOrder:
        if keep is None:
            return MonomialOrder.grevlex(*self.gb_names)
        drop = [v for v in self.vars if v not in keep]
        kept = [v for v in self.vars if v in keep] + list(self.aux.names)
        return MonomialOrder.elimination(drop, kept)

    def basis(self, keep: Sequence[str] | None = None) -> list[dict]:
        key = tuple(keep) if keep is not None else None
        if key not in self._basis:
            self._basis[key] = buchberger_field(self.generators(), self.gb_ring, self.order(keep))
        return self._basis[key]

    def reduce(self, f: dict, keep: Sequence[str] | None = None) -> dict:
        return field_normal_form(f, self.basis(keep), self.gb_ring, self.order(keep))

    def lie(self, f: dict, fields: Mapping[str, dict]) -> dict:
        out: dict = {}
        for v in self.vars:
            d = _fp_diff(f, self.gb_ring.index[v])
            if d:
                out = _fp_add(out, _fp_mul(d, fields[v]))
        return out

    def to_expr(self, f: dict) -> RadicalExpr:
        """Back to a radical expression: auxiliaries become their square roots."""
        subs = {n: self.aux.expression(n) for n in self.aux.names}
        total = None
        for e, c in sorted(f.items(), reverse=True):
            coeff = from_polynomial(c.num.embed(self.ext))
            if not (c.den.is_constant() and c.den.constant_value() == 1):
                coeff = coeff / from_polynomial(c.den.embed(self.ext))
            term = coeff
            for n, k in zip(self.gb_names, e):
                if k:
                    v = RadicalExpr.var(n)
                    term = term * (v if k == 1 else v ** k)
            total = term if total is None else total + term
        if total is None:
            return RadicalExpr.const(0)
        return total.substitute(subs)

    def describe(self, f: dict) -> str:
        return _fp_str(f, self.gb_names)


# ---------------------------------------------------------------------------
# Stationarity
# ---------------------------------------------------------------------------


@dataclass
class StationarityReport:
    family: str
    kind: str
    method: str
    passed: bool
    samples: int = 0
    max_residual: float | None = None
    max_error_bound: float | None = None
    tolerance: float | None = None
    certificates: list[str] = field(default_factory=list)
    points: list[dict] = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        d = {
            "family": self.family,
            "kind": self.kind,
            "method": self.method,
            "passed": self.passed,
            "samples": self.samples,
            "max_residual": None if self.max_residual is None else float(self.max_residual),
            "max_error_bound": None if self.max_error_bound is None else float(self.max_error_bound),
            "tolerance": self.tolerance,
            "certificates": self.certificates,
            "note": self.note,
        }
        return d


def _weights_point(K: IntegralCombination | None) -> dict:
    return dict(K.point) if K is not None else {}


def check_stationarity(spec: ManifoldSpec, K: IntegralCombination | None = None, *,
                       samples: int = 10, tol: float = 1e-30, dps: int = 50, seed: int = 0,
                       max_tries: int = 20000) -> StationarityReport:
    """Is every point of ``spec`` a critical point of K?

    Implicit specs: each gradient component must reduce to zero modulo the
    defining ideal (exact, over the parameter field).  Parametric specs:
    the largest gradient component over ``samples`` admissible random
    parameter points must not exceed ``tol`` at ``dps`` digits.
    """
    if not spec.available:
        return StationarityReport(spec.name, spec.kind, "none", False, note="family not available")
    K = K or IntegralCombination.symbolic()
    fixed = _weights_point(K)
    for k, cond in spec.conditions:
        if k in fixed:
            try:
                want = cond.exact_value(fixed)
            except ValueError:
                want = None
            if want != fixed[k]:
                return StationarityReport(spec.name, spec.kind, "condition", False,
                                          note=f"weights violate the family condition on {k}")
    if spec.kind == "implicit":
        return _stationarity_exact(spec, K, fixed)
    return _stationarity_numeric(spec, K, fixed, samples, tol, dps, seed, max_tries)


def _stationarity_exact(spec, K, fixed) -> StationarityReport:
    ctx = _Context(spec, fixed={k: v for k, v in fixed.items() if k not in spec.condition_map})
    certs, ok = [], True
    for v, g in zip(REDUCED_VARIABLES, stationary_system(K)):
        r = ctx.reduce(ctx.from_polynomial(g))
        certs.append(f"NF(dK/d{v}) = {ctx.describe(r)}")
        ok = ok and not r
    return StationarityReport(spec.name, spec.kind, "ideal-membership", ok, certificates=certs)


def _composite(spec: ManifoldSpec, K: IntegralCombination) -> list[RadicalExpr]:
    subs = dict(spec.mapping)
    conds = dict(spec.conditions)
    out = []
    for g in stationary_system(K):
        e = from_polynomial(g).substitute(subs)
        if conds:
            e = e.substitute(conds)
        out.append(e)
    return out


def _stationarity_numeric(spec, K, fixed, samples, tol, dps, seed, max_tries) -> StationarityReport:
    rng = random.Random(seed)
    grads = _composite(spec, K)
    residuals, bounds, points = [], [], []
    tries = 0
    while len(residuals) < samples and tries < max_tries:
        tries += 1
        pt = sample_point(spec, rng, fixed=fixed)
        for s in spec.signs:
            pt[s] = rng.choice((1, -1))
        try:
            # the map itself must be real at this point
            for _, e in spec.mapping:
                e.evaluate(pt, dps=dps)
            for _, e in spec.conditions:
                e.evaluate(pt, dps=dps)
            ev = [g.enclose(pt, dps=dps) for g in grads]
        except (NegativeRadicand, ZeroDivisionError):
            continue
        with mpmath.workdps(dps):
            residuals.append(max(abs(x.value) for x in ev))
        if any(x.error_bound is None for x in ev):
            bounds.append(None)
        else:
            bounds.append(max(x.error_bound for x in ev))
        points.append({k: str(v) for k, v in pt.items()})
    if not residuals:
        raise EmptyChart(f"{spec.name}: no admissible sample in {max_tries} tries")
    with mpmath.workdps(dps):
        worst = max(residuals)
    known = [b for b in bounds if b is not None]
    passed = len(residuals) >= samples and worst <= tol
    note = "" if len(residuals) >= samples else f"only {len(residuals)} admissible samples"
    return StationarityReport(
        spec.name, spec.kind, f"numeric-{dps}-digits", passed, samples=len(residuals),
        max_residual=worst, max_error_bound=max(known) if known else None, tolerance=tol,
        points=points, note=note)


# ---------------------------------------------------------------------------
# Invariance and reduction
# ---------------------------------------------------------------------------


@dataclass
class InvarianceReport:
    family: str
    passed: bool
    certificates: list[str]
    offending: str | None = None

    def require(self) -> "InvarianceReport":
        if not self.passed:
            raise NotInvariant(self.family, self.offending or "")
        return self

    def to_json(self) -> dict:
        return {"family": self.family, "passed": self.passed, "certificates": self.certificates,
                "offending": self.offending}


def _field_components(ctx: _Context, f: VectorField) -> dict[str, dict]:
    missing = [v for v in ctx.vars if v not in f.variables]
    if missing:
        raise StructuralError(f"field has no component for {', '.join(missing)}")
    return {v: ctx.from_polynomial(f[v]) for v in ctx.vars}


def check_invariance(spec: ManifoldSpec, f: VectorField | None = None) -> InvarianceReport:
    """Lie derivative of every defining equation must lie in the ideal."""
    if spec.kind != "implicit":
        raise StructuralError("invariance is certified for implicit specs; implicitize first")
    f = f or build_reduced_model()[0]
    ctx = _Context(spec)
    comps = _field_components(ctx, f)
    certs, offending = [], None
    for i, eq in enumerate(ctx.equations):
        lie = ctx.lie(ctx.from_expr(eq), comps)
        r = ctx.reduce(lie)
        certs.append(f"NF(L_f phi{i + 1}) = {ctx.describe(r)}")
        if r and offending is None:
            offending = ctx.describe(r)
    return InvarianceReport(spec.name, offending is None, certs, offending)


@dataclass
class ReducedField:
    family: str
    variables: tuple[str, ...]
    exact: dict                      # variable -> field polynomial
    context: _Context = field(repr=False)

    def expression(self, var: str) -> RadicalExpr:
        return self.context.to_expr(self.exact[var])

    def components(self) -> dict[str, RadicalExpr]:
        return {v: self.expression(v) for v in self.variables}

    def __str__(self):
        return "\n".join(f"d{v}/dt = {self.context.describe(self.exact[v])}" for v in self.variables)

    def matches(self, var: str, expected) -> bool:
        """Exact comparison with an expected expression (text or RadicalExpr)."""
        ctx = self.context
        if isinstance(expected, str):
            expected = parse_radical(expected)
        rf = ctx.to_rational(expected)
        num = ctx.from_rational(RationalFunction(rf.num))
        den = ctx.from_rational(RationalFunction(rf.den))
        diff = _fp_add(_fp_mul(den, self.exact[var]), num, sign=-1)
        return not ctx.reduce(diff, keep=self.variables)

    def evaluate(self, point: Mapping[str, object], dps: int = 50) -> dict:
        return {v: self.expression(v).evaluate(point, dps=dps) for v in self.variables}


def reduce_field(spec: ManifoldSpec, f: VectorField | None = None,
                 keep: Sequence[str] | None = None) -> ReducedField:
    """Express the field on the surviving variables of an implicit family."""
    if spec.kind != "implicit":
        raise StructuralError("reduce_field needs an implicit spec")
    f = f or build_reduced_model()[0]
    keep = tuple(keep or spec.free)
    if not keep:
        raise StructuralError(f"{spec.name}: no surviving variables declared")
    ctx = _Context(spec, keep=keep)
    comps = _field_components(ctx, f)
    out = {}
    dropped = {ctx.gb_ring.index[v] for v in ctx.vars if v not in keep}
    for v in keep:
        r = ctx.reduce(comps[v], keep=keep)
        bad = [e for e in r if any(e[i] for i in dropped)]
        if bad:
            raise ChartSingularity(
                f"{spec.name}: d{v}/dt is not determined by {', '.join(keep)} on this family")
        out[v] = r
    return ReducedField(spec.name, keep, out, ctx)


# ---------------------------------------------------------------------------
# Integrals of a reduced field
# ---------------------------------------------------------------------------


def _monomials(n: int, max_degree: int) -> list[tuple[int, ...]]:
    out = []

    def rec(prefix, left, k):
        if k == n:
            if sum(prefix) >= 1:
                out.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e, k + 1)

    rec([], max_degree, 0)
    out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return out


def _nullspace(rows: list[list[RationalFunction]], ncols: int, one) -> list[list[RationalFunction]]:
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = one / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                fct = m[i][c]
                m[i] = [a - fct * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [one * 0 for _ in range(ncols)]
        v[fc] = one
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def reduced_integrals(rf: ReducedField, max_degree: int = 2) -> list[RadicalExpr]:
    """Polynomial first integrals of degree 1..max_degree in the surviving variables.

    An ansatz with unknown coefficients (in the parameter field, times each
    auxiliary monomial of degree < 2) is forced to have zero Lie derivative;
    the solution space is returned as a basis, each element re-verified.
    """
    ctx = rf.context
    idx = [ctx.gb_ring.index[v] for v in rf.variables]
    aux_idx = [ctx.gb_ring.index[a] for a in ctx.aux.names]
    n = ctx.gb_ring.nvars
    one = RationalFunction(ctx.pring.one())
    cands = []
    for mono in _monomials(len(idx), max_degree):
        for amask in range(1 << len(aux_idx)):
            e = [0] * n
            for i, k in zip(idx, mono):
                e[i] = k
            for j, ai in enumerate(aux_idx):
                if amask >> j & 1:
                    e[ai] = 1
            cands.append(tuple(e))
    comps = {v: rf.exact[v] for v in rf.variables}

    def lie(f):
        out: dict = {}
        for v in rf.variables:
            d = _fp_diff(f, ctx.gb_ring.index[v])
            if d:
                out = _fp_add(out, _fp_mul(d, comps[v]))
        return ctx.reduce(out, keep=rf.variables)

    columns = [lie({c: one}) for c in cands]
    keys = sorted({k for col in columns for k in col})
    zero = one * 0
    rows = [[col.get(k, zero) for col in columns] for k in keys]
    if not rows:
        basis = [[one if i == j else zero for i in range(len(cands))] for j in range(len(cands))]
    else:
        basis = _nullspace(rows, len(cands), one)
    out = []
    for vec in basis:
        f = {c: x for c, x in zip(cands, vec) if not x.is_zero()}
        if lie(f):
            raise AssertionError("integral candidate failed re-verification")
        out.append(ctx.to_expr(f))
    return out


# ---------------------------------------------------------------------------
# Implicitization and ideal comparison
# ---------------------------------------------------------------------------


def implicitize(spec: ManifoldSpec, point: Mapping[str, object] | None = None, *,
                keep: Sequence[str] | None = None, **budget) -> ManifoldSpec:
    """Radical-free relations satisfied by a parametric family.

    Every distinct radicand gets an auxiliary ``t`` with ``t^2 = N*D``; a
    variable ``_y`` with ``_y * (product of denominators) = 1`` removes the
    components where a denominator vanishes.  Auxiliaries, free variables
    not kept, unfixed sign symbols and ``_y`` are then eliminated.  With
    ``point`` the parameters are fixed to exact rationals; otherwise they
    stay as (kept) ring variables.  ``keep`` restricts the output to a
    subset of the system variables, using only their map entries.
    """
    if spec.kind != "parametric":
        raise StructuralError("implicitize needs a parametric spec")
    point = {k: to_rational(v) for k, v in (point or {}).items()}
    for k, e in spec.conditions:
        if k not in point and point:
            try:
                point[k] = e.exact_value(point)
            except ValueError:
                pass
    keep_vars = tuple(keep) if keep is not None else spec.variables
    conds = {k: e for k, e in spec.conditions if k not in point}
    entries = []
    for v, e in spec.mapping:
        if v not in keep_vars:
            continue
        if conds:
            e = e.substitute(conds)
        entries.append((v, e.fold(point)))
    used = set()
    for _, e in entries:
        used |= e.variables()
    signs = [s for s in spec.signs if s in used and s not in point]
    free_drop = [v for v in spec.free if v not in keep_vars and v in used]
    params = sorted(used - set(keep_vars) - set(signs) - set(free_drop))
    taken = used | set(keep_vars)
    aux = AuxiliaryRadicals([e for _, e in entries], prefix="t", taken=taken)
    y = "_y"
    ring = Ring(tuple(keep_vars) + tuple(free_drop) + tuple(aux.names) + tuple(signs) + (y,) + tuple(params))
    gens, dens = [], ring.one()
    for v, e in entries:
        rf = e.to_rational_function(ring, aux)
        gens.append(ring.var(v) * rf.den - rf.num)
        if not rf.den.is_constant():
            dens = dens * rf.den
    for name, rel in aux.relations(ring).items():
        gens.append(rel)
        inner = aux.radicand[name].to_rational_function(ring, aux)
        if not inner.den.is_constant():
            dens = dens * inner.den
    for s in signs:
        gens.append(ring.var(s) ** 2 - 1)
    gens.append(ring.var(y) * dens - 1)
    gens = [g for g in gens if not g.is_zero()]
    basis = eliminate(gens, list(keep_vars) + params, **budget)
    target = Ring(tuple(keep_vars) + tuple(params))
    eqs = [g.embed(target) for g in basis.generators]
    return ManifoldSpec.implicit(
        spec.name + "-implicit", eqs, variables=tuple(keep_vars),
        free=tuple(v for v in spec.free if v in keep_vars),
        description=f"relations satisfied by {spec.name}" + (" at a fixed parameter point" if point else ""),
        source={})


def _specialized_polys(spec: ManifoldSpec, point: Mapping[str, object]) -> tuple[Ring, list[Polynomial]]:
    pt = {k: to_rational(v) for k, v in point.items()}
    for k, e in spec.conditions:
        if k not in pt:
            pt[k] = e.exact_value(pt)
    ring = Ring(spec.variables)
    aux = AuxiliaryRadicals([], prefix="q")
    out = []
    for e in spec.equations:
        f = e.fold(pt)
        if f.variables() - set(spec.variables):
            raise StructuralError(f"{spec.name}: unbound parameters {sorted(f.variables() - set(spec.variables))}")
        rf = f.to_rational_function(ring, aux)
        out.append(rf.num)
    return ring, [p for p in out if not p.is_zero()]


def _gb(polys: list[Polynomial], ring: Ring) -> IdealBasis:
    return buchberger(polys, MonomialOrder.grevlex(*ring.names))


def ideal_contains(big: ManifoldSpec, small: ManifoldSpec, point: Mapping[str, object]) -> bool:
    """Every defining equation of ``small`` lies in the ideal of ``big`` at ``point``."""
    ring, pb = _specialized_polys(big, point)
    ring2, ps = _specialized_polys(small, point)
    if ring is not ring2:
        raise StructuralError("the two families live on different variables")
    gb = _gb(pb, ring)
    return all(normal_form(p, gb).is_zero() for p in ps)


def same_ideal(a: ManifoldSpec, b: ManifoldSpec, point: Mapping[str, object]) -> bool:
    """Mutual membership of the specialized defining ideals."""
    return ideal_contains(a, b, point) and ideal_contains(b, a, point)
