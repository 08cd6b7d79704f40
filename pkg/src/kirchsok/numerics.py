"""Numerical integration of polynomial vector fields with drift monitors."""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .kirchhoff import FirstIntegral, VectorField
from .manifolds import ManifoldSpec
from .polyring import Polynomial, StructuralError
from .radicals import AuxiliaryRadicals

__all__ = [
    "compile_polynomials",
    "compile_field",
    "Trajectory",
    "DriftReport",
    "StepUnderflow",
    "integrate",
    "monitor",
    "probe_stability",
    "ProbeReport",
]


class StepUnderflow(RuntimeError):
    pass


def _as_float(v) -> float:
    if isinstance(v, str):
        return float(Fraction(v.strip()))
    return float(v)


def _term_source(exps, names, var_index) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e:
            ref = var_index.get(n)
            parts.append(ref if e == 1 else f"{ref}**{e}")
    return "*".join(parts)


def compile_polynomials(polys: Sequence[Polynomial], variables: Sequence[str],
                        params: Mapping[str, object] | None = None) -> Callable:
    """A fast float function x -> [p1(x), ..., pk(x)] with the parameters folded in."""
    var_index = {k: f"({_as_float(v)!r})" for k, v in (params or {}).items()}
    var_index.update({v: f"x[{i}]" for i, v in enumerate(variables)})
    lines = []
    for q in polys:
        missing = set(q.variables()) - set(var_index)
        if missing:
            raise StructuralError(f"unbound symbols {sorted(missing)}; pass them as parameters")
        names = q.ring.names
        terms = []
        for exps, c in q.terms.items():
            mono = _term_source(exps, names, var_index)
            coef = repr(float(c))
            terms.append(f"{coef}*{mono}" if mono else coef)
        lines.append(" + ".join(terms) if terms else "0.0")
    src = "def _f(x):\n    return [" + ", ".join(lines) + "]\n"
    env: dict = {}
    exec(compile(src, "<compiled polynomials>", "exec"), env)
    fn = env["_f"]

    def call(x):
        return np.asarray(fn(x), dtype=float)

    call.source = src
    return call


def compile_field(f: VectorField, params: Mapping[str, object] | None = None) -> Callable:
    return compile_polynomials([f[v] for v in f.variables], f.variables, params)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    variables: tuple[str, ...]
    accepted: int = 0
    rejected: int = 0
    method: str = "rk4"

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise StructuralError("times and states differ in length")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise StructuralError("times must be strictly increasing")

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def component(self, name: str) -> np.ndarray:
        return self.states[:, self.variables.index(name)]

    def to_csv(self, extra: Mapping[str, np.ndarray] | None = None) -> str:
        extra = dict(extra or {})
        header = ["t", *self.variables, *extra]
        rows = [",".join(header)]
        cols = [self.times, *self.states.T, *extra.values()]
        for row in zip(*cols):
            rows.append(",".join(f"{v:.17g}" for v in row))
        return "\n".join(rows) + "\n"


def _rk4(fn, x0, t_end, step, save_every):
    n = max(1, int(round(t_end / step)))
    h = t_end / n
    x = np.array(x0, dtype=float)
    times, states = [0.0], [x.copy()]
    for i in range(1, n + 1):
        k1 = fn(x)
        k2 = fn(x + 0.5 * h * k1)
        k3 = fn(x + 0.5 * h * k2)
        k4 = fn(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if i % save_every == 0 or i == n:
            times.append(i * h)
            states.append(x.copy())
    return np.array(times), np.array(states), n


def integrate(f: VectorField | Callable, x0: Sequence[float] | Mapping[str, float], t_end: float, *,
              params: Mapping[str, object] | None = None, step: float = 1e-3, adaptive: bool = False,
              rtol: float = 1e-10, atol: float = 1e-12, save_every: int = 1,
              variables: Sequence[str] | None = None) -> Trajectory:
    """Integrate dx/dt = f(x) on [0, t_end].

    Fixed-step classical RK4 by default.  ``adaptive=True`` uses an embedded
    Dormand-Prince 8(5,3) pair (scipy) with the given tolerances.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if isinstance(f, VectorField):
        variables = tuple(f.variables)
        fn = compile_field(f, params)
    else:
        fn = f
        variables = tuple(variables or (f"x{i + 1}" for i in range(len(x0))))
    if isinstance(x0, Mapping):
        x0 = [float(x0.get(v, 0.0)) for v in variables]
    x0 = np.asarray(x0, dtype=float)
    if len(x0) != len(variables):
        raise StructuralError(f"initial state has {len(x0)} entries, the field {len(variables)}")
    if not adaptive:
        times, states, n = _rk4(fn, x0, t_end, step, max(1, save_every))
        return Trajectory(times, states, variables, accepted=n, rejected=0, method="rk4")
    from scipy.integrate import solve_ivp

    sol = solve_ivp(lambda t, x: fn(x), (0.0, t_end), x0, method="DOP853", rtol=rtol, atol=atol,
                    first_step=step)
    if not sol.success:
        raise StepUnderflow(sol.message)
    return Trajectory(sol.t, sol.y.T, variables, accepted=int(sol.nfev // 12), rejected=0, method="dop853")


@dataclass
class DriftReport:
    integrals: dict[str, dict[str, float]] = field(default_factory=dict)
    manifolds: dict[str, float] = field(default_factory=dict)

    def max_relative(self) -> float:
        return max((d["relative"] for d in self.integrals.values()), default=0.0)

    def to_json(self) -> dict:
        return {"integrals": self.integrals, "manifolds": self.manifolds}


def _manifold_polys(m: ManifoldSpec, params: Mapping[str, object]) -> list[Polynomial]:
    from .polyring import Ring, to_rational

    ring = Ring(m.variables)
    aux = AuxiliaryRadicals([], prefix="q")
    out = []
    fixed = {}
    for k, v in params.items():
        try:
            fixed[k] = to_rational(v)
        except TypeError:
            fixed[k] = v
    for e in m.equations:
        f = e.fold({k: v for k, v in fixed.items() if not isinstance(v, float)})
        if f.has_radicals() or (f.variables() - set(m.variables)):
            # evaluate numerically instead
            out.append(e)
            continue
        out.append(f.to_rational_function(ring, aux).num)
    return out


def monitor(traj: Trajectory, integrals: Sequence[FirstIntegral] = (), manifolds: Sequence[ManifoldSpec] = (),
            params: Mapping[str, object] | None = None) -> DriftReport:
    """Maximum drift of each integral and maximum |phi| of each manifold equation."""
    params = dict(params or {})
    rep = DriftReport()
    for I in integrals:
        fn = compile_polynomials([I.expression], traj.variables, params)
        vals = np.array([fn(x)[0] for x in traj.states])
        absd = float(np.max(np.abs(vals - vals[0])))
        scale = max(abs(float(vals[0])), 1e-300)
        rep.integrals[I.name] = {"initial": float(vals[0]), "absolute": absd, "relative": float(absd / scale)}
    for m in manifolds:
        worst = 0.0
        for eq in _manifold_polys(m, params):
            if isinstance(eq, Polynomial):
                fn = compile_polynomials([eq], traj.variables, params)
                vals = np.abs([fn(x)[0] for x in traj.states])
            else:
                vals = np.abs([float(eq.evaluate({**params, **dict(zip(traj.variables, x))}, dps=20))
                               for x in traj.states])
            worst = max(worst, float(np.max(vals)))
        rep.manifolds[m.name] = worst
    return rep


@dataclass
class ProbeReport:
    radius: float
    probes: int
    max_final_distance: float
    max_excursion: float
    escaped: int

    @property
    def bounded(self) -> bool:
        return self.escaped == 0

    def to_json(self) -> dict:
        return {"radius": self.radius, "probes": self.probes, "max_final_distance": self.max_final_distance,
                "max_excursion": self.max_excursion, "escaped": self.escaped}


def probe_stability(f: VectorField, x_eq: Sequence[float] | Mapping[str, float], radius: float, n: int = 8,
                    t_end: float = 100.0, *, params: Mapping[str, object] | None = None, step: float = 1e-2,
                    seed: int = 0, escape_factor: float = 100.0) -> ProbeReport:
    """Integrate ``n`` starts on the sphere of ``radius`` around ``x_eq``.

    A probe "escapes" when its distance from ``x_eq`` exceeds
    ``escape_factor * radius`` at any saved time.
    """
    variables = tuple(f.variables)
    if isinstance(x_eq, Mapping):
        x_eq = [float(x_eq[v]) for v in variables]
    x_eq = np.asarray(x_eq, dtype=float)
    fn = compile_field(f, params)
    rng = np.random.default_rng(seed)
    max_final = max_exc = 0.0
    escaped = 0
    for _ in range(n):
        d = rng.normal(size=len(variables))
        d = d / np.linalg.norm(d) * radius
        traj = integrate(fn, x_eq + d, t_end, step=step, variables=variables, save_every=10)
        dist = np.linalg.norm(traj.states - x_eq, axis=1)
        if not np.all(np.isfinite(dist)):
            dist = np.where(np.isfinite(dist), dist, math.inf)
        max_final = max(max_final, float(dist[-1]))
        max_exc = max(max_exc, float(np.max(dist)))
        if radius > 0 and np.max(dist) > escape_factor * radius:
            escaped += 1
    return ProbeReport(radius, n, max_final, max_exc, escaped)
