"""Second variations, Sylvester tests, softening and linear stability.

Quadratic forms carry exact rational-function entries in the weights, alpha
and the base value ``s30`` of a family's free coordinate.  Verdicts are
decided from signs: leading principal minors for definiteness, the sign of
a linear coefficient for the one-dimensional reduced flow, and the largest
real part of the characteristic roots for the full linearization.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath
import numpy as np
from gmpy2 import mpq

from .kirchhoff import (
    REDUCED_VARIABLES,
    FirstIntegral,
    IntegralCombination,
    build_reduced_model,
)
from .manifolds import ManifoldSpec, catalog
from .polyring import Polynomial, RationalFunction, Ring, StructuralError, parse, to_rational
from .radicals import AuxiliaryRadicals, parse_radical

__all__ = [
    "QuadraticForm",
    "ConstraintSet",
    "DeviationFrame",
    "StabilityVerdict",
    "SpectrumReport",
    "NonStationaryBase",
    "CannotEliminate",
    "NoRealEquilibrium",
    "NotAnEquilibrium",
    "FRAMED_LINE_DEVIATIONS",
    "deviation_frame",
    "second_variation",
    "constraint_variations",
    "restrict",
    "sylvester",
    "leading_minors",
    "zero_solution_stability",
    "soften",
    "reduced_1d_stability",
    "cylinder_equilibrium",
    "characteristic_polynomial",
    "fullspace_linearization",
    "adjunct_survey",
]

WEIGHT_NAMES = ("alpha", "l0", "l1", "l2", "l3")
FLOAT_TOL = 1e-12

# Deviations around a point of the framed line; s30 is the base value of s3.
FRAMED_LINE_DEVIATIONS = (
    ("z1", "r1 + s3/alpha"),
    ("z2", "r2"),
    ("z3", "r3 - l0*s3/l1"),
    ("z4", "s1 + l1*s3/(alpha*l0)"),
    ("z5", "s2"),
    ("z6", "s3 - s30"),
)
FRAMED_LINE_CONDITIONS = {"l2": "-(alpha^2*l0^2 + l1^2)/(2*l0)"}


class NonStationaryBase(ValueError):
    def __init__(self, var: str, value):
        super().__init__(f"base point is not stationary: dK/d{var} = {value}")
        self.var = var
        self.value = value


class CannotEliminate(ZeroDivisionError):
    def __init__(self, pivot: str):
        super().__init__(f"cannot eliminate: pivot {pivot} vanishes")
        self.pivot = pivot


class NoRealEquilibrium(ValueError):
    pass


class NotAnEquilibrium(ValueError):
    pass


# ---------------------------------------------------------------------------
# Small exact linear algebra (works for RationalFunction and mpq entries)
# ---------------------------------------------------------------------------


def _is_zero(x) -> bool:
    if isinstance(x, RationalFunction):
        return x.is_zero()
    return x == 0


def _inverse(m: list[list], one, zero) -> list[list]:
    n = len(m)
    a = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not _is_zero(a[r][c])), None)
        if piv is None:
            raise CannotEliminate(f"column {c + 1}")
        a[c], a[piv] = a[piv], a[c]
        inv = one / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and not _is_zero(a[r][c]):
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def _det(m: list[list], one, zero):
    n = len(m)
    if n == 0:
        return one
    a = [list(r) for r in m]
    det = one
    for c in range(n):
        piv = next((r for r in range(c, n) if not _is_zero(a[r][c])), None)
        if piv is None:
            return zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c]
        inv = one / a[c][c]
        for r in range(c + 1, n):
            if not _is_zero(a[r][c]):
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def _matmul(a, b, zero):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), zero) for j in range(len(b[0]))]
            for i in range(len(a))]


def _transpose(a):
    return [list(r) for r in zip(*a)]


def _rank(rows: list[list], zero) -> int:
    a = [list(r) for r in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(a)) if not _is_zero(a[r][c])), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(rank + 1, len(a)):
            if not _is_zero(a[r][c]):
                f = a[r][c] / a[rank][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Deviation coordinates
# ---------------------------------------------------------------------------


def _stab_ring(deviations: Sequence[str]) -> Ring:
    return Ring(REDUCED_VARIABLES + tuple(deviations) + ("s30",) + WEIGHT_NAMES)


@dataclass
class DeviationFrame:
    """Affine coordinates z = A x + c centred at the base point x0 (z = 0)."""

    ring: Ring
    names: tuple[str, ...]
    A: list[list[RationalFunction]]
    T: list[list[RationalFunction]]          # inverse of A: x - x0 = T z
    base: dict[str, RationalFunction]
    conditions: dict[str, RationalFunction]

    def one(self):
        return RationalFunction(self.ring.one())

    def zero(self):
        return RationalFunction(self.ring.zero())

    def lift(self, p: Polynomial) -> RationalFunction:
        """Polynomial (in system variables and weights) at the base point."""
        rf = RationalFunction(p.embed(self.ring))
        return self.specialize(rf, with_base=True)

    def specialize(self, rf: RationalFunction, with_base: bool = False) -> RationalFunction:
        binds = dict(self.base) if with_base else {}
        if binds:
            rf = rf.num.compose(binds) / rf.den.compose(binds)
        if self.conditions:
            rf = rf.num.compose(self.conditions) / rf.den.compose(self.conditions)
        return rf


def deviation_frame(deviations: Sequence[tuple[str, str]] = FRAMED_LINE_DEVIATIONS,
                    conditions: Mapping[str, str] | None = FRAMED_LINE_CONDITIONS) -> DeviationFrame:
    names = tuple(n for n, _ in deviations)
    ring = _stab_ring(names)
    aux = AuxiliaryRadicals([], prefix="q")
    one, zero = RationalFunction(ring.one()), RationalFunction(ring.zero())
    rows, consts = [], []
    origin = {v: 0 for v in REDUCED_VARIABLES}
    for _, text in deviations:
        rf = parse_radical(text).to_rational_function(ring, aux)
        row = [rf.differentiate(v) for v in REDUCED_VARIABLES]
        for d in row:
            if set(d.num.variables()) & set(REDUCED_VARIABLES):
                raise StructuralError(f"deviation {text!r} is not affine in the system variables")
        rows.append(row)
        consts.append(rf.substitute(origin))
    T = _inverse(rows, one, zero)
    base = {}
    for i, v in enumerate(REDUCED_VARIABLES):
        base[v] = sum((-T[i][k] * consts[k] for k in range(len(names))), zero)
    conds = {}
    for k, text in (conditions or {}).items():
        conds[k] = parse_radical(text).to_rational_function(ring, aux)
    return DeviationFrame(ring, names, rows, T, base, conds)


# ---------------------------------------------------------------------------
# Quadratic forms
# ---------------------------------------------------------------------------


@dataclass
class QuadraticForm:
    """q(z) = z^T M z with symmetric M."""

    variables: tuple[str, ...]
    matrix: list[list]

    def __post_init__(self):
        n = len(self.variables)
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise StructuralError("matrix size does not match the variable count")
        for i in range(n):
            for j in range(i):
                d = self.matrix[i][j] - self.matrix[j][i]
                if not _is_zero(d):
                    raise StructuralError("quadratic form matrix is not symmetric")

    def coefficient(self, a: str, b: str | None = None):
        """Coefficient of a*b (or a^2) in the expanded form."""
        i = self.variables.index(a)
        j = i if b is None else self.variables.index(b)
        return self.matrix[i][j] if i == j else self.matrix[i][j] * 2

    def evaluate(self, point: Mapping[str, object]) -> "QuadraticForm":
        def ev(x):
            return x.evaluate(point) if isinstance(x, RationalFunction) else x
        return QuadraticForm(self.variables, [[ev(x) for x in row] for row in self.matrix])

    def value(self, vector: Sequence) -> object:
        n = len(self.variables)
        return sum(vector[i] * self.matrix[i][j] * vector[j] for i in range(n) for j in range(n))

    def terms(self) -> list[tuple[str, object]]:
        out = []
        n = len(self.variables)
        for i in range(n):
            for j in range(i, n):
                c = self.coefficient(self.variables[i], self.variables[j])
                if not _is_zero(c):
                    mono = self.variables[i] + ("^2" if i == j else "*" + self.variables[j])
                    out.append((mono, c))
        return out

    def __str__(self):
        return " + ".join(f"({c})*{m}" for m, c in self.terms()) or "0"

    @classmethod
    def identity(cls, n: int) -> "QuadraticForm":
        return cls(tuple(f"z{i + 1}" for i in range(n)),
                   [[mpq(1) if i == j else mpq(0) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence) -> "QuadraticForm":
        n = len(values)
        return cls(tuple(f"z{i + 1}" for i in range(n)),
                   [[to_rational(values[i]) if i == j else mpq(0) for j in range(n)] for i in range(n)])


def _hessian(p: Polynomial, names: Sequence[str]) -> list[list[Polynomial]]:
    first = [p.differentiate(v) for v in names]
    return [[first[i].differentiate(names[j]) for j in range(len(names))] for i in range(len(names))]


def second_variation(K: IntegralCombination | None = None, frame: DeviationFrame | None = None, *,
                     at: ManifoldSpec | None = None) -> QuadraticForm:
    """Quadratic part of K expanded around the frame's base point, in the frame's deviations.

    Raises :class:`NonStationaryBase` if the gradient does not vanish there.
    With ``at`` the base point is also checked against the family equations.
    """
    K = K or IntegralCombination.symbolic()
    if frame is None:
        frame = deviation_frame()
    one, zero = frame.one(), frame.zero()
    Kp = K.expression.embed(frame.ring)
    for v in REDUCED_VARIABLES:
        g = frame.lift(Kp.differentiate(v))
        if not g.is_zero():
            raise NonStationaryBase(v, g)
    if at is not None:
        aux = AuxiliaryRadicals([], prefix="q")
        for eq in at.equations:
            val = frame.lift(eq.to_rational_function(frame.ring, aux).num)
            if not val.is_zero():
                raise StructuralError(f"base point is off the family {at.name}: {val}")
    H = [[frame.lift(h) for h in row] for row in _hessian(Kp, REDUCED_VARIABLES)]
    half = one * mpq(1, 2)
    M = _matmul(_matmul(_transpose(frame.T), H, zero), frame.T, zero)
    M = [[x * half for x in row] for row in M]
    return QuadraticForm(frame.names, M)


@dataclass
class ConstraintSet:
    variables: tuple[str, ...]
    names: tuple[str, ...]
    forms: list[list]                   # rows of coefficients over variables
    rank: int

    def coefficient(self, name: str, var: str):
        return self.forms[self.names.index(name)][self.variables.index(var)]


def constraint_variations(integrals: Iterable[FirstIntegral] | None = None,
                          frame: DeviationFrame | None = None) -> ConstraintSet:
    """First variations of the given integrals as linear forms in the deviations."""
    if frame is None:
        frame = deviation_frame()
    if integrals is None:
        _, ints = build_reduced_model()
        integrals = [i for i in ints if i.name in ("H", "V1", "V2")]
    zero = frame.zero()
    names, rows = [], []
    for I in integrals:
        p = I.expression.embed(frame.ring)
        grad = [frame.lift(p.differentiate(v)) for v in REDUCED_VARIABLES]
        row = [sum((grad[j] * frame.T[j][k] for j in range(len(grad))), zero) for k in range(len(frame.names))]
        names.append(I.name)
        rows.append(row)
    return ConstraintSet(frame.names, tuple(names), rows, _rank(rows, zero) if rows else 0)


def restrict(q: QuadraticForm, c: ConstraintSet, solve_for: Sequence[str]) -> QuadraticForm:
    """Substitute the constraint solution for ``solve_for`` into q."""
    if tuple(c.variables) != tuple(q.variables):
        raise StructuralError("constraint and form variables differ")
    sample = q.matrix[0][0] if q.matrix else mpq(0)
    one = (sample * 0 + 1) if isinstance(sample, RationalFunction) else mpq(1)
    zero = one * 0
    if c.rank == 0 or not solve_for:
        return q
    vars_ = list(q.variables)
    idx = [vars_.index(v) for v in solve_for]
    rest = [i for i in range(len(vars_)) if i not in idx]
    # row-reduce on the eliminated columns first
    rows = [list(r) for r in c.forms]
    used = []
    for col in idx:
        piv = next((r for r in range(len(rows)) if r not in used and not _is_zero(rows[r][col])), None)
        if piv is None:
            raise CannotEliminate(f"coefficient of {vars_[col]}")
        inv = one / rows[piv][col]
        rows[piv] = [x * inv for x in rows[piv]]
        for r in range(len(rows)):
            if r != piv and not _is_zero(rows[r][col]):
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[piv])]
        used.append(piv)
    leftover = [r for r in range(len(rows)) if r not in used and any(not _is_zero(x) for x in rows[r])]
    if leftover:
        raise StructuralError("constraints restrict the remaining variables as well; "
                              "eliminate more variables")
    # z = S w over the remaining variables
    S = [[zero] * len(rest) for _ in vars_]
    for k, j in enumerate(rest):
        S[j][k] = one
    for col, r in zip(idx, used):
        for k, j in enumerate(rest):
            S[col][k] = -rows[r][j]
    M = _matmul(_matmul(_transpose(S), q.matrix, zero), S, zero)
    return QuadraticForm(tuple(vars_[j] for j in rest), M)


def leading_minors(q: QuadraticForm) -> list:
    sample = q.matrix[0][0]
    one = (sample * 0 + 1)
    zero = one * 0
    return [_det([row[:k] for row in q.matrix[:k]], one, zero) for k in range(1, len(q.variables) + 1)]


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass
class StabilityVerdict:
    kind: str                       # definite-positive | definite-negative | indefinite | degenerate
    minors: list
    witnesses: dict = field(default_factory=dict)
    point: dict = field(default_factory=dict)
    exact: bool = True
    note: str = ""

    @property
    def definite(self) -> bool:
        return self.kind.startswith("definite")

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, (list, tuple)):
                return [enc(y) for y in x]
            if isinstance(x, dict):
                return {k: enc(v) for k, v in x.items()}
            if isinstance(x, bool) or x is None:
                return x
            if isinstance(x, (int, float, str)):
                return x
            return str(x)
        return {"verdict": self.kind, "minors": enc(self.minors), "witnesses": enc(self.witnesses),
                "params": enc(self.point), "exact": self.exact, "note": self.note}


def _sign(x, exact: bool) -> int:
    if exact:
        return (x > 0) - (x < 0)
    if abs(x) <= FLOAT_TOL:
        return 0
    return 1 if x > 0 else -1


def _numeric_matrix(q: QuadraticForm, point: Mapping[str, object] | None):
    qq = q.evaluate(point or {}) if any(isinstance(x, RationalFunction) for r in q.matrix for x in r) else q
    vals = [[x for x in row] for row in qq.matrix]
    exact = all(type(x) is type(mpq()) or isinstance(x, (int, Fraction)) for r in vals for x in r)
    if exact:
        vals = [[mpq(x) for x in row] for row in vals]
    else:
        vals = [[float(x) for x in row] for row in vals]
    return vals, exact


def _witness(vals, k: int, exact: bool):
    """Vector supported on the first k coordinates with v^T M v = minor_{k-1}/minor_k."""
    n = len(vals)
    if exact:
        sub = [row[:k] for row in vals[:k]]
        inv = _inverse(sub, mpq(1), mpq(0))
        v = [inv[i][k - 1] for i in range(k)] + [mpq(0)] * (n - k)
    else:
        sub = np.array([row[:k] for row in vals[:k]], dtype=float)
        e = np.zeros(k)
        e[-1] = 1.0
        v = list(np.linalg.solve(sub, e)) + [0.0] * (n - k)
    val = sum(v[i] * vals[i][j] * v[j] for i in range(n) for j in range(n))
    return v, val


def sylvester(q: QuadraticForm, at: Mapping[str, object] | None = None) -> StabilityVerdict:
    """Leading-principal-minor test at a numeric point.

    Exact for rational input; floats use an absolute zero tolerance of 1e-12.
    """
    vals, exact = _numeric_matrix(q, at)
    n = len(vals)
    one, zero = (mpq(1), mpq(0)) if exact else (1.0, 0.0)
    minors = [_det([row[:k] for row in vals[:k]], one, zero) for k in range(1, n + 1)]
    if not exact:
        minors = [float(np.linalg.det(np.array([row[:k] for row in vals[:k]]))) if k else 1.0
                  for k in range(1, n + 1)]
    signs = [_sign(m, exact) for m in minors]
    pt = {k: v for k, v in (at or {}).items()}
    witnesses: dict = {}
    if any(s == 0 for s in signs):
        kind = "degenerate"
        witnesses["zero_minor"] = signs.index(0) + 1
    elif all(s > 0 for s in signs):
        kind = "definite-positive"
    elif all(s == (-1) ** (k + 1) for k, s in enumerate(signs)):
        kind = "definite-negative"
    else:
        kind = "indefinite"
        pos = next((k for k in range(1, n + 1)
                    if (signs[k - 1] * (signs[k - 2] if k > 1 else 1)) > 0), None)
        neg = next((k for k in range(1, n + 1)
                    if (signs[k - 1] * (signs[k - 2] if k > 1 else 1)) < 0), None)
        if pos:
            v, val = _witness(vals, pos, exact)
            witnesses["positive_direction"] = v
            witnesses["positive_value"] = val
        if neg:
            v, val = _witness(vals, neg, exact)
            witnesses["negative_direction"] = v
            witnesses["negative_value"] = val
    return StabilityVerdict(kind, minors, witnesses, pt, exact)


def _weights(params: Mapping[str, object]) -> dict:
    out = {}
    for k, v in params.items():
        if k not in WEIGHT_NAMES and k != "s30":
            raise StructuralError(f"unknown parameter {k!r}")
        try:
            out[k] = to_rational(v)
        except TypeError:
            out[k] = v
    return out


def zero_solution_stability(params: Mapping[str, object]) -> StabilityVerdict:
    """Sylvester test of the Hessian of K at the origin.

    A definite Hessian (either sign) certifies Lyapunov stability.  The
    report notes whether the weights satisfy l2 < -(alpha^2 l0^2 + l1^2)/(2 l0).
    """
    p = _weights(params)
    for k in ("alpha", "l0", "l1", "l2"):
        if k not in p:
            raise StructuralError(f"missing parameter {k}")
    p.setdefault("l3", mpq(0))
    if p["l0"] == 0:
        raise StructuralError("l0 must be nonzero")
    K = IntegralCombination.at(**{k: v for k, v in p.items() if k in WEIGHT_NAMES})
    origin = {v: 0 for v in REDUCED_VARIABLES}
    H = [[h.substitute(origin).constant_value() for h in row] for row in _hessian(K.expression, REDUCED_VARIABLES)]
    q = QuadraticForm(REDUCED_VARIABLES, [[x / 2 for x in row] for row in H])
    verdict = sylvester(q)
    verdict.point = dict(p)
    bound = -(p["alpha"] ** 2 * p["l0"] ** 2 + p["l1"] ** 2) / (2 * p["l0"])
    inequality = p["l2"] < bound
    verdict.witnesses["inequality_holds"] = bool(inequality)
    verdict.note = ("stable (definite second variation)" if verdict.definite
                    else "no certificate from K at second order")
    return verdict


@dataclass
class SofteningReport:
    direction: str
    expression: Polynomial
    derivative: Polynomial
    root: RationalFunction
    value: RationalFunction
    conclusion: str
    at: dict = field(default_factory=dict)
    numeric_root: object = None
    numeric_value: object = None

    def to_json(self) -> dict:
        return {"direction": self.direction, "expression": str(self.expression),
                "derivative": str(self.derivative), "root": str(self.root), "value": str(self.value),
                "conclusion": self.conclusion, "params": {k: str(v) for k, v in self.at.items()},
                "numeric_root": None if self.numeric_root is None else str(self.numeric_root),
                "numeric_value": None if self.numeric_value is None else str(self.numeric_value)}


def soften(direction: str = "l0", params: Mapping[str, object] | None = None) -> SofteningReport:
    """Extremize the zero-solution stability expression in one weight.

    Lambda = 2 l2 l0 + alpha^2 l0^2 - l1^2 is quadratic in l0; its stationary
    value over ``direction`` is returned symbolically and, if ``params`` are
    given, at that point.
    """
    ring = Ring(WEIGHT_NAMES)
    lam = parse("2*l2*l0 + alpha^2*l0^2 - l1^2", ring)
    if direction not in ring.index:
        raise StructuralError(f"unknown direction {direction!r}")
    d = lam.differentiate(direction)
    parts = d.coefficients_in([direction])
    if any(k[0] > 1 for k in parts) or (1,) not in parts:
        raise StructuralError(f"no isolated stationary value of Lambda in {direction}")
    a1 = parts[(1,)]
    a0 = parts.get((0,), ring.zero())
    root = RationalFunction(-a0, a1)
    value = lam.compose({direction: root})
    concl = ("negative whenever alpha != 0 and (l1 != 0 or l2 != 0)" if direction == "l0"
             else "see value")
    rep = SofteningReport(direction, lam, d, root, value, concl)
    if params:
        p = {k: to_rational(v) for k, v in params.items()}
        if "alpha" in p and p["alpha"] == 0:
            raise ZeroDivisionError("alpha = 0: Lambda has no stationary value in l0")
        rep.at = p
        try:
            rep.numeric_root = root.evaluate(p)
            rep.numeric_value = value.evaluate(p)
        except ZeroDivisionError:
            raise ZeroDivisionError(f"stationary value undefined at {p}") from None
        except Exception:
            pass
    return rep


# ---------------------------------------------------------------------------
# One-dimensional reduced flow on the ellipse-cylinder curves
# ---------------------------------------------------------------------------


@dataclass
class Reduced1DVerdict:
    equilibrium: object
    coefficient: object
    verdict: str
    branch: str
    params: dict

    def to_json(self) -> dict:
        return {"equilibrium": str(self.equilibrium), "coefficient": str(self.coefficient),
                "verdict": self.verdict, "branch": self.branch,
                "params": {k: str(v) for k, v in self.params.items()}}


def _to_mpf(v):
    if isinstance(v, (float, mpmath.mpf)):
        return mpmath.mpf(v)
    q = Fraction(str(v))
    return mpmath.mpf(q.numerator) / q.denominator


def _mp(params, dps):
    with mpmath.workdps(dps):
        return {k: _to_mpf(v) for k, v in params.items()}


def reduced_flow(params: Mapping[str, object], branch: str = "minus", dps: int = 50):
    """The reduced right-hand side ds2/dt as a function of s2 (mpmath)."""
    p = _mp(params, dps)
    with mpmath.workdps(dps):
        Q = mpmath.sqrt(4 * p["alpha"] ** 2 * p["l0"] ** 2 + p["l1"] ** 2)
        den = (p["l1"] + Q if branch == "minus" else p["l1"] - Q) * p["l3"]
        a, l0, l3 = p["alpha"], p["l0"], p["l3"]

    def f(s2):
        with mpmath.workdps(dps):
            return -2 * a * l0 * (l0 - l3 * s2 ** 2) / den
    return f


def reduced_1d_stability(params: Mapping[str, object], branch: str = "minus",
                         dps: int = 50) -> list[Reduced1DVerdict]:
    """Linear stability of the equilibria s2 = -+sqrt(l0/l3) of the reduced flow."""
    if branch not in ("minus", "plus"):
        raise StructuralError("branch is 'minus' or 'plus'")
    p = _mp(params, dps)
    with mpmath.workdps(dps):
        if p["l0"] * p["l3"] <= 0:
            raise NoRealEquilibrium("l0/l3 must be positive for real equilibria")
        Q = mpmath.sqrt(4 * p["alpha"] ** 2 * p["l0"] ** 2 + p["l1"] ** 2)
        den = p["l1"] + Q if branch == "minus" else p["l1"] - Q
        if den == 0:
            raise ZeroDivisionError("reduced flow is undefined: l1 -+ Q vanishes")
        root = mpmath.sqrt(p["l0"] / p["l3"])
        out = []
        for s0 in (-root, root):
            # d/ds2 of -2 a l0 (l0 - l3 s2^2)/(den l3) = 4 a l0 s2 / den
            coeff = 4 * p["alpha"] * p["l0"] * s0 / den
            if abs(coeff) < mpmath.mpf(10) ** (-dps // 2):
                verdict = "degenerate"
            else:
                verdict = "asymptotically stable" if coeff < 0 else "unstable"
            out.append(Reduced1DVerdict(s0, coeff, verdict, branch, dict(params)))
    return out


def cylinder_equilibrium(params: Mapping[str, object], branch: str = "minus", root: int = -1,
                         dps: int = 50) -> dict:
    """Full-space point over the equilibrium s2 = root*sqrt(l0/l3) of the reduced flow."""
    p = _mp(params, dps)
    with mpmath.workdps(dps):
        if p["l0"] * p["l3"] <= 0:
            raise NoRealEquilibrium("l0/l3 must be positive for real equilibria")
        Q = mpmath.sqrt(4 * p["alpha"] ** 2 * p["l0"] ** 2 + p["l1"] ** 2)
        s2 = root * mpmath.sqrt(p["l0"] / p["l3"])
        c = p["l1"] - Q if branch == "minus" else p["l1"] + Q
        r2 = -c * s2 / (2 * p["alpha"] ** 2 * p["l0"])
        zero = mpmath.mpf(0)
        return {"s1": zero, "s2": s2, "s3": zero, "r1": zero, "r2": r2, "r3": zero}


# ---------------------------------------------------------------------------
# Linearization
# ---------------------------------------------------------------------------


def characteristic_polynomial(A: Sequence[Sequence]) -> list:
    """Coefficients [1, c_{n-1}, ..., c_0] of det(x I - A) by the trace recursion.

    Exact for rational entries; otherwise in the arithmetic of the entries.
    """
    n = len(A)
    exact = all(type(x) is type(mpq()) or isinstance(x, int) for r in A for x in r)
    conv = (lambda x: mpq(x)) if exact else (lambda x: x)
    a = [[conv(x) for x in row] for row in A]
    zero = mpq(0) if exact else a[0][0] * 0
    coeffs = [zero + 1]
    M = [[zero] * n for _ in range(n)]
    c = zero + 1
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        AM = [[sum((a[i][l] * M[l][j] for l in range(n)), zero) for j in range(n)] for i in range(n)]
        M = [[AM[i][j] + (c if i == j else zero) for j in range(n)] for i in range(n)]
        AMk = [[sum((a[i][l] * M[l][j] for l in range(n)), zero) for j in range(n)] for i in range(n)]
        tr = sum((AMk[i][i] for i in range(n)), zero)
        c = -tr / k
        coeffs.append(c)
    return coeffs


@dataclass
class SpectrumReport:
    roots: list[complex]
    max_re: float
    charpoly: list
    exact: bool
    gershgorin_radius: float
    exact_roots: list = field(default_factory=list)
    residual: float = 0.0

    @property
    def unstable(self) -> bool:
        return self.max_re > 1e-6

    def to_json(self) -> dict:
        return {"roots": [[float(r.real), float(r.imag)] for r in self.roots], "max_re": float(self.max_re),
                "charpoly": [str(c) for c in self.charpoly], "exact": self.exact,
                "gershgorin_radius": float(self.gershgorin_radius),
                "exact_roots": [str(r) for r in self.exact_roots], "equilibrium_residual": float(self.residual)}


def _spectrum(A, exact: bool) -> SpectrumReport:
    cp = characteristic_polynomial(A)
    n = len(A)
    fl = [complex(c) if not exact else float(c) for c in cp]
    fl = [c.real if isinstance(c, complex) and c.imag == 0 else c for c in fl]
    # strip the x^k factor before numeric root finding
    k = 0
    while k < n and cp[n - k] == 0:
        k += 1
    roots = list(np.roots(np.array(fl[: n + 1 - k], dtype=complex))) + [0j] * k
    radius = max(sum(abs(complex(x)) for x in row) for row in A) if n else 0.0
    for r in roots:
        if abs(r) > radius * (1 + 1e-9) + 1e-9:
            raise ArithmeticError(f"root {r} lies outside the Gershgorin bound {radius}")
    exact_roots = []
    if exact:
        exact_roots = [mpq(0)] * k
        for r in roots[: n - k]:
            if abs(r.imag) < 1e-9:
                cand = mpq(Fraction(r.real).limit_denominator(1000))
                val = sum(c * cand ** (n - i) for i, c in enumerate(cp))
                if val == 0:
                    exact_roots.append(cand)
    max_re = max((r.real for r in roots), default=0.0)
    return SpectrumReport(roots, max_re, cp, exact, radius, exact_roots)


def fullspace_linearization(point: Mapping[str, object], params: Mapping[str, object] | None = None, *,
                            matrix: Sequence[Sequence] | None = None, dps: int = 50,
                            tol: float = 1e-10) -> SpectrumReport:
    """Spectrum of the Jacobian of the reduced field at an equilibrium.

    Pass ``matrix`` to analyse a given matrix instead (point/params ignored).
    """
    if matrix is not None:
        exact = all(isinstance(x, (int, Fraction)) or type(x) is type(mpq()) for r in matrix for x in r)
        A = [[mpq(x) if exact else x for x in row] for row in matrix]
        return _spectrum(A, exact)
    f, _ = build_reduced_model()
    p = dict(params or {})
    vals = {**{k: v for k, v in point.items()}, **p}
    exact = True
    conv = {}
    for k, v in vals.items():
        try:
            conv[k] = to_rational(v)
        except TypeError:
            exact = False
            conv[k] = v
    if not exact:
        with mpmath.workdps(dps):
            conv = {k: _to_mpf(v) for k, v in conv.items()}
    with mpmath.workdps(dps):
        res = max(abs(f[v].evaluate(conv)) for v in REDUCED_VARIABLES)
        if res > tol:
            raise NotAnEquilibrium(f"field residual {mpmath.nstr(res, 5) if not exact else res} at the point")
        J = [[f[v].differentiate(w).evaluate(conv) for w in REDUCED_VARIABLES] for v in REDUCED_VARIABLES]
        rep = _spectrum(J, exact)
    rep.residual = float(res)
    return rep


# ---------------------------------------------------------------------------
# Survey of the equilibrium lines through the origin
# ---------------------------------------------------------------------------

ADJUNCT_FAMILIES = ("framed-line", "zero-adjunct-plane", "zero-adjunct-axis", "zero-adjunct-shear",
                    "zero-adjunct-skew", "zero-adjunct-tilt")


def _draw(rng):
    x = mpq(rng.randrange(1, 61), 16) + mpq(1, 4)
    return x if rng.random() < 0.5 else -x


def _family_point(spec: ManifoldSpec, rng) -> tuple[dict, dict]:
    """Rational weights satisfying the family's conditions and a point on it."""
    for _ in range(200):
        w = {k: _draw(rng) for k in WEIGHT_NAMES}
        try:
            for k, e in spec.conditions:
                w[k] = e.exact_value(w)
        except (ZeroDivisionError, ValueError):
            continue
        x = {v: _draw(rng) for v in spec.free}
        eqs = []
        unknown = [v for v in REDUCED_VARIABLES if v not in x]
        try:
            for e in spec.equations:
                coeffs = []
                base = e.exact_value({**w, **x, **{u: 0 for u in unknown}})
                for u in unknown:
                    unit = e.exact_value({**w, **x, **{v: (1 if v == u else 0) for v in unknown}})
                    coeffs.append(unit - base)
                eqs.append((coeffs, -base))
        except (ZeroDivisionError, ValueError):
            continue
        A = [c for c, _ in eqs]
        if len(A) != len(unknown) or _det(A, mpq(1), mpq(0)) == 0:
            continue
        inv = _inverse(A, mpq(1), mpq(0))
        sol = [sum(inv[i][j] * eqs[j][1] for j in range(len(eqs))) for i in range(len(unknown))]
        x.update(dict(zip(unknown, sol)))
        return w, x
    raise StructuralError(f"no rational point found on {spec.name}")


@dataclass
class AdjunctFinding:
    family: str
    params: dict
    point: dict
    hessian: StabilityVerdict
    signature: tuple[int, int, int]
    max_re: float
    finding: str

    def to_json(self) -> dict:
        return {"family": self.family, "params": {k: str(v) for k, v in self.params.items()},
                "point": {k: str(v) for k, v in self.point.items()},
                "hessian_verdict": self.hessian.kind, "signature": list(self.signature),
                "max_re": float(self.max_re), "finding": self.finding}


def adjunct_survey(seed: int = 0, samples: int = 3) -> list[AdjunctFinding]:
    """Second-order and first-approximation findings for the lines of equilibria.

    For each family and sample: Hessian of K at a point of the line (its
    signature) and the spectrum of the linearized field there.
    """
    rng = random.Random(seed)
    cat = catalog()
    out = []
    for name in ADJUNCT_FAMILIES:
        spec = cat[name]
        for _ in range(samples):
            w, x = _family_point(spec, rng)
            K = IntegralCombination.at(**w)
            H = [[h.evaluate(x) for h in row] for row in _hessian(K.expression, REDUCED_VARIABLES)]
            q = QuadraticForm(REDUCED_VARIABLES, [[mpq(v) / 2 for v in row] for row in H])
            verdict = sylvester(q)
            eig = np.linalg.eigvalsh(np.array([[float(v) for v in row] for row in q.matrix]))
            scale = max(1.0, float(np.max(np.abs(eig))))
            sig = (int(np.sum(eig > 1e-9 * scale)), int(np.sum(eig < -1e-9 * scale)),
                   int(np.sum(np.abs(eig) <= 1e-9 * scale)))
            spec_rep = fullspace_linearization(x, w)
            if spec_rep.max_re > 1e-6:
                finding = "unstable in the first approximation"
            elif sig[0] and sig[1]:
                finding = "inconclusive at second order (indefinite second variation)"
            else:
                finding = "inconclusive at second order (degenerate second variation)"
            out.append(AdjunctFinding(name, w, x, verdict, sig, spec_rep.max_re, finding))
    return out
