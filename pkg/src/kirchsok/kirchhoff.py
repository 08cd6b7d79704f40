"""The Sokolov-case Kirchhoff equations, their integrals and stationary systems.

Two systems live in one ring (:func:`kirchsok.polyring.default_ring`):

* the full system in impulse moments ``M1..M3`` and forces ``g1..g3`` with
  parameters ``alpha`` and ``beta``;
* the reduced system in ``s1..s3``, ``r1..r3`` obtained by the linear change
  ``M1 = s1 - (a/3) r3``, ``M2 = s2 - (b/3) r3``, ``M3 = s3 + (a/3) r1 + (b/3) r2``,
  ``g = r``, where the full system is read at ``alpha = a/3``, ``beta = b/3``
  and then ``b = 0``.

Every model is checked when it is built: all integrals have zero Lie
derivative, and the reduced field is re-derived from the full one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

from gmpy2 import mpq

from .polyring import Polynomial, RationalFunction, StructuralError, default_ring, parse

__all__ = [
    "FULL_VARIABLES",
    "REDUCED_VARIABLES",
    "PARAMETERS",
    "WEIGHTS",
    "GRADIENT_SIGNS",
    "VectorField",
    "FirstIntegral",
    "IntegralCombination",
    "TransformationMismatch",
    "DegeneratePencil",
    "EliminatedSystem",
    "ZeroJacobian",
    "build_full_model",
    "build_reduced_model",
    "transformation_bindings",
    "transformed_integral_relations",
    "stationary_system",
    "eliminated_system",
    "zero_jacobian",
    "jacobian_factors",
    "reference_lex_basis",
    "displayed_stationary_system",
    "specialize",
    "determinant",
]

FULL_VARIABLES = ("M1", "M2", "M3", "g1", "g2", "g3")
REDUCED_VARIABLES = ("s1", "s2", "s3", "r1", "r2", "r3")
PARAMETERS = ("alpha", "beta")
WEIGHTS = ("l0", "l1", "l2", "l3")
ELIMINATED_VARIABLES = ("r1", "r2", "s2", "s1", "s3")

# Sign relating each computed gradient component (order s1,s2,s3,r1,r2,r3)
# to the conventional "= 0" display of the stationary equations.
GRADIENT_SIGNS = (1, 1, 1, 1, -1, -1)

R = default_ring()


class TransformationMismatch(AssertionError):
    """The change of variables failed to map the full model onto the reduced one."""

    def __init__(self, what: str, difference: Polynomial):
        super().__init__(f"{what}: nonzero difference {difference}")
        self.what = what
        self.difference = difference


class DegeneratePencil(ZeroDivisionError):
    """The r3-elimination denominator vanishes."""

    def __init__(self, factor: str):
        super().__init__(f"degenerate pencil: {factor} vanishes")
        self.factor = factor


@dataclass(frozen=True)
class VectorField:
    variables: tuple[str, ...]
    components: dict[str, Polynomial]
    name: str = ""

    def __post_init__(self):
        if set(self.components) != set(self.variables):
            raise StructuralError("a component is required for every dynamic variable")

    @property
    def ring(self):
        return next(iter(self.components.values())).ring

    def __getitem__(self, var: str) -> Polynomial:
        return self.components[var]

    def lie_derivative(self, p: Polynomial) -> Polynomial:
        out = p.ring.zero()
        for v in self.variables:
            d = p.differentiate(v)
            if not d.is_zero():
                out = out + d * self.components[v]
        return out

    def jacobian(self) -> list[list[Polynomial]]:
        return [[self.components[v].differentiate(w) for w in self.variables] for v in self.variables]

    def substitute(self, bindings: Mapping[str, object]) -> "VectorField":
        return VectorField(self.variables, {v: c.substitute(bindings) for v, c in self.components.items()}, self.name)

    def parameters(self) -> tuple[str, ...]:
        used = set()
        for c in self.components.values():
            used.update(c.variables())
        return tuple(n for n in R.names if n in used and n not in self.variables)


@dataclass(frozen=True)
class FirstIntegral:
    name: str
    expression: Polynomial
    constant: str
    display_multiple: int = 1   # printed as (multiple * name) = (multiple * constant)

    def __str__(self):
        lhs = f"{self.display_multiple}*{self.name}" if self.display_multiple != 1 else self.name
        return f"{lhs} = {self.expression.scale(self.display_multiple)}"


def _p(text: str) -> Polynomial:
    return parse(text, R)


def _check_conservation(f: VectorField, integrals: Sequence[FirstIntegral]):
    for I in integrals:
        d = f.lie_derivative(I.expression)
        if not d.is_zero():
            raise TransformationMismatch(f"Lie derivative of {I.name} along {f.name}", d)


@lru_cache(maxsize=None)
def build_full_model() -> tuple[VectorField, tuple[FirstIntegral, ...]]:
    comps = {
        "M1": "M2*M3 + alpha*(g2*M1 + g1*M2) + 2*beta*(g2*M2 - g3*M3)"
              " - 4*g2*g3*(2*alpha^2 + beta^2) + 4*alpha*beta*g1*g3",
        "M2": "4*g1*g3*(alpha^2 + 2*beta^2) - beta*(g2*M1 + g1*M2) - M1*M3"
              " - 2*alpha*(g1*M1 - g3*M3) - 4*alpha*beta*g2*g3",
        "M3": "4*g1*g2*(alpha^2 - beta^2) + beta*(g3*M1 + g1*M3)"
              " - alpha*(g3*M2 + g2*M3) - 4*alpha*beta*(g1^2 - g2^2)",
        "g1": "g2*(2*M3 + alpha*g1) + beta*(g2^2 - g3^2) - g3*M2",
        "g2": "-g1*(2*M3 + beta*g2) - alpha*(g1^2 - g3^2) + g3*M1",
        "g3": "g1*(M2 + beta*g3) - g2*(M1 + alpha*g3)",
    }
    f = VectorField(FULL_VARIABLES, {k: _p(v) for k, v in comps.items()}, "full")
    two_h = _p("M1^2 + M2^2 + 2*M3^2 + 2*alpha*(g3*M1 + g1*M3) + 2*beta*(g3*M2 + g2*M3)"
               " + 4*(beta*g1 - alpha*g2)^2 - 4*g3^2*(alpha^2 + beta^2)")
    v3 = _p("(3*(beta*g1 - alpha*g2)*(beta*M1 - alpha*M2)"
            " + (2*alpha*g1 + 2*beta*g2 + M3)*((alpha^2 + beta^2)*g3 + alpha*M1 + beta*M2))^2"
            " + (M3 - alpha*g1 - beta*g2)^2*((beta*M1 - alpha*M2)^2"
            " + (alpha^2 + beta^2)*(2*alpha*g1 + 2*beta*g2 + M3)^2)")
    integrals = (
        FirstIntegral("H", two_h / 2, "h", 2),
        FirstIntegral("V1", _p("g1*M1 + g2*M2 + g3*M3"), "c1"),
        FirstIntegral("V2", _p("g1^2 + g2^2 + g3^2"), "c2"),
        FirstIntegral("V3", v3, "c3"),
    )
    _check_conservation(f, integrals)
    return f, integrals


def transformation_bindings(beta_zero: bool = True) -> dict[str, Polynomial]:
    """Images of the full-model symbols in reduced variables."""
    b = "0" if beta_zero else "beta"
    return {
        "M1": _p("s1 - alpha/3*r3"),
        "M2": _p(f"s2 - {b}/3*r3"),
        "M3": _p(f"s3 + alpha/3*r1 + {b}/3*r2"),
        "g1": _p("r1"),
        "g2": _p("r2"),
        "g3": _p("r3"),
        "alpha": _p("alpha/3"),
        "beta": _p(f"{b}/3"),
    }


def _reduced_components() -> dict[str, Polynomial]:
    comps = {
        "s1": "(alpha*r1 + s3)*s2 - alpha^2*r2*r3",
        "s2": "(alpha*r3 - s1)*(alpha*r1 + s3)",
        "s3": "-alpha*r2*s3",
        "r1": "(alpha*r1 + 2*s3)*r2 - r3*s2",
        "r2": "r3*s1 - r1*(alpha*r1 + 2*s3)",
        "r3": "r1*s2 - r2*s1",
    }
    return {k: _p(v) for k, v in comps.items()}


def _reduced_integrals() -> tuple[FirstIntegral, ...]:
    two_h = _p("s1^2 + s2^2 + 2*s3^2 + 2*alpha*r1*s3 - alpha^2*r3^2")
    two_v3 = _p("(alpha*r1*s1 + alpha*r2*s2 + s1*s3)^2 + s3^2*(s2^2 + (alpha*r1 + s3)^2)")
    return (
        FirstIntegral("H", two_h / 2, "h", 2),
        FirstIntegral("V1", _p("s1*r1 + s2*r2 + s3*r3"), "c1"),
        FirstIntegral("V2", _p("r1^2 + r2^2 + r3^2"), "c2"),
        FirstIntegral("V3", two_v3 / 2, "c3", 2),
    )


def transformed_integral_relations() -> dict[str, tuple[Polynomial, Polynomial]]:
    """How each transformed full-model integral reads in reduced integrals.

    Returns name -> (transformed full integral, the same expressed through
    the reduced integrals).  H picks up a Casimir term and V3 a
    parameter-dependent factor.
    """
    _, full_ints = build_full_model()
    red = {I.name: I.expression for I in _reduced_integrals()}
    sub = transformation_bindings()
    a2 = _p("alpha^2")
    expected = {
        "H": red["H"] + (a2 * red["V2"]).scale(mpq(2, 9)),
        "V1": red["V1"],
        "V2": red["V2"],
        "V3": (a2 * red["V3"]).scale(mpq(2, 9)),
    }
    return {I.name: (I.expression.substitute(sub), expected[I.name]) for I in full_ints}


@lru_cache(maxsize=None)
def build_reduced_model() -> tuple[VectorField, tuple[FirstIntegral, ...]]:
    comps = _reduced_components()
    f = VectorField(REDUCED_VARIABLES, comps, "reduced")
    integrals = _reduced_integrals()
    _check_conservation(f, integrals)

    # re-derive the reduced field from the full one
    full, _ = build_full_model()
    sub = transformation_bindings()
    t = {v: full[v].substitute(sub) for v in FULL_VARIABLES}
    third = _p("alpha/3")
    derived = {
        "s1": t["M1"] + third * t["g3"],
        "s2": t["M2"],
        "s3": t["M3"] - third * t["g1"],
        "r1": t["g1"],
        "r2": t["g2"],
        "r3": t["g3"],
    }
    for v in REDUCED_VARIABLES:
        diff = derived[v] - comps[v]
        if not diff.is_zero():
            raise TransformationMismatch(f"transformed d{v}/dt", diff)
    for name, (got, want) in transformed_integral_relations().items():
        if got != want:
            raise TransformationMismatch(f"transformed {name}", got - want)
    return f, integrals


# ---------------------------------------------------------------------------
# Integral family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegralCombination:
    """K = l0*H - l1*V1 - l2*V2 - l3*V3 over the reduced integrals.

    ``values`` fixes some of ``alpha, l0..l3`` to rationals; the others stay
    symbolic ring variables.
    """

    values: tuple[tuple[str, mpq], ...] = ()
    expression: Polynomial = field(init=False, compare=False)

    def __post_init__(self):
        vals = dict(self.values)
        for k in vals:
            if k not in WEIGHTS and k != "alpha":
                raise StructuralError(f"unknown weight {k!r}")
        _, ints = build_reduced_model()
        I = {i.name: i.expression for i in ints}
        K = (_p("l0") * I["H"] - _p("l1") * I["V1"] - _p("l2") * I["V2"] - _p("l3") * I["V3"])
        if vals:
            K = K.substitute(vals)
        object.__setattr__(self, "expression", K)

    @classmethod
    def symbolic(cls) -> "IntegralCombination":
        return cls(())

    @classmethod
    def at(cls, **values) -> "IntegralCombination":
        from .polyring import to_rational

        return cls(tuple(sorted((k, to_rational(v)) for k, v in values.items())))

    @property
    def point(self) -> dict[str, mpq]:
        return dict(self.values)

    def weight(self, name: str) -> Polynomial:
        vals = dict(self.values)
        return R.const(vals[name]) if name in vals else _p(name)

    def conserved(self) -> bool:
        f, _ = build_reduced_model()
        g = f.substitute(self.point) if self.point else f
        return g.lie_derivative(self.expression).is_zero()


def specialize(polys: Sequence[Polynomial], point: Mapping[str, object]) -> list[Polynomial]:
    return [p.substitute(point) for p in polys]


def stationary_system(K: IntegralCombination) -> list[Polynomial]:
    """The six partial derivatives of K in the order s1, s2, s3, r1, r2, r3."""
    return [K.expression.differentiate(v) for v in REDUCED_VARIABLES]


@dataclass(frozen=True)
class EliminatedSystem:
    """Five equations left after solving the r3 equation, denominators cleared.

    ``equations`` follow the order s1, s2, s3, r1, r2 of the gradient.
    ``cleared`` names the equations that were multiplied by ``denominator``.
    ``r3`` is the eliminated value as a rational function.
    """

    equations: tuple[Polynomial, ...]
    denominator: Polynomial
    cleared: tuple[str, ...]
    r3: RationalFunction

    def __iter__(self):
        return iter(self.equations)

    def __len__(self):
        return len(self.equations)

    def __getitem__(self, i):
        return self.equations[i]


def pencil_denominator(K: IntegralCombination) -> Polynomial:
    return _p("alpha^2").substitute(K.point) * K.weight("l0") + K.weight("l2").scale(2)


def eliminated_system(K: IntegralCombination) -> EliminatedSystem:
    grads = stationary_system(K)
    A = pencil_denominator(K)
    if A.is_zero():
        raise DegeneratePencil("alpha^2*l0 + 2*l2")
    last = grads[5]
    coeffs = last.coefficients_in(["r3"])
    if set(coeffs) - {(0,), (1,)} or (1,) not in coeffs:
        raise StructuralError("the r3 equation is not linear in r3")
    lead = coeffs[(1,)]
    # lead equals -A; the root is r3 = num/den
    num = -coeffs.get((0,), R.zero())
    den = lead
    if den.is_constant():
        num, den = num.scale(1 / den.constant_value()), R.one()
    elif den == -A:
        num, den = -num, A
    r3 = RationalFunction(num, den)
    out, cleared = [], []
    for name, g in zip(REDUCED_VARIABLES[:5], grads[:5]):
        parts = g.coefficients_in(["r3"])
        d = max(k[0] for k in parts)
        if d == 0:
            out.append(g)
            continue
        acc = R.zero()
        for (k,), c in parts.items():
            acc = acc + c * num ** k * den ** (d - k)
        out.append(acc)
        if not den.is_constant():
            cleared.append(name)
    return EliminatedSystem(tuple(out), den, tuple(cleared), r3)


# ---------------------------------------------------------------------------
# Determinants and the origin Jacobian
# ---------------------------------------------------------------------------


def determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Fraction-free (Bareiss) determinant of a square polynomial matrix."""
    from .polyring import _exact_quotient

    n = len(matrix)
    if n == 0:
        return R.one()
    ring = matrix[0][0].ring
    M = [list(row) for row in matrix]
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                return ring.zero()
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                t = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                if prev == 1:
                    M[i][j] = t
                else:
                    q = _exact_quotient(t, prev)
                    if q is None:
                        raise ArithmeticError("Bareiss step was not exact")
                    M[i][j] = q
        prev = M[k][k]
    d = M[n - 1][n - 1]
    return -d if sign < 0 else d


def jacobian_factors() -> tuple[Polynomial, Polynomial, Polynomial]:
    return (
        _p("l1^2 + 2*l0*l2"),
        _p("alpha^2*l0^2 + l1^2 + 2*l0*l2"),
        _p("alpha^2*l0^2 + l1^2 + 4*l0*l2"),
    )


@dataclass(frozen=True)
class ZeroJacobian:
    matrix: tuple[tuple[Polynomial, ...], ...]
    determinant: Polynomial
    product: Polynomial
    factor: mpq | None

    @property
    def matches(self) -> bool:
        return self.factor is not None and self.factor != 0


def zero_jacobian(K: IntegralCombination | None = None) -> ZeroJacobian:
    """Determinant of the Hessian of K at the origin, compared to the factor product.

    ``factor`` is the rational c with det = c * product, or None when the
    determinant is not a constant multiple of the product.
    """
    K = K or IntegralCombination.symbolic()
    grads = stationary_system(K)
    origin = {v: 0 for v in REDUCED_VARIABLES}
    H = tuple(tuple(g.differentiate(v).substitute(origin) for v in REDUCED_VARIABLES) for g in grads)
    det = determinant(H)
    prod = R.one()
    for f in jacobian_factors():
        prod = prod * f.substitute(K.point)
    factor = None
    if prod.is_zero():
        factor = None if not det.is_zero() else mpq(0)
    else:
        from .polyring import _exact_quotient

        q = _exact_quotient(det, prod)
        if q is not None and q.is_constant() and q * prod == det:
            factor = q.constant_value()
    return ZeroJacobian(H, det, prod, factor)


# ---------------------------------------------------------------------------
# Reference lex basis shipped as data
# ---------------------------------------------------------------------------


def _load_reference_text() -> str:
    return resources.files("kirchsok").joinpath("data/stationary_lex_basis.txt").read_text()


@lru_cache(maxsize=None)
def reference_lex_basis() -> tuple[Polynomial, ...]:
    """The published lex basis of the eliminated system, parameters symbolic.

    The file defines shorthand blocks ``[NAME] = (...)`` expanded in order,
    then polynomials separated by lines holding a single ``;``.
    """
    text = _load_reference_text()
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    env: dict[str, Polynomial] = {}
    body: list[str] = []
    chunk: list[str] = []
    name = None

    def flush():
        nonlocal name, chunk
        if name is not None:
            env[name] = parse(" ".join(chunk), R, env)
        name, chunk = None, []

    i = 0
    while i < len(lines):
        ln = lines[i]
        s = ln.strip()
        if s.startswith("[") and "]" in s and "=" in s:
            flush()
            head, rest = s.split("=", 1)
            name = head.strip()[1:-1]
            chunk = [rest]
        elif name is not None:
            if not s:
                flush()
            else:
                chunk.append(s)
        else:
            body.append(ln)
        i += 1
    flush()
    blocks = "\n".join(body).split("\n;\n")
    out = []
    for b in blocks:
        b = b.strip()
        if b:
            out.append(parse(b.replace("\n", " "), R, env))
    return tuple(out)


@lru_cache(maxsize=None)
def displayed_stationary_system() -> tuple[tuple[Polynomial, ...], tuple[Polynomial, ...]]:
    """Reference stationary equations shipped as data: (gradient six, eliminated five)."""
    text = resources.files("kirchsok").joinpath("data/stationary_system.txt").read_text()
    sections: dict[str, list[Polynomial]] = {}
    current = None
    for ln in text.splitlines():
        s = ln.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("[") and s.endswith("]"):
            current = sections.setdefault(s[1:-1], [])
        elif current is None:
            raise StructuralError("equation outside a section")
        else:
            current.append(parse(s, R))
    return tuple(sections["gradient"]), tuple(sections["eliminated"])
