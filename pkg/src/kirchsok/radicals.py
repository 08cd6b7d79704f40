"""Expression trees with square roots, evaluated in high precision.

Syntax is the polynomial grammar plus division by arbitrary expressions and
``sqrt(...)``.  Evaluation uses mpmath at a chosen number of digits; the
interval context of mpmath provides a rigorous enclosure when an error bound
is wanted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

import gmpy2
import mpmath
from gmpy2 import mpq

from .polyring import Polynomial, RationalFunction, Ring, StructuralError, to_rational

__all__ = ["RadicalExpr", "NegativeRadicand", "parse_radical", "Evaluation"]


class NegativeRadicand(ValueError):
    """A square root met a negative argument in real evaluation."""


@dataclass(frozen=True)
class Evaluation:
    value: object
    error_bound: object   # half width of a rigorous enclosure, or None


class RadicalExpr:
    """Immutable expression node.

    ``op`` is one of ``const``, ``var``, ``add``, ``mul``, ``neg``, ``div``,
    ``pow``, ``sqrt``.
    """

    __slots__ = ("op", "args", "_key")

    def __init__(self, op: str, *args):
        self.op = op
        self.args = args
        self._key = None

    # -- construction helpers -----------------------------------------

    @staticmethod
    def const(c) -> "RadicalExpr":
        return RadicalExpr("const", to_rational(c))

    @staticmethod
    def var(name: str) -> "RadicalExpr":
        return RadicalExpr("var", name)

    def _wrap(self, other):
        if isinstance(other, RadicalExpr):
            return other
        return RadicalExpr.const(other)

    def __add__(self, o):
        return RadicalExpr("add", self, self._wrap(o))

    __radd__ = __add__

    def __sub__(self, o):
        return RadicalExpr("add", self, RadicalExpr("neg", self._wrap(o)))

    def __rsub__(self, o):
        return self._wrap(o) - self

    def __mul__(self, o):
        return RadicalExpr("mul", self, self._wrap(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return RadicalExpr("div", self, self._wrap(o))

    def __rtruediv__(self, o):
        return RadicalExpr("div", self._wrap(o), self)

    def __neg__(self):
        return RadicalExpr("neg", self)

    def __pow__(self, n: int):
        return RadicalExpr("pow", self, int(n))

    def sqrt(self) -> "RadicalExpr":
        return RadicalExpr("sqrt", self)

    # -- structure ------------------------------------------------------

    def key(self) -> str:
        if self._key is None:
            self._key = self._render()
        return self._key

    def _render(self) -> str:
        op, a = self.op, self.args
        if op == "const":
            c = a[0]
            return str(c.numerator) if c.denominator == 1 else f"({c.numerator}/{c.denominator})"
        if op == "var":
            return a[0]
        if op == "add":
            return f"({a[0].key()} + {a[1].key()})"
        if op == "mul":
            return f"{a[0].key()}*{a[1].key()}"
        if op == "neg":
            return f"(-{a[0].key()})"
        if op == "div":
            return f"({a[0].key()})/({a[1].key()})"
        if op == "pow":
            return f"({a[0].key()})^{a[1]}"
        return f"sqrt({a[0].key()})"

    __str__ = key

    def __repr__(self):
        return f"RadicalExpr({self.key()!r})"

    def __eq__(self, other):
        return isinstance(other, RadicalExpr) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def variables(self) -> set[str]:
        if self.op == "var":
            return {self.args[0]}
        if self.op == "const":
            return set()
        out = set()
        for a in self.args:
            if isinstance(a, RadicalExpr):
                out |= a.variables()
        return out

    def radicands(self) -> list["RadicalExpr"]:
        """Arguments of every sqrt node, innermost first, without repeats."""
        seen: dict[str, RadicalExpr] = {}

        def walk(e):
            for a in e.args:
                if isinstance(a, RadicalExpr):
                    walk(a)
            if e.op == "sqrt":
                seen.setdefault(e.args[0].key(), e.args[0])

        walk(self)
        return list(seen.values())

    def has_radicals(self) -> bool:
        return bool(self.radicands())

    def substitute(self, bindings: Mapping[str, "RadicalExpr"]) -> "RadicalExpr":
        if self.op == "var":
            b = bindings.get(self.args[0])
            if b is None:
                return self
            return b if isinstance(b, RadicalExpr) else RadicalExpr.const(b)
        if self.op == "const":
            return self
        args = tuple(a.substitute(bindings) if isinstance(a, RadicalExpr) else a for a in self.args)
        return RadicalExpr(self.op, *args)

    def fold(self, point: Mapping[str, object] | None = None) -> "RadicalExpr":
        """Bind exact rationals from ``point`` and fold constant subtrees.

        Square roots of constants are folded only when the result is
        rational; otherwise the sqrt node stays.
        """
        point = point or {}
        op, a = self.op, self.args
        if op == "const":
            return self
        if op == "var":
            if a[0] in point:
                return RadicalExpr.const(point[a[0]])
            return self
        if op == "pow":
            b = a[0].fold(point)
            if b.op == "const":
                if b.args[0] == 0 and a[1] < 0:
                    raise ZeroDivisionError(f"zero raised to {a[1]}")
                return RadicalExpr.const(b.args[0] ** a[1])
            return RadicalExpr("pow", b, a[1])
        args = [x.fold(point) for x in a]
        if all(x.op == "const" for x in args):
            c = [x.args[0] for x in args]
            if op == "add":
                return RadicalExpr.const(c[0] + c[1])
            if op == "mul":
                return RadicalExpr.const(c[0] * c[1])
            if op == "neg":
                return RadicalExpr.const(-c[0])
            if op == "div":
                if c[1] == 0:
                    raise ZeroDivisionError(f"denominator {a[1].key()} vanishes")
                return RadicalExpr.const(c[0] / c[1])
            if op == "sqrt":
                if c[0] < 0:
                    raise NegativeRadicand(f"radicand {a[0].key()} is negative")
                root = _exact_sqrt(c[0])
                if root is not None:
                    return RadicalExpr.const(root)
        if op == "mul" and any(x.op == "const" and x.args[0] == 0 for x in args):
            return RadicalExpr.const(0)
        return RadicalExpr(op, *args)

    def exact_value(self, point: Mapping[str, object]) -> mpq:
        """Exact rational value, or ValueError when a radical stays irrational."""
        e = self.fold(point)
        if e.op != "const":
            raise ValueError(f"not rational at this point: {e.key()}")
        return e.args[0]

    # -- evaluation -------------------------------------------------------

    def evaluate(self, point: Mapping[str, object], dps: int = 50, complex_ok: bool = False):
        """Value at ``point`` using ``dps`` significant digits."""
        with mpmath.workdps(dps):
            return self._eval(point, mpmath.mp, complex_ok)

    def enclose(self, point: Mapping[str, object], dps: int = 50) -> Evaluation:
        """Midpoint value plus a rigorous bound on its distance to the exact value.

        The bound is ``None`` when the interval evaluation cannot exclude a
        negative radicand or a zero denominator.
        """
        iv = mpmath.iv
        old = iv.dps
        with mpmath.workdps(dps):
            mid = self._eval(point, mpmath.mp, False)
            iv.dps = dps
            try:
                enc = self._eval(point, iv, False)
                bound = max(abs(mpmath.mpf(enc.b) - mid), abs(mid - mpmath.mpf(enc.a)))
            except (NegativeRadicand, ZeroDivisionError):
                bound = None
            finally:
                iv.dps = old
        return Evaluation(mid, bound)

    def _eval(self, point, ctx, complex_ok):
        op, a = self.op, self.args
        if op == "const":
            c = a[0]
            return ctx.mpf(int(c.numerator)) / int(c.denominator)
        if op == "var":
            try:
                v = point[a[0]]
            except KeyError:
                raise StructuralError(f"unbound symbol {a[0]!r}") from None
            return _to_ctx(v, ctx)
        if op == "add":
            return a[0]._eval(point, ctx, complex_ok) + a[1]._eval(point, ctx, complex_ok)
        if op == "mul":
            return a[0]._eval(point, ctx, complex_ok) * a[1]._eval(point, ctx, complex_ok)
        if op == "neg":
            return -a[0]._eval(point, ctx, complex_ok)
        if op == "div":
            d = a[1]._eval(point, ctx, complex_ok)
            if ctx is mpmath.mp and d == 0:
                raise ZeroDivisionError(f"denominator {a[1].key()} vanishes")
            if ctx is mpmath.iv and 0 in d:
                raise ZeroDivisionError(f"denominator {a[1].key()} may vanish")
            return a[0]._eval(point, ctx, complex_ok) / d
        if op == "pow":
            return a[0]._eval(point, ctx, complex_ok) ** a[1]
        x = a[0]._eval(point, ctx, complex_ok)
        if ctx is mpmath.iv:
            if x.a < 0:
                raise NegativeRadicand(f"radicand {a[0].key()} may be negative")
            return ctx.sqrt(x)
        if isinstance(x, mpmath.mpc) or x < 0:
            if not complex_ok:
                raise NegativeRadicand(f"radicand {a[0].key()} is negative")
            return mpmath.sqrt(mpmath.mpc(x))
        return ctx.sqrt(x)

    # -- polynomial view ----------------------------------------------------

    def to_rational_function(self, ring: Ring, aux: "AuxiliaryRadicals") -> RationalFunction:
        """Rational function in ``ring`` with each sqrt replaced by an auxiliary.

        ``sqrt(N/D)`` becomes ``t/D`` where ``t`` is a fresh variable with
        ``t^2 = N*D``; the relations are collected in ``aux``.
        """
        op, a = self.op, self.args
        if op == "const":
            return RationalFunction(ring.const(a[0]))
        if op == "var":
            return RationalFunction(ring.var(a[0]))
        if op == "add":
            return a[0].to_rational_function(ring, aux) + a[1].to_rational_function(ring, aux)
        if op == "mul":
            return a[0].to_rational_function(ring, aux) * a[1].to_rational_function(ring, aux)
        if op == "neg":
            return -a[0].to_rational_function(ring, aux)
        if op == "div":
            return a[0].to_rational_function(ring, aux) / a[1].to_rational_function(ring, aux)
        if op == "pow":
            return a[0].to_rational_function(ring, aux) ** a[1]
        inner = a[0].to_rational_function(ring, aux)
        if inner.num.is_constant() and inner.den.is_constant():
            root = _exact_sqrt(inner.num.constant_value() / inner.den.constant_value())
            if root is not None:
                return RationalFunction(ring.const(root))
        name = aux.name_for(a[0].key())
        return RationalFunction(ring.var(name), inner.den)


def _to_ctx(v, ctx):
    if isinstance(v, (mpmath.mpf, mpmath.mpc)):
        return ctx.mpf(v) if ctx is mpmath.iv else v
    if isinstance(v, float):
        return ctx.mpf(v)
    try:
        q = to_rational(v)
    except TypeError:
        return v
    return ctx.mpf(int(q.numerator)) / int(q.denominator)


def _exact_sqrt(c: mpq) -> mpq | None:
    if c < 0:
        return None
    n, d = c.numerator, c.denominator
    if gmpy2.is_square(n) and gmpy2.is_square(d):
        return mpq(gmpy2.isqrt(n), gmpy2.isqrt(d))
    return None


class AuxiliaryRadicals:
    """Names for the square roots met in a set of expressions.

    Every distinct radicand gets a fresh variable ``t`` with ``t^2 = N*D``
    when the radicand reads ``N/D``; the square root itself is ``t/D``.
    Names are allocated up front (innermost radicands first) so that the
    ring can be built before any conversion happens.
    """

    def __init__(self, exprs, prefix: str = "t", taken=()):
        taken = set(taken)
        self.names: list[str] = []
        self.by_key: dict[str, str] = {}
        self.radicand: dict[str, RadicalExpr] = {}
        i = 0
        for e in exprs:
            for r in e.radicands():
                if r.key() in self.by_key:
                    continue
                i += 1
                name = f"{prefix}{i}"
                while name in taken:
                    i += 1
                    name = f"{prefix}{i}"
                self.by_key[r.key()] = name
                self.names.append(name)
                self.radicand[name] = r

    def name_for(self, key: str) -> str:
        try:
            return self.by_key[key]
        except KeyError:
            raise StructuralError(f"no auxiliary variable allocated for sqrt({key})") from None

    def relations(self, ring: Ring) -> dict[str, Polynomial]:
        """``t^2 - N*D`` for every auxiliary ``t``."""
        out = {}
        for name in self.names:
            rf = self.radicand[name].to_rational_function(ring, self)
            out[name] = ring.var(name) ** 2 - rf.num * rf.den
        return out

    def expression(self, name: str) -> "RadicalExpr":
        return self.radicand[name].sqrt()


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),]))")


def _tokens(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise StructuralError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, toks, env):
        self.t = toks
        self.i = 0
        self.env = env or {}

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self):
        left = self.term()
        while True:
            k, v = self.peek()
            if k == "op" and v in "+-":
                self.take()
                right = self.term()
                left = left + right if v == "+" else left - right
            else:
                return left

    def term(self):
        left = self.unary()
        while True:
            k, v = self.peek()
            if k == "op" and v in "*/":
                self.take()
                right = self.unary()
                left = left * right if v == "*" else left / right
            else:
                return left

    def unary(self):
        k, v = self.peek()
        if k == "op" and v in "+-":
            self.take()
            inner = self.unary()
            return -inner if v == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        k, v = self.peek()
        if k == "op" and v == "^":
            self.take()
            k, v = self.take()
            if k != "num":
                raise StructuralError("exponents must be integer literals")
            return base ** int(v)
        return base

    def atom(self):
        k, v = self.take()
        if k == "num":
            return RadicalExpr.const(int(v))
        if k == "name":
            nk, nv = self.peek()
            if v == "sqrt" and nk == "op" and nv == "(":
                self.take()
                inner = self.expr()
                self._close()
                return inner.sqrt()
            if v in self.env:
                return self.env[v]
            return RadicalExpr.var(v)
        if k == "op" and v == "(":
            inner = self.expr()
            self._close()
            return inner
        raise StructuralError(f"unexpected token {v!r}")

    def _close(self):
        k, v = self.take()
        if k != "op" or v != ")":
            raise StructuralError(f"expected ')', got {v!r}")


def parse_radical(text: str, env: Mapping[str, RadicalExpr] | None = None) -> RadicalExpr:
    toks = _tokens(text)
    if not toks:
        raise StructuralError("empty expression")
    p = _Parser(toks, env)
    e = p.expr()
    if p.i != len(toks):
        raise StructuralError(f"trailing input: {toks[p.i][1]!r}")
    return e


def from_polynomial(p: Polynomial) -> RadicalExpr:
    out = RadicalExpr.const(0)
    first = True
    for exps, c in p.terms.items():
        t = RadicalExpr.const(c)
        for name, e in zip(p.ring.names, exps):
            if e:
                v = RadicalExpr.var(name)
                t = t * (v if e == 1 else v ** e)
        out = t if first else out + t
        first = False
    return out
