"""Exact multivariate polynomials over the rationals.

Polynomials are immutable.  Terms live in a dict keyed by exponent tuples
(one slot per ring variable) and are kept sorted in descending lexicographic
order of the ring's declared variable order, so iteration, printing and
hashing are deterministic.

The text grammar is a signed sum of terms such as ``3/2*s1^2*l0 - r3``.
:func:`parse` also accepts parentheses, ``**`` and division by constants so
that factored data files can be read directly.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping

import gmpy2
import mpmath
from gmpy2 import mpq

__all__ = [
    "DEFAULT_VARIABLES",
    "StructuralError",
    "RingMismatchError",
    "UnknownVariableError",
    "Ring",
    "Polynomial",
    "RationalFunction",
    "default_ring",
    "parse",
    "to_rational",
]

DEFAULT_VARIABLES = (
    "s1", "s2", "s3", "r1", "r2", "r3",
    "M1", "M2", "M3", "g1", "g2", "g3",
    "alpha", "beta", "l0", "l1", "l2", "l3",
)


class StructuralError(ValueError):
    """Raised on malformed input: ring mismatch, unknown names, bad syntax."""


class RingMismatchError(StructuralError):
    pass


class UnknownVariableError(StructuralError):
    pass


def to_rational(value) -> mpq:
    """Coerce ints, Fractions, mpq and rational strings to ``mpq``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if type(value) is type(mpq()):
        return value
    if isinstance(value, str):
        return mpq(Fraction(value.strip()))
    if isinstance(value, (int, Fraction, _RationalABC)) or type(value) is type(gmpy2.mpz()):
        return mpq(value)
    raise TypeError(f"cannot use {value!r} as an exact rational")


class Ring:
    """An ordered tuple of variable names.  Instances are interned."""

    __slots__ = ("names", "index", "nvars")

    def __new__(cls, names: Iterable[str]):
        return _ring(tuple(names))

    @classmethod
    def _make(cls, names: tuple[str, ...]) -> "Ring":
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate variable names in {names}")
        self = object.__new__(cls)
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self.nvars = len(names)
        return self

    def __repr__(self):
        return f"Ring({', '.join(self.names)})"

    def __reduce__(self):
        return (Ring, (self.names,))

    def __contains__(self, name):
        return name in self.index

    def var(self, name: str) -> "Polynomial":
        try:
            i = self.index[name]
        except KeyError:
            raise UnknownVariableError(f"{name!r} is not a variable of {self}") from None
        exps = [0] * self.nvars
        exps[i] = 1
        return Polynomial._raw(self, {tuple(exps): mpq(1)})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(n) for n in self.names)

    def const(self, value) -> "Polynomial":
        c = to_rational(value)
        if c == 0:
            return Polynomial._raw(self, {})
        return Polynomial._raw(self, {(0,) * self.nvars: c})

    def zero(self) -> "Polynomial":
        return Polynomial._raw(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def parse(self, text: str, env: Mapping[str, "Polynomial"] | None = None) -> "Polynomial":
        return parse(text, self, env)


@lru_cache(maxsize=None)
def _ring(names: tuple[str, ...]) -> Ring:
    return Ring._make(names)


def default_ring() -> Ring:
    return Ring(DEFAULT_VARIABLES)


def _sorted_terms(terms: dict) -> dict:
    return {k: terms[k] for k in sorted(terms, reverse=True)}


class Polynomial:
    """Immutable polynomial with ``mpq`` coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[tuple[int, ...], object] | None = None):
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != ring.nvars or any(e < 0 for e in exps):
                raise StructuralError(f"bad exponent vector {exps} for {ring}")
            c = to_rational(c)
            if c:
                clean[exps] = clean.get(exps, mpq(0)) + c
        clean = {k: v for k, v in clean.items() if v}
        self.ring = ring
        self.terms = _sorted_terms(clean)
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> "Polynomial":
        # terms: nonzero mpq values; sorted here
        self = object.__new__(cls)
        self.ring = ring
        self.terms = _sorted_terms(terms)
        self._hash = None
        return self

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise StructuralError("polynomial is not constant")
        return self.terms.get((0,) * self.ring.nvars, mpq(0))

    def degree(self, var: str | None = None) -> int:
        """Total degree, or degree in one variable; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self._index(var)
        return max(e[i] for e in self.terms)

    def variables(self) -> tuple[str, ...]:
        used = [False] * self.ring.nvars
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used[i] = True
        return tuple(n for n, u in zip(self.ring.names, used) if u)

    def __len__(self):
        return len(self.terms)

    def _index(self, var: str) -> int:
        try:
            return self.ring.index[var]
        except KeyError:
            raise UnknownVariableError(f"{var!r} is not a variable of {self.ring}") from None

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring is not self.ring:
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            return other
        try:
            return self.ring.const(other)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k)
            if s is None:
                out[k] = v
            else:
                s = s + v
                if s:
                    out[k] = s
                else:
                    del out[k]
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {k: -v for k, v in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return self.ring.zero()
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return Polynomial._raw(self.ring, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = to_rational(c)
        if not c:
            return self.ring.zero()
        return Polynomial._raw(self.ring, {k: v * c for k, v in self.terms.items()})

    def __truediv__(self, other):
        # exact division by a nonzero constant only
        if isinstance(other, Polynomial):
            if other.ring is not self.ring:
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            if not other.is_constant():
                raise StructuralError("polynomial division by a non-constant; use RationalFunction")
            other = other.constant_value()
        c = to_rational(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self.scale(1 / c)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise StructuralError("polynomial powers must be non-negative integers")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- equality / hashing --------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring is other.ring and self.terms == other.terms
        try:
            c = to_rational(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_value() == c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.names, tuple(self.terms.items())))
        return self._hash

    # -- calculus and substitution -------------------------------------

    def differentiate(self, var: str) -> "Polynomial":
        i = self._index(var)
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e:
                new = list(exps)
                new[i] = e - 1
                out[tuple(new)] = c * e
        return Polynomial._raw(self.ring, out)

    def gradient(self, names: Iterable[str]) -> list["Polynomial"]:
        return [self.differentiate(n) for n in names]

    def substitute(self, bindings: Mapping[str, object], target: Ring | None = None) -> "Polynomial":
        """Compose with ``bindings``; unbound variables map to themselves in ``target``."""
        target = target or self.ring
        for name in bindings:
            self._index(name)
        images = []
        for name in self.ring.names:
            if name in bindings:
                img = bindings[name]
                if isinstance(img, Polynomial):
                    if img.ring is not target:
                        raise RingMismatchError(f"image of {name} lives in {img.ring}, expected {target}")
                else:
                    img = target.const(img)
            elif name in target.index:
                img = target.var(name)
            else:
                img = None
            images.append(img)
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                if images[i] is None:
                    raise UnknownVariableError(
                        f"{self.ring.names[i]!r} is unbound and absent from target {target}")
                cache[key] = images[i] ** e
            return cache[key]

        result: dict = {}
        for exps, c in self.terms.items():
            term = target.const(c)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            for k, v in term.terms.items():
                s = result.get(k)
                result[k] = v if s is None else s + v
        return Polynomial._raw(target, {k: v for k, v in result.items() if v})

    def embed(self, target: Ring) -> "Polynomial":
        """Re-express in ``target`` (which must contain every used variable)."""
        if target is self.ring:
            return self
        idx = []
        for i, n in enumerate(self.ring.names):
            idx.append(target.index.get(n))
        out = {}
        for exps, c in self.terms.items():
            new = [0] * target.nvars
            for i, e in enumerate(exps):
                if e:
                    if idx[i] is None:
                        raise UnknownVariableError(f"{self.ring.names[i]!r} not in {target}")
                    new[idx[i]] = e
            out[tuple(new)] = c
        return Polynomial._raw(target, out)

    def evaluate(self, point: Mapping[str, object]):
        """Value at ``point``.

        Exact (``mpq``) when every bound value is rational; otherwise the
        arithmetic of the supplied numbers (float, complex, mpmath) is used.
        Only variables that occur in the polynomial must be bound.
        """
        used = self.variables()
        missing = [n for n in used if n not in point]
        if missing:
            raise UnknownVariableError(f"unbound variables: {', '.join(missing)}")
        vals = {}
        exact = True
        for n in used:
            v = point[n]
            try:
                vals[n] = to_rational(v)
            except TypeError:
                vals[n] = v
                exact = False
        if exact:
            conv = lambda c: c  # noqa: E731
        else:
            sample = next(v for v in vals.values() if not isinstance(v, type(mpq())))
            if isinstance(sample, (mpmath.mpf, mpmath.mpc)):
                conv = lambda c: mpmath.mpf(int(c.numerator)) / int(c.denominator)  # noqa: E731
                vals = {n: (conv(v) if isinstance(v, type(mpq())) else v) for n, v in vals.items()}
            else:
                conv = float
                vals = {n: (float(v) if isinstance(v, type(mpq())) else v) for n, v in vals.items()}
        positions = [(self.ring.index[n], vals[n]) for n in used]
        total = conv(mpq(0))
        pows: dict = {}
        for exps, c in self.terms.items():
            t = conv(c)
            for i, v in positions:
                e = exps[i]
                if e:
                    key = (i, e)
                    p = pows.get(key)
                    if p is None:
                        p = pows[key] = v ** e
                    t = t * p
            total = total + t
        return total

    # -- structure -----------------------------------------------------

    def content(self) -> mpq:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return mpq(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gmpy2.gcd(num, c.numerator)
            den = gmpy2.lcm(den, c.denominator)
        return mpq(num, den)

    def primitive(self) -> "Polynomial":
        """Integer-coefficient associate with leading (first) coefficient positive."""
        if not self.terms:
            return self
        c = self.content()
        if next(iter(self.terms.values())) < 0:
            c = -c
        return self.scale(1 / c)

    def coefficients_in(self, names: Iterable[str]) -> dict[tuple[int, ...], "Polynomial"]:
        """Split into {exponents in ``names``: coefficient polynomial in the rest}."""
        idx = [self._index(n) for n in names]
        out: dict = {}
        for exps, c in self.terms.items():
            key = tuple(exps[i] for i in idx)
            rest = list(exps)
            for i in idx:
                rest[i] = 0
            out.setdefault(key, {})[tuple(rest)] = c
        return {k: Polynomial._raw(self.ring, v) for k, v in out.items()}

    def compose(self, bindings: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        """Substitute rational functions (in this ring) for variables.

        One common denominator is built from the highest power of each
        binding's denominator, so no fraction additions happen.
        """
        bound = [(self._index(n), RationalFunction.lift(v, self.ring)) for n, v in bindings.items()]
        if not bound:
            return RationalFunction(self)
        top = {i: max((e[i] for e in self.terms), default=0) for i, _ in bound}
        free = {i for i in range(self.ring.nvars)} - {i for i, _ in bound}
        cache: dict = {}

        def piece(i, rf, e):
            key = (i, e)
            if key not in cache:
                cache[key] = rf.num ** e * rf.den ** (top[i] - e)
            return cache[key]

        total = self.ring.zero()
        for exps, c in self.terms.items():
            mono = tuple(e if i in free else 0 for i, e in enumerate(exps))
            term = Polynomial._raw(self.ring, {mono: c})
            for i, rf in bound:
                term = term * piece(i, rf, exps[i])
            total = total + term
        den = self.ring.one()
        for i, rf in bound:
            den = den * rf.den ** top[i]
        return RationalFunction(total, den)

    # -- text / json ---------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms.items():
            factors = []
            for name, e in zip(self.ring.names, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            if not factors:
                body = _fmt_rational(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = _fmt_rational(mag) + "*" + "*".join(factors)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def to_json(self) -> dict:
        return {
            "variables": list(self.ring.names),
            "terms": [[list(e), _fmt_rational(c)] for e, c in self.terms.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        ring = Ring(data["variables"])
        return cls(ring, {tuple(e): to_rational(c) for e, c in data["terms"]})


def _fmt_rational(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
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
    def __init__(self, tokens, ring: Ring, env):
        self.toks = tokens
        self.i = 0
        self.ring = ring
        self.env = env or {}

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise StructuralError(f"expected {op!r}, got {val!r}")

    def expr(self):
        left = self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                right = self.term()
                left = left + right if val == "+" else left - right
            else:
                return left

    def term(self):
        left = self.unary()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                right = self.unary()
                if val == "*":
                    left = left * right
                else:
                    if not right.is_constant() or right.is_zero():
                        raise StructuralError("division only by nonzero constants")
                    left = left / right.constant_value()
            else:
                return left

    def unary(self):
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise StructuralError("exponents must be non-negative integer literals")
            return base ** int(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(int(val))
        if kind == "name":
            if val in self.env:
                p = self.env[val]
                if p.ring is not self.ring:
                    p = p.embed(self.ring)
                return p
            return self.ring.var(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise StructuralError(f"unexpected token {val!r}")


def parse(text: str, ring: Ring | None = None, env: Mapping[str, Polynomial] | None = None) -> Polynomial:
    """Parse polynomial text into ``ring`` (default: the workbench ring)."""
    ring = ring or default_ring()
    toks = _tokenize(text)
    if not toks:
        raise StructuralError("empty polynomial text")
    p = _Parser(toks, ring, env)
    result = p.expr()
    if p.i != len(toks):
        raise StructuralError(f"trailing input after token {p.i}: {toks[p.i][1]!r}")
    return result


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Quotient of two polynomials in one ring.

    Normalised by content only: the denominator is a primitive integer
    polynomial with positive leading coefficient, and a shared monomial
    factor is cancelled.  Equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = num.ring.one()
        if num.ring is not den.ring:
            raise RingMismatchError(f"{num.ring} vs {den.ring}")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = num, num.ring.one()
            return
        num, den = _cancel_monomial(num, den)
        if den.is_constant():
            self.num, self.den = num.scale(1 / den.constant_value()), den.ring.one()
            return
        c = den.content()
        if next(iter(den.terms.values())) < 0:
            c = -c
        num, den = num.scale(1 / c), den.scale(1 / c)
        q = _exact_quotient(num, den)
        if q is not None:
            self.num, self.den = q, den.ring.one()
            return
        self.num, self.den = num, den

    @property
    def ring(self) -> Ring:
        return self.num.ring

    @classmethod
    def lift(cls, value, ring: Ring) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, Polynomial):
            return cls(value)
        return cls(ring.const(value))

    def _other(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        try:
            return RationalFunction(self.ring.const(other))
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._other(other)
        return other / self

    def __pow__(self, n: int):
        if n < 0:
            return RationalFunction(self.den ** (-n), self.num ** (-n)) if not self.num.is_zero() else 1 / 0
        return RationalFunction(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("RationalFunction equality is semantic; not hashable")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.evaluate(point) / d

    def substitute(self, bindings, target: Ring | None = None) -> "RationalFunction":
        return RationalFunction(self.num.substitute(bindings, target), self.den.substitute(bindings, target))

    def differentiate(self, var: str) -> "RationalFunction":
        n, d = self.num, self.den
        return RationalFunction(n.differentiate(var) * d - n * d.differentiate(var), d * d)

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


def _cancel_monomial(num: Polynomial, den: Polynomial):
    n = num.ring.nvars
    g = [min(e[i] for e in list(num.terms) + list(den.terms)) for i in range(n)]
    if not any(g):
        return num, den
    shift = lambda p: Polynomial._raw(  # noqa: E731
        p.ring, {tuple(a - b for a, b in zip(e, g)): c for e, c in p.terms.items()})
    return shift(num), shift(den)


def _exact_quotient(num: Polynomial, den: Polynomial) -> Polynomial | None:
    """num/den if the division is exact (lex long division), else None."""
    if len(den) > len(num) * 4 + 8 and len(num) < len(den):
        return None
    lead_e, lead_c = next(iter(den.terms.items()))
    rem = dict(num.terms)
    quot: dict = {}
    ring = num.ring
    while rem:
        top = max(rem)
        if any(a < b for a, b in zip(top, lead_e)):
            return None
        shift = tuple(a - b for a, b in zip(top, lead_e))
        c = rem[top] / lead_c
        quot[shift] = c
        for e, v in den.terms.items():
            k = tuple(a + b for a, b in zip(e, shift))
            s = rem.get(k, mpq(0)) - c * v
            if s:
                rem[k] = s
            else:
                rem.pop(k, None)
        if len(quot) > 10 * (len(num) + 1):
            return None
    return Polynomial._raw(ring, quot)
