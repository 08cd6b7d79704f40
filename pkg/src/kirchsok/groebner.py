"""Monomial orders, normal forms, Buchberger's algorithm and elimination.

Internally a monomial is one Python int.  The high part holds order
weights (total degree, partial sums of exponents) and the low part holds the
raw exponents, each field with a guard bit.  Integer comparison then agrees
with the monomial order, multiplication is integer addition and divisibility
is a single borrow test on the low part.

Over the rationals the reduction is fraction free: working polynomials carry
primitive integer coefficients and only the final basis is made monic.
A generic field mode (monic division with arbitrary field elements such as
:class:`RationalFunction`) is available for small parametric runs.
"""

from __future__ import annotations

import heapq
import random
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz

from .polyring import (
    Polynomial,
    RationalFunction,
    Ring,
    StructuralError,
    UnknownVariableError,
)

__all__ = [
    "MonomialOrder",
    "IdealBasis",
    "BudgetExceeded",
    "GBStats",
    "compare",
    "normal_form",
    "buchberger",
    "ideal_member",
    "is_groebner",
    "eliminate",
    "sample_admissible",
    "DEFAULT_MAX_PAIRS",
    "DEFAULT_MAX_TERMS",
    "DEFAULT_MAX_BITS",
]

DEFAULT_MAX_PAIRS = 10**6
DEFAULT_MAX_TERMS = 10**5
DEFAULT_MAX_BITS = 1 << 24

_W = 16                      # bits per field
_FMASK = (1 << _W) - 1
_GBIT = 1 << (_W - 1)        # guard bit of a field


class BudgetExceeded(RuntimeError):
    """Raised when a Gröbner computation exceeds its pair, term or coefficient-size budget."""

    def __init__(self, message: str, pairs_processed: int):
        super().__init__(f"{message} (pairs processed: {pairs_processed})")
        self.pairs_processed = pairs_processed


@dataclass(frozen=True)
class MonomialOrder:
    """lex, grevlex or a two-block elimination order over ``ranking``.

    ``ranking`` lists variables from largest to smallest.  For ``block`` the
    first ``split`` variables form the eliminated block (grevlex inside each
    block, first block dominating).
    """

    kind: str
    ranking: tuple[str, ...]
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise StructuralError(f"unknown order kind {self.kind!r}")
        object.__setattr__(self, "ranking", tuple(self.ranking))
        if len(set(self.ranking)) != len(self.ranking):
            raise StructuralError("ranking repeats a variable")
        if self.kind == "block" and not 0 < self.split < len(self.ranking):
            raise StructuralError("block order needs 0 < split < len(ranking)")

    @classmethod
    def lex(cls, *ranking: str) -> "MonomialOrder":
        return cls("lex", _flatten(ranking))

    @classmethod
    def grevlex(cls, *ranking: str) -> "MonomialOrder":
        return cls("grevlex", _flatten(ranking))

    @classmethod
    def elimination(cls, eliminate: Sequence[str], keep: Sequence[str]) -> "MonomialOrder":
        eliminate, keep = tuple(eliminate), tuple(keep)
        return cls("block", eliminate + keep, len(eliminate))

    # weight rows: each row is a list of nonnegative integer weights
    @cached_property
    def _rows(self) -> list[list[int]]:
        n = len(self.ranking)
        if self.kind == "lex":
            return []
        if self.kind == "grevlex":
            return _grevlex_rows(n, 0, n)
        k = self.split
        return _grevlex_rows(n, 0, k) + _grevlex_rows(n, k, n)

    def key(self, exps: Sequence[int]) -> tuple[int, ...]:
        """Sort key of an exponent vector given in ranking order."""
        head = tuple(sum(w * e for w, e in zip(row, exps)) for row in self._rows)
        return head + tuple(exps)

    def __str__(self):
        if self.kind == "block":
            return f"block({','.join(self.ranking[:self.split])} | {','.join(self.ranking[self.split:])})"
        return f"{self.kind}({','.join(self.ranking)})"


def _flatten(ranking):
    if len(ranking) == 1 and not isinstance(ranking[0], str):
        return tuple(ranking[0])
    return tuple(ranking)


def _grevlex_rows(n: int, lo: int, hi: int) -> list[list[int]]:
    # total degree of the block, then prefix sums e_lo + ... + e_j for
    # decreasing j; larger prefix sum means smaller trailing exponents
    rows = [[1 if lo <= i < hi else 0 for i in range(n)]]
    for j in range(hi - 2, lo - 1, -1):
        rows.append([1 if lo <= i <= j else 0 for i in range(n)])
    return rows


def compare(m1: Sequence[int], m2: Sequence[int], order: MonomialOrder, ring: Ring | None = None) -> int:
    """-1, 0 or 1 comparing two exponent vectors.

    Vectors are in ``ring`` variable order when a ring is given, otherwise in
    the order's ranking.
    """
    if ring is not None:
        m1 = _permute(m1, ring, order)
        m2 = _permute(m2, ring, order)
    k1, k2 = order.key(m1), order.key(m2)
    return (k1 > k2) - (k1 < k2)


def _permute(exps, ring: Ring, order: MonomialOrder):
    out = []
    for name in order.ranking:
        i = ring.index.get(name)
        out.append(0 if i is None else exps[i])
    for name, e in zip(ring.names, exps):
        if e and name not in order.ranking:
            raise UnknownVariableError(f"variable {name!r} is not ranked by {order}")
    return out


# ---------------------------------------------------------------------------
# Packed monomial codec
# ---------------------------------------------------------------------------


class _Codec:
    """Encodes exponent vectors of one ring under one order as ints."""

    def __init__(self, ring: Ring, order: MonomialOrder):
        for name in order.ranking:
            if name not in ring.index:
                raise UnknownVariableError(f"ranked variable {name!r} not in {ring}")
        self.ring = ring
        self.order = order
        self.n = len(order.ranking)
        self.pos = [ring.index[name] for name in order.ranking]
        self.rows = order._rows
        self.ranked = set(self.pos)
        self.pbits = _W * self.n
        self.pmask = (1 << self.pbits) - 1
        self.guard = sum(_GBIT << (_W * i) for i in range(self.n))
        self._dec: dict[int, tuple[int, ...]] = {}

    @cached_property
    def _row_shifts(self):
        return [self.pbits + _W * (len(self.rows) - 1 - i) for i in range(len(self.rows))]

    def encode(self, exps: Sequence[int]) -> int:
        ranked = [exps[i] for i in self.pos]
        if len(self.ranked) != len(exps):
            for i, e in enumerate(exps):
                if e and i not in self.ranked:
                    raise UnknownVariableError(
                        f"variable {self.ring.names[i]!r} is not ranked by {self.order}")
        code = 0
        for e in ranked:
            if e >= _GBIT:
                raise StructuralError("exponent too large for the packed representation")
            code = (code << _W) | e
        for row, sh in zip(self.rows, self._row_shifts):
            code |= sum(w * e for w, e in zip(row, ranked)) << sh
        return code

    def ranked_exps(self, code: int) -> tuple[int, ...]:
        d = self._dec.get(code)
        if d is None:
            p = code & self.pmask
            out = []
            for _ in range(self.n):
                out.append(p & _FMASK)
                p >>= _W
            d = tuple(reversed(out))
            self._dec[code] = d
        return d

    def decode(self, code: int) -> tuple[int, ...]:
        ranked = self.ranked_exps(code)
        exps = [0] * self.ring.nvars
        for i, e in zip(self.pos, ranked):
            exps[i] = e
        return tuple(exps)

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return (((b & self.pmask) | g) - (a & self.pmask)) & g == g

    def lcm(self, a: int, b: int) -> int:
        ea, eb = self.ranked_exps(a), self.ranked_exps(b)
        return self._from_ranked(tuple(max(x, y) for x, y in zip(ea, eb)))

    def _from_ranked(self, ranked) -> int:
        code = 0
        for e in ranked:
            if e >= _GBIT:
                raise StructuralError("exponent too large for the packed representation")
            code = (code << _W) | e
        for row, sh in zip(self.rows, self._row_shifts):
            code |= sum(w * e for w, e in zip(row, ranked)) << sh
        return code

    def coprime(self, a: int, b: int) -> bool:
        ea, eb = self.ranked_exps(a), self.ranked_exps(b)
        return not any(x and y for x, y in zip(ea, eb))

    def degree(self, code: int) -> int:
        return sum(self.ranked_exps(code))


# ---------------------------------------------------------------------------
# Coefficient back ends
# ---------------------------------------------------------------------------


def _to_integer_poly(p: Polynomial, codec: _Codec) -> dict[int, mpz]:
    if p.is_zero():
        return {}
    den = 1
    for c in p.terms.values():
        den = gmpy2.lcm(den, c.denominator)
    out = {codec.encode(e): mpz(c * den) for e, c in p.terms.items()}
    return _primitive_int(out)


def _primitive_int(f: dict) -> dict:
    if not f:
        return f
    g = mpz(0)
    for c in f.values():
        g = gmpy2.gcd(g, c)
        if g == 1:
            break
    lead = f[max(f)]
    if lead < 0:
        g = -g
    if g != 1:
        f = {m: c // g for m, c in f.items()}
    return f


def _reduce_int(f: dict, basis: list, codec: _Codec, max_terms: int, full: bool = True,
                max_bits: int = DEFAULT_MAX_BITS) -> dict:
    """Fraction-free normal form of integer poly ``f`` modulo ``basis``.

    ``basis`` is a list of (lm, lc, poly) with integer coefficients.  The
    result is primitive (positive leading coefficient) and equals the true
    remainder up to a positive rational factor.
    """
    f = dict(f)
    heap = [-m for m in f]
    heapq.heapify(heap)
    rem: dict = {}
    divides = codec.divides
    steps = 0
    bit_limit = 2 * max((abs(v).bit_length() for v in f.values()), default=0) + 64
    while heap:
        m = -heapq.heappop(heap)
        c = f.get(m)
        if c is None:
            continue
        for lm, lc, gp in basis:
            if divides(lm, m):
                break
        else:
            rem[m] = f.pop(m)
            if not full:
                # top reduction only: the rest is already irreducible at the top
                rem.update(f)
                f.clear()
                break
            continue
        del f[m]
        d = gmpy2.gcd(lc, c)
        a = lc // d
        b = c // d
        if a != 1:
            if a == -1:
                b = -b
            else:
                for k in f:
                    f[k] *= a
                for k in rem:
                    rem[k] *= a
        q = m - lm
        for gm, gc in gp.items():
            if gm == lm:
                continue
            k = gm + q
            v = f.get(k)
            if v is None:
                f[k] = -b * gc
                heapq.heappush(heap, -k)
            else:
                v -= b * gc
                if v:
                    f[k] = v
                else:
                    del f[k]
        steps += 1
        if len(f) + len(rem) > max_terms:
            raise BudgetExceeded(f"intermediate polynomial exceeded {max_terms} terms", -1)
        # content removal every 64 steps, or sooner once coefficients have doubled in size
        if steps % 64 == 0 or abs(c).bit_length() > bit_limit:
            f, rem = _joint_content(f, rem)
            top = max((abs(v).bit_length() for v in f.values()), default=0)
            if top > max_bits:
                raise BudgetExceeded(f"intermediate coefficient exceeded {max_bits} bits", -1)
            bit_limit = 2 * top + 64
    return _primitive_int(rem)


def _joint_content(f: dict, rem: dict):
    g = mpz(0)
    for c in f.values():
        g = gmpy2.gcd(g, c)
        if g == 1:
            return f, rem
    for c in rem.values():
        g = gmpy2.gcd(g, c)
        if g == 1:
            return f, rem
    if g > 1:
        f = {k: v // g for k, v in f.items()}
        rem = {k: v // g for k, v in rem.items()}
    return f, rem


def _spoly_int(f1, f2, codec: _Codec) -> dict:
    lm1, lc1, p1 = f1
    lm2, lc2, p2 = f2
    l = codec.lcm(lm1, lm2)
    q1, q2 = l - lm1, l - lm2
    d = gmpy2.gcd(lc1, lc2)
    a1, a2 = lc2 // d, lc1 // d
    out: dict = {}
    for m, c in p1.items():
        out[m + q1] = a1 * c
    for m, c in p2.items():
        k = m + q2
        v = out.get(k, 0) - a2 * c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _is_zero(c) -> bool:
    if isinstance(c, RationalFunction):
        return c.is_zero()
    return c == 0


def _reduce_field(f: dict, basis: list, codec: _Codec, max_terms: int) -> dict:
    """Monic normal form with generic field coefficients; basis entries monic."""
    f = dict(f)
    heap = [-m for m in f]
    heapq.heapify(heap)
    rem: dict = {}
    while heap:
        m = -heapq.heappop(heap)
        c = f.get(m)
        if c is None:
            continue
        for lm, _, gp in basis:
            if codec.divides(lm, m):
                break
        else:
            rem[m] = f.pop(m)
            continue
        del f[m]
        q = m - lm
        for gm, gc in gp.items():
            if gm == lm:
                continue
            k = gm + q
            v = f.get(k)
            if v is None:
                f[k] = -(c * gc)
                heapq.heappush(heap, -k)
            else:
                v = v - c * gc
                if _is_zero(v):
                    del f[k]
                else:
                    f[k] = v
        if len(f) + len(rem) > max_terms:
            raise BudgetExceeded(f"intermediate polynomial exceeded {max_terms} terms", -1)
    return _monic_field(rem)


def _monic_field(f: dict) -> dict:
    if not f:
        return f
    lc = f[max(f)]
    return {m: c / lc for m, c in f.items()}


def _spoly_field(f1, f2, codec: _Codec) -> dict:
    lm1, _, p1 = f1
    lm2, _, p2 = f2
    l = codec.lcm(lm1, lm2)
    q1, q2 = l - lm1, l - lm2
    out: dict = {m + q1: c for m, c in p1.items()}
    for m, c in p2.items():
        k = m + q2
        if k in out:
            v = out[k] - c
            if _is_zero(v):
                del out[k]
            else:
                out[k] = v
        else:
            out[k] = -c
    return out


class _IntegerBackend:
    name = "rational"

    def __init__(self, codec, max_bits: int = DEFAULT_MAX_BITS):
        self.codec = codec
        self.max_bits = max_bits

    def load(self, p: Polynomial) -> dict:
        return _to_integer_poly(p, self.codec)

    def entry(self, f: dict):
        lm = max(f)
        return (lm, f[lm], f)

    def reduce(self, f, basis, max_terms):
        return _reduce_int(f, basis, self.codec, max_terms, max_bits=self.max_bits)

    def spoly(self, a, b):
        return _spoly_int(a, b, self.codec)

    def export(self, f: dict, ring: Ring) -> Polynomial:
        lc = f[max(f)]
        return Polynomial._raw(ring, {self.codec.decode(m): mpq(c, 1) / lc for m, c in f.items()})


class _FieldBackend:
    """Coefficients are field elements; polynomials map monomial -> element."""

    name = "field"

    def __init__(self, codec):
        self.codec = codec

    def load(self, p) -> dict:
        return _monic_field(dict(p))

    def entry(self, f: dict):
        lm = max(f)
        return (lm, f[lm], f)

    def reduce(self, f, basis, max_terms):
        return _reduce_field(f, basis, self.codec, max_terms)

    def spoly(self, a, b):
        return _spoly_field(a, b, self.codec)

    def export(self, f: dict, ring: Ring):
        return {self.codec.decode(m): c for m, c in f.items()}


# ---------------------------------------------------------------------------
# Public types
# ---------------------------------------------------------------------------


@dataclass
class GBStats:
    pairs_processed: int = 0
    pairs_discarded: int = 0
    zero_reductions: int = 0
    max_terms_seen: int = 0
    truncated: bool = False
    elapsed: float = 0.0


@dataclass
class IdealBasis:
    """A list of generators plus the order they are read under.

    ``is_groebner`` records that the generators form a Gröbner basis;
    ``reduced`` that they form the reduced one (monic, inter-reduced).
    """

    generators: list
    order: MonomialOrder
    ring: Ring
    is_groebner: bool = False
    reduced: bool = False
    stats: GBStats = field(default_factory=GBStats)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def leading_monomials(self) -> list[tuple[int, ...]]:
        codec = _Codec(self.ring, self.order)
        out = []
        for g in self.generators:
            out.append(codec.decode(max(codec.encode(e) for e in g.terms)))
        return out

    def max_degree(self) -> int:
        return max((g.degree() for g in self.generators), default=-1)

    def to_text(self) -> str:
        return "\n".join(str(g) for g in self.generators)

    def summary(self) -> dict:
        return {
            "pairs_processed": self.stats.pairs_processed,
            "basis_size": len(self.generators),
            "max_degree": self.max_degree(),
        }


def _check_ring(polys: Iterable[Polynomial]) -> Ring:
    ring = None
    for p in polys:
        if ring is None:
            ring = p.ring
        elif p.ring is not ring:
            raise StructuralError("generators live in different rings")
    if ring is None:
        raise StructuralError("empty generator list")
    return ring


def leading_monomial(p: Polynomial, order: MonomialOrder) -> tuple[int, ...]:
    codec = _Codec(p.ring, order)
    return codec.decode(max(codec.encode(e) for e in p.terms))


def leading_term(p: Polynomial, order: MonomialOrder) -> tuple[tuple[int, ...], mpq]:
    m = leading_monomial(p, order)
    return m, p.terms[m]


def normal_form(p: Polynomial, basis: IdealBasis | Sequence[Polynomial],
                order: MonomialOrder | None = None, *, max_terms: int = DEFAULT_MAX_TERMS) -> Polynomial:
    """Fully reduced remainder of ``p`` modulo the generators.

    The remainder is exact (monic normalisation is undone), so
    ``p - normal_form(p)`` lies in the ideal.
    """
    gens, order = _unpack(basis, order)
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return p
    if p.ring is not gens[0].ring:
        raise StructuralError("polynomial and basis live in different rings")
    _check_ring(gens)
    if p.is_zero():
        return p
    codec = _Codec(p.ring, order)
    # exact rational remainder: reduce with monic mpq generators
    monic = []
    for g in gens:
        d = {codec.encode(e): c for e, c in g.terms.items()}
        monic.append(_monic_field(d))
    entries = [(max(d), mpq(1), d) for d in monic]
    f = {codec.encode(e): c for e, c in p.terms.items()}
    rem = _reduce_rational_exact(f, entries, codec, max_terms)
    return Polynomial._raw(p.ring, {codec.decode(m): c for m, c in rem.items()})


def _reduce_rational_exact(f, basis, codec, max_terms):
    f = dict(f)
    heap = [-m for m in f]
    heapq.heapify(heap)
    rem: dict = {}
    while heap:
        m = -heapq.heappop(heap)
        c = f.get(m)
        if c is None:
            continue
        for lm, _, gp in basis:
            if codec.divides(lm, m):
                break
        else:
            rem[m] = f.pop(m)
            continue
        del f[m]
        q = m - lm
        for gm, gc in gp.items():
            if gm == lm:
                continue
            k = gm + q
            v = f.get(k)
            if v is None:
                f[k] = -c * gc
                heapq.heappush(heap, -k)
            else:
                v -= c * gc
                if v:
                    f[k] = v
                else:
                    del f[k]
        if len(f) + len(rem) > max_terms:
            raise BudgetExceeded(f"intermediate polynomial exceeded {max_terms} terms", -1)
    return rem


def _unpack(basis, order):
    if isinstance(basis, IdealBasis):
        return list(basis.generators), order or basis.order
    if order is None:
        raise StructuralError("a monomial order is required for a bare generator list")
    return list(basis), order


def buchberger(gens: Sequence[Polynomial], order: MonomialOrder, *,
               max_pairs: int = DEFAULT_MAX_PAIRS, max_terms: int = DEFAULT_MAX_TERMS,
               max_bits: int = DEFAULT_MAX_BITS, strategy: str = "normal", method: str = "auto") -> IdealBasis:
    """Reduced Gröbner basis of the ideal generated by ``gens``.

    Pairs are chosen by ``strategy``: ``normal`` takes the smallest lcm
    degree (ties broken by the order), ``sugar`` the smallest sugar degree.
    Useless pairs are dropped with the coprime and chain criteria in the
    Gebauer–Möller form.  Deterministic for a fixed input list.

    ``method`` picks the route for orders that do not refine total degree.
    ``direct`` runs Buchberger on the inputs as given.  ``homogenize`` first
    computes a grevlex basis, homogenizes it with a fresh smallest variable,
    runs the homogeneous computation degree by degree and dehomogenizes;
    this keeps intermediate degrees (and coefficient sizes) bounded by the
    degrees actually present in the answer.  ``auto`` homogenizes for lex
    and block orders with inhomogeneous input.

    ``max_pairs``, ``max_terms`` and ``max_bits`` bound the S-pairs treated,
    the terms of any intermediate remainder and the bit size of its integer
    coefficients; exceeding one raises :class:`BudgetExceeded`.
    """
    ring = _check_ring(gens)
    if method not in ("auto", "direct", "homogenize"):
        raise StructuralError(f"unknown method {method!r}")
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return IdealBasis([], order, ring, is_groebner=True, reduced=True)
    if method == "auto":
        homogeneous = all(len({sum(e) for e in g.terms}) == 1 for g in gens)
        method = "direct" if order.kind == "grevlex" or homogeneous else "homogenize"
    t0 = time.perf_counter()
    if method == "direct":
        stats = GBStats()
        out = _run(gens, ring, order, stats, max_pairs, max_terms, strategy, max_bits)
    else:
        out, stats = _homogenized_run(gens, ring, order, max_pairs, max_terms, strategy, max_bits)
    stats.elapsed = time.perf_counter() - t0
    return IdealBasis(out, order, ring, is_groebner=True, reduced=True, stats=stats)


def _run(gens, ring, order, stats, max_pairs, max_terms, strategy, max_bits=DEFAULT_MAX_BITS):
    codec = _Codec(ring, order)
    backend = _IntegerBackend(codec, max_bits)
    polys = [backend.load(g) for g in gens]
    basis = _buchberger_core(polys, backend, codec, stats, max_pairs, max_terms, strategy)
    return [backend.export(f, ring) for f in basis]


def _homogenized_run(gens, ring, order, max_pairs, max_terms, strategy, max_bits=DEFAULT_MAX_BITS):
    stats = GBStats()
    grev = _run(gens, ring, MonomialOrder.grevlex(*order.ranking), stats, max_pairs, max_terms, strategy, max_bits)
    hname = "_h"
    while hname in ring.index:
        hname += "_"
    hring = Ring(ring.names + (hname,))
    hpolys = []
    for g in grev:
        d = g.degree()
        hpolys.append(Polynomial._raw(hring, {e + (d - sum(e),): c for e, c in g.terms.items()}))
    # the fresh variable is the smallest, so leading terms survive h = 1
    horder = MonomialOrder(order.kind, order.ranking + (hname,), order.split)
    remaining = max_pairs - stats.pairs_processed
    hstats = GBStats()
    hbasis = _run(hpolys, hring, horder, hstats, remaining, max_terms, strategy, max_bits)
    stats.pairs_processed += hstats.pairs_processed
    stats.pairs_discarded += hstats.pairs_discarded
    stats.zero_reductions += hstats.zero_reductions
    stats.max_terms_seen = max(stats.max_terms_seen, hstats.max_terms_seen)
    one = {hname: 1}
    deh = [p.substitute(one, ring) for p in hbasis]
    # the dehomogenized set is a basis already; this pass makes it reduced
    fstats = GBStats()
    out = _run(deh, ring, order, fstats, max_pairs, max_terms, strategy, max_bits)
    stats.pairs_processed += fstats.pairs_processed
    stats.zero_reductions += fstats.zero_reductions
    return out, stats


def buchberger_field(gens: Sequence[dict], ring: Ring, order: MonomialOrder, *,
                     max_pairs: int = DEFAULT_MAX_PAIRS, max_terms: int = DEFAULT_MAX_TERMS,
                     strategy: str = "normal") -> list[dict]:
    """Reduced Gröbner basis with field-element coefficients.

    Each generator is a mapping exponent tuple (in ``ring`` order) to a
    coefficient supporting ``+ - * /``, e.g. :class:`RationalFunction` in
    the parameters.  Returns monic generators in the same mapping form.
    """
    codec = _Codec(ring, order)
    backend = _FieldBackend(codec)
    stats = GBStats()
    polys = []
    for g in gens:
        d = {}
        for e, c in g.items():
            if not _is_zero(c):
                d[codec.encode(e)] = c
        polys.append(backend.load(d))
    basis = _buchberger_core(polys, backend, codec, stats, max_pairs, max_terms, strategy)
    return [backend.export(f, ring) for f in basis]


def field_normal_form(f: dict, basis: Sequence[dict], ring: Ring, order: MonomialOrder, *,
                      max_terms: int = DEFAULT_MAX_TERMS) -> dict:
    """Remainder of ``f`` modulo ``basis``; both in the mapping form of :func:`buchberger_field`.

    The remainder is not normalised, so it is zero exactly when ``f``
    reduces to zero and otherwise keeps its scale.
    """
    codec = _Codec(ring, order)
    entries = []
    for g in basis:
        d = {codec.encode(e): c for e, c in g.items() if not _is_zero(c)}
        if d:
            d = _monic_field(d)
            entries.append((max(d), None, d))
    if not entries:
        return {e: c for e, c in f.items() if not _is_zero(c)}
    rem = _reduce_field_raw({codec.encode(e): c for e, c in f.items() if not _is_zero(c)},
                            entries, codec, max_terms)
    return {codec.decode(m): c for m, c in rem.items()}


def _reduce_field_raw(f, basis, codec, max_terms):
    f = dict(f)
    heap = [-m for m in f]
    heapq.heapify(heap)
    rem: dict = {}
    while heap:
        m = -heapq.heappop(heap)
        c = f.get(m)
        if c is None:
            continue
        for lm, _, gp in basis:
            if codec.divides(lm, m):
                break
        else:
            rem[m] = f.pop(m)
            continue
        del f[m]
        q = m - lm
        for gm, gc in gp.items():
            if gm == lm:
                continue
            k = gm + q
            v = f.get(k)
            v = -(c * gc) if v is None else v - c * gc
            if _is_zero(v):
                f.pop(k, None)
            else:
                if k not in f:
                    heapq.heappush(heap, -k)
                f[k] = v
        if len(f) + len(rem) > max_terms:
            raise BudgetExceeded(f"intermediate polynomial exceeded {max_terms} terms", -1)
    return rem


def _buchberger_core(polys, backend, codec, stats, max_pairs, max_terms, strategy, degree_cap=None):
    if strategy not in ("normal", "sugar"):
        raise StructuralError(f"unknown pair strategy {strategy!r}")
    polys = [p for p in polys if p]
    if not polys:
        return []
    polys.sort(key=max)
    entries: list = []       # (lm, lc, poly) for every polynomial ever added
    sugar: list = []
    G: list[int] = []        # indices currently in the basis
    B: list = []             # heap of (selection key, i, j)
    deg = codec.degree
    lcm = codec.lcm
    divides = codec.divides
    coprime = codec.coprime

    def pair_key(i, j):
        l = lcm(entries[i][0], entries[j][0])
        if strategy == "sugar":
            s = max(sugar[i] + deg(l) - deg(entries[i][0]), sugar[j] + deg(l) - deg(entries[j][0]))
            return (s, l, i, j)
        return (deg(l), l, i, j)

    def update(h):
        nonlocal B
        mh = entries[h][0]
        C = list(G)
        D: list[int] = []
        while C:
            g = C.pop()
            mg = entries[g][0]
            lhg = lcm(mh, mg)
            if coprime(mh, mg):
                D.append(g)
                continue
            if any(divides(lcm(mh, entries[x][0]), lhg) for x in C):
                continue
            if any(divides(lcm(mh, entries[x][0]), lhg) for x in D):
                continue
            D.append(g)
        E = [g for g in D if not coprime(mh, entries[g][0])]
        stats.pairs_discarded += len(G) - len(E)
        kept = []
        for item in B:
            i, j = item[-2], item[-1]
            lij = lcm(entries[i][0], entries[j][0])
            if divides(mh, lij) and lcm(entries[i][0], mh) != lij and lcm(entries[j][0], mh) != lij:
                stats.pairs_discarded += 1
                continue
            kept.append(item)
        for g in E:
            a, b = (g, h) if g < h else (h, g)
            kept.append(pair_key(a, b))
        heapq.heapify(kept)
        B = kept
        G[:] = [g for g in G if not divides(mh, entries[g][0])] + [h]

    def add(f):
        entries.append(backend.entry(f))
        sugar.append(deg(max(f)) if not sugar else max(deg(m) for m in f))
        update(len(entries) - 1)

    for f in polys:
        r = backend.reduce(f, [entries[g] for g in G], max_terms) if G else f
        if r:
            add(r)

    while B:
        item = heapq.heappop(B)
        i, j = item[-2], item[-1]
        if degree_cap is not None and item[0] > degree_cap:
            stats.truncated = True
            break
        stats.pairs_processed += 1
        if stats.pairs_processed > max_pairs:
            raise BudgetExceeded(f"S-pair budget {max_pairs} exhausted", stats.pairs_processed - 1)
        s = backend.spoly(entries[i], entries[j])
        try:
            r = backend.reduce(s, [entries[g] for g in G], max_terms)
        except BudgetExceeded as exc:
            raise BudgetExceeded(str(exc).split(" (pairs")[0], stats.pairs_processed) from None
        stats.max_terms_seen = max(stats.max_terms_seen, len(r))
        if not r:
            stats.zero_reductions += 1
            continue
        add(r)

    # minimal then reduced basis
    lms = [(entries[g][0], g) for g in G]
    lms.sort()
    minimal = []
    for lm, g in lms:
        if not any(divides(entries[h][0], lm) for h in minimal):
            minimal.append(g)
    result = []
    for g in minimal:
        others = [entries[h] for h in minimal if h != g]
        r = backend.reduce(entries[g][2], others, max_terms) if others else entries[g][2]
        result.append(r)
    result.sort(key=max)
    return result


def is_groebner(basis: IdealBasis | Sequence[Polynomial], order: MonomialOrder | None = None) -> bool:
    """Check every S-polynomial reduces to zero (exhaustive, no criteria)."""
    gens, order = _unpack(basis, order)
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return True
    ring = _check_ring(gens)
    codec = _Codec(ring, order)
    backend = _IntegerBackend(codec)
    entries = [backend.entry(backend.load(g)) for g in gens]
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            if codec.coprime(entries[i][0], entries[j][0]):
                continue
            s = backend.spoly(entries[i], entries[j])
            if backend.reduce(s, entries, DEFAULT_MAX_TERMS):
                return False
    return True


def ideal_member(p: Polynomial, basis: IdealBasis) -> bool:
    if not isinstance(basis, IdealBasis) or not basis.is_groebner:
        raise StructuralError("ideal membership needs a basis flagged as Gröbner")
    if not basis.generators:
        return p.is_zero()
    codec = _Codec(p.ring, basis.order)
    backend = _IntegerBackend(codec)
    entries = [backend.entry(backend.load(g)) for g in basis.generators]
    return not backend.reduce(backend.load(p), entries, DEFAULT_MAX_TERMS)


def eliminate(gens: Sequence[Polynomial], keep: Iterable[str], *,
              ranking: Sequence[str] | None = None, **budget) -> IdealBasis:
    """Gröbner basis of the elimination ideal onto the ``keep`` variables.

    The block order puts every non-kept variable (in ``ranking`` or ring
    order) above the kept ones.
    """
    ring = _check_ring(gens)
    keep = list(keep)
    for k in keep:
        if k not in ring.index:
            raise UnknownVariableError(f"{k!r} not in {ring}")
    used = set()
    for g in gens:
        used.update(g.variables())
    names = list(ranking) if ranking else list(ring.names)
    drop = [n for n in names if n not in keep and n in used]
    kept = [n for n in names if n in keep] if ranking else keep
    if not drop:
        order = MonomialOrder.grevlex(*kept)
        return buchberger(gens, order, **budget)
    order = MonomialOrder.elimination(drop, kept)
    full = buchberger(gens, order, **budget)
    keep_set = set(keep)
    survivors = [g for g in full.generators if set(g.variables()) <= keep_set]
    return IdealBasis(survivors, MonomialOrder.grevlex(*kept), ring,
                      is_groebner=True, reduced=True, stats=full.stats)


def _grevlex_of_block(order: MonomialOrder) -> MonomialOrder:
    return MonomialOrder.grevlex(*order.ranking[order.split:])


# ---------------------------------------------------------------------------
# Admissible parameter sampling
# ---------------------------------------------------------------------------

PARAMETERS = ("alpha", "l0", "l1", "l2", "l3")


def degeneracy_values(pt) -> dict[str, object]:
    """Expressions whose vanishing makes a parameter point degenerate."""
    a, l0, l1, l2, l3 = (pt[k] for k in PARAMETERS)
    return {
        "alpha": a,
        "l0": l0,
        "l1": l1,
        "l2": l2,
        "l3": l3,
        "a^2*l0 + 2*l2": a * a * l0 + 2 * l2,
        "l1^2 + 2*l0*l2": l1 * l1 + 2 * l0 * l2,
        "a^2*l0^2 + l1^2 + 2*l0*l2": a * a * l0 * l0 + l1 * l1 + 2 * l0 * l2,
        "a^2*l0^2 + l1^2 + 4*l0*l2": a * a * l0 * l0 + l1 * l1 + 4 * l0 * l2,
    }


def is_admissible(pt) -> bool:
    return all(v != 0 for v in degeneracy_values(pt).values())


def sample_admissible(rng: random.Random, bound: int = 99) -> dict[str, mpq]:
    """Random rational parameter point avoiding every degeneracy locus.

    Numerators and denominators are drawn from [-bound, bound] (nonzero
    denominators, sign carried by the numerator).
    """
    while True:
        pt = {}
        for k in PARAMETERS:
            num = rng.randint(-bound, bound)
            den = rng.randint(1, bound)
            pt[k] = mpq(num, den)
        if is_admissible(pt):
            return pt
