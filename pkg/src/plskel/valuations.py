"""Gauss valuations on Laurent polynomials with rational coefficients.

Values live on the log scale like every other :class:`GenScalar`, so the
Gauss norm ``max |a_I| r^I`` becomes ``max(log|a_I| + <I, log r>)``.  The zero
polynomial evaluates to :data:`ZERO`, which sits below every scalar and
absorbs products.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from . import _linalg
from .errors import DimensionMismatch, ValidationError, ZeroComponent
from .scalars import GenScalar, LogConst, Ordering, ParamExp, Registry, compare, from_rational


class _Zero:
    """Value of the zero polynomial."""
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ZERO"

    def __reduce__(self):
        return (_Zero, ())


ZERO = _Zero()


def value_cmp(a, b) -> Ordering:
    if a is ZERO or b is ZERO:
        if a is b:
            return Ordering.EQ
        return Ordering.LT if a is ZERO else Ordering.GT
    return compare(a, b)


def value_mul(a, b):
    if a is ZERO or b is ZERO:
        return ZERO
    return a + b


def value_max(values: Iterable):
    best = ZERO
    for v in values:
        if value_cmp(v, best) is Ordering.GT:
            best = v
    return best


def value_eq(a, b) -> bool:
    return value_cmp(a, b) is Ordering.EQ


class LaurentPoly:
    """Finitely supported map from integer exponent vectors to nonzero rationals."""
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Dict[tuple, Fraction]] = None):
        self.n = n
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise DimensionMismatch(f"exponent {e} in a polynomial of {n} variables")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean

    @classmethod
    def const(cls, n: int, c) -> "LaurentPoly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n: int, i: int) -> "LaurentPoly":
        return cls(n, {tuple(int(j == i) for j in range(n)): 1})

    @classmethod
    def monomial(cls, exps, c=1) -> "LaurentPoly":
        exps = tuple(exps)
        return cls(len(exps), {exps: c})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, o):
        if o.n != self.n:
            raise DimensionMismatch(f"polynomials in {self.n} and {o.n} variables")

    def __add__(self, o: "LaurentPoly") -> "LaurentPoly":
        self._check(o)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return LaurentPoly(self.n, t)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, o: "LaurentPoly") -> "LaurentPoly":
        return self + (-o)

    def __mul__(self, o) -> "LaurentPoly":
        if not isinstance(o, LaurentPoly):
            return LaurentPoly(self.n, {e: c * Fraction(o) for e, c in self.terms.items()})
        self._check(o)
        t: Dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return LaurentPoly(self.n, t)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if len(self.terms) != 1:
                raise ValidationError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentPoly(self.n, {tuple(x * k for x in e): Fraction(1) / c ** -k})
        out = LaurentPoly.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        return isinstance(o, LaurentPoly) and self.n == o.n and self.terms == o.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*T^{list(e)}" for e, c in sorted(self.terms.items()))

    def substitute(self, fs: Sequence["LaurentPoly"]) -> "LaurentPoly":
        """``self(fs[0], ..., fs[m-1])`` as a polynomial in the variables of ``fs``."""
        if len(fs) != self.n:
            raise DimensionMismatch(f"{len(fs)} polynomials substituted into {self.n} variables")
        m = fs[0].n if fs else 0
        out = LaurentPoly(m)
        for e, c in self.terms.items():
            term = LaurentPoly.const(m, c)
            for f, k in zip(fs, e):
                if k:
                    term = term * f ** k
            out = out + term
        return out


def coeff_abs(reg: Registry, a: Fraction) -> ParamExp:
    """``|a|`` in the parameter group, for the registry's coefficient valuation."""
    a = Fraction(a)
    if not a:
        raise ValueError("absolute value of 0 is not in the group")
    if reg.p is None:
        return ParamExp.one(reg.k)
    p, v = reg.p, 0
    num, den = abs(a.numerator), a.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return from_rational(reg, p) ** -v


@dataclass(frozen=True)
class GaussPoint:
    r: tuple

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(self.r))
        if len({x.reg for x in self.r}) > 1:
            raise ValidationError("Gauss point coordinates use different registries")

    @property
    def n(self) -> int:
        return len(self.r)

    @property
    def reg(self) -> Registry:
        return self.r[0].reg

    def is_standard(self) -> bool:
        return all(x.is_standard() for x in self.r)

    @classmethod
    def standard(cls, reg: Registry, values) -> "GaussPoint":
        return cls(tuple(GenScalar.of_rational(reg, v) for v in values))


def gauss_eval(f: LaurentPoly, x: GaussPoint, reg: Optional[Registry] = None):
    """``max |a_I| r^I`` over the terms of ``f``, or :data:`ZERO` for ``f = 0``."""
    if f.n != x.n:
        raise DimensionMismatch(f"polynomial in {f.n} variables at a point of dimension {x.n}")
    reg = reg or (x.reg if x.n else None)
    if not f.terms:
        return ZERO
    if reg is None:
        raise ValidationError("constant at a zero-dimensional point needs a registry")
    # Work on integer vectors (c0, q_1..q_k, inf...) scaled by a common denominator.
    k1, m = reg.k + 1, reg.inf_rank
    cols = [r.std.vector + r.inf for r in x.r]
    terms = [(e, (Fraction(0),) + coeff_abs(reg, c).exps) for e, c in f.terms.items()]
    den = math.lcm(1, *(v.denominator for vec in cols for v in vec),
                   *(v.denominator for _, cv in terms for v in cv))
    icols = [[int(v * den) for v in vec] for vec in cols]
    best = None
    for e, cv in terms:
        acc = [int(v * den) for v in cv] + [0] * m
        for k, col in zip(e, icols):
            if k:
                acc = [a + k * b for a, b in zip(acc, col)]
        if best is None or _int_sign(reg, [a - b for a, b in zip(acc, best)], k1) > 0:
            best = acc
    return GenScalar(reg, LogConst(Fraction(best[0], den), tuple(Fraction(b, den) for b in best[1:k1])),
                     tuple(Fraction(b, den) for b in best[k1:]))


def _int_sign(reg: Registry, d, k1) -> int:
    s = reg.sign(d[:k1])
    if s:
        return s
    for v in d[k1:]:
        if v:
            return 1 if v > 0 else -1
    return 0


def gauss_sharp(x: GaussPoint) -> GaussPoint:
    """Coordinatewise standard part."""
    return GaussPoint(tuple(GenScalar.of(r.reg, r.std) for r in x.r))


def sharp_value(v):
    return v if v is ZERO else GenScalar.of(v.reg, v.std)


def max_formula(P: LaurentPoly, values: Sequence, reg: Registry):
    """``max_J |c_J| prod values_j ** J_j`` for a probe ``P``."""
    best = ZERO
    for e, c in P.terms.items():
        v = GenScalar.of(reg, coeff_abs(reg, c))
        for k, val in zip(e, values):
            if k:
                v = value_mul(v, val * k if val is not ZERO else ZERO)
        best = value_max([best, v])
    return best


def abhyankar_check(fs: Sequence[LaurentPoly], x: GaussPoint, probes: Sequence[LaurentPoly]) -> bool:
    """Whether ``|P(fs)|(x) = max |c_J| |fs|(x)^J`` for every probe ``P``."""
    vals = []
    for j, f in enumerate(fs):
        v = gauss_eval(f, x)
        if v is ZERO:
            raise ZeroComponent(f"component {j} vanishes at the point")
        vals.append(v)
    reg = x.reg
    for P in probes:
        if P.n != len(fs):
            raise DimensionMismatch(f"probe in {P.n} variables for {len(fs)} functions")
        if not value_eq(gauss_eval(P.substitute(fs), x), max_formula(P, vals, reg)):
            return False
    return True


def composed_evaluator(fs: Sequence[LaurentPoly], x: GaussPoint) -> Callable:
    """``P -> |P(fs)|(x)``, a valuation-like map on polynomials in ``len(fs)`` variables."""
    return lambda P: gauss_eval(P.substitute(fs), x)


def in_standard_skeleton(x, probes: Sequence[LaurentPoly], evaluator: Optional[Callable] = None,
                         reg: Optional[Registry] = None) -> bool:
    """Whether an evaluator satisfies the Gauss max formula on every probe.

    With ``evaluator`` omitted it is ``gauss_eval(., x)``; the coordinate values
    are read from the evaluator on the variables.
    """
    if evaluator is None:
        evaluator = lambda P: gauss_eval(P, x)  # noqa: E731
    if not probes:
        return True
    n = probes[0].n
    reg = reg or x.reg
    vals = [evaluator(LaurentPoly.var(n, i)) for i in range(n)]
    return all(value_eq(evaluator(P), max_formula(P, vals, reg)) for P in probes)


def pushforward_monomial(M: Sequence[Sequence[int]], consts: Sequence[ParamExp], x: GaussPoint) -> GaussPoint:
    """Gauss point with coordinates ``consts_i * prod r_j ** M[i][j]``."""
    if len(consts) != len(M):
        raise DimensionMismatch("one constant per matrix row")
    reg = x.reg
    out = []
    for row, c in zip(M, consts):
        if len(row) != x.n:
            raise DimensionMismatch(f"matrix row of length {len(row)} for a point of dimension {x.n}")
        v = GenScalar.of(reg, c)
        for m, r in zip(row, x.r):
            if m:
                v = v + r * m
        out.append(v)
    return GaussPoint(tuple(out))


def pullback_inverse(M, consts, y: GaussPoint) -> GaussPoint:
    """Inverse of :func:`pushforward_monomial` for square invertible ``M``."""
    inv = _linalg.inverse([[Fraction(v) for v in row] for row in M])
    reg = y.reg
    shifted = [r - GenScalar.of(reg, c) for r, c in zip(y.r, consts)]
    out = []
    for row in inv:
        v = GenScalar.of(reg)
        for m, s in zip(row, shifted):
            if m:
                v = v + s * m
        out.append(v)
    return GaussPoint(tuple(out))


def rank_mod_delta(values: Sequence) -> int:
    """Rational rank of the classes of ``values`` modulo the parameter group.

    The log of a parameter is a combination of ``log g_j`` with no rational
    offset and no infinitesimal part, so the class of a value is its pair
    (rational offset, infinitesimal vector).
    """
    rows = [[v.std.c0, *v.inf] for v in values if v is not ZERO]
    return _linalg.rank(rows) if rows else 0


def default_probes(m: int, degree: int = 2, reg: Optional[Registry] = None) -> List[LaurentPoly]:
    """Finite probe set in ``m`` variables.

    All monomials of total degree at most ``degree``, their pairwise differences
    and sums, and the sum of all of them; with a p-adic registry also each
    monomial plus ``p`` times another.
    """
    monos = [e for d in range(degree + 1)
             for e in itertools.product(range(d + 1), repeat=m) if sum(e) == d]
    monos = list(dict.fromkeys(monos))
    polys = [LaurentPoly(m, {e: 1}) for e in monos]
    for a, b in itertools.combinations(monos, 2):
        polys.append(LaurentPoly(m, {a: 1, b: -1}))
        polys.append(LaurentPoly(m, {a: 1, b: 1}))
        if reg is not None and reg.p is not None:
            polys.append(LaurentPoly(m, {a: 1, b: reg.p}))
    polys.append(LaurentPoly(m, {e: 1 for e in monos}))
    return polys
