"""Exact ordered scalars.

Everything here works on the *log scale*: a positive real ``x`` is stored as
``log x``.  A multiplicative constant ``a = prod g_j ** q_j`` of the parameter
group becomes the vector ``(q_1, ..., q_k)`` (:class:`ParamExp`), and a
general element of the ordered vector space ``V`` is ``c0 + sum q_j log g_j``
(:class:`LogConst`).  Since the generators are multiplicatively independent
rationals, ``1, log g_1, ..., log g_k`` are linearly independent over the
rationals, so equality is componentwise and a nonzero vector has a sign that
interval arithmetic eventually certifies.

:class:`GenScalar` adds a finite lexicographic tail of infinitesimal
exponents.  Axis 0 is the coarsest infinitesimal; ``inf = (1, 0, ...)`` means
"just above the standard part".
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional, Sequence

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp.libmpf import to_rational

from . import _linalg
from .errors import (DependentGenerators, NonPrimeValuation, NotInDelta,
                     RegistryMismatch, ResourceCap, ValidationError)
from .limits import bump

START_PREC = 64
MAX_PREC = 16384


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Ordering(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


_TRIAL_LIMIT = 10_000


def _factor(n: int) -> dict:
    """Prime factorization; trial division first, sympy for a large cofactor."""
    out: dict = {}
    d = 2
    while n > 1 and d <= _TRIAL_LIMIT and d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        if n < _TRIAL_LIMIT ** 2:
            out[n] = out.get(n, 0) + 1
        else:
            from sympy import factorint
            for p, e in factorint(n).items():
                out[p] = out.get(p, 0) + e
    return out


@dataclass(frozen=True)
class Registry:
    """Generators of the parameter group, infinitesimal rank, coefficient valuation.

    ``p`` is ``None`` for the trivial coefficient valuation, otherwise the
    prime of the p-adic one.  Build instances with :func:`registry`, which
    validates.
    """
    generators: tuple = ()
    inf_rank: int = 0
    p: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(_q(g) for g in self.generators))
        object.__setattr__(self, "inf_rank", int(self.inf_rank))

    @property
    def k(self) -> int:
        return len(self.generators)

    @cached_property
    def primes(self) -> tuple:
        ps = set()
        for g in self.generators:
            ps.update(_factor(g.numerator))
            ps.update(_factor(g.denominator))
        return tuple(sorted(ps))

    @cached_property
    def prime_matrix(self) -> list:
        """Row j: exponents of generator j over :attr:`primes`."""
        rows = []
        for g in self.generators:
            num, den = _factor(g.numerator), _factor(g.denominator)
            rows.append([num.get(p, 0) - den.get(p, 0) for p in self.primes])
        return rows

    @cached_property
    def _flogs(self) -> tuple:
        return tuple(math.log(g.numerator) - math.log(g.denominator)
                     for g in self.generators)

    def with_inf_rank(self, m: int) -> "Registry":
        return Registry(self.generators, m, self.p)

    def sign(self, vec: Sequence) -> int:
        """Sign of ``vec[0] + sum vec[j+1] * log(g_j)``."""
        nz = [i for i, x in enumerate(vec) if x]
        if not nz:
            return 0
        if len(nz) == 1:
            return 1 if vec[nz[0]] > 0 else -1
        try:
            terms = [float(vec[0])]
            terms.extend(float(q) * L for q, L in zip(vec[1:], self._flogs))
        except OverflowError:
            pass
        else:
            val = math.fsum(terms)
            mag = math.fsum(abs(t) for t in terms)
            if abs(val) > mag * 2.0 ** -40:
                return 1 if val > 0 else -1
        return self._interval_sign(vec)

    def _interval_sign(self, vec) -> int:
        prec = START_PREC
        while prec <= MAX_PREC:
            bump("interval_sign")
            lo, hi = self._enclose(vec, prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2
        raise ResourceCap("sign undecided at %d bits" % MAX_PREC)

    def _enclose(self, vec, prec):
        ctx = MPIntervalContext()
        ctx.prec = prec
        c0 = _q(vec[0])
        acc = ctx.mpf(c0.numerator) / c0.denominator
        for q, g in zip(vec[1:], self.generators):
            if q:
                q = _q(q)
                lg = ctx.log(ctx.mpf(g.numerator) / g.denominator)
                acc += (ctx.mpf(q.numerator) / q.denominator) * lg
        lo, hi = acc._mpi_
        lo = Fraction(*map(int, to_rational(lo)))
        hi = Fraction(*map(int, to_rational(hi)))
        return lo, hi

    def enclose(self, vec, prec=START_PREC):
        """Rational interval ``(lo, hi)`` containing the real value of ``vec``."""
        return self._enclose(vec, prec)


def validate_registry(reg: Registry) -> Registry:
    """Check generator independence and the coefficient valuation.

    Raises :class:`DependentGenerators` naming a minimal dependent subset found
    while scanning generators in order.
    """
    for g in reg.generators:
        if g <= 1:
            raise ValidationError(f"generator {g} is not > 1")
    if reg.inf_rank < 0:
        raise ValidationError("negative inf-rank")
    rows = reg.prime_matrix
    for j in range(len(rows)):
        coeffs = _linalg.dependency(rows[:j], rows[j])
        if coeffs is not None:
            subset = [reg.generators[i] for i, c in enumerate(coeffs) if c]
            subset.append(reg.generators[j])
            raise DependentGenerators(subset)
    if reg.p is not None:
        p = reg.p
        if p < 2 or _factor(p) != {p: 1} or Fraction(p) not in reg.generators:
            raise NonPrimeValuation(f"p-adic valuation at {p} needs a prime generator {p}")
    return reg


def registry(generators=(), inf_rank=0, p=None) -> Registry:
    return validate_registry(Registry(tuple(generators), inf_rank, p))


@dataclass(frozen=True)
class ParamExp:
    """``prod g_j ** exps[j]``, an element of the divisible hull of the parameter group."""
    exps: tuple

    def __post_init__(self):
        object.__setattr__(self, "exps", tuple(_q(e) for e in self.exps))

    @classmethod
    def one(cls, k: int) -> "ParamExp":
        return cls((Fraction(0),) * k)

    def is_one(self) -> bool:
        return not any(self.exps)

    def __mul__(self, other: "ParamExp") -> "ParamExp":
        return ParamExp(tuple(a + b for a, b in zip(self.exps, other.exps)))

    def __truediv__(self, other: "ParamExp") -> "ParamExp":
        return ParamExp(tuple(a - b for a, b in zip(self.exps, other.exps)))

    def __pow__(self, q) -> "ParamExp":
        q = _q(q)
        return ParamExp(tuple(a * q for a in self.exps))

    def inverse(self) -> "ParamExp":
        return ParamExp(tuple(-a for a in self.exps))


@dataclass(frozen=True)
class LogConst:
    """``c0 + sum coeffs[j] * log g_j``."""
    c0: Fraction
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "c0", _q(self.c0))
        object.__setattr__(self, "coeffs", tuple(_q(c) for c in self.coeffs))

    @classmethod
    def zero(cls, k: int) -> "LogConst":
        return cls(Fraction(0), (Fraction(0),) * k)

    @classmethod
    def from_param(cls, a: ParamExp) -> "LogConst":
        return cls(Fraction(0), a.exps)

    @classmethod
    def from_vector(cls, vec) -> "LogConst":
        return cls(vec[0], tuple(vec[1:]))

    @property
    def vector(self) -> tuple:
        return (self.c0,) + self.coeffs

    def is_zero(self) -> bool:
        return not self.c0 and not any(self.coeffs)

    def in_delta(self) -> bool:
        """True when the constant is ``log`` of an element of the parameter group."""
        return not self.c0

    def to_param(self) -> ParamExp:
        if self.c0:
            raise NotInDelta("constant has a nonzero rational offset")
        return ParamExp(self.coeffs)

    def __add__(self, o: "LogConst") -> "LogConst":
        return LogConst(self.c0 + o.c0, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o: "LogConst") -> "LogConst":
        return LogConst(self.c0 - o.c0, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self) -> "LogConst":
        return LogConst(-self.c0, tuple(-a for a in self.coeffs))

    def scale(self, q) -> "LogConst":
        q = _q(q)
        return LogConst(self.c0 * q, tuple(a * q for a in self.coeffs))


@dataclass(frozen=True)
class GenScalar:
    """Standard part (log scale) plus lexicographic infinitesimal exponents.

    Arithmetic is written additively: ``a + b`` is the product of the two
    positive quantities and ``a * q`` the rational power ``a ** q``.
    """
    reg: Registry = field(repr=False)
    std: LogConst
    inf: tuple

    def __post_init__(self):
        object.__setattr__(self, "inf", tuple(_q(e) for e in self.inf))
        if len(self.inf) != self.reg.inf_rank:
            raise RegistryMismatch(
                f"infinitesimal vector of length {len(self.inf)}, registry has rank {self.reg.inf_rank}")
        if len(self.std.coeffs) != self.reg.k:
            raise RegistryMismatch("standard part does not match the generator count")

    @classmethod
    def of(cls, reg: Registry, std=None, inf=None) -> "GenScalar":
        if std is None:
            std = LogConst.zero(reg.k)
        elif isinstance(std, ParamExp):
            std = LogConst.from_param(std)
        if inf is None:
            inf = (Fraction(0),) * reg.inf_rank
        return cls(reg, std, tuple(inf))

    @classmethod
    def one(cls, reg: Registry) -> "GenScalar":
        return cls.of(reg)

    @classmethod
    def of_rational(cls, reg: Registry, q) -> "GenScalar":
        return cls.of(reg, from_rational(reg, q))

    @classmethod
    def infinitesimal(cls, reg: Registry, axis: int, e=1) -> "GenScalar":
        if not 0 <= axis < reg.inf_rank:
            raise RegistryMismatch(f"no infinitesimal axis {axis}")
        inf = [Fraction(0)] * reg.inf_rank
        inf[axis] = _q(e)
        return cls.of(reg, None, inf)

    def is_standard(self) -> bool:
        return not any(self.inf)

    def _check(self, o: "GenScalar"):
        if o.reg is not self.reg and o.reg != self.reg:
            raise RegistryMismatch("scalars from different registries")

    def __add__(self, o: "GenScalar") -> "GenScalar":
        self._check(o)
        return GenScalar(self.reg, self.std + o.std, tuple(a + b for a, b in zip(self.inf, o.inf)))

    def __sub__(self, o: "GenScalar") -> "GenScalar":
        self._check(o)
        return GenScalar(self.reg, self.std - o.std, tuple(a - b for a, b in zip(self.inf, o.inf)))

    def __neg__(self) -> "GenScalar":
        return GenScalar(self.reg, -self.std, tuple(-a for a in self.inf))

    def __mul__(self, q) -> "GenScalar":
        q = _q(q)
        return GenScalar(self.reg, self.std.scale(q), tuple(a * q for a in self.inf))

    __rmul__ = __mul__

    def __truediv__(self, q) -> "GenScalar":
        return self * (1 / _q(q))

    def sign(self) -> int:
        s = self.reg.sign(self.std.vector)
        if s:
            return s
        for e in self.inf:
            if e:
                return 1 if e > 0 else -1
        return 0

    def __lt__(self, o):
        return compare(self, o) is Ordering.LT

    def __le__(self, o):
        return compare(self, o) is not Ordering.GT

    def __gt__(self, o):
        return compare(self, o) is Ordering.GT

    def __ge__(self, o):
        return compare(self, o) is not Ordering.LT


def compare(a: GenScalar, b: GenScalar) -> Ordering:
    a._check(b)
    if a.std == b.std:
        for x, y in zip(a.inf, b.inf):
            if x != y:
                return Ordering.LT if x < y else Ordering.GT
        return Ordering.EQ
    return Ordering(a.reg.sign((a.std - b.std).vector))


def sharp(x: GenScalar) -> LogConst:
    return x.std


def flat(x: GenScalar) -> tuple:
    return x.inf


def from_sharp_flat(reg: Registry, std: LogConst, inf) -> GenScalar:
    return GenScalar(reg, std, tuple(inf))


@lru_cache(maxsize=4096)
def _from_rational(reg: Registry, q: Fraction) -> ParamExp:
    if q <= 0:
        raise NotInDelta(f"{q} is not positive")
    num, den = _factor(q.numerator), _factor(q.denominator)
    if any(p not in reg.primes for p in list(num) + list(den)):
        raise NotInDelta(f"{q} involves a prime outside the generators")
    target = [num.get(p, 0) - den.get(p, 0) for p in reg.primes]
    coeffs = _linalg.dependency(reg.prime_matrix, target)
    if coeffs is None:
        raise NotInDelta(f"{q} is not in the divisible hull of the generators")
    return ParamExp(tuple(coeffs))


def from_rational(reg: Registry, q) -> ParamExp:
    """Exponent vector of a positive rational lying in the parameter group."""
    return _from_rational(reg, _q(q))


def _simplest_between(lo: Fraction, hi: Optional[Fraction]) -> Fraction:
    """A rational with small denominator strictly inside ``(lo, hi)``."""
    if lo < 0 and (hi is None or hi > 0):
        return Fraction(0)
    if hi is not None and hi <= 0:
        return -_simplest_between(-hi, -lo)
    m = math.floor(lo)
    if hi is None or m + 1 < hi:
        return Fraction(m + 1)
    y = _simplest_between(1 / (hi - m), None if lo == m else 1 / (lo - m))
    return m + 1 / y


def between(a: GenScalar, b: GenScalar) -> ParamExp:
    """An element ``s`` of the parameter group with ``a < s < b``.

    Needs ``sharp(a) < sharp(b)`` (always the case when ``a < b`` and the
    infinitesimal parts agree) and at least one generator.
    """
    a._check(b)
    reg = a.reg
    if reg.k == 0:
        raise ValidationError("density needs at least one generator")
    if reg.sign((b.std - a.std).vector) <= 0:
        raise ValueError("standard parts are not strictly ordered")
    prec = START_PREC
    while prec <= MAX_PREC:
        ctx = MPIntervalContext()
        ctx.prec = prec
        g = reg.generators[0]
        L = ctx.log(ctx.mpf(g.numerator) / g.denominator)

        def ratio(v: LogConst):
            acc = ctx.mpf(v.c0.numerator) / v.c0.denominator
            for q, gj in zip(v.coeffs, reg.generators):
                if q:
                    acc += (ctx.mpf(q.numerator) / q.denominator) * ctx.log(ctx.mpf(gj.numerator) / gj.denominator)
            lo, hi = (acc / L)._mpi_
            return tuple(Fraction(*map(int, to_rational(e))) for e in (lo, hi))

        _, ahi = ratio(a.std)
        blo, _ = ratio(b.std)
        if ahi < blo:
            q = _simplest_between(ahi, blo)
            s = ParamExp((q,) + (Fraction(0),) * (reg.k - 1))
            sg = GenScalar.of(reg, s)
            assert compare(a, sg) is Ordering.LT and compare(sg, b) is Ordering.LT
            return s
        prec *= 2
    raise ResourceCap("density witness not separated")


def bounds(x: GenScalar) -> tuple:
    """Parameter-group elements ``(l, u)`` with ``l <= x <= u``."""
    reg = x.reg
    if x.is_standard() and x.std.in_delta():
        p = x.std.to_param()
        return p, p
    if reg.k == 0:
        raise ValidationError("no generator to bound a non-parameter scalar")
    unit = LogConst.from_param(ParamExp((Fraction(1),) + (Fraction(0),) * (reg.k - 1)))
    s = GenScalar.of(reg, x.std)
    lo = between(GenScalar.of(reg, x.std - unit), s)
    hi = between(s, GenScalar.of(reg, x.std + unit))
    return lo, hi
