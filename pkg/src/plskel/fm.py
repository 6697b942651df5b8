"""Fourier-Motzkin elimination over an ordered vector space of constants.

A row ``(a, c, rel)`` encodes ``sum a[i] * y[i] + value(c) REL 0`` where the
``a[i]`` are integers, ``c = (c0, c1, ..., ck)`` is an integer vector read as
``c0 + sum c_j log g_j`` and ``REL`` is one of ``EQ``, ``LE``, ``LT``.  Rows
are kept primitive (gcd 1) so duplicates collapse structurally.

Equalities are used as pivots before any inequality combination.  Strictness
propagates: a combination is strict when either parent is.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from .errors import InsufficientInfRank, ResourceCap
from .limits import bump, current
from .scalars import GenScalar, LogConst, Ordering, Registry, compare

EQ, LE, LT = 0, 1, 2
REL_NAMES = {EQ: "=", LE: "<=", LT: "<"}


def _normalize(a: tuple, c: tuple, rel: int) -> tuple:
    g = math.gcd(*a, *c)
    if g > 1:
        a = tuple(x // g for x in a)
        c = tuple(x // g for x in c)
    if rel == EQ:
        for x in a + c:
            if x:
                if x < 0:
                    a = tuple(-y for y in a)
                    c = tuple(-y for y in c)
                break
    return (a, c, rel)


def make_row(coeffs: Sequence, const: Sequence, rel: int) -> tuple:
    """Build a primitive integer row from rational coefficients and constant."""
    vals = [Fraction(x) for x in coeffs] + [Fraction(x) for x in const]
    den = math.lcm(*(v.denominator for v in vals)) if vals else 1
    ints = [int(v * den) for v in vals]
    n = len(coeffs)
    return _normalize(tuple(ints[:n]), tuple(ints[n:]), rel)


def negate_row(row) -> List[tuple]:
    """Rows whose disjunction is the negation of ``row``."""
    a, c, rel = row
    na = tuple(-x for x in a)
    nc = tuple(-x for x in c)
    if rel == LE:
        return [(na, nc, LT)]
    if rel == LT:
        return [(na, nc, LE)]
    return [(a, c, LT), (na, nc, LT)]


def _holds_trivially(c: tuple, rel: int, reg: Registry) -> bool:
    if rel == EQ:
        return not any(c)
    s = reg.sign(c)
    return s < 0 if rel == LT else s <= 0


def prune(rows: Iterable[tuple], reg: Registry) -> Optional[List[tuple]]:
    """Drop tautologies and dominated parallel rows; ``None`` if a row is false."""
    eqs = {}
    best = {}
    for row in rows:
        a, c, rel = row
        if not any(a):
            if not _holds_trivially(c, rel, reg):
                return None
            continue
        if rel == EQ:
            eqs[row] = None
            continue
        g = math.gcd(*a)
        d = tuple(x // g for x in a)
        old = best.get(d)
        if old is None:
            best[d] = (row, g)
            continue
        orow, og = old
        # row reads d.y <= -c/g; the larger c/g is the tighter bound
        s = reg.sign(tuple(og * x - g * y for x, y in zip(c, orow[1])))
        if s > 0 or (s == 0 and rel == LT and orow[2] == LE):
            best[d] = (row, g)
    return list(eqs) + [r for r, _ in best.values()]


def _substitute(row, piv, v):
    a, c, rel = row
    if a[v] == 0:
        return row
    pa, pc, _ = piv
    s = 1 if pa[v] > 0 else -1
    m1, m2 = s * pa[v], s * a[v]
    na = tuple(m1 * x - m2 * y for x, y in zip(a, pa))
    nc = tuple(m1 * x - m2 * y for x, y in zip(c, pc))
    return _normalize(na, nc, rel)


def _combine(p, n, v):
    pa, pc, pr = p
    na_, nc_, nr = n
    m1, m2 = -na_[v], pa[v]
    a = tuple(m1 * x + m2 * y for x, y in zip(pa, na_))
    c = tuple(m1 * x + m2 * y for x, y in zip(pc, nc_))
    return _normalize(a, c, max(pr, nr))


def project(rows: Iterable[tuple], elim: Iterable[int], reg: Registry,
            trace: Optional[list] = None, ordered: bool = False) -> Optional[List[tuple]]:
    """Eliminate the variables in ``elim``; ``None`` when the system is infeasible.

    If ``trace`` is a list, elimination steps are appended to it for
    :func:`solve`: ``("eq", v, pivot)`` or ``("fm", v, rows_mentioning_v)``.
    Inequality steps follow ``elim`` when ``ordered``, otherwise the cheapest
    variable goes first.
    """
    bump("fm_calls")
    cur = prune(rows, reg)
    if cur is None:
        return None
    todo = list(dict.fromkeys(elim))
    cap = current().row_cap
    while True:
        pivot = None
        for v in todo:
            pivot = next((r for r in cur if r[2] == EQ and r[0][v]), None)
            if pivot is not None:
                break
        if pivot is None:
            break
        if trace is not None:
            trace.append(("eq", v, pivot))
        todo.remove(v)
        cur = prune((_substitute(r, pivot, v) for r in cur if r is not pivot), reg)
        if cur is None:
            return None
    while todo:
        best_v, best_cost = (todo[0], 0) if ordered else (None, None)
        for v in ([] if ordered else todo):
            npos = sum(1 for r in cur if r[0][v] > 0)
            nneg = sum(1 for r in cur if r[0][v] < 0)
            cost = npos * nneg - npos - nneg
            if best_cost is None or cost < best_cost:
                best_v, best_cost = v, cost
        v = best_v
        todo.remove(v)
        pos = [r for r in cur if r[0][v] > 0]
        neg = [r for r in cur if r[0][v] < 0]
        rest = [r for r in cur if r[0][v] == 0]
        if trace is not None:
            trace.append(("fm", v, pos + neg))
        if len(pos) * len(neg) + len(rest) > cap:
            raise ResourceCap(f"elimination step would produce {len(pos) * len(neg) + len(rest)} rows")
        bump("fm_combinations", len(pos) * len(neg))
        cur = prune(rest + [_combine(p, n, v) for p in pos for n in neg], reg)
        if cur is None:
            return None
    return cur


def feasible(rows: Iterable[tuple], nvars: int, reg: Registry) -> bool:
    return project(rows, range(nvars), reg) is not None


def _value(row, v, values, reg) -> GenScalar:
    """Value of ``-(rest of row) / a_v`` at the already chosen variables."""
    a, c, _ = row
    acc = GenScalar.of(reg, LogConst.from_vector(c))
    for u, coef in enumerate(a):
        if u != v and coef:
            acc = acc + values[u] * coef
    return acc * Fraction(-1, a[v])


class _Chooser:
    """Picks a value inside a one-variable cut.

    ``standard`` mode stays in the standard part (inf = 0) and steps by one
    generator past an open end; ``type`` mode realises an open one-sided cut by
    a fresh infinitesimal axis, taken in order of use.
    """

    def __init__(self, reg: Registry, mode: str):
        self.reg = reg
        self.mode = mode
        self.next_axis = 0

    def _step(self) -> GenScalar:
        reg = self.reg
        if self.mode == "type":
            if self.next_axis >= reg.inf_rank:
                raise InsufficientInfRank(
                    f"needs infinitesimal axis {self.next_axis}, registry has {reg.inf_rank}")
            s = GenScalar.infinitesimal(reg, self.next_axis)
            self.next_axis += 1
            return s
        if reg.k:
            return GenScalar.of(reg, LogConst(0, (1,) + (0,) * (reg.k - 1)))
        return GenScalar.of(reg, LogConst(1, ()))

    def choose(self, lowers, uppers) -> GenScalar:
        reg = self.reg
        lo = hi = None
        for val, strict in lowers:
            if lo is None:
                lo = (val, strict)
                continue
            o = compare(val, lo[0])
            if o is Ordering.GT or (o is Ordering.EQ and strict):
                lo = (val, strict)
        for val, strict in uppers:
            if hi is None:
                hi = (val, strict)
                continue
            o = compare(val, hi[0])
            if o is Ordering.LT or (o is Ordering.EQ and strict):
                hi = (val, strict)
        if lo is None and hi is None:
            return GenScalar.one(reg)
        if hi is None:
            return lo[0] + self._step() if lo[1] else lo[0]
        if lo is None:
            return hi[0] - self._step() if hi[1] else hi[0]
        o = compare(lo[0], hi[0])
        if o is Ordering.EQ:
            if lo[1] or hi[1]:
                raise AssertionError("empty cut after successful elimination")
            return lo[0]
        if o is Ordering.GT:
            raise AssertionError("inverted cut after successful elimination")
        if reg.sign((hi[0].std - lo[0].std).vector) > 0:
            return GenScalar.of(reg, (lo[0].std + hi[0].std).scale(Fraction(1, 2)))
        return (lo[0] + hi[0]) * Fraction(1, 2)


def solve(rows: Iterable[tuple], nvars: int, reg: Registry,
          mode: str = "standard") -> Optional[List[GenScalar]]:
    """A point satisfying every row, or ``None`` when infeasible.

    Works by elimination followed by back-substitution; see :class:`_Chooser`
    for the value picked inside each one-variable cut.
    """
    trace: list = []
    # back-substitution runs in reverse, so type mode assigns axes in variable order
    if project(rows, range(nvars - 1, -1, -1), reg, trace, ordered=(mode == "type")) is None:
        return None
    values: list = [None] * nvars
    chooser = _Chooser(reg, mode)
    for kind, v, data in reversed(trace):
        if kind == "eq":
            values[v] = _value(data, v, values, reg)
            continue
        lowers, uppers = [], []
        for row in data:
            val = _value(row, v, values, reg)
            strict = row[2] == LT
            (uppers if row[0][v] > 0 else lowers).append((val, strict))
        values[v] = chooser.choose(lowers, uppers)
    return [x if x is not None else GenScalar.one(reg) for x in values]


def row_value(row, values: Sequence[GenScalar], reg: Registry) -> GenScalar:
    a, c, _ = row
    acc = GenScalar.of(reg, LogConst.from_vector(c))
    for coef, x in zip(a, values):
        if coef:
            acc = acc + x * coef
    return acc


def row_holds(row, values: Sequence[GenScalar], reg: Registry) -> bool:
    s = row_value(row, values, reg).sign()
    rel = row[2]
    if rel == EQ:
        return s == 0
    return s < 0 if rel == LT else s <= 0
