"""Reference procedures that share no decision code with the package.

* ``lp_nonempty``: floating-point LP (scipy/HiGHS) on the log-linear system.
* ``decide``: recursive witness search for quantified formulas, with atoms
  evaluated in mpmath (float fast path) and exact zero tests on the
  rational coefficient vectors.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy.optimize import linprog

from plskel.logic import And, Exists, FAtom, Not, Or, atoms_of, qe

AMBIGUOUS = None


class Val:
    """Oracle-side value: (c0, q_1..q_k) plus lexicographic infinitesimal vector."""
    __slots__ = ("vec", "inf")

    def __init__(self, vec, inf):
        self.vec = tuple(vec)
        self.inf = tuple(inf)

    @classmethod
    def of(cls, g):
        return cls((g.std.c0,) + tuple(g.std.coeffs), g.inf)

    def __add__(self, o):
        return Val([a + b for a, b in zip(self.vec, o.vec)], [a + b for a, b in zip(self.inf, o.inf)])

    def __sub__(self, o):
        return Val([a - b for a, b in zip(self.vec, o.vec)], [a - b for a, b in zip(self.inf, o.inf)])

    def scale(self, q):
        return Val([a * q for a in self.vec], [a * q for a in self.inf])

    def key(self):
        return self.vec, self.inf


@lru_cache(maxsize=None)
def _logs(gens):
    with mpmath.workdps(60):
        return tuple(mpmath.log(mpmath.mpf(g.numerator) / g.denominator) for g in gens)


def std_sign(vec, gens) -> int:
    if not any(vec):
        return 0
    fl = float(vec[0]) + sum(float(q) * math.log(g) for q, g in zip(vec[1:], gens))
    mag = abs(float(vec[0])) + sum(abs(float(q) * math.log(g)) for q, g in zip(vec[1:], gens))
    if abs(fl) > 1e-9 * (1 + mag):
        return 1 if fl > 0 else -1
    with mpmath.workdps(60):
        s = mpmath.mpf(vec[0].numerator) / vec[0].denominator
        for q, lg in zip(vec[1:], _logs(gens)):
            s += (mpmath.mpf(q.numerator) / q.denominator) * lg
        if abs(s) < mpmath.mpf(10) ** -45:
            raise AssertionError("oracle cannot separate a value from zero")
        return 1 if s > 0 else -1


def val_sign(v: Val, gens) -> int:
    s = std_sign(v.vec, gens)
    if s:
        return s
    for e in v.inf:
        if e:
            return 1 if e > 0 else -1
    return 0


def val_cmp(a: Val, b: Val, gens) -> int:
    return val_sign(a - b, gens)


HOLDS = {"<": lambda s: s < 0, "<=": lambda s: s <= 0, "=": lambda s: s == 0,
         ">=": lambda s: s >= 0, ">": lambda s: s > 0}


def form_value(form, sigma, k, m) -> Val:
    acc = Val((Fraction(0),) + tuple(form.const.exps), (Fraction(0),) * m)
    for i, e in enumerate(form.exps):
        if e:
            acc = acc + sigma[i].scale(e)
    return acc


# ---------------------------------------------------------------------------
# LP emptiness

def lp_nonempty(cell, gens):
    """True/False, or AMBIGUOUS when the LP margin is within tolerance."""
    n = cell.n
    logs = [math.log(g) for g in gens]
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    strict = False
    for a in cell.atoms:
        e = [float(x) for x in a.form.exps]
        c = sum(float(q) * lg for q, lg in zip(a.form.const.exps, logs))
        rel = a.rel
        if rel in (">", ">="):
            e, c = [-x for x in e], -c
        if rel == "=":
            A_eq.append(e + [0.0])
            b_eq.append(-c)
            continue
        strict |= rel in ("<", ">")
        A_ub.append(e + [1.0])
        b_ub.append(-c)
    bounds = [(None, None)] * n + [(None, 1.0)]
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    res = linprog(cost, A_ub=np.array(A_ub) if A_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(A_eq) if A_eq else None, b_eq=b_eq or None,
                  bounds=bounds, method="highs")
    if res.status == 2:
        return False
    if res.status != 0:
        return AMBIGUOUS
    t = -res.fun
    if abs(t) < 1e-7:
        return AMBIGUOUS
    return t > 0 if strict else t > -1e-7


# ---------------------------------------------------------------------------
# Witness-search oracle for formulas

class Oracle:
    """Recursive decision by candidate enumeration.

    For ``exists y. B`` the truth of ``B`` in ``y`` is constant on the pieces
    cut out by the roots of the atoms of ``qe(B)`` and of ``B`` itself, so the
    roots, midpoints of consecutive roots and one point beyond each end are
    enough.  With ``nudge_axis`` set, the points ``root +/- eps`` on that
    infinitesimal axis are tried as well.
    """

    def __init__(self, reg, nudge_axis=None):
        self.reg = reg
        self.gens = tuple(Fraction(g) for g in reg.generators)
        self.k, self.m = reg.k, reg.inf_rank
        self.nudge_axis = nudge_axis
        self._atoms = {}

    def _cut_atoms(self, body):
        key = id(body)
        if key not in self._atoms:
            found = {(a.form, a.rel) for a in atoms_of(body)}
            if not isinstance(body, FAtom):
                found |= {(a.form, a.rel) for a in atoms_of(qe(body, self.reg))}
            self._atoms[key] = ([f for f, _ in found], body)
        return self._atoms[key][0]

    def candidates(self, body, v, sigma):
        roots = {}
        for form in self._cut_atoms(body):
            ev = form.exps[v] if v < len(form.exps) else 0
            if not ev:
                continue
            if any(e and i != v and sigma[i] is None for i, e in enumerate(form.exps)):
                continue
            rest = Val((Fraction(0),) + tuple(form.const.exps), (Fraction(0),) * self.m)
            for i, e in enumerate(form.exps):
                if e and i != v:
                    rest = rest + sigma[i].scale(e)
            r = rest.scale(Fraction(-1) / ev)
            roots[r.key()] = r
        zero = Val((Fraction(0),) * (self.k + 1), (Fraction(0),) * self.m)
        if not roots:
            return [zero]
        pts = sorted(roots.values(), key=_cmp_key(self.gens))
        one = Val((Fraction(1),) + (Fraction(0),) * self.k, (Fraction(0),) * self.m)
        out = [pts[0] - one]
        for a, b in zip(pts, pts[1:]):
            out += [a, (a + b).scale(Fraction(1, 2))]
        out += [pts[-1], pts[-1] + one]
        if self.nudge_axis is not None:
            eps = Val((Fraction(0),) * (self.k + 1),
                      [Fraction(int(i == self.nudge_axis)) for i in range(self.m)])
            for p in pts:
                out += [p - eps, p + eps]
        return out

    def decide(self, f, sigma) -> bool:
        if isinstance(f, FAtom):
            return HOLDS[f.rel](val_sign(form_value(f.form, sigma, self.k, self.m), self.gens))
        if isinstance(f, And):
            return all(self.decide(a, sigma) for a in f.args)
        if isinstance(f, Or):
            return any(self.decide(a, sigma) for a in f.args)
        if isinstance(f, Not):
            return not self.decide(f.arg, sigma)
        want = isinstance(f, Exists)
        for c in self.candidates(f.body, f.var, sigma):
            s = list(sigma)
            s[f.var] = c
            if self.decide(f.body, s) == want:
                return want
        return not want

    def decide_at(self, f, width, point) -> bool:
        sigma = [Val.of(g) for g in point] + [None] * (width - len(point))
        return self.decide(f, sigma)


def _cmp_key(gens):
    from functools import cmp_to_key
    return cmp_to_key(lambda a, b: val_cmp(a, b, gens))
