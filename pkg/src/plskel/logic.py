"""First-order formulas over the positive orthant with parameter constants.

Variables are positional: an atom's form has one exponent per variable of the
context, and quantifiers bind a variable index.  By convention the free
variables come first.  Quantifier elimination is Fourier-Motzkin on the log
scale, innermost quantifier first, over a DNF of constraint rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import fm
from .errors import (DimensionMismatch, EmptyDefinable, NotQuantifierFree, ResourceCap,
                     RegistryMismatch)
from .limits import bump, current
from .polytopes import AffineForm, Atom, Cell, Definable, atom_from_row, member
from .scalars import GenScalar, Registry


@dataclass(frozen=True)
class FAtom:
    form: AffineForm
    rel: str

    @property
    def atom(self) -> Atom:
        return Atom(self.form, self.rel)

    @property
    def width(self) -> int:
        return self.form.n


@dataclass(frozen=True)
class And:
    args: tuple = ()


@dataclass(frozen=True)
class Or:
    args: tuple = ()


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class Exists:
    var: int
    body: object


@dataclass(frozen=True)
class Forall:
    var: int
    body: object


TRUE = And(())
FALSE = Or(())


def conj(*args) -> And:
    return And(tuple(args))


def disj(*args) -> Or:
    return Or(tuple(args))


@dataclass(frozen=True)
class GenPoint:
    """A tuple of generalized coordinates sharing one registry."""
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        regs = {c.reg for c in self.coords}
        if len(regs) > 1:
            raise RegistryMismatch("point coordinates use different registries")

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    @property
    def reg(self) -> Registry:
        return self.coords[0].reg

    @classmethod
    def standard(cls, reg: Registry, values) -> "GenPoint":
        return cls(tuple(GenScalar.of_rational(reg, v) for v in values))


# ---------------------------------------------------------------------------
# Structure

def is_quantifier_free(f) -> bool:
    if isinstance(f, FAtom):
        return True
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    return False


def atoms_of(f) -> List[FAtom]:
    if isinstance(f, FAtom):
        return [f]
    if isinstance(f, (And, Or)):
        return [a for g in f.args for a in atoms_of(g)]
    if isinstance(f, Not):
        return atoms_of(f.arg)
    return atoms_of(f.body)


def width(f) -> Optional[int]:
    """Context size read off the atoms (``None`` for a formula without atoms)."""
    ws = {a.width for a in atoms_of(f)}
    if len(ws) > 1:
        raise DimensionMismatch(f"atoms with different variable contexts: {sorted(ws)}")
    return ws.pop() if ws else None


def bound_vars(f) -> List[int]:
    if isinstance(f, (Exists, Forall)):
        return [f.var] + bound_vars(f.body)
    if isinstance(f, (And, Or)):
        return [v for g in f.args for v in bound_vars(g)]
    if isinstance(f, Not):
        return bound_vars(f.arg)
    return []


def free_vars(f) -> List[int]:
    """Indices of variables with a free occurrence, in increasing order."""
    out = set()

    def walk(g, bound):
        if isinstance(g, FAtom):
            out.update(i for i, e in enumerate(g.form.exps) if e and i not in bound)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                walk(a, bound)
        elif isinstance(g, Not):
            walk(g.arg, bound)
        else:
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return sorted(out)


def quantifier_blocks(f) -> int:
    """Number of alternating quantifier blocks along the deepest path."""
    def walk(g, last):
        if isinstance(g, FAtom):
            return 0
        if isinstance(g, (And, Or)):
            return max((walk(a, last) for a in g.args), default=0)
        if isinstance(g, Not):
            return walk(g.arg, None)
        kind = type(g)
        return walk(g.body, kind) + (kind is not last)
    return walk(f, None)


# ---------------------------------------------------------------------------
# Quantifier elimination

def _check_cap(n):
    if n > current().cell_cap:
        raise ResourceCap(f"{n} disjuncts exceed the cap of {current().cell_cap}")


class _Eliminator:
    def __init__(self, reg: Registry, nvars: int):
        self.reg = reg
        self.nvars = nvars

    def _ok(self, rows) -> Optional[list]:
        rows = fm.prune(rows, self.reg)
        if rows is None or not fm.feasible(rows, self.nvars, self.reg):
            return None
        return rows

    def _and(self, a: list, b: list) -> list:
        out = []
        for x in a:
            for y in b:
                r = self._ok(x + y)
                if r is not None:
                    out.append(r)
                    _check_cap(len(out))
        return out

    def _not(self, dnf: list) -> list:
        acc = [[]]
        for conj_rows in dnf:
            neg = []
            prefix: list = []
            for row in conj_rows:
                for nr in fm.negate_row(row):
                    neg.append(prefix + [nr])
                prefix = prefix + [row]
            acc = self._and(acc, neg)
            if not acc:
                break
        return acc

    def run(self, f) -> list:
        if isinstance(f, FAtom):
            if f.width != self.nvars:
                raise DimensionMismatch(f"atom in {f.width} variables, context has {self.nvars}")
            rows = self._ok(f.atom.rows())
            return [] if rows is None else [rows]
        if isinstance(f, And):
            acc = [[]]
            for g in f.args:
                acc = self._and(acc, self.run(g))
                if not acc:
                    break
            return acc
        if isinstance(f, Or):
            out = []
            for g in f.args:
                out.extend(self.run(g))
                _check_cap(len(out))
            return _dedupe(out)
        if isinstance(f, Not):
            return self._not(self.run(f.arg))
        if isinstance(f, Exists):
            bump("qe_eliminations")
            out = []
            for rows in self.run(f.body):
                proj = fm.project(rows, [f.var], self.reg)
                if proj is not None:
                    out.append(proj)
            return _dedupe(out)
        if isinstance(f, Forall):
            return self._not(self.run(Exists(f.var, Not(f.body))))
        raise TypeError(f"not a formula node: {f!r}")


def _dedupe(dnf):
    seen = {}
    for rows in dnf:
        seen.setdefault(tuple(sorted(rows)), rows)
    return list(seen.values())


def _from_dnf(dnf, n: int, k: int):
    if any(not rows for rows in dnf):
        return TRUE
    return disj(*(conj(*(FAtom(a.form, a.rel) for a in (atom_from_row(r, n, k) for r in rows)))
                  for rows in dnf))


def qe(f, reg: Registry, nvars: Optional[int] = None):
    """Quantifier-free formula equivalent to ``f`` in the same variable context."""
    n = width(f) if nvars is None else nvars
    if n is None:
        return f if is_quantifier_free(f) else _constant(f)
    dnf = _Eliminator(reg, n).run(f)
    return _from_dnf(dnf, n, reg.k)


def _constant(f):
    # no atoms at all: the truth value does not depend on the domain
    if isinstance(f, (And, Or)):
        vals = [_constant(g) is TRUE for g in f.args]
        return TRUE if (all(vals) if isinstance(f, And) else any(vals)) else FALSE
    if isinstance(f, Not):
        return FALSE if _constant(f.arg) is TRUE else TRUE
    return _constant(f.body)


def to_definable(f, reg: Registry, n: Optional[int] = None) -> Definable:
    """The set defined by ``f`` (quantifiers are eliminated first)."""
    w = width(f)
    n = w if n is None else n
    if n is None:
        raise DimensionMismatch("formula without atoms has no ambient dimension")
    if w is not None and w != n:
        raise DimensionMismatch(f"formula context {w} differs from dimension {n}")
    dnf = _Eliminator(reg, n).run(f)
    cells = tuple(Cell(reg, n, tuple(atom_from_row(r, n, reg.k) for r in rows)) for rows in dnf)
    return Definable(reg, n, cells)


def from_definable(d: Definable):
    return disj(*(conj(*(FAtom(a.form, a.rel) for a in c.atoms)) for c in d.cells))


# ---------------------------------------------------------------------------
# Evaluation and types

def _atom_holds(a: FAtom, point: Sequence[GenScalar], reg: Registry) -> bool:
    n = len(point)
    form = a.form
    if form.n != n:
        if form.n < n or any(form.exps[n:]):
            raise DimensionMismatch(f"atom in {form.n} variables at a point of length {n}")
        form = form.restrict(n)
    return Atom(form, a.rel).holds(reg, point)


def evaluate(f, g: Sequence[GenScalar], reg: Optional[Registry] = None) -> bool:
    """Truth of a quantifier-free ``f`` at ``g``.

    The point may be shorter than the atoms' context when the extra
    variables do not occur (as in the output of :func:`qe` on a formula with
    bound variables).
    """
    if not is_quantifier_free(f):
        raise NotQuantifierFree("eval needs a quantifier-free formula; apply qe first")
    g = tuple(g)
    if reg is None:
        if not g:
            raise DimensionMismatch("empty point needs an explicit registry")
        reg = g[0].reg
    for x in g:
        if x.reg != reg:
            raise RegistryMismatch("point and formula use different registries")

    def walk(h):
        if isinstance(h, FAtom):
            return _atom_holds(h, g, reg)
        if isinstance(h, And):
            return all(walk(a) for a in h.args)
        if isinstance(h, Or):
            return any(walk(a) for a in h.args)
        return not walk(h.arg)

    return walk(f)


eval_formula = evaluate


def sample_type(d: Definable) -> GenPoint:
    """A generalized point of ``d``.

    Each coordinate realizes a one-variable cut: at its endpoint when the cut
    is closed, at the standard midpoint of two distinct endpoints, and
    infinitesimally beyond an open one-sided end, using a new infinitesimal
    axis per such cut in variable order.
    """
    for c in d.cells:
        w = c.witness("type")
        if w is not None:
            return GenPoint(tuple(w))
    raise EmptyDefinable("no type in an empty set")


def restriction_ultrafilter(g: Sequence[GenScalar], fam: Sequence[Definable]) -> List[bool]:
    """Membership of ``g`` in each set of ``fam``."""
    return [member(d, g) for d in fam]


def generated_atoms(fam: Sequence[Definable]) -> List[Tuple[tuple, Definable]]:
    """Nonempty atoms of the Boolean algebra generated by ``fam``, keyed by sign vector."""
    if not fam:
        return []
    reg, n = fam[0].reg, fam[0].n
    out = []
    level = [((), Definable.ambient(reg, n))]
    for d in fam:
        comp = d.complement()
        nxt = []
        for key, cur in level:
            for bit, part in ((True, cur & d), (False, cur & comp)):
                if not part.is_empty():
                    nxt.append((key + (bit,), part))
        level = nxt
    out.extend(level)
    return out


def ultrafilter_atom(g: Sequence[GenScalar], fam: Sequence[Definable]) -> List[tuple]:
    """Sign vectors of the generated atoms that contain ``g`` (a singleton for a type)."""
    return [key for key, atom in generated_atoms(fam) if member(atom, g)]
