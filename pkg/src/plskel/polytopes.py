"""Monomial polytopes in the positive orthant, computed in log coordinates.

An :class:`AffineForm` is the map ``x -> a * prod x_i ** e_i``; an
:class:`Atom` compares one against 1.  A :class:`Cell` is a conjunction of
atoms and a :class:`Definable` a disjunction of cells (DNF), which is enough to
hold every set in the Boolean algebra generated by the polytopes.  Taking logs
turns every atom into a linear constraint with rational coefficients and a
constant in ``V``, and all decisions go through :mod:`plskel.fm`.

Cells may be empty or use strict atoms; :meth:`Cell.is_closed_cell` tells
whether a cell is a cell in the narrow sense (nonempty, non-strict atoms).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from . import _linalg, fm
from .errors import (DimensionMismatch, EmptyCell, RegistryMismatch, ResourceCap,
                     StrictAtomPresent)
from .limits import bump, current
from .scalars import GenScalar, LogConst, ParamExp, Registry, from_rational

NEG_INFINITY = float("-inf")

RELS = ("<", "<=", "=", ">=", ">")
_NEGATE = {"<": (">=",), "<=": (">",), ">": ("<=",), ">=": ("<",), "=": ("<", ">")}
_FLIP = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class AffineForm:
    """``x -> const * prod x_i ** exps[i]`` (const in the parameter group)."""
    const: ParamExp
    exps: tuple

    def __post_init__(self):
        object.__setattr__(self, "exps", tuple(_fr(e) for e in self.exps))

    def __hash__(self):
        return _cached_hash(self, lambda: (self.const, self.exps))

    @classmethod
    def monomial(cls, exps, const=None, k: int = 0) -> "AffineForm":
        if const is None:
            const = ParamExp.one(k)
        elif not isinstance(const, ParamExp):
            const = ParamExp(tuple(const))
        return cls(const, tuple(exps))

    @classmethod
    def coordinate(cls, i: int, n: int, k: int) -> "AffineForm":
        return cls(ParamExp.one(k), tuple(int(j == i) for j in range(n)))

    @property
    def n(self) -> int:
        return len(self.exps)

    def is_constant(self) -> bool:
        return not any(self.exps)

    def __mul__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.const * other.const,
                          tuple(a + b for a, b in zip(self.exps, other.exps)))

    def __truediv__(self, other: "AffineForm") -> "AffineForm":
        return self * other.inverse()

    def __pow__(self, q) -> "AffineForm":
        q = _fr(q)
        return AffineForm(self.const ** q, tuple(e * q for e in self.exps))

    def inverse(self) -> "AffineForm":
        return self ** -1

    def scale_const(self, a: ParamExp) -> "AffineForm":
        return AffineForm(self.const * a, self.exps)

    def compose(self, inner: Sequence["AffineForm"]) -> "AffineForm":
        """``self(inner_1(z), ..., inner_n(z))``."""
        if len(inner) != self.n:
            raise DimensionMismatch(f"form in {self.n} variables composed with {len(inner)} maps")
        const = self.const
        m = inner[0].n if inner else 0
        exps = [Fraction(0)] * m
        for e, g in zip(self.exps, inner):
            if e:
                const = const * g.const ** e
                for j, x in enumerate(g.exps):
                    exps[j] += e * x
        return AffineForm(const, tuple(exps))

    def embed(self, offset: int, width: int) -> "AffineForm":
        """Same form with its variables moved to positions offset..offset+n-1 of width."""
        exps = [Fraction(0)] * width
        exps[offset:offset + self.n] = self.exps
        return AffineForm(self.const, tuple(exps))

    def restrict(self, n: int) -> "AffineForm":
        return AffineForm(self.const, self.exps[:n])

    def log_parts(self) -> Tuple[tuple, tuple]:
        return self.exps, (Fraction(0),) + self.const.exps

    def evaluate(self, point: Sequence[GenScalar]) -> GenScalar:
        reg = point[0].reg if point else None
        if reg is None:
            raise DimensionMismatch("cannot evaluate on an empty point without a registry")
        return self.evaluate_in(reg, point)

    def evaluate_in(self, reg: Registry, point: Sequence[GenScalar]) -> GenScalar:
        if len(point) != self.n:
            raise DimensionMismatch(f"form in {self.n} variables, point of length {len(point)}")
        acc = GenScalar.of(reg, self.const)
        for e, x in zip(self.exps, point):
            if e:
                acc = acc + x * e
        return acc

    def canonical(self) -> Optional[Tuple["AffineForm", int]]:
        """Positive power of self or its inverse with leading exponent 1.

        Returns ``(form, s)`` where ``s`` is +1 or -1 (the orientation) or
        ``None`` for a constant form.
        """
        lead = next((e for e in self.exps if e), None)
        if lead is None:
            return None
        return self ** (1 / abs(lead)) if lead > 0 else self ** (-1 / abs(lead)), (1 if lead > 0 else -1)

    def __str__(self):
        parts = []
        if not self.const.is_one():
            parts.append("c" + str(list(map(str, self.const.exps))))
        for i, e in enumerate(self.exps):
            if e:
                parts.append(f"x{i + 1}" + ("" if e == 1 else f"^{e}"))
        return "*".join(parts) or "1"


@dataclass(frozen=True)
class Atom:
    form: AffineForm
    rel: str

    def __post_init__(self):
        if self.rel not in RELS:
            raise ValueError(f"unknown relation {self.rel!r}")

    def __hash__(self):
        return _cached_hash(self, lambda: (self.form, self.rel))

    @property
    def strict(self) -> bool:
        return self.rel in ("<", ">")

    def negation(self) -> Tuple["Atom", ...]:
        """Atoms whose disjunction is the complement of this one."""
        return tuple(Atom(self.form, r) for r in _NEGATE[self.rel])

    def normalized(self) -> Tuple["Atom", ...]:
        """Equivalent conjunction using only ``<=`` and ``<``."""
        if self.rel == "=":
            return (Atom(self.form, "<="), Atom(self.form.inverse(), "<="))
        if self.rel in (">", ">="):
            return (Atom(self.form.inverse(), _FLIP[self.rel]),)
        return (self,)

    def closure(self) -> "Atom":
        return Atom(self.form, {"<": "<=", ">": ">="}.get(self.rel, self.rel))

    def rows(self, offset: int = 0, width: Optional[int] = None) -> List[tuple]:
        a, c, rel = _atom_row(self)
        n = self.form.n
        width = n if width is None else width
        if offset or width != n:
            a = (0,) * offset + a + (0,) * (width - n - offset)
        return [(a, c, rel)]

    def holds(self, reg: Registry, point: Sequence[GenScalar]) -> bool:
        s = self.form.evaluate_in(reg, point).sign()
        return {"<": s < 0, "<=": s <= 0, "=": s == 0, ">=": s >= 0, ">": s > 0}[self.rel]

    def __str__(self):
        return f"{self.form} {self.rel} 1"


def _cached_hash(obj, key) -> int:
    h = obj.__dict__.get("_hash")
    if h is None:
        h = hash(key())
        object.__setattr__(obj, "_hash", h)
    return h


@lru_cache(maxsize=100_000)
def _atom_row(atom: Atom) -> tuple:
    coeffs = atom.form.exps
    const = (Fraction(0),) + atom.form.const.exps
    if atom.rel in (">", ">="):
        coeffs = tuple(-x for x in coeffs)
        const = tuple(-x for x in const)
    rel = {"<": fm.LT, ">": fm.LT, "<=": fm.LE, ">=": fm.LE, "=": fm.EQ}[atom.rel]
    return fm.make_row(coeffs, const, rel)


def atom_from_row(row, n: int, k: int) -> Atom:
    a, c, rel = row
    if c[0]:
        raise ValueError("row constant has a rational offset; not a parameter constant")
    form = AffineForm(ParamExp(tuple(Fraction(x) for x in c[1:])), tuple(Fraction(x) for x in a[:n]))
    return Atom(form, fm.REL_NAMES[rel])


@dataclass(frozen=True)
class Cell:
    """Conjunction of atoms in ``n`` variables (the empty conjunction is everything)."""
    reg: Registry = field(repr=False)
    n: int
    atoms: tuple = ()

    def __post_init__(self):
        atoms = tuple(dict.fromkeys(self.atoms))
        for a in atoms:
            if a.form.n != self.n:
                raise DimensionMismatch(f"atom in {a.form.n} variables inside a cell of dimension {self.n}")
            if len(a.form.const.exps) != self.reg.k:
                raise RegistryMismatch("atom constant does not match the generator count")
        object.__setattr__(self, "atoms", atoms)

    def __hash__(self):
        return _cached_hash(self, lambda: (self.n, self.atoms))

    def rows(self, offset: int = 0, width: Optional[int] = None) -> List[tuple]:
        out = []
        for a in self.atoms:
            out.extend(a.rows(offset, width))
        return out

    def __and__(self, other: "Cell") -> "Cell":
        _same(self, other)
        return Cell(self.reg, self.n, self.atoms + other.atoms)

    def with_atoms(self, *atoms: Atom) -> "Cell":
        return Cell(self.reg, self.n, self.atoms + tuple(atoms))

    def is_empty(self) -> bool:
        return _cell_empty(self)

    @property
    def strict_free(self) -> bool:
        return not any(a.strict for a in self.atoms)

    def is_closed_cell(self) -> bool:
        return self.strict_free and not self.is_empty()

    def closure(self) -> "Cell":
        return Cell(self.reg, self.n, tuple(a.closure() for a in self.atoms))

    def witness(self, mode: str = "standard") -> Optional[List[GenScalar]]:
        return fm.solve(self.rows(), self.n, self.reg, mode)

    def contains(self, point: Sequence[GenScalar]) -> bool:
        return all(a.holds(self.reg, point) for a in self.atoms)

    def as_definable(self) -> "Definable":
        return Definable(self.reg, self.n, (self,))

    def __str__(self):
        return " & ".join(map(str, self.atoms)) or "true"


@lru_cache(maxsize=200_000)
def _cell_empty(cell: Cell) -> bool:
    bump("emptiness_checks")
    return not fm.feasible(cell.rows(), cell.n, cell.reg)


def _same(a, b):
    if a.n != b.n:
        raise DimensionMismatch(f"ambient dimensions {a.n} and {b.n}")
    if a.reg is not b.reg and a.reg != b.reg:
        raise RegistryMismatch("objects built over different registries")


def _check_cap(count: int):
    if count > current().cell_cap:
        raise ResourceCap(f"{count} cells exceed the cap of {current().cell_cap}")


def _negate_cell(cell: Cell) -> List[Cell]:
    """Disjoint cells covering the complement of ``cell``."""
    out = []
    prefix: tuple = ()
    for a in cell.atoms:
        for na in a.negation():
            out.append(Cell(cell.reg, cell.n, prefix + (na,)))
        prefix += (a,)
    return out


def _subtract(cells, others) -> List[Cell]:
    """Disjoint nonempty cells covering ``union(cells) - union(others)``.

    Each remaining piece is split by the negation of a subtracted cell only
    when it actually meets that cell.
    """
    acc = [c for c in cells if not c.is_empty()]
    for b in others:
        if not acc:
            break
        neg = None
        nxt = []
        for a in acc:
            if (a & b).is_empty():
                nxt.append(a)
                continue
            if neg is None:
                neg = _negate_cell(b)
            for nb in neg:
                c = a & nb
                if not c.is_empty():
                    nxt.append(c)
                    _check_cap(len(nxt))
        acc = nxt
    return acc


@dataclass(frozen=True)
class Definable:
    """Finite union of cells; empty cells are dropped by the Boolean operations."""
    reg: Registry = field(repr=False)
    n: int
    cells: tuple = ()

    def __post_init__(self):
        cells = tuple(dict.fromkeys(self.cells))
        for c in cells:
            _same(self, c)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def ambient(cls, reg: Registry, n: int) -> "Definable":
        return cls(reg, n, (Cell(reg, n, ()),))

    @classmethod
    def empty(cls, reg: Registry, n: int) -> "Definable":
        return cls(reg, n, ())

    @classmethod
    def from_atoms(cls, reg: Registry, n: int, *atoms: Atom) -> "Definable":
        return cls(reg, n, (Cell(reg, n, atoms),))

    @classmethod
    def box(cls, reg: Registry, lows, highs) -> "Definable":
        """``prod [lows_i, highs_i]`` with bounds given as positive rationals in the group."""
        n = len(lows)
        atoms = []
        for i, (lo, hi) in enumerate(zip(lows, highs)):
            x = AffineForm.coordinate(i, n, reg.k)
            atoms.append(Atom(x.scale_const(from_rational(reg, lo).inverse()), ">="))
            atoms.append(Atom(x.scale_const(from_rational(reg, hi).inverse()), "<="))
        return cls.from_atoms(reg, n, *atoms)

    @classmethod
    def point(cls, reg: Registry, coords: Sequence[GenScalar]) -> "Definable":
        """Singleton of a standard point whose coordinates lie in the parameter group."""
        n = len(coords)
        atoms = []
        for i, x in enumerate(coords):
            if not x.is_standard():
                raise ValueError("only standard points are definable singletons")
            atoms.append(Atom(AffineForm.coordinate(i, n, reg.k).scale_const(x.std.to_param().inverse()), "="))
        return cls.from_atoms(reg, n, *atoms)

    # Boolean algebra -------------------------------------------------
    def nonempty_cells(self) -> List[Cell]:
        return [c for c in self.cells if not c.is_empty()]

    def pruned(self) -> "Definable":
        return Definable(self.reg, self.n, tuple(self.nonempty_cells()))

    def __or__(self, other: "Definable") -> "Definable":
        _same(self, other)
        return Definable(self.reg, self.n, self.cells + other.cells)

    def __and__(self, other: "Definable") -> "Definable":
        _same(self, other)
        out = []
        for a in self.cells:
            for b in other.cells:
                c = a & b
                if not c.is_empty():
                    out.append(c)
                    _check_cap(len(out))
        return Definable(self.reg, self.n, tuple(out))

    def complement(self) -> "Definable":
        return Definable(self.reg, self.n, tuple(_subtract([Cell(self.reg, self.n, ())], self.cells)))

    __invert__ = complement

    def __sub__(self, other: "Definable") -> "Definable":
        _same(self, other)
        return Definable(self.reg, self.n, tuple(_subtract(self.cells, other.cells)))

    def symmetric_difference(self, other: "Definable") -> "Definable":
        return (self - other) | (other - self)

    def is_empty(self) -> bool:
        return all(c.is_empty() for c in self.cells)

    def issubset(self, other: "Definable") -> bool:
        _same(self, other)
        return all(not _subtract([c], other.cells) for c in self.cells)

    def equivalent(self, other: "Definable") -> bool:
        return self.issubset(other) and other.issubset(self)

    def closure(self) -> "Definable":
        return Definable(self.reg, self.n, tuple(c.closure() for c in self.nonempty_cells()))

    def contains(self, point: Sequence[GenScalar]) -> bool:
        return member(self, point)

    def witness(self, mode: str = "standard") -> Optional[List[GenScalar]]:
        for c in self.cells:
            w = c.witness(mode)
            if w is not None:
                return w
        return None

    def atoms(self) -> List[Atom]:
        return list(dict.fromkeys(a for c in self.cells for a in c.atoms))

    def __str__(self):
        return " | ".join("(" + str(c) + ")" for c in self.cells) or "false"


# ---------------------------------------------------------------------------
# Operations

def is_empty(d) -> bool:
    """True iff no point of the positive orthant satisfies ``d``."""
    return d.is_empty()


def _implicit_equalities(cell: Cell) -> List[tuple]:
    """Equality rows spanning the affine hull of a nonempty cell."""
    rows = fm.prune(cell.rows(), cell.reg)
    eqs = [r for r in rows if r[2] == fm.EQ]
    for r in rows:
        if r[2] == fm.LE:
            probe = [x for x in rows if x is not r] + [(r[0], r[1], fm.LT)]
            if not fm.feasible(probe, cell.n, cell.reg):
                eqs.append(r)
    return eqs


def cell_dimension(cell: Cell):
    if cell.is_empty():
        return NEG_INFINITY
    eqs = _implicit_equalities(cell)
    return cell.n - _linalg.rank([r[0] for r in eqs])


def dimension(d):
    """Largest dimension of the affine hull of a nonempty cell, ``NEG_INFINITY`` if empty."""
    cells = d.cells if isinstance(d, Definable) else (d,)
    return max((cell_dimension(c) for c in cells), default=NEG_INFINITY)


def relative_interior(cell: Cell) -> Cell:
    """Implicit equalities as ``=``, every other atom strict."""
    if cell.is_empty():
        raise EmptyCell("empty cell has no interior")
    norm = [b for a in cell.atoms for b in a.normalized()]
    atoms = []
    for i, b in enumerate(norm):
        if b.rel == "<":
            atoms.append(b)
            continue
        rest = norm[:i] + [Atom(b.form, "<")] + norm[i + 1:]
        tight = Cell(cell.reg, cell.n, tuple(rest)).is_empty()
        atoms.append(Atom(b.form, "=" if tight else "<"))
    return Cell(cell.reg, cell.n, tuple(atoms))


def _identically_one(cell: Cell, form: AffineForm) -> bool:
    return cell.with_atoms(Atom(form, "<")).is_empty() and cell.with_atoms(Atom(form, ">")).is_empty()


def boundary(c: Cell) -> Definable:
    """Boundary of a closed cell relative to its affine hull.

    Union over the atoms ``phi_j`` not identically 1 on the cell of
    ``phi_j = 1`` together with all the other atoms.
    """
    if not c.strict_free:
        raise StrictAtomPresent("boundary is defined for non-strict cells")
    if c.is_empty():
        raise EmptyCell("boundary of an empty cell")
    forms = [b.form for a in c.atoms for b in a.normalized()]
    le = [Atom(f, "<=") for f in forms]
    out = []
    for j, f in enumerate(forms):
        if _identically_one(c, f):
            continue
        atoms = [Atom(f, "=")] + [a for i, a in enumerate(le) if i != j]
        out.append(Cell(c.reg, c.n, tuple(atoms)))
    return Definable(c.reg, c.n, tuple(out))


def is_bounded(cell: Cell) -> bool:
    return all(lo is not None and hi is not None
               for lo, _, hi, _ in (var_range(cell, i) for i in range(cell.n)))


def var_range(cell: Cell, i: int):
    """``(lo, lo_strict, hi, hi_strict)`` of coordinate ``i`` (log scale) over a nonempty cell.

    Missing bounds are ``None``.
    """
    rows = fm.project(cell.rows(), [j for j in range(cell.n) if j != i], cell.reg)
    if rows is None:
        raise EmptyCell("range of an empty cell")
    lo = hi = None
    lo_s = hi_s = False
    reg = cell.reg
    for a, c, rel in rows:
        coef = a[i]
        val = GenScalar.of(reg, LogConst.from_vector(c)) * Fraction(-1, coef)
        strict = rel == fm.LT
        if rel == fm.EQ or coef > 0:
            if hi is None or val < hi or (val == hi and strict):
                hi, hi_s = val, strict
        if rel == fm.EQ or coef < 0:
            if lo is None or val > lo or (val == lo and strict):
                lo, lo_s = val, strict
    return lo, lo_s, hi, hi_s


def is_compact(d: Definable) -> bool:
    return all(c.strict_free and is_bounded(c) for c in d.nonempty_cells())


@dataclass(frozen=True)
class CellDecomposition:
    """Cells induced by the sign conditions of a family of forms on a target.

    ``cells[i]`` is the closed cell, ``parts[i]`` the matching open sign cell
    (strict sign conditions intersected with the target cell), ``signs[i]`` the
    sign vector over ``family`` in ``{"<", "=", ">"}`` and ``incidence[i]`` the
    indices of the cells lying in the boundary of ``cells[i]``.
    """
    family: tuple
    cells: tuple
    parts: tuple
    signs: tuple
    target_index: tuple
    incidence: tuple

    def as_definable(self) -> Definable:
        c = self.cells[0] if self.cells else None
        if c is None:
            raise EmptyCell("empty decomposition")
        return Definable(c.reg, c.n, self.cells)


def canonical_family(forms: Sequence[AffineForm]) -> List[AffineForm]:
    out = []
    for f in forms:
        cf = f.canonical()
        if cf is not None and cf[0] not in out:
            out.append(cf[0])
    return out


def sign_cells(base: Cell, forms: Sequence[AffineForm]) -> List[Tuple[tuple, Cell]]:
    """Nonempty open sign cells ``base & (f_i REL_i 1)``, by depth-first refinement."""
    found = []
    cap = current().cell_cap

    def walk(i, cell, signs):
        if i == len(forms):
            found.append((signs, cell))
            _check_cap(len(found))
            return
        for s in ("<", "=", ">"):
            c = cell.with_atoms(Atom(forms[i], s))
            if not c.is_empty():
                walk(i + 1, c, signs + (s,))

    if not base.is_empty():
        walk(0, base, ())
    bump("sign_cells", len(found))
    if len(found) > cap:
        raise ResourceCap("sign enumeration over cap")
    return found


def decompose(family: Sequence[AffineForm], target: Definable) -> CellDecomposition:
    """Decomposition induced by the sign conditions of ``family`` restricted to ``target``."""
    forms = canonical_family(family)
    cells, parts, signs, tidx = [], [], [], []
    for t, tc in enumerate(target.cells):
        for sig, part in sign_cells(tc, forms):
            closed = tc.with_atoms(*(Atom(f, {"<": "<=", "=": "=", ">": ">="}[s])
                                     for f, s in zip(forms, sig)))
            cells.append(closed)
            parts.append(part)
            signs.append(sig)
            tidx.append(t)
    incidence = []
    for i, ci in enumerate(cells):
        inc = []
        if ci.strict_free:
            interior = None
            for j, cj in enumerate(cells):
                if j == i or tidx[j] != tidx[i]:
                    continue
                # sign-compatible cells lie inside ci; they are faces when they miss its interior
                if not all(b == a or b == "=" for a, b in zip(signs[i], signs[j])):
                    continue
                if interior is None:
                    interior = relative_interior(ci)
                if (cj & interior).is_empty():
                    inc.append(j)
        incidence.append(tuple(inc))
    return CellDecomposition(tuple(forms), tuple(cells), tuple(parts), tuple(signs),
                             tuple(tidx), tuple(incidence))


def image_cell(cell: Cell, forms: Sequence[AffineForm]) -> Optional[Cell]:
    """Image of one cell under a monomial map, or ``None`` if the cell is empty."""
    n, m, reg = cell.n, len(forms), cell.reg
    for f in forms:
        if f.n != n:
            raise DimensionMismatch(f"map component in {f.n} variables on a cell of dimension {n}")
    width = n + m
    rows = cell.rows(0, width)
    for j, f in enumerate(forms):
        coeffs = [-e for e in f.exps] + [Fraction(int(i == j)) for i in range(m)]
        const = (Fraction(0),) + tuple(-x for x in f.const.exps)
        rows.append(fm.make_row(coeffs, const, fm.EQ))
    out = fm.project(rows, range(n), reg)
    if out is None:
        return None
    atoms = tuple(atom_from_row((r[0][n:], r[1], r[2]), m, reg.k) for r in out)
    return Cell(reg, m, atoms)


def image_affine(d: Definable, forms: Sequence[AffineForm]) -> Definable:
    """Image of ``d`` under the monomial map with components ``forms``."""
    cells = []
    for c in d.cells:
        img = image_cell(c, forms)
        if img is not None:
            cells.append(img)
    return Definable(d.reg, len(forms), tuple(cells))


def preimage_cell(cell: Cell, forms: Sequence[AffineForm]) -> Cell:
    """``{x : forms(x) in cell}`` as a cell in the source variables."""
    n = forms[0].n if forms else 0
    atoms = tuple(Atom(a.form.compose(forms), a.rel) for a in cell.atoms)
    return Cell(cell.reg, n, atoms)


def member(d, p: Sequence[GenScalar]) -> bool:
    """Whether the (generalized) point ``p`` satisfies ``d``."""
    p = tuple(p)
    if len(p) != d.n:
        raise DimensionMismatch(f"point of length {len(p)} in dimension {d.n}")
    for x in p:
        if x.reg is not d.reg and x.reg.generators != d.reg.generators:
            raise RegistryMismatch("point and set use different generators")
    cells = d.cells if isinstance(d, Definable) else (d,)
    reg = p[0].reg if p else d.reg
    return any(all(a.holds(reg, p) for a in c.atoms) for c in cells)
