"""Piecewise monomial maps between embedded compact sets, and finite quotients.

A :class:`PLMap` is a list of pieces ``(cell, forms)``: on the part of the
source inside ``cell`` the map is the monomial map with components ``forms``.
A :class:`GroupAction` is a finite group of such maps acting on a compact
:class:`~plskel.polytopes.Definable`.

:func:`quotient` builds a partition of ``X`` into relatively open cells that
every group element maps affinely onto one another, a fundamental set of
parts (the lexicographically smallest point of each orbit), a projection onto
it, and compact charts on which the projection is injective.  Every claim is
checkable by emptiness tests; :func:`certify` runs them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (DimensionMismatch, NonCompactSource, NotAnAction,
                     PointOutsideSource, ResourceCap, ValidationError)
from .limits import bump
from .polytopes import (AffineForm, Atom, Cell, Definable, canonical_family, cell_dimension,
                        image_cell, is_bounded, member, preimage_cell,
                        relative_interior, sign_cells, var_range)
from .scalars import GenScalar, Ordering, Registry, compare

MAX_FAMILY = 64
MAX_SPLIT_DEPTH = 6


@dataclass(frozen=True)
class Piece:
    domain: Cell
    forms: tuple

    def __post_init__(self):
        object.__setattr__(self, "forms", tuple(self.forms))


def _apply(forms, reg, point) -> tuple:
    return tuple(f.evaluate_in(reg, point) for f in forms)


def _ratio_forms(a: Sequence[AffineForm], b: Sequence[AffineForm]) -> List[AffineForm]:
    return [x / y for x, y in zip(a, b)]


def _forms_agree_on(cell: Cell, a, b) -> bool:
    """Whether the monomial maps ``a`` and ``b`` coincide on ``cell``."""
    for r in _ratio_forms(a, b):
        if r.is_constant() and r.const.is_one():
            continue
        if not cell.with_atoms(Atom(r, "<")).is_empty():
            return False
        if not cell.with_atoms(Atom(r, ">")).is_empty():
            return False
    return True


@dataclass(frozen=True)
class PLMap:
    source: Definable
    target_dim: int
    pieces: tuple

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        for p in self.pieces:
            if p.domain.n != self.source.n:
                raise DimensionMismatch("piece domain outside the source dimension")
            if len(p.forms) != self.target_dim:
                raise DimensionMismatch(f"piece with {len(p.forms)} components, target dimension {self.target_dim}")
            for f in p.forms:
                if f.n != self.source.n:
                    raise DimensionMismatch("piece form in the wrong number of variables")

    @property
    def reg(self) -> Registry:
        return self.source.reg

    @property
    def n(self) -> int:
        return self.source.n

    @classmethod
    def monomial(cls, source: Definable, forms) -> "PLMap":
        forms = tuple(forms)
        return cls(source, len(forms), (Piece(Cell(source.reg, source.n, ()), forms),))

    @classmethod
    def identity(cls, source: Definable) -> "PLMap":
        k, n = source.reg.k, source.n
        return cls.monomial(source, [AffineForm.coordinate(i, n, k) for i in range(n)])

    def local_pieces(self) -> List[Tuple[Cell, tuple]]:
        """Pieces intersected with the source cells, empty ones dropped."""
        out = []
        for sc in self.source.cells:
            for p in self.pieces:
                c = sc & p.domain
                if not c.is_empty():
                    out.append((c, p.forms))
        return out

    def validate(self) -> "PLMap":
        covered = Definable(self.reg, self.n, tuple(p.domain for p in self.pieces))
        if not self.source.issubset(covered):
            raise ValidationError("pieces do not cover the source")
        loc = self.local_pieces()
        for i, (ci, fi) in enumerate(loc):
            for cj, fj in loc[i + 1:]:
                if fi == fj:
                    continue
                both = ci & cj
                if not both.is_empty() and not _forms_agree_on(both, fi, fj):
                    raise ValidationError("pieces disagree on an overlap")
        return self

    def piece_at(self, point) -> Piece:
        point = tuple(point)
        if not member(self.source, point):
            raise PointOutsideSource("point is not in the source")
        for p in self.pieces:
            if p.domain.contains(point):
                return p
        raise PointOutsideSource("no piece contains the point")

    def __call__(self, point) -> tuple:
        point = tuple(point)
        return _apply(self.piece_at(point).forms, self.reg, point)


def compose(f: PLMap, g: PLMap) -> PLMap:
    """``f o g``: pieces are the g-pieces cut by the g-preimages of the f-pieces."""
    if g.target_dim != f.n:
        raise DimensionMismatch(f"cannot compose a map on dimension {f.n} after one into {g.target_dim}")
    pieces = []
    for gp in g.pieces:
        for fp in f.pieces:
            dom = gp.domain & preimage_cell(fp.domain, gp.forms)
            if dom.is_empty():
                continue
            forms = tuple(h.compose(gp.forms) for h in fp.forms)
            pieces.append(Piece(dom, forms))
    return PLMap(g.source, f.target_dim, tuple(pieces))


def agree(f: PLMap, g: PLMap, region: Optional[Definable] = None) -> bool:
    """Whether ``f`` and ``g`` take the same values on ``region`` (default f's source)."""
    if f.target_dim != g.target_dim or f.n != g.n:
        return False
    region = f.source if region is None else region
    for rc in region.cells:
        for a in f.pieces:
            ca = rc & a.domain
            if ca.is_empty():
                continue
            for b in g.pieces:
                if a.forms == b.forms:
                    continue
                cab = ca & b.domain
                if not cab.is_empty() and not _forms_agree_on(cab, a.forms, b.forms):
                    return False
    return True


def equal(f: PLMap, g: PLMap) -> bool:
    return f.source.equivalent(g.source) and agree(f, g)


def image_pl(f: PLMap) -> Definable:
    """Image of a map with compact source (bounded cells)."""
    for c in f.source.nonempty_cells():
        if not is_bounded(c):
            raise NonCompactSource("image_pl needs every source cell to be bounded")
    cells = []
    for c, forms in f.local_pieces():
        img = image_cell(c, forms)
        if img is not None:
            cells.append(img)
    return Definable(f.reg, f.target_dim, tuple(cells))


def image_of(f: PLMap, d: Definable) -> Definable:
    """``f(d)`` for ``d`` inside the source."""
    cells = []
    for dc in d.cells:
        for p in f.pieces:
            img = image_cell(dc & p.domain, p.forms)
            if img is not None:
                cells.append(img)
    return Definable(f.reg, f.target_dim, tuple(cells))


# ---------------------------------------------------------------------------
# Group actions

@dataclass(frozen=True)
class GroupAction:
    space: Definable
    elements: tuple
    table: Optional[tuple] = None
    names: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.table is not None:
            object.__setattr__(self, "table", tuple(tuple(r) for r in self.table))
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"g{i}" for i in range(len(self.elements))))

    @property
    def reg(self) -> Registry:
        return self.space.reg

    @property
    def order(self) -> int:
        return len(self.elements)

    def identity_index(self) -> int:
        ident = PLMap.identity(self.space)
        for i, g in enumerate(self.elements):
            if agree(g, ident, self.space):
                return i
        raise NotAnAction("no element acts as the identity")

    def validate(self) -> "GroupAction":
        X = self.space
        if not X.nonempty_cells():
            raise NotAnAction("empty space")
        for c in X.nonempty_cells():
            if not (c.strict_free and is_bounded(c)):
                raise NonCompactSource("acted-on space must be compact")
        for g in self.elements:
            if g.n != X.n or g.target_dim != X.n:
                raise NotAnAction("element is not a self-map of the space")
            try:
                g.validate()
            except ValidationError as e:
                raise NotAnAction(f"element is not a well-defined map: {e}") from None
            if not g.source.equivalent(X):
                raise NotAnAction("element source differs from the space")
            if not image_pl(g).equivalent(X):
                raise NotAnAction("element does not map the space onto itself")
        e = self.identity_index()
        table = self.table if self.table is not None else self._compute_table()
        if len(table) != self.order or any(len(r) != self.order for r in table):
            raise NotAnAction("multiplication table has the wrong shape")
        for i, gi in enumerate(self.elements):
            for j, gj in enumerate(self.elements):
                k = table[i][j]
                if not 0 <= k < self.order or not agree(compose(gi, gj), self.elements[k], X):
                    raise NotAnAction(f"{self.names[i]}*{self.names[j]} is not {self.names[k] if 0 <= k < self.order else k}")
            if e not in table[i]:
                raise NotAnAction(f"{self.names[i]} has no inverse")
        return GroupAction(self.space, self.elements, table, self.names)

    def _compute_table(self) -> tuple:
        rows = []
        for gi in self.elements:
            row = []
            for gj in self.elements:
                c = compose(gi, gj)
                k = next((k for k, gk in enumerate(self.elements) if agree(c, gk, self.space)), None)
                if k is None:
                    raise NotAnAction("elements are not closed under composition")
                row.append(k)
            rows.append(tuple(row))
        return tuple(rows)


def _lex_cmp(a, b) -> int:
    for x, y in zip(a, b):
        o = compare(x, y)
        if o is not Ordering.EQ:
            return int(o)
    return 0


def orbit(action: GroupAction, p) -> List[tuple]:
    """Distinct images ``g(p)`` in element order."""
    p = tuple(p)
    if not member(action.space, p):
        raise PointOutsideSource("point is not in the acted-on space")
    out = []
    for g in action.elements:
        q = g(p)
        if q not in out:
            out.append(q)
    return out


# ---------------------------------------------------------------------------
# Quotient

@dataclass(frozen=True)
class OrbitPattern:
    """Orbit size ``m`` and lexicographic position of a part's points in their orbit."""
    m: int
    rank: int
    order: tuple


@dataclass
class QuotientPresentation:
    action: GroupAction
    family: tuple
    parts: list
    signs: list
    witnesses: list
    dims: list
    part_maps: list          # part_maps[q][g]: forms of element g on part q
    images: list             # images[q][g]: index of the part g(q)
    fixed: list              # fixed[q][g]: g is the identity on part q
    representatives: list    # parts made of lexicographically minimal orbit points
    patterns: list
    projection: PLMap
    charts: list = field(default_factory=list)
    chart_parts: list = field(default_factory=list)

    @property
    def fundamental_domain(self) -> Definable:
        X = self.action.space
        return Definable(X.reg, X.n, tuple(self.parts[i] for i in self.representatives))


def _invariant_family(action: GroupAction) -> List[AffineForm]:
    X = action.space
    n, k = X.n, X.reg.k
    forms = [b.form for c in X.cells for a in c.atoms for b in a.normalized()]
    maps = []
    for g in action.elements:
        for p in g.pieces:
            forms.extend(b.form for a in p.domain.atoms for b in a.normalized())
            maps.append(p.forms)
            coords = [AffineForm.coordinate(i, n, k) for i in range(n)]
            forms.extend(_ratio_forms(coords, p.forms))
    fam = canonical_family(forms)
    frontier = list(fam)
    while frontier:
        new = []
        for f in frontier:
            for m in maps:
                for h in canonical_family([f.compose(m)]):
                    if h not in fam:
                        fam.append(h)
                        new.append(h)
        if len(fam) > MAX_FAMILY:
            raise ResourceCap(f"invariant family exceeds {MAX_FAMILY} forms")
        frontier = new
    return fam


def _sign_vector(fam, reg, point) -> tuple:
    out = []
    for f in fam:
        s = f.evaluate_in(reg, point).sign()
        out.append("<" if s < 0 else ">" if s > 0 else "=")
    return tuple(out)


def _piece_forms_at(g: PLMap, point) -> tuple:
    for p in g.pieces:
        if p.domain.contains(point):
            return p.forms
    raise PointOutsideSource("no piece contains a partition witness")


def quotient(action: GroupAction) -> QuotientPresentation:
    """Partition, fundamental parts, projection and injective charts of ``X / G``."""
    action = action.validate()
    X, reg, G = action.space, action.reg, action.elements
    n = X.n
    fam = _invariant_family(action)
    by_sign: Dict[tuple, int] = {}
    parts, signs, wits = [], [], []
    for xc in X.nonempty_cells():
        for sig, cell in sign_cells(xc, fam):
            if sig in by_sign:
                continue
            w = tuple(cell.witness("standard"))
            by_sign[sig] = len(parts)
            parts.append(cell)
            signs.append(sig)
            wits.append(w)
    bump("quotient_parts", len(parts))

    dims = [cell_dimension(c) for c in parts]
    part_maps, images, fixed = [], [], []
    for q, w in enumerate(wits):
        row_m, row_i, row_f = [], [], []
        for g in G:
            forms = _piece_forms_at(g, w)
            gw = _apply(forms, reg, w)
            j = by_sign.get(_sign_vector(fam, reg, gw))
            if j is None:
                raise ValidationError("image of a partition witness lies outside the partition")
            row_m.append(forms)
            row_i.append(j)
            row_f.append(_identity_on(parts[q], forms))
        part_maps.append(row_m)
        images.append(row_i)
        fixed.append(row_f)

    reps, patterns = [], []
    for q, w in enumerate(wits):
        pts = [_apply(part_maps[q][gi], reg, w) for gi in range(len(G))]
        distinct = []
        for p in pts:
            if p not in distinct:
                distinct.append(p)
        distinct.sort(key=cmp_to_key(_lex_cmp))
        rank = distinct.index(w)
        order = tuple(sorted(range(len(G)), key=lambda gi: (distinct.index(pts[gi]), gi)))
        patterns.append(OrbitPattern(len(distinct), rank, order))
        if rank == 0:
            reps.append(q)

    rep_set = set(reps)
    pieces = []
    transport = []
    for q in range(len(parts)):
        gi = next(gi for gi in range(len(G)) if images[q][gi] in rep_set)
        transport.append(gi)
        pieces.append(Piece(parts[q], part_maps[q][gi]))
    projection = PLMap(X, n, tuple(pieces))

    qp = QuotientPresentation(action, tuple(fam), parts, signs, wits, dims, part_maps,
                              images, fixed, reps, patterns, projection)
    qp.charts, qp.chart_parts = _charts(qp)
    return qp


def _identity_on(cell: Cell, forms) -> bool:
    n, k = cell.n, cell.reg.k
    coords = [AffineForm.coordinate(i, n, k) for i in range(n)]
    return _forms_agree_on(cell, forms, coords)


def injective_on(action: GroupAction, V: Definable) -> bool:
    """No two distinct points of ``V`` lie in one orbit.

    Emptiness of ``{x in V : g(x) in V, g(x) != x}`` for every element and
    piece, which is the pair set ``{(x, y) in V^2 : y = g(x), x != y}``.
    """
    n, k = V.n, V.reg.k
    coords = [AffineForm.coordinate(i, n, k) for i in range(n)]
    for g in action.elements:
        for p in g.pieces:
            diffs = [r for r in _ratio_forms(p.forms, coords)
                     if not (r.is_constant() and r.const.is_one())]
            if not diffs:
                continue
            for a in V.cells:
                base = a & p.domain
                if base.is_empty():
                    continue
                for b in V.cells:
                    both = base & preimage_cell(b, p.forms)
                    if both.is_empty():
                        continue
                    for r in diffs:
                        for rel in ("<", ">"):
                            if not both.with_atoms(Atom(r, rel)).is_empty():
                                return False
    return True


def _bisect(cell: Cell) -> Tuple[Cell, Cell]:
    reg = cell.reg
    best = None
    for i in range(cell.n):
        lo, _, hi, _ = var_range(cell, i)
        width = hi - lo
        if best is None or compare(width, best[0]) is Ordering.GT:
            best = (width, i, lo, hi)
    _, i, lo, hi = best
    mid = GenScalar.of(reg, (lo.std + hi.std).scale(Fraction(1, 2))).std.to_param()
    x = AffineForm.coordinate(i, cell.n, reg.k).scale_const(mid.inverse())
    return cell.with_atoms(Atom(x, "<=")), cell.with_atoms(Atom(x, ">="))


def _injective_pieces(action, cell: Cell, depth=0) -> List[Cell]:
    if injective_on(action, cell.as_definable()):
        return [cell]
    if depth >= MAX_SPLIT_DEPTH:
        raise ResourceCap("could not split a part closure into injective charts")
    out = []
    for half in _bisect(cell):
        if not half.is_empty():
            out.extend(_injective_pieces(action, half, depth + 1))
    return out


def _charts(qp: QuotientPresentation):
    action, reg = qp.action, qp.action.reg
    X = action.space
    reps = sorted(qp.representatives, key=lambda q: -qp.dims[q])
    charts: List[list] = []       # each chart: list of closed cells
    members: List[set] = []       # representative parts covered by the chart
    for q in reps:
        closed = qp.parts[q].closure()
        hit = next((i for i, ch in enumerate(charts)
                    if closed.as_definable().issubset(Definable(reg, X.n, tuple(ch)))), None)
        if hit is not None:
            members[hit].add(q)
            continue
        for sub in _injective_pieces(action, closed):
            placed = False
            for i, ch in enumerate(charts):
                if injective_on(action, Definable(reg, X.n, tuple(ch) + (sub,))):
                    ch.append(sub)
                    members[i].add(q)
                    placed = True
                    break
            if not placed:
                charts.append([sub])
                members.append({q})
    # translates cover the remaining parts; a chart covers every part it was built from
    out, covers = [], []
    for ch, mem in zip(charts, members):
        for gi, g in enumerate(action.elements):
            cells = []
            for c in ch:
                for p in g.pieces:
                    img = image_cell(c & p.domain, p.forms)
                    if img is not None:
                        cells.append(img)
            d = Definable(reg, X.n, tuple(cells))
            cov = {qp.images[q][gi] for q in mem}
            if any(d.equivalent(o) for o in out):
                i = next(i for i, o in enumerate(out) if d.equivalent(o))
                covers[i] |= cov
                continue
            out.append(d)
            covers.append(cov)
    # greedy cover of all parts
    need = set(range(len(qp.parts)))
    chosen = []
    while need:
        i = max(range(len(out)), key=lambda i: (len(covers[i] & need), -i))
        if not covers[i] & need:
            raise ValidationError("charts fail to cover the partition")
        chosen.append(i)
        need -= covers[i]
    chosen.sort()
    return [out[i] for i in chosen], [sorted(covers[i]) for i in chosen]


def fiber(qp: QuotientPresentation, x) -> Definable:
    """``{y in X : p(y) = p(x)}`` as a definable set."""
    X, reg = qp.action.space, qp.action.reg
    px = qp.projection(x)
    cells = []
    for p in qp.projection.pieces:
        atoms = []
        for f, v in zip(p.forms, px):
            if not v.is_standard():
                raise ValidationError("fiber of a non-standard point is not definable")
            atoms.append(Atom(f.scale_const(v.std.to_param().inverse()), "="))
        c = p.domain.with_atoms(*atoms)
        if not c.is_empty():
            cells.append(c)
    return Definable(reg, X.n, tuple(cells))


def certify(qp: QuotientPresentation) -> Dict[str, bool]:
    """Run the semantic checks of a quotient presentation."""
    action = qp.action
    X, reg, G = action.space, action.reg, action.elements
    parts = qp.parts
    res = {}
    union = Definable(reg, X.n, tuple(parts))
    disjoint = all((parts[i] & parts[j]).is_empty()
                   for i in range(len(parts)) for j in range(i + 1, len(parts)))
    res["partition"] = disjoint and union.equivalent(X)
    ok_a = ok_b = True
    for q, part in enumerate(parts):
        for gi in range(len(G)):
            img = image_cell(part, qp.part_maps[q][gi])
            target = parts[qp.images[q][gi]]
            if img is None or not img.as_definable().equivalent(target.as_definable()):
                ok_a = False
            if not qp.fixed[q][gi] and not (part & target).is_empty():
                ok_b = False
    res["a_images_are_parts"] = ok_a
    res["b_fixed_or_disjoint"] = ok_b
    res["c_open_in_closure"] = all(
        relative_interior(p.closure()).as_definable().equivalent(p.as_definable()) for p in parts)
    space_atoms = {a for c in X.cells for a in c.atoms}
    res["d_full_dimensional_open"] = all(
        all(a.strict for a in p.atoms if a not in space_atoms)
        for p, d in zip(parts, qp.dims) if d == X.n)
    res["charts_injective"] = all(injective_on(action, V) for V in qp.charts)
    res["charts_cover"] = all(
        any(parts[q].as_definable().issubset(V) for V in qp.charts) for q in range(len(parts)))
    inv = True
    for q, part in enumerate(parts):
        pq = qp.projection.pieces[q].forms
        for gi in range(len(G)):
            j = qp.images[q][gi]
            pg = tuple(f.compose(qp.part_maps[q][gi]) for f in qp.projection.pieces[j].forms)
            if pg != pq and not _forms_agree_on(part, pg, pq):
                inv = False
    res["projection_invariant"] = inv
    return res
