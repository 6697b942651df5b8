"""Session files: a registry, an ambient dimension and named objects.

Grammar::

    session  := item*
    item     := (registry (gens RAT+) (inf-rank INT) (val trivial | p-adic INT))
              | (dim INT)
              | (def NAME object)
    object   := formula | plmap | action | poly | point | monomap
    term     := (mono CONST (RAT ... RAT))
    CONST    := RAT                 ; a rational of the parameter group
              | (RAT ... RAT)       ; exponents over the generators
    formula  := (REL term) | (and f*) | (or f*) | (not f)
              | (exists VAR f) | (forall VAR f)
    VAR      := INT (1-based) | xINT
    plmap    := (plmap (source NAME|formula) (target-dim INT)
                       (piece formula (maps term*))*)
    action   := (action (space NAME|formula) (elements NAME+) [(table (row NAME+)*)])
    poly     := (poly (term RAT (INT ...))*)
    point    := (point (gs (std ...) (inf RAT*))*)
    monomap  := (monomap (mono CONST (RAT ...))*)

A quantifier-free formula whose context is the session dimension is stored
as a :class:`~plskel.polytopes.Definable`; other formulas stay formulas.
In ``(std ...)`` a list of ``k + 1`` rationals is the log vector
``c0 q1 .. qk`` and a single rational (with ``k >= 1``) is read as a
parameter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from . import logic
from .errors import DimensionMismatch, SessionSyntaxError, ValidationError
from .logic import And, Exists, FAtom, Forall, GenPoint, Not, Or
from .plspaces import GroupAction, Piece, PLMap
from .polytopes import RELS, AffineForm, Cell, Definable
from .scalars import GenScalar, LogConst, ParamExp, Registry, from_rational, registry
from .sexpr import SList, Sym, read_all
from .valuations import LaurentPoly


@dataclass(frozen=True)
class MonoMap:
    """Monomial map ``y_i = consts_i * prod x_j ** rows[i][j]``."""
    rows: tuple
    consts: tuple

    @property
    def forms(self) -> List[AffineForm]:
        return [AffineForm(c, tuple(r)) for r, c in zip(self.rows, self.consts)]

    def int_matrix(self) -> List[List[int]]:
        if any(Fraction(x).denominator != 1 for r in self.rows for x in r):
            raise ValidationError("pushforward needs integer exponents")
        return [[int(x) for x in r] for r in self.rows]


@dataclass
class Session:
    registry: Registry
    dim: int
    defs: Dict[str, object] = field(default_factory=dict)

    def get(self, name: str, *kinds):
        if name not in self.defs:
            raise ValidationError(f"no definition named {name!r}")
        obj = self.defs[name]
        if kinds and not isinstance(obj, kinds):
            want = "/".join(k.__name__ for k in kinds)
            raise ValidationError(f"{name!r} is a {type(obj).__name__}, expected {want}")
        return obj


def _err(node, msg):
    return SessionSyntaxError(msg, node.line, node.col)


def _sym(node, what="symbol") -> str:
    if not isinstance(node, Sym):
        raise _err(node, f"expected {what}")
    return node.text


def _list(node, head=None, minlen=0) -> SList:
    if not isinstance(node, SList):
        raise _err(node, f"expected a list{f' ({head} ...)' if head else ''}")
    if head is not None and node.head != head:
        raise _err(node, f"expected ({head} ...)")
    if len(node) < minlen:
        raise _err(node, f"({node.head} ...) needs at least {minlen - 1} arguments")
    return node


def _rat(node) -> Fraction:
    text = _sym(node, "a rational")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise _err(node, f"bad rational {text!r}") from None


def _int(node) -> int:
    q = _rat(node)
    if q.denominator != 1:
        raise _err(node, f"expected an integer, got {q}")
    return int(q)


class _Parser:
    def __init__(self):
        self.reg: Optional[Registry] = None
        self.dim: Optional[int] = None
        self.defs: Dict[str, object] = {}

    # scalars ---------------------------------------------------------
    def const(self, node) -> ParamExp:
        k = self.reg.k
        if isinstance(node, Sym):
            return from_rational(self.reg, _rat(node))
        exps = [_rat(x) for x in _list(node).items]
        if len(exps) != k:
            raise ValidationError(f"constant with {len(exps)} exponents, registry has {k} generators")
        return ParamExp(tuple(exps))

    def term(self, node, width: Optional[int]) -> AffineForm:
        node = _list(node, "mono", 3)
        if len(node) != 3:
            raise _err(node, "(mono CONST (EXPS)) takes two arguments")
        exps = [_rat(x) for x in _list(node[2]).items]
        if width is not None and len(exps) != width:
            raise _err(node, f"{len(exps)} exponents in a context of {width} variables")
        return AffineForm(self.const(node[1]), tuple(exps))

    def gs(self, node) -> GenScalar:
        node = _list(node, "gs", 3)
        std = [_rat(x) for x in _list(node[1], "std").items[1:]]
        inf = [_rat(x) for x in _list(node[2], "inf").items[1:]]
        k = self.reg.k
        if len(std) == k + 1:
            value = LogConst(std[0], tuple(std[1:]))
        elif len(std) == 1:
            value = LogConst.from_param(from_rational(self.reg, std[0]))
        else:
            raise _err(node, f"(std ...) needs 1 or {k + 1} rationals")
        if len(inf) != self.reg.inf_rank:
            raise ValidationError(f"(inf ...) has {len(inf)} entries, inf-rank is {self.reg.inf_rank}")
        return GenScalar(self.reg, value, tuple(inf))

    # formulas ----------------------------------------------------------
    def _first_width(self, node) -> Optional[int]:
        if isinstance(node, SList):
            if node.head == "mono" and len(node) == 3 and isinstance(node[2], SList):
                return len(node[2])
            for x in node.items:
                w = self._first_width(x)
                if w is not None:
                    return w
        return None

    def formula(self, node, width=None):
        if width is None:
            width = self._first_width(node)
        node = _list(node)
        h = node.head
        if h in RELS:
            if len(node) != 2:
                raise _err(node, f"({h} TERM) takes one term")
            return FAtom(self.term(node[1], width), h)
        if h in ("and", "or"):
            args = tuple(self.formula(x, width) for x in node.items[1:])
            return And(args) if h == "and" else Or(args)
        if h == "not":
            if len(node) != 2:
                raise _err(node, "(not f) takes one formula")
            return Not(self.formula(node[1], width))
        if h in ("exists", "forall"):
            if len(node) != 3:
                raise _err(node, f"({h} VAR f) takes a variable and a formula")
            text = _sym(node[1], "a variable")
            digits = text[1:] if text.startswith("x") else text
            if not digits.isdigit() or int(digits) < 1:
                raise _err(node[1], f"bad variable {text!r}")
            v = int(digits) - 1
            if width is not None and v >= width:
                raise _err(node[1], f"variable {text} outside a context of {width}")
            body = self.formula(node[2], width)
            return Exists(v, body) if h == "exists" else Forall(v, body)
        raise _err(node, f"unknown formula head {h!r}")

    def cell(self, node) -> Cell:
        f = self.formula(node, self.dim)
        if isinstance(f, FAtom):
            atoms = [f]
        elif isinstance(f, And) and all(isinstance(a, FAtom) for a in f.args):
            atoms = list(f.args)
        else:
            raise _err(node, "a piece domain must be an atom or a conjunction of atoms")
        return Cell(self.reg, self.dim, tuple(a.atom for a in atoms))

    def definable(self, node) -> Definable:
        if isinstance(node, Sym):
            obj = self.defs.get(node.text)
            if not isinstance(obj, Definable):
                raise _err(node, f"{node.text!r} is not a defined set")
            return obj
        f = self.formula(node, self.dim)
        if not logic.is_quantifier_free(f):
            f = logic.qe(f, self.reg, self.dim)
        return logic.to_definable(f, self.reg, self.dim)

    # objects -----------------------------------------------------------
    def obj(self, node):
        node = _list(node)
        h = node.head
        if h in RELS or h in ("and", "or", "not", "exists", "forall"):
            f = self.formula(node)
            w = logic.width(f)
            if logic.is_quantifier_free(f) and (w is None or w == self.dim):
                return logic.to_definable(f, self.reg, self.dim)
            if w is not None and w < self.dim:
                raise ValidationError(f"formula context {w} smaller than the dimension {self.dim}")
            return f
        if h == "plmap":
            return self.plmap(node)
        if h == "action":
            return self.action(node)
        if h == "poly":
            terms = {}
            width = None
            for t in node.items[1:]:
                t = _list(t, "term", 3)
                exps = tuple(_int(x) for x in _list(t[2]).items)
                if width is not None and len(exps) != width:
                    raise _err(t, "terms with different numbers of variables")
                width = len(exps)
                terms[exps] = terms.get(exps, Fraction(0)) + _rat(t[1])
            return LaurentPoly(self.dim if width is None else width, terms)
        if h == "point":
            return GenPoint(tuple(self.gs(x) for x in node.items[1:]))
        if h == "monomap":
            forms = [self.term(x, None) for x in node.items[1:]]
            if len({f.n for f in forms}) > 1:
                raise _err(node, "monomap rows of different lengths")
            return MonoMap(tuple(f.exps for f in forms), tuple(f.const for f in forms))
        raise _err(node, f"unknown object {h!r}")

    def plmap(self, node) -> PLMap:
        src = tgt = None
        pieces = []
        for item in node.items[1:]:
            item = _list(item)
            if item.head == "source":
                src = self.definable(item[1])
            elif item.head == "target-dim":
                tgt = _int(item[1])
            elif item.head == "piece":
                if len(item) != 3:
                    raise _err(item, "(piece DOMAIN (maps ...)) takes two arguments")
                dom = self.cell(item[1])
                maps = _list(item[2], "maps")
                pieces.append(Piece(dom, tuple(self.term(t, self.dim) for t in maps.items[1:])))
            else:
                raise _err(item, f"unknown plmap field {item.head!r}")
        if src is None or tgt is None:
            raise _err(node, "plmap needs (source ...) and (target-dim ...)")
        return PLMap(src, tgt, tuple(pieces)).validate()

    def action(self, node) -> GroupAction:
        space = None
        names: List[str] = []
        table = None
        for item in node.items[1:]:
            item = _list(item)
            if item.head == "space":
                space = self.definable(item[1])
            elif item.head == "elements":
                names = [_sym(x, "an element name") for x in item.items[1:]]
            elif item.head == "table":
                table = [[_sym(x) for x in _list(r, "row").items[1:]] for r in item.items[1:]]
            else:
                raise _err(item, f"unknown action field {item.head!r}")
        if space is None or not names:
            raise _err(node, "action needs (space ...) and (elements ...)")
        elems = []
        for nm in names:
            g = self.defs.get(nm)
            if not isinstance(g, PLMap):
                raise ValidationError(f"action element {nm!r} is not a defined plmap")
            elems.append(g)
        tab = None
        if table is not None:
            index = {nm: i for i, nm in enumerate(names)}
            try:
                tab = tuple(tuple(index[x] if x in index else int(x) for x in row) for row in table)
            except ValueError:
                raise ValidationError("table entries must be element names or indices") from None
        return GroupAction(space, tuple(elems), tab, tuple(names)).validate()

    def item(self, node):
        node = _list(node)
        h = node.head
        if h == "registry":
            if self.reg is not None:
                raise _err(node, "registry declared twice")
            gens, m, p = None, 0, None
            for it in node.items[1:]:
                it = _list(it)
                if it.head == "gens":
                    gens = [_rat(x) for x in it.items[1:]]
                elif it.head == "inf-rank":
                    m = _int(it[1])
                elif it.head == "val":
                    rest = list(it.items[1:])
                    if len(rest) == 1 and isinstance(rest[0], SList):
                        rest = list(rest[0].items)
                    mode = _sym(rest[0], "a valuation mode") if rest else ""
                    if mode == "trivial" and len(rest) == 1:
                        p = None
                    elif mode == "p-adic" and len(rest) == 2:
                        p = _int(rest[1])
                    else:
                        raise _err(it, "expected (val trivial) or (val p-adic P)")
                else:
                    raise _err(it, f"unknown registry field {it.head!r}")
            if gens is None:
                raise _err(node, "registry needs (gens ...)")
            self.reg = registry(gens, m, p)
        elif h == "dim":
            if self.dim is not None:
                raise _err(node, "dim declared twice")
            self.dim = _int(node[1])
            if self.dim < 0:
                raise ValidationError("negative dimension")
        elif h == "def":
            if self.reg is None or self.dim is None:
                raise _err(node, "(registry ...) and (dim ...) must precede definitions")
            if len(node) != 3:
                raise _err(node, "(def NAME OBJECT) takes two arguments")
            name = _sym(node[1], "a name")
            if name in self.defs:
                raise ValidationError(f"name {name!r} defined twice")
            self.defs[name] = self.obj(node[2])
        else:
            raise _err(node, f"unknown top-level form {h!r}")


def parse_session(text: str) -> Session:
    p = _Parser()
    for node in read_all(text):
        p.item(node)
    if p.reg is None:
        raise ValidationError("session has no registry")
    if p.dim is None:
        raise ValidationError("session has no dim")
    return Session(p.reg, p.dim, p.defs)


# ---------------------------------------------------------------------------
# Rendering

def rat(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _rats(xs) -> str:
    return " ".join(rat(x) for x in xs)


def render_const(c: ParamExp) -> str:
    return f"({_rats(c.exps)})"


def render_term(f: AffineForm, width: Optional[int] = None) -> str:
    exps = f.exps
    if width is not None and width < len(exps):
        if any(exps[width:]):
            raise DimensionMismatch("term uses variables beyond the rendering width")
        exps = exps[:width]
    return f"(mono {render_const(f.const)} ({_rats(exps)}))"


def render_atom(a, width=None) -> str:
    return f"({a.rel} {render_term(a.form, width)})"


def render_formula(f, width=None) -> str:
    if isinstance(f, FAtom):
        return render_atom(f, width)
    if isinstance(f, (And, Or)):
        head = "and" if isinstance(f, And) else "or"
        return "(" + " ".join([head] + [render_formula(a, width) for a in f.args]) + ")"
    if isinstance(f, Not):
        return f"(not {render_formula(f.arg, width)})"
    head = "exists" if isinstance(f, Exists) else "forall"
    return f"({head} {f.var + 1} {render_formula(f.body, width)})"


def render_cell(c: Cell) -> str:
    return "(" + " ".join(["and"] + [render_atom(a) for a in c.atoms]) + ")"


def render_definable(d: Definable) -> str:
    return "(" + " ".join(["or"] + [render_cell(c) for c in d.cells]) + ")"


def render_gs(x: GenScalar) -> str:
    return f"(gs (std {_rats(x.std.vector)}) (inf{' ' if x.inf else ''}{_rats(x.inf)}))"


def render_point(p) -> str:
    return "(" + " ".join(["point"] + [render_gs(x) for x in p]) + ")"


def render_plmap(f: PLMap) -> str:
    parts = ["plmap", f"(source {render_definable(f.source)})", f"(target-dim {f.target_dim})"]
    for p in f.pieces:
        maps = " ".join(["maps"] + [render_term(t) for t in p.forms])
        parts.append(f"(piece {render_cell(p.domain)} ({maps}))")
    return "(" + " ".join(parts) + ")"


def render_action(a: GroupAction) -> str:
    parts = ["action", f"(space {render_definable(a.space)})",
             "(" + " ".join(["elements", *a.names]) + ")"]
    if a.table is not None:
        rows = " ".join("(" + " ".join(["row"] + [a.names[i] for i in r]) + ")" for r in a.table)
        parts.append(f"(table {rows})")
    return "(" + " ".join(parts) + ")"


def render_poly(f: LaurentPoly) -> str:
    terms = [f"(term {rat(c)} ({' '.join(map(str, e))}))" for e, c in sorted(f.terms.items())]
    return "(" + " ".join(["poly"] + terms) + ")"


def render_monomap(m: MonoMap) -> str:
    return "(" + " ".join(["monomap"] + [render_term(f) for f in m.forms]) + ")"


def render_object(obj) -> str:
    if isinstance(obj, Definable):
        return render_definable(obj)
    if isinstance(obj, PLMap):
        return render_plmap(obj)
    if isinstance(obj, GroupAction):
        return render_action(obj)
    if isinstance(obj, LaurentPoly):
        return render_poly(obj)
    if isinstance(obj, GenPoint):
        return render_point(obj)
    if isinstance(obj, MonoMap):
        return render_monomap(obj)
    return render_formula(obj)


def render_registry(reg: Registry) -> str:
    val = "trivial" if reg.p is None else f"p-adic {reg.p}"
    return f"(registry (gens {_rats(reg.generators)}) (inf-rank {reg.inf_rank}) (val {val}))"


def render_session(s: Session) -> str:
    lines = [render_registry(s.registry), f"(dim {s.dim})"]
    lines += [f"(def {name} {render_object(obj)})" for name, obj in s.defs.items()]
    return "\n".join(lines) + "\n"
