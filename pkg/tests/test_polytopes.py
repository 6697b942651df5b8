import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
import oracles
from plskel import registry
from plskel.errors import DimensionMismatch, EmptyCell, StrictAtomPresent
from plskel.polytopes import (NEG_INFINITY, AffineForm, Atom, Cell, Definable, boundary, decompose,
                              dimension, image_affine, is_empty, member)
from plskel.scalars import GenScalar, from_rational

REG = registry([2, 3], inf_rank=2)
GENS = tuple(Fraction(g) for g in REG.generators)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def A(exps, rel, c=1, reg=REG):
    """Atom ``c * x^exps REL 1``."""
    return Atom(AffineForm(from_rational(reg, c), tuple(exps)), rel)


def D(n, *atoms, reg=REG):
    return Definable.from_atoms(reg, n, *atoms)


def pt(*qs, reg=REG):
    return tuple(GenScalar.of_rational(reg, q) for q in qs)


# emptiness -----------------------------------------------------------------

def test_emptiness_examples():
    assert is_empty(D(1, A([1], "<="), A([1], ">=", Fraction(1, 2))))
    assert not is_empty(D(1, A([1], "<=", 2), A([1], ">=", 4)))
    assert is_empty(D(2, A([1, 1], "<="), A([1, 0], ">=", Fraction(1, 2)), A([0, 1], ">=", Fraction(1, 2))))
    assert not is_empty(Definable.ambient(REG, 3))
    assert is_empty(Definable.empty(REG, 2))


def test_strict_emptiness():
    assert is_empty(D(1, A([1], "<"), A([1], ">")))
    assert not is_empty(D(1, A([1], "<="), A([1], ">=")))
    assert is_empty(D(1, A([1], "<"), A([1], ">=")))


def test_emptiness_against_lp():
    rng = random.Random(11)
    agree = skipped = 0
    for _ in range(400):
        n = rng.randint(1, 3)
        cell = Cell(REG, n, tuple(gen.atom(rng, n, REG.k) for _ in range(rng.randint(1, 6))))
        lp = oracles.lp_nonempty(cell, GENS)
        if lp is oracles.AMBIGUOUS:
            skipped += 1
            continue
        assert cell.is_empty() == (not lp), str(cell)
        agree += 1
    assert skipped < 0.25 * 400 and agree > 250


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_witness_lies_in_cell(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    cell = Cell(REG, n, tuple(gen.atom(rng, n, REG.k) for _ in range(rng.randint(1, 5))))
    w = cell.witness()
    assert (w is None) == cell.is_empty()
    if w is not None:
        assert cell.contains(w)


# dimension -----------------------------------------------------------------

def test_dimension_examples():
    assert dimension(gen.box(REG, 2)) == 2
    assert dimension(D(2, A([-2, 1], "="))) == 1
    assert dimension(D(1, A([1], "<"), A([1], ">"))) == NEG_INFINITY
    assert dimension(Definable.point(REG, pt(2, 3))) == 0
    # implicit equality from two inequalities
    assert dimension(D(2, A([1, -1], "<="), A([1, -1], ">="), A([1, 0], "<=", 2))) == 1


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_dimension_monotone(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    a, b = gen.definable(rng, REG, n, 4), gen.definable(rng, REG, n, 4)
    da, db = dimension(a), dimension(b)
    assert dimension(a | b) == max(da, db)
    assert dimension(a & b) <= min(da, db)
    assert NEG_INFINITY <= da <= n


# boundary ------------------------------------------------------------------

def test_boundary_examples():
    seg = D(1, A([1], ">=", 2), A([1], "<=", Fraction(1, 2))).cells[0]
    b = boundary(seg)
    assert b.equivalent(Definable.point(REG, pt(Fraction(1, 2))) | Definable.point(REG, pt(2)))
    assert boundary(D(1, A([1], "=")).cells[0]).is_empty()
    half = D(2, A([1, 0], "<=", Fraction(1, 2))).cells[0]
    assert boundary(half).equivalent(D(2, A([1, 0], "=", Fraction(1, 2))))


def test_boundary_errors():
    with pytest.raises(StrictAtomPresent):
        boundary(D(1, A([1], "<")).cells[0])
    with pytest.raises(EmptyCell):
        boundary(D(1, A([1], "<="), A([1], ">=", Fraction(1, 2))).cells[0])


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_boundary_is_thin_and_inside(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    c = gen.bounded_cell(rng, REG, n).closure()
    if c.is_empty():
        return
    b = boundary(c)
    assert b.issubset(c.as_definable())
    if not b.is_empty():
        assert dimension(b) < dimension(c)


# decompose -----------------------------------------------------------------

def _x(i, n):
    return AffineForm.coordinate(i, n, REG.k)


def test_decompose_examples():
    line = Definable.ambient(REG, 1)
    dec = decompose([_x(0, 1)], line)
    assert len(dec.cells) == 3
    assert sorted(dimension(c) for c in dec.cells) == [0, 1, 1]
    assert decompose([], line).as_definable().equivalent(line)
    sq = gen.box(REG, 2)
    dec = decompose([_x(0, 2), AffineForm.monomial((1, 1), k=REG.k)], sq)
    assert len(dec.cells) == 9
    assert dec.as_definable().equivalent(sq)


def _incidence_by_boundary(dec):
    out = []
    for i, ci in enumerate(dec.cells):
        b = boundary(ci)
        out.append(tuple(j for j, cj in enumerate(dec.cells)
                         if j != i and dec.target_index[j] == dec.target_index[i]
                         and cj.as_definable().issubset(b)))
    return out


def test_incidence_matches_boundary_definition():
    sq = gen.box(REG, 2)
    dec = decompose([_x(0, 2), AffineForm.monomial((1, 1), k=REG.k)], sq)
    assert list(dec.incidence) == _incidence_by_boundary(dec)
    rng = random.Random(5)
    for _ in range(6):
        n = rng.randint(1, 2)
        target = gen.bounded_cell(rng, REG, n).closure().as_definable()
        fam = [gen.form(rng, n, REG.k) for _ in range(rng.randint(1, 2))]
        d = decompose(fam, target)
        assert list(d.incidence) == _incidence_by_boundary(d)


# image ---------------------------------------------------------------------

def test_image_examples():
    seg = D(1, A([1], ">="), A([1], "<=", Fraction(1, 2)))
    sq = AffineForm.monomial((2,), k=REG.k)
    assert image_affine(seg, [sq]).equivalent(D(1, A([1], ">="), A([1], "<=", Fraction(1, 4))))
    box = gen.box(REG, 2)
    assert image_affine(box, [_x(0, 2), _x(1, 2)]).equivalent(box)
    empty = D(1, A([1], "<"), A([1], ">"))
    assert image_affine(empty, [sq]).is_empty()
    # projection of the triangle x2 <= x1 <= 2
    tri = D(2, A([-1, 1], "<="), A([1, 0], "<=", Fraction(1, 2)))
    assert image_affine(tri, [_x(1, 2)]).equivalent(D(1, A([1], "<=", Fraction(1, 2))))


def test_image_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        image_affine(gen.box(REG, 2), [AffineForm.monomial((1,), k=REG.k)])


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_image_sound_at_witnesses(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 3), rng.randint(1, 2)
    d = gen.definable(rng, REG, n, 4)
    forms = [gen.form(rng, n, REG.k) for _ in range(m)]
    img = image_affine(d, forms)
    assert dimension(img) <= dimension(d)
    for c in d.cells:
        w = c.witness()
        if w is not None:
            assert member(img, [f.evaluate_in(REG, w) for f in forms])


# member / Boolean laws -----------------------------------------------------

def test_member_examples():
    box = gen.box(REG, 2)
    assert member(box, pt(1, 2))
    assert not member(box, pt(1, 3))
    eps = GenScalar.infinitesimal(REG, 0, 1)
    two = GenScalar.of_rational(REG, 2)
    assert not member(box, (GenScalar.one(REG), two + eps))
    assert member(box, (GenScalar.one(REG), two - eps))
    with pytest.raises(DimensionMismatch):
        member(box, pt(1))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_boolean_laws(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    a, b = gen.definable(rng, REG, n, 4), gen.definable(rng, REG, n, 4)
    assert (~(a | b)).equivalent(~a & ~b)
    assert (a & (a | b)).equivalent(a)
    assert (~~a).equivalent(a)
    assert (a & ~a).is_empty()
    assert (a - b).issubset(a) and ((a - b) & b).is_empty()
    for _ in range(5):
        p = gen.gen_point(rng, REG, n, anchors=[f.const.inverse() for f in gen_forms(a)])
        assert member(a, p) == oracle_member(a, p)
        assert member(~a, p) == (not member(a, p))
        assert member(a | b, p) == (member(a, p) or member(b, p))


def oracle_member(d, p):
    sigma = [oracles.Val.of(x) for x in p]
    return any(all(oracles.HOLDS[at.rel](oracles.val_sign(oracles.form_value(at.form, sigma, REG.k, REG.inf_rank), GENS))
                   for at in c.atoms) for c in d.cells)


def gen_forms(d):
    return [at.form for at in d.atoms()]
