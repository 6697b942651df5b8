import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
import oracles
from plskel import registry
from plskel.errors import DimensionMismatch, EmptyDefinable, NotQuantifierFree
from plskel.logic import (And, Exists, FAtom, Forall, GenPoint, Not, Or, evaluate, free_vars,
                          from_definable, generated_atoms, is_quantifier_free, qe,
                          quantifier_blocks, restriction_ultrafilter, sample_type, to_definable,
                          ultrafilter_atom)
from plskel.polytopes import AffineForm, Definable, member
from plskel.scalars import GenScalar, LogConst, from_rational

REG = registry([2, 3], inf_rank=2)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def F(exps, rel, c=1):
    return FAtom(AffineForm(from_rational(REG, c), tuple(exps)), rel)


def gs(q, *inf):
    inf = tuple(inf) + (0,) * (REG.inf_rank - len(inf))
    return GenScalar(REG, LogConst.from_param(from_rational(REG, q)), tuple(Fraction(e) for e in inf))


def as_set(f, n):
    return to_definable(f, REG, n)


# qe ------------------------------------------------------------------------

def test_qe_examples():
    # exists y (x <= y and y <= 2)
    f = Exists(1, And((F([1, -1], "<="), F([0, 1], "<=", Fraction(1, 2)))))
    g = qe(f, REG)
    assert is_quantifier_free(g)
    assert as_set(g, 2).equivalent(as_set(F([1, 0], "<=", Fraction(1, 2)), 2))
    # exists y (y^2 = x)
    assert as_set(qe(Exists(1, F([-1, 2], "=")), REG), 2).equivalent(Definable.ambient(REG, 2))
    # forall y (y >= x)
    assert as_set(qe(Forall(1, F([-1, 1], ">=")), REG), 2).is_empty()


def test_qe_keeps_strictness():
    # exists y (x < y < 2) is x < 2, not x <= 2
    f = Exists(1, And((F([1, -1], "<"), F([0, 1], "<", Fraction(1, 2)))))
    d = as_set(qe(f, REG), 2)
    assert member(d, (gs(1), gs(1)))
    assert not member(d, (gs(2), gs(1)))
    assert member(d, (gs(2, -1), gs(1)))


def test_formula_structure():
    f = Not(Exists(2, Forall(1, Or((F([1, 1, 1], "<"), F([1, 0, 0], "=", 2))))))
    assert quantifier_blocks(f) == 2
    assert free_vars(f) == [0]
    assert quantifier_blocks(Exists(1, Exists(2, F([1, 1, 1], "<")))) == 1
    assert not is_quantifier_free(f)


# eval ----------------------------------------------------------------------

def test_eval_examples():
    g = GenPoint((gs(2, 1),))
    assert evaluate(F([1], "<=", Fraction(1, 4)), g)
    assert evaluate(F([1], ">", Fraction(1, 2)), g)
    assert not evaluate(F([1], "=", Fraction(1, 2)), g)


def test_eval_errors():
    with pytest.raises(NotQuantifierFree):
        evaluate(Exists(0, F([1], "<")), (gs(1),))
    with pytest.raises(DimensionMismatch):
        evaluate(F([1, 1], "<"), ())


def _rewrite(f, rng):
    """An equivalent formula obtained by random Boolean identities."""
    if isinstance(f, FAtom):
        r = rng.random()
        if r < 0.2:
            return Not(Not(f))
        if r < 0.4:
            neg = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}.get(f.rel)
            if neg:
                return Not(FAtom(f.form, neg))
        if r < 0.5:
            return FAtom(f.form.inverse(), {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}[f.rel])
        return f
    if isinstance(f, Not):
        a = f.arg
        if isinstance(a, (And, Or)) and rng.random() < 0.5:
            dual = Or if isinstance(a, And) else And
            return dual(tuple(_rewrite(Not(x), rng) for x in a.args))
        return Not(_rewrite(a, rng))
    args = tuple(_rewrite(x, rng) for x in f.args)
    if len(args) == 2 and rng.random() < 0.3:
        args = args[::-1]
    if isinstance(f, And) and len(args) == 2 and isinstance(args[1], Or) and rng.random() < 0.5:
        a, (b, c) = args[0], args[1].args[:2] if len(args[1].args) == 2 else (None, None)
        if b is not None:
            return Or((And((a, b)), And((a, c))))
    return type(f)(args)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_eval_depends_only_on_the_set(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    f1 = gen.qf_formula(rng, n, REG.k, rng.randint(1, 5))
    f2 = _rewrite(f1, rng)
    anchors = [a.form.const.inverse() for a in _atoms(f1)]
    oracle = oracles.Oracle(REG)
    for _ in range(10):
        g = gen.gen_point(rng, REG, n, anchors)
        v = evaluate(f1, g, REG)
        assert v == evaluate(f2, g, REG)
        assert v == oracle.decide_at(f1, n, g)
        assert v == member(as_set(f1, n), g)


def _atoms(f):
    if isinstance(f, FAtom):
        return [f]
    if isinstance(f, Not):
        return _atoms(f.arg)
    return [a for x in f.args for a in _atoms(x)]


def test_definable_round_trip():
    rng = random.Random(3)
    for _ in range(20):
        d = gen.definable(rng, REG, 2, 4)
        assert as_set(from_definable(d), 2).equivalent(d)


# sample_type ---------------------------------------------------------------

def test_sample_type_examples():
    g = sample_type(Definable.from_atoms(REG, 1, F([1], ">=", Fraction(1, 2)).atom))
    assert g.coords == (gs(2),)
    g = sample_type(Definable.from_atoms(REG, 1, F([1], "<").atom))
    assert g.coords == (gs(1, -1),)
    d = Definable.from_atoms(REG, 1, F([1], ">").atom, F([1], "<", Fraction(1, 2)).atom)
    assert member(d, sample_type(d))


def test_sample_type_empty():
    with pytest.raises(EmptyDefinable):
        sample_type(Definable.from_atoms(REG, 1, F([1], "<").atom, F([1], ">").atom))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_sample_type_member(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    d = gen.definable(rng, REG, n, 5)
    if d.is_empty():
        return
    g = sample_type(d)
    assert member(d, g)
    assert not member(d.complement(), g)
    # closed cuts are realized at standard points
    if d.nonempty_cells()[0].strict_free:
        assert all(x.is_standard() for x in g)


# ultrafilters --------------------------------------------------------------

def _set(*atoms, n=1):
    return Definable.from_atoms(REG, n, *(a.atom for a in atoms))


def test_ultrafilter_examples():
    fam = [_set(F([1], "<=")), _set(F([1], ">"))]
    for q in (Fraction(1, 2), 1, 2):
        for inf in (-1, 0, 1):
            assert sum(restriction_ultrafilter((gs(q, inf),), fam)) == 1
    assert restriction_ultrafilter((gs(1),), [Definable.empty(REG, 1)]) == [False]
    two, four = _set(F([1], "<=", Fraction(1, 2))), _set(F([1], "<=", Fraction(1, 4)))
    assert restriction_ultrafilter((gs(3),), [two, four]) == [False, True]
    assert two.issubset(four)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_ultrafilter_picks_one_atom(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    fam = [gen.definable(rng, REG, n, 3) for _ in range(rng.randint(1, 4))]
    anchors = [a.form.const.inverse() for d in fam for a in d.atoms()]
    g = gen.gen_point(rng, REG, n, anchors)
    vec = restriction_ultrafilter(g, fam)
    hits = ultrafilter_atom(g, fam)
    assert hits == [tuple(vec)]
    # filter axioms on the generated algebra: upward closed, closed under meets
    keys = {k for k, _ in generated_atoms(fam)}
    assert tuple(vec) in keys
    for i, a in enumerate(fam):
        for j, b in enumerate(fam):
            if vec[i] and vec[j]:
                assert member(a & b, g)
            if vec[i] and a.issubset(b):
                assert vec[j]
