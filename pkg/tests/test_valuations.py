import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
import oracles
from plskel import registry
from plskel.errors import DimensionMismatch, ZeroComponent
from plskel.scalars import GenScalar, LogConst, ParamExp, from_rational, sharp
from plskel.valuations import (ZERO, GaussPoint, LaurentPoly, abhyankar_check, composed_evaluator,
                               default_probes, gauss_eval, gauss_sharp, in_standard_skeleton,
                               pullback_inverse, pushforward_monomial, rank_mod_delta)

P2 = registry([2, 3], inf_rank=2, p=2)
TRIV = registry([2, 3], inf_rank=2)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def gs(reg, q, *inf):
    inf = tuple(inf) + (0,) * (reg.inf_rank - len(inf))
    return GenScalar(reg, LogConst.from_param(from_rational(reg, q)), tuple(Fraction(e) for e in inf))


def T(n, i):
    return LaurentPoly.var(n, i)


def oracle_gauss(f, x):
    """Max over terms with the oracle's value arithmetic; ``None`` for f = 0."""
    reg = x.reg
    gens = tuple(Fraction(g) for g in reg.generators)
    best = None
    for e, c in f.terms.items():
        vec = [Fraction(0)] * (reg.k + 1)
        if reg.p is not None:
            # |c| = p ** -v_p(c), and p is one of the generators
            num, den, v = abs(c.numerator), c.denominator, 0
            while num % reg.p == 0:
                num //= reg.p
                v += 1
            while den % reg.p == 0:
                den //= reg.p
                v -= 1
            vec[1 + gens.index(reg.p)] = Fraction(-v)
        acc = oracles.Val(vec, (Fraction(0),) * reg.inf_rank)
        for k, r in zip(e, x.r):
            acc = acc + oracles.Val.of(r).scale(Fraction(k))
        if best is None or oracles.val_cmp(acc, best, gens) > 0:
            best = acc
    return best


def same(v, w):
    if v is ZERO or w is None:
        return v is ZERO and w is None
    return oracles.Val.of(v).key() == w.key()


# gauss_eval ----------------------------------------------------------------

def test_gauss_eval_examples():
    f = T(1, 0) + LaurentPoly.const(1, 2)
    assert gauss_eval(f, GaussPoint((gs(P2, 1),))) == gs(P2, 1)
    assert gauss_eval(LaurentPoly.const(1, 1), GaussPoint((gs(P2, 1),))) == gs(P2, 1)
    r = gs(P2, 1, -1)
    assert gauss_eval(f, GaussPoint((r,))) == r
    assert gauss_eval(LaurentPoly(1), GaussPoint((r,))) is ZERO
    # 2 dominates T below 1/2
    assert gauss_eval(f, GaussPoint((gs(P2, Fraction(1, 4)),))) == gs(P2, Fraction(1, 2))


def test_coefficients_use_the_registry_valuation():
    f = LaurentPoly.const(1, 12)
    assert gauss_eval(f, GaussPoint((gs(P2, 1),))) == gs(P2, Fraction(1, 4))
    assert gauss_eval(f, GaussPoint((gs(TRIV, 1),))) == gs(TRIV, 1)


def test_gauss_eval_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        gauss_eval(T(2, 0), GaussPoint((gs(P2, 1),)))


@settings(max_examples=150, deadline=None)
@given(seeds, st.booleans())
def test_gauss_eval_matches_max_formula(seed, padic):
    rng = random.Random(seed)
    reg = P2 if padic else TRIV
    n = rng.randint(1, 3)
    f = gen.laurent(rng, n)
    x = gen.gauss_point(rng, reg, n, rng.random() < 0.5)
    assert same(gauss_eval(f, x), oracle_gauss(f, x))


@settings(max_examples=150, deadline=None)
@given(seeds, st.booleans())
def test_multiplicative_and_ultrametric(seed, padic):
    rng = random.Random(seed)
    reg = P2 if padic else TRIV
    n = rng.randint(1, 3)
    f, g = gen.laurent(rng, n), gen.laurent(rng, n)
    x = gen.gauss_point(rng, reg, n, rng.random() < 0.5)
    vf, vg = gauss_eval(f, x), gauss_eval(g, x)
    assert gauss_eval(f * g, x) == vf + vg
    s = gauss_eval(f + g, x)
    if s is not ZERO:
        top = max(vf, vg)
        assert s <= top
        if vf != vg:
            assert s == top
    assert gauss_eval(f, gauss_sharp(x)) == GenScalar.of(reg, sharp(vf))


# gauss_sharp ---------------------------------------------------------------

def test_gauss_sharp_examples():
    x = GaussPoint((gs(TRIV, 2, 1),))
    assert gauss_sharp(x) == GaussPoint.standard(TRIV, [2])
    y = GaussPoint.standard(TRIV, [3, Fraction(1, 2)])
    assert gauss_sharp(y) == y
    z = GaussPoint((gs(TRIV, 1, -1), gs(TRIV, 3)))
    assert gauss_sharp(z) == GaussPoint.standard(TRIV, [1, 3])


# abhyankar -----------------------------------------------------------------

def test_abhyankar_examples():
    x = GaussPoint((gs(P2, 2, 1), gs(P2, Fraction(1, 3), 0, 1)))
    assert abhyankar_check([T(2, 0), T(2, 1)], x, default_probes(2, 2, P2))
    dup = [T(2, 0), T(2, 0)]
    assert not abhyankar_check(dup, x, [T(2, 0) - T(2, 1)])
    y = GaussPoint((gs(P2, 3, 1),))
    assert abhyankar_check([T(1, 0) * T(1, 0)], y, default_probes(1, 3, P2))


def test_abhyankar_zero_component():
    x = GaussPoint((gs(P2, 2),))
    with pytest.raises(ZeroComponent):
        abhyankar_check([LaurentPoly(1)], x, [T(1, 0)])


def test_in_standard_skeleton_examples():
    x = GaussPoint((gs(TRIV, 2, 1), gs(TRIV, 3)))
    assert in_standard_skeleton(x, default_probes(2, 2))
    ev = composed_evaluator([T(2, 0), T(2, 0)], x)
    assert not in_standard_skeleton(x, [T(2, 0) - T(2, 1)], evaluator=ev)
    assert in_standard_skeleton(x, [])


def test_abhyankar_rank():
    # generic generalized point: the classes of the coordinates are independent
    x = GaussPoint((gs(TRIV, 2, 1, 0), gs(TRIV, 3, 0, 1)))
    fs = [T(2, 0), T(2, 1)]
    assert abhyankar_check(fs, x, default_probes(2, 2))
    assert rank_mod_delta([gauss_eval(f, x) for f in fs]) == 2
    assert rank_mod_delta([gs(TRIV, 2), gs(TRIV, 6)]) == 0
    assert rank_mod_delta([ZERO, gs(TRIV, 1, 1)]) == 1


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_rank_bounded_by_dimension(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    x = gen.gauss_point(rng, TRIV, n, True)
    fs = [gen.laurent(rng, n, max_terms=2) for _ in range(rng.randint(1, 4))]
    assert rank_mod_delta([gauss_eval(f, x) for f in fs]) <= n


# pushforward ---------------------------------------------------------------

def test_pushforward_examples():
    one = ParamExp.one(TRIV.k)
    half = GaussPoint((GenScalar.of(TRIV, ParamExp((Fraction(1, 2), 0))),))
    assert pushforward_monomial([[2]], [one], half) == GaussPoint.standard(TRIV, [2])
    x = GaussPoint((gs(TRIV, 2, 1), gs(TRIV, 3, 0, -1)))
    assert pushforward_monomial([[1, 0], [0, 1]], [one, one], x) == x
    assert pushforward_monomial([[1, 1]], [one], GaussPoint.standard(TRIV, [2, 3])) == GaussPoint.standard(TRIV, [6])


def _unimodular(rng, n):
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            c = rng.choice([-1, 1, 2])
            M[i] = [a + c * b for a, b in zip(M[i], M[j])]
    return M


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_pushforward_functorial_and_injective(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    x = gen.gauss_point(rng, TRIV, n, rng.random() < 0.5)
    M1 = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
    M2 = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
    c1 = [gen.param(rng, TRIV.k) for _ in range(n)]
    c2 = [gen.param(rng, TRIV.k) for _ in range(n)]
    M21 = [[sum(M2[i][k] * M1[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    c21 = []
    for i in range(n):
        c = c2[i]
        for k in range(n):
            c = c * c1[k] ** M2[i][k]
        c21.append(c)
    lhs = pushforward_monomial(M2, c2, pushforward_monomial(M1, c1, x))
    assert lhs == pushforward_monomial(M21, c21, x)
    U = _unimodular(rng, n)
    y = pushforward_monomial(U, c1, x)
    assert pullback_inverse(U, c1, y) == x
    # monomial change of variables preserves the Gauss formula on monomials
    f = gen.laurent(rng, n, max_terms=1)
    (e, c), = f.terms.items()
    pulled = LaurentPoly(n, {tuple(sum(e[i] * U[i][j] for i in range(n)) for j in range(n)): c})
    shift = GenScalar.of(TRIV)
    for ei, ci in zip(e, c1):
        shift = shift + GenScalar.of(TRIV, ci) * ei
    assert gauss_eval(f, y) == gauss_eval(pulled, x) + shift
