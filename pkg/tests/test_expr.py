from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from displab import expr
from displab.expr import BranchPow, Const, ExpPhase, Pow, Prod, Special, Sum, Terms, Var

r, s, t = Var("r"), Var("s"), Var("t")
PHASE = (((2, 0, 0, -1), Fraction(-1, 4)), ((1, 1, 0, 0), Fraction(1, 3)))


def sample_tree():
    return Prod((
        Const(0.7 - 0.2j), BranchPow(Fraction(-3, 2)),
        Pow(Sum((r, s)), Fraction(3)), Pow(r, Fraction(-1, 2)),
        ExpPhase(PHASE),
        Special("omega", Fraction(0), Fraction(-1, 2), (1, 1, 0, -1)),
    ))


def direct(rv, sv, tv):
    from displab.specfun import omega
    return ((0.7 - 0.2j) * expr.branch_pow(tv, -1.5) * (rv + sv) ** 3 / np.sqrt(rv)
            * np.exp(1j * (-rv * rv / (4 * tv) + rv * sv / 3)) * omega(-rv * sv / (2 * tv)))


def test_branch_power_convention():
    for p in (-1.5, -0.5, 1.0, -3.5):
        v = expr.branch_pow(0.3, p)
        assert abs(v) == pytest.approx((4 * np.pi * 0.3) ** p, rel=1e-14)
        assert np.angle(v) == pytest.approx(np.angle(np.exp(-0.5j * np.pi * p)), abs=1e-12)
    # (-4 pi i t)^1 is the literal product
    assert expr.branch_pow(0.3, 1) == pytest.approx(-4j * np.pi * 0.3, rel=1e-14)


@given(st.floats(0.5, 5), st.floats(0.5, 5), st.floats(0.05, 1))
def test_canonical_form_evaluates_like_tree(rv, sv, tv):
    v = expr.simplify(sample_tree()).evaluate(r=rv, s=sv, t=tv)
    assert v == pytest.approx(direct(rv, sv, tv), rel=1e-10)


def test_powers_of_t_fold_into_branch():
    a = Prod((Pow(t, Fraction(-2)), BranchPow(Fraction(1, 2))))
    assert a.evaluate(t=0.37) == pytest.approx(0.37**-2 * expr.branch_pow(0.37, 0.5), rel=1e-13)
    keys = list(a.to_terms().d)
    assert len(keys) == 1 and keys[0].p == Fraction(-3, 2)


def test_like_terms_merge():
    e = Sum((Prod((Const(2), r, ExpPhase(PHASE))), Prod((Const(3), r, ExpPhase(PHASE)))))
    terms = e.to_terms().prune()
    assert len(terms) == 1
    assert list(terms.d.values())[0] == pytest.approx(5)
    assert (e - e).to_terms().prune().is_zero()


def test_exponentials_multiply_by_adding_phases():
    a = ExpPhase(((((1, 0, 0, 0)), Fraction(1)),))
    b = ExpPhase(((((1, 0, 0, 0)), Fraction(-1)),))
    terms = Prod((a, b)).to_terms().prune()
    assert len(terms) == 1 and list(terms.d)[0].phase == ()


@pytest.mark.parametrize("var", ["r", "s", "t"])
def test_tree_and_canonical_derivatives_agree(var):
    tree = sample_tree()
    a = tree.diff(var).to_terms().prune()
    b = tree.to_terms().diff(var).prune()
    assert (a - b).prune().is_zero(tol=1e-12, scale=max(a.max_coef(), 1.0))


@given(st.floats(0.5, 5), st.floats(0.5, 5), st.floats(0.1, 1), st.sampled_from(["r", "s", "t"]))
def test_derivative_matches_differences(rv, sv, tv, var):
    d = expr.simplify(sample_tree()).to_terms().diff(var)
    env = dict(r=rv, s=sv, t=tv)
    h = 1e-4 * env[var]

    def f(x):
        e = dict(env, **{var: x})
        return direct(e["r"], e["s"], e["t"])

    x = env[var]
    num = (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)
    assert abs(d.evaluate(**env) - num) <= 1e-6 * max(abs(num), 1e-3 * abs(f(x)))


def test_hankel_special_derivative():
    e = Special("hankel1", Fraction(0), Fraction(1), (1, 0, 1, 0))
    d = e.diff("r").evaluate(r=2.0, k=1.5)
    import scipy.special as sp
    assert d == pytest.approx(-1.5 * sp.hankel1(1, 3.0), rel=1e-9)


def test_round_trip_and_text():
    tree = sample_tree()
    rebuilt = expr.from_terms(tree.to_terms())
    assert expr.expr_allclose(tree, rebuilt)
    assert expr.to_text(tree) == expr.to_text(rebuilt)
    assert expr.to_text(Const(0)) == "0"
    assert not expr.expr_allclose(tree, Prod((Const(1.01), tree)))


def test_terms_power_of_sum():
    sq = Terms.monomial(1, r=1) + Terms.monomial(1, s=1)
    cube = sq.power(Fraction(3))
    assert len(cube.prune()) == 4
    half = (Terms.monomial(4, r=2)).power(Fraction(1, 2))
    assert half.evaluate(r=3.0) == pytest.approx(6.0)
