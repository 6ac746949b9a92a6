import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistsheaf.errors import Indeterminate, IndexMismatch, ZeroSection
from twistsheaf.l2 import (
    TWISTS, LaurentSection, Trend, WeightProfile, is_integrable_1d, membership,
    numeric_integral, numeric_membership, shell_trend, slack_verdict,
    smooth_twist_invariance, tameness_check, valuation,
)

V_GRID = range(-2, 4)
A_GRID = [Fraction(-9, 4), Fraction(-3, 2), Fraction(-1), Fraction(-5, 6), Fraction(-1, 2), Fraction(0), Fraction(3, 4)]


def sec(terms, rank=1, nb=1, ni=0):
    return LaurentSection.from_dict(terms, rank, nb, ni)


def test_valuation_examples():
    assert valuation(sec({(0,): [1]}), 0) == 0
    assert valuation(sec({(2,): [1], (5,): [1]}), 0) == 2
    assert valuation(sec({(-1,): [1, 0], (3,): [0, 1]}, rank=2), 0) == -1
    with pytest.raises(ZeroSection):
        valuation(sec({}), 0)


@pytest.mark.parametrize("v,a,expected", [
    (0, Fraction(-1, 2), True), (0, Fraction(-1), False), (1, Fraction(-3, 2), True),
])
def test_criterion_examples(v, a, expected):
    assert is_integrable_1d(v, a) is expected
    assert slack_verdict(v, a) is expected


def test_numeric_examples():
    r = numeric_integral(0, 0)
    assert r.status is Trend.CONVERGENT and abs(r.value - math.pi / 4) < 1e-6
    assert numeric_integral(0, Fraction(-3, 2)).status is Trend.DIVERGENT
    r = numeric_integral(1, -1)
    assert r.status is Trend.CONVERGENT and abs(r.radial_value - 1 / 8) < 1e-6
    with pytest.raises(Indeterminate):
        numeric_integral(0, -1).verdict()


@pytest.mark.parametrize("v", V_GRID)
@pytest.mark.parametrize("a", A_GRID)
def test_oracle_agreement(v, a):
    r = numeric_integral(v, a)
    if v + a == -1:
        assert r.status is Trend.INDETERMINATE
    else:
        assert r.verdict() == is_integrable_1d(v, a)


def test_shell_trend_classes():
    geometric = [0.5 ** k for k in range(37)]
    assert shell_trend(geometric)[0] is Trend.CONVERGENT
    assert shell_trend([2.0 ** k for k in range(37)])[0] is Trend.DIVERGENT
    assert shell_trend([1.0] * 37)[0] is Trend.INDETERMINATE


def test_membership_examples():
    gen = sec({(0,): [1]})
    assert membership(gen, WeightProfile.of([[0]]))
    assert not membership(sec({(-1,): [1]}), WeightProfile.of([[0]]))
    assert membership(sec({(1,): [1]}), WeightProfile.of([["-3/2"]]))
    with pytest.raises(IndexMismatch):
        membership(sec({(0,): [1, 0]}, rank=2), WeightProfile.of([[0]]))


@settings(max_examples=60, deadline=None)
@given(
    st.dictionaries(st.tuples(st.integers(-2, 3), st.integers(0, 2)), st.integers(-3, 3), min_size=1, max_size=4),
    st.integers(1, 5),
)
def test_unit_multiplication_preserves_membership(terms, c0):
    f = sec({e: [c] for e, c in terms.items()}, nb=1, ni=1)
    if f.is_zero():
        return
    W = WeightProfile.of([["-1/2"]])
    unit = {(0, 0): c0, (1, 0): 1, (0, 1): -2}
    assert membership(f.times_polynomial(unit), W) == membership(f, W)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.integers(-2, 2), min_size=1, max_size=4))
def test_zero_weight_reduces_to_holomorphy(terms):
    f = sec({e: [c] for e, c in terms.items()}, nb=2)
    if f.is_zero():
        return
    holomorphic = all(min(e) >= 0 for e, _ in f.terms)
    assert membership(f, WeightProfile.of([[0, 0]])) == holomorphic


@pytest.mark.parametrize("first,second", [((0,), (-1,)), ((1,), (0,)), ((-1,), (-1,)), ((0,), (0,))])
def test_sum_is_conjunction_numeric_spot_check(first, second):
    W = WeightProfile.of([["-1/2"], ["-1/4"]])
    f1 = sec({first: [1, 0]}, rank=2)
    f2 = sec({second: [0, 1]}, rank=2)
    total = f1 + f2
    expect = membership(f1, W) and membership(f2, W)
    assert membership(total, W) == expect
    status = numeric_membership(total, W)["status"]
    assert status is (Trend.CONVERGENT if expect else Trend.DIVERGENT)


@pytest.mark.parametrize("name", sorted(TWISTS))
def test_twist_invariance(name):
    W = WeightProfile.of([["-1/2", 0], [0, "-3/4"]])
    for f in [sec({(0, 0): [1, 0]}, rank=2, nb=2), sec({(0, -1): [0, 1], (1, 0): [1, 0]}, rank=2, nb=2)]:
        out = smooth_twist_invariance(f, W, TWISTS[name])
        assert out["invariant"] and out["agrees_with_symbolic"]


def _samples(k=60):
    z = np.geomspace(0.5, 1e-8, k) * np.exp(0.3j)
    return z


def test_tameness_identity_c0():
    z = _samples()
    h = np.broadcast_to(np.eye(2), (len(z), 2, 2))
    res = tameness_check(h, h, z, 0)
    assert res.tame and abs(res.constant - 1) < 1e-12


def test_tameness_tate_lower_bound():
    z = _samples()
    t = -np.log(np.abs(z))
    h = np.stack([np.diag([ti / math.pi, math.pi / ti]) for ti in t])
    h0 = np.broadcast_to(np.eye(2), h.shape)
    res = tameness_check(h, h0, z, 1)
    assert res.tame and res.constant < 2


def test_tameness_fails_for_fast_decay_and_fast_growth():
    z = _samples()
    r2 = np.abs(z) ** 2
    h0 = np.ones((len(z), 1, 1))
    decay = (r2 ** 3)[:, None, None]
    assert not tameness_check(decay, h0, z, 1).tame
    growth = (r2 ** -3)[:, None, None]
    assert not tameness_check(growth, h0, z, 1, side="upper").tame
    assert tameness_check(growth, h0, z, 1).tame
