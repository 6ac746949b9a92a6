from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistsheaf.errors import InvalidHodgeData, StraddlingSelector
from twistsheaf.exact import RatMatrix
from twistsheaf.l2 import is_integrable_1d
from twistsheaf.prolongation import LocalMonodromy
from twistsheaf.ssheaf import (
    HodgeFiberData, TwistSpec, generator_report, r_lattice, twisted_exponents,
    validate_limit_positivity,
)

N = RatMatrix.from_rows([[0, 0], [1, 0]])


def trivial(n=2):
    return LocalMonodromy.trivial(1, n), HodgeFiberData.build(0, {(0, 0): 1}, [0])


def unipotent():
    return LocalMonodromy.build(2, [((0,), [[1, 0], [0, 1]])], [N])


def test_trivial_floor():
    M, H = trivial()
    B = r_lattice(M, H)
    assert twisted_exponents(B, TwistSpec.of(["5/6", "3/2"])) == [[0, 1]]
    assert twisted_exponents(B, TwistSpec.of([5, 9], m=6)) == [[0, 1]]


def test_ties_resolve_down():
    M, H = trivial(1)
    B = r_lattice(M, H)
    assert twisted_exponents(B, TwistSpec.of([1])) == [[1]]
    assert twisted_exponents(B, TwistSpec.of([0])) == [[0]]


def test_mixed_block():
    M = LocalMonodromy.build(2, [((Fraction(-1, 2),), [[1, 0]]), ((0,), [[0, 1]])])
    H = HodgeFiberData.build(1, {(1, 0): 1, (0, 1): 1}, [0])
    B = r_lattice(M, H)
    assert B.betas() == [(Fraction(-1, 2),)]
    assert twisted_exponents(B, TwistSpec.of(["1/2"])) == [[1]]


def test_report_terms():
    M = unipotent()
    H = HodgeFiberData.build(1, {(1, 0): 1, (0, 1): 1}, [0])
    rows = generator_report(r_lattice(M, H), TwistSpec.of([Fraction(3, 2)]), M)
    assert rows[0]["shift"] == [1]
    assert rows[0]["nilpotent_twist"] == ["N1"]
    assert "exp(log(z1) N1) v1" in rows[0]["term"]


def test_limit_positivity_against_weight_oracle():
    M = unipotent()
    # N v1 = v2, so im N = span(v2) = W_{-1}
    assert validate_limit_positivity(M, HodgeFiberData.build(1, {(1, 0): 1, (0, 1): 1}, [0]))
    assert not validate_limit_positivity(M, HodgeFiberData.build(1, {(1, 0): 1, (0, 1): 1}, [1]))


def test_straddling_selector():
    M = LocalMonodromy.build(2, [((Fraction(-1, 2),), [[1, 1]]), ((0,), [[0, 1]])])
    H = HodgeFiberData.build(1, {(1, 0): 1, (0, 1): 1}, [0])
    with pytest.raises(StraddlingSelector):
        r_lattice(M, H)


@pytest.mark.parametrize("dims,selector", [
    ({(1, 0): 1, (0, 1): 1}, []),
    ({(1, 0): 1, (0, 1): 1}, [0, 1]),
    ({(1, 1): 1}, [0]),
])
def test_bad_hodge_data(dims, selector):
    with pytest.raises(InvalidHodgeData):
        HodgeFiberData.build(1, dims, selector)


def test_rank_mismatch():
    M = unipotent()
    with pytest.raises(InvalidHodgeData):
        r_lattice(M, HodgeFiberData.build(0, {(0, 0): 1}, [0]))


@settings(max_examples=200, deadline=None)
@given(
    st.fractions(min_value=Fraction(-7, 8), max_value=0, max_denominator=8),
    st.fractions(min_value=0, max_value=4, max_denominator=8),
)
def test_shift_is_least_integrable_power(alpha, w):
    M = LocalMonodromy.build(1, [((alpha,), [[1]])])
    H = HodgeFiberData.build(0, {(0, 0): 1}, [0])
    B = r_lattice(M, H)
    (shift,), = twisted_exponents(B, TwistSpec.of([w]))
    beta = B.betas()[0][0]
    # z^e times the generator has weight exponent e + beta - w; the shift is
    # the least e for which that exceeds -1
    assert is_integrable_1d(shift, beta - w)
    assert not is_integrable_1d(shift - 1, beta - w)
