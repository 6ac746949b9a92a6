import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistsheaf.corpus.oracles import _newton_table
from twistsheaf.errors import InvalidCenter, NotResolved, UnsupportedGerm
from twistsheaf.resolution import (
    AXIS_W, AXIS_Z, BlowupSequence, Center, PlaneCurveGerm, QDivisorGerm, axis_w, axis_z,
    cusp, decompose, jumping_scan, log_resolve, multiplier_ideal, node, pushforward_ideal,
    resolution_independence, smooth, verify_ledger,
)

F = Fraction


def D(*pairs):
    return QDivisorGerm.of(pairs)


def table(A, seq=None, d=12):
    seq = log_resolve(A) if seq is None else seq
    return pushforward_ideal(seq, A, d).monomials


def test_already_snc():
    assert len(log_resolve(D((axis_z(), 1)))) == 0
    assert len(log_resolve(D((node(), 1)))) == 0
    assert len(log_resolve(D((smooth(3), 1)))) == 0


def test_cusp_ledger():
    seq = log_resolve(D((cusp(2, 3), 1)))
    assert len(seq) == 3
    assert [e.discrepancy for e in seq.divisors] == [1, 2, 4]
    assert [e.order("B1") for e in seq.divisors] == [2, 3, 6]
    E3 = seq.divisor("E3")
    assert (E3.order(AXIS_Z), E3.order(AXIS_W)) == (3, 2)
    assert verify_ledger(seq)


def test_pushforward_examples():
    assert table(D((axis_z(), F(1, 2)))) == table(D())
    assert (0, 0) in table(D((cusp(2, 3), F(4, 5))))
    t = table(D((cusp(2, 3), F(5, 6))))
    assert t == {(i, j) for i in range(13) for j in range(13 - i)} - {(0, 0)}


def test_conditions_of_cusp():
    seq = log_resolve(D((cusp(2, 3), 1)))
    ideal = pushforward_ideal(seq, D((cusp(2, 3), F(5, 6))))
    e3 = next(c for c in ideal.conditions if c.component == "E3")
    assert e3.order_of_A == 5 and e3.threshold == 1
    assert ideal.generators() == [(0, 1), (1, 0)]


def test_zero_divisor_is_unit_under_any_sequence():
    A = D()
    seq = BlowupSequence.empty(A).blow_up(Center.origin()).blow_up(Center.free("E1", 3))
    assert pushforward_ideal(seq, A).is_unit()


@pytest.mark.parametrize("germ", [
    PlaneCurveGerm.from_dict({(2, 0): 1, (0, 4): -1}),
    PlaneCurveGerm.from_dict({(4, 0): 1, (1, 1): 1, (0, 4): 1}),
    PlaneCurveGerm.from_dict({(4, 0): 1, (2, 3): -2, (0, 6): 1, (1, 5): 1}),
])
def test_unsupported(germ):
    with pytest.raises(UnsupportedGerm):
        log_resolve(D((germ, 1)))


def test_monomial_times_unit_is_an_axis():
    g = PlaneCurveGerm.from_dict({(3, 0): 1, (1, 0): -1, (1, 2): -1})
    assert decompose(g) == (1, 0, None)


def test_germ_validation():
    with pytest.raises(UnsupportedGerm):
        PlaneCurveGerm.from_dict({(0, 0): 1, (1, 0): 1})
    with pytest.raises(UnsupportedGerm):
        cusp(2, 4)


def test_decompose_and_parse():
    g = PlaneCurveGerm.parse("z**3*w - z*w**4")
    a, b, br = decompose(g)
    assert (a, b) == (1, 1) and br.rho == (3, 2) and br.lam == 1
    assert decompose(smooth(2, 5))[2].lam == F(1, 5)  # z^2/w on w = 5 z^2


def test_bad_centers():
    seq = log_resolve(D((cusp(2, 3), 1)))
    with pytest.raises(InvalidCenter):
        seq.blow_up(Center.meet(AXIS_Z, AXIS_W))
    with pytest.raises(InvalidCenter):
        seq.blow_up(Center.free(AXIS_Z, 1))
    again = seq.blow_up(Center.free("E3", 7))
    with pytest.raises(InvalidCenter):
        again.blow_up(Center.free("E3", 7))


def test_not_resolved():
    A = D((cusp(2, 3), 1))
    with pytest.raises(NotResolved):
        pushforward_ideal(BlowupSequence.empty(A), A)
    with pytest.raises(NotResolved):
        pushforward_ideal(log_resolve(D((cusp(2, 5), 1))), A)


def test_over_resolutions_agree():
    A = D((cusp(2, 3), F(5, 6)))
    base = log_resolve(A)
    lam = base.branch("B1").lam
    others = [
        base.blow_up(Center.meet("E1", "E3")),
        base.blow_up(Center.free("E3", 7)),
        base.blow_up(Center.free("E3", lam)).blow_up(Center.meet("E4", "B1")),
    ]
    for seq in others:
        assert verify_ledger(seq)
        assert resolution_independence(A, base, seq)


def test_gratuitous_blowup_on_snc():
    A = D((axis_z(), F(3, 2)), (axis_w(), F(7, 3)))
    assert resolution_independence(A, log_resolve(A), log_resolve(A).blow_up(Center.origin()))


def test_jump_scans():
    assert jumping_scan(D((cusp(2, 3), 1)), [F(k, 6) for k in range(1, 7)]).changes[0] == F(5, 6)
    assert jumping_scan(D((axis_z(), 1)), [F(1, 2), F(1), F(3, 2)]).changes == [F(1)]
    assert jumping_scan(D((node(), 1)), [F(1, 2), F(1)]).changes == [F(1)]


CATALOG = [
    [(cusp(2, 3), 1)],
    [(cusp(2, 5), 1)],
    [(cusp(3, 4), 1)],
    [(cusp(3, 5), 1)],
    [(smooth(2), 1), (axis_w(), 1)],
    [(smooth(3, 2), 1), (smooth(3, 5), 1)],
    [(cusp(2, 3), 1), (axis_z(), 1)],
    [(cusp(2, 3), 1), (node(), F(1, 2))],
    [(smooth(1, 1), 1), (smooth(1, 2), 1), (axis_z(), 1)],
]

coeffs = st.fractions(min_value=0, max_value=3, max_denominator=12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(range(len(CATALOG))), coeffs)
def test_resolution_is_snc_and_ledger_replays(idx, c):
    A = D(*[(g, k * c) for g, k in CATALOG[idx]])
    seq = log_resolve(D(*CATALOG[idx]))
    assert seq.resolves(D(*CATALOG[idx]))
    assert seq.resolves(A)
    assert verify_ledger(seq)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(range(len(CATALOG))), coeffs, coeffs)
def test_monotone_in_coefficient(idx, c1, c2):
    lo, hi = sorted((c1, c2))
    base = D(*CATALOG[idx])
    seq = log_resolve(base)
    assert table(base.scaled(hi), seq, 8) <= table(base.scaled(lo), seq, 8)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(range(len(CATALOG))), coeffs, st.integers(0, 10 ** 6))
def test_random_extra_blowups_do_not_change_table(idx, c, seed):
    rng = random.Random(seed)
    base = D(*CATALOG[idx])
    A = base.scaled(c)
    seq = log_resolve(base)
    other = seq
    for _ in range(rng.randint(1, 3)):
        exc = [e.name for e in other.divisors]
        options = other.special_points()
        if exc:
            options.append(Center.free(rng.choice(exc), rng.choice([F(-3), F(11, 2), F(13)])))
        try:
            other = other.blow_up(rng.choice(options))
        except InvalidCenter:
            continue
    assert verify_ledger(other)
    assert resolution_independence(A, seq, other, degree_bound=8)


@settings(max_examples=60, deadline=None)
@given(coeffs, coeffs, coeffs)
def test_snc_matches_floor_formula(a, b, n):
    A = D((axis_z(), a), (axis_w(), b), (node(), n))
    seq = log_resolve(A)
    assert len(seq) == 0
    fa, fb = int(a + n), int(b + n)
    expected = {(i, j) for i in range(13) for j in range(13 - i) if i >= fa and j >= fb}
    assert table(A, seq) == expected


@pytest.mark.parametrize("p,q", [(2, 3), (2, 5), (3, 4), (3, 5), (2, 7)])
def test_cusps_agree_with_newton_polygon(p, q):
    base = D((cusp(p, q), 1))
    seq = log_resolve(base)
    for k in range(1, 60):
        c = F(k, 60)
        assert table(base.scaled(c), seq) == _newton_table(p, q, c, 12)


def test_multiplier_ideal_wrapper():
    assert multiplier_ideal(D((cusp(2, 3), F(5, 6)))).generators() == [(0, 1), (1, 0)]
