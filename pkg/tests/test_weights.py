import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    filtrations_mod_p, random_commuting_nilpotents, random_invertible, inverse,
    jordan_nilpotent, rank_mod_p, reduce_filtration,
)
from twistsheaf.errors import NonCommuting, NotNilpotent
from twistsheaf.exact import RatMatrix, Subspace
from twistsheaf.weights import (
    check_weight_axioms, graded_piece, multigraded_levels, relative_weight_sequence,
    weight_filtration,
)


def test_size_two_block():
    W = weight_filtration(RatMatrix.from_rows([[0, 1], [0, 0]]))
    e1 = Subspace.span(2, [[1, 0]])
    assert W(-2).dim == 0
    assert W(-1) == e1 and W(0) == e1
    assert W(1) == Subspace.full(2)
    assert W.jumps() == {-1: 1, 1: 1}


def test_size_three_block():
    W = weight_filtration(jordan_nilpotent([3]))
    assert W.jumps() == {-2: 1, 0: 1, 2: 1}


def test_zero_map_is_pure_weight_zero():
    W = weight_filtration(RatMatrix.zeros(3))
    assert W.jumps() == {0: 3}


def test_not_nilpotent():
    with pytest.raises(NotNilpotent):
        weight_filtration(RatMatrix.identity(2))


def test_noncommuting_pair_is_named():
    A = RatMatrix.from_rows([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    B = RatMatrix.from_rows([[0, 0, 0], [0, 0, 1], [0, 0, 0]])
    with pytest.raises(NonCommuting) as exc:
        relative_weight_sequence([RatMatrix.zeros(3), A, B])
    assert exc.value.pair == (1, 2)


def test_level_and_graded_piece():
    N = RatMatrix.from_rows([[0, 1], [0, 0]])
    W = weight_filtration(N)
    assert W.level_of([0, 1]) == 1
    assert W.level_of([1, 0]) == -1
    assert graded_piece(W, 1).dim == 1
    with pytest.raises(ValueError):
        W.level_of([0, 0])


def test_product_levels():
    N = jordan_nilpotent([2])
    I = RatMatrix.identity(2)
    kron = lambda A, B: RatMatrix.from_rows(
        [[A[i // 2, j // 2] * B[i % 2, j % 2] for j in range(4)] for i in range(4)]
    )
    Ws = relative_weight_sequence([kron(N, I), kron(I, N)])
    # the top vector has weight 1 for N1 and weight 2 for N1 + N2
    assert multigraded_levels(Ws, [0, 0, 0, 1]) == (1, 2)
    assert multigraded_levels(Ws, [1, 0, 0, 0]) == (-1, -2)


@st.composite
def conjugated_nilpotent(draw, max_dim=5):
    n = draw(st.integers(1, max_dim))
    seed = draw(st.integers(0, 10 ** 6))
    rng = random.Random(seed)
    sizes = []
    left = n
    while left:
        k = rng.randint(1, left)
        sizes.append(k)
        left -= k
    P = random_invertible(n, rng)
    return sizes, P @ jordan_nilpotent(sizes) @ inverse(P)


@settings(max_examples=40, deadline=None)
@given(conjugated_nilpotent())
def test_axioms_and_jordan_type(case):
    sizes, N = case
    W = weight_filtration(N)
    assert check_weight_axioms(N, W)
    expected = {}
    for s in sizes:
        for w in range(s - 1, -s, -2):
            expected[w] = expected.get(w, 0) + 1
    assert W.jumps() == dict(sorted(expected.items()))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 4), st.integers(2, 3))
def test_relative_sequences_satisfy_axioms(seed, n, count):
    Ns = random_commuting_nilpotents(n, count, random.Random(seed))
    Ws = relative_weight_sequence(Ns)
    total = None
    for N, W in zip(Ns, Ws):
        total = N if total is None else total + N
        assert check_weight_axioms(total, W)


def test_axiom_checker_rejects_shifted_filtration():
    N = RatMatrix.from_rows([[0, 1], [0, 0]])
    W = weight_filtration(N)
    from twistsheaf.weights import Filtration
    shifted = Filtration(2, W.lo + 1, W.levels)
    assert not check_weight_axioms(N, shifted)


def _all_nilpotents_mod3(n):
    for entries in itertools.product(range(3), repeat=n * n):
        rows = [list(entries[i * n:(i + 1) * n]) for i in range(n)]
        N = RatMatrix.from_rows(rows)
        if (N ** n).is_zero():
            yield rows


def test_uniqueness_exhaustive_dim_2():
    # every nilpotent with entries in {0,1,2} whose rational rank profile survives mod 3
    checked = 0
    for rows in _all_nilpotents_mod3(2):
        N = RatMatrix.from_rows(rows)
        if rank_mod_p(rows) != N.rank():
            continue
        found = filtrations_mod_p(rows)
        assert len(found) == 1
        W = weight_filtration(N)
        assert found[0] == reduce_filtration({l: W(l).basis for l in range(W.lo, W.hi + 1)}, 2)
        checked += 1
    assert checked >= 5


@pytest.mark.parametrize("sizes", [[3], [2, 1], [1, 1, 1]])
def test_uniqueness_dim_3_by_jordan_type(sizes):
    rng = random.Random(sum(sizes) * 7 + len(sizes))
    for _ in range(3):
        P = random_invertible(3, rng, spread=1)
        N = P @ jordan_nilpotent(sizes) @ inverse(P)
        rows = [[int(x) for x in r] for r in N.rows]
        for k in range(1, 3):
            Nk = N ** k
            assert rank_mod_p([[int(x) for x in r] for r in Nk.rows]) == Nk.rank()
        found = filtrations_mod_p(rows)
        assert len(found) == 1
        W = weight_filtration(N)
        assert found[0] == reduce_filtration({l: W(l).basis for l in range(W.lo, W.hi + 1)}, 3)
