from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistsheaf.errors import DimensionMismatch
from twistsheaf.exact import (
    RatMatrix, Subspace, image, intersect, kernel, rat, standard_vector, vec,
)

small = st.integers(-3, 3)


@st.composite
def matrices(draw, max_dim=4):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    return RatMatrix.from_rows(rows)


@st.composite
def subspace_triples(draw, n=4):
    def sub():
        k = draw(st.integers(0, n))
        return Subspace.span(n, draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=k, max_size=k)))
    return sub(), sub(), sub()


def test_rat_accepts_exact_forms():
    assert rat(3) == 3
    assert rat("5/6") == Fraction(5, 6)
    assert rat([-3, 2]) == Fraction(-3, 2)
    assert rat(Fraction(1, 7)) == Fraction(1, 7)


@pytest.mark.parametrize("bad", [0.5, True, [1, 0], [1.0, 2], None])
def test_rat_rejects_inexact(bad):
    with pytest.raises((TypeError, ValueError)):
        rat(bad)


def test_matrix_arithmetic():
    A = RatMatrix.from_rows([[1, 2], [3, 4]])
    B = RatMatrix.from_rows([[0, 1], [1, 0]])
    assert (A @ B).to_lists() == [[2, 1], [4, 3]]
    assert (A + B - B) == A
    assert (A ** 0) == RatMatrix.identity(2)
    assert A.transpose().T == A
    assert A.rank() == 2
    assert A.apply([1, 1]) == vec([3, 7])
    with pytest.raises(DimensionMismatch):
        A @ RatMatrix.zeros(3)


def test_kernel_and_image_of_shift():
    N = RatMatrix.from_rows([[0, 1], [0, 0]])
    assert kernel(N) == Subspace.span(2, [[1, 0]])
    assert image(N) == Subspace.span(2, [[1, 0]])


def test_subspace_canonical_form_is_basis_free():
    U = Subspace.span(3, [[1, 1, 0], [0, 1, 1]])
    V = Subspace.span(3, [[1, 2, 1], [2, 3, 1]])
    assert U == V
    assert [1, 0, -1] in U
    assert standard_vector(3, 0) not in U


def test_intersect_known():
    U = Subspace.span(3, [[1, 0, 0], [0, 1, 0]])
    V = Subspace.span(3, [[0, 1, 0], [0, 0, 1]])
    assert intersect(U, V) == Subspace.span(3, [[0, 1, 0]])


def test_complement_is_deterministic_and_complementary():
    small_ = Subspace.span(3, [[1, 1, 0]])
    big = Subspace.full(3)
    comp = small_.complement_in(big)
    assert len(comp) == 2
    assert (small_ + Subspace.span(3, comp)) == big
    assert comp == small_.complement_in(big)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(M):
    assert kernel(M).dim + image(M).dim == M.ncols
    assert image(M).dim == M.rank()


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernel_is_killed(M):
    assert all(not any(M.apply(v)) for v in kernel(M).basis)


@settings(max_examples=60, deadline=None)
@given(subspace_triples())
def test_lattice_laws(t):
    U, V, W = t
    assert (U + U) == U and (U & U) == U
    assert (U & V) <= U and U <= (U + V)
    assert (U + V).dim + (U & V).dim == U.dim + V.dim
    # modular law: U <= W implies U + (V ∩ W) = (U + V) ∩ W
    UW = U & W
    assert (UW + (V & W)) == ((UW + V) & W)
