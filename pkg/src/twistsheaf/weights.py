"""Monodromy weight filtrations centered at 0.

For a nilpotent N the filtration is built directly from kernels and
images of powers of N::

    W_l = sum over a, b >= 0 with a - b <= l of  ker N^(a+1) ∩ im N^b

On a Jordan block with cyclic vector e and basis e, Ne, ..., N^(s-1)e the
vector N^t e lies in ker N^(s-t) ∩ im N^t and nowhere "lower", so it lands
in weight s-1-2t.  Kernels and images of powers of N split along any
N-stable decomposition, so the formula is basis free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, NonCommuting, NotNilpotent
from .exact import RatMatrix, Subspace, image, intersect, kernel


@dataclass(frozen=True)
class Filtration:
    """Increasing filtration W_l of Q^ambient.

    ``levels`` stores W_l for l in [lo, hi]; below lo the filtration is 0 and
    above hi it is the whole space.
    """

    ambient: int
    lo: int
    levels: tuple[Subspace, ...]

    @property
    def hi(self) -> int:
        return self.lo + len(self.levels) - 1

    def __call__(self, l: int) -> Subspace:
        if l < self.lo:
            return Subspace.zero(self.ambient)
        if l > self.hi:
            return Subspace.full(self.ambient)
        return self.levels[l - self.lo]

    def graded_dim(self, l: int) -> int:
        return self(l).dim - self(l - 1).dim

    def support(self) -> list[int]:
        return [l for l in range(self.lo, self.hi + 1) if self.graded_dim(l)]

    def jumps(self) -> dict[int, int]:
        return {l: self.graded_dim(l) for l in self.support()}

    def level_of(self, v) -> int:
        """Least l with v in W_l.  Zero has no level."""
        if all(x == 0 for x in v):
            raise ValueError("zero vector has no weight level")
        for l in range(self.lo, self.hi + 1):
            if self(l).contains(v):
                return l
        return self.hi + 1

    def is_increasing(self) -> bool:
        return all(self(l - 1) <= self(l) for l in range(self.lo, self.hi + 2))


def is_nilpotent(N: RatMatrix) -> bool:
    return (N ** N.nrows).is_zero()


def _check_square(N: RatMatrix) -> None:
    if N.nrows != N.ncols:
        raise DimensionMismatch(f"expected a square matrix, got {N.shape}")


def weight_filtration(N: RatMatrix) -> Filtration:
    """W(N) centered at 0.

    Raises:
        NotNilpotent: if N^dim != 0.
    """
    _check_square(N)
    n = N.nrows
    if not is_nilpotent(N):
        raise NotNilpotent("N^dim is not zero")
    if n == 0:
        return Filtration(0, 0, ())
    powers = [RatMatrix.identity(n)]
    for _ in range(n):
        powers.append(powers[-1] @ N)
    kers = [kernel(P) for P in powers]
    ims = [image(P) for P in powers]
    # block pieces ker N^(a+1) ∩ im N^b sit in weight <= a - b
    pieces: dict[int, Subspace] = {}
    for a in range(n):
        for b in range(n):
            piece = intersect(kers[a + 1], ims[b])
            if piece.dim:
                d = a - b
                pieces[d] = pieces[d] + piece if d in pieces else piece
    lo, hi = -(n - 1), n - 1
    levels = []
    running = Subspace.zero(n)
    for l in range(lo, hi + 1):
        if l in pieces:
            running = running + pieces[l]
        levels.append(running)
    return Filtration(n, lo, tuple(levels))


def check_weight_axioms(N: RatMatrix, W: Filtration) -> bool:
    """Exact check of both defining properties of W(N).

    * N W_l ⊆ W_{l-2} for every l;
    * N^l induces Gr_l ≅ Gr_{-l} for l >= 0, tested as equal graded
      dimensions plus surjectivity N^l W_l + W_{-l-1} = W_{-l}.
    """
    lo, hi = W.lo - 1, W.hi + 1
    if not W.is_increasing():
        return False
    for l in range(lo, hi + 3):
        if not W(l).image_under(N) <= W(l - 2):
            return False
    for l in range(0, max(abs(lo), abs(hi)) + 2):
        if W.graded_dim(l) != W.graded_dim(-l):
            return False
        Nl = N ** l
        if not (W(l).image_under(Nl) + W(-l - 1)) == W(-l):
            return False
    return True


def relative_weight_sequence(Ns: Sequence[RatMatrix]) -> list[Filtration]:
    """[W(N1), W(N1+N2), ..., W(N1+...+Nn)].

    Raises:
        NonCommuting: naming the first pair (i, j) with N_i N_j != N_j N_i.
        NotNilpotent: if some partial sum is not nilpotent.
    """
    for N in Ns:
        _check_square(N)
    for i in range(len(Ns)):
        for j in range(i + 1, len(Ns)):
            if not Ns[i].commutes_with(Ns[j]):
                raise NonCommuting(f"N{i + 1} and N{j + 1} do not commute", (i, j))
    out = []
    total = None
    for N in Ns:
        total = N if total is None else total + N
        out.append(weight_filtration(total))
    return out


def graded_piece(F: Filtration, l: int) -> Subspace:
    """Deterministic representative of W_l / W_{l-1} inside W_l."""
    below = F(l - 1)
    return Subspace.span(F.ambient, below.complement_in(F(l)))


def multigraded_levels(Fs: Sequence[Filtration], v) -> tuple[int, ...]:
    """Levels (l_1, ..., l_n) of v in the relative sequence, one per filtration."""
    return tuple(F.level_of(v) for F in Fs)
