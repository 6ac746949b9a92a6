"""Deligne-Manin prolongation lattices from commuting local monodromy.

A generator is kept symbolic as a triple (flat vector v, exponent vector
beta, nilpotent twist) standing for the section

    exp(sum_i log z_i (beta_i Id + s N_i)) v,        s = +1 normally.

Residue eigenvalues are rational and normalized into (-1, 0]; every other
window is reached by integer shifts, so all window tests are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, InvalidMonodromy
from .exact import RatMatrix, Subspace, Vector, _rref, standard_vector, vec
from .weights import is_nilpotent


@dataclass(frozen=True)
class Block:
    alpha: tuple[Fraction, ...]
    space: Subspace


@dataclass(frozen=True)
class LocalMonodromy:
    """Germ of a local system at a boundary point of (Δ*)^n.

    ``blocks`` split Q^dim into generalized eigenspaces of the monodromies;
    on a block with eigenvalue vector alpha the i-th monodromy is
    T_i = exp(-2πi (alpha_i Id + N_i)).
    """

    dim: int
    n: int
    blocks: tuple[Block, ...]
    nilpotents: tuple[RatMatrix, ...]

    def __post_init__(self):
        self.validate()

    @classmethod
    def build(cls, dim: int, blocks: Sequence[tuple[Sequence, Sequence[Sequence]]],
              nilpotents: Sequence[RatMatrix] | None = None) -> LocalMonodromy:
        """Convenience constructor: blocks as (alpha, spanning vectors) pairs."""
        bl = tuple(Block(vec(a), Subspace.span(dim, vs)) for a, vs in blocks)
        n = len(bl[0].alpha) if bl else 0
        if nilpotents is None:
            nilpotents = [RatMatrix.zeros(dim) for _ in range(n)]
        return cls(dim, n, bl, tuple(nilpotents))

    @classmethod
    def trivial(cls, dim: int = 1, n: int = 1) -> LocalMonodromy:
        return cls.build(dim, [((0,) * n, RatMatrix.identity(dim).rows)])

    def validate(self) -> None:
        if self.dim < 1 or self.n < 1:
            raise InvalidMonodromy("dimension and boundary count must be positive")
        if len(self.nilpotents) != self.n:
            raise InvalidMonodromy(
                f"{len(self.nilpotents)} nilpotents for {self.n} boundary components",
                field="nilpotents",
            )
        total = Subspace.zero(self.dim)
        for k, b in enumerate(self.blocks):
            if len(b.alpha) != self.n:
                raise InvalidMonodromy(f"block {k} alpha has wrong length", field="blocks")
            if any(not (-1 < a <= 0) for a in b.alpha):
                raise InvalidMonodromy(f"block {k} alpha outside (-1, 0]", field="blocks")
            if b.space.ambient != self.dim or b.space.dim == 0:
                raise InvalidMonodromy(f"block {k} is empty or in the wrong space", field="blocks")
            total = total + b.space
        if sum(b.space.dim for b in self.blocks) != self.dim or total.dim != self.dim:
            raise InvalidMonodromy("blocks do not form a direct sum decomposition", field="blocks")
        if len({b.alpha for b in self.blocks}) != len(self.blocks):
            raise InvalidMonodromy("two blocks share an eigenvalue vector", field="blocks")
        for i, N in enumerate(self.nilpotents):
            if N.shape != (self.dim, self.dim):
                raise InvalidMonodromy(f"N{i + 1} has shape {N.shape}", field="nilpotents")
            if not is_nilpotent(N):
                raise InvalidMonodromy(f"N{i + 1} is not nilpotent", field="nilpotents")
            for k, b in enumerate(self.blocks):
                if not b.space.image_under(N) <= b.space:
                    raise InvalidMonodromy(f"N{i + 1} does not preserve block {k}", field="nilpotents")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if not self.nilpotents[i].commutes_with(self.nilpotents[j]):
                    raise InvalidMonodromy(f"N{i + 1} and N{j + 1} do not commute", field="nilpotents")

    def block_of(self, v: Sequence) -> int | None:
        """Index of the block containing v, or None if v straddles blocks."""
        for k, b in enumerate(self.blocks):
            if b.space.contains(v):
                return k
        return None

    def flat_frame(self) -> list[tuple[int, Vector]]:
        """A basis of Q^dim made of block vectors, block by block."""
        return [(k, v) for k, b in enumerate(self.blocks) for v in b.space.basis]


@dataclass(frozen=True)
class Generator:
    label: str
    vector: Vector
    block: int
    beta: tuple[Fraction, ...]
    twist_sign: int = 1

    def shifted(self, shift: Sequence[int]) -> Generator:
        return Generator(
            self.label, self.vector, self.block,
            tuple(b + s for b, s in zip(self.beta, shift)), self.twist_sign,
        )


@dataclass(frozen=True)
class ProlongedBasis:
    generators: tuple[Generator, ...]
    a: tuple[Fraction, ...]
    dim: int = field(default=0)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def betas(self) -> list[tuple[Fraction, ...]]:
        return [g.beta for g in self.generators]

    def vectors_independent(self) -> bool:
        return Subspace.span(self.dim, [g.vector for g in self.generators]).dim == self.rank

    def in_window(self) -> bool:
        return all(a < b <= a + 1 for g in self.generators for a, b in zip(self.a, g.beta))


def _label(v: Vector, fallback: int) -> str:
    nonzero = [i for i, x in enumerate(v) if x != 0]
    if len(nonzero) == 1 and v[nonzero[0]] == 1:
        return f"v{nonzero[0] + 1}"
    return f"u{fallback + 1}"


def window_shift(alpha: Fraction, a: Fraction) -> int:
    """The integer k with alpha + k in (a, a + 1]."""
    return math.floor(a + 1 - alpha)


def prolong_vector(M: LocalMonodromy, block: int, v: Vector, a: Sequence, label: str) -> Generator:
    alpha = M.blocks[block].alpha
    beta = tuple(al + window_shift(al, ai) for al, ai in zip(alpha, a))
    return Generator(label, v, block, beta)


def deligne_basis(M: LocalMonodromy, a: Sequence) -> ProlongedBasis:
    """Generators of the prolongation V_{>a} with residues in (a_i, a_i + 1]."""
    a = vec(a)
    if len(a) != M.n:
        raise DimensionMismatch(f"index vector of length {len(a)} for {M.n} boundary components")
    gens = tuple(
        prolong_vector(M, k, v, a, _label(v, idx))
        for idx, (k, v) in enumerate(M.flat_frame())
    )
    return ProlongedBasis(gens, a, M.dim)


def residue_spectrum(B: ProlongedBasis, i: int) -> list[Fraction]:
    """Residue eigenvalues along the i-th component, with multiplicity, sorted."""
    return sorted(g.beta[i] for g in B.generators)


def residue_matrix(B: ProlongedBasis, M: LocalMonodromy, i: int) -> RatMatrix:
    """Matrix of the residue along component i in the generator frame.

    Column j holds beta_{j,i} e_j plus the coordinates of N_i v_j.  Only
    meaningful when the generators' flat vectors span an N_i-stable space.
    """
    vectors = [g.vector for g in B.generators]
    P = RatMatrix.from_columns(vectors, M.dim)
    span = Subspace.span(M.dim, vectors)
    cols = []
    for j, g in enumerate(B.generators):
        image_v = M.nilpotents[i].apply(g.vector)
        if not span.contains(image_v):
            raise DimensionMismatch("generator span is not stable under N_i")
        coords = _solve(P, image_v)
        col = [g.twist_sign * c for c in coords]
        col[j] += g.beta[i]
        cols.append(col)
    return RatMatrix.from_columns(cols, B.rank)


def _solve(P: RatMatrix, b: Vector) -> list[Fraction]:
    """Coordinates x with P x = b for P of full column rank."""
    aug = [list(r) + [bi] for r, bi in zip(P.rows, b)]
    reduced, pivots = _rref(aug, P.ncols + 1)
    if P.ncols in pivots:
        raise DimensionMismatch("vector not in the column span")
    x = [Fraction(0)] * P.ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[-1]
    return x


def monodromy_consistency(B: ProlongedBasis, M: LocalMonodromy) -> bool:
    """True iff every generator is a single-valued section.

    Continuing z_i around the origin multiplies the twist by
    exp(2πi(beta_i Id + s N_i)) while the flat vector picks up
    T_i = exp(-2πi(alpha_i Id + N_i)).  The product is

        exp(2πi(beta_i - alpha_i)) exp(2πi(s - 1) N_i) v,

    and for nilpotent N, exp(cN) v = v with c != 0 exactly when N v = 0
    (exp(cN) - Id = cN(Id + cN/2 + ...) with the bracket invertible).  So the
    test is beta_i - alpha_i integral and (s - 1) N_i v = 0, all exact.
    """
    for g in B.generators:
        k = M.block_of(g.vector)
        if k is None or k != g.block:
            return False
        alpha = M.blocks[k].alpha
        for i in range(M.n):
            if (g.beta[i] - alpha[i]).denominator != 1:
                return False
            if g.twist_sign != 1 and any(M.nilpotents[i].apply(g.vector)):
                return False
    return True


def flat_vector(dim: int, index: int) -> Vector:
    return standard_vector(dim, index)
