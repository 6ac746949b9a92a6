"""Exact linear algebra over the rationals.

Scalars are :class:`fractions.Fraction`; matrices and subspaces are
immutable.  Subspaces are stored by their reduced row echelon basis, so
two subspaces are equal exactly when their stored bases are equal.

Example:
    >>> N = RatMatrix.from_rows([[0, 1], [0, 0]])
    >>> kernel(N).basis
    ((Fraction(1, 1), Fraction(0, 1)),)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch

Rat = Fraction
Vector = tuple[Fraction, ...]


def rat(x) -> Fraction:
    """Coerce ints, Fractions, ``"p/q"`` strings and ``[p, q]`` pairs to a Fraction.

    Floats are rejected: every constant entering the exact layer must be
    given exactly.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        num, den = x
        if not (isinstance(num, int) and isinstance(den, int)) or den == 0:
            raise ValueError(f"bad rational pair {x!r}")
        return Fraction(num, den)
    raise TypeError(f"cannot read {x!r} as an exact rational")


def vec(entries: Iterable) -> Vector:
    return tuple(rat(e) for e in entries)


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form.  Returns the nonzero rows and pivot columns."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        if p != 1:
            m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


@dataclass(frozen=True)
class RatMatrix:
    rows: tuple[Vector, ...]
    ncols: int

    def __post_init__(self):
        if any(len(r) != self.ncols for r in self.rows):
            raise DimensionMismatch("ragged matrix rows")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> RatMatrix:
        rows = [vec(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(tuple(rows), ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None) -> RatMatrix:
        ncols = nrows if ncols is None else ncols
        return cls(tuple((Fraction(0),) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls(
            tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> RatMatrix:
        if not cols:
            return cls.zeros(nrows, 0)
        cols = [vec(c) for c in cols]
        return cls(tuple(tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self.rows[i][j]

    def columns(self) -> list[Vector]:
        return [tuple(r[j] for r in self.rows) for j in range(self.ncols)]

    def transpose(self) -> RatMatrix:
        return RatMatrix(tuple(self.columns()), self.nrows)

    @property
    def T(self) -> RatMatrix:
        return self.transpose()

    def _check_same_shape(self, other: RatMatrix) -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: RatMatrix) -> RatMatrix:
        self._check_same_shape(other)
        return RatMatrix(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        return self + other.scale(-1)

    def __neg__(self) -> RatMatrix:
        return self.scale(-1)

    def scale(self, c) -> RatMatrix:
        c = rat(c)
        return RatMatrix(tuple(tuple(c * a for a in r) for r in self.rows), self.ncols)

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        return RatMatrix(
            tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols) for r in self.rows),
            other.ncols,
        )

    def apply(self, v: Sequence) -> Vector:
        v = vec(v)
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.rows)

    def __pow__(self, k: int) -> RatMatrix:
        if self.nrows != self.ncols:
            raise DimensionMismatch("power of a non-square matrix")
        result = RatMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def rank(self) -> int:
        return len(_rref([list(r) for r in self.rows], self.ncols)[1])

    def commutes_with(self, other: RatMatrix) -> bool:
        return self @ other == other @ self

    def to_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient, kept in reduced row echelon form.

    Build one with :meth:`span`; the raw constructor trusts its input.
    """

    ambient: int
    basis: tuple[Vector, ...]

    @classmethod
    def span(cls, ambient: int, vectors: Iterable[Sequence] = ()) -> Subspace:
        rows = [list(vec(v)) for v in vectors]
        for r in rows:
            if len(r) != ambient:
                raise DimensionMismatch(f"vector of length {len(r)} in Q^{ambient}")
        reduced, _ = _rref(rows, ambient)
        return cls(ambient, tuple(tuple(r) for r in reduced))

    @classmethod
    def zero(cls, ambient: int) -> Subspace:
        return cls(ambient, ())

    @classmethod
    def full(cls, ambient: int) -> Subspace:
        return cls(ambient, RatMatrix.identity(ambient).rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def canonical(self) -> Subspace:
        return Subspace.span(self.ambient, self.basis)

    def _check(self, other: Subspace) -> None:
        if self.ambient != other.ambient:
            raise DimensionMismatch(
                f"subspaces of Q^{self.ambient} and Q^{other.ambient}"
            )

    def contains(self, v: Sequence) -> bool:
        v = vec(v)
        if len(v) != self.ambient:
            raise DimensionMismatch(f"vector of length {len(v)} in Q^{self.ambient}")
        return Subspace.span(self.ambient, self.basis + (v,)).dim == self.dim

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def is_subspace_of(self, other: Subspace) -> bool:
        self._check(other)
        return (self + other).dim == other.dim

    def __le__(self, other: Subspace) -> bool:
        return self.is_subspace_of(other)

    def __add__(self, other: Subspace) -> Subspace:
        self._check(other)
        return Subspace.span(self.ambient, self.basis + other.basis)

    def __and__(self, other: Subspace) -> Subspace:
        return intersect(self, other)

    def image_under(self, M: RatMatrix) -> Subspace:
        if M.ncols != self.ambient:
            raise DimensionMismatch(f"{M.shape} matrix on Q^{self.ambient}")
        return Subspace.span(M.nrows, [M.apply(b) for b in self.basis])

    def complement_in(self, larger: Subspace) -> list[Vector]:
        """Greedy complement of ``self`` inside ``larger``.

        Walks the echelon basis of ``larger`` in order and keeps every vector
        not already in the running span, so the choice is deterministic.
        """
        self._check(larger)
        chosen: list[Vector] = []
        current = self
        for b in larger.basis:
            if not current.contains(b):
                chosen.append(b)
                current = Subspace.span(self.ambient, current.basis + (b,))
        return chosen


def kernel(M: RatMatrix) -> Subspace:
    reduced, pivots = _rref(M.to_lists(), M.ncols)
    free = [j for j in range(M.ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return Subspace.span(M.ncols, basis)


def image(M: RatMatrix) -> Subspace:
    return Subspace.span(M.nrows, M.columns())


def span_sum(U: Subspace, V: Subspace) -> Subspace:
    return U + V


def intersect(U: Subspace, V: Subspace) -> Subspace:
    """U ∩ V from the kernel of the stacked system [U^T | -V^T]."""
    U._check(V)
    if U.dim == 0 or V.dim == 0:
        return Subspace.zero(U.ambient)
    cols = list(U.basis) + [tuple(-x for x in v) for v in V.basis]
    K = kernel(RatMatrix.from_columns(cols, U.ambient))
    vectors = []
    for coeffs in K.basis:
        v = [Fraction(0)] * U.ambient
        for c, u in zip(coeffs[: U.dim], U.basis):
            if c:
                v = [a + c * b for a, b in zip(v, u)]
        vectors.append(v)
    return Subspace.span(U.ambient, vectors)


def contains(U: Subspace, v: Sequence) -> bool:
    return U.contains(v)


def standard_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(int(j == i)) for j in range(n))
