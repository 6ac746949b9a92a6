"""Local generators of the twisted S-sheaf in the log smooth case.

The lattice R = V_{>-1} ∩ j_* S(V) is spanned by the prolonged flat
vectors selected as S(V) at the origin.  Twisting by a boundary weight
r_i/m along each component moves generator j along axis i by

    shift_{j,i} = floor(-beta_{j,i} + r_i/m),

the least integer e for which z_i^e times the generator is square
integrable against |z_i|^{-2 r_i/m}.  Ties (-beta + r/m integral) resolve
down, exactly as the floor dictates; no epsilon is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InvalidHodgeData, StraddlingSelector
from .exact import Subspace, intersect, rat, standard_vector
from .prolongation import LocalMonodromy, ProlongedBasis, prolong_vector
from .weights import weight_filtration

ORTHOGONALITY_NOTE = (
    "flat basis assumed orthogonal for the polarization; not verified"
)


@dataclass(frozen=True)
class HodgeFiberData:
    """Hodge numbers of the fiber plus the flat vectors spanning S(V) at 0."""

    weight: int
    hodge_dims: tuple[tuple[int, int, int], ...]  # (p, q, dim)
    selector: tuple[int, ...]

    def __post_init__(self):
        if not self.selector:
            raise InvalidHodgeData("S-selector is empty; S(V) is never zero", field="selector")
        if len(set(self.selector)) != len(self.selector):
            raise InvalidHodgeData("S-selector repeats an index", field="selector")
        if any(i < 0 for i in self.selector):
            raise InvalidHodgeData("negative selector index", field="selector")
        for p, q, d in self.hodge_dims:
            if p + q != self.weight:
                raise InvalidHodgeData(f"Hodge type ({p},{q}) not of weight {self.weight}", field="hodge_dims")
            if d < 0:
                raise InvalidHodgeData("negative Hodge number", field="hodge_dims")
        if not any(d for _, _, d in self.hodge_dims):
            raise InvalidHodgeData("all Hodge numbers vanish", field="hodge_dims")
        if len(self.selector) != self.top_dim:
            raise InvalidHodgeData(
                f"selector has {len(self.selector)} vectors but dim S(V) = {self.top_dim}",
                field="selector",
            )

    @classmethod
    def build(cls, weight: int, dims: Mapping[tuple[int, int], int], selector: Sequence[int]) -> HodgeFiberData:
        return cls(weight, tuple(sorted((p, q, d) for (p, q), d in dims.items())), tuple(selector))

    @property
    def rank(self) -> int:
        return sum(d for _, _, d in self.hodge_dims)

    @property
    def p_max(self) -> int:
        return max(p for p, _, d in self.hodge_dims if d)

    @property
    def top_dim(self) -> int:
        return sum(d for p, _, d in self.hodge_dims if p == self.p_max)

    def check_against(self, M: LocalMonodromy) -> None:
        if self.rank != M.dim:
            raise InvalidHodgeData(f"Hodge numbers sum to {self.rank}, local system has rank {M.dim}",
                                   field="hodge_dims")
        if max(self.selector) >= M.dim:
            raise InvalidHodgeData("selector index out of range", field="selector")

    def selected_space(self, dim: int) -> Subspace:
        return Subspace.span(dim, [standard_vector(dim, i) for i in self.selector])


@dataclass(frozen=True)
class TwistSpec:
    r: tuple[Fraction, ...]
    m: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if any(x < 0 for x in self.r):
            raise ValueError("twist coefficients must be nonnegative")

    @classmethod
    def of(cls, r: Sequence, m: int = 1) -> TwistSpec:
        return cls(tuple(rat(x) for x in r), m)

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(x / self.m for x in self.r)


def r_lattice(M: LocalMonodromy, H: HodgeFiberData) -> ProlongedBasis:
    """Frame of V_{>-1} ∩ j_* S(V) at the origin.

    Raises:
        StraddlingSelector: a selected flat vector is not inside one block.
    """
    H.check_against(M)
    a = (Fraction(-1),) * M.n
    gens = []
    for idx in H.selector:
        v = standard_vector(M.dim, idx)
        k = M.block_of(v)
        if k is None:
            raise StraddlingSelector(f"flat vector v{idx + 1} straddles monodromy blocks", field="selector")
        gens.append(prolong_vector(M, k, v, a, f"v{idx + 1}"))
    return ProlongedBasis(tuple(gens), a, M.dim)


def validate_limit_positivity(M: LocalMonodromy, H: HodgeFiberData) -> bool:
    """False if span(S-selector) meets W_{-1}(N_i) for some i.

    A genuine polarized limit never does, so False flags impossible input.
    """
    H.check_against(M)
    S = H.selected_space(M.dim)
    for N in M.nilpotents:
        if intersect(weight_filtration(N)(-1), S).dim:
            return False
    return True


def twisted_exponents(B: ProlongedBasis, T: TwistSpec) -> list[list[int]]:
    if len(T.r) != len(B.a):
        raise ValueError(f"twist has {len(T.r)} coefficients for {len(B.a)} components")
    w = T.weights
    return [[math.floor(-b + wi) for b, wi in zip(g.beta, w)] for g in B.generators]


def _term(label: str, shifts: Sequence[int]) -> str:
    powers = [f"z{i + 1}^{s}" for i, s in enumerate(shifts) if s]
    head = " * ".join(powers) if powers else "z^0"
    return f"{head} * {label}"


def generator_report(B: ProlongedBasis, T: TwistSpec, M: LocalMonodromy | None = None) -> list[dict]:
    """Serializable description of the local generators, in frame order."""
    shifts = twisted_exponents(B, T)
    out = []
    for g, sh in zip(B.generators, shifts):
        twist = []
        if M is not None:
            for i, N in enumerate(M.nilpotents):
                if any(N.apply(g.vector)):
                    twist.append(f"N{i + 1}")
        base = _term(g.label, sh)
        if twist:
            logs = " + ".join(f"log(z{i[1:]}) {i}" for i in twist)
            base = f"{base.rsplit(' * ', 1)[0]} * exp({logs}) {g.label}"
        out.append({
            "flat_vector": g.label,
            "vector": [str(x) for x in g.vector],
            "beta": [str(b) for b in g.beta],
            "shift": sh,
            "exponent": [str(b + s) for b, s in zip(g.beta, sh)],
            "nilpotent_twist": twist,
            "term": base,
        })
    return out
