"""Independent regenerators for DERIVED golden values.

Each oracle reads a problem payload and recomputes one golden value by a
route that does not go through the module under test: closed forms,
Jordan-type counting, Newton-polygon ideals.  Oracles return plain JSON
values in the encoding the reports use.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np


def _frac(x) -> Fraction:
    return Fraction(x[0], x[1]) if isinstance(x, list) else Fraction(x)


def _enc(x: Fraction):
    return x.numerator if x.denominator == 1 else [x.numerator, x.denominator]


def _rank(rows: list[list[Fraction]]) -> int:
    """Plain Gaussian elimination, kept separate from the library's RREF."""
    m = [r[:] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def jordan_graded_dims(payload: dict) -> dict:
    """Gr^W dimensions of a single nilpotent from its Jordan type.

    r_k = rank N^k gives the number of blocks of size >= k as r_(k-1) - r_k;
    a block of size s contributes weights s-1, s-3, ..., 1-s.
    """
    N = [[_frac(x) for x in r] for r in payload["nilpotents"][0]]
    n = len(N)
    ranks = [n]
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(n):
        P = _matmul(P, N)
        ranks.append(_rank(P))
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, n + 1)]
    graded: dict[int, int] = {}
    for s in range(1, n + 1):
        exactly = at_least[s - 1] - (at_least[s] if s < n else 0)
        for w in range(s - 1, -s, -2):
            graded[w] = graded.get(w, 0) + exactly
    return {str(w): d for w, d in sorted(graded.items()) if d}


def window_betas(payload: dict) -> list:
    """Smallest beta congruent to alpha mod 1 with beta > a, per block vector."""
    a = [_frac(x) for x in payload["a"]]
    out = []
    for block in payload["monodromy"]["blocks"]:
        alpha = [_frac(x) for x in block["alpha"]]
        beta = []
        for al, ai in zip(alpha, a):
            k = math.ceil(ai - al)
            if al + k <= ai:
                k += 1
            beta.append(_enc(al + k))
        out.extend([beta] * len(block["vectors"]))
    return out


def floor_of_twist(payload: dict) -> list:
    """Trivial variation: shift along axis i is floor(r_i/m)."""
    m = payload["twist"].get("m", 1)
    return [[math.floor(_frac(r) / m) for r in payload["twist"]["r"]]]


def _cusp_params(payload: dict) -> tuple[int, int, Fraction]:
    (item,) = payload["divisor"]
    p, q = item["curve"]["params"]
    return p, q, _frac(item["coeff"])


def _newton_table(p: int, q: int, c: Fraction, d: int) -> set[tuple[int, int]]:
    """Monomials of the multiplier ideal of c (z^p - w^q) for c < 1.

    A nondegenerate germ has, below 1, the multiplier ideal of its Newton
    ideal: z^i w^j belongs iff (i+1, j+1) lies in the interior of c times
    the Newton polygon, i.e. q(i+1) + p(j+1) > c p q.
    """
    if c >= 1:
        raise ValueError("Newton-polygon oracle only covers c < 1")
    return {
        (i, j) for i in range(d + 1) for j in range(d + 1 - i)
        if q * (i + 1) + p * (j + 1) > c * p * q
    }


def _minimal(table: set[tuple[int, int]]) -> list:
    return sorted(
        [i, j] for i, j in table
        if not any((a, b) != (i, j) and a <= i and b <= j for a, b in table)
    )


def newton_cusp_generators(payload: dict) -> list:
    p, q, c = _cusp_params(payload)
    return _minimal(_newton_table(p, q, c, 12))


def newton_cusp_first_jump(payload: dict):
    """First grid value c < 1 where the Newton table shrinks."""
    p, q, _ = _cusp_params(payload)
    g = payload["grid"]
    start, stop, step = _frac(g["start"]), _frac(g["stop"]), _frac(g["step"])
    grid = [start + k * step for k in range(int((stop - start) / step) + 1)]
    prev = None
    for c in grid:
        if c >= 1:
            break
        cur = _newton_table(p, q, c, 12)
        if prev is not None and cur != prev:
            return _enc(c)
        prev = cur
    return None


def snc_floor_generators(payload: dict) -> list:
    """Axes divisor a{z=0} + b{w=0}: the ideal is (z^floor(a) w^floor(b))."""
    a = b = Fraction(0)
    for item in payload["divisor"]:
        name = item["curve"]["catalog"]
        c = _frac(item["coeff"])
        if name == "axis-z":
            a += c
        elif name == "axis-w":
            b += c
        elif name == "node":
            a += c
            b += c
        else:
            raise ValueError(f"not an SNC axis divisor: {name}")
    return [[math.floor(a), math.floor(b)]]


def tate_metric_closed_form(payload: dict) -> list:
    """h = diag(t/pi, pi/t) with t = -log|s|, real part only."""
    (t,) = payload["t"]
    return [[t / math.pi, 0.0], [0.0, math.pi / t]]


def tate_norm_ratio(payload: dict) -> float:
    """|v1|^2 = t/pi against the predicted t^1: the ratio is 1/pi."""
    return 1 / math.pi


def tate_curvature_min(payload: dict) -> float:
    """Least value of 1/(4|s|^2 log^2|s|) over the default Nakano grid.

    The top piece of the tate orbit is the line bundle with |e|^2 = t/pi,
    whose curvature is -dd^c log t.
    """
    from ..cks import get_model, nakano_grid

    grid = nakano_grid(get_model("tate"))
    r = np.abs(grid[:, 0])
    return float(np.min(1 / (4 * r ** 2 * np.log(r) ** 2)))


ORACLES: dict[str, Callable[[dict], object]] = {
    f.__name__: f
    for f in [
        jordan_graded_dims,
        window_betas,
        floor_of_twist,
        newton_cusp_generators,
        newton_cusp_first_jump,
        snc_floor_generators,
        tate_metric_closed_form,
        tate_norm_ratio,
        tate_curvature_min,
    ]
}
