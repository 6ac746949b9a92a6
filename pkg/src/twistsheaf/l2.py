"""Local square-integrability: a symbolic valuation test and a brute-force
quadrature oracle that knows nothing about it.

The symbolic side: on the punctured disc, z^v |z|^a is square integrable
near 0 exactly when v + a > -1.  The numeric side integrates over dyadic
annuli 2^-(k+1) < |z| < 2^-k and watches how the annulus contributions
evolve as the inner cutoff shrinks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, linalg

from .errors import Indeterminate, IndexMismatch, ZeroSection
from .exact import rat
from .prolongation import ProlongedBasis
from .ssheaf import TwistSpec

K_FIRST = 4
K_LAST = 40
SHRINK = 1.5
BLOWUP = 1e6
WINDOW = 4


# ---------------------------------------------------------------------------
# sections and weights


@dataclass(frozen=True)
class LaurentSection:
    """Finite Laurent polynomial with vector coefficients over a frame.

    ``terms`` maps an exponent tuple (boundary exponents in Z first, then
    interior exponents in N) to a coefficient tuple of length ``rank``.
    """

    rank: int
    n_boundary: int
    terms: tuple[tuple[tuple[int, ...], tuple[Fraction, ...]], ...]
    n_interior: int = 0

    def __post_init__(self):
        width = self.n_boundary + self.n_interior
        for exps, coeffs in self.terms:
            if len(exps) != width:
                raise IndexMismatch(f"exponent {exps} has length {len(exps)}, expected {width}")
            if len(coeffs) != self.rank:
                raise IndexMismatch(f"coefficient vector of length {len(coeffs)} for rank {self.rank}")
            if any(e < 0 for e in exps[self.n_boundary:]):
                raise IndexMismatch("negative exponent on an interior axis")

    @classmethod
    def from_dict(cls, terms: Mapping[tuple[int, ...], Sequence], rank: int,
                  n_boundary: int, n_interior: int = 0) -> LaurentSection:
        merged: dict[tuple[int, ...], list[Fraction]] = {}
        for exps, coeffs in terms.items():
            cur = merged.setdefault(tuple(exps), [Fraction(0)] * rank)
            for j, c in enumerate(coeffs):
                cur[j] += rat(c)
        items = tuple(sorted((e, tuple(c)) for e, c in merged.items() if any(c)))
        return cls(rank, n_boundary, items, n_interior)

    @classmethod
    def monomial(cls, exps: Sequence[int], generator: int, rank: int = 1,
                 n_interior: int = 0, coeff=1) -> LaurentSection:
        c = [0] * rank
        c[generator] = coeff
        return cls.from_dict({tuple(exps): c}, rank, len(exps) - n_interior, n_interior)

    def is_zero(self) -> bool:
        return not self.terms

    def component(self, j: int) -> LaurentSection:
        return LaurentSection.from_dict(
            {e: [c[j]] for e, c in self.terms}, 1, self.n_boundary, self.n_interior
        )

    def __add__(self, other: LaurentSection) -> LaurentSection:
        if (self.rank, self.n_boundary, self.n_interior) != (other.rank, other.n_boundary, other.n_interior):
            raise IndexMismatch("sections over different frames")
        d: dict = {}
        for e, c in self.terms + other.terms:
            cur = d.setdefault(e, [Fraction(0)] * self.rank)
            for j, x in enumerate(c):
                cur[j] += x
        return LaurentSection.from_dict(d, self.rank, self.n_boundary, self.n_interior)

    def times_polynomial(self, poly: Mapping[tuple[int, ...], object]) -> LaurentSection:
        """Multiply every coefficient function by a polynomial in all variables."""
        d: dict = {}
        for e, c in self.terms:
            for pe, pc in poly.items():
                ne = tuple(x + y for x, y in zip(e, pe))
                cur = d.setdefault(ne, [Fraction(0)] * self.rank)
                for j, x in enumerate(c):
                    cur[j] += x * rat(pc)
        return LaurentSection.from_dict(d, self.rank, self.n_boundary, self.n_interior)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Coefficient functions at complex points of shape (..., width) -> (..., rank)."""
        points = np.asarray(points, dtype=complex)
        out = np.zeros(points.shape[:-1] + (self.rank,), dtype=complex)
        for exps, coeffs in self.terms:
            mono = np.ones(points.shape[:-1], dtype=complex)
            for axis, e in enumerate(exps):
                if e:
                    mono = mono * points[..., axis] ** e
            out += mono[..., None] * np.array([float(c) for c in coeffs])
        return out


def valuation(f: LaurentSection, axis: int) -> int:
    """Least exponent of z_axis carrying a nonzero coefficient."""
    if f.is_zero():
        raise ZeroSection("valuation of the zero section")
    return min(e[axis] for e, _ in f.terms)


@dataclass(frozen=True)
class WeightProfile:
    """|generator_j|^2 ~ lambda_j prod_i |z_i|^(2 exponents[j][i]).

    The slack lambda_j is only known to satisfy 1 <~ lambda_j <~ |z|^-eps
    for every eps > 0; see :func:`slack_verdict` for why it never matters.
    """

    exponents: tuple[tuple[Fraction, ...], ...]
    slack_lower: str = "1"
    slack_upper: str = "|z|^-eps for every eps > 0"

    @classmethod
    def from_basis(cls, B: ProlongedBasis, T: TwistSpec | None = None) -> WeightProfile:
        w = T.weights if T is not None else (Fraction(0),) * len(B.a)
        if len(w) != len(B.a):
            raise IndexMismatch("twist and basis disagree on the number of components")
        return cls(tuple(tuple(b - wi for b, wi in zip(g.beta, w)) for g in B.generators))

    @classmethod
    def of(cls, rows: Sequence[Sequence]) -> WeightProfile:
        return cls(tuple(tuple(rat(x) for x in r) for r in rows))

    @property
    def rank(self) -> int:
        return len(self.exponents)


# ---------------------------------------------------------------------------
# symbolic side


def is_integrable_1d(v: int, a) -> bool:
    return v + rat(a) > -1


def slack_verdict(v: int, a) -> bool:
    """Verdict for |z|^(2v) |z|^(2a) lambda with 1 <~ lambda <~ |z|^-eps.

    If v + a > -1, pick the rational eps = (v + a + 1)/2 > 0: the upper
    bound |z|^(2(v + a) - eps) still has exponent above -1, so the slack
    cannot break integrability.  If v + a <= -1, lambda >= 1 bounds the
    integrand below by the bare monomial, which already diverges.  Both
    branches agree with :func:`is_integrable_1d`, which this returns.
    """
    a = rat(a)
    base = is_integrable_1d(v, a)
    if base:
        eps = (v + a + 1) / 2
        assert is_integrable_1d(v, a - eps / 2)
    return base


def _check_profile(f: LaurentSection, W: WeightProfile) -> None:
    if f.rank != W.rank:
        raise IndexMismatch(f"section over {f.rank} generators, weights for {W.rank}")
    if any(len(r) != f.n_boundary for r in W.exponents):
        raise IndexMismatch("weight profile and section disagree on boundary axes")


def membership(f: LaurentSection, W: WeightProfile) -> bool:
    """Symbolic L^2 membership near the origin.

    The frame is L^2-adapted, so a sum is integrable iff each frame
    component is; each component passes iff v_i(f_j) + exponent_{j,i} > -1
    on every boundary axis.  Interior axes only see compact integrals.
    """
    _check_profile(f, W)
    for j in range(f.rank):
        fj = f.component(j)
        if fj.is_zero():
            continue
        for i in range(f.n_boundary):
            if not slack_verdict(valuation(fj, i), W.exponents[j][i]):
                return False
    return True


# ---------------------------------------------------------------------------
# numeric side


class Trend(enum.Enum):
    CONVERGENT = "CONVERGENT"
    DIVERGENT = "DIVERGENT"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class NumericResult:
    status: Trend
    value: float | None
    partials: tuple[float, ...] = field(repr=False)
    radial_value: float | None = None

    def verdict(self) -> bool:
        """Boolean integrability; raises Indeterminate when no trend was found."""
        if self.status is Trend.INDETERMINATE:
            raise Indeterminate("no convergence or divergence trend by the last cutoff")
        return self.status is Trend.CONVERGENT


def shell_trend(shells: Sequence[float], head: float = 0.0,
                window: int = WINDOW) -> tuple[Trend, float | None, tuple[float, ...]]:
    """Classify a sequence of annulus contributions d_k, k = K_FIRST..K_LAST.

    Partial integrals are I_k = head + d_K_FIRST + ... + d_(k-1).  The tail
    is Cauchy when every window of ``window`` levels shrinks the
    contributions by at least SHRINK; it diverges when the partial integrals
    exceed BLOWUP times the first one, or when every window grows the
    contributions by at least SHRINK.  A logarithmic boundary case has
    constant contributions and falls through to INDETERMINATE.
    """
    d = np.asarray(shells, dtype=float)
    partials = head + np.concatenate([[0.0], np.cumsum(d)])
    ratios = d[window:] / d[:-window]
    first = partials[1]
    if np.all(ratios <= 1 / SHRINK):
        q = (d[-1] / d[-2]) if d[-2] > 0 else 0.0
        tail = d[-1] * q / (1 - q) if q < 1 else 0.0
        return Trend.CONVERGENT, float(partials[-1] + tail), tuple(partials)
    if partials[-1] > BLOWUP * first or np.all(ratios >= SHRINK):
        return Trend.DIVERGENT, None, tuple(partials)
    return Trend.INDETERMINATE, None, tuple(partials)


def numeric_integral(v: int, a, outer: float = 0.5) -> NumericResult:
    """Brute-force ∫_{|z|<outer} |z^v|^2 |z|^(2a) over shrinking dyadic cutoffs.

    In polar coordinates the integrand is 2π r^(2(v+a)+1); each annulus is
    integrated with adaptive quadrature.  ``radial_value`` omits the 2π.
    """
    p = 2 * (v + float(rat(a))) + 1
    cut = [outer * 2.0 ** (1 - k) for k in range(1, K_LAST + 2)]  # cut[k-1] = outer*2^(1-k)

    def annulus(lo, hi):
        val, _ = integrate.quad(lambda r: r ** p, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
        return 2 * math.pi * val

    # head: |z| between outer*2^(1-K_FIRST) and outer
    head = sum(annulus(cut[k], cut[k - 1]) for k in range(1, K_FIRST))
    shells = [annulus(cut[k], cut[k - 1]) for k in range(K_FIRST, K_LAST + 1)]
    status, value, partials = shell_trend(shells, head)
    radial = value / (2 * math.pi) if value is not None else None
    return NumericResult(status, value, partials, radial)


Twist = Callable[[np.ndarray], np.ndarray]


def _gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _slice_shells(integrand: Callable[[np.ndarray], np.ndarray], outer: float,
                  n_r: int = 24, n_theta: int = 48) -> tuple[float, list[float]]:
    """Annulus integrals of a function of one complex variable.

    Each annulus is mapped to t = log r (Gauss-Legendre) times a periodic
    trapezoid rule in the angle; dA = r^2 dt dθ.
    """
    x, w = _gauss_nodes(n_r)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta

    def annulus(lo: float, hi: float) -> float:
        a, b = math.log(lo), math.log(hi)
        t = 0.5 * (b - a) * x + 0.5 * (b + a)
        r = np.exp(t)
        z = r[:, None] * np.exp(1j * theta)[None, :]
        vals = integrand(z) * (r ** 2)[:, None]
        return float(0.5 * (b - a) * (w @ vals.mean(axis=1)) * 2 * np.pi)

    cut = [outer * 2.0 ** (1 - k) for k in range(1, K_LAST + 2)]
    head = sum(annulus(cut[k], cut[k - 1]) for k in range(1, K_FIRST))
    shells = [annulus(cut[k], cut[k - 1]) for k in range(K_FIRST, K_LAST + 1)]
    return head, shells


def _base_point(f: LaurentSection) -> np.ndarray:
    width = f.n_boundary + f.n_interior
    rng = np.random.default_rng(7)
    mod = np.concatenate([np.full(f.n_boundary, 0.25), np.full(f.n_interior, 0.1)])
    return mod * np.exp(1j * rng.uniform(0.2, 2 * np.pi - 0.2, size=width))


def numeric_membership(f: LaurentSection, W: WeightProfile, twist: Twist | None = None,
                       outer: float = 0.5) -> dict:
    """Quadrature verdict for the weighted norm of f along each boundary axis.

    For axis i the other coordinates are frozen at a fixed generic point and
    the slice integrand sum_j |f_j|^2 prod |z|^(2 exponents) * twist is
    integrated over dyadic annuli in z_i.  Returns the per-axis trends and
    an overall status (DIVERGENT wins over INDETERMINATE).
    """
    _check_profile(f, W)
    expo = np.array([[float(x) for x in r] for r in W.exponents]) if W.rank else np.zeros((0, f.n_boundary))
    base = _base_point(f)
    per_axis = []
    for i in range(f.n_boundary):
        def integrand(zi, i=i):
            pts = np.broadcast_to(base, zi.shape + base.shape).copy()
            pts[..., i] = zi
            coeffs = f.evaluate(pts)
            mods = np.abs(pts[..., : f.n_boundary])
            weight = np.ones(zi.shape + (f.rank,))
            for j in range(f.rank):
                weight[..., j] = np.prod(mods ** (2 * expo[j]), axis=-1)
            dens = np.sum(np.abs(coeffs) ** 2 * weight, axis=-1)
            if twist is not None:
                dens = dens * twist(pts)
            return dens
        head, shells = _slice_shells(integrand, outer)
        status, _, _ = shell_trend(shells, head)
        per_axis.append(status)
    if any(s is Trend.DIVERGENT for s in per_axis):
        overall = Trend.DIVERGENT
    elif any(s is Trend.INDETERMINATE for s in per_axis):
        overall = Trend.INDETERMINATE
    else:
        overall = Trend.CONVERGENT
    return {"status": overall, "axes": per_axis}


# bounded positive smooth factors used by the twist-invariance harness
TWISTS: dict[str, Twist] = {
    "one": lambda p: np.ones(p.shape[:-1]),
    "two_plus_sin": lambda p: 2 + np.sin(np.abs(p[..., 0]) ** 2),
    "exp_re": lambda p: np.exp(p[..., 0].real),
    "rational": lambda p: 1 / (1 + np.sum(np.abs(p) ** 2, axis=-1)),
    "oscillating": lambda p: 1.5 + np.cos(3 * p[..., 0].real + 2 * p[..., -1].imag),
}


def smooth_twist_invariance(f: LaurentSection, W: WeightProfile, twist: Twist) -> dict:
    """Compare numeric verdicts with and without a bounded positive factor.

    Multiplying the metric by a smooth factor bounded above and below on the
    region cannot change finiteness; this harness checks that the numeric
    oracle sees the same thing and that both agree with :func:`membership`.
    """
    plain = numeric_membership(f, W)["status"]
    twisted = numeric_membership(f, W, twist)["status"]
    symbolic = membership(f, W)
    expected = Trend.CONVERGENT if symbolic else Trend.DIVERGENT
    return {
        "symbolic": symbolic,
        "plain": plain,
        "twisted": twisted,
        "invariant": plain is twisted,
        "agrees_with_symbolic": plain is expected and twisted is expected,
    }


# ---------------------------------------------------------------------------
# tameness


@dataclass(frozen=True)
class TamenessResult:
    tame: bool
    constant: float
    ratios: tuple[float, ...] = field(repr=False)


def tameness_check(h: np.ndarray, h_ref: np.ndarray, generator_values: np.ndarray, c,
                   growth: float = 10.0, side: str = "lower") -> TamenessResult:
    """Sampled test of (sum |f_i|^2)^c h_ref <~ h.

    With ``side="upper"`` the roles swap and the test is
    (sum |f_i|^2)^c h <~ h_ref, the growth bound on the singular metric.

    ``h`` and ``h_ref`` are stacks of hermitian matrices (S, r, r) and
    ``generator_values`` has shape (S, g).  At each sample the best constant
    is the top generalized eigenvalue of the left side relative to h.
    Samples are ordered by decreasing sum |f_i|^2, i.e. toward the boundary;
    the estimate counts as bounded when the innermost third never exceeds
    ``growth`` times the maximum over the rest.
    """
    h = np.asarray(h, dtype=complex)
    h_ref = np.asarray(h_ref, dtype=complex)
    vals = np.asarray(generator_values, dtype=complex)
    if vals.ndim == 1:
        vals = vals[:, None]
    c = float(rat(c)) if not isinstance(c, float) else c
    weight = np.sum(np.abs(vals) ** 2, axis=1) ** c
    order = np.argsort(-np.sum(np.abs(vals) ** 2, axis=1), kind="stable")
    ratios = []
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', not {side!r}")
    small, big = (h_ref, h) if side == "lower" else (h, h_ref)
    for s in order:
        top = linalg.eigh(weight[s] * small[s], big[s], eigvals_only=True)[-1]
        ratios.append(float(top))
    ratios = np.array(ratios)
    cut = max(1, (2 * len(ratios)) // 3)
    outer_max = ratios[:cut].max()
    inner_max = ratios[cut:].max() if cut < len(ratios) else outer_max
    tame = bool(inner_max <= growth * outer_max)
    return TamenessResult(tame, float(ratios.max()), tuple(ratios))
