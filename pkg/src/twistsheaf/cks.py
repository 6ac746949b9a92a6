"""Closed-form nilpotent-orbit Hodge metrics.

Every model gives its Hodge metric as a function of t_i = -log|s_i| in the
reference frame e_j = exp(sum_i log s_i N_i) v_j, where v_j is the flat
basis.  The adapted frame of the prolongation multiplies e_j by
prod s_i^beta_i, so its Gram matrix picks up prod |s_i|^(2 beta_i).  All
models depend on |s| only, which is what single-valuedness of the
reference frame requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import linalg

from .errors import PointOnBoundary, StepTooLarge, UnknownModel
from .exact import RatMatrix
from .l2 import TamenessResult, tameness_check
from .prolongation import LocalMonodromy, deligne_basis, monodromy_consistency
from .ssheaf import HodgeFiberData
from .weights import multigraded_levels, relative_weight_sequence

Gram = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class OrbitModel:
    identifier: str
    weight: int
    monodromy: LocalMonodromy
    hodge: HodgeFiberData
    gram: Gram = field(repr=False)
    description: str = ""
    diagnostic: bool = False

    @property
    def rank(self) -> int:
        return self.monodromy.dim

    @property
    def n(self) -> int:
        return self.monodromy.n

    def betas(self) -> np.ndarray:
        """Exponent of each flat basis vector in the V_{>-1} frame, shape (rank, n)."""
        out = np.zeros((self.rank, self.n))
        for j in range(self.rank):
            e = np.zeros(self.rank)
            e[j] = 1
            k = self.monodromy.block_of([Fraction(int(x)) for x in e])
            out[j] = [float(a) for a in self.monodromy.blocks[k].alpha]
        return out

    def predicted_levels(self) -> list[tuple[int, ...]]:
        Ws = relative_weight_sequence(self.monodromy.nilpotents)
        eye = RatMatrix.identity(self.rank)
        return [multigraded_levels(Ws, eye.rows[j]) for j in range(self.rank)]


def _tate_gram(t: np.ndarray) -> np.ndarray:
    y = t[0] / math.pi
    return np.diag([y, 1 / y]).astype(complex)


def _tate_nilpotent() -> RatMatrix:
    # N v1 = v2: v1 has weight 1, v2 = N v1 weight -1
    return RatMatrix.from_rows([[0, 0], [1, 0]])


def _build_models() -> dict[str, OrbitModel]:
    N = _tate_nilpotent()
    I2 = RatMatrix.identity(2)
    kron = lambda A, B: RatMatrix.from_rows(
        [[A[i // 2, j // 2] * B[i % 2, j % 2] for j in range(4)] for i in range(4)]
    )
    models = [
        OrbitModel(
            "trivial", 0, LocalMonodromy.trivial(1, 1),
            HodgeFiberData.build(0, {(0, 0): 1}, [0]),
            lambda t: np.eye(1, dtype=complex),
            "trivial rank-1 variation",
        ),
        OrbitModel(
            "tate", 1,
            LocalMonodromy.build(2, [((0,), I2.rows)], [N]),
            HodgeFiberData.build(1, {(1, 0): 1, (0, 1): 1}, [0]),
            _tate_gram,
            "rank-2 weight-1 unipotent orbit, h = diag(-log|s|/pi, pi/(-log|s|))",
        ),
        OrbitModel(
            "tate-twisted", 1,
            LocalMonodromy.build(2, [((Fraction(-1, 2),), I2.rows)], [N]),
            HodgeFiberData.build(1, {(1, 0): 1, (0, 1): 1}, [0]),
            _tate_gram,
            "tate orbit tensored with a flat unitary rank-1 system, alpha = -1/2",
        ),
        OrbitModel(
            "tate-product", 2,
            LocalMonodromy.build(4, [((0, 0), RatMatrix.identity(4).rows)], [kron(N, I2), kron(I2, N)]),
            HodgeFiberData.build(2, {(2, 0): 1, (1, 1): 2, (0, 2): 1}, [0]),
            lambda t: np.kron(_tate_gram(t[:1]), _tate_gram(t[1:2])),
            "product of two tate orbits over (Δ*)^2",
        ),
        OrbitModel(
            "corrupted-decay", 0, LocalMonodromy.trivial(1, 1),
            HodgeFiberData.build(0, {(0, 0): 1}, [0]),
            lambda t: np.array([[math.exp(-4 * t[0])]], dtype=complex),
            "not a Hodge metric: |e|^2 = |s|^4, fails the lower norm bound",
            diagnostic=True,
        ),
    ]
    return {m.identifier: m for m in models}


MODELS = _build_models()


def get_model(identifier: str) -> OrbitModel:
    try:
        return MODELS[identifier]
    except KeyError:
        raise UnknownModel(f"no model named {identifier!r}; known: {sorted(MODELS)}", field="model") from None


def _logs(model: OrbitModel, point: Sequence[complex]) -> np.ndarray:
    s = np.asarray(point, dtype=complex).reshape(-1)
    if s.shape[0] != model.n:
        raise PointOnBoundary(f"point has {s.shape[0]} coordinates, model has {model.n}", field="point")
    r = np.abs(s)
    if np.any(r == 0):
        raise PointOnBoundary("point lies on the boundary divisor", field="point")
    if np.any(r >= 1):
        raise PointOnBoundary("point lies outside the unit polydisc", field="point")
    return -np.log(r)


def metric_at(model: OrbitModel, point: Sequence[complex]) -> np.ndarray:
    """Hodge metric in the reference frame at a point of the punctured polydisc."""
    return model.gram(_logs(model, point))


def adapted_metric(model: OrbitModel, point: Sequence[complex], indices: Sequence[int] | None = None) -> np.ndarray:
    """Gram matrix of the V_{>-1} frame prod s_i^beta_i e_j, optionally restricted."""
    t = _logs(model, point)
    G = model.gram(t)
    scale = np.exp(-model.betas() @ t)  # |s|^beta per generator
    H = scale[:, None] * G * scale[None, :]
    if indices is not None:
        H = H[np.ix_(indices, indices)]
    return H


def flat_metric(model: OrbitModel, log_s: Sequence[complex]) -> np.ndarray:
    """Gram matrix of the multivalued flat basis on the branch with the given logarithms."""
    ell = np.asarray(log_s, dtype=complex)
    gen = _residue_operators(model)
    X = sum(l * A for l, A in zip(ell, gen))
    P = linalg.expm(-X)
    t = -ell.real
    G = model.gram(t)
    scale = np.exp(-model.betas() @ t)
    H = scale[:, None] * G * scale[None, :]
    return P.conj().T @ H @ P


def _residue_operators(model: OrbitModel) -> list[np.ndarray]:
    """alpha_i Id + N_i as complex matrices, block by block."""
    M = model.monodromy
    alpha = model.betas()
    ops = []
    for i in range(M.n):
        N = np.array([[float(x) for x in row] for row in M.nilpotents[i].rows], dtype=complex)
        ops.append(np.diag(alpha[:, i]).astype(complex) + N)
    return ops


def model_consistency(model: OrbitModel, samples: int = 8, tol: float = 1e-9) -> bool:
    """Monodromy data and metric evaluator describe the same local system.

    Checks that the Deligne frame is single valued, and that continuing the
    flat-frame Gram matrix once around each axis equals T_i^† G T_i with
    T_i = exp(-2πi(alpha_i Id + N_i)) built from the monodromy record.
    """
    M = model.monodromy
    if not monodromy_consistency(deligne_basis(M, [-1] * M.n), M):
        return False
    rng = np.random.default_rng(3)
    ops = _residue_operators(model)
    for _ in range(samples):
        ell = -rng.uniform(0.5, 4.0, M.n) + 1j * rng.uniform(-math.pi, math.pi, M.n)
        G = flat_metric(model, ell)
        for i in range(M.n):
            T = linalg.expm(-2j * math.pi * ops[i])
            shifted = ell.copy()
            shifted[i] += 2j * math.pi
            lhs = flat_metric(model, shifted)
            rhs = T.conj().T @ G @ T
            if not np.allclose(lhs, rhs, rtol=tol, atol=tol * np.abs(G).max()):
                return False
    return True


# ---------------------------------------------------------------------------
# norm asymptotics


@dataclass(frozen=True)
class ScanResult:
    min_ratio: float
    max_ratio: float
    samples: int
    levels: tuple[int, ...]
    epsilon: float


def siegel_samples(n: int, epsilon: float, count: int, seed: int = 0, span: float = 100.0) -> np.ndarray:
    """Points of the Siegel-type region as t_i = -log|s_i|, shape (count, n).

    t_n > eps and t_i / t_(i+1) > eps, each drawn log-uniformly over a factor
    ``span`` above eps.
    """
    rng = np.random.default_rng(seed)
    u = epsilon * np.exp(rng.uniform(0, math.log(span), size=(count, n)))
    u = np.maximum(u, np.nextafter(epsilon, np.inf))
    t = np.empty((count, n))
    t[:, n - 1] = u[:, n - 1]
    for i in range(n - 2, -1, -1):
        t[:, i] = u[:, i] * t[:, i + 1]
    return t


def predicted_norm(t: np.ndarray, levels: Sequence[int]) -> np.ndarray:
    """(t1/t2)^l1 ... (t_(n-1)/t_n)^l_(n-1) t_n^l_n for each row of t."""
    n = t.shape[1]
    out = t[:, n - 1] ** levels[n - 1]
    for i in range(n - 1):
        out = out * (t[:, i] / t[:, i + 1]) ** levels[i]
    return out


def cks_ratio_scan(model: OrbitModel, v: int | Sequence, epsilon: float = 1.0,
                   samples: int = 1000, seed: int = 0) -> ScanResult:
    """Extremes of |v|^2 / predicted log-monomial over the Siegel region."""
    if isinstance(v, int):
        vec = np.zeros(model.rank)
        vec[v] = 1
    else:
        vec = np.asarray(v, dtype=float)
    exact_v = [Fraction(x).limit_denominator() for x in vec]
    levels = multigraded_levels(relative_weight_sequence(model.monodromy.nilpotents), exact_v)
    t = siegel_samples(model.n, epsilon, samples, seed)
    measured = np.array([np.real(vec.conj() @ model.gram(row) @ vec) for row in t])
    ratios = measured / predicted_norm(t, levels)
    return ScanResult(float(ratios.min()), float(ratios.max()), samples, levels, epsilon)


# ---------------------------------------------------------------------------
# curvature


@dataclass(frozen=True)
class NakanoResult:
    min_eigenvalue: float
    min_eigenvalue_extrapolated: float
    richardson_gap: float
    step: float
    points: int


def nakano_grid(model: OrbitModel, radii: Sequence[float] | None = None, angles: int | None = None) -> np.ndarray:
    """Product grid with |s_i| in [e^-3, e^-1] by default, shape (P, n).

    Angles are offset from multiples of pi/8, where the quartic truncation
    term of the five-point Laplacian of log|s| vanishes and would hide the
    step-squared error trend.
    """
    if radii is None:
        radii = np.exp(-np.linspace(1, 3, 5 if model.n == 1 else 3))
    radii = np.asarray(radii)
    angles = (4 if model.n == 1 else 2) if angles is None else angles
    theta = 2 * np.pi * (np.arange(angles) + 0.1) / angles
    ring = (radii[:, None] * np.exp(1j * theta)[None, :]).reshape(-1)
    mesh = np.meshgrid(*([ring] * model.n), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def _curvature_form(Hf: Callable[[np.ndarray], np.ndarray], s: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Nakano form sum_jk <Theta_{j kbar} u_j, u_k> as an (n r) x (n r) hermitian matrix.

    With Chern connection H^-1 dH in a holomorphic frame, the coefficient is
    Q_jk = H_{sbar_k} H^-1 H_{s_j} - H_{s_j sbar_k}; derivatives by central
    differences in the real coordinates x_j, y_j of s_j.
    """
    n = s.shape[0]
    H0 = Hf(s)
    r = H0.shape[0]
    dirs = []
    for j in range(n):
        ex = np.zeros(n, dtype=complex)
        ex[j] = h
        ey = np.zeros(n, dtype=complex)
        ey[j] = 1j * h
        dirs.extend([ex, ey])
    first = [(Hf(s + d) - Hf(s - d)) / (2 * h) for d in dirs]
    second = {}
    for a, da in enumerate(dirs):
        for b, db in enumerate(dirs):
            if b < a:
                continue
            if a == b:
                val = (Hf(s + da) - 2 * H0 + Hf(s - da)) / h ** 2
            else:
                val = (Hf(s + da + db) - Hf(s + da - db) - Hf(s - da + db) + Hf(s - da - db)) / (4 * h ** 2)
            second[a, b] = second[b, a] = val
    Hinv = np.linalg.inv(H0)
    ds = [(first[2 * j] - 1j * first[2 * j + 1]) / 2 for j in range(n)]
    dsb = [(first[2 * j] + 1j * first[2 * j + 1]) / 2 for j in range(n)]
    big = np.zeros((n * r, n * r), dtype=complex)
    for j in range(n):
        for k in range(n):
            xj, yj, xk, yk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
            mixed = (second[xj, xk] + second[yj, yk] + 1j * (second[xj, yk] - second[yj, xk])) / 4
            Q = dsb[k] @ Hinv @ ds[j] - mixed
            big[k * r:(k + 1) * r, j * r:(j + 1) * r] = Q
    metric = np.kron(np.eye(n), H0)
    return 0.5 * (big + big.conj().T), metric


def _min_eig(form: np.ndarray, metric: np.ndarray) -> float:
    return float(linalg.eigh(form, metric, eigvals_only=True)[0])


def nakano_check(model: OrbitModel, grid: np.ndarray | None = None, step: float = 1e-3,
                 tolerance: float = 1e-2) -> NakanoResult:
    """Smallest Nakano curvature eigenvalue of S(V) found on the grid.

    The raw central-difference value at ``step`` is returned together with
    its Richardson extrapolation from steps h and h/2.

    Raises:
        StepTooLarge: if the raw and extrapolated forms differ by more than
            ``tolerance`` relative to the form's size.
    """
    grid = nakano_grid(model) if grid is None else np.asarray(grid, dtype=complex)
    sel = list(model.hodge.selector)
    Hf = lambda s: adapted_metric(model, s, sel)
    raw, extra, gap = math.inf, math.inf, 0.0
    for s in grid:
        Fh, metric = _curvature_form(Hf, s, step)
        Fh2, _ = _curvature_form(Hf, s, step / 2)
        R = (4 * Fh2 - Fh) / 3
        scale = max(np.abs(R).max(), 1.0)
        gap = max(gap, float(np.abs(Fh - R).max() / scale))
        raw = min(raw, _min_eig(Fh, metric))
        extra = min(extra, _min_eig(R, metric))
    if gap > tolerance:
        raise StepTooLarge(f"Richardson disagreement {gap:.3g} exceeds {tolerance}", field="step")
    return NakanoResult(raw, extra, gap, step, len(grid))


def tate_exact_curvature(s: complex) -> float:
    """-d dbar log(-log|s|) coefficient: 1 / (4 |s|^2 log^2|s|)."""
    r = abs(s)
    return 1.0 / (4 * r ** 2 * math.log(r) ** 2)


# ---------------------------------------------------------------------------
# lower norm bound


def boundary_path(n: int, samples: int, t_max: float = 60.0) -> np.ndarray:
    """Points approaching the origin along a fixed ray, shape (samples, n)."""
    t = np.geomspace(1.0, t_max, samples)
    ts = t[:, None] * (1 + 0.3 * np.arange(n))[None, :]
    phase = np.exp(1j * (0.7 + 0.9 * np.arange(n)))
    return np.exp(-ts) * phase[None, :]


def norm_lower_bound_check(model: OrbitModel, reference: np.ndarray | None = None,
                           samples: int = 200, growth: float = 10.0) -> TamenessResult:
    """Sampled |s_1...s_n|^2 h_0 <~ h on the full V_{>-1} frame.

    ``reference`` is a fixed positive hermitian matrix standing for a
    smooth metric h_0 (identity by default).
    """
    pts = boundary_path(model.n, samples)
    h0 = np.eye(model.rank) if reference is None else np.asarray(reference)
    h = np.stack([adapted_metric(model, p) for p in pts])
    ref = np.broadcast_to(h0, h.shape)
    prod = np.prod(pts, axis=1)
    return tameness_check(h, ref, prod, 1, growth=growth)
