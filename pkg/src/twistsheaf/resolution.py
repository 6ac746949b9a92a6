"""Point blowups over a surface germ and multiplier-ideal pushforwards.

Supported curves are those whose resolution is toric in the coordinates
(z, w): coordinate axes and irreducible germs whose Newton polygon is one
edge from z^p to w^q with gcd(p, q) = 1 (smooth germs are p = 1 or q = 1,
cusps are the rest), times monomials.  Such a branch is recorded by its
weight ray rho = (ord_t z, ord_t w) = (q, p) and the value lam of z^p/w^q
on it.

Infinitely near points are named by the components through them:

* ``meet(D1, D2)``: intersection of two components.  For toric divisors
  (axes and exceptional divisors created at torus-fixed points) this is a
  torus-fixed point and the rays must be adjacent in the fan.
* ``free(E, lam)``: a point on the open torus orbit of exceptional E (or a
  general point of a non-toric E).

Ledgers follow the standard recursions: blowing up a point P gives

    a(E_new)         = 1 + sum of a(D) over exceptional D through P
    ord_E_new(pi*C)  = mult_P(strict C) + sum of ord_D(pi*C) over D through P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import InvalidCenter, NotResolved, UnsupportedGerm
from .exact import rat

Ray = tuple[int, int]
Exps = tuple[int, int]

AXIS_Z = "Cz"  # the curve {z = 0}
AXIS_W = "Cw"  # the curve {w = 0}
AXIS_RAYS = {AXIS_Z: (1, 0), AXIS_W: (0, 1)}


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class PlaneCurveGerm:
    """Polynomial in z, w with rational coefficients vanishing at the origin."""

    terms: tuple[tuple[Exps, Fraction], ...]
    name: str = ""
    irreducible: bool | None = None

    def __post_init__(self):
        if not self.terms:
            raise UnsupportedGerm("the zero polynomial does not define a curve", field="germ")
        if any(e == (0, 0) for e, _ in self.terms):
            raise UnsupportedGerm("germ does not pass through the origin", field="germ")

    @classmethod
    def from_dict(cls, terms: Mapping[Exps, object], name: str = "", irreducible: bool | None = None) -> PlaneCurveGerm:
        clean = {}
        for e, c in terms.items():
            c = rat(c)
            if c:
                clean[tuple(e)] = clean.get(tuple(e), Fraction(0)) + c
        return cls(tuple(sorted((e, c) for e, c in clean.items() if c)), name, irreducible)

    @classmethod
    def parse(cls, text: str, name: str = "") -> PlaneCurveGerm:
        """Read a polynomial in z and w such as ``"z**2 - w**3"``."""
        import sympy

        z, w = sympy.symbols("z w")
        try:
            poly = sympy.Poly(sympy.sympify(text, locals={"z": z, "w": w}), z, w)
        except (sympy.SympifyError, sympy.PolynomialError) as exc:
            raise UnsupportedGerm(f"cannot read {text!r} as a polynomial in z, w", field="germ") from exc
        terms = {}
        for (i, j), c in poly.terms():
            if not c.is_Rational:
                raise UnsupportedGerm("coefficients must be rational", field="germ")
            terms[(int(i), int(j))] = Fraction(int(c.p), int(c.q))
        return cls.from_dict(terms, name or text)

    def normalized(self) -> tuple[tuple[Exps, Fraction], ...]:
        lead = self.terms[0][1]
        return tuple((e, c / lead) for e, c in self.terms)

    def monomial_order(self, ray: Ray) -> int:
        """min over terms of ray . exponent: the order along a toric divisor."""
        return min(ray[0] * i + ray[1] * j for (i, j), _ in self.terms)

    def __str__(self) -> str:
        return self.name or " + ".join(f"{c}*z^{i}*w^{j}" for (i, j), c in self.terms)


def axis_z() -> PlaneCurveGerm:
    return PlaneCurveGerm.from_dict({(1, 0): 1}, "z", True)


def axis_w() -> PlaneCurveGerm:
    return PlaneCurveGerm.from_dict({(0, 1): 1}, "w", True)


def node() -> PlaneCurveGerm:
    return PlaneCurveGerm.from_dict({(1, 1): 1}, "z*w", False)


def cusp(p: int, q: int) -> PlaneCurveGerm:
    """z^p - w^q with gcd(p, q) = 1."""
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise UnsupportedGerm(f"cusp z^{p} - w^{q} needs coprime positive exponents", field="germ")
    return PlaneCurveGerm.from_dict({(p, 0): 1, (0, q): -1}, f"z^{p} - w^{q}", True)


def smooth(k: int, lam=1, solved_for: str = "w") -> PlaneCurveGerm:
    """The smooth germ w = lam z^k (or z = lam w^k)."""
    if k < 1:
        raise UnsupportedGerm("contact order must be positive", field="germ")
    lam = rat(lam)
    if solved_for == "w":
        return PlaneCurveGerm.from_dict({(0, 1): 1, (k, 0): -lam}, f"w - {lam}*z^{k}", True)
    return PlaneCurveGerm.from_dict({(1, 0): 1, (0, k): -lam}, f"z - {lam}*w^{k}", True)


def catalog_germ(name: str, *params) -> PlaneCurveGerm:
    """Catalog lookup: ``axis-z``, ``axis-w``, ``node``, ``cusp p q``, ``smooth k [lam]``."""
    builders = {
        "axis-z": axis_z, "axis-w": axis_w, "node": node,
        "cusp": cusp, "smooth": smooth,
    }
    if name not in builders:
        raise UnsupportedGerm(f"unknown catalog curve {name!r}", field="germ")
    return builders[name](*params)


@dataclass(frozen=True)
class Branch:
    """A non-axis branch: weight ray and the value of z^p/w^q along it."""

    rho: Ray
    lam: Fraction
    polynomial: PlaneCurveGerm


def decompose(germ: PlaneCurveGerm) -> tuple[int, int, Branch | None]:
    """Split f = z^a w^b g; g a unit or a single supported branch.

    Raises:
        UnsupportedGerm: when g is neither a unit nor a one-edge branch with
            coprime endpoints.
    """
    a = min(i for (i, _), _ in germ.terms)
    b = min(j for (_, j), _ in germ.terms)
    g = {(i - a, j - b): c for (i, j), c in germ.terms}
    if (0, 0) in g:
        return a, b, None
    p = min(i for (i, j) in g if j == 0)
    q = min(j for (i, j) in g if i == 0)
    if math.gcd(p, q) != 1:
        raise UnsupportedGerm(
            f"{germ}: Newton edge z^{p}..w^{q} is not primitive; not in the toric catalog",
            field="germ",
        )
    if any(q * i + p * j < p * q for (i, j) in g):
        raise UnsupportedGerm(f"{germ}: Newton polygon has more than one edge", field="germ")
    lam = -g[(0, q)] / g[(p, 0)]
    poly = PlaneCurveGerm.from_dict(g, f"branch of {germ}")
    return a, b, Branch((q, p), lam, poly)


@dataclass(frozen=True)
class QDivisorGerm:
    components: tuple[tuple[PlaneCurveGerm, Fraction], ...]

    def __post_init__(self):
        if any(c < 0 for _, c in self.components):
            raise ValueError("divisor coefficients must be nonnegative")

    @classmethod
    def of(cls, pairs: Iterable[tuple[PlaneCurveGerm, object]]) -> QDivisorGerm:
        return cls(tuple((g, rat(c)) for g, c in pairs))

    def scaled(self, c) -> QDivisorGerm:
        c = rat(c)
        return QDivisorGerm(tuple((g, c * k) for g, k in self.components))

    def prime_components(self) -> tuple[dict[str, Fraction], dict[str, Branch]]:
        """Coefficients on axes and branches, branches named B1, B2, ...

        Two germs with the same (rho, lam) must be the same curve; otherwise
        they are tangent beyond what the toric model sees.
        """
        coeffs: dict[str, Fraction] = {}
        branches: dict[str, Branch] = {}
        for germ, c in self.components:
            a, b, br = decompose(germ)
            if a:
                coeffs[AXIS_Z] = coeffs.get(AXIS_Z, Fraction(0)) + a * c
            if b:
                coeffs[AXIS_W] = coeffs.get(AXIS_W, Fraction(0)) + b * c
            if br is None:
                continue
            key = None
            for name, other in branches.items():
                if (other.rho, other.lam) == (br.rho, br.lam):
                    if other.polynomial.normalized() != br.polynomial.normalized():
                        raise UnsupportedGerm(
                            f"two distinct branches share ray {br.rho} and lam {br.lam}", field="germ"
                        )
                    key = name
            if key is None:
                key = f"B{len(branches) + 1}"
                branches[key] = br
            coeffs[key] = coeffs.get(key, Fraction(0)) + c
        return coeffs, branches

    def support(self) -> QDivisorGerm:
        return QDivisorGerm(tuple((g, Fraction(1)) for g, c in self.components if c))


# ---------------------------------------------------------------------------
# infinitely near points


@dataclass(frozen=True)
class Center:
    kind: str  # "meet" or "free"
    names: tuple[str, ...]
    lam: Fraction | None = None

    @classmethod
    def meet(cls, a: str, b: str) -> Center:
        return cls("meet", tuple(sorted((a, b))))

    @classmethod
    def free(cls, divisor: str, lam) -> Center:
        return cls("free", (divisor,), rat(lam))

    @classmethod
    def origin(cls) -> Center:
        return cls.meet(AXIS_Z, AXIS_W)

    def to_json(self) -> dict:
        if self.kind == "meet":
            return {"meet": list(self.names)}
        return {"free": self.names[0], "lam": [self.lam.numerator, self.lam.denominator]}

    def __str__(self) -> str:
        if self.kind == "meet":
            return f"{self.names[0]} ∩ {self.names[1]}"
        return f"{self.names[0]}@{self.lam}"


@dataclass(frozen=True)
class ExceptionalDivisor:
    name: str
    center: Center
    through: tuple[tuple[str, int], ...]  # (component, multiplicity of its strict transform at the center)
    discrepancy: int
    orders: tuple[tuple[str, int], ...]  # ord_E(pi* C) for every tracked curve
    ray: Ray | None = None

    def order(self, curve: str) -> int:
        return dict(self.orders)[curve]


@dataclass
class _State:
    fan: list[Ray]
    ray_name: dict[Ray, str]
    exceptional: dict[str, ExceptionalDivisor]
    meets: set[frozenset]
    branch_meet: dict[str, frozenset]
    blown_free: set[tuple[str, Fraction]]


def _cone_coords(rho: Ray, u: Ray, v: Ray) -> tuple[Fraction, Fraction]:
    det = u[0] * v[1] - u[1] * v[0]
    x = Fraction(rho[0] * v[1] - rho[1] * v[0], det)
    y = Fraction(u[0] * rho[1] - u[1] * rho[0], det)
    return x, y


@dataclass(frozen=True)
class BlowupSequence:
    """Ordered point blowups over the origin, tracking a fixed set of branches.

    The ledger is recomputed by replaying the centers, so every instance is
    consistent with its own recursions by construction.
    """

    branches: tuple[tuple[str, Branch], ...]
    centers: tuple[Center, ...] = ()

    @classmethod
    def empty(cls, A: QDivisorGerm) -> BlowupSequence:
        _, branches = A.prime_components()
        return cls(tuple(sorted(branches.items())))

    @property
    def curves(self) -> list[str]:
        return [AXIS_Z, AXIS_W] + [name for name, _ in self.branches]

    def branch(self, name: str) -> Branch:
        return dict(self.branches)[name]

    def blow_up(self, center: Center) -> BlowupSequence:
        seq = BlowupSequence(self.branches, self.centers + (center,))
        seq._state  # validate eagerly
        return seq

    def __len__(self) -> int:
        return len(self.centers)

    @property
    def divisors(self) -> list[ExceptionalDivisor]:
        return list(self._state.exceptional.values())

    def divisor(self, name: str) -> ExceptionalDivisor:
        return self._state.exceptional[name]

    # -- replay ------------------------------------------------------------

    @cached_property
    def _state(self) -> _State:
        st = _State(
            fan=[(1, 0), (0, 1)],
            ray_name={(1, 0): AXIS_Z, (0, 1): AXIS_W},
            exceptional={},
            meets=set(),
            branch_meet={},
            blown_free=set(),
        )
        for c in self.centers:
            self._apply(st, c)
        return st

    def _ray_of(self, st: _State, name: str) -> Ray | None:
        if name in AXIS_RAYS:
            return AXIS_RAYS[name]
        e = st.exceptional.get(name)
        return e.ray if e is not None else None

    def _branches_at_torus_point(self, st: _State, u: Ray, v: Ray) -> list[tuple[str, Fraction, Fraction]]:
        out = []
        for name, br in self.branches:
            if name in st.branch_meet:
                continue
            x, y = _cone_coords(br.rho, u, v)
            if x > 0 and y > 0:
                out.append((name, x, y))
        return out

    def _branch_at_free(self, st: _State, divisor: str, lam: Fraction) -> str | None:
        ray = self._ray_of(st, divisor)
        for name, br in self.branches:
            if name in st.branch_meet or ray is None:
                continue
            if br.rho == ray and br.lam == lam:
                return name
        return None

    def _through(self, st: _State, c: Center) -> list[tuple[str, int]]:
        if c.kind == "meet":
            a, b = c.names
            ra, rb = self._ray_of(st, a), self._ray_of(st, b)
            if ra is not None and rb is not None and frozenset(c.names) not in st.meets:
                i, j = st.fan.index(ra), st.fan.index(rb)
                if abs(i - j) != 1:
                    raise InvalidCenter(f"{a} and {b} do not meet", field="center")
                u, v = (ra, rb) if i < j else (rb, ra)
                through = [(st.ray_name[u], 1), (st.ray_name[v], 1)]
                for name, x, y in self._branches_at_torus_point(st, u, v):
                    through.append((name, int(min(x, y))))
                return through
            if frozenset(c.names) not in st.meets:
                raise InvalidCenter(f"{a} and {b} do not meet", field="center")
            return [(a, 1), (b, 1)]
        if c.kind == "free":
            (d,) = c.names
            if d not in st.exceptional:
                raise InvalidCenter(f"free points must lie on an exceptional divisor, not {d}", field="center")
            if not c.lam:
                raise InvalidCenter("free point parameter must be nonzero", field="center")
            if (d, c.lam) in st.blown_free:
                raise InvalidCenter(f"point {c} was already blown up", field="center")
            through = [(d, 1)]
            b = self._branch_at_free(st, d, c.lam)
            if b is not None:
                through.append((b, 1))
            return through
        raise InvalidCenter(f"unknown center kind {c.kind!r}", field="center")

    def _apply(self, st: _State, c: Center) -> None:
        through = self._through(st, c)
        mult = dict(through)
        exc = [st.exceptional[n] for n, _ in through if n in st.exceptional]
        discrepancy = 1 + sum(e.discrepancy for e in exc)
        orders = tuple(
            (curve, mult.get(curve, 0) + sum(e.order(curve) for e in exc)) for curve in self.curves
        )
        name = f"E{len(st.exceptional) + 1}"
        ray = None
        if c.kind == "meet" and frozenset(c.names) not in st.meets:
            u, v = (self._ray_of(st, n) for n, _ in through[:2])
            ray = (u[0] + v[0], u[1] + v[1])
            st.fan.insert(max(st.fan.index(u), st.fan.index(v)), ray)
            st.ray_name[ray] = name
        else:
            if c.kind == "meet":
                st.meets.discard(frozenset(c.names))
            else:
                st.blown_free.add((c.names[0], c.lam))
            for other, _ in through:
                st.meets.add(frozenset((name, other)))
                if other in dict(self.branches):
                    st.branch_meet[other] = frozenset((name, other))
        st.exceptional[name] = ExceptionalDivisor(name, c, tuple(through), discrepancy, orders, ray)

    def special_points(self) -> list[Center]:
        """Every current intersection point plus the free points carrying a branch."""
        st = self._state
        pts = [Center.meet(st.ray_name[u], st.ray_name[v]) for u, v in zip(st.fan, st.fan[1:])]
        pts += [Center.meet(*sorted(m)) for m in sorted(st.meets, key=sorted)]
        for name, br in self.branches:
            if name in st.branch_meet:
                continue
            if br.rho in st.ray_name and st.ray_name[br.rho] in st.exceptional:
                pts.append(Center.free(st.ray_name[br.rho], br.lam))
        return pts

    # -- SNC ---------------------------------------------------------------

    def snc_defects(self, relevant: Iterable[str]) -> list[Center]:
        """Torus-fixed points where exceptional divisors plus ``relevant`` curves fail SNC.

        Non-toric points never fail: they carry at most two smooth
        components meeting transversally by construction.
        """
        st = self._state
        relevant = set(relevant) | set(st.exceptional)
        bad = []
        for u, v in zip(st.fan, st.fan[1:]):
            comps = [n for n in (st.ray_name[u], st.ray_name[v]) if n in relevant]
            local = [(n, x, y) for n, x, y in self._branches_at_torus_point(st, u, v) if n in relevant]
            ok = len(comps) + len(local) <= 2
            directions = []
            for n, x, y in local:
                if min(x, y) != 1:
                    ok = False
                if st.ray_name[u] in comps and x != 1:
                    ok = False
                if st.ray_name[v] in comps and y != 1:
                    ok = False
                directions.append(("lam", self.branch(n).lam) if x == y == 1 else ("along", x > 1))
            if len(set(directions)) != len(directions):
                ok = False
            if not ok:
                bad.append(Center.meet(st.ray_name[u], st.ray_name[v]))
        return bad

    def resolves(self, A: QDivisorGerm) -> bool:
        coeffs, _ = A.prime_components()
        self._check_tracks(A)
        return not self.snc_defects(n for n, c in coeffs.items() if c)

    def _check_tracks(self, A: QDivisorGerm) -> None:
        _, branches = A.prime_components()
        mine = dict(self.branches)
        for name, br in branches.items():
            if name not in mine or (mine[name].rho, mine[name].lam) != (br.rho, br.lam):
                raise NotResolved("sequence was built for a different divisor", field="sequence")

    # -- reporting ---------------------------------------------------------

    def tree(self) -> list[dict]:
        out = []
        for e in self.divisors:
            out.append({
                "name": e.name,
                "center": e.center.to_json(),
                "through": [{"component": n, "multiplicity": m} for n, m in e.through],
                "discrepancy": e.discrepancy,
                "orders": dict(e.orders),
                "ray": list(e.ray) if e.ray else None,
            })
        return out


def log_resolve(A: QDivisorGerm) -> BlowupSequence:
    """Blow up non-SNC torus-fixed points until supp(A) ∪ Exc is SNC.

    Raises:
        UnsupportedGerm: for curves outside the catalog.
    """
    coeffs, _ = A.prime_components()
    relevant = [n for n, c in coeffs.items() if c]
    seq = BlowupSequence.empty(A)
    while True:
        bad = seq.snc_defects(relevant)
        if not bad:
            return seq
        seq = seq.blow_up(bad[0])


def verify_ledger(seq: BlowupSequence) -> bool:
    """Replay check: recursions hold at every node, and every toric divisor
    matches the monomial valuation of its ray (discrepancy a + b - 1, order
    of each curve = min over its monomials)."""
    replay = BlowupSequence(seq.branches)
    for c in seq.centers:
        replay = replay.blow_up(c)
    if [e for e in replay.divisors] != seq.divisors:
        return False
    polys = {AXIS_Z: axis_z(), AXIS_W: axis_w()}
    polys.update({n: b.polynomial for n, b in seq.branches})
    known = {}
    for e in seq.divisors:
        mult = dict(e.through)
        exc = [known[n] for n, _ in e.through if n in known]
        if e.discrepancy != 1 + sum(x.discrepancy for x in exc):
            return False
        for curve, order in e.orders:
            if order != mult.get(curve, 0) + sum(x.order(curve) for x in exc):
                return False
        if e.ray is not None:
            if e.discrepancy != e.ray[0] + e.ray[1] - 1:
                return False
            if any(order != polys[curve].monomial_order(e.ray) for curve, order in e.orders):
                return False
        known[e.name] = e
    return True


# ---------------------------------------------------------------------------
# multiplier ideals


@dataclass(frozen=True)
class Condition:
    component: str
    kind: str  # "exceptional" or "strict"
    threshold: int
    order_of_A: Fraction
    discrepancy: int = 0

    def to_json(self) -> dict:
        return {
            "component": self.component,
            "kind": self.kind,
            "threshold": self.threshold,
            "order_of_A": str(self.order_of_A),
            "discrepancy": self.discrepancy,
        }


@dataclass(frozen=True)
class IdealTable:
    conditions: tuple[Condition, ...]
    degree_bound: int
    monomials: frozenset[Exps] = field(repr=False)

    def generators(self) -> list[Exps]:
        """Minimal monomials of the table under divisibility."""
        return sorted(
            m for m in self.monomials
            if not any(o != m and o[0] <= m[0] and o[1] <= m[1] for o in self.monomials)
        )

    def is_unit(self) -> bool:
        return (0, 0) in self.monomials

    def to_json(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "conditions": [c.to_json() for c in self.conditions],
            "generators": [list(m) for m in self.generators()],
            "monomials": [list(m) for m in sorted(self.monomials)],
        }


def _monomial_order(e: ExceptionalDivisor, m: Exps) -> int:
    return m[0] * e.order(AXIS_Z) + m[1] * e.order(AXIS_W)


def pushforward_ideal(seq: BlowupSequence, A: QDivisorGerm, degree_bound: int = 12) -> IdealTable:
    """Valuation conditions for the multiplier ideal of A and its monomials.

    f is in the ideal iff ord_E(f) >= floor(ord_E(pi*A)) - a(E) on every
    exceptional E and ord_C(f) >= floor(coeff_C) on every component C of A.
    Monomials are tabulated up to total degree ``degree_bound``; a branch
    with floor(coeff) >= 1 is not monomial, so no monomial passes it.

    Raises:
        NotResolved: if the sequence does not make supp(A) ∪ Exc SNC.
    """
    if not seq.resolves(A):
        raise NotResolved("blowup sequence is not a log resolution of A", field="sequence")
    coeffs, _ = A.prime_components()
    conds = []
    for e in seq.divisors:
        order = sum((c * e.order(curve) for curve, c in coeffs.items()), Fraction(0))
        conds.append(Condition(e.name, "exceptional", math.floor(order) - e.discrepancy, order, e.discrepancy))
    for curve, c in sorted(coeffs.items()):
        conds.append(Condition(curve, "strict", math.floor(c), c))
    table = []
    for i in range(degree_bound + 1):
        for j in range(degree_bound + 1 - i):
            if _passes(seq, conds, (i, j)):
                table.append((i, j))
    return IdealTable(tuple(conds), degree_bound, frozenset(table))


def _passes(seq: BlowupSequence, conds: Sequence[Condition], m: Exps) -> bool:
    for c in conds:
        if c.kind == "exceptional":
            value = _monomial_order(seq.divisor(c.component), m)
        elif c.component == AXIS_Z:
            value = m[0]
        elif c.component == AXIS_W:
            value = m[1]
        else:
            value = 0
        if value < c.threshold:
            return False
    return True


def multiplier_ideal(A: QDivisorGerm, degree_bound: int = 12) -> IdealTable:
    return pushforward_ideal(log_resolve(A), A, degree_bound)


def resolution_independence(A: QDivisorGerm, first: BlowupSequence, second: BlowupSequence,
                            degree_bound: int = 12) -> bool:
    return (
        pushforward_ideal(first, A, degree_bound).monomials
        == pushforward_ideal(second, A, degree_bound).monomials
    )


@dataclass(frozen=True)
class JumpScan:
    grid: tuple[Fraction, ...]
    tables: tuple[IdealTable, ...]

    @property
    def changes(self) -> list[Fraction]:
        """Grid values where the table differs from the previous grid value."""
        return [
            c for c, prev, cur in zip(self.grid[1:], self.tables, self.tables[1:])
            if prev.monomials != cur.monomials
        ]


def jumping_scan(base: QDivisorGerm, grid: Sequence, degree_bound: int = 12,
                 seq: BlowupSequence | None = None) -> JumpScan:
    """Tables for c * base over a grid of c; one resolution serves every c."""
    grid = tuple(sorted(rat(c) for c in grid))
    seq = log_resolve(base.support()) if seq is None else seq
    tables = tuple(pushforward_ideal(seq, base.scaled(c), degree_bound) for c in grid)
    return JumpScan(grid, tables)
