"""One-dimensional formal group laws over Z_(p) and their evaluation on P_L^n.

Coefficients are exact rationals.  Evaluation on tower points works on integer
numerator tables modulo p^R and reduces canonically modulo P_L^m; a law of
degree cap D evaluated on points of level n is exact modulo P_L^((D+1)n).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BadFrobeniusLift, InternalInconsistency, PrecisionLoss
from .padic import INF, fraction_mod, vp_fraction
from .series import TruncSeries
from .tower import FieldTower, TowerElement, _ceil_div

DEFAULT_DEGREE = 12

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"
LUBIN_TATE = "lubin-tate"
ELLIPTIC = "elliptic"
CUSTOM = "custom"


def _X(D):
    return TruncSeries.var(2, D, 0)


def _Y(D):
    return TruncSeries.var(2, D, 1)


def reciprocal(s: TruncSeries) -> TruncSeries:
    """1/s for a series with nonzero constant term."""
    c = s.coefficient((0,) * s.nvars)
    if not c:
        raise ZeroDivisionError("series has no constant term")
    # Newton iteration g <- g(2 - s g), doubling the correct degree each step
    g = TruncSeries.const(s.nvars, 0, 1 / c)
    k = 0
    while k < s.D:
        k = min(2 * k + 1, s.D)
        sk = s.truncate(k)
        g = TruncSeries(g.nvars, k, g.coeffs)
        g = g * (2 - sk * g)
    return TruncSeries(s.nvars, s.D, g.coeffs)


def inverse_series(F: TruncSeries) -> TruncSeries:
    """ι with F(T, ι(T)) = 0, solved degree by degree."""
    D = F.D
    T = TruncSeries.var(1, D, 0)
    iota = -T
    for k in range(2, D + 1):
        r = F.compose([T, iota]).coefficient(k)
        if r:
            iota = iota - TruncSeries(1, D, {(k,): r})
    return iota


@dataclass
class FormalGroupLaw:
    F: TruncSeries
    kind: str
    params: dict = field(default_factory=dict)
    iota: TruncSeries | None = None

    def __post_init__(self):
        if self.iota is None:
            self.iota = inverse_series(self.F)

    @property
    def D(self) -> int:
        return self.F.D

    def at_degree(self, D: int) -> "FormalGroupLaw":
        """The same law with degree cap ``D`` (rebuilt when D grows)."""
        if D <= self.D:
            return FormalGroupLaw(self.F.truncate(D), self.kind, self.params, self.iota.truncate(D))
        return make_law(self.kind, D=D, **self.params)

    def coefficient(self, i: int, j: int) -> Fraction:
        return self.F.coefficient(i, j)

    def describe(self) -> dict:
        out = {"kind": self.kind, "D": self.D}
        out.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params.items()})
        return out


def additive_law(D: int = DEFAULT_DEGREE) -> FormalGroupLaw:
    return FormalGroupLaw(_X(D) + _Y(D), ADDITIVE, {}, -TruncSeries.var(1, D, 0))


def multiplicative_law(D: int = DEFAULT_DEGREE) -> FormalGroupLaw:
    X, Y = _X(D), _Y(D)
    iota = TruncSeries(1, D, {(k,): (-1) ** k for k in range(1, D + 1)})
    return FormalGroupLaw(X + Y + X * Y, MULTIPLICATIVE, {}, iota)


def lubin_tate_law(p: int, pi, f, D: int = DEFAULT_DEGREE, q: int | None = None) -> FormalGroupLaw:
    """Law F with f(F(X,Y)) = F(f(X), f(Y)) for a Frobenius lift ``f`` (constant-first list)."""
    q = p if q is None else q
    pi = Fraction(pi)
    if vp_fraction(pi, p) != 1:
        raise BadFrobeniusLift(f"π = {pi} is not a uniformizer of Q_{p}")
    f = [Fraction(c) for c in f]
    if len(f) < 2 or f[0] != 0 or f[1] != pi:
        raise BadFrobeniusLift("f must be congruent to πZ modulo Z^2")
    for k, c in enumerate(f):
        target = 1 if k == q else 0
        if vp_fraction(c - target, p) < 1:
            raise BadFrobeniusLift(f"f is not congruent to Z^{q} modulo π (coefficient of Z^{k})")
    if len(f) <= q:
        raise BadFrobeniusLift(f"f is not congruent to Z^{q} modulo π")
    fs = TruncSeries.from_list(f, D)
    fX = fs.compose([_X(D)])
    fY = fs.compose([_Y(D)])
    F = _X(D) + _Y(D)
    for k in range(2, D + 1):
        lhs = F.compose([fX, fY]).homogeneous(k)
        rhs = fs.compose([F]).homogeneous(k)
        F = F + (lhs - rhs).scale(1 / (pi - pi**k))
    params = {"p": p, "pi": pi if pi.denominator != 1 else int(pi), "f": tuple(int(c) if c.denominator == 1 else c for c in f)}
    if q != p:
        params["q"] = q
    return FormalGroupLaw(F, LUBIN_TATE, params)


def lubin_tate_residual(law: FormalGroupLaw) -> TruncSeries:
    """f∘F - F∘(f, f); vanishes to degree D for a correctly built law."""
    D = law.D
    fs = TruncSeries.from_list(list(law.params["f"]), D)
    return fs.compose([law.F]) - law.F.compose([fs.compose([_X(D)]), fs.compose([_Y(D)])])


def weierstrass_w(a, D: int) -> TruncSeries:
    """w(z) = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3 by fixed-point iteration."""
    a1, a2, a3, a4, a6 = (Fraction(x) for x in a)
    z = TruncSeries.var(1, D, 0)
    z2, z3 = z * z, z * z * z
    w = TruncSeries.zero(1, D)
    for _ in range(D):
        w2 = w * w
        new = z3 + (z * w).scale(a1) + (z2 * w).scale(a2) + w2.scale(a3) + (z * w2).scale(a4) + (w2 * w).scale(a6)
        if new == w:
            break
        w = new
    return w


def elliptic_law(a, D: int = DEFAULT_DEGREE) -> FormalGroupLaw:
    """Formal group of y^2 + a1xy + a3y = x^3 + a2x^2 + a4x + a6 in z = -x/y."""
    a = tuple(Fraction(x) for x in a)
    a1, a2, a3, a4, a6 = a
    Dw = D + 3
    w = weierstrass_w(a, Dw)
    X, Y = _X(D), _Y(D)
    # slope of the chord through (z1, w1), (z2, w2)
    lam = TruncSeries.zero(2, D)
    for n in range(3, D + 2):
        A = w.coefficient(n)
        if A:
            h = TruncSeries(2, D, {(i, n - 1 - i): 1 for i in range(n)})
            lam = lam + h.scale(A)
    w1 = w.truncate(D).compose([X])
    nu = w1 - lam * X
    lam2 = lam * lam
    Aser = 1 + lam.scale(a2) + lam2.scale(a4) + (lam2 * lam).scale(a6)
    Bser = lam.scale(a1) + nu.scale(a2) + lam2.scale(a3) + (lam * nu).scale(2 * a4) + (lam2 * nu).scale(3 * a6)
    z3 = -X - Y - Bser * reciprocal(Aser)
    z = TruncSeries.var(1, D, 0)
    denom = TruncSeries.const(1, D, -1) + z.scale(a1) + w.truncate(D).scale(a3)
    inv = z * reciprocal(denom)
    F = inv.compose([z3])
    iota = inv  # negation of a point is already explicit on the curve
    params = {"a": tuple(int(x) if x.denominator == 1 else x for x in a)}
    return FormalGroupLaw(F, ELLIPTIC, params, iota)


def make_law(kind: str, D: int = DEFAULT_DEGREE, **params) -> FormalGroupLaw:
    if kind == CUSTOM:
        return FormalGroupLaw(params["series"].truncate(D), CUSTOM, params)
    key = tuple(sorted((k, tuple(v) if isinstance(v, list) else v) for k, v in params.items()))
    return _build_law(kind, D, key)


@functools.lru_cache(maxsize=64)
def _build_law(kind: str, D: int, key) -> FormalGroupLaw:
    # laws are immutable, so rebuilds at a higher degree are shared
    params = dict(key)
    if kind == ADDITIVE:
        return additive_law(D)
    if kind == MULTIPLICATIVE:
        return multiplicative_law(D)
    if kind == LUBIN_TATE:
        return lubin_tate_law(params["p"], params["pi"], params["f"], D, params.get("q"))
    if kind == ELLIPTIC:
        return elliptic_law(params["a"], D)
    raise ValueError(f"unknown law kind {kind!r}")


# -- axioms ----------------------------------------------------------------------

@dataclass
class AxiomReport:
    D: int
    linear: bool
    associative: bool
    commutative: bool
    identity: bool
    inverse: bool
    first_failure: str | None = None

    @property
    def passed(self) -> bool:
        return self.linear and self.associative and self.commutative and self.identity and self.inverse

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "linear": self.linear,
            "associative": self.associative,
            "commutative": self.commutative,
            "identity": self.identity,
            "inverse": self.inverse,
            "first_failure": self.first_failure,
            "pass": self.passed,
        }


def _first_term(s: TruncSeries):
    t = s.first_nonzero()
    if t is None:
        return None
    return f"exponent {t[0]} coefficient {t[1]}"


def fgl_verify_axioms(law, D: int | None = None) -> AxiomReport:
    """Check linear part, associativity, commutativity, F(T,0)=T and ι to degree D."""
    F = law.F if isinstance(law, FormalGroupLaw) else law
    D = F.D if D is None else min(D, F.D)
    F = F.truncate(D)
    failure = None

    def note(name, s):
        nonlocal failure
        if failure is None and s is not None:
            failure = f"{name}: {s}"

    X, Y = _X(D), _Y(D)
    lin = F.homogeneous(1) - X - Y + F.homogeneous(0)
    linear = lin.is_zero()
    note("linear part", _first_term(lin))
    V = [TruncSeries.var(3, D, i) for i in range(3)]
    assoc = F.compose([V[0], F.compose([V[1], V[2]])]) - F.compose([F.compose([V[0], V[1]]), V[2]])
    associative = assoc.is_zero()
    note("associativity", _first_term(assoc))
    comm = F - F.compose([Y, X])
    commutative = comm.is_zero()
    note("commutativity", _first_term(comm))
    T = TruncSeries.var(1, D, 0)
    ident = F.compose([T, TruncSeries.zero(1, D)]) - T
    identity = ident.is_zero()
    note("F(T,0)=T", _first_term(ident))
    inverse = False
    if F.coefficient(0, 1) == 1 and not F.coefficient(0, 0):
        iota = law.iota.truncate(D) if isinstance(law, FormalGroupLaw) else inverse_series(F)
        r1 = F.compose([T, iota])
        r2 = F.compose([iota, T])
        inverse = r1.is_zero() and r2.is_zero()
        note("inverse", _first_term(r1) or _first_term(r2))
    else:
        note("inverse", "linear coefficient in Y is not 1")
    return AxiomReport(D, linear, associative, commutative, identity, inverse, failure)


def formal_log(law: FormalGroupLaw, D: int | None = None) -> TruncSeries:
    """ℓ with ℓ(F(X,Y)) = ℓ(X) + ℓ(Y), from ℓ' = 1 / ∂F/∂Y(T, 0)."""
    D = law.D if D is None else D
    F = law.at_degree(D).F
    dY = F.deriv(1)
    at0 = TruncSeries(1, D - 1, {(e[0],): c for e, c in dY.coeffs.items() if e[1] == 0})
    return reciprocal(at0).integrate()


# -- evaluation on tower points ---------------------------------------------------

class LawEvaluator:
    """Group operations of a law on P_L^n / P_L^m, on canonical numerator tables."""

    def __init__(self, law: FormalGroupLaw, tower: FieldTower, m: int, n: int = 1):
        if n < 1:
            raise ValueError("points must lie in P_L")
        need = max(_ceil_div(m, n) - 1, 1)
        if law.D < need:
            law = law.at_degree(need)
        elif law.D > need:
            law = law.at_degree(need)
        self.law = law
        self.tower = tower
        self.m = m
        self.n = n
        self.tail = (law.D + 1) * n
        self.R = max(1, _ceil_div(m, tower.e))
        self.mod = tower.p**self.R
        p, R = tower.p, self.R
        rows = {}
        for (i, j), c in law.F.coeffs.items():
            rows.setdefault(j, []).append((i, fraction_mod(c, p, R)))
        self._rows = rows
        self._top = max(rows, default=0)
        self._iota = [(k[0], fraction_mod(c, p, R)) for k, c in law.iota.coeffs.items()]
        self.zero = (0,) * tower.degree

    def _powers(self, x, k):
        t, mod = self.tower, self.mod
        out = [None, x]
        for _ in range(k - 1):
            out.append(t.mul_num(out[-1], x, mod))
        return out

    def _lin(self, terms, powers):
        mod = self.mod
        acc = [0] * self.tower.degree
        for i, c in terms:
            if i == 0:
                acc[0] += c
                continue
            for k, v in enumerate(powers[i]):
                acc[k] += c * v
        return tuple(v % mod for v in acc)

    def add(self, x, y):
        t, mod = self.tower, self.mod
        xp = self._powers(x, self.law.D)
        acc = None
        for j in range(self._top, -1, -1):
            part = self._lin(self._rows.get(j, ()), xp)
            if acc is None:
                acc = part
            else:
                acc = tuple((a + b) % mod for a, b in zip(t.mul_num(acc, y, mod), part))
        return t.level_reduce(acc, self.m)

    def neg(self, x):
        xp = self._powers(x, self.law.D)
        return self.tower.level_reduce(self._lin(self._iota, xp), self.m)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def reduce(self, x):
        return self.tower.level_reduce(x, self.m)

    def orbit_sum(self, x, autos):
        """Formal sum of σ(x) over the given automorphisms."""
        acc = None
        for a in autos:
            y = a.apply_level(x, self.m)
            acc = y if acc is None else self.add(acc, y)
        return acc


class UnitsEvaluator:
    """Multiplication of principal units written as 1 + x, on the same tables."""

    law = None

    def __init__(self, tower: FieldTower, m: int, n: int = 1):
        self.tower = tower
        self.m = m
        self.n = n
        self.tail = INF
        self.R = max(1, _ceil_div(m, tower.e))
        self.mod = tower.p**self.R
        self.zero = (0,) * tower.degree

    def add(self, x, y):
        t, mod = self.tower, self.mod
        xy = t.mul_num(x, y, mod)
        return t.level_reduce([(a + b + c) % mod for a, b, c in zip(x, y, xy)], self.m)

    def neg(self, x):
        t = self.tower
        u = list(x)
        u[0] += 1
        inv = t.make(u, 0, self.m).inverse()
        num = list(inv.num)
        num[0] -= 1
        return t.level_reduce(num, self.m)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def reduce(self, x):
        return self.tower.level_reduce(x, self.m)

    def orbit_sum(self, x, autos):
        acc = None
        for a in autos:
            y = a.apply_level(x, self.m)
            acc = y if acc is None else self.add(acc, y)
        return acc


def _point_level(x: TowerElement) -> int:
    if x.den:
        raise ValueError("point is not integral")
    v = x.valuation()
    if v == INF:
        return x.prec
    if v < 1:
        raise ValueError("point is not in P_L")
    return int(v)


def fgl_add(law: FormalGroupLaw, x: TowerElement, y: TowerElement) -> TowerElement:
    """x +_F y, exact to the precision of the inputs (degree cap raised as needed)."""
    t = x.tower
    n = min(_point_level(x), _point_level(y))
    m = min(x.prec, y.prec)
    ev = LawEvaluator(law, t, m, n)
    return t.make(ev.add(x.num, y.num), 0, m)


def fgl_eval_and_norm(table, law, x: TowerElement, H=None) -> TowerElement:
    """Orbit norm N_H^F(x) = formal sum of σ(x) over σ in H."""
    t = x.tower
    H = sorted(range(table.order) if H is None else H)
    autos = [table.autos[h] for h in H]
    n = _point_level(x)
    m = min(x.prec, min(a.prec for a in autos))
    ev = UnitsEvaluator(t, m, n) if law is None else LawEvaluator(law, t, m, n)
    out = t.make(ev.orbit_sum(x.num, autos), 0, m)
    if law is not None and law.kind == ADDITIVE:
        tr = t.zero(m)
        for a in autos:
            tr = tr + a(x)
        if not (tr - out).is_zero():
            raise InternalInconsistency("additive norm differs from the trace")
    if law is not None and law.kind == MULTIPLICATIVE:
        nm = t.one(m)
        for a in autos:
            nm = nm * (a(x) + 1)
        if not (nm - 1 - out).is_zero():
            raise InternalInconsistency("multiplicative norm differs from the shifted field norm")
    return out


def log_eval(series: TruncSeries, x: TowerElement) -> TowerElement:
    """Evaluate a logarithm-type series Σ c_k T^k (k·c_k integral) at a point of P_L."""
    t = x.tower
    n = _point_level(x)
    D = series.D
    e, p = t.e, t.p
    # certified bound on the tail v_L(c_k x^k) >= k n - e·floor(log_p k) for k > D
    tail = min(k * n - e * int(math.log(k, p) + 1e-9) for k in range(D + 1, 64 * (D + 1)))
    prec = min(x.prec, tail)
    acc = t.zero(prec)
    for k in range(D, 0, -1):
        acc = acc * x + series.coefficient(k)
    acc = acc * x
    return acc.with_prec(prec)


@dataclass
class HazewinkelReport:
    v_residual: float
    v_norm: float
    v_trace_ideal: float
    holds: bool
    precision: int

    def to_json(self) -> dict:
        def enc(v):
            return None if v == INF else v
        return {
            "v_residual": enc(self.v_residual),
            "v_norm": enc(self.v_norm),
            "v_trace_ideal": enc(self.v_trace_ideal),
            "holds": self.holds,
            "precision": self.precision,
        }


def hazewinkel_residual(table, law: FormalGroupLaw, x: TowerElement, H=None, e_H: int | None = None) -> HazewinkelReport:
    """Certify N^F(x) - Tr(x) ∈ N(x)·O_K + Tr(x^2·O_L) for K the fixed field of H."""
    t = x.tower
    H = sorted(range(table.order) if H is None else H)
    autos = [table.autos[h] for h in H]
    if e_H is None:
        from .ramification import ramification_filtration

        e_H = ramification_filtration(table, H).g0
    tr = t.zero(x.prec)
    nm = t.one(x.prec)
    for a in autos:
        y = a(x)
        tr = tr + y
        nm = nm * y
    x2 = x * x
    vt = INF
    for k in range(t.degree):
        s = t.zero()
        y = x2 * t.basis_element(k)
        for a in autos:
            s = s + a(y)
        vt = min(vt, s.valuation())
    vn = nm.valuation()
    bound = min(vn, vt)
    # membership is decided a little past the bound; no need to carry the full precision
    if bound != INF:
        x = x.with_prec(min(x.prec, int(bound) + 2 * t.e + 1))
    nf = fgl_eval_and_norm(table, law, x, H)
    r = nf - tr
    vr = r.valuation()
    prec = min(r.prec, nm.prec)
    if vr == INF and prec < bound:
        raise PrecisionLoss("residual is zero only to a precision below the ideal bound", floor=prec)

    def k(v):
        return v if v == INF else Fraction(int(v), e_H)

    holds = vr >= bound
    return HazewinkelReport(k(vr), k(vn), k(vt), bool(holds), prec)
