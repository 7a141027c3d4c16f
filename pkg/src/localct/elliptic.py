"""Weierstrass curves over Q_p and the towers above it.

Covers reduction types, point groups over residue fields with the Frobenius
action, the map (x, y) -> -x/y onto the formal group, Hensel lifting of
residue points and the norm-surjectivity certificate for unramified towers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import LiftFailure, NoConvergence, PrecisionLoss, SingularCurve, TooLarge
from .finite_field import FqDescriptor
from .galois import _newton
from .padic import INF, fraction_mod, vp_fraction
from .tower import FieldTower, TowerElement

GOOD = "good"
SPLIT = "split-mult"
NONSPLIT = "nonsplit-mult"
ADDITIVE = "additive"

INFINITY = None


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction
    minimal: bool = True
    component_order: int | None = None

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.discriminant == 0:
            raise SingularCurve("discriminant vanishes")
        if 4 * self.b8 != self.b2 * self.b6 - self.b4**2:
            raise AssertionError("b-invariant syzygy failed")

    @classmethod
    def from_list(cls, a, **kw) -> "WeierstrassCurve":
        if len(a) != 5:
            raise ValueError("need [a1, a2, a3, a4, a6]")
        return cls(*a, **kw)

    @property
    def a(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self):
        return self.a1**2 + 4 * self.a2

    @property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self):
        return self.a3**2 + 4 * self.a6

    @property
    def b8(self):
        a1, a2, a3, a4, a6 = self.a
        return a1**2 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3**2 - a4**2

    @property
    def c4(self):
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self):
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2**2 * b8 - 8 * b4**3 - 27 * b6**2 + 9 * b2 * b4 * b6

    def describe(self) -> dict:
        return {
            "a": [int(x) if x.denominator == 1 else str(x) for x in self.a],
            "discriminant": str(self.discriminant),
            "c4": str(self.c4),
        }


# -- residue curves ---------------------------------------------------------------------

def _reduce_coeffs(curve: WeierstrassCurve, F: FqDescriptor):
    return tuple(F.element([fraction_mod(c, F.p, 1)]) for c in curve.a)


class ResidueCurve:
    """Reduction of a curve over a finite field F_q."""

    def __init__(self, curve: WeierstrassCurve, F: FqDescriptor):
        self.curve = curve
        self.F = F
        self.a = _reduce_coeffs(curve, F)

    def lhs_minus_rhs(self, x, y):
        F = self.F
        a1, a2, a3, a4, a6 = self.a
        lhs = F.add(F.add(F.mul(y, y), F.mul(F.mul(a1, x), y)), F.mul(a3, y))
        x2 = F.mul(x, x)
        rhs = F.add(F.add(F.add(F.mul(x2, x), F.mul(a2, x2)), F.mul(a4, x)), a6)
        return F.sub(lhs, rhs)

    def partials(self, x, y):
        F = self.F
        a1, a2, a3, a4, _ = self.a
        # ∂/∂x and ∂/∂y of lhs - rhs
        x2 = F.mul(x, x)
        dx = F.sub(F.mul(a1, y), F.add(F.add(F.scale(x2, 3), F.scale(F.mul(a2, x), 2)), a4))
        dy = F.add(F.add(F.scale(y, 2), F.mul(a1, x)), a3)
        return dx, dy

    def affine_points(self):
        F = self.F
        els = F.elements()
        return [(x, y) for x in els for y in els if not any(self.lhs_minus_rhs(x, y))]

    def singular_point(self):
        zero = self.F.zero()
        for x, y in self.affine_points():
            dx, dy = self.partials(x, y)
            if dx == zero and dy == zero:
                return (x, y)
        return None

    def on_curve(self, P) -> bool:
        return P is INFINITY or not any(self.lhs_minus_rhs(*P))

    def neg(self, P):
        if P is INFINITY:
            return P
        F = self.F
        a1, _, a3, _, _ = self.a
        x, y = P
        return (x, F.sub(F.neg(y), F.add(F.mul(a1, x), a3)))

    def add(self, P, Q):
        """Chord-tangent addition on the non-singular points."""
        if P is INFINITY:
            return Q
        if Q is INFINITY:
            return P
        F = self.F
        a1, a2, a3, a4, a6 = self.a
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if self.neg(P) == Q:
                return INFINITY
            dx, dy = self.partials(x1, y1)
            lam = F.div(F.neg(dx), dy)
        else:
            lam = F.div(F.sub(y2, y1), F.sub(x2, x1))
        nu = F.sub(y1, F.mul(lam, x1))
        x3 = F.sub(F.sub(F.sub(F.add(F.mul(lam, lam), F.mul(a1, lam)), a2), x1), x2)
        y3 = F.sub(F.neg(F.mul(F.add(lam, a1), x3)), F.add(nu, a3))
        return (x3, y3)

    def frobenius(self, P, k: int = 1):
        if P is INFINITY:
            return P
        return tuple(self.F.pow(c, self.F.p**k) for c in P)


def reduction_type(curve: WeierstrassCurve, p: int) -> str:
    """good / split-mult / nonsplit-mult / additive from v(Δ), v(c4) and the tangent cone."""
    vD = vp_fraction(curve.discriminant, p)
    if vD == 0:
        return GOOD
    if vp_fraction(curve.c4, p) > 0:
        return ADDITIVE
    F = FqDescriptor.prime_field(p)
    rc = ResidueCurve(curve, F)
    sing = rc.singular_point()
    if sing is None:  # pragma: no cover - v(Δ) > 0 forces a singular point
        raise AssertionError("no singular point on the reduction")
    x0 = sing[0]
    a1, a2 = rc.a[0], rc.a[1]
    const = F.neg(F.add(F.scale(x0, 3), a2))
    for T in F.elements():
        if not any(F.add(F.add(F.mul(T, T), F.mul(a1, T)), const)):
            return SPLIT
    return NONSPLIT


def curve_invariants_reduction(curve: WeierstrassCurve, p: int) -> str:
    return reduction_type(curve, p)


@dataclass
class ResiduePointGroup:
    curve: ResidueCurve
    points: list
    tag: str
    singular: tuple | None
    isomorphism: dict | None = None  # point -> element of λ^+ or λ^×

    @property
    def order(self) -> int:
        return len(self.points)

    def add(self, P, Q):
        return self.curve.add(P, Q)

    def neg(self, P):
        return self.curve.neg(P)

    def frobenius(self, P, k: int = 1):
        return self.curve.frobenius(P, k)


def _tangent_slopes(rc: ResidueCurve, sing):
    F = rc.F
    a1, a2 = rc.a[0], rc.a[1]
    const = F.neg(F.add(F.scale(sing[0], 3), a2))
    return [T for T in F.elements() if not any(F.add(F.add(F.mul(T, T), F.mul(a1, T)), const))]


def residue_group(curve: WeierstrassCurve, F: FqDescriptor, budget: int = 10**4) -> ResiduePointGroup:
    """Ē_ns(F) by enumeration, with its type and, when singular, the explicit isomorphism."""
    if F.q > budget:
        raise TooLarge(f"residue field of size {F.q} exceeds the enumeration budget")
    rc = ResidueCurve(curve, F)
    pts = rc.affine_points()
    sing = None
    for P in pts:
        dx, dy = rc.partials(*P)
        if not any(dx) and not any(dy):
            sing = P
    points = [INFINITY] + [P for P in pts if P != sing]
    if sing is None:
        return ResiduePointGroup(rc, points, GOOD, None)
    slopes = _tangent_slopes(rc, sing)
    x0, y0 = sing
    iso = {INFINITY: None}
    cone_double = _cone_is_double(rc, sing)
    if cone_double:
        if not slopes:
            raise AssertionError("double tangent line must be rational")
        alpha = slopes[0]
        iso[INFINITY] = F.zero()
        for P in points[1:]:
            X, Y = F.sub(P[0], x0), F.sub(P[1], y0)
            iso[P] = F.div(X, F.sub(Y, F.mul(alpha, X)))
        tag = ADDITIVE
    elif len(slopes) == 2:
        alpha, beta = slopes
        iso[INFINITY] = F.one()
        for P in points[1:]:
            X, Y = F.sub(P[0], x0), F.sub(P[1], y0)
            iso[P] = F.div(F.sub(Y, F.mul(alpha, X)), F.sub(Y, F.mul(beta, X)))
        tag = SPLIT
    else:
        iso = None
        tag = NONSPLIT
    return ResiduePointGroup(rc, points, tag, sing, iso)


def _cone_is_double(rc: ResidueCurve, sing) -> bool:
    """The tangent cone T^2 + a1 T - (3x0 + a2) has a repeated root (discriminant zero)."""
    F = rc.F
    a1, a2 = rc.a[0], rc.a[1]
    const = F.neg(F.add(F.scale(sing[0], 3), a2))
    disc = F.sub(F.mul(a1, a1), F.scale(const, 4))
    return not any(disc)


def check_isomorphism(G: ResiduePointGroup) -> bool:
    """The explicit map to λ^+ / λ^× is a bijective homomorphism."""
    if G.isomorphism is None:
        return G.tag in (GOOD, NONSPLIT)
    F = G.curve.F
    op = F.add if G.tag == ADDITIVE else F.mul
    iso = G.isomorphism
    if len(set(iso.values())) != len(G.points):
        return False
    for P in G.points:
        for Q in G.points:
            if iso[G.add(P, Q)] != op(iso[P], iso[Q]):
                return False
    return True


def residue_cohomology(G: ResiduePointGroup, base_degree: int = 1):
    """(|H^0|, |H^-1|) of Ē_ns(λ) under the Frobenius x -> x^(p^base_degree)."""
    F = G.curve.F
    k = F.f // base_degree
    fixed = [P for P in G.points if G.frobenius(P, base_degree) == P]
    norms = set()
    kernel = 0
    deltas = set()
    for P in G.points:
        acc = INFINITY
        Q = P
        for _ in range(k):
            acc = G.add(acc, Q)
            Q = G.frobenius(Q, base_degree)
        norms.add(acc)
        if acc is INFINITY:
            kernel += 1
        deltas.add(G.add(G.frobenius(P, base_degree), G.neg(P)))
    return len(fixed) // len(norms), kernel // len(deltas)


# -- points over the tower -------------------------------------------------------------------

def _coeff(tower: FieldTower, c: Fraction) -> TowerElement:
    return tower.from_fraction(c)


def on_curve_residual(tower: FieldTower, curve: WeierstrassCurve, P) -> TowerElement:
    x, y = P
    a1, a2, a3, a4, a6 = (_coeff(tower, c) for c in curve.a)
    return y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6)


def point_from_z(tower: FieldTower, curve: WeierstrassCurve, z: TowerElement):
    """The point of E_1(L) with -x/y = z, found by iterating the w-equation in L."""
    v = z.valuation()
    if v == INF or v < 1 or z.den:
        raise ValueError("z must be a nonzero element of P_L")
    a1, a2, a3, a4, a6 = (_coeff(tower, c) for c in curve.a)
    z2 = z * z
    z3 = z2 * z
    w = z3
    for _ in range(4 * z.prec + 8):
        w2 = w * w
        new = z3 + a1 * z * w + a2 * z2 * w + a3 * w2 + a4 * z * w2 + a6 * w2 * w
        if (new - w).is_zero():
            w = new
            break
        w = new
    x = z / w
    y = -w.inverse()
    return (x, y)


def point_add(tower: FieldTower, curve: WeierstrassCurve, P, Q):
    """Chord-tangent addition over L (P, Q distinct, not inverse to each other, or P == Q)."""
    if P is INFINITY:
        return Q
    if Q is INFINITY:
        return P
    a1, a2, a3, a4, a6 = (_coeff(tower, c) for c in curve.a)
    x1, y1 = P
    x2, y2 = Q
    if (x1 - x2).is_zero():
        if (y1 + y2 + a1 * x1 + a3).is_zero():
            return INFINITY
        num = 3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1
        den = 2 * y1 + a1 * x1 + a3
        lam = num / den
    else:
        lam = (y2 - y1) / (x2 - x1)
    nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def point_neg(tower: FieldTower, curve: WeierstrassCurve, P):
    if P is INFINITY:
        return P
    x, y = P
    return (x, -y - _coeff(tower, curve.a1) * x - _coeff(tower, curve.a3))


NOT_IN_LEVEL = "NOT-IN-LEVEL"


@dataclass
class FiltrationPoint:
    z: TowerElement | None
    level: int | str
    in_level: bool

    def to_json(self) -> dict:
        return {"level": self.level, "in_level": self.in_level}


def formal_filtration_iso(tower: FieldTower, curve: WeierstrassCurve, P, n: int) -> FiltrationPoint:
    """z = -x/y and whether it lies in P_L^n (equivalently v_L(x) <= -2n)."""
    if P is INFINITY:
        return FiltrationPoint(tower.zero(), "infinity", True)
    x, y = P
    vx, vy = x.valuation(), y.valuation()
    if vx >= 0:  # includes x = 0 to precision
        return FiltrationPoint(None, NOT_IN_LEVEL, False)
    if vy == INF:
        raise PrecisionLoss("y indistinguishable from zero although v(x) < 0")
    if 2 * vy != 3 * vx:
        raise AssertionError("2 v(y) = 3 v(x) fails for a point of negative valuation")
    z = -x / y
    level = int(-vx) // 2
    if z.valuation() != level:
        raise AssertionError("v(z) differs from -v(x)/2")
    return FiltrationPoint(z, level, vx <= -2 * n)


def _lift_point(tower: FieldTower, curve: WeierstrassCurve, P_bar, shift: int = 0):
    """Hensel-lift a non-singular residue point to E(L)."""
    F = tower.residue_field
    x0 = tower.lift_residue(P_bar[0]) + shift * tower.p
    y0 = tower.lift_residue(P_bar[1])
    a1, a2, a3, a4, a6 = (_coeff(tower, c) for c in curve.a)
    rc = ResidueCurve(curve, F)
    dx, dy = rc.partials(*P_bar)
    target = tower.default_prec
    try:
        if any(dy):
            # y^2 + (a1 x + a3) y - (x^3 + a2 x^2 + a4 x + a6), in y
            c0 = -(x0 * x0 * x0 + a2 * x0 * x0 + a4 * x0 + a6)
            y = _newton([c0, a1 * x0 + a3, tower.one()], y0, target)
            return (x0, y)
        if any(dx):
            y0 = y0 + shift * tower.p
            x0 = tower.lift_residue(P_bar[0])
            c = [y0 * y0 + a3 * y0 - a6, a1 * y0 - a4, -a2, -tower.one()]
            x = _newton(c, x0, target)
            return (x, y0)
    except NoConvergence as exc:
        raise LiftFailure(f"residue point {P_bar} does not lift: {exc}") from None
    raise LiftFailure(f"residue point {P_bar} is singular")


def _reduce_point(tower: FieldTower, P):
    if P is INFINITY:
        return INFINITY
    x, y = P
    if x.valuation() < 0:
        return INFINITY
    return (x.residue(), y.residue())


@dataclass
class ReductionSequenceReport:
    residue_points: int
    lifted: int
    fibers_checked: int
    fibers_ok: bool
    passed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def reduction_sequence_check(tower: FieldTower, curve: WeierstrassCurve, samples: int = 8, seed: int = 0) -> ReductionSequenceReport:
    """Lift every point of Ē_ns(λ) and sample the fibers of reduction."""
    G = residue_group(curve, tower.residue_field)
    rng = random.Random(seed)
    lifted = 0
    fibers_ok = True
    checked = 0
    affine = [P for P in G.points if P is not INFINITY]
    lifts = {}
    for P_bar in affine:
        P = _lift_point(tower, curve, P_bar)
        if on_curve_residual(tower, curve, P).valuation() < tower.default_prec - 4 * tower.e:
            raise LiftFailure(f"lift of {P_bar} is not on the curve to precision")
        if _reduce_point(tower, P) != P_bar:
            raise LiftFailure(f"lift of {P_bar} reduces elsewhere")
        lifts[P_bar] = P
        lifted += 1
    for P_bar in rng.sample(affine, min(samples, len(affine))):
        P = lifts[P_bar]
        # another lift of the same residue point differs from P by a point of E_1
        Q = _lift_point(tower, curve, P_bar, shift=1)
        D = point_add(tower, curve, Q, point_neg(tower, curve, P))
        if D is not INFINITY and D[0].valuation() >= 0:
            fibers_ok = False
        # translating by a point of E_1 keeps the reduction
        z = tower.from_int(rng.randrange(1, tower.p**4)) * tower.pi
        Z = point_from_z(tower, curve, z)
        if _reduce_point(tower, point_add(tower, curve, P, Z)) != P_bar:
            fibers_ok = False
        checked += 1
    return ReductionSequenceReport(len(G.points), lifted, checked, fibers_ok, fibers_ok and lifted == len(affine))


@dataclass
class NormSurjectivityCertificate:
    reduction: str
    residue_base_points: int
    residue_points: int
    trace_surjective: bool
    formal_level: int | None
    formal_ok: bool
    lifts_ok: bool
    h0: int
    hminus1: int
    caveat: str
    unramified: bool
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return self.unramified and self.trace_surjective and self.formal_ok and self.lifts_ok

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["status"] = "PASS" if self.passed else "FAILED"
        return out


def norm_surjectivity_certificate(table, curve: WeierstrassCurve, n: int = 1, seed: int = 0) -> NormSurjectivityCertificate:
    """Residue trace surjectivity plus the formal norm level, for unramified L/Q_p."""
    from .cohomology import norm_image_level
    from .formal_groups import elliptic_law

    tower = table.tower
    unram = tower.e == 1
    rtype = reduction_type(curve, tower.p)
    G = residue_group(curve, tower.residue_field)
    Gk = residue_group(curve, FqDescriptor.prime_field(tower.p))
    traces = set()
    for P in G.points:
        acc = INFINITY
        Q = P
        for _ in range(tower.f):
            acc = G.add(acc, Q)
            Q = G.frobenius(Q)
        traces.add(acc)
    def to_base(P):
        if P is INFINITY:
            return P
        if any(any(c[1:]) for c in P):
            raise AssertionError("trace point is not Frobenius-fixed")
        return tuple((c[0],) for c in P)

    image = {to_base(P) for P in traces}
    missing = [P for P in Gk.points if P not in image]
    surj = not missing
    witness = None if surj else f"base points missed by the trace: {[str(P) for P in missing[:4]]}"
    law = elliptic_law(curve.a)
    nl = norm_image_level(table, law, n)
    formal_ok = nl.level == n and nl.index == 1 and nl.stabilized
    if not formal_ok and witness is None:
        witness = f"formal norm image at level {n} has level {nl.level} and index {nl.index}"
    lifts = reduction_sequence_check(tower, curve, seed=seed)
    h0, h1 = residue_cohomology(G)
    if rtype == GOOD:
        caveat = "E(L) = E_0(L) for good reduction"
    elif rtype == ADDITIVE:
        caveat = f"component group of order <= 4 taken from input: {curve.component_order}"
    else:
        caveat = f"component group order taken from input: {curve.component_order}"
    if not unram and witness is None:
        witness = "tower is ramified"
    return NormSurjectivityCertificate(rtype, len(Gk.points), len(G.points), surj, nl.level, formal_ok, lifts.passed, h0, h1, caveat, unram, witness)
