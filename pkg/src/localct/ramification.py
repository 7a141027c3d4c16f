"""Lower ramification filtration, Herbrand functions and ramification type."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InternalInconsistency, PrecisionLoss
from .galois import AutomorphismTable
from .padic import INF, vp

UNRAMIFIED = "unramified"
TAME = "tame"
WEAK = "weakly-ramified-wild"
WILD = "wild-beyond-weak"


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """Continuous increasing map on [-1, oo) given by breakpoints and a final slope."""

    breakpoints: tuple  # ((x, y), ...) with Fraction entries, x strictly increasing
    final_slope: Fraction

    def __call__(self, s) -> Fraction:
        s = Fraction(s)
        pts = self.breakpoints
        if s < pts[0][0]:
            raise ValueError(f"argument {s} below the domain")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if s <= x1:
                return y0 + (s - x0) * (y1 - y0) / (x1 - x0)
        x0, y0 = pts[-1]
        return y0 + (s - x0) * self.final_slope

    def inverse(self) -> "PiecewiseLinearFn":
        return PiecewiseLinearFn(tuple((y, x) for x, y in self.breakpoints), 1 / self.final_slope)


@dataclass(frozen=True)
class RamificationData:
    order: int
    g: tuple  # g_{-1}, g_0, ..., ending with the first 1
    index: dict  # automorphism index -> i_G(σ) (INF for the identity)
    subgroup: frozenset
    p: int

    def g_at(self, i: int) -> int:
        if i + 1 < len(self.g):
            return self.g[i + 1]
        return 1

    @property
    def g0(self) -> int:
        return self.g_at(0)

    @property
    def g1(self) -> int:
        return self.g_at(1)

    @property
    def t(self) -> int:
        """Last lower jump: largest i with G_i != 1."""
        return len(self.g) - 3

    @property
    def jumps(self) -> list:
        return [i for i in range(-1, self.t + 1) if self.g_at(i) != self.g_at(i + 1)]

    def members(self, i: int) -> frozenset:
        return frozenset(s for s, v in self.index.items() if v >= i + 1)

    @property
    def phi(self) -> PiecewiseLinearFn:
        g0 = self.g0
        pts = [(Fraction(-1), Fraction(-1)), (Fraction(0), Fraction(0))]
        acc = Fraction(0)
        for i in range(1, self.t + 1):
            acc += Fraction(self.g_at(i), g0)
            pts.append((Fraction(i), acc))
        return PiecewiseLinearFn(tuple(pts), Fraction(1, g0))

    @property
    def psi(self) -> PiecewiseLinearFn:
        return self.phi.inverse()

    def to_json(self) -> dict:
        return {
            "g": list(self.g),
            "jumps": self.jumps,
            "phi_breakpoints": [[str(x), str(y)] for x, y in self.phi.breakpoints],
            "classification": classify_ramification(self),
            "g1": self.g1,
        }


def displacement_index(table: AutomorphismTable, s: int) -> float:
    """i_G(σ): smallest v_L(σx - x) over the generators ω, π of O_L."""
    if s == table.identity:
        return INF
    a = table.autos[s]
    t = table.tower
    v = min(a.shift(t.omega), a.shift(t.pi))
    if v == INF:
        raise PrecisionLoss("cannot separate a non-trivial automorphism from the identity", floor=a.prec)
    return int(v)


def ramification_filtration(table: AutomorphismTable, H=None) -> RamificationData:
    H = frozenset(range(table.order)) if H is None else frozenset(H)
    index = {s: displacement_index(table, s) for s in H}
    g = [len(H)]
    i = 0
    while g[-1] > 1:
        g.append(sum(1 for v in index.values() if v >= i + 1))
        i += 1
    data = RamificationData(len(H), tuple(g), index, H, table.tower.p)
    # each G_i is normal in the subgroup
    for i in range(-1, data.t + 1):
        Gi = data.members(i)
        for s in H:
            si = table.inverse(s)
            for h in Gi:
                if table.compose[table.compose[s][h]][si] not in Gi:
                    raise InternalInconsistency(f"G_{i} is not normal")
    # G_1 is the p-Sylow of G_0
    g0 = data.g0
    psyl = data.p ** int(vp(g0, data.p)) if g0 > 1 else 1
    if data.g1 != psyl:
        raise InternalInconsistency(f"g_1 = {data.g1} is not the p-part of g_0 = {g0}")
    return data


def herbrand_phi(r: RamificationData, s) -> Fraction:
    s = Fraction(s)
    if s < -1:
        raise ValueError("phi is defined on [-1, oo)")
    if s <= 0:
        return s
    fl = math.floor(s)
    total = sum(r.g_at(i) for i in range(1, fl + 1))
    if s != fl:
        total += (s - fl) * r.g_at(math.ceil(s))
    return Fraction(total, 1) / r.g0


def herbrand_psi(r: RamificationData, v) -> Fraction:
    return r.psi(v)


def classify_ramification(r: RamificationData) -> str:
    if r.g0 == 1:
        return UNRAMIFIED
    if r.g1 == 1:
        return TAME
    if r.g_at(2) == 1:
        return WEAK
    return WILD


def is_weakly_ramified(r: RamificationData) -> bool:
    return r.g_at(2) == 1
