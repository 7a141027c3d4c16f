"""Finite level quotients as Galois modules, Tate cohomology and norm images.

A level quotient P_L^n / P_L^m carries either the unit law (1+x)(1+y) - 1 or
the addition of a formal group law; elements are canonical numerator tables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InternalInconsistency, PrecisionLoss, TooLarge, Unstable
from .formal_groups import FormalGroupLaw, LawEvaluator, UnitsEvaluator
from .galois import AutomorphismTable
from .padic import INF
from .ramification import RamificationData, herbrand_phi, is_weakly_ramified, ramification_filtration
from .tower import FieldTower, _ceil_div

DEFAULT_BUDGET = 10**6

CT = "CT"
NOT_CT = "NOT-CT"
UNDETERMINED = "UNDETERMINED"


def invariant_level_formula(n: int, e: int) -> int:
    return 1 + (n - 1) // e


def make_evaluator(tower: FieldTower, law, m: int, n: int = 1):
    """Group law on P_L^n / P_L^m: ``None`` stands for the units 1 + x."""
    if law is None:
        return UnitsEvaluator(tower, m, n)
    return LawEvaluator(law, tower, m, n)


def law_name(law) -> str:
    return "units" if law is None else law.kind


def level_elements(tower: FieldTower, n: int, m: int, budget: int = DEFAULT_BUDGET):
    """Canonical representatives of P_L^n / P_L^m."""
    f, e, p = tower.f, tower.e, tower.p
    size = tower.residue_field.q ** (m - n)
    if size > budget:
        raise TooLarge(f"level quotient has {size} elements, budget is {budget}")
    ranges = []
    for j in range(e):
        lo = max(0, _ceil_div(n - j, e))
        hi = max(0, _ceil_div(m - j, e))
        step = p**lo
        ranges.extend([range(0, p**hi, step) if hi > lo else range(0, 1)] * f)
    for combo in itertools.product(*ranges):
        yield combo


def level_generators(tower: FieldTower, n: int, m: int):
    """ω^i π^j for n <= j < m: generators of P_L^n / P_L^m under any of the laws."""
    out = []
    for j in range(n, m):
        for i in range(tower.f):
            x = tower.omega.with_prec(tower.e * (tower.N + 4)) ** i * tower.pi_power(j)
            out.append(tower.level_reduce(x.num, m))
    return out


class FiniteGModule:
    """P_L^n / P_L^m with a law and the action of a subgroup of automorphisms."""

    def __init__(self, table: AutomorphismTable, law, n: int, m: int, budget: int = DEFAULT_BUDGET):
        if not 1 <= n < m:
            raise ValueError("need 1 <= n < m")
        self.table = table
        self.tower = table.tower
        self.law = law
        self.n = n
        self.m = m
        self.ops = make_evaluator(self.tower, law, m, n)
        self.order = self.tower.residue_field.q ** (m - n)
        if self.order > budget:
            raise TooLarge(f"level quotient has {self.order} elements, budget is {budget}")
        self._elements = None

    @property
    def elements(self):
        if self._elements is None:
            self._elements = list(level_elements(self.tower, self.n, self.m))
        return self._elements

    def act(self, s: int, x):
        return self.table.autos[s].apply_level(x, self.m)

    def check_action(self, H, sample=None) -> bool:
        """σ(x∘y) = σ(x)∘σ(y) for pairs of elements (``sample`` limits the pairs)."""
        els = self.elements
        pairs = itertools.product(els, els) if sample is None else sample
        for x, y in pairs:
            xy = self.ops.add(x, y)
            for s in H:
                if self.act(s, xy) != self.ops.add(self.act(s, x), self.act(s, y)):
                    return False
        return True


def closure(ops, gens, zero, limit: int | None = None) -> set:
    """Subgroup generated by ``gens``, grown one generator at a time."""
    group = {zero}
    for g in gens:
        if g in group:
            continue
        layer = list(group)
        cur = g
        new = set()
        while cur not in group:
            for a in layer:
                new.add(ops.add(a, cur))
            group |= new
            new = set()
            cur = ops.add(cur, g)
            if limit is not None and len(group) > limit:
                raise TooLarge("subgroup closure exceeded its budget")
    return group


@dataclass
class CohomologyReport:
    subgroup: tuple
    n: int
    m: int
    h0_order: int
    hminus1_order: int
    fixed_order: int
    norm_order: int
    kernel_order: int
    augmentation_order: int
    stabilized: bool | None = None

    @property
    def herbrand(self) -> Fraction:
        return Fraction(self.h0_order, self.hminus1_order)

    @property
    def trivial(self) -> bool:
        return self.h0_order == 1 and self.hminus1_order == 1

    def to_json(self) -> dict:
        return {
            "subgroup": list(self.subgroup),
            "n": self.n,
            "m": self.m,
            "h0_order": self.h0_order,
            "hminus1_order": self.hminus1_order,
            "herbrand_quotient": str(self.herbrand),
            "stabilized": self.stabilized,
        }


def tate_cohomology(M: FiniteGModule, H) -> CohomologyReport:
    """|H^0| = |M^H| / |N_H M| and |H^-1| = |ker N_H| / |Δ(H) M|."""
    table = M.table
    H = sorted(H)
    autos = [table.autos[h] for h in H]
    gens = [h for h in H if h != table.identity]
    ops = M.ops
    zero = ops.zero
    fixed = 0
    norms = set()
    kernel = 0
    deltas = set()
    cyclic = table.is_cyclic(H)
    if cyclic and len(H) > 1:
        gens = [table.generator(H)]
    for x in M.elements:
        images = [a.apply_level(x, M.m) for a in autos]
        if all(y == x for y in images):
            fixed += 1
        acc = images[0]
        for y in images[1:]:
            acc = ops.add(acc, y)
        norms.add(acc)
        if acc == zero:
            kernel += 1
        if gens:
            negx = ops.neg(x)
            for g in gens:
                deltas.add(ops.add(M.act(g, x), negx))
    if cyclic:
        aug = deltas if deltas else {zero}
    else:
        aug = closure(ops, sorted(deltas), zero)
    # N_H M sits inside M^H and Δ(H)M inside ker N_H
    for y in itertools.islice(norms, 64):
        if any(M.act(h, y) != y for h in H):
            raise InternalInconsistency("a norm is not fixed by the subgroup")
    if len(M.elements) and fixed % len(norms) or kernel % len(aug):
        raise InternalInconsistency("subgroup orders do not divide")
    return CohomologyReport(
        tuple(H), M.n, M.m, fixed // len(norms), kernel // len(aug), fixed, len(norms), kernel, len(aug)
    )


def herbrand_quotient_check(M: FiniteGModule, H) -> Fraction:
    table = M.table
    if not table.is_cyclic(H):
        raise ValueError("the Herbrand quotient needs a cyclic subgroup")
    rep = tate_cohomology(M, H)
    h = rep.herbrand
    if h != 1:
        raise InternalInconsistency(f"Herbrand quotient {h} of a finite module is not 1")
    return h


def level_quotient_module(table: AutomorphismTable, law, n: int, m: int, budget: int = DEFAULT_BUDGET) -> FiniteGModule:
    return FiniteGModule(table, law, n, m, budget)


# -- subgroup data ----------------------------------------------------------------

@dataclass
class SubgroupData:
    """L / K_H for K_H the fixed field of H."""

    H: frozenset
    ram: RamificationData
    e: int
    f: int
    q_K: int

    @property
    def label(self) -> list:
        return sorted(self.H)


def subgroup_data(table: AutomorphismTable, H) -> SubgroupData:
    H = frozenset(H)
    ram = ramification_filtration(table, H)
    e_H = ram.g0
    f_H = len(H) // e_H
    t = table.tower
    if t.f % f_H:
        raise InternalInconsistency("residue degree of the subgroup does not divide f")
    q_K = t.p ** (t.f // f_H)
    return SubgroupData(H, ram, e_H, f_H, q_K)


def prime_cyclic_subgroups(table: AutomorphismTable) -> list:
    out = []
    for S in table.subgroups():
        k = len(S)
        if k > 1 and all(k % d for d in range(2, int(math.isqrt(k)) + 1)) and table.is_cyclic(S):
            out.append(S)
    return out


# -- invariant levels ---------------------------------------------------------------

@dataclass
class InvariantLevelResult:
    n: int
    formula: int
    brute: int | None
    m: int
    size: int
    expected_size: int
    stabilized: bool
    agrees: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def invariant_level(table: AutomorphismTable, law, n: int, H=None, budget: int = DEFAULT_BUDGET) -> InvariantLevelResult:
    """Level of (P_L^n)^H in K_H's normalization: formula and fixed-point brute force.

    The brute force takes the fixed points of P_L^n / P_L^m and projects them to
    P_L^n / P_L^(e_H·a + 1): the image of the true invariants P_K^a must have
    exactly q_K elements with smallest valuation e_H·a.
    """
    H = frozenset(range(table.order)) if H is None else frozenset(H)
    sd = subgroup_data(table, H)
    t = table.tower
    a = invariant_level_formula(n, sd.e)
    m_proj = sd.e * a + 1
    wild = sd.ram.g1 > 1
    from .padic import vp

    margin = t.degree * (int(vp(len(H), t.p)) + 1) if wild else 0
    m = max(m_proj + margin, n + 1)

    def project(mm):
        M = FiniteGModule(table, law, n, mm, budget)
        autos = [table.autos[h] for h in H]
        fixed = [x for x in M.elements if all(s.apply_level(x, mm) == x for s in autos)]
        return {t.level_reduce(x, m_proj) for x in fixed}, M

    S, M = project(m)
    S2, _ = project(m + t.e)
    stabilized = S == S2
    nonzero = [x for x in S if any(x)]
    brute = None
    if nonzero:
        vmin = min(t.num_valuation(x) for x in nonzero)
        if vmin % sd.e == 0:
            brute = int(vmin) // sd.e
    expected = sd.q_K ** (_ceil_div(m_proj, sd.e) - a)
    # S must be a subgroup of P^n/P^(m_proj) under the law
    ops = make_evaluator(t, law, m_proj, n)
    closed = all(ops.add(x, y) in S for x in S for y in nonzero[:8])
    agrees = stabilized and closed and brute == a and len(S) == expected
    return InvariantLevelResult(n, a, brute, m, len(S), expected, stabilized, agrees)


# -- norm images -----------------------------------------------------------------

@dataclass
class NormLevelResult:
    n: int
    m_K: int
    m_L: int
    image_order: int
    level: int | None  # None when the image is not a level subgroup
    invariant_level: int
    index: int  # [P_K^a : image] = |H^0| of the full module P_L^n
    stabilized: bool
    expected_level: int | None = None
    generators: list = field(default_factory=list)

    @property
    def is_level(self) -> bool:
        return self.level is not None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m_K": self.m_K,
            "m_L": self.m_L,
            "image_order": self.image_order,
            "level": self.level if self.level is not None else "NOT-A-LEVEL",
            "invariant_level": self.invariant_level,
            "h0_order": self.index,
            "stabilized": self.stabilized,
            "expected_level": self.expected_level,
        }


def _norm_image(table, sd: SubgroupData, law, n: int, m_K: int):
    t = table.tower
    psi = sd.ram.psi
    m_L = int(psi(m_K)) + 1
    M_K = sd.e * m_K
    work = max(m_L, M_K)
    autos = [table.autos[h] for h in sorted(sd.H)]
    gen_ops = make_evaluator(t, law, work, n)
    images = []
    for g in level_generators(t, n, m_L):
        g = t.level_reduce(g, work)
        images.append(t.level_reduce(gen_ops.orbit_sum(g, autos), M_K))
    nz = [x for x in images if any(x)]
    low = min((int(t.num_valuation(x)) for x in nz), default=M_K)
    ops = make_evaluator(t, law, M_K, max(1, low))
    group = closure(ops, images, ops.zero, limit=sd.q_K ** m_K)
    return group, m_L


def norm_image_level(table: AutomorphismTable, law, n: int, m_K: int | None = None, H=None) -> NormLevelResult:
    """Image of the orbit norm on P_L^n inside P_K^1 / P_K^(m_K), with its level."""
    H = frozenset(range(table.order)) if H is None else frozenset(H)
    sd = subgroup_data(table, H)
    t = table.tower
    a = invariant_level_formula(n, sd.e)
    expected = None
    if n > sd.ram.t:
        expected = math.ceil(herbrand_phi(sd.ram, n))
    if m_K is None:
        m_K = max(math.ceil(herbrand_phi(sd.ram, n)), a) + 2

    def run(mk):
        group, m_L = _norm_image(table, sd, law, n, mk)
        nz = [x for x in group if any(x)]
        for x in nz:
            if t.num_valuation(x) < sd.e * a:
                raise InternalInconsistency("norm image leaves the invariant level")
        c = None
        if nz:
            v = min(int(t.num_valuation(x)) for x in nz)
            if v % sd.e == 0 and len(group) == sd.q_K ** (mk - v // sd.e):
                c = v // sd.e
        elif mk >= a:
            c = mk
        index = sd.q_K ** (mk - a) // len(group)
        return group, m_L, c, index

    group, m_L, c, index = run(m_K)
    _, _, c2, index2 = run(m_K + 1)
    stabilized = index == index2 and (c == c2 or (c is None and c2 is None))
    return NormLevelResult(n, m_K, m_L, len(group), c, a, index, stabilized, expected)


@dataclass
class UnitIndexResult:
    m_K: int
    index: int
    stabilized: bool
    image_order: int
    units_order: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def full_unit_index(table: AutomorphismTable, m_K: int = 8, H=None) -> UnitIndexResult:
    """[U_K : N(U_L)] from the norm image in (O_K / P_K^m_K)^×."""
    H = frozenset(range(table.order)) if H is None else frozenset(H)
    sd = subgroup_data(table, H)
    t = table.tower

    def run(mk):
        m_L = int(sd.ram.psi(mk)) + 1
        M_K = sd.e * mk
        work = max(m_L, M_K)
        autos = [table.autos[h] for h in sorted(H)]
        R = _ceil_div(work, t.e)
        mod = t.p**R

        def mul(x, y, lev):
            return t.level_reduce(t.mul_num(x, y, mod), lev)

        gens = []
        F = t.residue_field
        # a generator of the residue unit group
        for z in F.elements():
            if any(z) and _mult_order(F, z) == F.q - 1:
                gens.append(t.lift_residue(z).num)
                break
        for g in level_generators(t, 1, m_L):
            u = list(t.level_reduce(g, work))
            u[0] += 1
            gens.append(tuple(u))
        norms = []
        for g in gens:
            acc = None
            for a in autos:
                y = a.apply_level(g, work)
                acc = y if acc is None else mul(acc, y, work)
            norms.append(t.level_reduce(acc, M_K))
        one = t.level_reduce((1,) + (0,) * (t.degree - 1), M_K)
        group = {one}
        for g in norms:
            if g in group:
                continue
            layer = list(group)
            cur = g
            while cur not in group:
                group |= {mul(a, cur, M_K) for a in layer}
                cur = mul(cur, g, M_K)
        units = (sd.q_K - 1) * sd.q_K ** (mk - 1)
        return units // len(group), len(group), units

    idx, size, units = run(m_K)
    idx2, _, _ = run(m_K + 1)
    return UnitIndexResult(m_K, idx, idx == idx2, size, units)


def _mult_order(F, z) -> int:
    k, cur = 1, z
    while cur != F.one():
        cur = F.mul(cur, z)
        k += 1
    return k


# -- verdicts ------------------------------------------------------------------------

def ct_verdict(ram: RamificationData, n: int, formal: bool = False) -> tuple:
    """Verdict for U_L^n (or F_L^n when ``formal``) from the ramification data, with a reason."""
    g1 = ram.g1
    tame = g1 == 1
    weak = is_weakly_ramified(ram)
    if n == 1:
        if tame:
            return CT, "tamely ramified"
        if formal:
            return UNDETERMINED, "level 1 of a wild extension depends on data beyond the ramification"
        return NOT_CT, "level 1 needs tame ramification"
    if not weak:
        return NOT_CT, "not weakly ramified"
    if tame or (n - 1) % g1 == 0:
        return CT, f"weakly ramified and n = {n} ≡ 1 mod g1 = {g1}"
    return NOT_CT, f"n = {n} ≢ 1 mod g1 = {g1}"


def default_truncation(sd: SubgroupData, n: int) -> int:
    """Upper level m for P_L^n / P_L^m; for weakly ramified wild towers m ≡ 1 mod g1."""
    g1 = sd.ram.g1
    if g1 == 1:
        # every graded piece is already trivial; a short window keeps q^(m-n) small
        return n + sd.e
    m = n + sd.e + 2
    if is_weakly_ramified(sd.ram):
        while (m - 1) % g1:
            m += 1
    return m


@dataclass
class CrossCheck:
    law: str
    n: int
    subgroup: tuple
    verdict: str
    reason: str
    quotient: CohomologyReport
    quotient_next: CohomologyReport
    norm: NormLevelResult
    brute_trivial: bool
    passed: bool

    @property
    def stabilized(self) -> bool:
        return (
            self.quotient.h0_order == self.quotient_next.h0_order
            and self.quotient.hminus1_order == self.quotient_next.hminus1_order
            and self.norm.stabilized
        )

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "subgroup": list(self.subgroup),
            "n": self.n,
            "m": self.quotient.m,
            "h0_order": self.quotient.h0_order,
            "hminus1_order": self.quotient.hminus1_order,
            "stabilized": self.stabilized,
            "unquotiented_h0_order": self.norm.index,
            "verdict": self.verdict,
            "reason": self.reason,
            "brute_force": "trivial" if self.brute_trivial else "nontrivial",
            "crosscheck": "pass" if self.passed else "fail",
        }


def ct_crosscheck(table: AutomorphismTable, law, n: int, m: int | None = None, budget: int = DEFAULT_BUDGET) -> list:
    """Brute-force cohomology on every cyclic subgroup of prime order against the verdict."""
    out = []
    formal = law is not None
    for H in prime_cyclic_subgroups(table):
        sd = subgroup_data(table, H)
        verdict, reason = ct_verdict(sd.ram, n, formal)
        mm = default_truncation(sd, n) if m is None else m
        q1 = tate_cohomology(FiniteGModule(table, law, n, mm, budget), H)
        q2 = tate_cohomology(FiniteGModule(table, law, n, mm + 2, budget), H)
        stab = q1.h0_order == q2.h0_order and q1.hminus1_order == q2.hminus1_order
        q1.stabilized = stab
        q2.stabilized = stab
        nl = norm_image_level(table, law, n, H=H)
        if not nl.stabilized:
            raise Unstable(f"norm index for n={n} did not stabilize")
        brute_trivial = q1.trivial and q2.trivial and nl.index == 1
        if verdict == UNDETERMINED:
            passed = stab
        else:
            passed = stab and brute_trivial == (verdict == CT)
        out.append(CrossCheck(law_name(law), n, tuple(sorted(H)), verdict, reason, q1, q2, nl, brute_trivial, passed))
    return out
