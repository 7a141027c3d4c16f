"""Automorphisms of a tower over Q_p, found by root search or supplied as hints."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import BadHint, ComposeError, InternalInconsistency, NoConvergence, NotGalois, PrecisionLoss, TooLarge
from .padic import INF
from .tower import FieldTower, TowerElement, _ceil_div

MAX_DEGREE = 12


def _eval(coeffs, x: TowerElement) -> TowerElement:
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _deriv(coeffs):
    return [c * k for k, c in enumerate(coeffs)][1:]


def _newton(coeffs, a: TowerElement, target: int, max_iter: int = 200) -> TowerElement:
    """Newton iteration in L; requires the Hensel criterion at ``a``."""
    d = _deriv(coeffs)
    ga, da = _eval(coeffs, a), _eval(d, a)
    vg, vd = ga.valuation(), da.valuation()
    if vd == INF:
        raise NoConvergence("derivative vanishes at the starting point")
    if not vg > 2 * vd:
        raise NoConvergence(f"Hensel criterion fails (v(g)={vg}, v(g')={vd})")
    for _ in range(max_iter):
        if vg == INF or vg >= target:
            return a
        a = a - ga / da
        ga, da = _eval(coeffs, a), _eval(d, a)
        vg = ga.valuation()
    raise NoConvergence("Newton iteration did not reach the target precision")


class Automorphism:
    """An automorphism of L fixing Q_p, given by the images of ω and π."""

    def __init__(self, tower: FieldTower, omega_image: TowerElement, pi_image: TowerElement):
        self.tower = tower
        self.omega_image = omega_image
        self.pi_image = pi_image
        f, e = tower.f, tower.e
        powers_w = [tower.one()]
        for _ in range(f - 1):
            powers_w.append(powers_w[-1] * omega_image)
        powers_p = [tower.one()]
        for _ in range(e - 1):
            powers_p.append(powers_p[-1] * pi_image)
        cols = []
        for j in range(e):
            for i in range(f):
                cols.append(powers_w[i] * powers_p[j])
        if any(c.den for c in cols):
            raise InternalInconsistency("automorphism image is not integral")
        self.columns = cols
        self.prec = min(c.prec for c in cols)

    def __call__(self, x: TowerElement) -> TowerElement:
        t = self.tower
        prec = min(x.prec, self.prec - t.e * x.den)
        R = max(0, x.den + _ceil_div(prec, t.e))
        mod = t.p**R
        out = [0] * t.degree
        for k, c in enumerate(x.num):
            if c:
                for idx, y in enumerate(self.columns[k].num):
                    out[idx] += c * y
        return t.make([v % mod for v in out], x.den, prec)

    def apply_level(self, num, m: int):
        """Action on canonical representatives of O_L / P_L^m."""
        t = self.tower
        if self.prec < m:
            raise PrecisionLoss(f"automorphism known only modulo P_L^{self.prec}, need {m}", floor=self.prec)
        mod = t.p ** max(0, _ceil_div(m, t.e))
        out = [0] * t.degree
        for k, c in enumerate(num):
            if c:
                for idx, y in enumerate(self.columns[k].num):
                    out[idx] += c * y
        return t.level_reduce([v % mod for v in out], m)

    def same_as(self, other: "Automorphism") -> bool:
        return self.omega_image.approx_eq(other.omega_image) and self.pi_image.approx_eq(other.pi_image)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self ∘ other``."""
        return Automorphism(self.tower, self(other.omega_image), self(other.pi_image))

    def shift(self, x: TowerElement) -> float:
        return (self(x) - x).valuation()


@dataclass
class AutomorphismTable:
    tower: FieldTower
    autos: list
    compose: list  # compose[i][j] = index of autos[i] ∘ autos[j]
    identity: int

    @property
    def order(self) -> int:
        return len(self.autos)

    def inverse(self, i: int) -> int:
        for j in range(self.order):
            if self.compose[i][j] == self.identity:
                return j
        raise InternalInconsistency("automorphism without inverse")

    def element_order(self, i: int) -> int:
        k, cur = 1, i
        while cur != self.identity:
            cur = self.compose[i][cur]
            k += 1
        return k

    def generated(self, gens) -> frozenset:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.compose[g][a]
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(seen)

    def subgroups(self) -> list:
        """All subgroups, brute force over subsets containing the identity."""
        others = [i for i in range(self.order) if i != self.identity]
        found = set()
        for r in range(len(others) + 1):
            for combo in itertools.combinations(others, r):
                s = frozenset(combo) | {self.identity}
                if all(self.compose[a][b] in s for a in s for b in s):
                    found.add(s)
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def is_cyclic(self, H) -> bool:
        return any(self.generated([h]) == frozenset(H) for h in H)

    def generator(self, H):
        for h in sorted(H):
            if self.generated([h]) == frozenset(H):
                return h
        return None

    def is_normal(self, H) -> bool:
        H = frozenset(H)
        for g in range(self.order):
            gi = self.inverse(g)
            for h in H:
                if self.compose[self.compose[g][h]][gi] not in H:
                    return False
        return True


def _omega_roots(tower: FieldTower, target: int):
    F = tower.residue_field
    u = list(tower.u)
    roots = []
    for r in F.elements():
        acc = F.zero()
        for c in reversed(u):
            acc = F.add(F.mul(acc, r), F.element([c]))
        if acc == F.zero():
            a = tower.lift_residue(r)
            roots.append(_newton([tower.from_int(c) for c in u], a, target))
    return roots


def _eisenstein_roots(tower: FieldTower, coeffs, target: int, limit: int):
    """Roots of an Eisenstein polynomial over the tower (all have valuation 1)."""
    e = tower.e
    F = tower.residue_field
    prec = tower.default_prec
    digits = [tower.lift_residue(d) for d in F.elements()]
    pi_pows = [tower.pi_power(j).with_prec(prec) for j in range(limit + 1)]
    roots = []

    def add_root(a):
        for r in roots:
            if (r - a).valuation() >= min(r.prec, a.prec):
                return
        roots.append(a)

    level = [digits[i] * pi_pows[1] for i in range(1, len(digits))]
    k = 2
    while level and k <= limit + 1:
        survivors = []
        for a in level:
            try:
                root = _newton(coeffs, a, target)
            except NoConvergence:
                if _eval(coeffs, a).valuation() >= k:
                    survivors.append(a)
                continue
            add_root(root)
            if len(roots) == e:
                return roots
            # this candidate may still share its disk with a second root
            if _eval(coeffs, a).valuation() >= k:
                survivors.append(a)
        if k > limit:
            break
        level = [a + d * pi_pows[k] for a in survivors for d in digits]
        # drop candidates already inside a found root's Hensel disk
        dvals = [_eval(_deriv(coeffs), r).valuation() for r in roots]
        # a class mod P^(k+1) inside a root's Hensel disk holds no other root
        level = [a for a in level if not any(k + 1 > dv and (a - r).valuation() > dv for r, dv in zip(roots, dvals))]
        k += 1
    return roots


def _search_limit(tower: FieldTower) -> int:
    from .padic import vp

    e = tower.e
    return e + e * int(vp(e, tower.p)) + 2


def galois_group(tower: FieldTower, hints=None) -> AutomorphismTable:
    """Enumerate Aut(L/Q_p) and its composition table.

    Raises NotGalois if there are fewer than ``[L : Q_p]`` automorphisms.  With
    ``hints`` (pairs of ω- and π-images as block lists) the search is skipped:
    hints are refined by Newton, verified and closed under composition.
    """
    d = tower.degree
    if d > MAX_DEGREE:
        raise TooLarge(f"degree {d} exceeds the cap {MAX_DEGREE}")
    final = tower
    tower = tower.at_precision(tower.N + 2 * _search_limit(tower) + 4)
    target = tower.default_prec
    e_coeffs_exact = [list(c) for c in tower.e_poly]

    def conj_eisenstein(wimg):
        return [tower.omega_poly_at(c, wimg) for c in e_coeffs_exact]

    autos = []
    if hints is None:
        for wimg in _omega_roots(tower, target):
            coeffs = conj_eisenstein(wimg)
            roots = _eisenstein_roots(tower, coeffs, target, _search_limit(tower))
            for r in roots:
                autos.append(Automorphism(tower, wimg, r))
        if len(autos) != d:
            raise NotGalois(f"found {len(autos)} automorphisms, degree is {d}")
    else:
        gens = []
        ucoeffs = [tower.from_int(c) for c in tower.u]
        for n, hint in enumerate(hints):
            try:
                w0, p0 = hint
                w0 = tower.element(w0) if not isinstance(w0, TowerElement) else w0
                p0 = tower.element(p0) if not isinstance(p0, TowerElement) else p0
                wimg = _newton(ucoeffs, w0, target)
                pimg = _newton(conj_eisenstein(wimg), p0, target)
            except (NoConvergence, ValueError, TypeError) as exc:
                raise BadHint(f"hint {n} does not refine to an automorphism: {exc}") from None
            if pimg.valuation() != 1:
                raise BadHint(f"hint {n}: image of π is not a uniformizer")
            gens.append(Automorphism(tower, wimg, pimg))
        ident = Automorphism(tower, tower.omega, tower.pi)
        autos = [ident]
        frontier = [ident]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = g.compose(a)
                    if not any(b.same_as(c) for c in autos):
                        autos.append(b)
                        nxt.append(b)
                        if len(autos) > d:
                            raise BadHint("hints generate more automorphisms than the degree")
            frontier = nxt
        if len(autos) != d:
            raise BadHint(f"hints generate {len(autos)} automorphisms, degree is {d}")
    tower = final
    autos = [Automorphism(tower, tower.transfer(a.omega_image), tower.transfer(a.pi_image)) for a in autos]
    ident_idx = None
    for i, a in enumerate(autos):
        if a.omega_image.approx_eq(tower.omega) and a.pi_image.approx_eq(tower.pi):
            ident_idx = i
    if ident_idx is None:
        raise InternalInconsistency("identity not among automorphisms")
    table = []
    for a in autos:
        row = []
        for b in autos:
            c = a.compose(b)
            hits = [k for k, x in enumerate(autos) if c.same_as(x)]
            if len(hits) != 1:
                raise ComposeError("composition is not in the table (precision too low?)")
            row.append(hits[0])
        table.append(row)
    return AutomorphismTable(tower, autos, table, ident_idx)


def subgroups(table: AutomorphismTable) -> list:
    return table.subgroups()


def field_trace_norm(table: AutomorphismTable, a: TowerElement, H=None):
    """Relative trace and norm of ``a`` down to the fixed field of ``H``."""
    H = sorted(range(table.order) if H is None else H)
    tr = None
    nm = None
    for h in H:
        x = table.autos[h](a)
        tr = x if tr is None else tr + x
        nm = x if nm is None else nm * x
    for h in H:
        s = table.autos[h]
        if not (s(tr) - tr).is_zero() or not (s(nm) - nm).is_zero():
            raise InternalInconsistency("trace or norm is not fixed by the subgroup")
    return tr, nm
