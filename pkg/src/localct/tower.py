"""Two-step towers Q_p ⊂ Q_p(ω) ⊂ Q_p(ω, π) = L and their element arithmetic.

ω is a root of a monic ``u`` irreducible mod p (unramified part, degree ``f``),
π a root of an Eisenstein polynomial of degree ``e`` over Z_p[ω].  O_L has the
Z_p-basis ``ω^i π^j`` (``0 <= i < f``, ``0 <= j < e``); a basis vector is
stored at index ``k = j*f + i``.

Elements are integer numerator tables with a common p-power denominator and an
absolute precision measured in units of v_L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConstructionError, PrecisionLoss
from .finite_field import FqDescriptor
from .padic import DEFAULT_PRECISION, INF, PAdicApprox, vp


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _reduce_mod_monic(c, u):
    """Exact reduction of an integer polynomial modulo a monic integer polynomial."""
    c = list(c)
    f = len(u) - 1
    for k in range(len(c) - 1, f - 1, -1):
        top = c[k]
        if top:
            for i in range(f):
                c[k - f + i] -= top * u[i]
        c[k] = 0
    out = c[:f]
    return out + [0] * (f - len(out))


@dataclass(frozen=True, eq=False)
class FieldTower:
    """A totally ramified Eisenstein extension of an unramified extension of Q_p."""

    p: int
    u: tuple
    e_poly: tuple  # tuple of ω-coefficient tuples, constant term first, monic
    N: int = DEFAULT_PRECISION
    f: int = field(init=False)
    e: int = field(init=False)
    residue_field: FqDescriptor = field(init=False, repr=False)
    _pi_rows: tuple = field(init=False, repr=False)
    _table: tuple = field(init=False, repr=False)

    def __post_init__(self):
        p = self.p
        u = tuple(int(c) for c in self.u)
        if len(u) < 2 or u[-1] != 1:
            raise ConstructionError("u must be monic of degree >= 1")
        f = len(u) - 1
        try:
            residue = FqDescriptor(p, f, tuple(c % p for c in u))
        except ConstructionError as exc:
            raise ConstructionError(f"u is not irreducible mod {p}: {exc}") from None
        coeffs = []
        for c in self.e_poly:
            c = [int(c)] if isinstance(c, (int,)) else [int(x) for x in c]
            coeffs.append(tuple(_reduce_mod_monic(c + [0] * max(0, f - len(c)), u)))
        one = tuple([1] + [0] * (f - 1))
        if len(coeffs) < 2 or coeffs[-1] != one:
            raise ConstructionError("e_poly must be monic of degree >= 1")
        e = len(coeffs) - 1
        for k, c in enumerate(coeffs[:-1]):
            if any(x % p for x in c):
                raise ConstructionError(f"e_poly is not Eisenstein: coefficient of y^{k} is not divisible by {p}")
        if not any((x // p) % p for x in coeffs[0]):
            raise ConstructionError(f"e_poly is not Eisenstein: constant term is divisible by {p}^2")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "e_poly", tuple(coeffs))
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "residue_field", residue)
        # π^s for e <= s <= 2e-2, as blocks of ω-polynomials
        rows = {}
        cur = [tuple(-x for x in c) for c in coeffs[:-1]]  # π^e
        for s in range(e, max(2 * e - 1, e + 1)):
            rows[s] = tuple(cur)
            # multiply by π
            top = cur[-1]
            shifted = [tuple([0] * f)] + cur[:-1]
            cur = [
                tuple(a + b for a, b in zip(shifted[r], self._omega_mul(top, tuple(-x for x in coeffs[r]))))
                for r in range(e)
            ]
        object.__setattr__(self, "_pi_rows", rows)
        d = e * f
        table = []
        for k1 in range(d):
            row = []
            for k2 in range(d):
                a = [0] * d
                b = [0] * d
                a[k1] = 1
                b[k2] = 1
                prod = self._mul_exact(a, b)
                row.append(tuple((k, c) for k, c in enumerate(prod) if c))
            table.append(tuple(row))
        object.__setattr__(self, "_table", tuple(table))
        object.__setattr__(self, "_cache", {})

    # -- exact integer ring arithmetic in Z_p[ω, π] ---------------------------
    def _omega_mul(self, a, b):
        f = self.f
        if f == 1:
            return (a[0] * b[0],)
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return tuple(_reduce_mod_monic(prod, self.u))

    def _mul_exact(self, a, b):
        f, e = self.f, self.e
        blocks_a = [tuple(a[j * f:(j + 1) * f]) for j in range(e)]
        blocks_b = [tuple(b[j * f:(j + 1) * f]) for j in range(e)]
        out = [[0] * f for _ in range(2 * e - 1)]
        for j1, x in enumerate(blocks_a):
            if any(x):
                for j2, y in enumerate(blocks_b):
                    if any(y):
                        z = self._omega_mul(x, y)
                        for i in range(f):
                            out[j1 + j2][i] += z[i]
        for s in range(2 * e - 2, e - 1, -1):
            c = tuple(out[s])
            if any(c):
                for r, blk in enumerate(self._pi_rows[s]):
                    z = self._omega_mul(c, blk)
                    for i in range(f):
                        out[r][i] += z[i]
        flat = []
        for j in range(e):
            flat.extend(out[j])
        return flat

    @property
    def degree(self) -> int:
        return self.e * self.f

    def mul_num(self, a, b, mod: int):
        """Product of numerator tables modulo ``mod`` (an integer)."""
        d = self.e * self.f
        out = [0] * d
        table = self._table
        for k1 in range(d):
            x = a[k1]
            if x:
                row = table[k1]
                for k2 in range(d):
                    y = b[k2]
                    if y:
                        xy = x * y
                        for k, c in row[k2]:
                            out[k] += c * xy
        return tuple(v % mod for v in out)

    def level_reduce(self, num, m: int):
        """Canonical representative of an integral numerator table modulo P_L^m."""
        f, e, p = self.f, self.e, self.p
        out = []
        for j in range(e):
            mod = p ** max(0, _ceil_div(m - j, e))
            for i in range(f):
                out.append(num[j * f + i] % mod)
        return tuple(out)

    def num_valuation(self, num) -> float:
        """v_L of an integral numerator table, INF if zero."""
        f, e, p = self.f, self.e, self.p
        best = INF
        for j in range(e):
            blk = min((vp(num[j * f + i], p) for i in range(f)), default=INF)
            if blk != INF:
                best = min(best, e * blk + j)
        return best

    # -- elements ------------------------------------------------------------
    @property
    def default_prec(self) -> int:
        return self.e * self.N

    def make(self, num, den: int = 0, prec: int | None = None) -> "TowerElement":
        if prec is None:
            prec = self.default_prec
        p = self.p
        num = list(num)
        while True:
            R = max(0, den + _ceil_div(prec, self.e))
            mod = p**R
            num = [x % mod for x in num]
            if den > 0 and R >= 1 and all(x % p == 0 for x in num):
                num = [x // p for x in num]
                den -= 1
                continue
            if R == 0:
                num = [0] * len(num)
                den = 0
            break
        return TowerElement(self, tuple(num), den, prec)

    def zero(self, prec=None):
        return self.make([0] * self.degree, 0, prec)

    def one(self, prec=None):
        return self.from_int(1, prec)

    def from_int(self, n: int, prec=None) -> "TowerElement":
        num = [0] * self.degree
        num[0] = n
        return self.make(num, 0, prec)

    def from_fraction(self, x, prec=None) -> "TowerElement":
        x = Fraction(x)
        if prec is None:
            prec = self.default_prec
        if x == 0:
            return self.zero(prec)
        den = int(max(0, vp(x.denominator, self.p)))
        unit_den = x.denominator // self.p**den
        R = den + _ceil_div(prec, self.e) + 1
        n = x.numerator * pow(unit_den, -1, self.p**R)
        num = [0] * self.degree
        num[0] = n
        return self.make(num, den, prec)

    def from_padic(self, a: PAdicApprox) -> "TowerElement":
        if a.is_zero:
            return self.zero(min(self.default_prec, self.e * a.absprec))
        prec = self.e * int(a.absprec)
        if a.valuation >= 0:
            return self.from_int(a.to_int(), prec)
        num = [0] * self.degree
        num[0] = a.mantissa
        return self.make(num, int(-a.valuation), prec)

    def element(self, blocks, den: int = 0, prec=None) -> "TowerElement":
        """Element from ``blocks[j][i]`` = coefficient of ω^i π^j.

        A flat list of length ``e*f`` is also accepted.  Entries may be ints or
        Fractions (p-integral after multiplying by p^den).
        """
        num = [0] * self.degree
        if blocks and isinstance(blocks[0], (list, tuple)):
            for j, blk in enumerate(blocks):
                if j >= self.e:
                    raise ValueError("too many π-blocks")
                for i, c in enumerate(blk):
                    num[j * self.f + i] = c
        else:
            for k, c in enumerate(blocks):
                num[k] = c
        if any(isinstance(c, Fraction) and c.denominator != 1 for c in num):
            if prec is None:
                prec = self.default_prec
            R = den + _ceil_div(prec, self.e) + 1
            num = [int(Fraction(c).numerator * pow(Fraction(c).denominator, -1, self.p**R)) for c in num]
        return self.make([int(c) for c in num], den, prec)

    def basis_element(self, k: int, prec=None) -> "TowerElement":
        num = [0] * self.degree
        num[k] = 1
        return self.make(num, 0, prec)

    @property
    def omega(self) -> "TowerElement":
        if self.f == 1:
            return self.from_int(-self.u[0])
        return self.basis_element(1)

    @property
    def pi(self) -> "TowerElement":
        if self.e == 1:
            return self.make(list(-x for x in self.e_poly[0]))
        return self.basis_element(self.f)

    def omega_poly_at(self, coeffs, x: "TowerElement") -> "TowerElement":
        """Evaluate an integer polynomial in ω (coefficients constant-first) at x."""
        acc = self.zero(x.prec)
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    def _const(self, name):
        cache = self._cache
        if name not in cache:
            cache[name] = self._build_const(name)
        return cache[name]

    def _build_const(self, name):
        hp = self.e * (self.N + 4)
        if name == "eps":
            # π^e = p·ε with ε a unit of O_L
            num = [0] * self.degree
            for r, blk in enumerate(self.e_poly[:-1]):
                for i, c in enumerate(blk):
                    num[r * self.f + i] = -(c // self.p)
            return self.make(num, 0, hp)
        if name == "eps_inv":
            return _unit_inverse(self._const("eps"))
        if name == "pi_inv":
            pe1 = self.pi.with_prec(hp) ** (self.e - 1) if self.e > 1 else self.one(hp)
            t = pe1 * self._const("eps_inv")
            return self.make(t.num, t.den + 1, t.prec - self.e)
        raise KeyError(name)

    def pi_power(self, k: int) -> "TowerElement":
        if k >= 0:
            return self.pi.with_prec(self.e * (self.N + 4)) ** k
        return self._const("pi_inv") ** (-k)

    def lift_residue(self, a, prec=None) -> "TowerElement":
        """Integer lift (digits in [0, p)) of a residue-field element to O_L."""
        num = [0] * self.degree
        for i, c in enumerate(a):
            num[i] = int(c)
        return self.make(num, 0, prec)

    def at_precision(self, N: int) -> "FieldTower":
        """The same tower with a different working precision."""
        key = ("tower", N)
        if key not in self._cache:
            self._cache[key] = self if N == self.N else FieldTower(self.p, self.u, self.e_poly, N)
        return self._cache[key]

    def transfer(self, x: "TowerElement") -> "TowerElement":
        """Move an element from another precision of this tower, capping its precision."""
        return self.make(x.num, x.den, min(x.prec, self.default_prec))

    def describe(self) -> dict:
        return {
            "p": self.p,
            "u": list(self.u),
            "e_poly": [list(c) for c in self.e_poly],
            "e": self.e,
            "f": self.f,
            "precision": self.N,
        }


def build_tower(p: int, u, e_poly, N: int = DEFAULT_PRECISION) -> FieldTower:
    """Validate and construct a tower; ``e_poly`` entries are ints or ω-coefficient lists."""
    return FieldTower(p, tuple(u), tuple(tuple(c) if isinstance(c, (list, tuple)) else (c,) for c in e_poly), N)


class TowerElement:
    """``p**(-den) * sum(num[k] * basis[k])`` known modulo P_L^prec."""

    __slots__ = ("tower", "num", "den", "prec")

    def __init__(self, tower: FieldTower, num: tuple, den: int, prec: int):
        self.tower = tower
        self.num = num
        self.den = den
        self.prec = prec

    # -- basic queries ---------------------------------------------------------
    def valuation(self) -> float:
        t = self.tower
        v = t.num_valuation(self.num)
        if v == INF or v >= self.prec + t.e * self.den:
            return INF
        return v - t.e * self.den

    def is_zero(self) -> bool:
        return self.valuation() == INF

    def approx_eq(self, other) -> bool:
        return (self - other).is_zero()

    def with_prec(self, prec: int) -> "TowerElement":
        """Drop precision to ``prec`` (never raises it)."""
        return self.tower.make(self.num, self.den, min(prec, self.prec))

    def coefficient(self, i: int, j: int) -> PAdicApprox:
        t = self.tower
        absprec = _ceil_div(self.prec - j, t.e)
        return PAdicApprox._from_residue(t.p, self.num[j * t.f + i], -self.den, absprec)

    def blocks(self):
        t = self.tower
        return [[self.coefficient(i, j) for i in range(t.f)] for j in range(t.e)]

    def residue(self):
        t = self.tower
        v = self.valuation()
        if v == INF:
            if self.prec < 1:
                raise PrecisionLoss("residue undefined at this precision", floor=self.prec)
            return t.residue_field.zero()
        if v < 0:
            raise ValueError("element is not integral")
        if self.den:
            raise PrecisionLoss("cannot separate residue from denominator", floor=self.prec)
        return t.residue_field.element([self.num[i] for i in range(t.f)])

    def level_key(self, m: int):
        """Canonical hashable representative modulo P_L^m (element must be integral)."""
        if self.prec < m:
            raise PrecisionLoss(f"element known only modulo P_L^{self.prec}, need P_L^{m}", floor=self.prec)
        if self.den:
            if self.valuation() < 0:
                raise ValueError("element is not integral")
            raise PrecisionLoss("integral element carries a denominator", floor=self.prec)
        return self.tower.level_reduce(self.num, m)

    def in_base(self) -> bool:
        """True when only the basis vector 1 carries a nonzero coefficient."""
        return all(self.coefficient(i, j).is_zero for j in range(self.tower.e) for i in range(self.tower.f) if (i, j) != (0, 0))

    def base_value(self) -> PAdicApprox:
        return self.coefficient(0, 0)

    # -- arithmetic -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, TowerElement):
            if other.tower is not self.tower:
                raise ValueError("elements of different towers")
            return other
        if isinstance(other, int):
            return self.tower.from_int(other, max(self.prec, 1) + self.tower.e * self.den + self.tower.e)
        if isinstance(other, Fraction):
            return self.tower.from_fraction(other, max(self.prec, 1) + self.tower.e * self.den + self.tower.e)
        if isinstance(other, PAdicApprox):
            return self.tower.from_padic(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t, p = self.tower, self.tower.p
        D = max(self.den, other.den)
        sa, sb = p ** (D - self.den), p ** (D - other.den)
        num = [x * sa + y * sb for x, y in zip(self.num, other.num)]
        return t.make(num, D, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return self.tower.make([-x for x in self.num], self.den, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            t = self.tower
            if other == 0:
                return t.zero(self.prec + t.e * t.N)
            gain = t.e * int(vp(other, t.p))
            return t.make([x * other for x in self.num], self.den, self.prec + gain)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = self.tower
        va = self.valuation()
        vb = other.valuation()
        va = self.prec if va == INF else va
        vb = other.prec if vb == INF else vb
        prec = int(min(self.prec + vb, other.prec + va))
        den = self.den + other.den
        R = max(0, den + _ceil_div(prec, t.e))
        return t.make(t.mul_num(self.num, other.num, t.p**R), den, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.tower.one(self.prec if self.valuation() != INF else self.prec)
        base = self
        first = True
        while k:
            if k & 1:
                result = base if first else result * base
                first = False
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> "TowerElement":
        v = self.valuation()
        if v == INF:
            raise PrecisionLoss("inversion of a value indistinguishable from zero", floor=self.prec)
        v = int(v)
        if v == 0 and self.den == 0:
            return _unit_inverse(self)
        shift = self.tower.pi_power(-v)
        w = self * shift
        return _unit_inverse(w) * shift

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __repr__(self):
        t = self.tower
        terms = []
        for j in range(t.e):
            for i in range(t.f):
                c = self.num[j * t.f + i]
                if c:
                    mono = "*".join(s for s in (f"w^{i}" if i else "", f"pi^{j}" if j else "") if s)
                    terms.append(f"{c}" + (f"*{mono}" if mono else ""))
        body = " + ".join(terms) or "0"
        scale = f"/{t.p}^{self.den}" if self.den else ""
        return f"({body}){scale} + O(P^{self.prec})"


def _unit_inverse(w: TowerElement) -> TowerElement:
    t = w.tower
    if w.den or w.valuation() != 0:
        raise ValueError("not a unit of O_L")
    F = t.residue_field
    r0 = F.inv(w.residue())
    R = _ceil_div(w.prec, t.e) + 1
    mod = t.p**R
    r = [0] * t.degree
    for i, c in enumerate(r0):
        r[i] = c
    r = tuple(r)
    one = tuple([1] + [0] * (t.degree - 1))
    for _ in range(2 * int(math.log2(max(w.prec, 2))) + 4):
        wr = t.mul_num(w.num, r, mod)
        err = tuple((x - y) % mod for x, y in zip(wr, one))
        if t.num_valuation(err) >= w.prec:
            break
        # r <- r + r(1 - wr)
        corr = t.mul_num(r, tuple((-x) % mod for x in err), mod)
        r = tuple((x + y) % mod for x, y in zip(r, corr))
    else:  # pragma: no cover
        raise PrecisionLoss("unit inverse did not converge")
    return t.make(r, 0, w.prec)


def element_arith(tower: FieldTower, a: TowerElement, b: TowerElement, op: str) -> TowerElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def valuation_and_residue(tower: FieldTower, a: TowerElement):
    v = a.valuation()
    if v == INF:
        return INF, None
    return int(v), (a.residue() if v >= 0 else None)
