"""Fixed-precision p-adic scalars, integer polynomial helpers and Hensel lifting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NoConvergence, PrecisionLoss

INF = math.inf
DEFAULT_PRECISION = 24


def vp(n: int, p: int) -> float:
    """p-adic valuation of an integer; ``INF`` for 0."""
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(x, p: int) -> float:
    x = Fraction(x)
    if x == 0:
        return INF
    return vp(x.numerator, p) - vp(x.denominator, p)


def fraction_mod(x, p: int, R: int) -> int:
    """Image of a p-integral rational in Z/p^R."""
    x = Fraction(x)
    mod = p**R
    if x.denominator == 1:
        return x.numerator % mod
    if x.denominator % p == 0:
        raise PrecisionLoss(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, mod) % mod


@dataclass(frozen=True)
class PAdicApprox:
    """``mantissa * p**valuation`` known modulo ``p**(valuation + precision)``.

    A value indistinguishable from zero has ``valuation == INF``, ``mantissa == 0``
    and ``precision`` equal to the number of absolute digits known.
    """

    p: int
    valuation: float
    mantissa: int
    precision: int

    def __post_init__(self):
        if self.valuation == INF:
            if self.mantissa != 0:
                raise ValueError("zero must have mantissa 0")
        elif self.mantissa % self.p == 0:
            raise ValueError("mantissa must be a unit")

    # -- construction -------------------------------------------------
    @classmethod
    def from_int(cls, p: int, n: int, precision: int = DEFAULT_PRECISION) -> "PAdicApprox":
        """Exact integer rounded to ``precision`` relative digits."""
        v = vp(n, p)
        if v == INF:
            return cls.zero(p, precision)
        unit = n // p**v
        return cls(p, v, unit % p**precision, precision)

    @classmethod
    def from_fraction(cls, p: int, x, precision: int = DEFAULT_PRECISION) -> "PAdicApprox":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, precision)
        v = vp(x.numerator, p) - vp(x.denominator, p)
        num = x.numerator // p ** vp(x.numerator, p)
        den = x.denominator // p ** vp(x.denominator, p)
        mod = p**precision
        return cls(p, v, num * pow(den, -1, mod) % mod, precision)

    @classmethod
    def zero(cls, p: int, absprec: int = DEFAULT_PRECISION) -> "PAdicApprox":
        return cls(p, INF, 0, absprec)

    @classmethod
    def _from_residue(cls, p: int, value: int, v0: int, absprec: int) -> "PAdicApprox":
        # value is known modulo p**(absprec - v0) and scaled by p**v0
        rel = absprec - v0
        if rel <= 0:
            return cls.zero(p, absprec)
        value %= p**rel
        if value == 0:
            return cls.zero(p, absprec)
        k = vp(value, p)
        return cls(p, v0 + k, (value // p**k) % p ** (rel - k), rel - k)

    # -- accessors ----------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.valuation == INF

    @property
    def absprec(self) -> int:
        return self.precision if self.is_zero else self.valuation + self.precision

    def to_int(self) -> int:
        """Representative in ``[0, p**absprec)``; requires non-negative valuation."""
        if self.is_zero:
            return 0
        if self.valuation < 0:
            raise ValueError("value is not integral")
        return self.mantissa * self.p**self.valuation % self.p**self.absprec

    def to_fraction(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.mantissa) * Fraction(self.p) ** self.valuation

    def agrees(self, other: "PAdicApprox") -> bool:
        """Equality modulo the smaller of the two absolute precisions."""
        diff = self - other
        return diff.is_zero

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "PAdicApprox":
        if isinstance(other, PAdicApprox):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, (int, Fraction)):
            x = Fraction(other)
            extra = 0 if x == 0 else max(0, int(vp_fraction(x, self.p)))
            return PAdicApprox.from_fraction(self.p, x, max(self.absprec, self.precision) + extra + 1)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        absprec = min(self.absprec, other.absprec)
        if self.is_zero and other.is_zero:
            return PAdicApprox.zero(self.p, absprec)
        v0 = int(min(self.valuation, other.valuation))
        total = 0
        for x in (self, other):
            if not x.is_zero:
                total += x.mantissa * self.p ** int(x.valuation - v0)
        return PAdicApprox._from_residue(self.p, total, v0, absprec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return PAdicApprox(self.p, self.valuation, (-self.mantissa) % self.p**self.precision, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            if self.is_zero and other.is_zero:
                return PAdicApprox.zero(self.p, self.absprec + other.absprec)
            z, nz = (self, other) if self.is_zero else (other, self)
            return PAdicApprox.zero(self.p, int(z.absprec + nz.valuation))
        prec = min(self.precision, other.precision)
        return PAdicApprox(
            self.p,
            self.valuation + other.valuation,
            self.mantissa * other.mantissa % self.p**prec,
            prec,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            raise PrecisionLoss("division by a value indistinguishable from zero", floor=other.absprec)
        if self.is_zero:
            return PAdicApprox.zero(self.p, int(self.absprec - other.valuation))
        prec = min(self.precision, other.precision)
        mod = self.p**prec
        return PAdicApprox(
            self.p,
            self.valuation - other.valuation,
            self.mantissa * pow(other.mantissa, -1, mod) % mod,
            prec,
        )

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return PAdicApprox.from_int(self.p, 1, self.precision) / (self**-k)
        out = PAdicApprox.from_int(self.p, 1, self.precision if not self.is_zero else self.absprec)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        if self.is_zero:
            return f"O({self.p}^{self.precision})"
        return f"{self.mantissa}*{self.p}^{self.valuation} + O({self.p}^{self.absprec})"


def padic_valuation(a: PAdicApprox) -> float:
    return a.valuation


# -- integer polynomials (dense, constant term first) ------------------------

def poly_eval(coeffs, x: int, mod: int | None = None) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
        if mod is not None:
            acc %= mod
    return acc


def poly_deriv(coeffs):
    return [k * c for k, c in enumerate(coeffs)][1:]


def _as_int_coeffs(f, p, R):
    out = []
    for c in f:
        if isinstance(c, PAdicApprox):
            if c.absprec < R:
                raise PrecisionLoss("polynomial coefficient too imprecise for hensel_lift", floor=c.absprec)
            out.append(c.to_int())
        else:
            out.append(fraction_mod(c, p, R))
    return out


def hensel_lift(f, a0, target_n: int, p: int | None = None) -> PAdicApprox:
    """Newton-lift an approximate root of ``f`` (coefficients constant-first).

    The returned root ``r`` satisfies ``v_p(f(r)) >= target_n`` and is congruent
    to ``a0`` modulo ``p**(v_p(f'(a0)) + 1)``.
    """
    if isinstance(a0, PAdicApprox):
        p = a0.p
        a = a0.to_int()
    else:
        if p is None:
            raise ValueError("p is required when a0 is an int")
        a = int(a0)
    df = poly_deriv(list(f)) or [0]
    R = 2 * target_n + 8
    dfa = poly_eval(_as_int_coeffs(df, p, R), a, p**R)
    vd = vp(dfa, p)
    if vd == INF:
        raise NoConvergence("derivative vanishes to working precision")
    k = int(vd)
    R = max(R, target_n + 2 * k + 4)
    mod = p**R
    coeffs = _as_int_coeffs(f, p, R)
    dcoeffs = _as_int_coeffs(df, p, R)
    vf = vp(poly_eval(coeffs, a, mod), p)
    if not vf > 2 * k:
        raise NoConvergence(f"Hensel criterion fails: v(f(a0))={vf}, v(f'(a0))={k}")
    for _ in range(4 * R):
        fa = poly_eval(coeffs, a, mod)
        if vp(fa, p) >= target_n + k:
            break
        dfa = poly_eval(dcoeffs, a, mod)
        # v(f(a)) > 2k keeps the Newton step integral
        step = (fa // p**k) * pow(dfa // p**k, -1, mod) % mod
        a = (a - step) % mod
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise NoConvergence("Newton iteration did not converge")
    return PAdicApprox._from_residue(p, a, 0, target_n)
