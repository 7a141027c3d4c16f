"""Arithmetic in F_q = F_p[x]/(modulus).

Elements are tuples of length ``f`` (constant coefficient first).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import ConstructionError, DivideByZero


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _polydivmod(a, b, p):
    """Quotient and remainder of polynomials over F_p."""
    a, b = _trim(a), _trim(b)
    if not b:
        raise DivideByZero("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        q[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bc) % p
        a = _trim(a)
    return q, a


def is_irreducible(modulus, p: int) -> bool:
    """Brute-force irreducibility test: no monic factor of degree <= deg/2."""
    mod = _trim([c % p for c in modulus])
    deg = len(mod) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            _, r = _polydivmod(mod, list(low) + [1], p)
            if not r:
                return False
    return True


@dataclass(frozen=True)
class FqDescriptor:
    p: int
    f: int
    modulus: tuple  # monic, degree f, constant first
    _reduce: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mod = tuple(c % self.p for c in self.modulus)
        if len(mod) != self.f + 1 or mod[-1] != 1:
            raise ConstructionError(f"modulus must be monic of degree {self.f}")
        if not is_irreducible(mod, self.p):
            raise ConstructionError(f"modulus {list(self.modulus)} is reducible mod {self.p}")
        object.__setattr__(self, "modulus", mod)
        # x^(f+k) expressed in the power basis, for k < f - 1
        table = []
        cur = [(-c) % self.p for c in mod[:-1]]  # x^f
        for _ in range(max(self.f - 1, 1)):
            table.append(tuple(cur))
            # multiply by x
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(c + top * (-m)) % self.p for c, m in zip(cur, mod[:-1])]
        object.__setattr__(self, "_reduce", tuple(table))

    @classmethod
    def prime_field(cls, p: int) -> "FqDescriptor":
        return cls(p, 1, (0, 1))

    @property
    def q(self) -> int:
        return self.p**self.f

    # -- elements -------------------------------------------------------
    def zero(self):
        return (0,) * self.f

    def one(self):
        return (1,) + (0,) * (self.f - 1)

    def gen(self):
        """The class of x (for f == 1 this is the root of the linear modulus)."""
        if self.f == 1:
            return ((-self.modulus[0]) % self.p,)
        return (0, 1) + (0,) * (self.f - 2)

    def element(self, coeffs):
        c = [int(x) % self.p for x in coeffs]
        if len(c) > self.f:
            c = self.reduce_poly(c)
        return tuple(c + [0] * (self.f - len(c)))

    def from_int(self, n: int):
        """Index ``n`` in ``[0, q)`` read in base p."""
        out = []
        for _ in range(self.f):
            n, r = divmod(n, self.p)
            out.append(r)
        return tuple(out)

    def to_int(self, a) -> int:
        n = 0
        for c in reversed(a):
            n = n * self.p + c
        return n

    def elements(self):
        return [self.from_int(n) for n in range(self.q)]

    def reduce_poly(self, c):
        c = [x % self.p for x in c]
        f = self.f
        out = list(c[:f]) + [0] * max(0, f - len(c))
        for k, coef in enumerate(c[f:]):
            if coef:
                for i, r in enumerate(self._reduce[k] if k < len(self._reduce) else self._power_row(f + k)):
                    out[i] = (out[i] + coef * r) % self.p
        return out

    def _power_row(self, n):
        # x^n in the power basis, used only for unusually long inputs
        acc = self.one()
        for _ in range(n):
            acc = self.mul(acc, self.gen())
        return acc

    # -- arithmetic ------------------------------------------------------
    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        if self.f == 1:
            return (a[0] * b[0] % self.p,)
        prod = [0] * (2 * self.f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return tuple(self.reduce_poly(prod))

    def scale(self, a, k: int):
        return tuple(x * k % self.p for x in a)

    def inv(self, a):
        if not any(a):
            raise DivideByZero("inversion of zero in F_q")
        if self.f == 1:
            return (pow(a[0], -1, self.p),)
        # extended Euclid over F_p[x]
        r0, r1 = list(self.modulus), _trim(a)
        s0, s1 = [], [1]
        while r1:
            q, r = _polydivmod(r0, r1, self.p)
            prod = [0] * (len(q) + len(s1))
            for i, x in enumerate(q):
                for j, y in enumerate(s1):
                    prod[i + j] += x * y
            pad = max(len(s0), len(prod))
            s_new = [((s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)) % self.p for i in range(pad)]
            r0, r1, s0, s1 = r1, r, s1, _trim(s_new)
        # r0 is a nonzero constant
        c = pow(r0[0], -1, self.p)
        return self.element([x * c for x in s0])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k: int):
        if k < 0:
            return self.pow(self.inv(a), -k)
        out, base = self.one(), a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def frobenius(self, a, k: int = 1):
        return self.pow(a, self.p**k)

    def is_square(self, a) -> bool:
        if not any(a):
            return True
        if self.p == 2:
            return True
        return self.pow(a, (self.q - 1) // 2) == self.one()

    def sqrt(self, a):
        """Some square root by exhaustive search, or None."""
        for y in self.elements():
            if self.mul(y, y) == tuple(a):
                return y
        return None


def residue_field_arith(field_: FqDescriptor, a, b, op: str):
    ops = {"add": field_.add, "sub": field_.sub, "mul": field_.mul, "div": field_.div}
    return ops[op](a, b)
