"""Truncated power series in one or more variables with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction

from .errors import ComposeError


class TruncSeries:
    """Sum of ``coeffs[exps] * X^exps`` over total degree <= ``D``."""

    __slots__ = ("nvars", "D", "coeffs", "_sorted")

    def __init__(self, nvars: int, D: int, coeffs=None):
        self.nvars = nvars
        self.D = D
        clean = {}
        for k, c in (coeffs or {}).items():
            k = tuple(k)
            if len(k) != nvars:
                raise ValueError("exponent tuple has the wrong length")
            if sum(k) <= D and c:
                # integral coefficients stay ints; Fraction arithmetic is far slower
                if isinstance(c, Fraction) and c.denominator == 1:
                    c = c.numerator
                clean[k] = c if isinstance(c, int) else Fraction(c)
        self.coeffs = clean
        self._sorted = None

    # -- construction -----------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, D: int) -> "TruncSeries":
        return cls(nvars, D)

    @classmethod
    def const(cls, nvars: int, D: int, c) -> "TruncSeries":
        return cls(nvars, D, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, D: int, i: int) -> "TruncSeries":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, D, {tuple(e): 1})

    @classmethod
    def from_list(cls, coeffs, D: int | None = None) -> "TruncSeries":
        """Univariate series from a constant-first coefficient list."""
        D = len(coeffs) - 1 if D is None else D
        return cls(1, D, {(k,): c for k, c in enumerate(coeffs)})

    # -- queries ------------------------------------------------------------------
    def coefficient(self, *exps) -> Fraction:
        if len(exps) == 1 and isinstance(exps[0], tuple):
            exps = exps[0]
        return Fraction(self.coeffs.get(tuple(exps), 0))

    def to_list(self):
        if self.nvars != 1:
            raise ValueError("to_list needs a univariate series")
        return [self.coefficient(k) for k in range(self.D + 1)]

    def homogeneous(self, k: int) -> "TruncSeries":
        return TruncSeries(self.nvars, self.D, {e: c for e, c in self.coeffs.items() if sum(e) == k})

    def truncate(self, D: int) -> "TruncSeries":
        return TruncSeries(self.nvars, min(D, self.D), self.coeffs)

    def valuation_degree(self) -> float:
        return min((sum(e) for e in self.coeffs), default=float("inf"))

    def is_zero(self) -> bool:
        return not self.coeffs

    def first_nonzero(self):
        """Lowest-degree nonzero term as (exps, coeff), or None."""
        if not self.coeffs:
            return None
        return min(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def terms_by_degree(self):
        if self._sorted is None:
            self._sorted = sorted(((sum(e), e, c) for e, c in self.coeffs.items()), key=lambda t: t[0])
        return self._sorted

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        D = min(self.D, other.D)
        return self.nvars == other.nvars and self.truncate(D).coeffs == other.truncate(D).coeffs

    def __hash__(self):
        return hash((self.nvars, self.D, frozenset(self.coeffs.items())))

    # -- arithmetic ---------------------------------------------------------------
    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncSeries.const(self.nvars, self.D, other)
        if other.nvars != self.nvars:
            raise ValueError("variable counts differ")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return TruncSeries(self.nvars, min(self.D, other.D), out)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.nvars, self.D, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        c = Fraction(c)
        if c.denominator == 1:
            c = c.numerator
        return TruncSeries(self.nvars, self.D, {e: c * x for e, x in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        D = min(self.D, other.D)
        out = {}
        b_terms = other.terms_by_degree()
        for da, ea, ca in self.terms_by_degree():
            if da > D:
                break
            for db, eb, cb in b_terms:
                if da + db > D:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return TruncSeries(self.nvars, D, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = TruncSeries.const(self.nvars, self.D, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def powers(self, k: int):
        """[self^0, ..., self^k]."""
        out = [TruncSeries.const(self.nvars, self.D, 1)]
        for _ in range(k):
            out.append(out[-1] * self)
        return out

    # -- calculus -------------------------------------------------------------------
    def deriv(self, i: int = 0) -> "TruncSeries":
        out = {}
        for e, c in self.coeffs.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return TruncSeries(self.nvars, self.D - 1, out)

    def integrate(self) -> "TruncSeries":
        if self.nvars != 1:
            raise ValueError("integration needs a univariate series")
        return TruncSeries(1, self.D + 1, {(e[0] + 1,): Fraction(c, e[0] + 1) if isinstance(c, int) else c / (e[0] + 1) for e, c in self.coeffs.items()})

    def substitute(self, i: int, value) -> "TruncSeries":
        """Set variable ``i`` to the constant ``value`` (must be 0 to stay formal)."""
        if value != 0:
            raise ComposeError("only substitution of 0 keeps a truncated series exact")
        return TruncSeries(self.nvars, self.D, {e: c for e, c in self.coeffs.items() if e[i] == 0})

    # -- composition ------------------------------------------------------------------
    def compose(self, inners) -> "TruncSeries":
        """``self(inners[0], ..., inners[nvars-1])``; inner series need zero constant term."""
        if len(inners) != self.nvars:
            raise ValueError("need one inner series per variable")
        m = inners[0].nvars
        D = min([self.D] + [s.D for s in inners])
        for s in inners:
            if s.nvars != m:
                raise ValueError("inner series disagree on variable count")
            if s.coefficient((0,) * m):
                raise ComposeError("inner series must have zero constant term")
        inners = [s.truncate(D) for s in inners]
        if self.nvars == 1:
            return _horner1(self, inners[0], D)
        # Horner in the last variable: F = sum_b X_last^b * F_b(X_0..)
        last = self.nvars - 1
        groups = {}
        for e, c in self.coeffs.items():
            groups.setdefault(e[last], {})[e[:last]] = c
        top = max(groups, default=0)
        acc = TruncSeries.zero(m, D)
        for b in range(top, -1, -1):
            inner = TruncSeries(last, self.D, groups.get(b, {}))
            part = inner.compose(inners[:last]) if last else TruncSeries.const(m, D, inner.coefficient(()))
            acc = acc * inners[last] + part
        return acc

    def compositional_inverse(self) -> "TruncSeries":
        """Univariate g with self(g(T)) = T; requires a zero constant term and unit linear term."""
        if self.nvars != 1:
            raise ValueError("compositional inverse needs a univariate series")
        if self.coefficient(0):
            raise ComposeError("series has a nonzero constant term")
        c1 = self.coefficient(1)
        if not c1:
            raise ComposeError("linear coefficient is zero")
        D = self.D
        g = TruncSeries(1, D, {(1,): 1 / c1})
        T = TruncSeries.var(1, D, 0)
        for k in range(2, D + 1):
            r = self.compose([g]) - T
            ck = r.coefficient(k)
            if ck:
                g = g + TruncSeries(1, D, {(k,): -ck / c1})
        return g

    def __repr__(self):
        if not self.coeffs:
            return f"O(deg {self.D + 1})"
        names = "XYZUVW" if self.nvars > 1 else "T"
        parts = []
        for d, e, c in self.terms_by_degree():
            mono = "*".join(f"{names[i]}^{k}" if k > 1 else names[i] for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def _horner1(outer: TruncSeries, inner: TruncSeries, D: int) -> TruncSeries:
    m = inner.nvars
    v = max(1, int(inner.valuation_degree())) if inner.coeffs else D + 1
    top = min(max((e[0] for e in outer.coeffs), default=0), D // v)
    acc = TruncSeries.zero(m, D)
    for k in range(top, -1, -1):
        # acc is multiplied by inner^k later, so only degrees <= D - k v matter
        Dk = D - k * v
        acc = TruncSeries(m, Dk, acc.coeffs) * inner.truncate(Dk) + outer.coefficient(k)
    return TruncSeries(m, D, acc.coeffs)


def series_arith(a: TruncSeries, b, op: str) -> TruncSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "compose":
        return a.compose(b if isinstance(b, (list, tuple)) else [b])
    if op == "invert-under-composition":
        return a.compositional_inverse()
    raise ValueError(f"unknown op {op!r}")
