from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from localct.errors import DivideByZero, NoConvergence, PrecisionLoss
from localct.finite_field import FqDescriptor, is_irreducible, residue_field_arith
from localct.padic import INF, PAdicApprox, hensel_lift, padic_valuation, poly_eval, vp

primes = st.sampled_from([2, 3, 5, 7, 11])


def test_small_arithmetic():
    two = PAdicApprox.from_int(2, 1) + PAdicApprox.from_int(2, 1)
    assert (two.valuation, two.mantissa) == (1, 1)
    six = PAdicApprox.from_int(5, 2) * PAdicApprox.from_int(5, 3)
    assert (six.valuation, six.mantissa) == (0, 6)


def test_division_mod_16():
    a = PAdicApprox.from_int(2, 7, precision=4)
    b = PAdicApprox.from_int(2, 3, precision=4)
    q = a / b
    assert q.to_int() % 16 == 13


def test_valuations():
    assert padic_valuation(PAdicApprox.from_int(3, 18)) == 2
    assert padic_valuation(PAdicApprox.from_int(2, 7)) == 0
    assert padic_valuation(PAdicApprox.zero(5, 10)) == INF
    assert vp(0, 3) == INF


def test_division_by_zero_to_precision():
    with pytest.raises((PrecisionLoss, DivideByZero)) as info:
        PAdicApprox.from_int(5, 1) / PAdicApprox.zero(5, 6)
    assert "precision" in str(info.value) or isinstance(info.value, DivideByZero)


def test_hensel_examples():
    r = hensel_lift([1, 0, 1], 2, 2, p=5)
    assert r.to_int() % 25 == 7
    r = hensel_lift([-2, 0, 1], 3, 2, p=7)
    assert r.to_int() % 49 == 10
    r = hensel_lift([-11, 1], 11, 6, p=3)
    assert r.to_int() == 11


def test_hensel_criterion_violation():
    # X^2 - 2 has no root near 0 in Z_7; the criterion fails
    with pytest.raises(NoConvergence):
        hensel_lift([-2, 0, 1], 0, 4, p=7)


@given(primes, st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), st.integers(4, 30))
def test_add_then_subtract(p, a, b, N):
    x = PAdicApprox.from_int(p, a, N)
    y = PAdicApprox.from_int(p, b, N)
    z = (x + y) - y
    assert z.agrees(x)


@given(primes, st.integers(1, 10**6), st.integers(1, 10**6))
def test_fraction_roundtrip(p, num, den):
    x = Fraction(num, den)
    a = PAdicApprox.from_fraction(p, x, 20)
    b = PAdicApprox.from_int(p, num, 20) / PAdicApprox.from_int(p, den, 20)
    assert a.agrees(b)


@given(primes, st.integers(0, 10**6), st.integers(1, 3), st.integers(2, 12), st.data())
def test_hensel_random_instances(p, root, shift, target, data):
    # f = (X - root)(X - other) with root != other mod p, so both roots are simple
    other = root + data.draw(st.integers(1, p - 1)) + p * shift
    f = [root * other, -(root + other), 1]
    r = hensel_lift(f, root % p, target, p=p)
    assert vp(poly_eval(f, r.to_int()), p) >= target


@pytest.mark.parametrize("p,f,mod", [(2, 2, (1, 1, 1)), (3, 2, (1, 0, 1)), (5, 2, (1, 1, 1)), (7, 2, (1, 0, 1)),
                                      (11, 2, (1, 0, 1)), (2, 3, (1, 1, 0, 1)), (3, 3, (1, 2, 0, 1)), (2, 4, (1, 1, 0, 0, 1))])
def test_frobenius_fixes_every_element(p, f, mod):
    F = FqDescriptor(p, f, mod)
    assert F.q <= 121
    for a in F.elements():
        assert F.pow(a, F.q) == a


def test_residue_field_examples():
    F4 = FqDescriptor(2, 2, (1, 1, 1))
    x = F4.gen()
    assert residue_field_arith(F4, x, F4.add(x, F4.one()), "mul") == F4.one()
    F5 = FqDescriptor.prime_field(5)
    assert residue_field_arith(F5, (2,), (3,), "add") == (0,)
    F9 = FqDescriptor(3, 2, (1, 0, 1))
    assert F9.mul(F9.gen(), F9.gen()) == (2, 0)


def test_irreducibility():
    assert is_irreducible((1, 1, 1), 5)
    assert not is_irreducible((1, 0, 1), 5)  # 2^2 + 1 = 0 mod 5
    assert is_irreducible((1, 1, 0, 0, 1), 2)
    assert not is_irreducible((1, 0, 1, 0, 1), 2)  # (x^2+x+1)^2


def test_inverse_and_sqrt_in_F25():
    F = FqDescriptor(5, 2, (1, 1, 1))
    for a in F.elements():
        if a != F.zero():
            assert F.mul(a, F.inv(a)) == F.one()
            s = F.sqrt(F.mul(a, a))
            assert F.mul(s, s) == F.mul(a, a)
