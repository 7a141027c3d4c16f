import math
import random

import pytest

from conftest import tower
from localct.elliptic import (
    ADDITIVE,
    GOOD,
    INFINITY,
    NONSPLIT,
    NOT_IN_LEVEL,
    SPLIT,
    WeierstrassCurve,
    _lift_point,
    check_isomorphism,
    formal_filtration_iso,
    norm_surjectivity_certificate,
    on_curve_residual,
    point_add,
    point_from_z,
    reduction_sequence_check,
    reduction_type,
    residue_cohomology,
    residue_group,
)
from localct.errors import SingularCurve
from localct.finite_field import FqDescriptor
from localct.formal_groups import fgl_add, make_law
from localct.galois import galois_group
from localct.tower import build_tower

MAIN = (0, 0, 0, 1, 1)  # y^2 = x^3 + x + 1


def brute_count(a, F):
    """Affine solutions plus infinity, with plain loops over the field."""
    a1, a2, a3, a4, a6 = (F.element([v]) for v in a)
    n = 1
    for x in F.elements():
        for y in F.elements():
            lhs = F.add(F.mul(y, y), F.add(F.mul(F.mul(a1, x), y), F.mul(a3, y)))
            x2 = F.mul(x, x)
            rhs = F.add(F.add(F.mul(x2, x), F.mul(a2, x2)), F.add(F.mul(a4, x), a6))
            n += lhs == rhs
    return n


def test_good_reduction_example():
    c = WeierstrassCurve.from_list(MAIN)
    assert c.discriminant == -496
    assert reduction_type(c, 5) == GOOD


def test_multiplicative_example_over_q7():
    c = WeierstrassCurve.from_list([1, 0, 0, 1, 0])
    assert (c.discriminant, c.c4) == (-63, -47)
    t = reduction_type(c, 7)
    assert t in (SPLIT, NONSPLIT)
    G = residue_group(c, FqDescriptor.prime_field(7))
    # removing the node leaves q - 1 points when split and q + 1 when not
    assert G.order == (6 if t == SPLIT else 8)
    assert t == NONSPLIT


def test_singular_curve_rejected():
    with pytest.raises(SingularCurve):
        WeierstrassCurve.from_list([0, 0, 0, 0, 0])


def test_point_counts():
    c = WeierstrassCurve.from_list(MAIN)
    F5 = FqDescriptor.prime_field(5)
    F25 = FqDescriptor(5, 2, (1, 1, 1))
    G5, G25 = residue_group(c, F5), residue_group(c, F25)
    assert G5.order == 9 == brute_count(MAIN, F5)
    assert G25.order == brute_count(MAIN, F25) == 27
    fixed = [P for P in G25.points if G25.frobenius(P) == P]
    assert len(fixed) == 9


FIELDS = [FqDescriptor.prime_field(5), FqDescriptor.prime_field(7), FqDescriptor.prime_field(11),
          FqDescriptor(5, 2, (1, 1, 1)), FqDescriptor(7, 2, (1, 0, 1))]
GOOD_PAIRS = [(a, F) for a in (MAIN, (1, 0, 1, -1, 0), (0, 0, 1, 0, 7), (1, -1, 1, 2, 3)) for F in FIELDS
              if reduction_type(WeierstrassCurve.from_list(a), F.p) == GOOD]


@pytest.mark.parametrize("a,F", GOOD_PAIRS)
def test_hasse_bound(a, F):
    c = WeierstrassCurve.from_list(a)
    G = residue_group(c, F)
    assert abs(G.order - (F.q + 1)) <= 2 * math.sqrt(F.q)
    assert G.order == brute_count(a, F)


@pytest.mark.parametrize("a,p,tag,size", [((0, 0, 0, 0, 5), 5, ADDITIVE, 5), ((0, 1, 0, 0, 7), 7, SPLIT, 6),
                                          ((0, 1, 0, 0, 5), 5, SPLIT, 4), ((0, -1, 0, 0, 7), 7, NONSPLIT, 8)])
def test_singular_reductions(a, p, tag, size):
    c = WeierstrassCurve.from_list(a)
    assert reduction_type(c, p) == tag
    G = residue_group(c, FqDescriptor.prime_field(p))
    assert (G.tag, G.order) == (tag, size)
    assert check_isomorphism(G)


def test_additive_over_f25():
    c = WeierstrassCurve.from_list([0, 0, 0, 0, 5])
    G = residue_group(c, FqDescriptor(5, 2, (1, 1, 1)))
    assert G.order == 25 and check_isomorphism(G)


def test_filtration_levels():
    t, _ = tower("U5")
    c = WeierstrassCurve.from_list(MAIN)
    P1 = point_from_z(t, c, t.from_int(5) * 3)
    assert P1[0].valuation() == -2 and P1[1].valuation() == -3
    r = formal_filtration_iso(t, c, P1, 1)
    assert r.in_level and r.level == 1
    assert not formal_filtration_iso(t, c, P1, 2).in_level
    P2 = point_from_z(t, c, t.from_int(25) * 2)
    assert P2[0].valuation() == -4
    assert formal_filtration_iso(t, c, P2, 2).in_level
    Q = _lift_point(t, c, ((0,), (1,)))
    assert on_curve_residual(t, c, Q).valuation() >= t.default_prec - 4
    assert formal_filtration_iso(t, c, Q, 1).level == NOT_IN_LEVEL


@pytest.mark.parametrize("name", ["U5", "Q2i"])
def test_formal_parameter_is_a_homomorphism(name):
    t, _ = tower(name)
    c = WeierstrassCurve.from_list(MAIN if name == "U5" else (1, 0, 1, -1, 0))
    law = make_law("elliptic", 12, a=c.a)
    rng = random.Random(17)
    prec = 12 * t.e
    for _ in range(50):
        z1 = t.element([rng.randrange(t.p**6) for _ in range(t.degree)]) * t.pi
        z2 = t.element([rng.randrange(t.p**6) for _ in range(t.degree)]) * t.pi
        z1 = (z1 if z1.valuation() == 1 else z1 + t.pi).with_prec(prec)
        z2 = (z2 if z2.valuation() == 1 else z2 + t.pi).with_prec(prec)
        S = point_add(t, c, point_from_z(t, c, z1), point_from_z(t, c, z2))
        if S is INFINITY:
            continue
        zs = formal_filtration_iso(t, c, S, 1).z
        assert (zs - fgl_add(law, z1, z2)).with_prec(prec).is_zero()


def test_lifts_over_q5_and_its_quadratic():
    c = WeierstrassCurve.from_list(MAIN)
    q5 = build_tower(5, [-1, 1], [-5, 1])
    r = reduction_sequence_check(q5, c)
    assert r.passed and (r.residue_points, r.lifted) == (9, 8)
    t, _ = tower("U5")
    r = reduction_sequence_check(t, c, samples=10, seed=3)
    assert r.passed and (r.residue_points, r.lifted) == (27, 26) and r.fibers_ok


def test_additive_lifts():
    t, _ = tower("U5")
    r = reduction_sequence_check(t, WeierstrassCurve.from_list([0, 0, 0, 0, 5]))
    assert r.passed and r.lifted == 24


def test_residue_cohomology_vanishes():
    c = WeierstrassCurve.from_list(MAIN)
    assert residue_cohomology(residue_group(c, FqDescriptor(5, 2, (1, 1, 1)))) == (1, 1)


def test_norm_surjectivity_certificate():
    _, T = tower("U5")
    cert = norm_surjectivity_certificate(T, WeierstrassCurve.from_list(MAIN))
    assert cert.passed
    assert cert.residue_base_points == 9 and cert.residue_points == 27
    assert cert.formal_level == 1
    assert (cert.h0, cert.hminus1) == (1, 1)
    assert cert.to_json()["status"] == "PASS"


def test_certificate_for_singular_reductions():
    _, T = tower("U5")
    for a in ([0, 0, 0, 0, 5], [0, 1, 0, 0, 5]):
        cert = norm_surjectivity_certificate(T, WeierstrassCurve.from_list(a, component_order=1))
        assert cert.trace_surjective


def test_certificate_refuses_ramified_towers():
    t = build_tower(5, [0, 1], [5, 0, 1])
    T = galois_group(t)
    cert = norm_surjectivity_certificate(T, WeierstrassCurve.from_list(MAIN))
    assert not cert.passed and cert.to_json()["status"] == "FAILED"
