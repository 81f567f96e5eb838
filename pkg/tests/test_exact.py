from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moonshine_forge.errors import ModulusError
from moonshine_forge.exact import (
    CycNumber,
    clean,
    cyc_arith,
    embed,
    euler_phi,
    format_scalar,
    parse_scalar,
    root_angle,
    zeta,
)
from oracles import cyclotomic_remainder


def test_zeta_basic_values():
    assert zeta(4, 2) == -1
    assert zeta(1, 0) == 1
    assert zeta(3, 1) + zeta(3, 2) == -1


def test_arith_examples():
    assert cyc_arith(zeta(3, 1) + 1, -zeta(3, 1), "mul") == 1
    assert cyc_arith(zeta(2, 1), CycNumber(1, [1]), "add") == 0
    assert cyc_arith(CycNumber(1, [1]), zeta(8, 1), "div") == zeta(8, 7)


def test_div_by_zero():
    with pytest.raises(ZeroDivisionError):
        cyc_arith(zeta(5, 1), zeta(5, 0) - 1, "div")


def test_embed_examples():
    minus_one = CycNumber(2, [-1])
    assert embed(minus_one, 4) == zeta(4, 2)
    v = embed(zeta(3, 1), 6)
    assert v * v + v + 1 == 0
    assert v == -zeta(6, 5)
    assert embed(CycNumber(1, [5]), 12) == 5
    with pytest.raises(ModulusError):
        embed(zeta(3, 1), 8)


def test_embed_matches_polynomial_remainder_oracle():
    # zeta_3 inside Q(zeta_6) is z6^2; v^2 + v + 1 evaluated as a polynomial in z6
    v = embed(zeta(3, 1), 6)
    poly = [0] * 5
    poly[4] += 1  # v^2 = z6^4
    poly[2] += 1  # v = z6^2
    poly[0] += 1
    assert cyclotomic_remainder(poly, 6) == []
    # and the stored residue is z6^2 mod Phi_6 = z6 - 1
    assert [Fraction(c) for c in v.coeffs] == cyclotomic_remainder([0, 0, 1], 6)


@pytest.mark.parametrize("M", [1, 2, 3, 4, 5, 6, 8, 9, 12, 15])
def test_zeta_order(M):
    for k in range(M):
        z = zeta(M, k)
        order = M // __import__("math").gcd(M, k)
        acc = CycNumber(M, [1] + [0] * (euler_phi(M) - 1))
        for i in range(1, order + 1):
            acc = acc * z
            if i < order:
                assert acc != 1
        assert acc == 1


def test_representation_length_is_phi():
    for M in range(1, 30):
        assert len(zeta(M, 1).coeffs) == euler_phi(M)


def test_minimal_and_root_angle():
    x = embed(zeta(3, 1), 12)
    assert x.minimal().modulus == 3
    assert root_angle(zeta(12, 5)) == Fraction(5, 12)
    assert root_angle(-1) == Fraction(1, 2)
    assert root_angle(2) is None
    assert root_angle(zeta(5, 1) + 1) is None


def test_text_round_trip():
    for x in [zeta(7, 1) * 3 - 2 + zeta(7, 4), zeta(8, 3) * Fraction(1, 2), CycNumber(1, [Fraction(-5, 3)])]:
        assert parse_scalar(format_scalar(x)) == x
    assert format_scalar(zeta(8, 3) * Fraction(1, 2)) == "1/2*z8^3"


def test_clean_demotes_rationals():
    assert clean(zeta(4, 2)) == -1 and isinstance(clean(zeta(4, 2)), int)
    assert isinstance(clean(Fraction(3, 1)), int)


cyc = st.builds(
    lambda m, ks: sum((zeta(m, k) * c for k, c in ks), CycNumber(m, [0] * euler_phi(m))),
    st.sampled_from([3, 4, 5, 8, 12]),
    st.lists(st.tuples(st.integers(0, 11), st.integers(-3, 3)), min_size=1, max_size=4),
)


@settings(max_examples=60, deadline=None)
@given(cyc, cyc, cyc)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if not a.is_zero():
        assert a * a.inverse() == 1


@settings(max_examples=40, deadline=None)
@given(cyc, st.sampled_from([2, 3, 5]))
def test_embed_then_minimal_is_identity(a, k):
    big = embed(a, a.modulus * k)
    assert big.minimal() == a.minimal()
    assert big.minimal().modulus == a.minimal().modulus
