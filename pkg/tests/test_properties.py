from __future__ import annotations

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from moonshine_forge.exact import zeta
from moonshine_forge.fricke import product_expansion, root_multiplicities
from moonshine_forge.qseries import PSeries, bivariate_difference, format_series, parse_series
from moonshine_forge.replicate import grunsky
from moonshine_forge.twisted import TraceFamily, f_series

coeffs = st.lists(st.integers(-4, 4), min_size=1, max_size=6)


def laurent(cs, start, trunc):
    return PSeries({start + i: c for i, c in enumerate(cs)}, trunc=trunc)


@settings(max_examples=60, deadline=None)
@given(coeffs, coeffs, st.sampled_from([(1, 2), (1, 3), (2, 3), (3, 4)]), st.integers(1, 3))
def test_substitution_is_a_ring_homomorphism(a, b, angle, num):
    f, g = laurent(a, -1, 6), laurent(b, 0, 6)
    root = zeta(angle[1], angle[0])
    sub = lambda x: x.substitute(root, num, angle[1])
    assert sub(f * g) == sub(f) * sub(g)
    assert sub(f + g) == sub(f) + sub(g)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=10, max_size=10))
def test_grunsky_symmetry(a):
    f = PSeries({-1: 1, **{n + 1: c for n, c in enumerate(a)}}, trunc=10)
    H = grunsky(f, 11)
    for m, n in H.pairs():
        assert H[m, n] == H[n, m]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=7, max_size=7))
def test_moebius_round_trip(a):
    f = PSeries({-1: 1, **{n + 1: c for n, c in enumerate(a)}}, trunc=7)
    alg = root_multiplicities(f)
    full = product_expansion(alg, alg.bound, include_real=True)
    raw = bivariate_difference(f)
    for m in range(0, alg.bound):
        for n in range(-1, alg.bound - m + 1):
            if m + n <= alg.bound - 1:
                assert full.coefficient(m, n) == raw.coefficient(m, n)


@settings(max_examples=40, deadline=None)
@given(coeffs, st.integers(1, 6))
def test_text_round_trip(a, d):
    f = PSeries({Fraction(i - 1, d): c for i, c in enumerate(a)}, trunc=Fraction(len(a), d))
    assert parse_series(format_series(f)).identical(f)


@st.composite
def trace_families(draw):
    N = draw(st.integers(2, 3))
    order = draw(st.integers(1, 3))
    vt = {}
    for k in range(N):
        for j in range(N):
            for e in range(-1, 6):
                for m in range(order):
                    lo = 0 if m == 0 else -3
                    vt[(k, j, e, m)] = draw(st.integers(lo, 3))
    return TraceFamily(N, order, vt, {k: 5 for k in range(N)}, 1)


@settings(max_examples=30, deadline=None)
@given(trace_families(), st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_f_series_periodicity(fam, k, l, m):
    N, o = fam.level, fam.order
    base = f_series(fam, k, l, m)
    assert f_series(fam, k + N, l, m).identical(base)
    assert f_series(fam, k, l + N, m).identical(base)
    assert f_series(fam, k, l, m + o).identical(base)
