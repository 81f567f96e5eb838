from __future__ import annotations

from fractions import Fraction

import pytest

from moonshine_forge.errors import NegativityError, NormalizationError, NonIntegralityError, TruncationError
from moonshine_forge.fricke import (
    MONSTER_ORDER,
    cartan_block,
    compat_predicate,
    denominator_verify,
    diagram_automorphism_ranks,
    ogg_primes,
    product_expansion,
    root_multiplicities,
    vplus_dims,
    witness,
    witness_exceptional_set,
)
from moonshine_forge.modcatalog import default_catalog, expand_J
from moonshine_forge.qseries import PSeries, bivariate_difference
from oracles import direct_product, lyndon_count, witness_bruteforce


@pytest.fixture(scope="module")
def monster():
    return root_multiplicities(expand_J(24), 25)


def two_q():
    return root_multiplicities(PSeries({-1: 1, 1: 2}), 12)


class TestMultiplicities:
    def test_monster_c_is_a_mn(self, monster):
        J = expand_J(24)
        for (m, n) in [(m, n) for m in range(1, 25) for n in range(1, 25) if m * n <= 24 and m + n <= 25]:
            assert monster.c(m, n) == J.coefficient(m * n)
        assert monster.c(2, 2) == monster.c(1, 4) == J.coefficient(4)

    def test_real_root(self, monster):
        assert monster.c(1, -1) == 1
        assert monster.c(2, -2) == 0 and monster.c(1, 0) == 0

    def test_free_lie_necklace_oracle(self):
        alg = two_q()
        for k in range(1, 7):
            assert alg.c(k, k) == lyndon_count(k)
        for (m, n) in alg.roots():
            assert n == -1 or m == n

    def test_default_bound(self):
        alg = root_multiplicities(expand_J(9))
        assert alg.bound == 10

    def test_out_of_range(self, monster):
        with pytest.raises(TruncationError):
            monster.c(20, 10)
        with pytest.raises(TruncationError):
            root_multiplicities(expand_J(9), 12)

    def test_rejects_bad_shapes(self):
        with pytest.raises(NormalizationError):
            root_multiplicities(PSeries({-1: 1, 0: 3, 1: 1}, trunc=5))
        with pytest.raises(NegativityError):
            root_multiplicities(default_catalog().expand("2B", 8))
        with pytest.raises(NonIntegralityError):
            root_multiplicities(PSeries({-1: 1, 1: Fraction(1, 2)}, trunc=5))


class TestDenominator:
    def test_monster(self, monster):
        assert denominator_verify(monster, 16)["verdict"]

    def test_two_q_against_direct_product(self):
        alg = two_q()
        assert denominator_verify(alg, 12)["verdict"]
        lhs = product_expansion(alg, 12)
        direct = direct_product(alg.mult, 12)
        for (m, n), v in direct.items():
            assert lhs.coefficient(m, n) == v
        for m in range(1, 12):
            for n in range(1, 13 - m):
                assert lhs.coefficient(m, n) == direct.get((m, n), 0)

    def test_direct_product_oracle_for_j(self):
        alg = root_multiplicities(expand_J(10))
        lhs = product_expansion(alg, 10)
        direct = direct_product(alg.mult, 10)
        for m in range(1, 10):
            for n in range(1, 11 - m):
                assert lhs.coefficient(m, n) == direct.get((m, n), 0)

    @pytest.mark.parametrize("root", [(1, 1), (2, 2), (3, 4), (1, 5)])
    def test_perturbation_detected(self, root):
        alg = root_multiplicities(expand_J(15))
        bad = alg.with_override({root: alg.c(*root) + 1})
        rep = denominator_verify(bad, 16)
        assert not rep["verdict"]
        mm = rep["first_mismatch"]
        assert mm["lhs"] != mm["rhs"]

    def test_product_with_real_root_is_bivariate_difference(self):
        J = expand_J(12)
        alg = root_multiplicities(J)
        full = product_expansion(alg, 12, include_real=True)
        raw = bivariate_difference(J.truncate(11))
        for m in range(0, 12):
            for n in range(-1, 12 - m):
                assert full.coefficient(m, n) == raw.coefficient(m, n)


class TestTables:
    def test_vplus(self, monster):
        V = vplus_dims(monster)
        assert V[1, 1] == 196884
        assert V[2, 3] == monster.c(1, 4)

    def test_cartan(self):
        blk = cartan_block(root_multiplicities(expand_J(6)), 3)
        assert blk["labels"][0] == (1, -1)
        assert blk["sizes"] == [1, 196884, 21493760, 864299970]
        assert blk["entries"][0][0] == 2
        assert blk["entries"][1][2] == -3
        assert blk["entries"][0][1] == 0

    def test_ranks(self):
        alg = root_multiplicities(expand_J(4))
        assert diagram_automorphism_ranks(alg, 2) == [1, 196884, 21493760]


class TestCompat:
    def test_monster_levels(self, monster):
        for N in (1, 2, 3, 5):
            assert compat_predicate(monster, N)["verdict"]

    def test_two_q_level_2(self):
        assert not compat_predicate(two_q(), 2)["verdict"]

    def test_injected_defect(self):
        alg = root_multiplicities(expand_J(8))
        bad = alg.with_override({(2, 2): alg.c(2, 2) + 1})
        rep = compat_predicate(bad, 1)
        assert not rep["verdict"]
        assert rep["witness"] == ((1, 4), (2, 2))

    def test_2a_incompatible_at_level_3(self):
        alg = root_multiplicities(default_catalog().expand("2A", 12))
        assert compat_predicate(alg, 2)["verdict"]
        assert not compat_predicate(alg, 3)["verdict"]


class TestWitness:
    def test_matches_bruteforce(self):
        for n in range(1, 120):
            brute = witness_bruteforce(n)
            assert witness(n) == (brute[0] if brute else None)

    def test_properties(self):
        for n in range(1, 201):
            w = witness(n)
            if w is None:
                continue
            a, b, c, d = w
            assert a * b == c * d and a + b == n + 1 and c + d < n + 1

    def test_exceptional_set(self):
        assert witness_exceptional_set(200) == {1, 2, 3, 5}


def test_ogg_primes_divide_monster_order():
    primes = ogg_primes()
    assert len(primes) == 15
    assert all(MONSTER_ORDER % p == 0 for p in primes)
    rest = MONSTER_ORDER
    for p in primes:
        while rest % p == 0:
            rest //= p
    assert rest == 1
