from __future__ import annotations

import json
from fractions import Fraction

import pytest

from moonshine_forge.errors import CatalogError, CatalogSyntaxError, CycleError, UnknownNameError
from moonshine_forge.modcatalog import (
    default_catalog,
    euler_product,
    expand_Delta,
    expand_E4,
    expand_eta,
    expand_J,
    expand_spec,
    load_catalog,
    parse_catalog,
)
from oracles import delta_direct, euler_direct, j_direct, sigma3


def doc(*entries, trunc=10):
    return json.dumps({"trunc": trunc, "entries": list(entries)})


def test_euler_product_matches_factor_by_factor_oracle():
    e = euler_product(30)
    oracle = euler_direct(31)
    for n in range(31):
        assert e.coefficient(n) == oracle[n]


def test_eta_leading_exponent():
    eta = expand_eta(1, 5)
    assert eta.leading() == (Fraction(1, 24), 1)
    eta2 = expand_eta(2, 5)
    assert eta2.leading() == (Fraction(1, 12), 1)
    assert eta2.coefficient(Fraction(1, 12) + 2) == -1


def test_delta_matches_repeated_product():
    d = expand_Delta(15)
    oracle = delta_direct(15)
    assert d.coefficient(1) == 1 and d.coefficient(2) == -24 and d.coefficient(3) == 252
    for n in range(1, 16):
        assert d.coefficient(n) == oracle[n - 1]


def test_e4_is_sigma3():
    e = expand_E4(10)
    assert e.coefficient(0) == 1
    for n in range(1, 11):
        assert e.coefficient(n) == 240 * sigma3(n)


def test_j_against_oracle():
    J = expand_J(24)
    oracle = j_direct(24)
    assert J.coefficient(-1) == 1 and J.coefficient(0) == 0
    assert J.coefficient(1) == 196884
    assert J.coefficient(2) == 21493760
    for n in range(-1, 25):
        assert J.coefficient(n) == oracle[n]


def test_j_delta_identity():
    J = expand_J(12)
    E4 = expand_E4(12)
    D = expand_Delta(13)
    assert (J * D) == (E4 * E4 * E4 - D.scale(744)).truncate(12)


@pytest.mark.parametrize(
    "name,values",
    [
        ("2A", {-1: 1, 0: 0, 1: 4372, 2: 96256}),
        ("2B", {-1: 1, 0: 0, 1: 276, 2: -2048}),
        ("3A", {-1: 1, 0: 0, 1: 783, 2: 8672}),
        ("3B", {-1: 1, 0: 0, 1: 54, 2: -76}),
        ("4A", {-1: 1, 0: 0, 1: 276, 2: 2048, 3: 11202}),
    ],
)
def test_shipped_mckay_thompson_values(name, values):
    f = default_catalog().expand(name, 6)
    for n, v in values.items():
        assert f.coefficient(n) == v


def test_1A_is_J():
    assert default_catalog().expand("1A", 10).identical(expand_J(10))


def test_hauptmodul_relation_between_2A_and_2B():
    # with t = T_2B - 24 = eta(tau)^24 / eta(2 tau)^24:  T_2A = t + 24 + 4096 / t
    cat = default_catalog()
    a, b = cat.expand("2A", 10), cat.expand("2B", 11)
    t = b - 24
    assert a == (t + 24 + t.inverse().scale(4096)).truncate(10)


def test_empty_entry_is_zero():
    cat = parse_catalog(doc({"name": "Z"}))
    assert cat.expand("Z", 5).is_zero()


def test_extra_references_and_constants():
    cat = parse_catalog(
        doc(
            {"name": "A", "eta": [[1, -24]], "leading": "-1"},
            {"name": "B", "constant": "7", "extra": [["2", "A"], ["-1", "A"]]},
        )
    )
    B = cat.expand("B", 4)
    A = cat.expand("A", 4)
    assert B.identical(A + 7)


def test_syntax_error_reports_position():
    with pytest.raises(CatalogSyntaxError) as info:
        parse_catalog('{"entries": [\n  {"name": "X",}\n]}')
    assert info.value.details["line"] == 2


@pytest.mark.parametrize(
    "entries,error",
    [
        ([{"name": "A"}, {"name": "A"}], CatalogError),
        ([{"name": "A", "extra": [["1", "B"]]}], CatalogError),
        ([{"name": "A", "eta": [[0, 1]]}], CatalogError),
        ([{"name": "A", "eta": [[1, 24]], "leading": "-1"}], CatalogError),
        ([{"name": "A", "colour": "red"}], CatalogError),
        ([{"name": "A", "extra": [["1", "B"]]}, {"name": "B", "extra": [["1", "A"]]}], CycleError),
    ],
)
def test_rejected_catalogs(entries, error):
    with pytest.raises(error):
        parse_catalog(doc(*entries))


def test_unknown_name_on_expand():
    with pytest.raises(UnknownNameError):
        expand_spec(parse_catalog(doc({"name": "A"})), "B", 4)


def test_builtins_available_without_entries():
    cat = parse_catalog(doc({"name": "A"}))
    assert cat.expand("Delta", 3).coefficient(2) == -24


def test_load_catalog_from_disk(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(doc({"name": "K", "constant": "3"}))
    assert load_catalog(path).expand("K", 2) == 3


def test_fractional_exponents_for_eta_products():
    cat = parse_catalog(doc({"name": "E", "eta": [[1, 1]]}))
    e = cat.expand("E", 3)
    assert e.leading() == (Fraction(1, 24), 1)
    assert e.coefficient(Fraction(25, 24)) == -1
