"""q-expansions of eta quotients, E4, Delta, J and a small McKay-Thompson catalog."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import floor
from pathlib import Path

from sympy import divisor_sigma

from .errors import CatalogError, CatalogSyntaxError, CycleError, UnknownNameError
from .exact import parse_scalar
from .qseries import PSeries

__all__ = [
    "EtaQuotientSpec",
    "Catalog",
    "BUILTINS",
    "euler_product",
    "expand_eta",
    "expand_E4",
    "expand_Delta",
    "expand_J",
    "expand_spec",
    "parse_catalog",
    "load_catalog",
    "default_catalog",
]

BUILTINS = ("E4", "Delta", "J")


@lru_cache(maxsize=None)
def _euler_coeffs(degree: int) -> tuple:
    """Coefficients of prod_{n>=1} (1 - q^n) up to q^degree (pentagonal numbers)."""
    out = [0] * (degree + 1)
    out[0] = 1
    k = 1
    while True:
        sign = -1 if k % 2 else 1
        g1, g2 = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
        if g1 > degree:
            break
        out[g1] += sign
        if g2 <= degree:
            out[g2] += sign
        k += 1
    return tuple(out)


def euler_product(degree: int, t: int = 1) -> PSeries:
    """prod_{n>=1} (1 - q^(t n)), known through q^degree."""
    base = _euler_coeffs(degree // t)
    return PSeries({t * i: c for i, c in enumerate(base) if c}, trunc=degree)


def expand_eta(t: int, trunc) -> PSeries:
    """eta(t tau) = q^(t/24) prod (1 - q^(t n)) on the grid (1/24)Z, exact to ``trunc``."""
    if t < 1:
        raise ValueError("eta scale must be positive")
    trunc = Fraction(trunc)
    lead = Fraction(t, 24)
    depth = floor(trunc - lead)
    if depth < 0:
        return PSeries({}, trunc=trunc, denom=24)
    prod = euler_product(depth, t)
    return PSeries({lead + e: c for e, c in prod.items()}, trunc=trunc, denom=24)


def _eta_quotient(factors, trunc) -> PSeries:
    """prod eta(t tau)^r, exact to ``trunc``, on the coarsest grid it needs."""
    trunc = Fraction(trunc)
    lead = sum((Fraction(r * t, 24) for t, r in factors), Fraction(0))
    depth = floor(trunc - lead)
    if depth < 0:
        return PSeries({}, trunc=trunc)
    prod = PSeries({0: 1})
    for t, r in factors:
        if r:
            prod = prod * euler_product(depth, t).power(r)
    prod = prod.truncate(depth)
    return PSeries({lead + e: c for e, c in prod.items()}, trunc=trunc)


def expand_E4(trunc: int) -> PSeries:
    return PSeries({0: 1, **{n: 240 * int(divisor_sigma(n, 3)) for n in range(1, trunc + 1)}}, trunc=trunc)


def expand_Delta(trunc: int) -> PSeries:
    """Delta = eta^24 = q prod (1 - q^n)^24."""
    return _eta_quotient([(1, 24)], trunc)


def expand_J(trunc: int) -> PSeries:
    """J = E4^3 / Delta - 744 = q^-1 + 196884 q + ..."""
    e4 = expand_E4(trunc + 1)
    delta = expand_Delta(trunc + 2)
    return (e4 * e4 * e4 * delta.inverse()) - 744


@dataclass(frozen=True)
class EtaQuotientSpec:
    """prod eta(t tau)^r + constant + sum coeff * (other entry), or a builtin."""

    name: str
    factors: tuple = ()
    addConstant: Fraction = Fraction(0)
    extra: tuple = ()
    normalization: Fraction | None = None
    builtin: str | None = None

    @property
    def leading_exponent(self) -> Fraction:
        return sum((Fraction(r * t, 24) for t, r in self.factors), Fraction(0))


@dataclass
class Catalog:
    entries: dict = field(default_factory=dict)
    defaultTrunc: int = 20

    def __contains__(self, name):
        return name in self.entries

    def __len__(self):
        return len(self.entries)

    def names(self):
        return list(self.entries)

    def expand(self, name: str, trunc=None) -> PSeries:
        return expand_spec(self, name, self.defaultTrunc if trunc is None else trunc)


def expand_spec(catalog: Catalog, name: str, trunc) -> PSeries:
    """Expand catalog entry ``name`` exactly to ``trunc``."""
    return _expand(catalog, name, Fraction(trunc), ())


def _expand(catalog: Catalog, name: str, trunc: Fraction, stack: tuple) -> PSeries:
    if name in stack:
        raise CycleError(f"reference cycle through {' -> '.join(stack + (name,))}", entry=name)
    spec = catalog.entries.get(name)
    if spec is None:
        if name in BUILTINS and not stack:
            spec = EtaQuotientSpec(name, builtin=name)
        else:
            raise UnknownNameError(f"unknown catalog name {name!r}", entry=name)
    if spec.builtin is not None:
        t = floor(trunc)
        if spec.builtin == "E4":
            return expand_E4(t)
        if spec.builtin == "Delta":
            return expand_Delta(t)
        return expand_J(t)
    total = PSeries({}, trunc=trunc)
    if spec.factors:
        total = total + _eta_quotient(spec.factors, trunc)
    total = total + spec.addConstant
    for coeff, other in spec.extra:
        total = total + _expand(catalog, other, trunc, stack + (name,)).scale(coeff)
    return total.reduced()


# ---------------------------------------------------------------------------
# catalog documents


def _rational(value, where: str) -> Fraction:
    try:
        if isinstance(value, (int, str)) and not isinstance(value, bool):
            return Fraction(value)
    except (ValueError, ZeroDivisionError):
        pass
    raise CatalogError(f"{where}: expected a rational, got {value!r}")


def _parse_entry(raw, index: int) -> EtaQuotientSpec:
    if not isinstance(raw, dict) or not isinstance(raw.get("name"), str):
        raise CatalogError(f"entry #{index}: missing string field 'name'")
    name = raw["name"]
    unknown = set(raw) - {"name", "eta", "constant", "extra", "leading", "builtin"}
    if unknown:
        raise CatalogError(f"entry {name!r}: unknown fields {sorted(unknown)}", entry=name)
    builtin = raw.get("builtin")
    if builtin is not None and builtin not in BUILTINS:
        raise CatalogError(f"entry {name!r}: unknown builtin {builtin!r}", entry=name)
    factors = []
    for pair in raw.get("eta", []):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)
            or pair[0] < 1
        ):
            raise CatalogError(f"entry {name!r}: eta factor {pair!r} must be [t >= 1, r]", entry=name)
        factors.append((pair[0], pair[1]))
    extra = []
    for item in raw.get("extra", []):
        if not isinstance(item, list) or len(item) != 2 or not isinstance(item[1], str):
            raise CatalogError(f"entry {name!r}: extra item {item!r} must be [coeff, name]", entry=name)
        try:
            coeff = parse_scalar(str(item[0]))
        except (ValueError, ZeroDivisionError) as exc:
            raise CatalogError(f"entry {name!r}: bad coefficient {item[0]!r}", entry=name) from exc
        extra.append((coeff, item[1]))
    constant = _rational(raw.get("constant", "0"), f"entry {name!r} constant")
    leading = raw.get("leading")
    spec = EtaQuotientSpec(
        name=name,
        factors=tuple(factors),
        addConstant=constant,
        extra=tuple(extra),
        normalization=None if leading is None else _rational(leading, f"entry {name!r} leading"),
        builtin=builtin,
    )
    if spec.normalization is not None and factors and spec.leading_exponent != spec.normalization:
        raise CatalogError(
            f"entry {name!r}: eta factors give leading exponent {spec.leading_exponent}, "
            f"declared {spec.normalization}",
            entry=name,
        )
    return spec


def parse_catalog(text: bytes | str) -> Catalog:
    """Parse and validate a catalog JSON document."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CatalogSyntaxError(f"catalog is not UTF-8 (byte {exc.start})", position=exc.start) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogSyntaxError(
            f"catalog syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise CatalogError("catalog must be an object with an 'entries' array")
    trunc = doc.get("trunc", 20)
    if not isinstance(trunc, int) or trunc < 1:
        raise CatalogError("catalog 'trunc' must be a positive integer")
    entries: dict = {}
    for i, raw in enumerate(doc["entries"]):
        spec = _parse_entry(raw, i)
        if spec.name in entries:
            raise CatalogError(f"duplicate entry {spec.name!r}", entry=spec.name)
        entries[spec.name] = spec
    for spec in entries.values():
        for _, ref in spec.extra:
            if ref not in entries:
                raise CatalogError(f"entry {spec.name!r} references undefined name {ref!r}", entry=spec.name)
    _check_acyclic(entries)
    return Catalog(entries, trunc)


def _check_acyclic(entries: dict) -> None:
    state: dict = {}

    def visit(name, path):
        if state.get(name) == "done":
            return
        if state.get(name) == "open":
            raise CycleError(f"reference cycle through {' -> '.join(path + [name])}", entry=name)
        state[name] = "open"
        for _, ref in entries[name].extra:
            visit(ref, path + [name])
        state[name] = "done"

    for name in entries:
        visit(name, [])


def load_catalog(path) -> Catalog:
    return parse_catalog(Path(path).read_bytes())


def default_catalog() -> Catalog:
    """The catalog shipped with the package."""
    data = resources.files("moonshine_forge").joinpath("data/catalog.json").read_bytes()
    return parse_catalog(data)
