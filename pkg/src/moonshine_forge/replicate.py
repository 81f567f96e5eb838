"""Grunsky matrices, replicability, Faber fitting, Hecke-monicity and seed extension."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd
from pathlib import Path

from .errors import (
    FamilyError,
    InconsistentError,
    NormalizationError,
    TruncationError,
    UnderDeterminedError,
)
from .exact import CycNumber, clean, divisors, root_angle
from .qseries import PSeries, biseries_from_f, parse_series

__all__ = [
    "GrunskyMatrix",
    "ReplicableFamily",
    "grunsky",
    "is_replicable",
    "faber_fit",
    "hecke_classical",
    "is_hecke_monic",
    "extend_family",
    "classify_degenerate",
    "load_family",
    "shipped_family",
    "TRIGONOMETRIC",
    "NONDEGENERATE",
]

TRIGONOMETRIC = "trigonometric_type"
NONDEGENERATE = "candidate_nondegenerate"


class GrunskyMatrix:
    """H_{m,n} for m, n >= 1 and m + n <= bound."""

    def __init__(self, entries: dict, bound: int):
        self.entries = entries
        self.bound = bound

    def __getitem__(self, mn):
        m, n = mn
        if m < 1 or n < 1 or m + n > self.bound:
            raise TruncationError(f"H_{{{m},{n}}} is outside the computed range m + n <= {self.bound}")
        return self.entries.get((m, n), 0)

    def __contains__(self, mn):
        m, n = mn
        return m >= 1 and n >= 1 and m + n <= self.bound

    def pairs(self):
        return [(m, s - m) for s in range(2, self.bound + 1) for m in range(1, s)]

    def to_dict(self):
        return {(m, n): self[m, n] for m, n in self.pairs()}


def _depth(f: PSeries) -> int:
    f = f.reduced()
    if f.top is None:
        return max(f.terms, default=0)
    return f.top


def grunsky(f: PSeries, bound: int) -> GrunskyMatrix:
    """H_{m,n} from -log((f(p) - f(q)) / (p^-1 - q^-1)) = sum H_{m,n} p^m q^n."""
    if bound < 2:
        return GrunskyMatrix({}, bound)
    if f.top is not None and _depth(f) < bound - 1:
        raise TruncationError(f"Grunsky bound {bound} needs coefficients through a_{bound - 1}")
    X = biseries_from_f(f, depth=bound - 1)
    L = (X - 1).log1p()
    entries = {}
    for m in range(1, bound):
        row = L.row(m)
        for n in range(1, bound - m + 1):
            c = row.coefficient(n)
            if c != 0:
                entries[(m, n)] = clean(-c)
    return GrunskyMatrix(entries, bound)


def is_replicable(f: PSeries, bound: int) -> dict:
    """Check that H_{m,n} depends only on gcd(m, n) and m n for m + n <= bound."""
    H = grunsky(f, bound)
    seen: dict = {}
    for m, n in sorted(H.pairs(), key=lambda p: (p[0] * p[1], p[0] + p[1], p[0])):
        if m > n:
            continue
        key = (gcd(m, n), m * n)
        if key not in seen:
            seen[key] = (m, n)
            continue
        first = seen[key]
        if H[first] != H[m, n]:
            return {
                "verdict": False,
                "bound": bound,
                "violation": {"first": first, "second": (m, n), "values": (H[first], H[m, n])},
            }
    return {"verdict": True, "bound": bound, "violation": None}


def faber_fit(g: PSeries, f: PSeries, scaled: bool = False):
    """Fit g = P(f) + remainder with deg P = n where g ~ q^(-n v) and f ~ c q^(-v).

    Returns (poly, remainder) with poly listed from the constant term up.  The
    principal part is eliminated from the top power of f down, so the
    remainder carries whatever cannot be matched, including stray principal terms.
    """
    a, b = g._align(f)
    if not b.terms or min(b.terms) >= 0:
        raise NormalizationError("fitting series must have a pole")
    v = -min(b.terms)
    cf = b.terms[-v]
    if not a.terms:
        return [0], a
    w = -min(a.terms)
    if w < 0:
        return [0], a
    if w % v:
        raise NormalizationError(f"leading exponent of g is not a multiple of f's pole order")
    n = w // v
    lead = a.terms[-w]
    expected = cf**n if isinstance(cf, CycNumber) else Fraction(cf) ** n
    if lead != expected and not scaled:
        raise NormalizationError(f"g has leading coefficient {lead}, not {expected}: not monic-fittable")
    powers = [PSeries({0: 1})]
    for _ in range(n):
        powers.append(powers[-1] * b)
    poly = [0] * (n + 1)
    rem = a
    for i in range(n, -1, -1):
        e = -i * v
        if rem.top is not None and e > rem.top:
            break
        c = rem.terms.get(e, 0)
        if c == 0:
            continue
        lc = powers[i].terms[-i * v] if i else 1
        coeff = clean(c * (1 / Fraction(lc) if not isinstance(lc, CycNumber) else lc.inverse()))
        poly[i] = coeff
        rem = rem - powers[i].scale(coeff)
    return poly, rem


def _inverse_scalar(x):
    return x.inverse() if isinstance(x, CycNumber) else 1 / Fraction(x)


@dataclass
class ReplicableFamily:
    """Replicates f^(s), stored for s = 1..period; f^(s) for other s via reduction mod period."""

    members: dict
    period: int = 1
    seedDepth: int | None = None
    names: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.period < 1:
            raise FamilyError("period must be positive")
        missing = [s for s in range(1, self.period + 1) if s not in self.members]
        if missing:
            raise FamilyError(f"family lacks replicates {missing}", missing=missing)
        for s, f in self.members.items():
            try:
                _check_shape(f)
            except NormalizationError as exc:
                raise FamilyError(f"replicate {s}: {exc}") from exc

    def reduce(self, s: int) -> int:
        return (s - 1) % self.period + 1

    def member(self, s: int) -> PSeries:
        return self.members[self.reduce(s)]

    @property
    def principal(self) -> PSeries:
        return self.members[1]

    def depth(self) -> int:
        return min(_depth(f) for f in self.members.values())

    def truncated(self, depth: int) -> "ReplicableFamily":
        return ReplicableFamily(
            {s: f.truncate(depth) for s, f in self.members.items()}, self.period, depth, dict(self.names)
        )

    @classmethod
    def from_catalog(cls, catalog, names, depth: int) -> "ReplicableFamily":
        """names[s-1] is the catalog entry for the s-th replicate."""
        members = {s: catalog.expand(name, depth) for s, name in enumerate(names, start=1)}
        return cls(members, len(names), None, {s: n for s, n in enumerate(names, start=1)})


def _check_shape(f: PSeries) -> None:
    f = f.reduced()
    if not f.terms or min(f.terms) != -1 or f.terms[-1] != 1 or f.denom != 1:
        raise NormalizationError("replicate must have leading term q^-1")
    if f.terms.get(0, 0) != 0:
        raise NormalizationError("replicate must have zero constant term")


def _member_spec(value, catalog, depth):
    if isinstance(value, list):
        return PSeries.from_list(value, start=-1)
    if isinstance(value, str) and "q^" in value:
        return parse_series(value)
    if catalog is None:
        raise FamilyError(f"member {value!r} names a catalog entry but no catalog was supplied")
    return catalog.expand(value, depth)


def load_family(path_or_doc, catalog=None, depth: int | None = None) -> ReplicableFamily:
    """Load ``{"period": o, "members": {"1": name | series text | [coeffs from q^-1]}, "seedDepth": d}``."""
    if isinstance(path_or_doc, dict):
        doc = path_or_doc
    else:
        try:
            doc = json.loads(Path(path_or_doc).read_text())
        except json.JSONDecodeError as exc:
            raise FamilyError(f"family file syntax error at line {exc.lineno}, column {exc.colno}") from exc
    try:
        period = int(doc.get("period", 1))
        raw = doc["members"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FamilyError("family document needs 'members' and an integer 'period'") from exc
    seed = doc.get("seedDepth")
    d = depth if depth is not None else (seed if seed is not None else (catalog.defaultTrunc if catalog else 20))
    members = {int(s): _member_spec(v, catalog, d) for s, v in raw.items()}
    if seed is not None:
        members = {s: f.truncate(min(seed, _depth(f))) for s, f in members.items()}
    names = {int(s): v for s, v in raw.items() if isinstance(v, str) and "q^" not in v}
    return ReplicableFamily(members, period, seed, names)


def shipped_family(name: str, depth: int = 40) -> ReplicableFamily:
    """Replicate family of a shipped conjugacy class (1A, 2A, 2B, 3A, 3B, 4A)."""
    from importlib import resources

    from .modcatalog import default_catalog

    node = resources.files("moonshine_forge").joinpath(f"data/families/{name}.json")
    if not node.is_file():
        raise FamilyError(f"no shipped family {name!r}")
    return load_family(json.loads(node.read_text()), default_catalog(), depth)


# ---------------------------------------------------------------------------
# Hecke operators at level one


def hecke_classical(fam: ReplicableFamily, n: int, trunc=None) -> PSeries:
    """n T_n f = sum_{ad=n, 0<=b<d} f^(a)(e^(2 pi i b/d) q^(a/d)), exact."""
    total = None
    for a in divisors(n):
        d = n // a
        fa = fam.member(a)
        if trunc is not None and fa.top is not None and Fraction(fa.top, fa.denom) * a / d < trunc:
            raise TruncationError(
                f"replicate {a} is known to q^{fa.trunc}; n T_{n} to q^{trunc} needs q^{Fraction(trunc) * d / a}"
            )
        for b in range(d):
            term = fa.substitute_angle(Fraction(b, d), a, d)
            total = term if total is None else total + term
    limit = total.trunc if trunc is None else (Fraction(trunc) if total.top is None else min(Fraction(trunc), total.trunc))
    if limit is not None:
        total = total.truncate(floor(limit))
    total = total.simplified().reduced()
    if total.denom != 1:
        stray = next(e for e in sorted(total.terms) if e % total.denom)
        raise InconsistentError(
            f"fractional exponent q^{Fraction(stray, total.denom)} survives in {n} T_{n}",
            exponent=str(Fraction(stray, total.denom)),
        )
    return total


def _supported_trunc(fam: ReplicableFamily, n: int):
    best = None
    for a in divisors(n):
        f = fam.member(a)
        if f.top is None:
            continue
        t = Fraction(f.top, f.denom) * a / (n // a)
        best = t if best is None else min(best, t)
    return best


def _monic_verdict(g: PSeries, f: PSeries, n: int) -> dict:
    try:
        poly, rem = faber_fit(g, f)
    except NormalizationError as exc:
        return {"n": n, "verdict": False, "reason": str(exc), "certified": None}
    ok = rem.is_zero() and len(poly) == n + 1 and poly[-1] == 1
    report = {
        "n": n,
        "verdict": ok,
        "degree": len(poly) - 1,
        "poly": poly,
        "certified": rem.trunc,
    }
    if not rem.is_zero():
        e, c = rem.items()[0]
        report["first_remainder"] = (e, c)
    return report


def is_hecke_monic(fam: ReplicableFamily, maxN: int, trunc=None) -> dict:
    """Faber-fit n T_n f against f for n = 1..maxN; remainder must vanish where known."""
    f = fam.principal
    results = []
    for n in range(1, maxN + 1):
        t = _supported_trunc(fam, n)
        if trunc is not None:
            t = Fraction(trunc) if t is None else min(t, Fraction(trunc))
        if t is None:
            t = Fraction(_depth(f))
        g = hecke_classical(fam, n, t)
        results.append(_monic_verdict(g, f, n))
    return {"verdict": all(r["verdict"] for r in results), "results": results}


# ---------------------------------------------------------------------------
# seed extension through the complete-replicability relations
#
#   H^(s)_{n,m} = sum_{k | gcd(n,m)} (1/k) a^(sk)_{nm/k^2}
#
# which is the q^m coefficient of n T_n f^(s) - F_n(f^(s)) = 0.  Each relation
# is affine in any single unknown coefficient it contains.


class _Extender:
    def __init__(self, fam: ReplicableFamily):
        self.fam = fam
        self.period = fam.period
        self.known = {}
        for s, f in fam.members.items():
            f = f.reduced()
            depth = _depth(f)
            self.known[s] = {j: f.terms.get(j, 0) for j in range(1, depth + 1)}
        self.checked = set()
        self._grunsky = {}

    def prefix(self, s: int) -> int:
        k = 0
        while k + 1 in self.known[s]:
            k += 1
        return k

    def series(self, s: int, depth: int) -> PSeries:
        coeffs = {-1: 1}
        coeffs.update({j: self.known[s].get(j, 0) for j in range(1, depth + 1)})
        return PSeries(coeffs, trunc=depth)

    def grunsky_with_zero(self, s: int):
        """Grunsky matrix with a_{K+1} set to 0, K the known prefix of member s."""
        K = self.prefix(s)
        cached = self._grunsky.get(s)
        if cached is not None and cached[0] == K:
            return K, cached[1]
        H = grunsky(self.series(s, K + 1), K + 2)
        self._grunsky[s] = (K, H)
        return K, H

    def relations(self, s: int):
        K, H = self.grunsky_with_zero(s)
        for total in range(4, K + 3):
            for n in range(2, total // 2 + 1):
                m = total - n
                yield s, n, m, K, H

    def evaluate(self, s, n, m, K, H):
        """(residual at unknown = 0, coefficient of the unknown, unknown slot or None, number of unknowns)."""
        unknowns = set()
        coeff: dict = {}
        if n + m == K + 2:
            unknowns.add((s, K + 1))
            coeff[(s, K + 1)] = Fraction(1)
        residual = H[n, m]
        for k in divisors(gcd(n, m)):
            t = self.fam.reduce(s * k)
            idx = n * m // (k * k)
            val = self.known[t].get(idx)
            if val is None:
                unknowns.add((t, idx))
                coeff[(t, idx)] = coeff.get((t, idx), 0) - Fraction(1, k)
            else:
                residual = residual - val * Fraction(1, k)
        slot = next(iter(unknowns)) if len(unknowns) == 1 else None
        return clean(residual), coeff.get(slot, 0), slot, len(unknowns)

    def step(self, target: int):
        best = None
        for s in sorted(self.known):
            for rel in self.relations(s):
                res, c, slot, count = self.evaluate(*rel)
                key = rel[:3]
                if count == 0 or (count == 1 and c == 0):
                    if key not in self.checked:
                        if res != 0:
                            raise InconsistentError(
                                f"relation H^({s})_{{{rel[1]},{rel[2]}}} fails by {res}: seeds are not completely replicable",
                                member=s,
                                n=rel[1],
                                m=rel[2],
                            )
                        if count == 0:
                            self.checked.add(key)
                    continue
                if count != 1:
                    continue
                rank = (slot[1], slot[0], rel[1], rel[2])
                if best is None or rank < best[0]:
                    best = (rank, slot, clean(-res * _inverse_scalar(c)))
        if best is None:
            return False
        _, (t, idx), value = best
        self.known[t][idx] = value
        return True

    def run(self, target: int):
        while any(self.prefix(s) < target for s in self.known):
            if not self.step(target):
                s = min(self.known, key=lambda s: (self.prefix(s), s))
                raise UnderDeterminedError(
                    f"no single-unknown relation pins a^({s})_{self.prefix(s) + 1}",
                    member=s,
                    index=self.prefix(s) + 1,
                )
        # one more pass to test every fully determined relation in range
        for s in sorted(self.known):
            for rel in self.relations(s):
                res, c, slot, count = self.evaluate(*rel)
                if count == 0 and res != 0:
                    raise InconsistentError(
                        f"relation H^({s})_{{{rel[1]},{rel[2]}}} fails by {res}", member=s, n=rel[1], m=rel[2]
                    )


def extend_family(seeds: ReplicableFamily, targetDepth: int) -> ReplicableFamily:
    """Extend every replicate to ``targetDepth`` from the complete-replicability relations.

    Solves greedily, always taking the pending relation with a single unknown of
    lowest index; auxiliary coefficients beyond the target are solved on the way
    when a relation needs them.
    """
    ext = _Extender(seeds)
    ext.run(targetDepth)
    members = {s: ext.series(s, targetDepth) for s in seeds.members}
    return ReplicableFamily(members, seeds.period, seeds.seedDepth, dict(seeds.names))


def classify_degenerate(f: PSeries) -> str:
    """trigonometric_type iff f = a q^(-1/N) + c q^(1/N) with a, c roots of unity (c may be 0)."""
    f = f.reduced()
    if not f.terms:
        return NONDEGENERATE
    lo = min(f.terms)
    if lo >= 0:
        return NONDEGENERATE
    allowed = {lo, -lo}
    if any(e not in allowed for e in f.terms):
        return NONDEGENERATE
    if root_angle(f.terms[lo]) is None:
        return NONDEGENERATE
    c = f.terms.get(-lo, 0)
    if c != 0 and root_angle(c) is None:
        return NONDEGENERATE
    return TRIGONOMETRIC
