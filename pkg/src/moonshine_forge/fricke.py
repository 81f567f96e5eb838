"""Root multiplicities of a Fricke Lie algebra from its simple-root series, and related tables.

Roots live on the integer grid (m, n) with norm (m, n)^2 = -2mn.  The real
simple root sits at (1, -1), the imaginary simple roots at (1, n), n >= 1,
with multiplicity a_n.  All tables are truncated by total degree m + n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod

from .errors import NegativityError, NonIntegralityError, NormalizationError, TruncationError
from .exact import divisors, mobius
from .qseries import BiSeries, PSeries, bivariate_difference

__all__ = [
    "FrickeAlgebra",
    "VPlusTable",
    "root_multiplicities",
    "product_expansion",
    "denominator_verify",
    "vplus_dims",
    "cartan_block",
    "compat_predicate",
    "witness",
    "witness_exceptional_set",
    "ogg_primes",
    "MONSTER_ORDER",
    "diagram_automorphism_ranks",
]

OGG_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 41, 47, 59, 71)

MONSTER_ORDER = (
    2**46 * 3**20 * 5**9 * 7**6 * 11**2 * 13**3 * 17 * 19 * 23 * 29 * 31 * 41 * 47 * 59 * 71
)


@dataclass
class FrickeAlgebra:
    """Multiplicities c(m, n) for 1 <= m <= bound and m + n <= bound."""

    f: PSeries
    level: int
    mult: dict
    bound: int
    overrides: dict = field(default_factory=dict)

    def in_range(self, m: int, n: int) -> bool:
        return 1 <= m <= self.bound and m + n <= self.bound

    def c(self, m: int, n: int) -> int:
        if not self.in_range(m, n):
            raise TruncationError(f"c({m},{n}) lies outside total degree {self.bound}")
        return self.mult.get((m, n), 0)

    __call__ = c

    def roots(self):
        """Positive roots with nonzero multiplicity, ordered by (m, n)."""
        return sorted(k for k, v in self.mult.items() if v)

    def simple_multiplicity(self, n: int) -> int:
        return self.c(1, n)

    def with_override(self, changes: dict) -> "FrickeAlgebra":
        """Copy with some multiplicities replaced (defect injection, external tables)."""
        mult = dict(self.mult)
        for (m, n), v in changes.items():
            mult[(m, n)] = v
        return FrickeAlgebra(self.f, self.level, mult, self.bound, dict(changes))


@dataclass
class VPlusTable:
    dims: dict
    bound: int

    def __getitem__(self, mn):
        return self.dims[mn]


def _depth(f: PSeries):
    f = f.reduced()
    return None if f.top is None else f.top


def root_multiplicities(f: PSeries, bound: int | None = None, level: int = 1) -> FrickeAlgebra:
    """Invert p(f(p) - f(q)) = prod (1 - p^m q^n)^c(m,n) through log and Moebius summation.

    With f known through a_T, every c(m, n) with m + n <= T + 1 is exact, which
    is the default bound.
    """
    g = f.reduced()
    if g.denom != 1:
        raise NormalizationError("simple-root series must have integer exponents")
    if min(g.terms, default=0) != -1 or g.terms[-1] != 1:
        raise NormalizationError("simple-root series must start with q^-1 (one real simple root)")
    if g.terms.get(0, 0) != 0:
        raise NormalizationError("norm-zero simple roots are not allowed (constant term must vanish)")
    for e, c in g.items():
        if not isinstance(c, int):
            raise NonIntegralityError(f"simple-root multiplicity a_{e} = {c} is not an integer", root=(1, int(e)))
        if c < 0:
            raise NegativityError(f"simple-root multiplicity a_{e} = {c} is negative", root=(1, int(e)))
    T = _depth(g)
    if T is None:
        if bound is None:
            raise NormalizationError("an explicit bound is required for an exact series")
        T = bound - 1
    if bound is None:
        bound = T + 1
    if bound > T + 1:
        raise TruncationError(f"bound {bound} needs coefficients through a_{bound - 1}; known through a_{T}")
    D = bivariate_difference(g.truncate(bound - 1))
    L = (D - 1).log1p(ptrunc=bound)
    B = {}
    for M in range(1, bound + 1):
        row = L.row(M)
        for e, c in row.items():
            n = int(e)
            if M + n <= bound and c != 0:
                B[(M, n)] = -c
    mult = {}
    for M in range(1, bound + 1):
        for n in range(-M, bound - M + 1):
            total = Fraction(0)
            for d in divisors(gcd(M, abs(n))):
                mu = mobius(d)
                if mu:
                    total += Fraction(mu, d) * B.get((M // d, n // d), 0)
            if total.denominator != 1:
                raise NonIntegralityError(f"c({M},{n}) = {total} is not an integer", root=(M, n), value=str(total))
            if total < 0:
                raise NegativityError(f"c({M},{n}) = {total} is negative", root=(M, n), value=int(total))
            if total:
                mult[(M, n)] = int(total)
    return FrickeAlgebra(g, level, mult, bound)


def product_expansion(alg: FrickeAlgebra, degree: int | None = None, include_real: bool = False) -> BiSeries:
    """prod (1 - p^m q^n)^c(m,n) over the stored roots, exact for total degree <= degree.

    Without the real root the product runs over m, n >= 1.  Computed as
    exp(-sum c(m,n) sum_k p^(km) q^(kn) / k); row m is exact for q-degree <= degree - m.
    """
    D = alg.bound if degree is None else degree
    if D > alg.bound:
        raise TruncationError(f"degree {D} exceeds the multiplicity bound {alg.bound}")
    rows: dict = {}
    for (m, n), c in alg.mult.items():
        if not c or n < 1:
            continue
        k = 1
        while k * (m + n) <= D:
            rows.setdefault(k * m, {})
            key = k * n
            rows[k * m][key] = rows[k * m].get(key, 0) - Fraction(c, k)
            k += 1
    log_rows = {m: PSeries(r, trunc=D - m) for m, r in rows.items() if m < D}
    for m in range(1, D):
        log_rows.setdefault(m, PSeries({}, trunc=D - m))
    result = BiSeries(log_rows, D - 1).exp()
    if include_real:
        result = result * BiSeries({0: PSeries({0: 1}), 1: PSeries({-1: -alg.c(1, -1)})})
    return result


def _telescoped(alg: FrickeAlgebra, D: int) -> BiSeries:
    """1 - sum_{m+n <= D} r_{m,n} p^m q^n with r_{m,n} = c(1, m+n-1)."""
    rows = {0: PSeries({0: 1})}
    for m in range(1, D):
        rows[m] = PSeries({n: -alg.c(1, m + n - 1) for n in range(1, D - m + 1)}, trunc=D - m)
    return BiSeries(rows, D - 1)


def denominator_verify(alg: FrickeAlgebra, degree: int | None = None) -> dict:
    """Check prod_{m,n>=1} (1 - p^m q^n)^c(m,n) = 1 - sum r_{m,n} p^m q^n to total degree."""
    D = alg.bound if degree is None else degree
    lhs = product_expansion(alg, D)
    rhs = _telescoped(alg, D)
    diff = lhs.first_difference(rhs)
    report = {"verdict": diff is None, "degree": D, "first_mismatch": None}
    if diff is not None:
        (m, n), a, b = diff
        report["first_mismatch"] = {"p": m, "q": int(n), "lhs": a, "rhs": b}
    return report


def vplus_dims(alg: FrickeAlgebra) -> VPlusTable:
    dims = {}
    for m in range(1, alg.bound):
        for n in range(1, alg.bound - m + 1):
            dims[(m, n)] = alg.c(1, m + n - 1) * alg.c(1, -1) ** (m - 1)
    return VPlusTable(dims, alg.bound)


def cartan_block(alg: FrickeAlgebra, maxn: int) -> dict:
    """Block form of the Cartan matrix over the simple roots (1, -1), (1, 1), ..., (1, maxn)."""
    labels = [(1, -1)] + [(1, n) for n in range(1, maxn + 1)]
    sizes = [alg.c(*lab) for lab in labels]

    def entry(i, j):
        if i == j == -1:
            return 2
        return -(i + j)

    entries = [[entry(a[1], b[1]) for b in labels] for a in labels]
    return {"labels": labels, "sizes": sizes, "entries": entries}


def compat_predicate(alg: FrickeAlgebra, N: int) -> dict:
    """c(a, b) must agree across roots with equal a b and equal residues of a, b mod N."""
    classes: dict = {}
    pts = [(m, n) for m in range(1, alg.bound + 1) for n in range(-1, alg.bound - m + 1)]
    pts.sort(key=lambda mn: (mn[0] * mn[1], mn[0], mn[1]))
    for m, n in pts:
        key = (m * n, m % N, n % N)
        v = alg.c(m, n)
        if key not in classes:
            classes[key] = ((m, n), v)
            continue
        first, fv = classes[key]
        if fv != v:
            return {
                "verdict": False,
                "level": N,
                "bound": alg.bound,
                "witness": (first, (m, n)),
                "values": (fv, v),
            }
    return {"verdict": True, "level": N, "bound": alg.bound, "witness": None}


def witness(n: int):
    """Lexicographically smallest (a, b, c, d) with ab = cd, a + b = n + 1, c + d < n + 1."""
    for a in range(1, n + 1):
        b = n + 1 - a
        P = a * b
        for c in divisors(P):
            d = P // c
            if c + d < n + 1:
                return (a, b, c, d)
    return None


def witness_exceptional_set(bound: int) -> set:
    return {n for n in range(1, bound + 1) if witness(n) is None}


def ogg_primes() -> list:
    return list(OGG_PRIMES)


def ogg_product() -> int:
    return prod(OGG_PRIMES)


def diagram_automorphism_ranks(alg: FrickeAlgebra, maxn: int | None = None) -> list:
    """[c(1,-1), c(1,1), c(1,2), ...]: the GL ranks of the homogeneous diagram automorphisms."""
    if maxn is None:
        known = [n for (m, n), v in alg.mult.items() if m == 1 and n >= 1 and v]
        maxn = max(known, default=0)
    return [alg.c(1, -1)] + [alg.c(1, n) for n in range(1, maxn + 1)]
