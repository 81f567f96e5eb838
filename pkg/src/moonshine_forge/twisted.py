"""Trace families f_{k,l,m}, equivariant Hecke operators and the twisted denominator checks.

A :class:`TraceFamily` at level N stores Tr(h^m | V^{k,r}_n) keyed by
``(k mod N, j, e, m mod order)`` with r = j/N and n = e/N (scaled integers).
Slots inside the known range that are absent from the table are zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from pathlib import Path

from .errors import FamilyError, MissingSlotError, TruncationError
from .exact import CycNumber, clean, divisors, format_scalar, parse_scalar, zeta
from .fricke import FrickeAlgebra
from .qseries import BiSeries, PSeries, bivariate_difference
from .replicate import ReplicableFamily, _monic_verdict

__all__ = [
    "TraceFamily",
    "f_series",
    "equivariant_hecke",
    "hecke_component",
    "corollary_check",
    "theorem_check",
    "hecke_monic_report",
    "from_mckay_thompson",
    "from_replicable",
    "from_fricke",
    "load_trace_family",
    "dump_trace_family",
]


@dataclass
class TraceFamily:
    level: int
    order: int
    vtable: dict
    tops: dict
    zetaH: object = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.level < 1 or self.order < 1:
            raise FamilyError("level and order must be positive")
        N = self.level
        self.vtable = {
            (k % N, j % N, e, m % self.order): clean(v) for (k, j, e, m), v in self.vtable.items() if v != 0
        }
        self.tops = {k % N: t for k, t in self.tops.items()}
        if self.zetaH is None:
            self.zetaH = self.value(1, -1, -1, 1)
        for (k, j, e, m), v in self.vtable.items():
            if m == 0 and (isinstance(v, CycNumber) or v != int(v) or v < 0):
                raise FamilyError(f"dimension slot (k={k}, r={j}/{N}, n={e}/{N}) holds {v}, not a non-negative integer")

    def top(self, k: int):
        return self.tops.get(k % self.level)

    def value(self, k: int, j: int, e: int, m: int):
        """Tr(h^m | V^{k, j/N}_{e/N})."""
        top = self.top(k)
        if top is not None and e > top:
            raise MissingSlotError(
                f"slot (k={k % self.level}, r={j % self.level}/{self.level}, n={e}/{self.level}) is beyond the table",
                slot=(k, j, e, m),
            )
        return self.vtable.get((k % self.level, j % self.level, e, m % self.order), 0)

    def root_trace(self, s: int, a: int, b: int):
        """Tr(h^s | g_{a,b}) through the q-compatible identification of root spaces."""
        return self.value(a, b, a * b, s)

    def with_value(self, slot, value) -> "TraceFamily":
        vt = dict(self.vtable)
        N = self.level
        k, j, e, m = slot
        vt[(k % N, j % N, e, m % self.order)] = value
        return TraceFamily(self.level, self.order, vt, dict(self.tops), self.zetaH)


def f_series(fam: TraceFamily, k: int, l: int, m: int, trunc=None) -> PSeries:
    """f_{k,l,m}(q) = sum_n sum_{r: kr - n in Z} e^(2 pi i l r) Tr(h^m | V^{k,r}_n) q^n."""
    N = fam.level
    top = fam.top(k)
    if trunc is not None:
        want = floor(Fraction(trunc) * N)
        if top is not None and want > top:
            raise TruncationError(
                f"f_{{{k},{l},{m}}} is known to q^{Fraction(top, N)}, asked for q^{Fraction(trunc)}"
            )
        top = want
    if top is None:
        raise TruncationError("family has no bound; pass trunc")
    key = (k % N, l % N, m % fam.order, top)
    hit = fam._cache.get(key)
    if hit is not None:
        return hit
    terms: dict = {}
    kk, mm = k % N, m % fam.order
    for (k2, j, e, m2), v in fam.vtable.items():
        if k2 != kk or m2 != mm or e > top:
            continue
        if (kk * j - e) % N:
            continue
        c = v if (l * j) % N == 0 else v * zeta(N, l * j)
        terms[e] = clean(terms.get(e, 0) + c)
    out = PSeries._raw(N, {e: c for e, c in terms.items() if c != 0}, top)
    fam._cache[key] = out
    return out


def hecke_component(fam: TraceFamily, a: int, d: int, k: int, l: int, m: int) -> PSeries:
    """sum_{0<=b<d} f_{dk, al-bk, am}(e^(2 pi i b/d) q^(a/d))."""
    total = None
    for b in range(d):
        f = f_series(fam, d * k, a * l - b * k, a * m)
        term = f.substitute_angle(Fraction(b, d), a, d)
        total = term if total is None else total + term
    return total.simplified()


def equivariant_hecke(fam: TraceFamily, n: int, k: int, l: int, m: int, trunc=None) -> PSeries:
    """T^_n f_{k,l,m} = (1/n) sum_{ad=n, 0<=b<d} f_{dk, al-bk, am}(e^(2 pi i b/d) q^(a/d))."""
    total = None
    for a in divisors(n):
        part = hecke_component(fam, a, n // a, k, l, m)
        total = part if total is None else total + part
    total = total.scale(Fraction(1, n))
    if trunc is not None:
        if total.top is not None and Fraction(trunc) > total.trunc:
            raise TruncationError(f"T^_{n} f is known to q^{total.trunc}, asked for q^{Fraction(trunc)}")
        total = total.truncate(trunc)
    return total.simplified().reduced()


# ---------------------------------------------------------------------------
# identity checks


def _compare_rows(lhs: BiSeries, rhs: BiSeries, D: int, N: int):
    """First mismatch over p^M q^x with M + N x <= D, M >= 1."""
    for M in range(1, D + 1):
        limit = Fraction(D - M, N)
        lrow, rrow = lhs.row(M), rhs.row(M)
        for side, row in (("left", lrow), ("right", rrow)):
            if row.top is not None and row.trunc < limit:
                raise TruncationError(
                    f"{side} side row p^{M} is known to q^{row.trunc}; total degree {D} needs q^{limit}",
                    row=M,
                )
        diff = (lrow - rrow).truncate(limit)
        if not diff.is_zero():
            x, _ = diff.items()[0]
            return {"p": M, "q": x, "lhs": lrow.coefficient(x), "rhs": rrow.coefficient(x)}
    return None


def _report(D, mismatch, **extra):
    out = {"verdict": mismatch is None, "degree": D, "first_mismatch": mismatch}
    out.update(extra)
    return out


def corollary_check(fam: TraceFamily, trunc: int, traces=None) -> dict:
    """log((f_h(z p) - f_h(q)) / ((z p)^-1 - q^-1)) = -sum (1/k) Tr(h^k | g_{m,n}) p^{km} q^{kn}.

    ``traces(k, m, n)`` overrides the root-space traces read from the family.
    """
    D = trunc
    z = fam.zetaH
    tr = traces if traces is not None else fam.root_trace
    # f_{1} := z f_h = sum_n Tr(h | g_{1,n}) q^n
    f1 = PSeries({n: tr(1, 1, n) for n in range(-1, D)}, trunc=D - 1)
    raw = bivariate_difference(f1, p_root=z)
    lhs = (raw - 1).log1p(ptrunc=D)
    real = BiSeries({1: PSeries({-1: clean(-z)})}, None).log1p(ptrunc=D)
    lhs = lhs - real
    rows: dict = {}
    for m in range(1, D + 1):
        for n in range(1, D - m + 1):
            k = 1
            while k * (m + n) <= D:
                t = tr(k, m, n)
                if t != 0:
                    r = rows.setdefault(k * m, {})
                    r[k * n] = clean(r.get(k * n, 0) - t * Fraction(1, k))
                k += 1
    rhs = BiSeries({M: PSeries(r, trunc=D - M) for M, r in rows.items()}, D)
    for M in range(1, D + 1):
        rhs.rows.setdefault(M, PSeries({}, trunc=D - M))
    return _report(D, _compare_rows(lhs, rhs, D, 1), zetaH=z)


def theorem_check(fam: TraceFamily, trunc: int) -> dict:
    """log(p (f_{1,0,1}(zeta_h p^N) - f_{1,0,1}(q))) = -sum_m p^m T^_m f_{1,0,1}(q).

    The p side reads q^(e/N) -> (zeta_h p)^e, i.e. p^N stands for q.
    """
    D = trunc
    N = fam.level
    f1 = f_series(fam, 1, 0, 1)
    if f1.top is not None and f1.top < D - 1:
        raise TruncationError(f"f_{{1,0,1}} is known to q^{f1.trunc}; total degree {D} needs q^{Fraction(D - 1, N)}")
    f1 = PSeries._raw(N, {e: c for e, c in f1.terms.items() if e <= D - 1}, D - 1)
    raw = bivariate_difference(f1, p_root=fam.zetaH)
    lhs = (raw - 1).log1p(ptrunc=D)
    rows = {}
    for M in range(1, D + 1):
        rows[M] = -equivariant_hecke(fam, M, 1, 0, 1)
    rhs = BiSeries(rows, D)
    return _report(D, _compare_rows(lhs, rhs, D, N), level=N, zetaH=fam.zetaH)


def hecke_monic_report(fam: TraceFamily, maxN: int, trunc=None) -> dict:
    """Faber-fit n T^_n f_{1,0,1} against f_{1,0,1} for n = 1..maxN."""
    f = f_series(fam, 1, 0, 1)
    results = []
    for n in range(1, maxN + 1):
        g = equivariant_hecke(fam, n, 1, 0, 1).scale(n)
        if trunc is not None and g.top is not None:
            g = g.truncate(min(Fraction(trunc), g.trunc))
        results.append(_monic_verdict(g, f, n))
    return {"verdict": all(r["verdict"] for r in results), "level": fam.level, "results": results}


# ---------------------------------------------------------------------------
# constructors


def from_replicable(fam: ReplicableFamily) -> TraceFamily:
    """Level-one family: Tr(h^s | V_n) = a^(s)_n."""
    vt = {}
    for s in range(1, fam.period + 1):
        f = fam.members[s].reduced()
        for e, c in f.terms.items():
            vt[(0, 0, e, s)] = c
    top = min(f.reduced().top for f in fam.members.values() if f.top is not None) if any(
        f.top is not None for f in fam.members.values()
    ) else None
    return TraceFamily(1, fam.period, vt, {0: top})


def from_mckay_thompson(catalog, names, depth: int = 40) -> TraceFamily:
    """Level-one family from catalog entries; names[s-1] is the series for h^s."""
    return from_replicable(ReplicableFamily.from_catalog(catalog, names, depth))


def from_fricke(alg: FrickeAlgebra, level: int, order: int = 1, character=None) -> TraceFamily:
    """Family of a level-N q-compatible action on the root spaces of ``alg``.

    ``character(s, a, b)`` is the scalar by which h^s acts on g_{a,b}; the
    default is the trivial group.  The slot (k, j, e) takes its value from any
    root (a, b) with a = k, b = j mod N and ab = e; all such roots inside the
    computed range must agree.
    """
    N = level
    B = alg.bound

    def trace(s, a, b):
        c = alg.c(a, b)
        if c and character is not None:
            return clean(c * character(s, a, b))
        return c

    vt: dict = {}
    tops: dict = {}
    emax = B * B // 4 + 1
    for k in range(N):
        # real root slot and the (absent) non-positive slots
        if k == 1 % N:
            for s in range(order):
                vt[(k, -1 % N, -1, s)] = trace(s, 1, -1)
        top = emax
        for e in range(1, emax + 1):
            seen: dict = {}
            unknown = set()
            for a in divisors(e):
                if a % N != k:
                    continue
                b = e // a
                j = b % N
                if alg.in_range(a, b):
                    for s in range(order):
                        v = trace(s, a, b)
                        prev = seen.get((j, s))
                        if prev is None:
                            seen[(j, s)] = (v, (a, b))
                        elif prev[0] != v:
                            raise FamilyError(
                                f"roots {prev[1]} and {(a, b)} share a level-{N} class but differ",
                                roots=(prev[1], (a, b)),
                            )
                else:
                    unknown.add(j)
            if any(all((j, s) not in seen for s in range(order)) for j in unknown):
                top = e - 1
                break
            for (j, s), (v, _) in seen.items():
                if v:
                    vt[(k, j, e, s)] = v
        tops[k] = top
    return TraceFamily(N, order, vt, tops)


def _parse_grid(text, N: int, what: str) -> int:
    x = Fraction(str(text))
    s = x * N
    if s.denominator != 1:
        raise FamilyError(f"{what} {text} is not on the grid (1/{N})Z")
    return int(s)


def load_trace_family(path_or_doc) -> TraceFamily:
    """Load ``{"level", "order", "zetaH", "bound", "vtable": [{k, r, n, m, value}]}``."""
    if isinstance(path_or_doc, dict):
        doc = path_or_doc
    else:
        try:
            doc = json.loads(Path(path_or_doc).read_text())
        except json.JSONDecodeError as exc:
            raise FamilyError(f"trace family syntax error at line {exc.lineno}, column {exc.colno}") from exc
    try:
        N = int(doc["level"])
        order = int(doc.get("order", 1))
        rows = doc["vtable"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FamilyError("trace family needs 'level' and 'vtable'") from exc
    vt = {}
    for row in rows:
        j = _parse_grid(row.get("r", "0"), N, "r")
        e = _parse_grid(row["n"], N, "n")
        vt[(int(row["k"]), j, e, int(row.get("m", 1)))] = parse_scalar(str(row["value"]))
    if "bound" in doc:
        top = _parse_grid(doc["bound"], N, "bound")
        tops = {k: top for k in range(N)}
    else:
        tops = {}
        for k, _, e, _ in vt:
            tops[k % N] = max(tops.get(k % N, e), e)
    z = parse_scalar(str(doc["zetaH"])) if "zetaH" in doc else None
    return TraceFamily(N, order, vt, tops, z)


def dump_trace_family(fam: TraceFamily) -> dict:
    N = fam.level
    rows = [
        {"k": k, "r": str(Fraction(j, N)), "n": str(Fraction(e, N)), "m": m, "value": format_scalar(v)}
        for (k, j, e, m), v in sorted(fam.vtable.items())
    ]
    doc = {"level": N, "order": fam.order, "zetaH": format_scalar(fam.zetaH), "vtable": rows}
    tops = set(fam.tops.values())
    if len(tops) == 1 and None not in tops:
        doc["bound"] = str(Fraction(tops.pop(), N))
    return doc
