"""Truncated exact Laurent/Puiseux series in q, and in two variables (p, q).

A :class:`PSeries` keeps exponents on the grid (1/denom)Z as scaled integers
(exponent * denom).  ``top`` is the largest scaled exponent whose coefficient
is known; anything above it is unknown, *not* zero.  ``top is None`` marks an
exact (finite) series.  Every operation propagates truncation pessimistically,
so a reported coefficient is always exact.

A :class:`BiSeries` is a power series in p whose coefficients are PSeries in
q.  Each p-row carries its own q-window, which is how negative q-powers such
as those in p(f(p) - f(q)) stay exact.
"""

from __future__ import annotations

import contextlib
import re
from fractions import Fraction
from math import floor, gcd

from .errors import ModulusCapError, NormalizationError, SeriesDomainError, TruncationError
from .exact import CycNumber, clean, format_scalar, lcm, parse_scalar, root_angle, zeta

__all__ = [
    "PSeries",
    "BiSeries",
    "get_modulus_cap",
    "set_modulus_cap",
    "modulus_cap",
    "series_mul",
    "series_inverse",
    "series_log1p",
    "series_exp",
    "series_substitute",
    "biseries_from_f",
    "bivariate_difference",
    "format_series",
    "parse_series",
]

_MODULUS_CAP = 360


def get_modulus_cap() -> int:
    return _MODULUS_CAP


def set_modulus_cap(cap: int) -> None:
    global _MODULUS_CAP
    if cap < 1:
        raise ValueError("modulus cap must be positive")
    _MODULUS_CAP = cap


@contextlib.contextmanager
def modulus_cap(cap: int):
    old = get_modulus_cap()
    set_modulus_cap(cap)
    try:
        yield
    finally:
        set_modulus_cap(old)


def _min_top(*tops):
    known = [t for t in tops if t is not None]
    return min(known) if known else None


class PSeries:
    """Truncated series sum c_e q^(e/denom) with exact coefficients."""

    __slots__ = ("denom", "terms", "top")

    def __init__(self, coeffs=None, trunc=None, denom: int | None = None):
        coeffs = dict(coeffs or {})
        exps = {Fraction(e): c for e, c in coeffs.items()}
        if denom is None:
            denom = 1
            for e in exps:
                denom = lcm(denom, e.denominator)
            if trunc is not None:
                denom = lcm(denom, Fraction(trunc).denominator)
        self.denom = denom
        self.top = None if trunc is None else floor(Fraction(trunc) * denom)
        terms = {}
        for e, c in exps.items():
            s = e * denom
            if s.denominator != 1:
                raise ValueError(f"exponent {e} is not on the grid (1/{denom})Z")
            s = int(s)
            c = clean(c)
            if c != 0 and (self.top is None or s <= self.top):
                terms[s] = c
        self.terms = terms

    @classmethod
    def _raw(cls, denom: int, terms: dict, top: int | None) -> "PSeries":
        obj = cls.__new__(cls)
        obj.denom = denom
        obj.terms = terms
        obj.top = top
        return obj

    @classmethod
    def from_list(cls, coeffs, start=0, trunc=None) -> "PSeries":
        """Integer-exponent series c_0 q^start + c_1 q^(start+1) + ...

        ``trunc`` defaults to the last listed exponent; pass ``exact=True``
        semantics by giving ``trunc=None`` explicitly through ``PSeries``.
        """
        if trunc is None:
            trunc = start + len(coeffs) - 1
        return cls({start + i: c for i, c in enumerate(coeffs)}, trunc=trunc)

    @classmethod
    def monomial(cls, coeff=1, exponent=0) -> "PSeries":
        return cls({exponent: coeff})

    @classmethod
    def zero(cls, trunc=None) -> "PSeries":
        return cls({}, trunc=trunc)

    # -- inspection ------------------------------------------------------
    @property
    def denomN(self) -> int:
        return self.denom

    @property
    def trunc(self) -> Fraction | None:
        return None if self.top is None else Fraction(self.top, self.denom)

    @property
    def floor(self) -> Fraction | None:
        v = self._val()
        return None if v is None else Fraction(v, self.denom)

    def is_exact(self) -> bool:
        return self.top is None

    def _val(self):
        """Smallest scaled exponent that may be nonzero (None for exact zero)."""
        if self.terms:
            return min(self.terms)
        return None if self.top is None else self.top + 1

    def valuation(self) -> Fraction | None:
        """Exponent of the lowest stored nonzero term."""
        if not self.terms:
            return None
        return Fraction(min(self.terms), self.denom)

    def leading(self):
        if not self.terms:
            raise SeriesDomainError("series has no known nonzero term")
        e = min(self.terms)
        return Fraction(e, self.denom), self.terms[e]

    def coefficient(self, exponent):
        e = Fraction(exponent) * self.denom
        if self.top is not None and e > self.top:
            raise TruncationError(f"coefficient of q^{exponent} is beyond truncation {self.trunc}")
        if e.denominator != 1:
            return 0
        return self.terms.get(int(e), 0)

    __getitem__ = coefficient

    def items(self):
        """(exponent, coefficient) pairs in ascending exponent order."""
        return [(Fraction(e, self.denom), self.terms[e]) for e in sorted(self.terms)]

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes."""
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # -- grids -----------------------------------------------------------
    def rescale(self, denom: int) -> "PSeries":
        if denom % self.denom:
            raise ValueError(f"cannot rescale denominator {self.denom} to {denom}")
        k = denom // self.denom
        if k == 1:
            return self
        top = None if self.top is None else (self.top + 1) * k - 1
        return PSeries._raw(denom, {e * k: c for e, c in self.terms.items()}, top)

    def reduced(self) -> "PSeries":
        """Same series on the coarsest grid carrying its terms.

        The known range can only shrink: a truncation that falls between coarse
        grid points is rounded down.
        """
        g = self.denom
        for e in self.terms:
            g = gcd(g, e)
        if g == 1:
            return self
        top = None if self.top is None else self.top // g
        return PSeries._raw(self.denom // g, {e // g: c for e, c in self.terms.items()}, top)

    def _align(self, other: "PSeries"):
        if self.denom == other.denom:
            return self, other
        d = lcm(self.denom, other.denom)
        return self.rescale(d), other.rescale(d)

    def truncate(self, trunc) -> "PSeries":
        """Narrow the known range to exponents <= trunc."""
        top = floor(Fraction(trunc) * self.denom)
        if self.top is not None and top > self.top:
            raise TruncationError(f"cannot widen truncation {self.trunc} to {trunc}")
        return PSeries._raw(self.denom, {e: c for e, c in self.terms.items() if e <= top}, top)

    def principal_part(self) -> "PSeries":
        """Exact sum of the terms with non-positive exponent."""
        return PSeries._raw(self.denom, {e: c for e, c in self.terms.items() if e <= 0}, None)

    def map_coefficients(self, fn) -> "PSeries":
        terms = {}
        for e, c in self.terms.items():
            c = clean(fn(c))
            if c != 0:
                terms[e] = c
        return PSeries._raw(self.denom, terms, self.top)

    def simplified(self) -> "PSeries":
        return self.map_coefficients(lambda c: c.minimal() if isinstance(c, CycNumber) else c)

    # -- ring operations ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, PSeries):
            return other
        if isinstance(other, (int, Fraction, CycNumber)):
            return PSeries._raw(self.denom, {0: clean(other)} if other != 0 else {}, None)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._align(other)
        top = _min_top(a.top, b.top)
        terms = {e: c for e, c in a.terms.items() if top is None or e <= top}
        for e, c in b.terms.items():
            if top is not None and e > top:
                continue
            s = clean(terms.get(e, 0) + c)
            if s != 0:
                terms[e] = s
            else:
                terms.pop(e, None)
        return PSeries._raw(a.denom, terms, top)

    __radd__ = __add__

    def __neg__(self):
        return PSeries._raw(self.denom, {e: clean(-c) for e, c in self.terms.items()}, self.top)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "PSeries":
        c = clean(c)
        if c == 0:
            return PSeries._raw(self.denom, {}, None)
        return PSeries._raw(self.denom, {e: clean(x * c) for e, x in self.terms.items()}, self.top)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNumber)):
            return self.scale(other)
        if not isinstance(other, PSeries):
            return NotImplemented
        a, b = self._align(other)
        va, vb = a._val(), b._val()
        if va is None or vb is None:
            return PSeries._raw(a.denom, {}, None)
        tops = []
        if a.top is not None:
            tops.append(a.top + vb)
        if b.top is not None:
            tops.append(b.top + va)
        top = min(tops) if tops else None
        bitems = sorted(b.terms.items())
        acc: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in bitems:
                e = e1 + e2
                if top is not None and e > top:
                    break
                acc[e] = acc.get(e, 0) + c1 * c2
        terms = {}
        for e, c in acc.items():
            c = clean(c)
            if c != 0:
                terms[e] = c
        return PSeries._raw(a.denom, terms, top)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, CycNumber)):
            if other == 0:
                raise ZeroDivisionError("series division by zero")
            return self.scale(1 / Fraction(other) if not isinstance(other, CycNumber) else other.inverse())
        if isinstance(other, PSeries):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, n):
        if isinstance(n, int) and n >= 0 and self.top is None:
            result = PSeries._raw(self.denom, {0: 1}, None)
            base = self
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        return self.power(n)

    def power(self, r, trunc=None) -> "PSeries":
        """f^r for integer r (or rational r when the leading coefficient is 1).

        Uses the J.C.P. Miller recurrence on the normalized unit part; the
        relative precision of f carries over to the result.
        """
        r = Fraction(r)
        if not self.terms:
            if r > 0:
                return PSeries._raw(self.denom, {}, None if self.top is None else self.top)
            raise SeriesDomainError("cannot raise a series with no known leading term to a non-positive power")
        v = min(self.terms)
        lead = self.terms[v]
        shift = r * v
        if shift.denominator != 1:
            raise SeriesDomainError(f"exponent {r} leaves the grid (1/{self.denom})Z")
        shift = int(shift)
        if r.denominator == 1:
            lead_pow = lead ** int(r) if isinstance(lead, CycNumber) else Fraction(lead) ** int(r)
        elif lead == 1:
            lead_pow = 1
        else:
            raise SeriesDomainError("rational powers need leading coefficient 1")
        if self.top is None and trunc is None and len(self.terms) == 1 and r.denominator == 1:
            return PSeries._raw(self.denom, {v * int(r): clean(lead_pow)}, None)
        if self.top is None:
            if trunc is None:
                raise SeriesDomainError("an explicit trunc is required for this power of an exact series")
            rel = floor(Fraction(trunc) * self.denom) - shift
        else:
            rel = self.top - v
            if trunc is not None:
                rel = min(rel, floor(Fraction(trunc) * self.denom) - shift)
        inv_lead = 1 / Fraction(lead) if not isinstance(lead, CycNumber) else lead.inverse()
        h = {e - v: clean(c * inv_lead) for e, c in self.terms.items() if e - v <= rel}
        g = {0: 1}
        hs = sorted(k for k in h if k > 0)
        for k in range(1, rel + 1):
            s = 0
            for j in hs:
                if j > k:
                    break
                gk = g.get(k - j)
                if gk is not None:
                    s += ((r + 1) * j - k) * h[j] * gk
            if s != 0:
                s = clean(s * Fraction(1, k))
                if s != 0:
                    g[k] = s
        terms = {e + shift: clean(c * lead_pow) for e, c in g.items()}
        return PSeries._raw(self.denom, {e: c for e, c in terms.items() if c != 0}, shift + rel)

    def inverse(self, trunc=None) -> "PSeries":
        if not self.terms:
            raise SeriesDomainError("series has no invertible leading term")
        return self.power(-1, trunc=trunc)

    def log1p(self, trunc=None) -> "PSeries":
        """log(1 + x) for x of strictly positive order."""
        v = self._val()
        if v is None:
            return PSeries._raw(self.denom, {}, None)
        if v <= 0:
            raise SeriesDomainError("log1p needs an argument of strictly positive order")
        top = self._need_top(trunc)
        x = sorted((e, c) for e, c in self.terms.items() if e <= top)
        out: dict = {}
        for e in range(v, top + 1):
            s = self.terms.get(e, 0)
            acc = 0
            for j, xj in x:
                if j >= e:
                    break
                lj = out.get(e - j)
                if lj is not None:
                    acc += (e - j) * lj * xj
            if acc != 0:
                s = s - acc * Fraction(1, e)
            s = clean(s)
            if s != 0:
                out[e] = s
        return PSeries._raw(self.denom, out, top)

    def exp(self, trunc=None) -> "PSeries":
        """exp(x) for x of strictly positive order."""
        v = self._val()
        if v is None:
            return PSeries._raw(self.denom, {0: 1}, None)
        if v <= 0:
            raise SeriesDomainError("exp needs an argument of strictly positive order")
        top = self._need_top(trunc)
        x = sorted((e, c) for e, c in self.terms.items() if e <= top)
        out = {0: 1}
        for e in range(1, top + 1):
            acc = 0
            for j, xj in x:
                if j > e:
                    break
                ek = out.get(e - j)
                if ek is not None:
                    acc += j * xj * ek
            acc = clean(acc * Fraction(1, e)) if acc != 0 else 0
            if acc != 0:
                out[e] = acc
        return PSeries._raw(self.denom, out, top)

    def _need_top(self, trunc):
        if trunc is not None:
            t = floor(Fraction(trunc) * self.denom)
            return t if self.top is None else min(t, self.top)
        if self.top is None:
            raise SeriesDomainError("an explicit trunc is required for an exact series")
        return self.top

    # -- substitution ------------------------------------------------------
    def substitute_angle(self, angle, num: int = 1, den: int = 1) -> "PSeries":
        """q -> exp(2 pi i angle) q^(num/den), with q^x -> exp(2 pi i angle x) q^(x num/den)."""
        if num < 1 or den < 1:
            raise SeriesDomainError("substitution needs num >= 1 and den >= 1")
        angle = Fraction(angle) % 1
        cap = get_modulus_cap()
        denom = self.denom * den
        terms = {}
        for e, c in self.terms.items():
            if angle:
                t = angle * e / self.denom % 1
                if t:
                    order = t.denominator
                    mod = order if not isinstance(c, CycNumber) else lcm(order, c.modulus)
                    if mod > cap:
                        raise ModulusCapError(
                            f"substitution needs cyclotomic modulus {mod} > cap {cap}", modulus=mod, cap=cap
                        )
                    c = clean(c * zeta(order, t.numerator))
            terms[e * num] = c
        top = None if self.top is None else self.top * num
        return PSeries._raw(denom, terms, top)

    def substitute(self, root=1, num: int = 1, den: int = 1) -> "PSeries":
        angle = root_angle(root)
        if angle is None:
            raise SeriesDomainError(f"{root} is not a root of unity")
        return self.substitute_angle(angle, num, den)

    # -- comparison / text -------------------------------------------------
    def __eq__(self, other):
        """Agreement on every coefficient both sides know."""
        other = self._coerce(other) if not isinstance(other, PSeries) else other
        if other is None:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def identical(self, other: "PSeries") -> bool:
        """Same terms and same truncation (after grid reduction)."""
        a, b = self.reduced(), other.reduced()
        return a.denom == b.denom and a.top == b.top and a.terms == b.terms

    def __repr__(self):
        return f"PSeries({format_series(self)!r})"

    def __str__(self):
        return format_series(self)


# ---------------------------------------------------------------------------
# two-variable series


class BiSeries:
    """Power series in p with PSeries-in-q coefficients ("rows")."""

    __slots__ = ("rows", "ptop")

    def __init__(self, rows=None, ptrunc: int | None = None):
        self.ptop = ptrunc
        self.rows = {}
        for i, r in (rows or {}).items():
            if ptrunc is not None and i > ptrunc:
                continue
            if not isinstance(r, PSeries):
                r = PSeries({0: r}) if r != 0 else PSeries()
            if r.terms or r.top is not None:
                self.rows[i] = r

    @classmethod
    def from_terms(cls, coeffs: dict, ptrunc=None, qtrunc=None) -> "BiSeries":
        """Build from {(p_exponent, q_exponent): coefficient}; rows share ``qtrunc``."""
        rows: dict = {}
        for (i, e), c in coeffs.items():
            rows.setdefault(i, {})[e] = c
        out = {i: PSeries(r, trunc=qtrunc) for i, r in rows.items()}
        if ptrunc is not None and qtrunc is not None:
            for i in range(min(out, default=0), ptrunc + 1):
                out.setdefault(i, PSeries({}, trunc=qtrunc))
        return cls(out, ptrunc)

    @property
    def ptrunc(self):
        return self.ptop

    def row(self, i: int) -> PSeries:
        if self.ptop is not None and i > self.ptop:
            raise TruncationError(f"p-degree {i} beyond truncation {self.ptop}")
        return self.rows.get(i, PSeries())

    def coefficient(self, i: int, qexp):
        return self.row(i).coefficient(qexp)

    def _pval(self):
        if self.rows:
            return min(self.rows)
        return None if self.ptop is None else self.ptop + 1

    def terms(self):
        """Sorted ((p_exponent, q_exponent), coefficient) over every stored term."""
        out = []
        for i in sorted(self.rows):
            for e, c in self.rows[i].items():
                out.append(((i, e), c))
        return out

    def _coerce(self, other):
        if isinstance(other, BiSeries):
            return other
        if isinstance(other, PSeries):
            return BiSeries({0: other})
        if isinstance(other, (int, Fraction, CycNumber)):
            return BiSeries({0: PSeries({0: other})} if other != 0 else {})
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        top = _min_top(self.ptop, other.ptop)
        rows = {}
        for i in set(self.rows) | set(other.rows):
            if top is not None and i > top:
                continue
            a, b = self.rows.get(i), other.rows.get(i)
            rows[i] = a + b if a is not None and b is not None else (a if b is None else b)
        return BiSeries(rows, top)

    __radd__ = __add__

    def __neg__(self):
        return BiSeries({i: -r for i, r in self.rows.items()}, self.ptop)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "BiSeries":
        return BiSeries({i: r.scale(c) for i, r in self.rows.items()}, self.ptop)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNumber)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        va, vb = self._pval(), other._pval()
        if va is None or vb is None:
            return BiSeries({}, None)
        tops = []
        if self.ptop is not None:
            tops.append(self.ptop + vb)
        if other.ptop is not None:
            tops.append(other.ptop + va)
        top = min(tops) if tops else None
        rows: dict = {}
        for i, ra in self.rows.items():
            for j, rb in other.rows.items():
                k = i + j
                if top is not None and k > top:
                    continue
                prod = ra * rb
                rows[k] = prod if k not in rows else rows[k] + prod
        return BiSeries(rows, top)

    __rmul__ = __mul__

    def substitute_p(self, root) -> "BiSeries":
        """p -> root * p."""
        return BiSeries({i: r.scale(_power(root, i)) for i, r in self.rows.items()}, self.ptop)

    def _need_ptop(self, ptrunc):
        if ptrunc is not None:
            return ptrunc if self.ptop is None else min(ptrunc, self.ptop)
        if self.ptop is None:
            raise SeriesDomainError("an explicit ptrunc is required for an exact bivariate series")
        return self.ptop

    def log1p(self, ptrunc=None) -> "BiSeries":
        """log(1 + Y) for Y of strictly positive p-order (rows may be Laurent in q)."""
        if any(i <= 0 for i in self.rows):
            raise SeriesDomainError("log1p needs strictly positive p-order")
        top = self._need_ptop(ptrunc)
        L: dict = {}
        for i in range(1, top + 1):
            acc = self.rows.get(i)
            corr = None
            for j in range(1, i):
                lj, yk = L.get(j), self.rows.get(i - j)
                if lj is None or yk is None:
                    continue
                t = (lj * yk).scale(j)
                corr = t if corr is None else corr + t
            if corr is not None:
                corr = corr.scale(Fraction(-1, i))
                acc = corr if acc is None else acc + corr
            if acc is not None:
                L[i] = acc
        return BiSeries(L, top)

    def exp(self, ptrunc=None) -> "BiSeries":
        """exp(Y) for Y of strictly positive p-order."""
        if any(i <= 0 for i in self.rows):
            raise SeriesDomainError("exp needs strictly positive p-order")
        top = self._need_ptop(ptrunc)
        E = {0: PSeries({0: 1})}
        for i in range(1, top + 1):
            acc = None
            for j in range(1, i + 1):
                yj, ek = self.rows.get(j), E.get(i - j)
                if yj is None or ek is None:
                    continue
                t = (yj * ek).scale(j)
                acc = t if acc is None else acc + t
            if acc is not None:
                E[i] = acc.scale(Fraction(1, i))
        return BiSeries(E, top)

    def first_difference(self, other: "BiSeries"):
        """First ((p, q), lhs, rhs) where the two disagree on common known range, else None."""
        diff = self - other
        for i in sorted(diff.rows):
            row = diff.rows[i]
            if row.terms:
                e = min(row.terms)
                q = Fraction(e, row.denom)
                return (i, q), self.row(i).coefficient(q), other.row(i).coefficient(q)
        return None

    def certified(self):
        """{p_degree: q-truncation} for every known row (None = exact)."""
        return {i: r.trunc for i, r in sorted(self.rows.items())}

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def __repr__(self):
        return f"BiSeries(ptrunc={self.ptop}, rows={len(self.rows)})"


# ---------------------------------------------------------------------------
# functional forms named after the operations they implement


def series_mul(a, b):
    return a * b


def series_inverse(a: PSeries, trunc=None) -> PSeries:
    return a.inverse(trunc)


def series_log1p(x, trunc=None):
    return x.log1p(trunc)


def series_exp(x, trunc=None):
    return x.exp(trunc)


def series_substitute(f: PSeries, root, num: int, den: int) -> PSeries:
    return f.substitute(root, num, den)


def _check_normalized(f: PSeries) -> int:
    """Validate f = q^-1 + sum_{n>=1} a_n q^n on the integer grid; return the known depth."""
    f = f.reduced()
    if f.denom != 1:
        raise NormalizationError("series must have integer exponents")
    if f.top is not None and f.top < 0:
        raise NormalizationError("series is not known past its principal part")
    if min(f.terms, default=0) != -1 or f.terms[-1] != 1:
        raise NormalizationError("series must have leading term q^-1 with coefficient 1")
    if f.terms.get(0, 0) != 0:
        raise NormalizationError("series must have zero constant term")
    if any(e < -1 for e in f.terms):
        raise NormalizationError("series has a pole of order > 1")
    return f.top


def biseries_from_f(f: PSeries, depth: int | None = None) -> BiSeries:
    """1 - sum_{m,n>=1} a_{m+n-1} p^m q^n, exact wherever f's coefficients are known.

    Row m holds -sum_n a_{m+n-1} q^n and is known for n <= depth - m + 1.
    """
    top = _check_normalized(f)
    if top is None:
        if depth is None:
            raise SeriesDomainError("an explicit depth is required for an exact series")
        top = depth
    elif depth is not None:
        top = min(top, depth)
    f = f.reduced()
    rows = {0: PSeries({0: 1})}
    for m in range(1, top + 1):
        row = {n: -f.terms.get(m + n - 1, 0) for n in range(1, top - m + 2)}
        rows[m] = PSeries(row, trunc=top - m + 1)
    return BiSeries(rows, top)


def bivariate_difference(f: PSeries, p_root=1) -> BiSeries:
    """p (f(rho p) - f(q)) with the p-side read on f's scaled exponent grid.

    A term c q^(e/N) of f contributes c rho^e p^e on the p side, so for
    integer-exponent f this is literally p (f(rho p) - f(q)).
    """
    if not f.terms or min(f.terms) != -1:
        raise NormalizationError("series must start at scaled exponent -1")
    if f.terms.get(0, 0) != 0:
        raise NormalizationError("series must have zero constant term")
    rho = p_root
    rows: dict = {}
    for e, c in f.terms.items():
        rows[e + 1] = PSeries({0: clean(c * _power(rho, e))})
    ptop = None if f.top is None else f.top + 1
    row1 = -f
    rows[1] = row1 if 1 not in rows else rows[1] + row1
    return BiSeries(rows, ptop)


def _power(x, e: int):
    if isinstance(x, CycNumber):
        return x**e
    return Fraction(x) ** e


# ---------------------------------------------------------------------------
# canonical text form: "c * q^(a/N)" terms ascending, "+ O(q^(x))" tail


def _format_exp(e: int, denom: int) -> str:
    return f"q^({e})" if denom == 1 else f"q^({e}/{denom})"


def format_series(f: PSeries) -> str:
    parts = []
    for e in sorted(f.terms):
        c = f.terms[e]
        mono = _format_exp(e, f.denom)
        if isinstance(c, CycNumber) and not c.is_rational():
            parts.append(("+", f"({format_scalar(c)}) * {mono}"))
        else:
            c = Fraction(c)
            parts.append(("-" if c < 0 else "+", f"{format_scalar(abs(c))} * {mono}"))
    if f.top is not None:
        parts.append(("+", f"O({_format_exp(f.top + 1, f.denom)})"))
    if not parts:
        return "0"
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_MONO = re.compile(r"^q\^\((-?\d+)(?:/(\d+))?\)$")


def _split_top(text: str):
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > 0 and text[i - 1] == " ":
            parts.append(text[start:i].strip())
            start = i
    parts.append(text[start:].strip())
    return [p for p in parts if p]


def parse_series(text: str) -> PSeries:
    text = text.strip()
    if text == "0":
        return PSeries()
    denom = 1
    coeffs = []
    tail = None
    for piece in _split_top(text):
        sign = 1
        if piece[0] in "+-":
            sign = -1 if piece[0] == "-" else 1
            piece = piece[1:].strip()
        if piece.startswith("O(") and piece.endswith(")"):
            m = _MONO.match(piece[2:-1])
            if not m:
                raise ValueError(f"bad truncation term {piece!r}")
            tail = (int(m.group(1)), int(m.group(2) or 1))
            denom = lcm(denom, tail[1])
            continue
        coeff_text, _, mono = piece.rpartition("*")
        m = _MONO.match(mono.strip())
        if not m:
            raise ValueError(f"bad series term {piece!r}")
        num, den = int(m.group(1)), int(m.group(2) or 1)
        denom = lcm(denom, den)
        c = parse_scalar(coeff_text.strip()) if coeff_text.strip() else 1
        coeffs.append((num, den, c * sign if not isinstance(c, CycNumber) else c * sign))
    terms = {}
    for num, den, c in coeffs:
        e = num * (denom // den)
        terms[e] = clean(terms.get(e, 0) + c)
    top = None if tail is None else tail[0] * (denom // tail[1]) - 1
    return PSeries._raw(denom, {e: c for e, c in terms.items() if c != 0}, top)
