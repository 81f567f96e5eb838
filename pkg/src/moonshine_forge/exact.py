"""Exact rational and cyclotomic arithmetic.

Rationals are plain :class:`fractions.Fraction` (always reduced, positive
denominator).  A :class:`CycNumber` is an element of Q(zeta_M) stored as its
canonical residue modulo the M-th cyclotomic polynomial, i.e. a vector of
phi(M) rationals in the power basis 1, zeta_M, ..., zeta_M^(phi(M)-1).

Series coefficients throughout the package are "scalars": ``int``,
``Fraction`` or ``CycNumber``.  Mixed arithmetic promotes to CycNumber and
:func:`clean` demotes back whenever the value is rational.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational as _RationalABC

from sympy import cyclotomic_poly, divisors as _sym_divisors, mobius as _sym_mobius, totient

from .errors import ModulusError

Rational = Fraction

__all__ = [
    "Rational",
    "CycNumber",
    "zeta",
    "cyc_arith",
    "embed",
    "clean",
    "is_rational",
    "root_angle",
    "euler_phi",
    "divisors",
    "mobius",
    "lcm",
    "format_scalar",
    "parse_scalar",
]


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@lru_cache(maxsize=None)
def euler_phi(m: int) -> int:
    return int(totient(m))


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple[int, ...]:
    return tuple(int(d) for d in _sym_divisors(n))


@lru_cache(maxsize=None)
def mobius(n: int) -> int:
    return int(_sym_mobius(n))


@lru_cache(maxsize=None)
def _cyclo(m: int) -> tuple[int, ...]:
    """Coefficients of the m-th cyclotomic polynomial, low degree first."""
    if m == 1:
        return (-1, 1)
    coeffs = cyclotomic_poly(m, polys=True).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


def _reduce(poly: list, m: int) -> tuple[Fraction, ...]:
    """Remainder of ``poly`` (low-first, mutated) modulo Phi_m."""
    phi = _cyclo(m)
    deg = len(phi) - 1
    for i in range(len(poly) - 1, deg - 1, -1):
        c = poly[i]
        if c:
            base = i - deg
            for j in range(deg):
                if phi[j]:
                    poly[base + j] -= c * phi[j]
            poly[i] = 0
    out = poly[:deg] + [0] * (deg - len(poly))
    return tuple(Fraction(c) for c in out)


def _poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return _poly_trim(q), _poly_trim(a[: len(b) - 1])


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    for i, y in enumerate(b):
        a[i] -= y
    return _poly_trim(a)


def _solve(columns: list[tuple], target: tuple) -> list[Fraction] | None:
    """Exact solution x of sum_j x_j * columns[j] = target, or None."""
    n = len(columns)
    rows = [[Fraction(col[i]) for col in columns] + [Fraction(target[i])] for i in range(len(target))]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[n] != 0 for row in rows[r:]):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return x


class CycNumber:
    """Element of the cyclotomic field Q(zeta_M), canonical reduced form."""

    __slots__ = ("modulus", "coeffs")

    def __init__(self, modulus: int, coeffs=()):
        if modulus < 1:
            raise ModulusError(f"modulus must be positive, got {modulus}")
        self.modulus = modulus
        coeffs = list(coeffs)
        if len(coeffs) != euler_phi(modulus) or not all(isinstance(c, Fraction) for c in coeffs):
            coeffs = _reduce([Fraction(c) for c in coeffs], modulus)
        self.coeffs = tuple(coeffs)

    @classmethod
    def rational(cls, value, modulus: int = 1) -> "CycNumber":
        return cls(modulus, [Fraction(value)])

    # -- structure -------------------------------------------------------
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def embed(self, m2: int) -> "CycNumber":
        m = self.modulus
        if m2 % m:
            raise ModulusError(f"cannot embed Q(zeta_{m}) into Q(zeta_{m2})")
        if m2 == m:
            return self
        step = m2 // m
        poly = [Fraction(0)] * ((len(self.coeffs) - 1) * step + 1)
        for i, c in enumerate(self.coeffs):
            poly[i * step] = c
        return CycNumber(m2, _reduce(poly, m2))

    def minimal(self) -> "CycNumber":
        """Same number written over the smallest modulus whose field contains it."""
        if self.is_rational():
            return CycNumber(1, [self.coeffs[0]])
        m = self.modulus
        for d in divisors(m):
            if d == m:
                break
            if d % 4 == 2:
                continue
            step = m // d
            columns = [zeta(m, j * step).coeffs for j in range(euler_phi(d))]
            sol = _solve(columns, self.coeffs)
            if sol is not None:
                return CycNumber(d, sol)
        return self

    def galois(self, a: int) -> "CycNumber":
        """Image under zeta_M -> zeta_M^a (a coprime to M)."""
        m = self.modulus
        if gcd(a, m) != 1:
            raise ModulusError(f"{a} is not a unit modulo {m}")
        poly = [Fraction(0)] * m
        for i, c in enumerate(self.coeffs):
            poly[(i * a) % m] += c
        return CycNumber(m, _reduce(poly, m))

    # -- arithmetic ------------------------------------------------------
    def _unify(self, other):
        if isinstance(other, CycNumber):
            if other.modulus == self.modulus:
                return self, other
            m = lcm(self.modulus, other.modulus)
            return self.embed(m), other.embed(m)
        if isinstance(other, (int, _RationalABC)):
            return self, CycNumber(self.modulus, [Fraction(other)])
        return None, None

    def __add__(self, other):
        a, b = self._unify(other)
        if a is None:
            return NotImplemented
        return CycNumber(a.modulus, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self.modulus, [-x for x in self.coeffs])

    def __pos__(self):
        return self

    def __sub__(self, other):
        a, b = self._unify(other)
        if a is None:
            return NotImplemented
        return CycNumber(a.modulus, [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, _RationalABC)):
            if not isinstance(other, CycNumber):
                o = Fraction(other)
                return CycNumber(self.modulus, [x * o for x in self.coeffs])
        a, b = self._unify(other)
        if a is None:
            return NotImplemented
        if b.is_rational():
            o = b.coeffs[0]
            return CycNumber(a.modulus, [x * o for x in a.coeffs])
        if a.is_rational():
            o = a.coeffs[0]
            return CycNumber(a.modulus, [x * o for x in b.coeffs])
        return CycNumber(a.modulus, _reduce(_poly_mul(list(a.coeffs), list(b.coeffs)), a.modulus))

    __rmul__ = __mul__

    def inverse(self) -> "CycNumber":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in cyclotomic field")
        if self.is_rational():
            return CycNumber(self.modulus, [1 / self.coeffs[0]])
        m = self.modulus
        # extended Euclid: u * a + v * Phi = 1
        r0, r1 = [Fraction(c) for c in _cyclo(m)], _poly_trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        c = r1[0]
        return CycNumber(m, _reduce([x / c for x in s1], m))

    def __truediv__(self, other):
        if isinstance(other, CycNumber):
            return self * other.inverse()
        if isinstance(other, (int, _RationalABC)):
            if other == 0:
                raise ZeroDivisionError("division by zero in cyclotomic field")
            return self * (1 / Fraction(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, _RationalABC)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = CycNumber(self.modulus, [Fraction(1)])
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CycNumber):
            a, b = self._unify(other)
            return a.coeffs == b.coeffs
        if isinstance(other, (int, _RationalABC)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        mn = self.minimal()
        return hash((mn.modulus, mn.coeffs))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"CycNumber({self.modulus}, {format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


# ---------------------------------------------------------------------------
# module level operations


def zeta(m: int, k: int = 1) -> CycNumber:
    """zeta_m^k = exp(2 pi i k / m) in reduced form."""
    if m < 1:
        raise ModulusError(f"modulus must be positive, got {m}")
    k %= m
    poly = [Fraction(0)] * (k + 1)
    poly[k] = Fraction(1)
    return CycNumber(m, _reduce(poly, m))


def cyc_arith(a, b, op: str):
    """Field operation ``op`` in {'add', 'sub', 'mul', 'div'} on promoted operands."""
    a = a if isinstance(a, CycNumber) else CycNumber.rational(a)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def embed(a, m2: int) -> CycNumber:
    if not isinstance(a, CycNumber):
        return CycNumber(m2, [Fraction(a)])
    return a.embed(m2)


def is_rational(x) -> bool:
    return not isinstance(x, CycNumber) or x.is_rational()


def clean(x):
    """Demote to the simplest exact type: int, Fraction or minimal CycNumber."""
    if isinstance(x, int):
        return x
    if isinstance(x, CycNumber):
        if not x.is_rational():
            return x
        x = x.coeffs[0]
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    return x


def root_angle(x) -> Fraction | None:
    """t in [0, 1) with x = exp(2 pi i t), or None when x is not a root of unity."""
    if not isinstance(x, CycNumber):
        if x == 1:
            return Fraction(0)
        if x == -1:
            return Fraction(1, 2)
        return None
    x = x.minimal()
    order = lcm(2, x.modulus)
    for k in range(order):
        if zeta(order, k) == x:
            return Fraction(k, order)
    return None


# ---------------------------------------------------------------------------
# text form: rationals as "p/q", cyclotomics as polynomials in z{M}


def _format_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_scalar(x) -> str:
    if not isinstance(x, CycNumber):
        return _format_rational(Fraction(x))
    if x.is_rational():
        return _format_rational(x.coeffs[0])
    m = x.modulus
    parts = []
    for k, c in enumerate(x.coeffs):
        if not c:
            continue
        mono = "" if k == 0 else (f"z{m}" if k == 1 else f"z{m}^{k}")
        if k == 0:
            body = _format_rational(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{_format_rational(abs(c))}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)\*?)?(?:z(\d+)(?:\^(\d+))?)?$")


def parse_scalar(text: str):
    """Inverse of :func:`format_scalar`; returns int, Fraction or CycNumber."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if s[0] not in "+-":
        s = "+" + s
    pieces = re.findall(r"[+-][^+-]+", s)
    if "".join(pieces) != s:
        raise ValueError(f"cannot parse scalar {text!r}")
    total = Fraction(0)
    modulus = None
    terms = []
    for piece in pieces:
        sign = -1 if piece[0] == "-" else 1
        m = _TERM.match(piece[1:])
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"cannot parse scalar term {piece!r}")
        coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        if m.group(2) is None:
            total += sign * coeff
            continue
        mod = int(m.group(2))
        if modulus is not None and mod != modulus:
            raise ValueError(f"mixed moduli in {text!r}")
        modulus = mod
        terms.append((sign * coeff, int(m.group(3) or 1)))
    if modulus is None:
        return clean(total)
    value = CycNumber(modulus, [total])
    for c, k in terms:
        value = value + zeta(modulus, k) * c
    return value
