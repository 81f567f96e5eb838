"""Independent brute-force oracles.  Plain Python lists and dicts only; nothing
from the package is imported here, so agreement with the engine means something."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb, gcd


def list_mul(a, b, n):
    """Product of two coefficient lists (index = exponent), truncated to length n."""
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def euler_direct(n):
    """prod_{k>=1} (1 - q^k) to q^(n-1), by multiplying out every factor."""
    out = [1] + [0] * (n - 1)
    for k in range(1, n):
        factor = [0] * n
        factor[0] = 1
        factor[k] = -1
        out = list_mul(out, factor, n)
    return out


def delta_direct(n):
    """Coefficients of Delta/q = prod (1 - q^k)^24 to q^(n-1), by 24 repeated products."""
    e = euler_direct(n)
    out = [1] + [0] * (n - 1)
    for _ in range(24):
        out = list_mul(out, e, n)
    return out


def long_divide(num, den, n):
    """num/den as a power series, den[0] must be 1."""
    assert den[0] == 1
    out = []
    rem = list(num[:n]) + [0] * max(0, n - len(num))
    for i in range(n):
        c = rem[i]
        out.append(c)
        if c:
            for j in range(1, n - i):
                if j < len(den):
                    rem[i + j] -= c * den[j]
    return out


def sigma3(n):
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


def j_direct(top):
    """{n: c(n)} of E4^3/Delta - 744 for -1 <= n <= top."""
    n = top + 2
    e4 = [1] + [240 * sigma3(k) for k in range(1, n)]
    e4cube = list_mul(list_mul(e4, e4, n), e4, n)
    ratio = long_divide(e4cube, delta_direct(n), n)  # coefficients of q * J + 744 q
    out = {k - 1: c for k, c in enumerate(ratio)}
    out[0] -= 744
    return {k: v for k, v in out.items() if k <= top}


def faber_grunsky(a, bound):
    """H_{m,n} via Faber polynomials: F_m(f) = q^-m + m sum_n H_{m,n} q^n.

    ``a`` maps exponent -> coefficient for f = q^-1 + sum a_n q^n.
    Laurent series as dicts, truncated at q^bound.
    """

    def mul(x, y):
        out = {}
        for i, u in x.items():
            for j, v in y.items():
                if i + j <= bound:
                    out[i + j] = out.get(i + j, 0) + u * v
        return out

    f = {-1: 1, **{k: v for k, v in a.items() if k <= bound}}
    H = {}
    powers = [{0: 1}]
    for m in range(1, bound):
        powers.append(mul(powers[-1], f))
    for m in range(1, bound):
        F = dict(powers[m])
        for i in range(m - 1, -1, -1):
            c = F.get(-i, 0)
            if c:
                for e, v in powers[i].items():
                    F[e] = F.get(e, 0) - c * v
        for n in range(1, bound - m + 1):
            H[(m, n)] = Fraction(F.get(n, 0), m)
    return H


def lyndon_count(k, letters=2):
    """Number of Lyndon words of length k, by enumerating all words."""
    count = 0
    for w in product(range(letters), repeat=k):
        if all(w < w[i:] + w[:i] for i in range(1, k)):
            count += 1
    return count


def direct_product(mult, D):
    """prod_{m,n>=1} (1 - p^m q^n)^c over mult, truncated at total degree D, by binomial expansion."""
    poly = {(0, 0): 1}
    for (m, n), c in sorted(mult.items()):
        if n < 1 or m + n > D or c == 0:
            continue
        factor = {}
        k = 0
        while k * (m + n) <= D:
            factor[(k * m, k * n)] = (-1) ** k * comb(c, k)
            k += 1
        new = {}
        for (i, j), u in poly.items():
            for (s, t), v in factor.items():
                if i + s + j + t <= D:
                    key = (i + s, j + t)
                    new[key] = new.get(key, 0) + u * v
        poly = new
    return {k: v for k, v in poly.items() if v}


def witness_bruteforce(n):
    """All (a, b, c, d) with ab = cd, a + b = n + 1, c + d < n + 1, in lexicographic order."""
    out = []
    for a in range(1, n + 1):
        b = n + 1 - a
        for c in range(1, n + 1):
            if (a * b) % c == 0:
                d = a * b // c
                if c + d < n + 1:
                    out.append((a, b, c, d))
    return sorted(out)


def cyclotomic_remainder(poly, m):
    """Remainder of an integer/rational polynomial (low-first list) modulo Phi_m, via numpy-free sympy."""
    from sympy import Poly, cyclotomic_poly, symbols

    x = symbols("x")
    p = Poly(list(reversed(poly)), x, domain="QQ")
    r = p.rem(Poly(cyclotomic_poly(m, x), x, domain="QQ"))
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(r.all_coeffs())]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def hecke_level_numeric(coeff, N, n, limit):
    """n T_n f for a trivial-group level-N family by direct high-precision double summation.

    ``coeff(k, j, e)`` returns the slot value V[(k mod N, j mod N, e)].  The result
    maps each exponent (Fraction) up to ``limit`` to the nearest integer/Fraction
    with denominator <= 2N.
    """
    from mpmath import mp, mpf, expjpi, nint

    mp.dps = 80
    out = {}
    for a in range(1, n + 1):
        if n % a:
            continue
        d = n // a
        for b in range(d):
            k, l = d, -b
            for e in range(-1, 400):
                x = Fraction(e * a, N * d)
                if x > limit:
                    break
                for j in range(N):
                    if (k * j - e) % N:
                        continue
                    v = coeff(k, j, e)
                    if v == 0:
                        continue
                    z = expjpi(mpf(2 * l * j) / N) * expjpi(mpf(2 * b * e) / (N * d))
                    out[x] = out.get(x, 0) + v * z
    res = {}
    for x, z in out.items():
        if abs(z) > mpf(10) ** -20:
            assert abs(z.imag) < mpf(10) ** -20
            # exact value has denominator dividing n; recover it from n * z
            res[x] = Fraction(int(nint(z.real * n)), n)
    return res
