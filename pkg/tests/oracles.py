"""Slow, independent reference implementations used only by the tests."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction


def naive_vp(x: Fraction, p: int):
    """p-adic valuation of a rational by repeated division."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def poly_divmod(a, m):
    """Long division by a monic polynomial, lowest degree first."""
    a = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(len(a) - len(m) + 1, 1)
    for i in range(len(a) - len(m), -1, -1):
        c = a[i + len(m) - 1]
        q[i] = c
        for j, y in enumerate(m):
            a[i + j] -= c * y
    return q, a[:len(m) - 1]


def binomial_poly(e: int):
    """(1 + X)^e - 1 by the binomial theorem."""
    return [Fraction(0)] + [Fraction(math.comb(e, i)) for i in range(1, e + 1)]


def min_poly_eps(p: int, n: int):
    """Phi_{p^n}(1 + X) as the quotient ((1+X)^{p^n} - 1) / ((1+X)^{p^{n-1}} - 1)."""
    q, r = poly_divmod(binomial_poly(p ** n), _monic(binomial_poly(p ** (n - 1))))
    assert not any(r)
    return q


def _monic(poly):
    poly = list(poly)
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


class EpsElement:
    """Element of Q(zeta_{p^n}) as rational coordinates in powers of eps."""

    def __init__(self, p, n, coeffs):
        self.p, self.n = p, n
        self.mod = min_poly_eps(p, n)
        _, r = poly_divmod(list(coeffs) + [0] * len(self.mod), self.mod)
        self.c = r

    def __mul__(self, other):
        return EpsElement(self.p, self.n, poly_mul(self.c, other.c))

    def __add__(self, other):
        k = max(len(self.c), len(other.c))
        a = self.c + [0] * (k - len(self.c))
        b = other.c + [0] * (k - len(other.c))
        return EpsElement(self.p, self.n, [x + y for x, y in zip(a, b)])

    def __neg__(self):
        return EpsElement(self.p, self.n, [-x for x in self.c])

    def __sub__(self, other):
        return self + (-other)

    def valuation(self):
        d = len(self.mod) - 1
        vals = [naive_vp(x, self.p) + Fraction(i, d) for i, x in enumerate(self.c) if x != 0]
        return min(vals) if vals else math.inf

    def is_zero(self):
        return not any(self.c)


def eps_oracle(p, n, poly):
    """Evaluate an integer polynomial at eps_n in the oracle field."""
    return EpsElement(p, n, [Fraction(x) for x in poly])


def zeta_power_oracle(p, n, e):
    """zeta_{p^n}^e = (1 + eps)^e in the oracle field."""
    return EpsElement(p, n, [Fraction(math.comb(e, i)) for i in range(e + 1)])


def leibniz_det(m, zero, one):
    """Determinant as the signed sum over permutations."""
    k = len(m)
    total = zero
    for perm in itertools.permutations(range(k)):
        inversions = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        term = one
        for i, j in enumerate(perm):
            term = term * m[i][j]
        total = total - term if inversions % 2 else total + term
    return total


def padic_int_det(m):
    """Integer determinant by exact rational elimination."""
    a = [[Fraction(x) for x in row] for row in m]
    k = len(a)
    det = Fraction(1)
    for c in range(k):
        piv = next((r for r in range(c, k) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, k):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def random_gl(rng, p, k, digits=20):
    """Random integer matrix whose determinant is prime to p."""
    while True:
        m = [[rng.randrange(p ** digits) for _ in range(k)] for _ in range(k)]
        det = padic_int_det(m)
        if det.denominator == 1 and det.numerator % p:
            return m


def random_antidiagonal(rng, p, h, mod_p=False):
    """[[A, B], [C, D]] with unit B, C and A = D = 0 (or A, D in pZ when mod_p)."""
    b, c = random_gl(rng, p, h), random_gl(rng, p, h)
    m = [[0] * (2 * h) for _ in range(2 * h)]
    for i in range(h):
        for j in range(h):
            m[i][h + j] = b[i][j]
            m[h + i][j] = c[i][j]
            if mod_p:
                m[i][j] = p * rng.randrange(p ** 10)
                m[h + i][h + j] = p * rng.randrange(p ** 10)
    return m
