"""Exact arithmetic in the totally ramified fields Q_p(zeta_{p^n}).

Elements are stored in the power basis of ``zeta = zeta_{p^n}`` reduced modulo
``Phi_{p^n}(Y) = sum_{j<p} Y^(j p^(n-1))``: that modulus is sparse, so
reduction and multiplication by cyclotomic values are cheap shift-adds.  The
uniformizer ``eps_n = zeta - 1`` basis is exposed through
:meth:`CycloElement.eps_coefficients` and is what gets serialized.

Valuations are exact.  After removing the p-content, the valuation of an
integral element ``c`` is ``k/d`` where ``k`` is the first index at which the
eps-basis expansion of ``c`` is a unit; the eps-basis residues mod p are a
Taylor shift mod p, and by Lucas' theorem that shift is the tensor power of
the p x p Pascal matrix mod p over the base-p digits of the index.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _poly
from .padic import (
    DEFAULT_PRECISION,
    INF,
    PadicNumber,
    PrecisionError,
    Valuation,
    check_prime,
    split_int,
)


@lru_cache(maxsize=None)
def degree(p: int, n: int) -> int:
    """[Q_p(zeta_{p^n}) : Q_p]."""
    return 1 if n == 0 else p ** (n - 1) * (p - 1)


def _reduce(p: int, n: int, coeffs) -> list[int]:
    """Reduce a zeta-polynomial modulo Phi_{p^n}(Y) (or Y - 1 when n = 0)."""
    m = p ** n
    d = degree(p, n)
    if len(coeffs) <= d:
        out = list(coeffs)
        return out + [0] * (d - len(out))
    r = list(coeffs[:m])
    r += [0] * (m - len(r))
    for start in range(m, len(coeffs), m):
        chunk = coeffs[start:start + m]
        r[:len(chunk)] = [x + y for x, y in zip(r, chunk)]
    if n == 0:
        return r
    b = p ** (n - 1)
    top = r[d:]
    if any(top):
        for j in range(p - 1):
            r[j * b:(j + 1) * b] = [x - t for x, t in zip(r[j * b:(j + 1) * b], top)]
    return r[:d]


@lru_cache(maxsize=64)
def _pascal_mod(p: int) -> np.ndarray:
    return np.array([[math.comb(i, j) % p for j in range(p)] for i in range(p)], dtype=np.int64)


def _eps_order_mod_p(p: int, n: int, coeffs) -> int:
    """Least k with a unit eps^k-coefficient; coeffs must be p-content free."""
    if n == 0 or sum(coeffs) % p:
        return 0
    m = p ** n
    arr = np.zeros(m, dtype=np.int64)
    arr[:len(coeffs)] = [c % p for c in coeffs]
    arr = arr.reshape((p,) * n)
    pascal = _pascal_mod(p)
    for axis in range(n):
        arr = np.moveaxis(np.tensordot(arr, pascal, axes=([axis], [0])), -1, axis) % p
    nz = np.flatnonzero(arr.reshape(m))
    if nz.size == 0:
        raise AssertionError("content-free element reduced to zero mod p")
    return int(nz[0])


def _ceil(x) -> int:
    return math.ceil(x)


class CycloElement:
    """Element ``p**shift * sum(c_i zeta^i)`` of Q_p(zeta_{p^n}).

    ``prec`` is the absolute precision: the value is known modulo elements of
    valuation >= prec.  ``prec == INF`` marks an exactly known element.
    """

    __slots__ = ("p", "n", "coeffs", "shift", "prec", "_val")

    def __init__(self, p: int, n: int, coeffs, shift: int = 0, prec=INF, *, reduced: bool = False):
        if n < 0:
            raise ValueError("level must be non-negative")
        if prec != INF:
            prec = Fraction(prec)
        c = list(coeffs) if reduced else _reduce(p, n, list(coeffs))
        if prec != INF:
            k = _ceil(prec) - shift
            if k <= 0:
                c = [0] * len(c)
            else:
                mod = p ** k
                c = [x % mod for x in c]
        g = math.gcd(*c) if c else 0
        if g == 0:
            shift = 0
        else:
            v, _ = split_int(g, p)
            if v:
                q = p ** v
                c = [x // q for x in c]
                shift += v
        self.p = p
        self.n = n
        self.coeffs = tuple(c)
        self.shift = shift
        self.prec = prec
        self._val = None

    # construction -----------------------------------------------------------

    @classmethod
    def zero(cls, p: int, n: int, prec=INF) -> "CycloElement":
        return cls(p, n, [0] * degree(p, n), 0, prec, reduced=True)

    @classmethod
    def from_int(cls, p: int, n: int, x: int, prec=INF) -> "CycloElement":
        return cls(p, n, [x] + [0] * (degree(p, n) - 1), 0, prec, reduced=True)

    @classmethod
    def from_padic(cls, x: PadicNumber, n: int) -> "CycloElement":
        d = degree(x.p, n)
        if x.is_exact_zero:
            return cls.zero(x.p, n)
        if x.unit == 0:
            return cls(x.p, n, [0] * d, 0, x.precision, reduced=True)
        return cls(x.p, n, [x.unit] + [0] * (d - 1), x.valuation, x.precision, reduced=True)

    @classmethod
    def from_eps_coefficients(cls, p: int, n: int, coeffs, shift: int = 0, prec=INF) -> "CycloElement":
        """Element ``p**shift * sum(coeffs[i] * eps_n^i)``."""
        return cls(p, n, _poly.taylor_shift(list(coeffs), -1), shift, prec)

    # predicates and valuation ----------------------------------------------

    @property
    def d(self) -> int:
        return len(self.coeffs)

    @property
    def is_exact_zero(self) -> bool:
        return self.prec == INF and not any(self.coeffs)

    def valuation(self) -> Valuation:
        if self._val is None:
            if not any(self.coeffs):
                self._val = Valuation(INF) if self.prec == INF else Valuation(self.prec, exact=False)
            else:
                k = _eps_order_mod_p(self.p, self.n, self.coeffs)
                v = self.shift + Fraction(k, self.d)
                self._val = Valuation(v) if v < self.prec else Valuation(self.prec, exact=False)
        return self._val

    def lower_bound(self):
        """Smallest valuation the value could have."""
        return self.valuation().value

    def is_zero(self) -> bool:
        """True unless some known digit is nonzero."""
        return not self.valuation().determined

    # arithmetic -------------------------------------------------------------

    def _same_field(self, other: "CycloElement"):
        if other.p != self.p:
            raise ValueError(f"prime mismatch: {self.p} vs {other.p}")
        if other.n != self.n:
            raise ValueError(
                f"level mismatch: {self.n} vs {other.n}; lift explicitly")

    def _coerce(self, other):
        if isinstance(other, CycloElement):
            self._same_field(other)
            return other
        if isinstance(other, PadicNumber):
            return CycloElement.from_padic(other, self.n)
        if isinstance(other, int):
            return CycloElement.from_int(self.p, self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        if not any(other.coeffs):
            return self if self.prec == prec else CycloElement(
                self.p, self.n, self.coeffs, self.shift, prec, reduced=True)
        if not any(self.coeffs):
            return other if other.prec == prec else CycloElement(
                other.p, other.n, other.coeffs, other.shift, prec, reduced=True)
        s = min(self.shift, other.shift)
        fa = self.p ** (self.shift - s)
        fb = self.p ** (other.shift - s)
        c = [fa * x + fb * y for x, y in zip(self.coeffs, other.coeffs)]
        return CycloElement(self.p, self.n, c, s, prec, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.p, self.n, [-x for x in self.coeffs], self.shift, self.prec, reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _scale(self, x: PadicNumber) -> "CycloElement":
        if x.is_exact_zero or self.is_exact_zero:
            return CycloElement.zero(self.p, self.n)
        prec = min(self.prec + x.lower_bound(), x.precision + _cheap_lower_bound(self))
        return CycloElement(self.p, self.n, [x.unit * c for c in self.coeffs],
                            self.shift + (0 if x.unit == 0 else x.valuation), prec, reduced=True)

    def __mul__(self, other):
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError(f"prime mismatch: {self.p} vs {other.p}")
            return self._scale(other)
        if isinstance(other, int):
            if other == 0:
                return CycloElement.zero(self.p, self.n)
            return CycloElement(self.p, self.n, [other * c for c in self.coeffs],
                                self.shift, self.prec + split_int(other, self.p)[0], reduced=True)
        if not isinstance(other, CycloElement):
            return NotImplemented
        self._same_field(other)
        if self.is_exact_zero or other.is_exact_zero:
            return CycloElement.zero(self.p, self.n)
        prec = INF
        if self.prec != INF:
            prec = self.prec + other.lower_bound()
        if other.prec != INF:
            prec = min(prec, other.prec + self.lower_bound())
        if _is_constant(self.coeffs):
            c = [self.coeffs[0] * y for y in other.coeffs]
            return CycloElement(self.p, self.n, c, self.shift + other.shift, prec, reduced=True)
        if _is_constant(other.coeffs):
            c = [other.coeffs[0] * x for x in self.coeffs]
            return CycloElement(self.p, self.n, c, self.shift + other.shift, prec, reduced=True)
        prod = _poly.mul(list(self.coeffs), list(other.coeffs))
        return CycloElement(self.p, self.n, prod, self.shift + other.shift, prec)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CycloElement":
        if e < 0:
            return self.inverse() ** (-e)
        result = CycloElement.from_int(self.p, self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self, precision: int | None = None) -> "CycloElement":
        """Multiplicative inverse.

        An exact element is inverted to ``precision`` digits of relative
        precision (default :data:`DEFAULT_PRECISION`).
        """
        v = self.valuation()
        if not v.determined:
            raise ZeroDivisionError(f"cannot invert an element of valuation {v}")
        p, n, d = self.p, self.n, self.d
        vv = v.value
        rel = self.prec - vv if self.prec != INF else (precision or DEFAULT_PRECISION)
        if precision is not None:
            rel = min(rel, precision)
        k = int((vv - self.shift) * d)
        digits = _ceil(rel) + 1
        mod = p ** digits
        c = list(self.coeffs)
        shift = -self.shift
        if k:
            e = _eps_power(p, n, d - k, digits + 1)
            c = _reduce(p, n, _poly.mul(c, list(e)))
            c = [x % (p * mod) for x in c]
            if any(x % p for x in c):
                raise AssertionError("eps-shifted element is not divisible by p")
            c = [x // p for x in c]
            shift -= 1
        y = _unit_inverse(p, n, c, digits)
        if k:
            y = _reduce(p, n, _poly.mul(y, list(_eps_power(p, n, d - k, digits))))
        return CycloElement(p, n, y, shift, rel - vv)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = CycloElement.from_int(self.p, self.n, other)
        if isinstance(other, PadicNumber):
            other = CycloElement.from_padic(other, self.n)
        if not isinstance(other, CycloElement):
            return NotImplemented
        self._same_field(other)
        if self.is_exact_zero:
            return self
        rel = other.prec - other.lower_bound()
        rel = min(rel, self.prec - self.lower_bound()) if self.prec != INF else rel
        prec = None if rel == INF else _ceil(rel)
        return self * other.inverse(prec)

    def __eq__(self, other):
        if isinstance(other, (int, PadicNumber, CycloElement)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    # level changes ---------------------------------------------------------

    def lift(self, level: int) -> "CycloElement":
        """Image under Q_p(zeta_{p^n}) -> Q_p(zeta_{p^level}), zeta_{p^n} = zeta^(p^(level-n))."""
        if level < self.n:
            raise ValueError("can only lift to a higher level")
        if level == self.n:
            return self
        step = self.p ** (level - self.n)
        c = [0] * ((len(self.coeffs) - 1) * step + 1)
        c[::step] = self.coeffs
        return CycloElement(self.p, level, c, self.shift, self.prec)

    # views -----------------------------------------------------------------

    def zeta_coefficients(self) -> list[Fraction]:
        """Rational representatives of the coordinates in the zeta basis."""
        f = Fraction(self.p) ** self.shift
        return [c * f for c in self.coeffs]

    def eps_integers(self) -> tuple[int, list[int]]:
        """``(shift, b)`` with value ``p**shift * sum(b_i eps^i)``; b reduced when inexact."""
        b = _poly.taylor_shift(list(self.coeffs), 1)
        b += [0] * (self.d - len(b))
        if self.prec != INF:
            k = _ceil(self.prec) - self.shift
            mod = self.p ** max(k, 0)
            b = [x % mod for x in b]
        return self.shift, b

    def eps_coefficients(self) -> list[PadicNumber]:
        """Coordinates in the eps_n power basis, each with its own precision."""
        shift, b = self.eps_integers()
        out = []
        for i, x in enumerate(b):
            prec = INF if self.prec == INF else _ceil(self.prec - Fraction(i, self.d))
            if x == 0 and self.prec == INF:
                out.append(PadicNumber(self.p, 0, INF, DEFAULT_PRECISION))
            else:
                out.append(PadicNumber(self.p, x, shift, prec))
        return out

    def to_json(self) -> dict:
        shift, b = self.eps_integers()
        return {
            "p": self.p,
            "level": self.n,
            "precision": "exact" if self.prec == INF else str(self.prec),
            "shift": shift,
            "eps_coefficients": [str(x) for x in b],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CycloElement":
        prec = INF if doc["precision"] == "exact" else Fraction(doc["precision"])
        coeffs = [int(x) for x in doc["eps_coefficients"]]
        return cls.from_eps_coefficients(int(doc["p"]), int(doc["level"]), coeffs, int(doc["shift"]), prec)

    def __repr__(self):
        return f"CycloElement(p={self.p}, n={self.n}, val={self.valuation()}, prec={self.prec})"


def _cheap_lower_bound(x: CycloElement):
    """The cached valuation if known, else the p-content (off by less than 1)."""
    if x._val is not None:
        return x._val.value
    return x.shift if any(x.coeffs) else x.prec


def scalar_combination(terms, p: int, n: int) -> CycloElement:
    """sum(x * a) over pairs (CycloElement x, PadicNumber a) in one pass.

    Same value as repeated ``*`` and ``+`` but normalizes only once; the
    precision bound may be slightly weaker since it uses the p-content of each
    x rather than its exact valuation.
    """
    live = []
    prec = INF
    for x, a in terms:
        if x.is_exact_zero or a.is_exact_zero:
            continue
        lb = _cheap_lower_bound(x)
        prec = min(prec, x.prec + a.lower_bound(), a.precision + lb)
        if a.unit and any(x.coeffs):
            live.append((x.shift + a.valuation, a.unit, x.coeffs))
    if not live:
        return CycloElement(p, n, [0] * degree(p, n), 0, prec, reduced=True)
    base = min(s for s, _, _ in live)
    acc = [0] * degree(p, n)
    for s, u, c in live:
        f = u * p ** (s - base)
        acc = [y + f * z for y, z in zip(acc, c)]
    return CycloElement(p, n, acc, base, prec, reduced=True)


def _is_constant(c) -> bool:
    return not any(c[1:])


@lru_cache(maxsize=256)
def _eps_power(p: int, n: int, e: int, digits: int) -> tuple[int, ...]:
    """zeta-coordinates of eps_n^e modulo p**digits."""
    mod = p ** digits
    result = [1]
    base = [-1, 1]
    while e:
        if e & 1:
            result = [x % mod for x in _reduce(p, n, _poly.mul(result, base))]
        e >>= 1
        if e:
            base = [x % mod for x in _reduce(p, n, _poly.mul(base, base))]
    return tuple(_reduce(p, n, result))


def _unit_inverse(p: int, n: int, c: list[int], digits: int) -> list[int]:
    """Inverse of a unit of Z_p[zeta] modulo p**digits by Newton iteration."""
    mod = p ** digits
    d = degree(p, n)
    u0 = sum(c) % p
    if u0 == 0:
        raise AssertionError("not a unit")
    y = [pow(u0, -1, p)] + [0] * (d - 1)
    # the error 1 - c*y lies in eps^e; Newton squares it
    e = 1
    target = d * digits
    while e < target:
        cy = _reduce(p, n, _poly.mul(c, y))
        cy = [(-x) % mod for x in cy]
        cy[0] = (cy[0] + 2) % mod
        y = [x % mod for x in _reduce(p, n, _poly.mul(y, cy))]
        e *= 2
    return y


# constructors of distinguished elements ------------------------------------

def zeta(p: int, n: int) -> CycloElement:
    check_prime(p)
    return CycloElement(p, n, [0, 1])


def eps(p: int, n: int, m: int | None = None) -> CycloElement:
    """eps_m = zeta_{p^m} - 1 as an element of level n (default m = n)."""
    check_prime(p)
    m = n if m is None else m
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    c = [0] * (p ** (n - m) + 1)
    c[0] = -1
    c[-1] += 1
    return CycloElement(p, n, c)


@lru_cache(maxsize=None)
def phi_poly(p: int, n: int) -> tuple[int, ...]:
    """Coefficients of Phi_{p^n}(1 + X), lowest degree first."""
    check_prime(p)
    if n < 1:
        raise ValueError("Phi_{p^n} needs n >= 1")
    b = p ** (n - 1)
    d = b * (p - 1)
    # Phi_{p^n}(Y) = sum_{j<p} Y^(j b)
    return tuple(sum(math.comb(j * b, i) for j in range(p)) for i in range(d + 1))


@lru_cache(maxsize=None)
def phi_at_zeta(p: int, k: int, n: int) -> CycloElement:
    """Phi_{p^k}(zeta_{p^n}) as an exact element of level n.

    Zero when k = n, p when k > n and eps_{n-k}/eps_{n-k+1} when k < n.
    """
    check_prime(p)
    if k < 1 or n < 1:
        raise ValueError("need k >= 1 and n >= 1")
    b = p ** (k - 1)
    c = [0] * ((p - 1) * b + 1)
    for j in range(p):
        c[j * b] = 1
    return CycloElement(p, n, c)


def cyclo_val(x: CycloElement) -> Valuation:
    """Normalized valuation (ord_p(p) = 1) of a cyclotomic element."""
    return x.valuation()


def lift(x: CycloElement, level: int) -> CycloElement:
    return x.lift(level)


def require_exact_level(x: CycloElement, level: int) -> None:
    if x.n != level:
        raise PrecisionError(f"expected an element of level {level}, got level {x.n}")


@lru_cache(maxsize=None)
def eps_ratio(p: int, n: int, m: int) -> CycloElement:
    """eps_m / eps_{m+1} at level n, by exact long division of zeta-polynomials.

    eps_j = Y^(p^(n-j)) - 1 and the divisor is monic, so the quotient is
    exact over Z; a nonzero remainder would be a bug.
    """
    if not 0 <= m < n:
        raise ValueError("need 0 <= m < n")
    num = [0] * (p ** (n - m) + 1)
    num[0], num[-1] = -1, 1
    den = [0] * (p ** (n - m - 1) + 1)
    den[0], den[-1] = -1, 1
    q, r = _poly.divmod_monic(num, den)
    if any(r):
        raise AssertionError("eps_{m+1} does not divide eps_m")
    return CycloElement(p, n, q)
