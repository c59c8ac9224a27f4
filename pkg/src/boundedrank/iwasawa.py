"""Truncated power series over Z_p in the Iwasawa variable X = gamma - 1.

Also home to finite-order characters of Gamma (identified with the point
eps_n = zeta_{p^n} - 1 they send X to) and to the mu/lambda invariants read
off the coefficient Newton polygon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import _poly
from .cyclotomic import CycloElement, degree, phi_poly
from .padic import DEFAULT_PRECISION, INF, PadicNumber, Valuation, check_prime, split_int, vp_int


class IwasawaSeries:
    """``p**shift * sum(r_i X^i)`` known modulo ``p**prec`` and modulo ``X**trunc``.

    ``trunc is None`` means the coefficient list is the whole series (a
    polynomial).  ``prec == INF`` means the coefficients are exact.
    """

    __slots__ = ("p", "ints", "shift", "prec", "trunc")

    def __init__(self, p: int, ints, shift: int = 0, prec=DEFAULT_PRECISION, trunc: int | None = None):
        check_prime(p)
        r = list(ints)
        if trunc is not None:
            r = r[:trunc]
            r += [0] * (trunc - len(r))
        if prec != INF:
            k = prec - shift
            if k <= 0:
                r = [0] * len(r)
            else:
                mod = p ** k
                r = [x % mod for x in r]
        if trunc is None:
            r = _poly.trim(r)
        g = math.gcd(*r) if r else 0
        if g == 0:
            shift = 0
        else:
            v, _ = split_int(g, p)
            if v:
                q = p ** v
                r = [x // q for x in r]
                shift += v
        self.p = p
        self.ints = tuple(r)
        self.shift = shift
        self.prec = prec
        self.trunc = trunc

    # construction -----------------------------------------------------------

    @classmethod
    def from_coefficients(cls, p: int, coeffs, precision: int = DEFAULT_PRECISION,
                          truncation: int | None = None) -> "IwasawaSeries":
        """Build from ints, Fractions or PadicNumbers.

        Plain integers are exact and get capped to ``precision``; a list of
        exact zeros gives the exact zero series.
        """
        pads = []
        for c in coeffs:
            if isinstance(c, PadicNumber):
                pads.append(c)
            else:
                pads.append(PadicNumber.from_rational(p, Fraction(c), precision))
        if all(c.is_exact_zero for c in pads):
            return cls(p, [], 0, INF, truncation)
        prec = min(c.precision for c in pads)
        nonzero = [c for c in pads if c.unit]
        shift = min(c.valuation for c in nonzero) if nonzero else 0
        shift = min(shift, 0)
        ints = [0 if not c.unit else c.unit * p ** (c.valuation - shift) for c in pads]
        return cls(p, ints, shift, prec, truncation)

    @classmethod
    def exact(cls, p: int, ints) -> "IwasawaSeries":
        """An exactly known polynomial with integer coefficients."""
        return cls(p, ints, 0, INF, None)

    @classmethod
    def constant(cls, x: PadicNumber) -> "IwasawaSeries":
        if x.is_exact_zero:
            return cls(x.p, [], 0, INF)
        if x.unit == 0:
            return cls(x.p, [], 0, x.precision)
        return cls(x.p, [x.unit], x.valuation, x.precision)

    @classmethod
    def zero(cls, p: int) -> "IwasawaSeries":
        return cls(p, [], 0, INF)

    # views ------------------------------------------------------------------

    @property
    def coefficients(self) -> list[PadicNumber]:
        prec = self.prec if self.prec != INF else DEFAULT_PRECISION
        out = []
        for r in self.ints:
            if r == 0 and self.prec == INF:
                out.append(PadicNumber(self.p, 0, INF, prec))
            else:
                out.append(PadicNumber(self.p, r, self.shift, prec))
        return out

    def coefficient(self, i: int) -> PadicNumber:
        if i < len(self.ints):
            return self.coefficients[i]
        if self.trunc is not None and i >= self.trunc:
            raise IndexError(f"X^{i} lies beyond the truncation X^{self.trunc}")
        prec = self.prec if self.prec != INF else DEFAULT_PRECISION
        return PadicNumber(self.p, 0, INF if self.prec == INF else prec, prec)

    @property
    def is_exact_zero(self) -> bool:
        return self.prec == INF and not any(self.ints) and self.trunc is None

    def is_zero(self) -> bool:
        return not any(self.ints)

    def degree(self) -> int:
        """Index of the last stored nonzero coefficient (-1 for zero)."""
        for i in range(len(self.ints) - 1, -1, -1):
            if self.ints[i]:
                return i
        return -1

    def lower_bound(self):
        """Lower bound for the valuation of every coefficient."""
        if not any(self.ints):
            return self.prec
        return self.shift

    def __len__(self):
        return len(self.ints)

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, IwasawaSeries):
            if other.p != self.p:
                raise ValueError(f"prime mismatch: {self.p} vs {other.p}")
            return other
        if isinstance(other, PadicNumber):
            return IwasawaSeries.constant(other)
        if isinstance(other, int):
            return IwasawaSeries.exact(self.p, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        trunc = _min_trunc(self.trunc, other.trunc)
        s = min(self.shift, other.shift)
        a = [x * self.p ** (self.shift - s) for x in self.ints]
        b = [x * self.p ** (other.shift - s) for x in other.ints]
        return IwasawaSeries(self.p, _poly.add(a, b), s, prec, trunc)

    __radd__ = __add__

    def __neg__(self):
        return IwasawaSeries(self.p, [-x for x in self.ints], self.shift, self.prec, self.trunc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact_zero or other.is_exact_zero:
            return IwasawaSeries.zero(self.p)
        prec = min(self.prec + other.lower_bound(), other.prec + self.lower_bound())
        trunc = _min_trunc(
            None if self.trunc is None else self.trunc + _ord_x(other.ints),
            None if other.trunc is None else other.trunc + _ord_x(self.ints))
        return IwasawaSeries(self.p, _poly.mul(list(self.ints), list(other.ints)),
                             self.shift + other.shift, prec, trunc)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = IwasawaSeries.exact(self.p, [1])
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def divmod_monic(self, m) -> tuple["IwasawaSeries", "IwasawaSeries"]:
        """Division by a monic integer polynomial (polynomials only)."""
        if self.trunc is not None:
            raise ValueError("division needs a polynomial, not a truncated series")
        q, r = _poly.divmod_monic(list(self.ints), list(m))
        return (IwasawaSeries(self.p, q, self.shift, self.prec),
                IwasawaSeries(self.p, r, self.shift, self.prec))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "precision": "exact" if self.prec == INF else self.prec,
            "truncation": self.trunc,
            "shift": self.shift,
            "coefficients": [str(x) for x in self.ints],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "IwasawaSeries":
        prec = INF if doc["precision"] == "exact" else int(doc["precision"])
        return cls(int(doc["p"]), [int(x) for x in doc["coefficients"]], int(doc["shift"]),
                   prec, doc.get("truncation"))

    def __repr__(self):
        return f"IwasawaSeries(p={self.p}, shift={self.shift}, ints={list(self.ints)[:8]}{'...' if len(self.ints) > 8 else ''})"


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _ord_x(ints) -> int:
    for i, x in enumerate(ints):
        if x:
            return i
    return 0


@dataclass(frozen=True)
class Character:
    """Character of Gamma of conductor p^(n+1), trivial on Delta.

    It sends the fixed topological generator to zeta_{p^n}, so evaluating a
    series at it means substituting X = eps_n.
    """

    p: int
    conductor_exponent: int

    def __post_init__(self):
        check_prime(self.p)
        if self.conductor_exponent < 2:
            raise ValueError("conductor exponent must be at least 2")

    @property
    def level(self) -> int:
        return self.conductor_exponent - 1

    @classmethod
    def of_level(cls, p: int, n: int) -> "Character":
        return cls(p, n + 1)


@dataclass(frozen=True)
class MuLambda:
    mu: int | None
    lam: int | None
    certified: bool

    def to_json(self):
        return {"mu": self.mu, "lambda": self.lam, "certified": self.certified}


def omega_poly(p: int, n: int) -> IwasawaSeries:
    """omega_n(X) = (1 + X)^(p^n) - 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    m = p ** n
    return IwasawaSeries.exact(p, [0] + [math.comb(m, i) for i in range(1, m + 1)])


def phi_series(p: int, n: int) -> IwasawaSeries:
    """Phi_{p^n}(1 + X) as an exact series."""
    return IwasawaSeries.exact(p, phi_poly(p, n))


def _horner_eps(p: int, n: int, ints, mod: int | None) -> list[int]:
    """zeta-coordinates of sum(ints[i] * eps_n^i)."""
    d = degree(p, n)
    if n == 0:
        return [ints[0] if ints else 0]
    b = p ** (n - 1)
    acc = [0] * d
    for a in reversed(ints):
        top = acc[-1]
        acc = [a - acc[0]] + [x - y for x, y in zip(acc, acc[1:])]
        if top:
            for j in range(p - 1):
                acc[j * b] -= top
        if mod is not None:
            acc = [x % mod for x in acc]
    return acc


def eval_at_character(f: IwasawaSeries, theta: Character | int) -> CycloElement:
    """f(eps_n) for the level-n character theta.

    The returned element's precision already accounts for the p-precision of
    the coefficients and for the unknown tail beyond the X-truncation, which
    has valuation at least trunc / (p^(n-1)(p-1)).
    """
    n = theta.level if isinstance(theta, Character) else theta
    if isinstance(theta, Character) and theta.p != f.p:
        raise ValueError("character and series live over different primes")
    p = f.p
    if f.is_exact_zero:
        return CycloElement.zero(p, n)
    prec = f.prec
    if f.trunc is not None:
        prec = min(prec, min(f.shift, 0) + Fraction(f.trunc, degree(p, n)) if n else INF)
    mod = None
    if prec != INF:
        k = math.ceil(prec) - f.shift
        mod = p ** max(k, 0)
    c = _horner_eps(p, n, f.ints, mod)
    return CycloElement(p, n, c, f.shift, prec, reduced=True)


def newton_invariants(f: IwasawaSeries) -> MuLambda:
    """mu and lambda from the lowest point of the coefficient Newton polygon.

    Certified when the minimum is known exactly and nothing beyond the
    truncation could undercut it (the unknown tail of a Z_p-series only has
    valuations >= 0, so a truncated series certifies only when mu = 0).
    """
    best = None
    for i, r in enumerate(f.ints):
        if r:
            v = f.shift + vp_int(r, f.p)
            if best is None or v < best[0]:
                best = (v, i)
    if best is None:
        return MuLambda(None, None, False)
    mu, lam = best
    certified = mu >= 0 and (f.trunc is None or (mu == 0 and lam < f.trunc))
    return MuLambda(mu, lam, certified)


@dataclass(frozen=True)
class WeierstrassReport:
    n: int
    invariants: MuLambda
    observed: Valuation | None
    predicted: Fraction | None
    holds: bool | None
    diagnostic: str | None = None

    def to_json(self):
        return {
            "n": self.n,
            **self.invariants.to_json(),
            "observed": None if self.observed is None else self.observed.to_json(),
            "predicted": None if self.predicted is None else str(self.predicted),
            "holds": self.holds,
            "diagnostic": self.diagnostic,
        }


def weierstrass_valuation_check(f: IwasawaSeries, n: int) -> WeierstrassReport:
    """Compare ord_p f(eps_n) with mu + lambda / (p^n - p^(n-1))."""
    inv = newton_invariants(f)
    if not inv.certified:
        return WeierstrassReport(n, inv, None, None, None, "mu/lambda not certified at this precision")
    d = degree(f.p, n)
    if n < 1 or d <= inv.lam:
        return WeierstrassReport(n, inv, None, None, None,
                                 f"n too small: need p^(n-1)(p-1) > lambda = {inv.lam}")
    predicted = inv.mu + Fraction(inv.lam, d)
    observed = eval_at_character(f, Character.of_level(f.p, n)).valuation()
    return WeierstrassReport(n, inv, observed, predicted, observed == predicted)
