"""Fixed-precision arithmetic in Z_p and Q_p.

A :class:`PadicNumber` is ``unit * p**valuation`` known modulo ``p**precision``
(absolute precision).  The unit is coprime to ``p`` whenever the valuation is
finite.  Two kinds of zero exist:

* the exact zero (``valuation == INF``), only produced when constructed so or
  by multiplying with another exact zero;
* "zero up to precision N" (``unit == 0`` and ``valuation == precision``),
  whose true valuation is only known to be at least ``N``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

INF = math.inf
DEFAULT_PRECISION = 20


class NonUnitError(ArithmeticError):
    """Raised when a unit was required but the argument is not one."""


class PrecisionError(ValueError):
    """Raised when an operation would need digits that are not known."""


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    return all(p % q for q in range(3, math.isqrt(p) + 1, 2))


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_odd_prime(p):
        raise ValueError(f"p must be an odd prime, got {p!r}")
    return p


def vp_int(x: int, p: int) -> int | float:
    """p-adic valuation of an integer; INF for zero."""
    if x == 0:
        return INF
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def split_int(x: int, p: int) -> tuple[int, int]:
    """Return ``(v, u)`` with ``x = u * p**v`` and ``p`` not dividing ``u``."""
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


class Valuation:
    """A rational valuation that is either exact or only a lower bound.

    ``Valuation(Fraction(1, 2))`` is exactly 1/2, ``Valuation(20, exact=False)``
    means "at least 20" and ``Valuation(INF)`` is the valuation of an exact
    zero.
    """

    __slots__ = ("value", "exact")

    def __init__(self, value, exact: bool = True):
        if value != INF:
            value = Fraction(value)
        self.value = value
        self.exact = exact

    @property
    def is_infinite(self) -> bool:
        return self.value == INF

    @property
    def determined(self) -> bool:
        """True when the valuation is a finite, exactly known number."""
        return self.exact and self.value != INF

    def __add__(self, other: "Valuation | int | Fraction") -> "Valuation":
        if not isinstance(other, Valuation):
            other = Valuation(other)
        if self.is_infinite and self.exact or other.is_infinite and other.exact:
            return Valuation(INF)
        return Valuation(self.value + other.value, self.exact and other.exact)

    __radd__ = __add__

    def __sub__(self, other: "int | Fraction") -> "Valuation":
        # only shifting by an exact number makes sense for lower bounds
        return Valuation(self.value - Fraction(other), self.exact)

    def strictly_below(self, other: "Valuation") -> bool:
        """True if this valuation is provably smaller than ``other``."""
        return self.exact and self.value < other.value

    def __eq__(self, other):
        if isinstance(other, Valuation):
            return self.value == other.value and self.exact == other.exact
        if isinstance(other, (int, Fraction, float)):
            return self.exact and self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.exact))

    def __repr__(self):
        if self.exact:
            return f"Valuation({self.value})"
        return f"Valuation(>={self.value})"

    def __str__(self):
        if self.is_infinite:
            return "inf"
        return str(self.value) if self.exact else f">={self.value}"

    def to_json(self):
        if self.is_infinite:
            return "inf"
        s = str(self.value)
        return s if self.exact else ">=" + s


class PadicNumber:
    """Element of Q_p known modulo ``p**precision``."""

    __slots__ = ("p", "unit", "valuation", "precision")

    def __init__(self, p: int, unit: int, valuation, precision: int):
        if precision != INF and precision != int(precision):
            raise ValueError("precision must be an integer")
        if valuation == INF:
            unit = 0
        elif unit == 0:
            valuation = precision
        else:
            v, unit = split_int(unit, p)
            valuation = valuation + v
            if valuation >= precision:
                unit, valuation = 0, precision
            elif precision != INF:
                unit %= p ** (precision - valuation)
        self.p = p
        self.unit = unit
        self.valuation = valuation
        self.precision = precision

    # construction -----------------------------------------------------------

    @classmethod
    def from_int(cls, p: int, x: int, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        """Exact integer capped to ``precision``; 0 stays an exact zero."""
        if x == 0:
            return cls(p, 0, INF, precision)
        return cls(p, x, 0, precision)

    @classmethod
    def from_rational(cls, p: int, x, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        x = Fraction(x)
        if x == 0:
            return cls(p, 0, INF, precision)
        vn, num = split_int(x.numerator, p)
        vd, den = split_int(x.denominator, p)
        v = vn - vd
        if v >= precision:
            return cls(p, 0, 0, precision)
        mod = p ** (precision - v)
        return cls(p, num * pow(den, -1, mod), v, precision)

    @classmethod
    def zero(cls, p: int, precision: int = DEFAULT_PRECISION, exact: bool = True) -> "PadicNumber":
        return cls(p, 0, INF if exact else precision, precision)

    # predicates -------------------------------------------------------------

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation == INF

    def is_zero(self) -> bool:
        """True when every known digit vanishes."""
        return self.unit == 0

    def is_unit(self) -> bool:
        return self.unit != 0 and self.valuation == 0

    def val(self) -> Valuation:
        if self.valuation == INF:
            return Valuation(INF)
        if self.unit == 0:
            return Valuation(self.precision, exact=False)
        return Valuation(self.valuation)

    def lower_bound(self):
        """Smallest valuation the value could have."""
        return self.valuation

    # conversions ------------------------------------------------------------

    def to_fraction(self) -> Fraction:
        """A rational representative of the value."""
        if self.unit == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation

    def residue(self, k: int | None = None) -> int:
        """Integer representative modulo ``p**k`` (default: the precision).

        Only defined for p-adic integers.
        """
        if self.unit and self.valuation < 0:
            raise NonUnitError(f"value has negative valuation {self.valuation}")
        k = self.precision if k is None else k
        if self.unit == 0:
            return 0
        return (self.unit * self.p ** self.valuation) % self.p ** k

    # arithmetic -------------------------------------------------------------

    def _check(self, other: "PadicNumber"):
        if other.p != self.p:
            raise ValueError(f"prime mismatch: {self.p} vs {other.p}")

    def __add__(self, other):
        if isinstance(other, int):
            if other == 0:
                return self
            other = PadicNumber(self.p, other, 0, self.precision)
        elif not isinstance(other, PadicNumber):
            return NotImplemented
        self._check(other)
        prec = min(self.precision, other.precision)
        if self.is_exact_zero and other.is_exact_zero:
            return PadicNumber(self.p, 0, INF, prec)
        if self.is_exact_zero:
            return other if other.precision == prec else reduce_precision(other, prec)
        if other.is_exact_zero:
            return self if self.precision == prec else reduce_precision(self, prec)
        v = min(self.valuation, other.valuation)
        u = self.unit * self.p ** (self.valuation - v) + other.unit * self.p ** (other.valuation - v)
        return PadicNumber(self.p, u, v, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact_zero:
            return self
        return PadicNumber(self.p, -self.unit, self.valuation, self.precision)

    def __sub__(self, other):
        if isinstance(other, (int, PadicNumber)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return PadicNumber(self.p, 0, INF, self.precision)
            vk, uk = split_int(other, self.p)
            if self.is_exact_zero:
                return self
            return PadicNumber(self.p, self.unit * uk, self.valuation + vk, self.precision + vk)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        self._check(other)
        if self.is_exact_zero or other.is_exact_zero:
            return PadicNumber(self.p, 0, INF, min(self.precision, other.precision))
        prec = min(self.precision + other.valuation, other.precision + self.valuation)
        return PadicNumber(self.p, self.unit * other.unit, self.valuation + other.valuation, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            vk, uk = split_int(other, self.p)
            if self.unit == 0:
                return PadicNumber(self.p, 0, self.valuation, self.precision - vk)
            rel = self.precision - self.valuation
            inv = pow(uk, -1, self.p ** rel)
            return PadicNumber(self.p, self.unit * inv, self.valuation - vk, self.precision - vk)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        self._check(other)
        if other.unit == 0:
            raise ZeroDivisionError("division by a p-adic zero")
        if self.is_exact_zero:
            return self
        rel = other.precision - other.valuation
        if self.unit == 0:
            return PadicNumber(self.p, 0, 0, self.precision - other.valuation)
        rel = min(rel, self.precision - self.valuation)
        v = self.valuation - other.valuation
        inv = pow(other.unit, -1, self.p ** rel)
        return PadicNumber(self.p, self.unit * inv, v, v + rel)

    def __pow__(self, e: int):
        if e < 0:
            return PadicNumber.from_int(self.p, 1, self.precision) / self ** (-e)
        result = self
        for _ in range(e - 1):
            result = result * self
        return result if e else PadicNumber.from_int(self.p, 1, self.precision)

    def __eq__(self, other):
        if isinstance(other, int):
            other = PadicNumber.from_int(self.p, other, self.precision)
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"PadicNumber({self})"

    def __str__(self):
        if self.is_exact_zero:
            return "0"
        return f"{self.unit} * {self.p}^{self.valuation} (mod {self.p}^{self.precision})"


def val_p(x: PadicNumber) -> Valuation:
    """Valuation of ``x``: exact, INF for an exact zero, else a lower bound."""
    return x.val()


def invert_unit(x: PadicNumber) -> PadicNumber:
    """Inverse of a p-adic unit at the precision of ``x``."""
    if x.unit == 0 or x.valuation != 0:
        raise NonUnitError(f"cannot invert a non-unit: valuation {x.val()}")
    return PadicNumber(x.p, pow(x.unit, -1, x.p ** x.precision), 0, x.precision)


def reduce_precision(x: PadicNumber, precision: int) -> PadicNumber:
    """Same value known only modulo ``p**precision``."""
    if precision < 1:
        raise ValueError("precision must be positive")
    if precision > x.precision:
        raise PrecisionError(
            f"cannot raise precision from {x.precision} to {precision}")
    if x.is_exact_zero:
        return PadicNumber(x.p, 0, INF, precision)
    return PadicNumber(x.p, x.unit, x.valuation, precision)


def padic(p: int, x, precision: int = DEFAULT_PRECISION) -> PadicNumber:
    """Coerce an int, Fraction or PadicNumber to a PadicNumber."""
    if isinstance(x, PadicNumber):
        if x.p != p:
            raise ValueError(f"prime mismatch: {x.p} vs {p}")
        return x
    if isinstance(x, int):
        return PadicNumber.from_int(p, x, precision)
    if isinstance(x, Rational):
        return PadicNumber.from_rational(p, x, precision)
    raise TypeError(f"cannot convert {type(x).__name__} to a p-adic number")
