"""Configurable-precision real arithmetic with certified absolute error bounds.

Values are MPFR floats (via gmpy2) carried together with an upper bound on
their distance from the true real they stand for.  Value arithmetic rounds to
nearest at the context precision; error bounds are always evaluated with
upward rounding, so they over-approximate the propagated error.
"""

from __future__ import annotations

import enum
import functools
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpfr

from .errors import IndeterminateComparison, PrecisionError

__all__ = [
    "ApproxReal",
    "ErrorPolicy",
    "NumericContext",
    "DEFAULT_PRECISION",
    "MIN_PRECISION",
    "make_context",
    "golden_ratio",
    "phi_power",
    "sqrt5",
    "dist_nearest_int",
    "geometric_sum",
]

DEFAULT_PRECISION = 256
MIN_PRECISION = 64


class ErrorPolicy(enum.Enum):
    TRACKED = "tracked"
    PLAIN = "plain"


@dataclass(frozen=True)
class NumericContext:
    """Working precision and error-tracking policy.

    Contexts are immutable and hashable, so they double as cache keys.
    """

    precision_bits: int = DEFAULT_PRECISION
    error_policy: ErrorPolicy = ErrorPolicy.TRACKED

    def __post_init__(self):
        if not isinstance(self.precision_bits, int) or isinstance(self.precision_bits, bool):
            raise TypeError("precision_bits must be an int")
        if self.precision_bits < MIN_PRECISION:
            raise PrecisionError(
                f"precision_bits={self.precision_bits} is below the minimum of {MIN_PRECISION}"
            )
        if not isinstance(self.error_policy, ErrorPolicy):
            object.__setattr__(self, "error_policy", ErrorPolicy(self.error_policy))

    @property
    def tracked(self) -> bool:
        return self.error_policy is ErrorPolicy.TRACKED

    @property
    def decimal_digits(self) -> int:
        return int(self.precision_bits * math.log10(2))

    def gmp(self, rounding=gmpy2.RoundToNearest):
        """A gmpy2 context at this precision, usable as a ``with`` block."""
        return gmpy2.context(precision=self.precision_bits, round=rounding)

    def up(self):
        return self.gmp(gmpy2.RoundUp)

    def down(self):
        return self.gmp(gmpy2.RoundDown)

    @property
    def unit(self) -> mpfr:
        """Relative rounding bound 2**-p for round-to-nearest."""
        return _pow2(-self.precision_bits)

    def with_precision(self, precision_bits: int) -> NumericContext:
        return NumericContext(precision_bits, self.error_policy)

    def exact(self, x) -> ApproxReal:
        """Lift an int, Fraction, float, mpfr or decimal string into this context."""
        return _lift(x, self)


def make_context(precision_bits: int = DEFAULT_PRECISION, error_policy="tracked") -> NumericContext:
    return NumericContext(precision_bits, ErrorPolicy(error_policy))


def _pow2(e: int) -> mpfr:
    with gmpy2.context(precision=64):
        return gmpy2.mul_2exp(mpfr(1), e)


Number = Union[int, Fraction, float, "ApproxReal"]


def _lift(x, ctx: NumericContext) -> ApproxReal:
    if isinstance(x, ApproxReal):
        if x.ctx == ctx:
            return x
        return x.round_to(ctx)
    zero = mpfr(0)
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, str):
        x = Fraction(x)
    if isinstance(x, int):
        with ctx.gmp():
            v = mpfr(x)
        if int(v) == x:
            return ApproxReal(v, zero, ctx)
        return ApproxReal(v, _err(ctx, abs(v) * ctx.unit), ctx)
    if isinstance(x, Fraction):
        with ctx.gmp():
            v = mpfr(x.numerator) / mpfr(x.denominator)
        if Fraction(*v.as_integer_ratio()) == x:
            return ApproxReal(v, zero, ctx)
        with ctx.up():
            e = abs(v) * 2 * ctx.unit
        return ApproxReal(v, _err(ctx, e), ctx)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("cannot lift a non-finite float")
        return _lift(Fraction(x), ctx)
    if isinstance(x, _MPFR):
        if not gmpy2.is_finite(x):
            raise ValueError("cannot lift a non-finite mpfr")
        return _lift(Fraction(*x.as_integer_ratio()), ctx)
    if isinstance(x, numbers.Rational):
        return _lift(Fraction(x.numerator, x.denominator), ctx)
    raise TypeError(f"cannot lift {type(x).__name__} into ApproxReal")


_MPFR = type(mpfr(0))


def _err(ctx: NumericContext, e) -> mpfr:
    if not ctx.tracked:
        return mpfr(0)
    return e


@dataclass(frozen=True, eq=False)
class ApproxReal:
    """A real number known to lie within ``abs_error`` of ``value``."""

    value: mpfr
    abs_error: mpfr
    ctx: NumericContext

    def __post_init__(self):
        if self.abs_error < 0 or gmpy2.is_nan(self.abs_error):
            raise ValueError("abs_error must be a non-negative number")

    # enclosure ------------------------------------------------------------

    def lower(self) -> mpfr:
        with self.ctx.down():
            return self.value - self.abs_error

    def upper(self) -> mpfr:
        with self.ctx.up():
            return self.value + self.abs_error

    def contains(self, x) -> bool:
        other = _lift(x, self.ctx)
        return other.lower() <= self.upper() and self.lower() <= other.upper()

    def compare(self, other) -> int:
        """Return -1 if certainly self < other, +1 if certainly self > other.

        Raises IndeterminateComparison when the enclosures overlap.
        """
        o = _lift(other, self.ctx)
        if self.upper() < o.lower():
            return -1
        if self.lower() > o.upper():
            return 1
        raise IndeterminateComparison(
            f"cannot order {self} and {o} at {self.ctx.precision_bits} bits; raise the precision"
        )

    def certainly_positive(self) -> bool:
        return self.lower() > 0

    def round_to(self, ctx: NumericContext) -> ApproxReal:
        with ctx.gmp():
            v = mpfr(self.value)
        with ctx.up():
            e = self.abs_error + abs(v - self.value) if ctx.tracked else mpfr(0)
        return ApproxReal(v, e, ctx)

    # arithmetic -----------------------------------------------------------

    def _rounded(self, v: mpfr, propagated) -> ApproxReal:
        ctx = self.ctx
        if not ctx.tracked:
            return ApproxReal(v, mpfr(0), ctx)
        with ctx.up():
            e = propagated + abs(v) * ctx.unit
        return ApproxReal(v, e, ctx)

    def __add__(self, other):
        try:
            o = _lift(other, self.ctx)
        except TypeError:
            return NotImplemented
        with self.ctx.gmp():
            v = self.value + o.value
        with self.ctx.up():
            prop = self.abs_error + o.abs_error
        return self._rounded(v, prop)

    __radd__ = __add__

    def __neg__(self):
        # unary ops on mpfr round to the active gmpy2 context, not the operand's
        with self.ctx.gmp():
            v = -self.value
        return ApproxReal(v, self.abs_error, self.ctx)

    def __sub__(self, other):
        try:
            o = _lift(other, self.ctx)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = _lift(other, self.ctx)
        except TypeError:
            return NotImplemented
        with self.ctx.gmp():
            v = self.value * o.value
        with self.ctx.up():
            prop = (
                abs(self.value) * o.abs_error
                + abs(o.value) * self.abs_error
                + self.abs_error * o.abs_error
            )
        return self._rounded(v, prop)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = _lift(other, self.ctx)
        except TypeError:
            return NotImplemented
        if not (o.lower() > 0 or o.upper() < 0):
            raise ZeroDivisionError(f"divisor enclosure {o} contains zero")
        with self.ctx.gmp():
            v = self.value / o.value
        with self.ctx.up():
            # |a'/b' - a/b| <= (e_a + |a/b| e_b) / (|b| - e_b)
            quotient = abs(v) * (1 + 2 * self.ctx.unit)
            gap = -(o.abs_error - abs(o.value))
            prop = (self.abs_error + quotient * o.abs_error) / gap
        return self._rounded(v, prop)

    def __rtruediv__(self, other):
        return _lift(other, self.ctx) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return _lift(1, self.ctx)
        if n < 0:
            return 1 / (self ** (-n))
        with self.ctx.gmp():
            v = self.value ** n
        with self.ctx.up():
            big = abs(self.value) + self.abs_error
            prop = n * big ** (n - 1) * self.abs_error if self.abs_error else mpfr(0)
        return self._rounded(v, prop)

    def __abs__(self):
        with self.ctx.gmp():
            v = abs(self.value)
        return ApproxReal(v, self.abs_error, self.ctx)

    def sqrt(self) -> ApproxReal:
        lo = self.lower()
        if lo <= 0:
            raise PrecisionError(f"sqrt of an enclosure reaching zero or below: {self}")
        with self.ctx.gmp():
            v = gmpy2.sqrt(self.value)
        with self.ctx.up():
            # |sqrt(x') - sqrt(x)| <= e / (sqrt(x - e) + sqrt(x))
            with self.ctx.down():
                den = gmpy2.sqrt(lo) + v * (1 - 2 * self.ctx.unit)
            prop = self.abs_error / den
        return self._rounded(v, prop)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __float__(self):
        return float(self.value)

    # formatting -----------------------------------------------------------

    def significant_digits(self) -> int:
        """Digits worth printing: enough that the last one sits below the error."""
        cap = self.ctx.decimal_digits
        if self.abs_error == 0 or self.value == 0:
            return cap
        ratio = abs(self.value) / self.abs_error
        return max(1, min(cap, int(gmpy2.ceil(gmpy2.log10(ratio))) + 2))

    def to_decimal(self, digits: int | None = None) -> str:
        d = digits or self.significant_digits()
        with self.ctx.gmp():
            return format(self.value, f".{d}g")

    def error_str(self) -> str:
        with self.ctx.up():
            return format(self.abs_error, ".3g")

    def __str__(self):
        return f"{self.to_decimal()} ± {self.error_str()}"

    def __repr__(self):
        return f"ApproxReal({self.to_decimal()}, abs_error={self.error_str()}, bits={self.ctx.precision_bits})"


@functools.lru_cache(maxsize=None)
def sqrt5(ctx: NumericContext) -> ApproxReal:
    return _lift(5, ctx).sqrt()


@functools.lru_cache(maxsize=None)
def golden_ratio(ctx: NumericContext) -> ApproxReal:
    """(1 + sqrt 5) / 2, checked against its minimal polynomial X^2 - X - 1."""
    phi = (sqrt5(ctx) + 1) / 2
    if ctx.tracked:
        residual = phi * phi - phi - 1
        if not residual.contains(0):
            raise PrecisionError("golden ratio failed its minimal-polynomial check")
    return phi


@functools.lru_cache(maxsize=4096)
def phi_power(k: int, ctx: NumericContext) -> ApproxReal:
    """phi**k for any integer k."""
    return golden_ratio(ctx) ** k


def dist_nearest_int(x):
    """Distance from ``x`` to the nearest integer, a value in [0, 1/2].

    Works on ApproxReal (error carries over unchanged, the map being
    1-Lipschitz), Fraction and int exactly, and on floats and mpfr values.
    """
    if isinstance(x, ApproxReal):
        with x.ctx.gmp():
            # x - nearest integer is exact in binary floating point
            k = gmpy2.floor(x.value + mpfr("0.5"))
            d = abs(x.value - k)
        return ApproxReal(d, x.abs_error, x.ctx)
    if isinstance(x, int):
        return 0
    if isinstance(x, Fraction):
        return abs(x - math.floor(x + Fraction(1, 2)))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("x must be finite")
        return abs(x - math.floor(x + 0.5))
    if isinstance(x, _MPFR):
        if not gmpy2.is_finite(x):
            raise ValueError("x must be finite")
        with gmpy2.context(precision=x.precision):
            return abs(x - gmpy2.floor(x + mpfr("0.5")))
    raise TypeError(f"unsupported type {type(x).__name__}")


def geometric_sum(ratio, first_exponent: int, ctx: NumericContext) -> ApproxReal:
    """Sum of ratio**i for i >= first_exponent, i.e. ratio**e / (1 - ratio)."""
    if first_exponent < 1:
        raise ValueError("first_exponent must be >= 1")
    r = _lift(ratio, ctx)
    if not (r.lower() > 0 and r.upper() < 1):
        raise ValueError(f"ratio must lie strictly inside (0, 1), got {r}")
    return r ** first_exponent / (1 - r)
