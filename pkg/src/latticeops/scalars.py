"""Coefficient fields for the verification kernel.

Two interchangeable backends:

* ``ExactField`` works over Gaussian rationals (complex numbers with
  ``fractions.Fraction`` real and imaginary parts).  No rounding ever
  happens, so every residual is exactly zero or exactly nonzero.
* ``BigFloatField`` works over arbitrary-precision complex floats backed
  by a private ``mpmath`` context, so several fields with different
  precisions can coexist in one process.

Every algorithm in the package receives scalars produced by one of these
fields and combines them only through arithmetic operators, so the two
backends are drop-in replacements for each other.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import isqrt
from typing import Optional, Union

from mpmath.ctx_mp import MPContext

DEFAULT_PRECISION = 128
MIN_PRECISION = 64
DEFAULT_EPS = Fraction(1, 10**25)

PRECISION_ENV_VAR = "LATTICEOPS_PRECISION"


class BackendMismatch(TypeError):
    """Raised when scalars from different fields are combined."""


class ScalarDomainError(ArithmeticError):
    """Raised for operations that leave the field (e.g. irrational sqrt)."""


def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError as exc:
        raise ValueError(f"{PRECISION_ENV_VAR} must be an integer, got {raw!r}") from exc
    if bits < MIN_PRECISION:
        raise ValueError(f"{PRECISION_ENV_VAR} must be >= {MIN_PRECISION}, got {bits}")
    return bits


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        # floats are accepted only when they are exact binary rationals by
        # construction (e.g. 0.5); Fraction(float) keeps the exact value
        return Fraction(v)
    raise TypeError(f"cannot interpret {v!r} as a rational number")


def rational_sqrt(v: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None."""
    if v < 0:
        return None
    num, den = v.numerator, v.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


class QRational:
    """A Gaussian rational: re + im*i with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QRational is immutable")

    def _coerce(self, other) -> Optional["QRational"]:
        if isinstance(other, QRational):
            return other
        if isinstance(other, (int, Fraction)):
            return QRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n2 = o.re * o.re + o.im * o.im
        if n2 == 0:
            raise ZeroDivisionError("division by zero scalar")
        return QRational(
            (self.re * o.re + self.im * o.im) / n2,
            (self.im * o.re - self.re * o.im) / n2,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __neg__(self):
        return QRational(-self.re, -self.im)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (QRational(1) / self) ** (-n)
        result = QRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        if self.im == 0:
            return f"QRational({self.re})"
        return f"QRational({self.re}, {self.im})"


Scalar = Union[QRational, object]


def _fraction_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


class ExactField:
    """Gaussian-rational backend; comparisons are exact equality."""

    name = "exact"

    def __call__(self, v, im=None) -> QRational:
        if im is not None:
            return QRational(_as_fraction(v), _as_fraction(im))
        if isinstance(v, QRational):
            return v
        if isinstance(v, complex):
            raise TypeError("binary complex floats are not exact; pass rational parts")
        return QRational(_as_fraction(v))

    @property
    def zero(self) -> QRational:
        return QRational(0)

    @property
    def one(self) -> QRational:
        return QRational(1)

    @property
    def i(self) -> QRational:
        return QRational(0, 1)

    def re(self, a: QRational) -> Fraction:
        return a.re

    def im(self, a: QRational) -> Fraction:
        return a.im

    def is_zero(self, a: QRational, eps=None, scale=None) -> bool:
        return not a

    def approx_eq(self, a, b, eps=None) -> bool:
        a, b = self(a), self(b)
        return a == b

    def sqrt(self, a) -> QRational:
        a = self(a)
        if a.im != 0:
            raise ScalarDomainError("exact sqrt of a non-real value is not supported")
        r = rational_sqrt(a.re)
        if r is not None:
            return QRational(r)
        r = rational_sqrt(-a.re)
        if r is not None:
            return QRational(0, r)
        raise ScalarDomainError(
            f"sqrt({_fraction_str(a.re)}) is irrational; use the bigfloat backend"
        )

    def magnitude(self, a) -> float:
        a = self(a)
        try:
            return float(abs(complex(a.re, a.im)))
        except OverflowError:
            return float("inf")

    def to_json(self, a):
        a = self(a)
        if a.im == 0:
            return _fraction_str(a.re)
        return [_fraction_str(a.re), _fraction_str(a.im)]

    def from_json(self, obj) -> QRational:
        if isinstance(obj, list):
            if len(obj) != 2:
                raise ValueError("complex scalar must be a two-element array")
            return QRational(Fraction(str(obj[0])), Fraction(str(obj[1])))
        if isinstance(obj, (str, int)):
            return QRational(Fraction(str(obj)))
        raise ValueError(f"cannot decode exact scalar from {obj!r}")

    def to_str(self, a) -> str:
        a = self(a)
        if a.im == 0:
            return _fraction_str(a.re)
        return f"{_fraction_str(a.re)}{'+' if a.im >= 0 else ''}{_fraction_str(a.im)}i"

    def __repr__(self):
        return "ExactField()"


class BigFloatField:
    """Arbitrary-precision complex backend over a private mpmath context."""

    name = "bigfloat"

    def __init__(self, precision: Optional[int] = None, eps=None):
        if precision is None:
            precision = default_precision()
        if precision < MIN_PRECISION:
            raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {precision}")
        self.precision = precision
        ctx = MPContext()
        ctx.prec = precision
        self.ctx = ctx
        self.eps = self.real(DEFAULT_EPS if eps is None else eps)

    def real(self, v):
        """Convert a rational-like value to a real mpf of this context."""
        if isinstance(v, Fraction):
            return self.ctx.mpf(v.numerator) / v.denominator
        if isinstance(v, QRational):
            if v.im != 0:
                raise ValueError("value has a nonzero imaginary part")
            return self.real(v.re)
        return self.ctx.mpf(v)

    def __call__(self, v, im=None):
        if im is not None:
            return self.ctx.mpc(self.real(v), self.real(im))
        if isinstance(v, QRational):
            return self.ctx.mpc(self.real(v.re), self.real(v.im))
        if isinstance(v, (int, Fraction, float, str)):
            return self.ctx.mpc(self.real(_as_fraction(v)))
        if isinstance(v, complex):
            return self.ctx.mpc(v)
        # mpf/mpc from any context: route through mpc constructor
        return self.ctx.mpc(v)

    @property
    def zero(self):
        return self.ctx.mpc(0)

    @property
    def one(self):
        return self.ctx.mpc(1)

    @property
    def i(self):
        return self.ctx.mpc(0, 1)

    def re(self, a):
        return self(a).real

    def im(self, a):
        return self(a).imag

    def is_zero(self, a, eps=None, scale=None) -> bool:
        eps = self.eps if eps is None else self.real(eps)
        bound = eps if scale is None else eps * max(self.ctx.mpf(1), self.real(scale))
        return abs(self(a)) <= bound

    def approx_eq(self, a, b, eps=None) -> bool:
        a, b = self(a), self(b)
        eps = self.eps if eps is None else self.real(eps)
        return abs(a - b) <= eps * max(self.ctx.mpf(1), abs(a), abs(b))

    def sqrt(self, a):
        return self.ctx.sqrt(self(a))

    def magnitude(self, a) -> float:
        return float(abs(self(a)))

    def _digits(self) -> int:
        return self.ctx.dps + 5

    def to_json(self, a):
        a = self(a)
        digits = self._digits()
        if a.imag == 0:
            value = self.ctx.nstr(a.real, digits)
        else:
            value = [self.ctx.nstr(a.real, digits), self.ctx.nstr(a.imag, digits)]
        return {"value": value, "precision": self.precision}

    def from_json(self, obj):
        if isinstance(obj, dict):
            obj = obj["value"]
        if isinstance(obj, list):
            if len(obj) != 2:
                raise ValueError("complex scalar must be a two-element array")
            return self.ctx.mpc(self.ctx.mpf(str(obj[0])), self.ctx.mpf(str(obj[1])))
        if isinstance(obj, str) and "/" in obj:
            return self(Fraction(obj))
        return self.ctx.mpc(self.ctx.mpf(str(obj)))

    def to_str(self, a) -> str:
        a = self(a)
        digits = min(self.ctx.dps, 30)
        if a.imag == 0:
            return self.ctx.nstr(a.real, digits)
        return self.ctx.nstr(a, digits)

    def __repr__(self):
        return f"BigFloatField(precision={self.precision})"


Field = Union[ExactField, BigFloatField]


def make_field(backend: str, precision: Optional[int] = None, eps=None) -> Field:
    if backend == "exact":
        return ExactField()
    if backend == "bigfloat":
        return BigFloatField(precision=precision, eps=eps)
    raise ValueError(f"unknown backend {backend!r}; expected 'exact' or 'bigfloat'")


def same_field(a: Field, b: Field) -> None:
    if a is not b:
        raise BackendMismatch(f"scalars come from different fields: {a!r} vs {b!r}")
