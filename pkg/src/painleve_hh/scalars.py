"""Arbitrary-precision scalars with an exact-rational fast path.

Every coefficient, parameter and matrix entry in this package is a
:class:`Scalar`.  A Scalar is either

* an *exact* real rational, stored as a ``fractions.Fraction`` in lowest
  terms with positive denominator, or
* a *rounded* complex big-float, stored as an ``mpmath.mpc`` together with
  the working precision in bits at which it was produced.

Arithmetic between two exact values stays exact.  As soon as a rounded
value enters, or an inexact function is applied (a root of a non-perfect
power, say), the result is rounded at the working precision.  Multiplying
by an exact zero annihilates to an exact zero, which keeps structurally
zero matrix entries exact even next to big-float data.

Working precision is at least 64 bits and defaults to 256; the default can
be overridden through the ``PAINLEVE_PRECISION_BITS`` environment variable
or :func:`set_default_precision`.
"""

from __future__ import annotations

import os
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import ContractViolation

MIN_PRECISION = 64
_DEFAULT_PRECISION = 256


def _read_env_precision() -> int:
    raw = os.environ.get("PAINLEVE_PRECISION_BITS")
    if not raw:
        return _DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError:
        return _DEFAULT_PRECISION
    return max(MIN_PRECISION, bits)


_default_precision = _read_env_precision()


def default_precision() -> int:
    """Current default working precision in bits."""
    return _default_precision


def set_default_precision(bits: int) -> int:
    """Set the default working precision; returns the previous value."""
    global _default_precision
    if bits < MIN_PRECISION:
        raise ContractViolation(f"precision must be >= {MIN_PRECISION} bits, got {bits}")
    previous = _default_precision
    _default_precision = int(bits)
    return previous


def _fraction_to_mpf(q: Fraction, bits: int):
    with mp.workprec(bits):
        return mpmath.mpf(q.numerator) / q.denominator


def _int_nth_root(n: int, k: int):
    """Floor k-th root of a nonnegative int, plus an exactness flag."""
    if n < 0:
        raise ValueError("negative radicand")
    if n in (0, 1):
        return n, True
    r = int(round(n ** (1.0 / k))) if n.bit_length() < 500 else 1 << (n.bit_length() // k + 1)
    # Newton refinement on integers; converges in a handful of steps.
    r = max(r, 1)
    while True:
        nxt = ((k - 1) * r + n // r ** (k - 1)) // k
        if nxt >= r:
            break
        r = nxt
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r, r ** k == n


class Scalar:
    """Immutable exact-rational / rounded-complex number."""

    __slots__ = ("_frac", "_val", "_prec")

    def __init__(self, frac, val, prec):
        self._frac = frac      # Fraction | None
        self._val = val        # mpmath.mpc | None
        self._prec = prec      # int, bits

    # -- constructors ------------------------------------------------------

    @staticmethod
    def exact(numerator, denominator=1, bits: int | None = None) -> "Scalar":
        return Scalar(Fraction(numerator, denominator), None,
                      max(bits or _default_precision, MIN_PRECISION))

    def with_precision(self, bits: int) -> "Scalar":
        if bits < MIN_PRECISION:
            raise ContractViolation(f"precision must be >= {MIN_PRECISION} bits")
        if self._frac is not None:
            return Scalar(self._frac, None, bits)
        return Scalar(None, self._val, bits)

    @staticmethod
    def from_real(value, bits: int | None = None) -> "Scalar":
        """Rounded real scalar from an int, float, string or mpf."""
        bits = max(bits or _default_precision, MIN_PRECISION)
        with mp.workprec(bits):
            v = mpmath.mpc(mpmath.mpf(value), 0)
        return Scalar(None, v, bits)

    @staticmethod
    def from_complex(re, im, bits: int | None = None) -> "Scalar":
        bits = max(bits or _default_precision, MIN_PRECISION)
        with mp.workprec(bits):
            v = mpmath.mpc(mpmath.mpf(re), mpmath.mpf(im))
        return Scalar(None, v, bits)

    @staticmethod
    def from_mpc(value, bits: int) -> "Scalar":
        bits = max(bits, MIN_PRECISION)
        # mpmath rounds construction to the ambient context precision
        with mp.workprec(bits):
            return Scalar(None, mpmath.mpc(value), bits)

    # -- basic predicates ---------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self._frac is not None

    @property
    def precision(self) -> int:
        return self._prec

    def is_zero(self) -> bool:
        """Literal zero test (no tolerance; callers own thresholds)."""
        if self._frac is not None:
            return self._frac == 0
        return self._val.real == 0 and self._val.imag == 0

    def is_real(self) -> bool:
        return self._frac is not None or self._val.imag == 0

    # -- accessors -----------------------------------------------------------

    def fraction(self) -> Fraction:
        if self._frac is None:
            raise ContractViolation("scalar is not an exact rational")
        return self._frac

    def mpc(self, bits: int | None = None):
        """Value as an mpmath.mpc at the requested (default: own) precision."""
        bits = bits or self._prec
        if self._frac is not None:
            return mpmath.mpc(_fraction_to_mpf(self._frac, bits), 0)
        return self._val

    def real(self) -> "Scalar":
        if self._frac is not None:
            return self
        with mp.workprec(self._prec):
            return Scalar(None, mpmath.mpc(self._val.real, 0), self._prec)

    def imag(self) -> "Scalar":
        if self._frac is not None:
            return Scalar(Fraction(0), None, self._prec)
        with mp.workprec(self._prec):
            return Scalar(None, mpmath.mpc(self._val.imag, 0), self._prec)

    def conjugate(self) -> "Scalar":
        if self._frac is not None:
            return self
        with mp.workprec(self._prec):
            return Scalar(None, mpmath.mpc(self._val.real, -self._val.imag),
                          self._prec)

    def magnitude(self) -> "Scalar":
        """|self| as a Scalar (exact for exact input)."""
        if self._frac is not None:
            return Scalar(abs(self._frac), None, self._prec)
        with mp.workprec(self._prec):
            return Scalar(None, mpmath.mpc(abs(self._val), 0), self._prec)

    def mag(self):
        """|self| as an mpf at own precision (for thresholds and sorting)."""
        if self._frac is not None:
            return abs(_fraction_to_mpf(self._frac, self._prec))
        with mp.workprec(self._prec):
            return abs(self._val)

    def to_float(self) -> float:
        return float(self.mag() if not self.is_real() else self.mpc().real)

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(Fraction(other), None, _default_precision)
        if isinstance(other, float):
            return Scalar.from_real(other)
        return NotImplemented

    def _binary(self, other, op):
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._frac is not None and other._frac is not None:
            return Scalar(op(self._frac, other._frac), None, max(self._prec, other._prec))
        bits = max(self._prec, other._prec)
        with mp.workprec(bits):
            return Scalar(None, op(self.mpc(bits), other.mpc(bits)), bits)

    def __add__(self, other):
        s = Scalar._coerce(other)
        if s is NotImplemented:
            return NotImplemented
        if self._frac == 0 and self._frac is not None:
            return s
        if s._frac == 0 and s._frac is not None:
            return self
        return self._binary(s, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        s = Scalar._coerce(other)
        if s is NotImplemented:
            return NotImplemented
        return self + (-s)

    def __rsub__(self, other):
        s = Scalar._coerce(other)
        if s is NotImplemented:
            return NotImplemented
        return s + (-self)

    def __mul__(self, other):
        s = Scalar._coerce(other)
        if s is NotImplemented:
            return NotImplemented
        # exact zero annihilates: keeps structural zeros exact next to floats
        if (self._frac is not None and self._frac == 0) or (
            s._frac is not None and s._frac == 0
        ):
            return Scalar(Fraction(0), None, max(self._prec, s._prec))
        return self._binary(s, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        s = Scalar._coerce(other)
        if s is NotImplemented:
            return NotImplemented
        if s.is_zero():
            raise ZeroDivisionError("scalar division by zero")
        if self._frac is not None and self._frac == 0:
            return Scalar(Fraction(0), None, max(self._prec, s._prec))
        return self._binary(s, lambda a, b: a / b)

    def __rtruediv__(self, other):
        s = Scalar._coerce(other)
        if s is NotImplemented:
            return NotImplemented
        return s / self

    def __neg__(self):
        if self._frac is not None:
            return Scalar(-self._frac, None, self._prec)
        with mp.workprec(self._prec):
            return Scalar(None, -self._val, self._prec)

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if self._frac is not None:
            if exponent < 0 and self._frac == 0:
                raise ZeroDivisionError("0 ** negative")
            return Scalar(self._frac ** exponent, None, self._prec)
        with mp.workprec(self._prec):
            return Scalar(None, self._val ** exponent, self._prec)

    def __abs__(self):
        return self.magnitude()

    def __eq__(self, other):
        s = Scalar._coerce(other)
        if s is NotImplemented:
            return NotImplemented
        if self._frac is not None and s._frac is not None:
            return self._frac == s._frac
        bits = max(self._prec, s._prec)
        return self.mpc(bits) == s.mpc(bits)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __hash__(self):
        if self._frac is not None:
            return hash(self._frac)
        return hash((self._val.real, self._val.imag))

    def __repr__(self):
        if self._frac is not None:
            return f"Scalar({self._frac})"
        with mp.workprec(min(self._prec, 64)):
            return f"Scalar({mpmath.nstr(self._val, 12)}@{self._prec}b)"

    # -- roots ---------------------------------------------------------------

    def sqrt(self) -> "Scalar":
        return nth_root(self, 2, 0)

    def exactness_lost(self) -> "Scalar":
        """Self re-expressed as a rounded value at own precision."""
        if self._frac is None:
            return self
        return Scalar(None, self.mpc(self._prec), self._prec)


ZERO = Scalar.exact(0)
ONE = Scalar.exact(1)


def as_scalar(value, bits: int | None = None) -> Scalar:
    """Coerce ints, Fractions, floats, strings and Scalars to Scalar."""
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction)):
        return Scalar(Fraction(value), None, bits or _default_precision)
    if isinstance(value, (float, str)) or isinstance(value, mpmath.mpf):
        return Scalar.from_real(value, bits)
    if isinstance(value, mpmath.mpc):
        return Scalar.from_mpc(value, bits or _default_precision)
    raise ContractViolation(f"cannot coerce {type(value).__name__} to Scalar")


def nth_root(x, n: int, branch: int = 0) -> Scalar:
    """Return r with r**n == x to working precision.

    Branch 0 is the principal root (argument in (-pi/n, pi/n]); branch k
    multiplies the principal root by the k-th n-th root of unity.  The root
    of an exact nonnegative rational that is a perfect n-th power stays
    exact on branch 0; nth_root(0, n, b) == 0 for every branch.
    """
    x = as_scalar(x)
    if n < 1:
        raise ContractViolation(f"root order must be >= 1, got {n}")
    if not 0 <= branch < n:
        raise ContractViolation(f"branch must be in [0, {n}), got {branch}")
    if x.is_zero():
        return Scalar(Fraction(0), None, x.precision)
    if x.is_exact:
        q = x.fraction()
        if q > 0:
            rn, exact_n = _int_nth_root(q.numerator, n)
            rd, exact_d = _int_nth_root(q.denominator, n)
            if exact_n and exact_d and branch == 0:
                return Scalar(Fraction(rn, rd), None, x.precision)
    bits = x.precision
    with mp.workprec(bits):
        principal = x.mpc(bits) ** (mpmath.mpf(1) / n)
        if branch:
            # cospi/sinpi hit exact values at quarter turns
            rot = mpmath.mpc(mpmath.cospi(mpmath.mpf(2 * branch) / n),
                             mpmath.sinpi(mpmath.mpf(2 * branch) / n))
            principal = principal * rot
        if principal.imag == 0 and x.is_real():
            principal = mpmath.mpc(principal.real, 0)
    return Scalar(None, principal, bits)


def scalar_max_abs(values) -> "mpmath.mpf":
    """max |v| over an iterable of Scalars (0 for an empty iterable)."""
    best = mpmath.mpf(0)
    for v in values:
        m = v.mag()
        if m > best:
            best = m
    return best
