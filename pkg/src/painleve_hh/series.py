"""Truncated Puiseux/Laurent series with half-integer-capable exponents.

A series is a finite coefficient window on the exponent grid
``lead + i*step`` (step 1 or 1/2 in this package), centred at ``t0``.
Coefficients beyond the window are *unknown* unless the series is flagged
``complete``, in which case they are exactly zero (polynomial data such as
the t**-2 fixture).  Arithmetic tracks the guaranteed window: a product of
truncated series is only known through ``min(a.max + b.lead, b.max +
a.lead)``, sums through the smaller window, and so on.  That bookkeeping is
what lets residual checks state exactly which orders they verified.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ContractViolation
from .scalars import Scalar, as_scalar, scalar_max_abs

_ZERO = Scalar.exact(0)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise ContractViolation(f"exponent must be rational, got {type(x).__name__}")


def _gcd_frac(a: Fraction, b: Fraction) -> Fraction:
    from math import gcd
    num = gcd(a.numerator * b.denominator, b.numerator * a.denominator)
    den = a.denominator * b.denominator
    return Fraction(num, den)


class PuiseuxSeries:
    """Immutable truncated series sum_i coeffs[i] * (t - center)**(lead + i*step)."""

    __slots__ = ("lead", "step", "coeffs", "center", "complete")

    def __init__(self, lead, step, coeffs, center=None, complete=False):
        self.lead = _frac(lead)
        self.step = _frac(step)
        if self.step <= 0:
            raise ContractViolation("step must be positive")
        self.coeffs = tuple(as_scalar(c) for c in coeffs)
        self.center = as_scalar(center) if center is not None else _ZERO
        self.complete = bool(complete)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(center=None) -> "PuiseuxSeries":
        return PuiseuxSeries(0, 1, (), center=center, complete=True)

    @staticmethod
    def constant(value, center=None) -> "PuiseuxSeries":
        value = as_scalar(value)
        if value.is_zero():
            return PuiseuxSeries.zero(center)
        return PuiseuxSeries(0, 1, (value,), center=center, complete=True)

    @staticmethod
    def monomial(coeff, exponent, center=None) -> "PuiseuxSeries":
        return PuiseuxSeries(exponent, 1, (as_scalar(coeff),), center=center,
                             complete=True)

    # -- structure ------------------------------------------------------------

    @property
    def max_exp(self) -> Fraction | None:
        """Largest exponent with a known coefficient; None when complete."""
        if self.complete:
            return None
        return self.lead + (len(self.coeffs) - 1) * self.step

    def is_identically_zero(self) -> bool:
        return self.complete and all(c.is_zero() for c in self.coeffs)

    def exponents(self):
        return [self.lead + i * self.step for i in range(len(self.coeffs))]

    def coefficient(self, exponent) -> Scalar | None:
        """Coefficient at an exponent; exact 0 off the grid inside the
        window, None when the exponent lies beyond the known window."""
        e = _frac(exponent)
        if self.coeffs:
            offset = (e - self.lead) / self.step
            if offset.denominator == 1 and 0 <= offset.numerator < len(self.coeffs):
                return self.coeffs[offset.numerator]
        if self.complete:
            return _ZERO
        me = self.max_exp
        if me is not None and e <= me:
            return _ZERO
        return None

    def normalized(self) -> "PuiseuxSeries":
        """Drop exact-zero leading coefficients (adjusting the lead)."""
        i = 0
        while i < len(self.coeffs) and self.coeffs[i].is_exact and self.coeffs[i].is_zero():
            i += 1
        if i == 0:
            return self
        if i == len(self.coeffs):
            if self.complete:
                return PuiseuxSeries.zero(self.center)
            return PuiseuxSeries(self.lead + i * self.step, self.step, (),
                                 center=self.center, complete=False)
        return PuiseuxSeries(self.lead + i * self.step, self.step,
                             self.coeffs[i:], center=self.center,
                             complete=self.complete)

    def truncate(self, max_exponent) -> "PuiseuxSeries":
        me = _frac(max_exponent)
        keep = [c for e, c in zip(self.exponents(), self.coeffs) if e <= me]
        return PuiseuxSeries(self.lead, self.step, keep, center=self.center,
                             complete=False)

    def max_abs_coefficient(self, through=None):
        """max |coefficient| over the known window (capped at ``through``)."""
        if through is None:
            return scalar_max_abs(self.coeffs)
        cap = _frac(through)
        return scalar_max_abs(
            c for e, c in zip(self.exponents(), self.coeffs) if e <= cap
        )

    # -- grid plumbing ----------------------------------------------------------

    def _check_center(self, other: "PuiseuxSeries"):
        if not (self.center - other.center).is_zero():
            raise ContractViolation("series have different centers")

    def _on_grid(self, lead: Fraction, step: Fraction):
        """Re-express on a finer/compatible grid starting at ``lead``."""
        n_shift = (self.lead - lead) / step
        ratio = self.step / step
        if n_shift.denominator != 1 or ratio.denominator != 1:
            raise ContractViolation("incompatible exponent grids")
        shift, ratio = n_shift.numerator, ratio.numerator
        out = {}
        for i, c in enumerate(self.coeffs):
            out[shift + i * ratio] = c
        return out

    # -- arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = PuiseuxSeries.constant(other, self.center)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._check_center(other)
        if self.is_identically_zero():
            return other
        if other.is_identically_zero():
            return self
        step = _gcd_frac(self.step, other.step)
        lead = min(self.lead, other.lead)
        caps = [s.max_exp for s in (self, other) if s.max_exp is not None]
        cap = min(caps) if caps else None
        a = self._on_grid(lead, step)
        b = other._on_grid(lead, step)
        n = max(list(a) + list(b), default=-1) + 1
        coeffs = []
        for i in range(n):
            e = lead + i * step
            if cap is not None and e > cap:
                break
            coeffs.append(a.get(i, _ZERO) + b.get(i, _ZERO))
        return PuiseuxSeries(lead, step, coeffs, center=self.center,
                             complete=cap is None)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(self.lead, self.step, tuple(-c for c in self.coeffs),
                             center=self.center, complete=self.complete)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = PuiseuxSeries.constant(other, self.center)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, scalar) -> "PuiseuxSeries":
        s = as_scalar(scalar)
        if s.is_exact and s.is_zero():
            return PuiseuxSeries.zero(self.center)
        return PuiseuxSeries(self.lead, self.step,
                             tuple(c * s for c in self.coeffs),
                             center=self.center, complete=self.complete)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._check_center(other)
        if self.is_identically_zero() or other.is_identically_zero():
            return PuiseuxSeries.zero(self.center)
        if not self.coeffs or not other.coeffs:
            # a known-empty truncated window: nothing is known of the product
            lead = self.lead + other.lead
            return PuiseuxSeries(lead, 1, (), center=self.center, complete=False)
        step = _gcd_frac(self.step, other.step)
        lead = self.lead + other.lead
        caps = []
        if self.max_exp is not None:
            caps.append(self.max_exp + other.lead)
        if other.max_exp is not None:
            caps.append(other.max_exp + self.lead)
        cap = min(caps) if caps else None
        nmax = None if cap is None else int((cap - lead) / step)
        a = [(int((e - self.lead) / self.step), c)
             for e, c in zip(self.exponents(), self.coeffs)]
        size_b = len(other.coeffs)
        ratio_a = int(self.step / step)
        ratio_b = int(other.step / step)
        acc: dict[int, Scalar] = {}
        for ia, ca in a:
            if ca.is_exact and ca.is_zero():
                continue
            base = ia * ratio_a
            for ib in range(size_b):
                pos = base + ib * ratio_b
                if nmax is not None and pos > nmax:
                    break
                cb = other.coeffs[ib]
                if cb.is_exact and cb.is_zero():
                    continue
                term = ca * cb
                acc[pos] = acc[pos] + term if pos in acc else term
        n = nmax if nmax is not None else max(acc, default=0)
        coeffs = [acc.get(i, _ZERO) for i in range(n + 1)]
        return PuiseuxSeries(lead, step, coeffs, center=self.center,
                             complete=cap is None)

    __rmul__ = __mul__

    def pow_int(self, exponent: int) -> "PuiseuxSeries":
        if exponent < 0:
            raise ContractViolation("negative powers not supported")
        if exponent == 0:
            return PuiseuxSeries.constant(1, self.center)
        result = self
        for _ in range(exponent - 1):
            result = result * self
        return result

    def differentiate(self) -> "PuiseuxSeries":
        coeffs = []
        for e, c in zip(self.exponents(), self.coeffs):
            coeffs.append(c * Scalar.exact(e))
        return PuiseuxSeries(self.lead - 1, self.step, coeffs,
                             center=self.center, complete=self.complete)

    # -- evaluation -----------------------------------------------------------------

    def evaluate(self, t, bits: int | None = None) -> Scalar:
        """Numeric value at t (principal branch for fractional powers)."""
        t = as_scalar(t)
        if not self.coeffs:
            return Scalar.exact(0)
        bits = bits or max(t.precision, max(c.precision for c in self.coeffs))
        u = t - self.center
        if u.is_zero():
            raise ContractViolation("evaluation at the expansion center")
        s = nth_root_power(u, self.step, bits)
        acc = Scalar.exact(0)
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc * nth_root_power(u, self.lead, bits)

    def __repr__(self):
        parts = []
        for e, c in list(zip(self.exponents(), self.coeffs))[:6]:
            if not (c.is_exact and c.is_zero()):
                parts.append(f"{c!r}*t^{e}")
        tail = "" if len(self.coeffs) <= 6 else " + ..."
        status = "complete" if self.complete else f"O(t^{self.max_exp})"
        return f"PuiseuxSeries({' + '.join(parts) or '0'}{tail}; {status})"


def nth_root_power(u: Scalar, exponent: Fraction, bits: int) -> Scalar:
    """u**exponent on the principal branch, exact for integer exponents on
    exact input."""
    exponent = _frac(exponent)
    if exponent.denominator == 1:
        return u ** exponent.numerator
    from .scalars import nth_root
    root = nth_root(u, exponent.denominator, 0)
    return root ** exponent.numerator
