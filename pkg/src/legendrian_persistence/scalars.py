"""Exact scalars for actions: rationals, symbolic ``q*pi + r`` values and infinities.

Actions are compared exactly. Plain rationals are :class:`fractions.Fraction`;
actions involving pi are :class:`PiLinear`. A ``PiLinear`` with zero pi
coefficient is never constructed: :func:`pi_linear` collapses it to a
``Fraction`` so that equal values always hash and compare equal.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

import mpmath

INF = math.inf
NEG_INF = -math.inf


class PiLinear:
    """The real number ``q*pi + r`` with rational ``q != 0`` and ``r``."""

    __slots__ = ("q", "r")

    def __init__(self, q, r=0):
        q = Fraction(q)
        if q == 0:
            raise ValueError("use pi_linear() for values without a pi component")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", Fraction(r))

    def __setattr__(self, name, value):
        raise AttributeError("PiLinear is immutable")

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _parts(x):
        if isinstance(x, PiLinear):
            return x.q, x.r
        if isinstance(x, (int, Fraction)):
            return Fraction(0), Fraction(x)
        return None

    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return pi_linear(self.q + o[0], self.r + o[1])

    __radd__ = __add__

    def __neg__(self):
        return PiLinear(-self.q, -self.r)

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return pi_linear(self.q - o[0], self.r - o[1])

    def __rsub__(self, other):
        if isinstance(other, float):
            return other - float(self)
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return pi_linear(o[0] - self.q, o[1] - self.r)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return pi_linear(self.q * other, self.r * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return pi_linear(self.q / other, self.r / other)
        return NotImplemented

    # comparison -----------------------------------------------------------
    def _cmp(self, other) -> int:
        if isinstance(other, float):
            if math.isinf(other):
                return -1 if other > 0 else 1
            other = Fraction(other)
        o = self._parts(other)
        if o is None:
            raise TypeError(f"cannot compare PiLinear with {type(other).__name__}")
        return pi_sign(self.q - o[0], self.r - o[1])

    def __eq__(self, other):
        if isinstance(other, PiLinear):
            return self.q == other.q and self.r == other.r
        if isinstance(other, (int, Fraction, float)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash(("PiLinear", self.q, self.r))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.q) * math.pi + float(self.r)

    def __repr__(self):
        return f"PiLinear({self.q}, {self.r})"

    def __str__(self):
        if self.r == 0:
            return f"{self.q}*pi"
        sign = "+" if self.r > 0 else "-"
        return f"{self.q}*pi {sign} {abs(self.r)}"


Scalar = Union[Fraction, PiLinear, float]


def pi_linear(q, r=0) -> Union[Fraction, PiLinear]:
    """Return ``q*pi + r``, as a plain Fraction when ``q == 0``."""
    q = Fraction(q)
    if q == 0:
        return Fraction(r)
    return PiLinear(q, r)


def _pi_interval(prec: int) -> tuple[Fraction, Fraction]:
    with mpmath.workprec(prec):
        iv = mpmath.iv.pi
        return _mpf_to_fraction(iv.a), _mpf_to_fraction(iv.b)


def _mpf_to_fraction(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def pi_sign(q: Fraction, r: Fraction) -> int:
    """Exact sign of ``q*pi + r`` for rationals ``q`` and ``r``."""
    if q == 0:
        return (r > 0) - (r < 0)
    prec = 64
    while True:
        lo, hi = _pi_interval(prec)
        a, b = sorted((q * lo + r, q * hi + r))
        if a > 0:
            return 1
        if b < 0:
            return -1
        prec *= 2


def to_fraction(x) -> Fraction:
    """Convert an exact rational-like value to Fraction (rejects floats and PiLinear)."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, Fraction, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def as_action(x) -> Scalar:
    """Normalise an action value: ints and rationals to Fraction, keep PiLinear and infinities."""
    if isinstance(x, PiLinear):
        return x
    if isinstance(x, float):
        if math.isinf(x):
            return x
        raise TypeError("finite floats are not exact actions")
    return to_fraction(x)


def is_finite(x) -> bool:
    return not (isinstance(x, float) and math.isinf(x))


def approx(x) -> float:
    """Float approximation for display only."""
    return float(x)


def format_scalar(x) -> str:
    """Human-readable exact form: ``3/2``, ``1/4*pi - 1/200``, ``inf``."""
    if isinstance(x, float):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, PiLinear):
        return str(x)
    return str(Fraction(x))
