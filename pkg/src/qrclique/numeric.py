"""Arbitrary-precision plumbing.

Extended reals are ``mpf`` values that belong to a private mpmath context of
fixed precision, so a value carries its working precision with it and no
global mpmath state is touched.  Exact inputs (decimal strings, ints, floats)
are kept as :class:`fractions.Fraction` until they enter a computation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath.ctx_iv import MPIntervalContext
from mpmath.ctx_mp import MPContext

from .errors import InvalidParameterError

MIN_PRECISION = 64
DEFAULT_PRECISION = 128

_LOG10_2 = math.log10(2)


@lru_cache(maxsize=None)
def context(bits: int) -> MPContext:
    """Return the shared, never-mutated mpmath context of ``bits`` precision."""
    if bits < MIN_PRECISION:
        raise InvalidParameterError(f"precision_bits must be >= {MIN_PRECISION}, got {bits}")
    ctx = MPContext()
    ctx.prec = bits
    return ctx


@lru_cache(maxsize=None)
def interval_context(bits: int) -> MPIntervalContext:
    """Interval-arithmetic context with outward (directed) rounding."""
    ctx = MPIntervalContext()
    ctx.prec = bits
    return ctx


def ext(value, bits: int = DEFAULT_PRECISION):
    """Convert ``value`` to an extended real at ``bits`` precision."""
    ctx = context(bits)
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    if isinstance(value, str):
        return ext(Fraction(value), bits)
    return ctx.mpf(value)


def to_exact(value) -> Fraction:
    """Exact rational value of ``value``.

    Strings are read as decimals, floats and mpf values by their binary
    expansion (which is exact).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidParameterError(f"non-finite value {value!r}")
        return Fraction(value)
    if hasattr(value, "_mpf_"):
        man, exp = _signed_man_exp(value)
        return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)
    return Fraction(value)


def _signed_man_exp(x) -> tuple[int, int]:
    sign, man, exp, _ = x._mpf_
    if not man and exp:
        raise InvalidParameterError(f"non-finite value {x!r}")
    man = int(man)
    return (-man if sign else man), int(exp)


def dyadic_parts(value) -> tuple[int, int]:
    """Write a dyadic rational as ``man * 2**exp`` and return ``(man, exp)``."""
    if hasattr(value, "_mpf_"):
        return _signed_man_exp(value)
    frac = to_exact(value)
    den = frac.denominator
    if den & (den - 1):
        raise InvalidParameterError(f"{value!r} is not a dyadic rational")
    return frac.numerator, -(den.bit_length() - 1)


def interval_from_exact(iv: MPIntervalContext, value: Fraction):
    """Tight interval enclosing the rational ``value``."""
    num = iv.mpf(value.numerator)
    if value.denominator == 1:
        return num
    return num / iv.mpf(value.denominator)


def decimal_string(x, bits: int | None = None) -> str:
    """Decimal string with enough digits to pin down ``x`` at its precision."""
    if isinstance(x, Fraction):
        x = ext(x, bits or DEFAULT_PRECISION)
    ctx = x.context
    digits = int(math.ceil((bits or ctx.prec) * _LOG10_2)) + 1
    return ctx.nstr(x, digits, strip_zeros=False, min_fixed=-5, max_fixed=digits)


@dataclass(frozen=True)
class DensityParam:
    """Edge-density parameter ``p``, kept as the decimal string it came from."""

    text: str
    value: Fraction

    @classmethod
    def parse(cls, p, *, allow_one: bool = False) -> "DensityParam":
        if isinstance(p, DensityParam):
            param = p
        else:
            text = repr(p) if isinstance(p, float) else str(p)
            try:
                value = to_exact(text)
            except (ValueError, ZeroDivisionError) as exc:
                raise InvalidParameterError(f"cannot parse p={p!r}") from exc
            param = cls(text, value)
        if not 0 < param.value <= 1:
            raise InvalidParameterError(f"p must lie in (0, 1], got {param.text}")
        if param.value == 1 and not allow_one:
            raise InvalidParameterError("p = 1 is only accepted by series evaluation")
        return param

    @property
    def exact(self) -> bool:
        """True when p is a dyadic rational, i.e. exactly representable in binary."""
        den = self.value.denominator
        return den & (den - 1) == 0

    def mpf(self, bits: int = DEFAULT_PRECISION):
        return ext(self.value, bits)

    def interval(self, iv: MPIntervalContext):
        return interval_from_exact(iv, self.value)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return self.text
