"""The deformed exponential ``f_p(x) = sum_j x^j p^(j(j-1)/2) / j!`` and its truncations.

Series are evaluated in interval arithmetic and closed off with a geometric
tail bound, so every returned value comes with a rigorous error bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InvalidParameterError, NonConvergenceError
from .numeric import (
    DEFAULT_PRECISION,
    DensityParam,
    context,
    ext,
    interval_context,
    interval_from_exact,
    to_exact,
)

TERM_CAP = 100_000


def precision_floor(p, k: int) -> int:
    """Bits needed so the smallest coefficient ``p^C(k,2)/k!`` keeps 64 significant bits."""
    p = DensityParam.parse(p, allow_one=True)
    log_inv_p = -math.log2(p.value.numerator) + math.log2(p.value.denominator)
    need = math.comb(k, 2) * log_inv_p + k * math.log2(max(k, 1)) + 64
    return max(128, math.ceil(need))


# --------------------------------------------------------------------------
# series kernels
# --------------------------------------------------------------------------

def _log2_abs(x: Fraction) -> float:
    if x == 0:
        return -math.inf
    return math.log2(abs(x.numerator)) - math.log2(x.denominator)


def peak_term_log2(p: Fraction, x: Fraction, shift: int = 0) -> tuple[float, int]:
    """Estimate ``(log2 max_j |t_j|, j*)`` where j* is the first index whose
    term ratio ``|x| p^(j+shift)/(j+1)`` drops below 1."""
    lx = _log2_abs(x)
    if lx == -math.inf:
        return 0.0, 0
    lp = _log2_abs(p)
    log_term, best, j = 0.0, 0.0, 0
    while True:
        log_ratio = lx + (j + shift) * lp - math.log2(j + 1)
        if log_ratio < 0:
            return best, j
        log_term += log_ratio
        best = max(best, log_term)
        j += 1
        if j > TERM_CAP:
            raise NonConvergenceError(f"more than {TERM_CAP} terms needed at x={float(x):g}")


def _working_bits(p: Fraction, x: Fraction, target_log2: float, shift: int, floor: int) -> int:
    peak, jstar = peak_term_log2(p, x, shift)
    bits = peak - target_log2 + math.log2(2 * jstar + 8) + 24
    for v in (p, x):
        bits = max(bits, v.numerator.bit_length() + 8)
        if v.denominator & (v.denominator - 1):
            bits = max(bits, v.denominator.bit_length() + 8)
    return max(floor, math.ceil(bits))


def enclose_series(p: Fraction, x: Fraction, bits: int, tail_target, *,
                   shift: int = 0, term_cap: int = TERM_CAP):
    """Interval containing ``sum_j x^j p^(C(j,2) + shift*j) / j!``.

    ``shift=1`` gives the term-wise derivative series.  Summation stops at the
    first J >= 2 j* with ``|t_J| < tail_target (1 - r_J)``; the remaining tail
    is bounded by ``|t_J| r_J / (1 - r_J)`` and added as a symmetric radius.
    """
    iv = interval_context(bits)
    P = interval_from_exact(iv, p)
    X = interval_from_exact(iv, x)
    absx = abs(X)
    target = interval_from_exact(iv, to_exact(tail_target))
    total = iv.mpf(0)
    term = iv.mpf(1)
    pj = P if shift else iv.mpf(1)
    jstar = None
    for j in range(term_cap + 1):
        total += term
        ratio = (absx * pj / (j + 1)).b
        if jstar is None and ratio < 1:
            jstar = j
        if jstar is not None and j >= 2 * jstar:
            mag = abs(term).b
            if mag < (target * (1 - iv.mpf(ratio))).a:
                tail = (iv.mpf(mag) * ratio / (1 - iv.mpf(ratio))).b
                return total + iv.mpf([-tail, tail])
        term = term * X * pj / (j + 1)
        pj = pj * P
    raise NonConvergenceError(
        f"series at x={float(x):g}, p={float(p):g} needs more than {term_cap} terms")


def series_value(p_mpf, x_mpf, stop_bits: int, shift: int = 0):
    """Fast (non-certified) series value in the context of ``x_mpf``.

    Stops once terms fall below ``2^-stop_bits`` times the largest term.
    """
    ctx = x_mpf.context
    total = ctx.zero
    term = ctx.one
    pj = p_mpf if shift else ctx.one
    peak = ctx.one
    eps = ctx.ldexp(ctx.one, -stop_bits)
    ax = abs(x_mpf)
    jstar = None
    for j in range(TERM_CAP + 1):
        total += term
        ratio = ax * pj / (j + 1)
        if jstar is None and ratio < 1:
            jstar = j
        if jstar is not None and j >= 2 * jstar and abs(term) < eps * peak:
            return total
        term = term * x_mpf * pj / (j + 1)
        pj = pj * p_mpf
        if abs(term) > peak:
            peak = abs(term)
    raise NonConvergenceError(f"series needs more than {TERM_CAP} terms")


def series_tail_bound(p, x, k: int, bits: int = DEFAULT_PRECISION):
    """Upper bound on ``sum_{j>k} |x|^j p^C(j,2) / j!``."""
    p = DensityParam.parse(p, allow_one=True).value
    ax = abs(to_exact(x))
    iv = interval_context(bits)
    P = interval_from_exact(iv, p)
    X = interval_from_exact(iv, ax)
    # t_{k+1} built directly, then summed until a geometric bound applies
    term = iv.mpf(1)
    for j in range(k + 1):
        term = term * X * P**j / (j + 1)
    total = iv.mpf(0)
    j = k + 1
    eps = iv.mpf(2) ** (-bits)
    while True:
        ratio = (X * P**j / (j + 1)).b
        if ratio < 0.5 and term.b < (eps * (total.b + 1)).b:
            total += term * (1 / (1 - iv.mpf(ratio)))
            return context(bits).mpf(total.b)
        total += term
        term = term * X * P**j / (j + 1)
        j += 1
        if j > TERM_CAP:
            raise NonConvergenceError("tail bound did not converge")


def _eval(p, x, target_abs_err, shift, term_cap, precision_bits):
    p = DensityParam.parse(p, allow_one=True)
    x = to_exact(x)
    err = to_exact(target_abs_err)
    if err <= 0:
        raise InvalidParameterError("target_abs_err must be positive")
    floor = max(precision_bits or DEFAULT_PRECISION, DEFAULT_PRECISION)
    bits = _working_bits(p.value, x, _log2_abs(err), shift, floor)
    for _ in range(8):
        enc = enclose_series(p.value, x, bits, err / 2, shift=shift, term_cap=term_cap)
        ctx = context(bits)
        if ctx.mpf(enc.delta.b) / 2 < ext(err, bits):
            return ctx.mpf(enc.mid.a)
        bits *= 2
    raise NonConvergenceError("could not reach the requested accuracy")


def eval_deformed_exp(p, x, target_abs_err=Fraction(1, 10**30), *,
                      term_cap: int = TERM_CAP, precision_bits: Optional[int] = None):
    """``f_p(x)`` to within ``target_abs_err`` (rigorous).

    ``p = 1`` is accepted and gives ``e^x``.
    """
    return _eval(p, x, target_abs_err, 0, term_cap, precision_bits)


def eval_deformed_exp_derivative(p, x, target_abs_err=Fraction(1, 10**30), *,
                                 term_cap: int = TERM_CAP,
                                 precision_bits: Optional[int] = None):
    """``f_p'(x)`` by term-wise differentiation, to within ``target_abs_err``."""
    return _eval(p, x, target_abs_err, 1, term_cap, precision_bits)


def pantograph_residual(p, x, target_abs_err=Fraction(1, 10**30), *,
                        term_cap: int = TERM_CAP):
    """``f_p'(x) - f_p(p x)``; each side is within ``target_abs_err``, so
    the true residual being 0 forces ``|result| < 2 target_abs_err``."""
    p = DensityParam.parse(p, allow_one=True)
    x = to_exact(x)
    d = eval_deformed_exp_derivative(p, x, target_abs_err, term_cap=term_cap)
    f = eval_deformed_exp(p, p.value * x, target_abs_err, term_cap=term_cap)
    bits = max(d.context.prec, f.context.prec)
    return ext(d, bits) - ext(f, bits)


# --------------------------------------------------------------------------
# truncated polynomial
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientList:
    """Coefficients ``b_0..b_k`` of a real polynomial, lowest degree first.

    ``exact`` holds the rational values when they are known, which lets
    comparisons and sign evaluations be done without rounding.
    """

    coeffs: tuple
    precision_bits: int
    exact: Optional[tuple] = None
    p: Optional[DensityParam] = None

    @property
    def k(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_values(cls, values: Sequence, precision_bits: int = DEFAULT_PRECISION):
        exact = tuple(to_exact(v) for v in values)
        return cls(tuple(ext(v, precision_bits) for v in exact), precision_bits, exact)


def truncated_coefficients(p, k: int, precision_bits: Optional[int] = None) -> CoefficientList:
    """``b_j = p^C(j,2) / j!`` for ``j = 0..k``."""
    p = DensityParam.parse(p, allow_one=True)
    if k < 2:
        raise InvalidParameterError(f"k must be >= 2, got {k}")
    bits = max(precision_floor(p, k), precision_bits or 0)
    exact = tuple(p.value ** math.comb(j, 2) / math.factorial(j) for j in range(k + 1))
    return CoefficientList(tuple(ext(b, bits) for b in exact), bits, exact, p)


def eval_truncated(coeffs: CoefficientList, x):
    """Horner evaluation of ``sum_j b_j x^j`` at the list's precision."""
    ctx = context(coeffs.precision_bits)
    xv = ext(to_exact(x), coeffs.precision_bits) if not hasattr(x, "context") else ctx.mpf(x)
    acc = ctx.zero
    for b in reversed(coeffs.coeffs):
        acc = acc * xv + b
    return acc


@dataclass(frozen=True)
class KurtzResult:
    holds: bool
    first_failure: Optional[int] = None
    inconclusive: bool = False

    def __bool__(self) -> bool:
        return self.holds


def kurtz_check(coeffs: CoefficientList) -> KurtzResult:
    """Test ``b_j^2 > 4 b_{j-1} b_{j+1}`` for ``1 <= j <= k-1``.

    Exact rationals are compared exactly.  Otherwise a relative guard band of
    ``2^(-bits/2)`` is used and a comparison inside the band counts as a
    failure (flagged ``inconclusive``).
    """
    if coeffs.exact is not None:
        b = coeffs.exact
        if any(c <= 0 for c in b):
            raise InvalidParameterError("Kurtz criterion needs positive coefficients")
        for j in range(1, len(b) - 1):
            if not b[j] * b[j] > 4 * b[j - 1] * b[j + 1]:
                return KurtzResult(False, j)
        return KurtzResult(True)

    b = coeffs.coeffs
    if any(c <= 0 for c in b):
        raise InvalidParameterError("Kurtz criterion needs positive coefficients")
    ctx = context(coeffs.precision_bits)
    guard = ctx.ldexp(ctx.one, -(coeffs.precision_bits // 2))
    for j in range(1, len(b) - 1):
        lhs = b[j] * b[j]
        diff = lhs - 4 * b[j - 1] * b[j + 1]
        if diff <= 0:
            return KurtzResult(False, j)
        if diff <= guard * lhs:
            return KurtzResult(False, j, inconclusive=True)
    return KurtzResult(True)
