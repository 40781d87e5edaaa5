"""Real roots of ``f_{p,k}`` and ``f_p``, the part-size weights ``c_i = -1/a_i``
derived from them, and checks of the identities those weights must satisfy.

Both routes scan a geometric grid of points for sign changes and refine each
sign-change cell.  Truncated-polynomial signs are evaluated exactly over the
integers; entire-function enclosures are certified with interval arithmetic
plus a rigorous series tail bound.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

from .defexp import (
    CoefficientList,
    enclose_series,
    kurtz_check,
    peak_term_log2,
    series_value,
    truncated_coefficients,
)
from .errors import (
    BracketingError,
    DistinctnessError,
    InvalidParameterError,
    KurtzPreconditionError,
    RootCountError,
    RootFindingError,
)
from .numeric import (
    DEFAULT_PRECISION,
    DensityParam,
    context,
    decimal_string,
    dyadic_parts,
    ext,
    to_exact,
)

SCAN_DENSITY = 8
MAX_WIDENINGS = 6
DEFAULT_TAIL_TOLERANCE = Fraction(1, 10**9)


@dataclass(frozen=True)
class RootList:
    """Roots ``a_1 > a_2 > ... > a_m`` (all negative) with sign-change enclosures."""

    roots: tuple
    enclosures: tuple
    source: str
    order: int
    p: DensityParam
    precision_bits: int
    certified: bool = True

    def __len__(self) -> int:
        return len(self.roots)


@dataclass(frozen=True)
class WeightSequence:
    """Descending part weights ``c_1 >= c_2 >= ... > 0`` plus leftover tail mass."""

    weights: tuple
    p: DensityParam
    precision_bits: int
    source: str = "truncated"
    tail_mass: object = None

    def __post_init__(self):
        if self.tail_mass is None:
            object.__setattr__(self, "tail_mass", context(self.precision_bits).zero)
        if any(c <= 0 for c in self.weights):
            raise InvalidParameterError("weights must be strictly positive")
        if any(a < b for a, b in zip(self.weights, self.weights[1:])):
            raise InvalidParameterError("weights must be weakly descending")

    def __len__(self) -> int:
        return len(self.weights)

    @classmethod
    def from_values(cls, values, p, precision_bits: int = DEFAULT_PRECISION,
                    source: str = "truncated", tail_mass=None) -> "WeightSequence":
        ws = sorted((ext(to_exact(v), precision_bits) for v in values), reverse=True)
        tail = None if tail_mass is None else ext(to_exact(tail_mass), precision_bits)
        return cls(tuple(ws), DensityParam.parse(p), precision_bits, source, tail)


def asymptotic_seed(k: int, p, precision_bits: int = DEFAULT_PRECISION):
    """Leading-order location ``-k p^(1-k)`` of the k-th largest root."""
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    p = DensityParam.parse(p)
    return ext(-k * p.value ** (1 - k), precision_bits)


# --------------------------------------------------------------------------
# scanning
# --------------------------------------------------------------------------

def _scan_points(p: Fraction, count: int, density: int, widen: int, bits: int) -> list:
    """Descending grid of negative dyadic points covering ``count`` seed windows.

    Seed interpolants ``-sqrt(s_i s_{i+1})`` are kept and every gap between
    consecutive points is split into ``density`` geometric pieces.
    """
    ctx = context(bits)
    P = ext(p, bits)
    seeds = [ext(i * p ** (1 - i), bits) for i in range(1, count + 2)]
    anchors = [-seeds[0] * P]
    anchors += [-ctx.sqrt(seeds[i] * seeds[i + 1]) for i in range(count - 1)]
    anchors.append(-seeds[count - 1] / P * widen)
    points = [anchors[0]]
    for a, b in zip(anchors, anchors[1:]):
        ratio = b / a
        for t in range(1, density + 1):
            points.append(a * ratio ** (ctx.mpf(t) / density))
    return points


def _sign_changes(points, sign_at: Callable, wanted: Optional[int]):
    cells = []
    prev_x, prev_s = None, None
    for x in points:
        s = sign_at(x)
        if not s:
            continue
        if prev_s is not None and s != prev_s:
            cells.append((x, prev_x))
            if wanted is not None and len(cells) >= wanted:
                break
        prev_x, prev_s = x, s
    return cells


# --------------------------------------------------------------------------
# truncated polynomial: exact integer signs
# --------------------------------------------------------------------------

class _IntegerPolynomial:
    """``L * f`` with integer coefficients, for exact signs at dyadic points."""

    def __init__(self, exact):
        lcm = 1
        for b in exact:
            lcm = lcm * b.denominator // math.gcd(lcm, b.denominator)
        self.coeffs = [int(b * lcm) for b in exact]

    def sign(self, x) -> int:
        man, exp = dyadic_parts(x)
        k = len(self.coeffs) - 1
        if exp >= 0:
            xi = man << exp
            acc = 0
            for c in reversed(self.coeffs):
                acc = acc * xi + c
        else:
            # x = man / 2^s; evaluate 2^(s k) f(x) by homogenised Horner
            s = -exp
            acc = 0
            for j, c in enumerate(reversed(self.coeffs)):
                acc = acc * man + (c << (s * j))
        return (acc > 0) - (acc < 0)


def _bisect_exact(poly: _IntegerPolynomial, lo, hi, rel_bits: int, bits: int):
    ctx = context(bits)
    lo, hi = ctx.mpf(lo), ctx.mpf(hi)
    s_lo = poly.sign(lo)
    while hi - lo > ctx.ldexp(abs(lo), -rel_bits):
        mid = (lo + hi) / 2
        s = poly.sign(mid)
        if s == 0:
            return mid, mid, mid
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2, lo, hi


def find_roots_truncated(p, k: int, precision_bits: Optional[int] = None, *,
                         force: bool = False) -> RootList:
    """All ``k`` real roots of ``f_{p,k}``, certified by exact sign changes.

    Raises :class:`KurtzPreconditionError` when the Kurtz criterion fails,
    unless ``force`` is set, in which case whatever real roots are found come
    back in a non-certified list.
    """
    p = DensityParam.parse(p)
    coeffs = truncated_coefficients(p, k, precision_bits)
    bits = coeffs.precision_bits
    kurtz = kurtz_check(coeffs)
    if not kurtz and not force:
        hint = " (f_{p,k} has non-real roots when p > 1/2)" if p.value > Fraction(1, 2) else ""
        raise KurtzPreconditionError(
            f"Kurtz criterion fails at j={kurtz.first_failure} for p={p}, k={k}{hint}",
            index=kurtz.first_failure)
    return _truncated_roots(p, k, coeffs, force and not kurtz)


def _truncated_roots(p: DensityParam, k: int, coeffs: CoefficientList, forced: bool) -> RootList:
    bits = coeffs.precision_bits
    poly = _IntegerPolynomial(coeffs.exact)
    cells = []
    density, widen = SCAN_DENSITY, 1
    for _ in range(MAX_WIDENINGS + 1):
        cells = _sign_changes(_scan_points(p.value, k, density, widen, bits + 32), poly.sign, None)
        if len(cells) >= k:
            break
        density, widen = density * 2, widen * 2
    if len(cells) > k:
        raise DistinctnessError(f"found {len(cells)} sign changes for a degree-{k} polynomial")
    if len(cells) < k and not forced:
        raise RootCountError(
            f"only {len(cells)} of {k} real roots of f_(p,k) found for p={p}",
            index=len(cells) + 1)
    roots, encs = [], []
    for lo, hi in cells:
        root, a, b = _bisect_exact(poly, lo, hi, bits - 8, bits + 32)
        roots.append(context(bits).mpf(root))
        encs.append((a, b))
    _check_disjoint(encs)
    return RootList(tuple(roots), tuple(encs), "truncated", k, p, bits,
                    certified=not forced and len(roots) == k)


def _check_disjoint(encs):
    for i, ((lo1, _), (_, hi2)) in enumerate(zip(encs, encs[1:])):
        if hi2 >= lo1:
            raise DistinctnessError(f"enclosures of roots {i + 1} and {i + 2} overlap", index=i + 2)


# --------------------------------------------------------------------------
# entire function: interval-certified signs
# --------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _eval_bits(p: Fraction, log2_abs_x: int, bits: int) -> int:
    peak, _ = peak_term_log2(p, Fraction(2) ** log2_abs_x)
    return bits + math.ceil(peak) + 40


class _EntireSeries:
    def __init__(self, p: DensityParam, bits: int):
        self.p = p.value
        self.bits = bits

    def eval_bits(self, x) -> int:
        # round |x| up to a power of two so precisions are cached per octave
        return _eval_bits(self.p, int(math.ceil(math.log2(float(-x)))) + 1, self.bits)

    def value(self, x, eval_bits: Optional[int] = None):
        eb = eval_bits or self.eval_bits(x)
        ctx = context(eb)
        return series_value(ext(self.p, eb), ctx.mpf(x), eb)

    def sign(self, x) -> int:
        v = self.value(x)
        return (v > 0) - (v < 0)

    def certified_sign(self, x) -> int:
        """Sign of ``f_p(x)`` backed by an interval enclosure; 0 if undecided."""
        eb = self.eval_bits(x) + 24
        enc = enclose_series(self.p, to_exact(x), eb, Fraction(1, 2 ** (self.bits + 48)))
        if enc.a > 0:
            return 1
        if enc.b < 0:
            return -1
        return 0


def _illinois(series: _EntireSeries, lo, hi, rel_bits: int):
    """Bracketed regula falsi (Illinois variant), bisecting when progress stalls."""
    eb = series.eval_bits(lo)
    ctx = context(eb)
    lo, hi = ctx.mpf(lo), ctx.mpf(hi)
    f_lo, f_hi = series.value(lo, eb), series.value(hi, eb)
    side = 0
    for it in range(4 * rel_bits + 200):
        width = hi - lo
        if width <= ctx.ldexp(abs(lo), -rel_bits):
            break
        if it % 4 == 3:
            mid = (lo + hi) / 2
        else:
            mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
            if not lo < mid < hi:
                mid = (lo + hi) / 2
        f_mid = series.value(mid, eb)
        if f_mid == 0:
            return mid, mid, mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
            if side == -1:
                f_hi /= 2
            side = -1
        else:
            hi, f_hi = mid, f_mid
            if side == 1:
                f_lo /= 2
            side = 1
    return (lo + hi) / 2, lo, hi


def _certify(series: _EntireSeries, cell, index: int):
    cell_lo, cell_hi = cell
    bits = series.bits
    root, lo, hi = _illinois(series, cell_lo, cell_hi, bits - 8)
    ctx = context(series.eval_bits(cell_lo))
    delta = ctx.ldexp(abs(ctx.mpf(root)), -(bits - 6))
    for _ in range(12):
        lo_c, hi_c = max(ctx.mpf(root) - delta, cell_lo), min(ctx.mpf(root) + delta, cell_hi)
        s_lo, s_hi = series.certified_sign(lo_c), series.certified_sign(hi_c)
        if s_lo and s_hi and s_lo != s_hi:
            if hi_c - lo_c < ctx.ldexp(abs(hi_c), -(bits // 2)):
                return context(bits).mpf(root), (lo_c, hi_c)
            break
        delta *= 4
    raise BracketingError(f"could not certify root {index} of f_p", index=index)


def find_roots_entire(p, m: int, precision_bits: int = DEFAULT_PRECISION) -> RootList:
    """The ``m`` largest roots of ``f_p`` with certified enclosures."""
    p = DensityParam.parse(p)
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    bits = max(precision_bits, 64)
    for attempt in range(2):
        series = _EntireSeries(p, bits)
        density, widen = SCAN_DENSITY, 1
        for _ in range(MAX_WIDENINGS + 1):
            cells = _sign_changes(_scan_points(p.value, m, density, widen, bits),
                                  series.sign, m)
            if len(cells) >= m:
                break
            density, widen = density * 2, widen * 2
        if len(cells) >= m:
            break
        bits *= 2
    else:
        raise BracketingError(
            f"only {len(cells)} of {m} roots of f_p bracketed for p={p}", index=len(cells) + 1)
    roots, encs = [], []
    for i, cell in enumerate(cells, start=1):
        root, enc = _certify(series, cell, i)
        roots.append(root)
        encs.append(enc)
    _check_disjoint(encs)
    return RootList(tuple(roots), tuple(encs), "entire", m, p, bits)


def entire_order_for_tail(p, tolerance=DEFAULT_TAIL_TOLERANCE) -> int:
    """Heuristic number of roots so that ``sum_{i>m} c_i`` drops below ``tolerance``.

    Uses ``c_i ~ p^(i-1)/i`` with a safety factor of 4; callers confirm with
    the actual tail mass.
    """
    p = DensityParam.parse(p).value
    tol = float(tolerance)
    m = 1
    while True:
        tail = sum(float(p) ** (i - 1) / i for i in range(m + 1, m + 400))
        if 4 * tail < tol:
            return m
        m += 1


def weights_below_tail(p, tolerance=DEFAULT_TAIL_TOLERANCE,
                       precision_bits: int = DEFAULT_PRECISION, m: Optional[int] = None):
    """Entire-route weights with ``tail_mass < tolerance``; grows ``m`` as needed."""
    m = m or entire_order_for_tail(p, tolerance)
    tol = to_exact(tolerance)
    for _ in range(8):
        roots = find_roots_entire(p, m, precision_bits)
        ws = roots_to_weights(roots)
        if to_exact(ws.tail_mass) < tol:
            return roots, ws
        m = math.ceil(m * 1.25) + 1
    raise RootFindingError(f"tail mass still above {tolerance} at m={m}")


# --------------------------------------------------------------------------
# weights and identities
# --------------------------------------------------------------------------

def roots_to_weights(roots: RootList) -> WeightSequence:
    """``c_i = -1/a_i`` in descending order; entire-route tail is ``1 - sum c_i``."""
    bits = roots.precision_bits
    ctx = context(bits)
    if any(a >= 0 for a in roots.roots):
        raise InvalidParameterError("all roots must be negative")
    ws = tuple(sorted((-1 / ctx.mpf(a) for a in roots.roots), reverse=True))
    tail = ctx.zero
    if roots.source == "entire":
        tail = 1 - ctx.fsum(ws)
        tol = ctx.ldexp(ctx.one, -(bits // 2))
        if tail < -tol:
            raise RootFindingError(f"weights sum to more than 1 (excess {-tail})")
        tail = max(tail, ctx.zero)
    return WeightSequence(ws, roots.p, bits, roots.source, tail)


def elementary_symmetric(values, j_max: int, ctx=None) -> list:
    """Coefficients ``e_0..e_{j_max}`` of ``prod (1 + v_i t)``."""
    e = [1] + [0] * j_max
    if ctx is not None:
        e = [ctx.one] + [ctx.zero] * j_max
    for v in values:
        for j in range(j_max, 0, -1):
            e[j] = e[j] + e[j - 1] * v
    return e


@dataclass(frozen=True)
class SymmetricRow:
    j: int
    sigma: object
    target: object
    rel_dev: object
    bound: object

    @property
    def ok(self) -> bool:
        return abs(self.rel_dev) < self.bound


def verify_elementary_symmetric(weights: WeightSequence, j_max: int) -> list[SymmetricRow]:
    """Compare ``sigma_j(c)`` with ``p^C(j,2)/j!`` for ``j = 1..j_max``.

    The allowed deviation is ``2^(-bits/4)`` plus, for entire-route weights,
    the tail-induced term ``j * tail_mass / target``.
    """
    if j_max > len(weights):
        raise InvalidParameterError("j_max exceeds the number of weights")
    bits = weights.precision_bits
    ctx = context(bits)
    e = elementary_symmetric(weights.weights, j_max, ctx)
    rounding = ctx.ldexp(ctx.one, -(bits // 4))
    rows = []
    for j in range(1, j_max + 1):
        target = ext(weights.p.value ** math.comb(j, 2) / math.factorial(j), bits)
        bound = rounding
        if weights.source == "entire":
            bound = bound + j * weights.tail_mass / target
        rows.append(SymmetricRow(j, e[j], target, e[j] / target - 1, bound))
    return rows


@dataclass(frozen=True)
class WeightBound:
    c1: object
    lower_bound: object
    holds: bool


def max_weight_bound_check(weights: WeightSequence) -> WeightBound:
    """``c_1 >= 1 - p`` up to ``2^(-bits/2)``."""
    bits = weights.precision_bits
    ctx = context(bits)
    c1 = weights.weights[0]
    lower = 1 - ext(weights.p.value, bits)
    return WeightBound(c1, lower, bool(c1 >= lower - ctx.ldexp(ctx.one, -(bits // 2))))


# --------------------------------------------------------------------------
# root tables
# --------------------------------------------------------------------------

def root_table(roots: RootList, weights: Optional[WeightSequence] = None,
               sigma_rows: Optional[list] = None) -> dict:
    """JSON-ready root table; every number is a decimal string."""
    weights = weights or roots_to_weights(roots)
    bits = roots.precision_bits
    table = {
        "p": roots.p.text,
        "source": roots.source,
        "order": roots.order,
        "precision_bits": bits,
        "certified": roots.certified,
        "roots": [decimal_string(a, bits) for a in roots.roots],
        "weights": [decimal_string(c, bits) for c in weights.weights],
        "tail_mass": decimal_string(weights.tail_mass, bits),
    }
    if sigma_rows is not None:
        table["sigma"] = [
            {"j": r.j, "sigma": decimal_string(r.sigma, bits),
             "target": decimal_string(r.target, bits),
             "rel_dev": context(bits).nstr(r.rel_dev, 6), "ok": r.ok}
            for r in sigma_rows
        ]
    return table


def dump_root_table(table: dict) -> str:
    return json.dumps(table, indent=2) + "\n"


def weights_from_table(table: dict) -> WeightSequence:
    """Rebuild a :class:`WeightSequence` from a root table or a bare weights file."""
    bits = int(table.get("precision_bits", DEFAULT_PRECISION))
    return WeightSequence.from_values(
        table["weights"], table["p"], bits,
        source=table.get("source", "truncated"), tail_mass=table.get("tail_mass"))
