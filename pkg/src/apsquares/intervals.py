"""Exact-rational interval arithmetic with rigorous transcendental enclosures.

All quantities that involve pi, gamma, e, log, or irrational powers are carried
as ``RationalInterval`` values: closed intervals with exact ``Fraction``
endpoints that provably contain the true real number.  Rational arithmetic on
intervals is exact (no rounding step is ever needed); transcendental functions
are evaluated through mpmath's outward-rounding interval context and the
binary-float endpoints are converted back to exact rationals.

The working precision defaults to 60 decimal digits and can be overridden with
the ``APRIME_PRECISION`` environment variable or :func:`set_precision`.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from mpmath import iv as _iv
from mpmath import mpf as _mpf
from mpmath.libmp import to_rational as _to_rational

Rational = Union[int, Fraction]

_DEFAULT_DPS = 60
_iv_lock = threading.Lock()


def _initial_dps() -> int:
    raw = os.environ.get("APRIME_PRECISION", "")
    try:
        dps = int(raw)
    except ValueError:
        return _DEFAULT_DPS
    return dps if dps >= 15 else _DEFAULT_DPS


_iv.dps = _initial_dps()


def set_precision(dps: int) -> None:
    """Set the working precision (decimal digits) for interval transcendentals."""
    if dps < 15:
        raise ValueError("precision below 15 digits is not supported")
    with _iv_lock:
        _iv.dps = dps


def get_precision() -> int:
    return _iv.dps


def _fraction_from_mpf_tuple(t) -> Fraction:
    # mpmath binary floats are exactly rational; bypass any context rounding
    num, den = _to_rational(t)
    return Fraction(int(num), int(den))


def _iv_from_fraction(q: Rational):
    q = Fraction(q)
    return _iv.mpf(q.numerator) / q.denominator


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")

    # -- constructors ------------------------------------------------------
    @classmethod
    def point(cls, q: Rational) -> "RationalInterval":
        q = Fraction(q)
        return cls(q, q)

    @classmethod
    def from_iv(cls, x) -> "RationalInterval":
        lo_t, hi_t = x._mpi_
        return cls(_fraction_from_mpf_tuple(lo_t), _fraction_from_mpf_tuple(hi_t))

    @classmethod
    def from_decimal_strings(cls, lo: str, hi: str) -> "RationalInterval":
        return cls(_decimal_to_fraction(lo), _decimal_to_fraction(hi))

    # -- basic queries ------------------------------------------------------
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, q) -> bool:
        if isinstance(q, RationalInterval):
            return self.lo <= q.lo and q.hi <= self.hi
        q = Fraction(q)
        return self.lo <= q <= self.hi

    def strictly_below(self, q: Rational) -> bool:
        """True iff every point of the interval is < q."""
        return self.hi < Fraction(q)

    def strictly_above(self, q: Rational) -> bool:
        return self.lo > Fraction(q)

    # -- arithmetic ----------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "RationalInterval":
        if isinstance(other, RationalInterval):
            return other
        return RationalInterval.point(other)

    def __add__(self, other):
        o = self._coerce(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        cands = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(cands), max(cands))

    __rmul__ = __mul__

    def inverse(self) -> "RationalInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError(f"interval {self} contains zero")
        return RationalInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("use pow_frac for non-integer exponents")
        if k < 0:
            return (self ** (-k)).inverse()
        if k == 0:
            return RationalInterval.point(1)
        if k % 2 == 0 and self.lo < 0 < self.hi:
            cands = (self.lo**k, self.hi**k)
            return RationalInterval(Fraction(0), max(cands))
        cands = (self.lo**k, self.hi**k)
        return RationalInterval(min(cands), max(cands))

    def union(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    # -- transcendental maps (via mpmath's outward-rounded intervals) --------
    def _to_iv(self):
        return _iv.mpf([_iv_from_fraction(self.lo).a, _iv_from_fraction(self.hi).b])

    def coarsen(self) -> "RationalInterval":
        """Outward-round the endpoints to the working binary precision.

        Exact rational arithmetic grows endpoint sizes without bound in long
        iterations; coarsening keeps them at machine-interval size while the
        result still provably contains the original interval.
        """
        with _iv_lock:
            return RationalInterval.from_iv(self._to_iv())

    def exp(self) -> "RationalInterval":
        with _iv_lock:
            return RationalInterval.from_iv(_iv.exp(self._to_iv()))

    def log(self) -> "RationalInterval":
        if self.lo <= 0:
            raise ValueError("log of interval touching (-inf, 0]")
        with _iv_lock:
            return RationalInterval.from_iv(_iv.log(self._to_iv()))

    def sqrt(self) -> "RationalInterval":
        if self.lo < 0:
            raise ValueError("sqrt of negative interval")
        with _iv_lock:
            return RationalInterval.from_iv(_iv.sqrt(self._to_iv()))

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def _decimal_to_fraction(s: str) -> Fraction:
    return Fraction(s)


def pow_frac(base, exponent: Rational) -> RationalInterval:
    """Rigorous enclosure of base**exponent for positive base, rational exponent.

    Integer and half-integer exponents take exact/sqrt fast paths; the general
    case goes through exp(exponent * log(base)).
    """
    e = Fraction(exponent)
    b = base if isinstance(base, RationalInterval) else RationalInterval.point(base)
    if b.lo <= 0:
        raise ValueError("pow_frac requires a strictly positive base")
    if e.denominator == 1:
        return b ** int(e)
    if e.denominator == 2:
        return (b ** int(e.numerator)).sqrt()
    return (b.log() * e).exp()


def exp_ri(x) -> RationalInterval:
    x = x if isinstance(x, RationalInterval) else RationalInterval.point(x)
    return x.exp()


def log_ri(x) -> RationalInterval:
    x = x if isinstance(x, RationalInterval) else RationalInterval.point(x)
    return x.log()


def sum_ri(items: Iterable[RationalInterval]) -> RationalInterval:
    total = RationalInterval.point(0)
    for it in items:
        total = total + it
    return total


def prod_ri(items: Iterable) -> RationalInterval:
    total = RationalInterval.point(1)
    for it in items:
        total = total * it
    return total


# ---------------------------------------------------------------------------
# Transcendental constants.
#
# 40-digit outward-rounded enclosures, validated on import: cheaply against
# mpmath's independent interval constants, and (in the test suite) against
# direct series computations with explicit tail bounds carried out in pure
# rational arithmetic.
# ---------------------------------------------------------------------------

PI = RationalInterval.from_decimal_strings(
    "3.141592653589793238462643383279502884197",
    "3.141592653589793238462643383279502884198",
)
E = RationalInterval.from_decimal_strings(
    "2.718281828459045235360287471352662497757",
    "2.718281828459045235360287471352662497758",
)
GAMMA = RationalInterval.from_decimal_strings(
    "0.5772156649015328606065120900824024310421",
    "0.5772156649015328606065120900824024310422",
)


def _atan_inv_series(n: int, terms: int) -> RationalInterval:
    """Enclosure of arctan(1/n) from its alternating Taylor series."""
    x = Fraction(1, n)
    partial = Fraction(0)
    sign = 1
    for k in range(terms):
        partial += sign * x ** (2 * k + 1) / (2 * k + 1)
        sign = -sign
    tail = x ** (2 * terms + 1) / (2 * terms + 1)
    # alternating with decreasing terms: true value between consecutive partials
    return RationalInterval(partial - tail, partial + tail)


def pi_machin(terms: int = 35) -> RationalInterval:
    """Independent enclosure of pi via Machin's formula (pure rationals)."""
    return (_atan_inv_series(5, terms) * 16) - (_atan_inv_series(239, terms) * 4)


def e_series(terms: int = 40) -> RationalInterval:
    """Independent enclosure of e via sum of 1/k! with a factorial tail bound."""
    partial = Fraction(0)
    fact = 1
    for k in range(terms):
        if k > 0:
            fact *= k
        partial += Fraction(1, fact)
    tail = Fraction(2, fact * terms)  # sum_{k>=terms} 1/k! <= 2/(terms * (terms-1)!)
    return RationalInterval(partial, partial + tail)


_BERNOULLI = {
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
    14: Fraction(7, 6),
}


def log_atanh(q: Fraction, tol: Fraction = Fraction(1, 10**55)) -> RationalInterval:
    """Enclosure of log(q) for q > 1 via 2*atanh((q-1)/(q+1)) (pure rationals)."""
    if q <= 1:
        raise ValueError("log_atanh needs q > 1")
    x = (q - 1) / (q + 1)
    x2 = x * x
    partial = Fraction(0)
    power = x
    k = 0
    while power / ((2 * k + 1) * (1 - x2)) > tol:
        partial += power / (2 * k + 1)
        power *= x2
        k += 1
    tail = power / ((2 * k + 1) * (1 - x2))
    return RationalInterval(2 * partial, 2 * (partial + tail))


def gamma_euler_maclaurin(n: int = 8192, order: int = 5) -> RationalInterval:
    """Independent enclosure of Euler's gamma.

    Uses gamma = H_n - log n - 1/(2n) + sum B_{2k}/(2k n^{2k}) with the classic
    enveloping property of the asymptotic series: the error after truncation is
    bounded by the first omitted term and has its sign, so consecutive partial
    sums bracket the true value.  ``n`` must be a power of two so that log(n)
    reduces to a multiple of log(2), which the atanh series delivers quickly.
    """
    if n & (n - 1):
        raise ValueError("n must be a power of two")
    h = Fraction(0)
    for k in range(1, n + 1):
        h += Fraction(1, k)
    log_n = log_atanh(Fraction(2)) * n.bit_length() - log_atanh(Fraction(2))
    if n == 1:
        log_n = RationalInterval.point(0)
    base = h - Fraction(1, 2 * n)
    correction = Fraction(0)
    for k in range(1, order + 1):
        correction += _BERNOULLI[2 * k] / (2 * k * Fraction(n) ** (2 * k))
    first_omitted = abs(_BERNOULLI[2 * order + 2]) / (
        (2 * order + 2) * Fraction(n) ** (2 * order + 2)
    )
    val = RationalInterval(
        base + correction - first_omitted, base + correction + first_omitted
    )
    return val - log_n


def zeta_euler_maclaurin(s: Rational, n: int = 200, order: int = 6) -> RationalInterval:
    """Rigorous enclosure of zeta(s) for rational s > 1 via Euler--Maclaurin.

    zeta(s) = sum_{k<=n} k^{-s} + n^{1-s}/(s-1) - n^{-s}/2
              + sum_{j=1}^{order} B_{2j}/(2j)! * (s)_{2j-1} * n^{-s-2j+1} + R,
    with |R| bounded by the first omitted correction term for real s > 1.
    """
    s = Fraction(s)
    if s <= 1:
        raise ValueError("zeta_euler_maclaurin needs s > 1")
    head = RationalInterval.point(0)
    for k in range(1, n + 1):
        head = head + pow_frac(Fraction(k), -s)
    n_pow = pow_frac(Fraction(n), 1 - s)
    head = head + n_pow / (s - 1)
    n_minus_s = pow_frac(Fraction(n), -s)
    head = head - n_minus_s * Fraction(1, 2)

    def rising(a: Fraction, m: int) -> Fraction:
        out = Fraction(1)
        for i in range(m):
            out *= a + i
        return out

    fact = 1
    corr = RationalInterval.point(0)
    term_ri = RationalInterval.point(0)
    for j in range(1, order + 2):
        fact = fact * (2 * j - 1) * (2 * j)
        coef = _BERNOULLI[2 * j] / fact * rising(s, 2 * j - 1)
        term_ri = pow_frac(Fraction(n), -(s + 2 * j - 1)) * coef
        if j <= order:
            corr = corr + term_ri
    remainder_mag = max(abs(term_ri.lo), abs(term_ri.hi))
    corr = corr + RationalInterval(-remainder_mag, remainder_mag)
    return head + corr


def _validate_constants() -> None:
    # a tight provable enclosure sitting inside the embedded one certifies
    # that the embedded interval contains the true constant
    with _iv_lock:
        old = _iv.prec
        try:
            _iv.prec = 170
            checks = [(PI, _iv.pi), (E, _iv.e), (GAMMA, _iv.euler)]
            for ours, theirs in checks:
                box = RationalInterval.from_iv(theirs)
                if box not in ours:
                    raise AssertionError(f"constant enclosure {ours} inconsistent with mpmath {box}")
        finally:
            _iv.prec = old
    # independent series checks in pure rational arithmetic
    if pi_machin(terms=35) not in PI:
        raise AssertionError("embedded pi enclosure fails Machin-series validation")
    if e_series(terms=40) not in E:
        raise AssertionError("embedded e enclosure fails series validation")
    coarse_gamma = gamma_euler_maclaurin(n=32, order=3)
    if GAMMA.hi < coarse_gamma.lo or coarse_gamma.hi < GAMMA.lo:
        raise AssertionError("embedded gamma enclosure fails Euler-Maclaurin validation")


_validate_constants()
