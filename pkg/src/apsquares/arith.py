"""Exact integer arithmetic: factorization, almost-prime classes, multiplicative
functions, explicit constants, Mertens products and congruence-subgroup counts.

Everything here is deterministic and exact.  Quantities that are genuinely
irrational (products weighted by n^alpha, Rosser--Schoenfeld bounds) come back
as :class:`~apsquares.intervals.RationalInterval` enclosures.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, lcm, prod
from typing import Iterable, Optional

from .intervals import (
    GAMMA,
    RationalInterval,
    exp_ri,
    log_ri,
    pow_frac,
    zeta_euler_maclaurin,
)

# ---------------------------------------------------------------------------
# Primes
# ---------------------------------------------------------------------------

_MAX_FACTOR_INPUT = 1 << 63
_TRIAL_LIMIT = 100_000

_sieve_lock = threading.Lock()
_sieve_limit = 0
_sieve_primes: list[int] = []


def primes_upto(limit: int) -> list[int]:
    """All primes <= limit, from a cached Eratosthenes sieve.

    The cache only grows; replacing the shared list wholesale keeps concurrent
    readers safe (they keep iterating the old list).
    """
    global _sieve_limit, _sieve_primes
    if limit <= _sieve_limit:
        ps = _sieve_primes
        # bisect would also do; the list is sorted
        import bisect

        return ps[: bisect.bisect_right(ps, limit)]
    with _sieve_lock:
        if limit > _sieve_limit:
            n = max(limit, 2 * _sieve_limit, 1 << 16)
            sieve = bytearray([1]) * (n + 1)
            sieve[0:2] = b"\x00\x00"
            for p in range(2, isqrt(n) + 1):
                if sieve[p]:
                    sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
            _sieve_primes = [i for i in range(2, n + 1) if sieve[i]]
            _sieve_limit = n
    return primes_upto(limit)


def primes_in(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p < hi."""
    if hi <= lo:
        return []
    return [p for p in primes_upto(hi - 1) if p >= lo]


def next_prime(n: int) -> int:
    """Least prime strictly greater than n."""
    k = n + 1
    while not is_prime(k):
        k += 1
    return k


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test for 0 <= n < 2^64.

    Trial division below 100, then Miller--Rabin with the 12-witness set that
    is known to be exact for all n < 3.3 * 10^24.
    """
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Brent-cycle Pollard rho; returns a nontrivial factor of composite odd n."""
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"pollard rho failed on {n}")  # pragma: no cover


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition n = prod p^e with primes strictly increasing."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, e in self.pairs:
            if p <= last or e < 1 or not is_prime(p):
                raise ValueError(f"invalid factorization {self.pairs}")
            last = p

    @property
    def n(self) -> int:
        return prod(p**e for p, e in self.pairs)

    def ord(self, p: int) -> int:
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.pairs)

    @property
    def omega(self) -> int:
        return len(self.pairs)

    def divisors(self) -> list[int]:
        out = [1]
        for p, e in self.pairs:
            out = [d * p**i for d in out for i in range(e + 1)]
        return sorted(out)


@lru_cache(maxsize=200_000)
def factor(n: int) -> Factorization:
    """Exact factorization of 1 <= n < 2^63 (deterministic)."""
    if n < 1:
        raise ValueError("factorization is only defined for n >= 1")
    if n >= _MAX_FACTOR_INPUT:
        raise ValueError("inputs beyond 63 bits are out of scope")
    pairs: dict[int, int] = {}
    rem = n
    for p in primes_upto(min(_TRIAL_LIMIT, isqrt(n) + 1)):
        if p * p > rem:
            break
        while rem % p == 0:
            pairs[p] = pairs.get(p, 0) + 1
            rem //= p
    stack = [rem] if rem > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            pairs[m] = pairs.get(m, 0) + 1
            continue
        root = isqrt(m)
        if root * root == m:
            stack += [root, root]
            continue
        d = _pollard_rho(m)
        stack += [d, m // d]
    return Factorization(tuple(sorted(pairs.items())))


def ord_p(n: int, p: int) -> int:
    """Exponent of the prime p in n (n >= 1)."""
    if n == 0:
        raise ValueError("ord_p(0) is infinite")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def mobius(n: int) -> int:
    f = factor(n)
    if any(e > 1 for _, e in f.pairs):
        return 0
    return -1 if f.omega % 2 else 1


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factor(n).pairs:
        out = out // p * (p - 1)
    return out


def divisors(n: int) -> list[int]:
    return factor(n).divisors()


def sigma(k: int, n: int) -> Fraction:
    """Exact sum of k-th powers of the divisors of n (k may be negative)."""
    if n < 1:
        raise ValueError("sigma needs n >= 1")
    out = Fraction(1)
    for p, e in factor(n).pairs:
        q = Fraction(p) ** k
        if q == 1:
            out *= e + 1
        else:
            out *= (q ** (e + 1) - 1) / (q - 1)
    return out


# ---------------------------------------------------------------------------
# Almost primes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlmostPrimeClass:
    """The class P_{r,S}: x whose prime multiplicity outside S is at most r.

    Zero belongs to every class by convention.  S empty gives the plain
    almost-prime class P_r.
    """

    r: int
    S: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be >= 0")
        object.__setattr__(self, "S", frozenset(self.S))
        for p in self.S:
            if not is_prime(p):
                raise ValueError(f"{p} in S is not prime")


def multiplicity_outside(x: int, S: frozenset[int] | set[int] = frozenset()) -> int:
    """Total prime multiplicity of x ignoring primes in S (x >= 1)."""
    return sum(e for p, e in factor(x).pairs if p not in S)


def is_member(x: int, cls: AlmostPrimeClass) -> bool:
    if x < 0:
        x = -x
    if x == 0:
        return True
    return multiplicity_outside(x, cls.S) <= cls.r


# ---------------------------------------------------------------------------
# Explicit constants
# ---------------------------------------------------------------------------

DEFAULT_PRIME_CAP = 2_000_000


class PrimeCapExceeded(ValueError):
    pass


def _primes_below_threshold(base: int, alpha: Fraction, cap: int) -> list[int]:
    """Primes p with p**alpha < base, i.e. p < base**(1/alpha), by exact tests."""
    # p^alpha < base  <=>  p^num < base^den  for alpha = num/den
    num, den = alpha.numerator, alpha.denominator
    rhs = base**den
    # quick float bound for the sieve size
    bound = int(round(base ** (1 / float(alpha)))) + 10
    if bound > cap:
        raise PrimeCapExceeded(
            f"constant needs primes up to ~{bound}, above the cap {cap}"
        )
    return [p for p in primes_upto(bound) if p**num < rhs]


def _best_exponent(ratio_next) -> int:
    """Smallest j >= 1 maximizing a unimodal factor, via its ratio test.

    ``ratio_next(j)`` must return True while moving from j to j+1 does not
    decrease the factor.
    """
    j = 1
    while ratio_next(j):
        j += 1
    return j


def explicit_constant(
    name: str, parameter: Fraction, prime_cap: int = DEFAULT_PRIME_CAP
) -> RationalInterval:
    """Rigorous enclosure of one of the finite-product constants.

    C_alpha bounds sigma_0(n)/n^alpha, G_alpha bounds sigma_{-1}(n)/n^alpha,
    D_alpha bounds 2^omega(n)/n^alpha, E_alpha bounds 3^omega(n)/n^alpha, and
    c_delta bounds prod_{p|m}(1+1/p)/m^delta.  Each is a finite product over
    an explicitly determined prime range, maximized over prime exponents where
    applicable; the value A * (prod p^{j_p})^{-alpha} is enclosed by carrying
    the exact integers A, prod p^{j_p} and taking the irrational power last.
    """
    alpha = Fraction(parameter)
    if alpha <= 0:
        raise ValueError("parameter must be positive")
    num, den = alpha.numerator, alpha.denominator

    if name == "C_alpha":
        ps = _primes_below_threshold(2, alpha, prime_cap)
        rational_part = Fraction(1)
        weighted = Fraction(0)  # sum of j_p * log p handled via exact product
        log_arg = 1
        for p in ps:
            # factor (j+1)/p^{j alpha}; ratio test (j+2)^den >= (j+1)^den * p^num
            j = _best_exponent(lambda j, p=p: (j + 2) ** den > (j + 1) ** den * p**num)
            rational_part *= j + 1
            log_arg *= p**j
        return rational_part * pow_frac(Fraction(log_arg), -alpha)

    if name == "G_alpha":
        # include p iff the j=1 factor exceeds 1: p^alpha (p-1) < p; the
        # condition is monotone in p, so stop at the first failure
        ps = []
        p = 2
        while p**num * (p - 1) ** den < p**den:
            ps.append(p)
            if p > prime_cap:
                raise PrimeCapExceeded(f"prime range above cap {prime_cap}")
            p = next_prime(p)
        rational_part = Fraction(1)
        log_arg = 1
        for p in ps:
            # factor (1 - p^{-j-1}) / ((1 - 1/p) p^{j alpha})
            def ratio_ok(j, p=p):
                lhs = 1 - Fraction(p) ** (-(j + 2))
                rhs = 1 - Fraction(p) ** (-(j + 1))
                return lhs**den > rhs**den * p**num

            j = _best_exponent(ratio_ok)
            rational_part *= (1 - Fraction(p) ** (-(j + 1))) / (1 - Fraction(1, p))
            log_arg *= p**j
        return rational_part * pow_frac(Fraction(log_arg), -alpha)

    if name in ("D_alpha", "E_alpha"):
        base = 2 if name == "D_alpha" else 3
        ps = _primes_below_threshold(base, alpha, prime_cap)
        rational_part = Fraction(base) ** len(ps)
        log_arg = prod(ps) if ps else 1
        return rational_part * pow_frac(Fraction(log_arg), -alpha)

    if name == "c_delta":
        p0 = least_admissible_prime(alpha)
        ps = primes_upto(p0 - 1)
        rational_part = Fraction(1)
        log_arg = 1
        for p in ps:
            rational_part *= 1 + Fraction(1, p)
            log_arg *= p
        return rational_part * pow_frac(Fraction(log_arg), -alpha)

    raise ValueError(f"unknown constant {name!r}")


def least_admissible_prime(delta: Fraction, search_cap: int = 200_000) -> int:
    """Least prime p0 with p0 > (1 + 1/p0)^(1/delta).

    Decided by comparing log p0 against (1/delta) log(1 + 1/p0) in interval
    arithmetic; the margin is far wider than the interval widths for every
    prime, so the comparisons are conclusive.
    """
    delta = Fraction(delta)
    inv = 1 / delta
    for p in primes_upto(search_cap):
        lhs = log_ri(Fraction(p))
        rhs = log_ri(1 + Fraction(1, p)) * inv
        if lhs.lo > rhs.hi:
            return p
        if lhs.hi >= rhs.lo and lhs.lo <= rhs.hi:  # pragma: no cover
            raise ArithmeticError(
                f"interval comparison inconclusive at p={p}; raise precision"
            )
    raise PrimeCapExceeded("no admissible prime below the search cap")


# ---------------------------------------------------------------------------
# Mertens product and the Rosser--Schoenfeld two-sided bound
# ---------------------------------------------------------------------------


def mertens_product(z: int, direction: Optional[str] = None) -> RationalInterval:
    """Exact prod_{p<=z}(1 - 1/p) as a point interval, checked against the
    Rosser--Schoenfeld bracket.

    ``direction`` may be "lower", "upper" or None: which side(s) of the
    bracket to verify.  A failed verification raises ArithmeticError.
    """
    if z < 2:
        raise ValueError("z must be >= 2")
    value = Fraction(1)
    for p in primes_upto(z):
        value *= 1 - Fraction(1, p)
    point = RationalInterval.point(value)
    lower, upper = mertens_bounds(z)
    if direction in (None, "lower") and not value > lower.hi:
        raise ArithmeticError(f"Mertens lower bound fails at z={z}")
    if direction in (None, "upper") and not value < upper.lo:
        raise ArithmeticError(f"Mertens upper bound fails at z={z}")
    return point


def mertens_bounds(z: int) -> tuple[RationalInterval, RationalInterval]:
    """The Rosser--Schoenfeld bracket around prod_{p<=z}(1-1/p):

    e^{-gamma}/log z * (1 + 1/log^2 z)^{-1}  <  product  <
    e^{-gamma}/log z * (1 + 1/(2 log^2 z)).
    """
    lz = log_ri(Fraction(z))
    base = exp_ri(-GAMMA) / lz
    lz2 = lz * lz
    lower = base / (1 + lz2.inverse())
    upper = base * (1 + (lz2 * 2).inverse())
    return lower, upper


# ---------------------------------------------------------------------------
# Exponential sum bound
# ---------------------------------------------------------------------------


def _delta_n(n_mod: int) -> Fraction:
    if n_mod == 1:
        return Fraction(1, 4)
    if n_mod in (2, 3):
        return Fraction(1, 2)
    return Fraction(1)


def exp_sum_value(k: int, N: int) -> RationalInterval:
    """Rigorous enclosure of sum_{n>=1} n^k e^{-2 pi n / N}."""
    if k < 0 or N < 1:
        raise ValueError("need k >= 0, N >= 1")
    from .intervals import PI

    q = exp_ri(-(PI * 2) / N)  # e^{-2 pi / N} < 1
    total = RationalInterval.point(0)
    q_pow = RationalInterval.point(1)
    # after n0 the term ratio is at most ratio_cap < 1
    n0 = max(2 * k * N, N, 8)
    for n in range(1, n0 + 1):
        q_pow = (q_pow * q).coarsen()
        total = (total + q_pow * n**k).coarsen()
    # tail: term(n0+1) / (1 - rho), rho >= ((n+1)/n)^k * q for n > n0
    ratio_cap = pow_frac(Fraction(n0 + 1, n0), k) * q
    if not ratio_cap.strictly_below(1):
        raise ArithmeticError("tail ratio bound inconclusive; enlarge n0")
    tail_top = q_pow * q * Fraction(n0 + 1) ** k
    tail = RationalInterval(Fraction(0), (tail_top / (1 - ratio_cap)).hi)
    return total + tail


def exp_sum_bound_check(k: int, N: int) -> bool:
    """Check both stated bounds on sum n^k e^{-2 pi n/N}.

    The first is k!/(1-e^{-2 pi/N})^{k+1}; the second k!/(delta_N pi)^{k+1}
    * N^{k+1} with delta_1 = 1/4, delta_2 = delta_3 = 1/2, delta_N = 1 beyond.
    """
    if k > 12 or N > 10**4:
        raise ValueError("outside the supported range k <= 12, N <= 10^4")
    from math import factorial

    from .intervals import PI

    s = exp_sum_value(k, N)
    kfact = factorial(k)
    q = exp_ri(-(PI * 2) / N)
    bound1 = Fraction(kfact) / (1 - q) ** (k + 1)
    delta = _delta_n(min(N, 4))
    bound2 = (PI * delta).inverse() ** (k + 1) * kfact * Fraction(N) ** (k + 1)
    return s.hi <= bound1.lo and s.hi <= bound2.lo


# ---------------------------------------------------------------------------
# Congruence subgroup indices and cusp counts
# ---------------------------------------------------------------------------


def index_gamma0(N: int) -> int:
    """[SL_2(Z) : Gamma_0(N)] = N prod_{p|N} (1 + 1/p)."""
    if N < 1:
        raise ValueError("N >= 1 required")
    out = N
    for p, _ in factor(N).pairs:
        out = out // p * (p + 1)
    return out


def index_gamma(N: int) -> int:
    """[SL_2(Z) : Gamma(N)] = N^3 prod_{p|N} (1 - 1/p^2)."""
    if N < 1:
        raise ValueError("N >= 1 required")
    out = N**3
    for p, _ in factor(N).pairs:
        out = out // (p * p) * (p * p - 1)
    return out


def cusp_count(N: int, delta: int) -> int:
    """Number of cusps of Gamma(N) whose lower-left entry has gcd delta with N."""
    if N < 1 or delta < 1 or N % delta != 0:
        raise ValueError("need delta | N")
    return euler_phi(N // delta) * euler_phi(delta) * (N // delta)
