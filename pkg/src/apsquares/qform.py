"""Diagonal quadratic forms and exact representation counting.

Counts are signed (x ranges over Z^l); representation sets are stored
sign-folded: one vector per nonnegative orbit together with its weight
2^(number of nonzero coordinates).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt, lcm, prod

import numpy as np

from . import kernels
from .arith import AlmostPrimeClass, factor, is_member, mobius, multiplicity_outside, primes_in
from .intervals import RationalInterval, pow_frac

COUNT_CAP = 10**9


class CountCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class DiagonalForm:
    """Q(x) = sum a_j x_j^2 with positive integer coefficients, 1 <= l <= 4."""

    a: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if not 1 <= len(a) <= 4 or any(x < 1 for x in a):
            raise ValueError(f"bad coefficient vector {a}")

    @property
    def ell(self) -> int:
        return len(self.a)

    @property
    def gram_det(self) -> int:
        """Determinant of the Gram matrix (diagonal entries a_j)."""
        return prod(self.a)

    @property
    def delta(self) -> int:
        """The discriminant 2^l * prod a_j (determinant of the even Gram matrix)."""
        return (1 << self.ell) * prod(self.a)

    @property
    def level(self) -> int:
        """N = 4 lcm(a_j), the level of the quaternary theta series."""
        if self.ell != 4:
            raise ValueError("level is defined here for quaternary forms only")
        return 4 * lcm(*self.a)

    def __call__(self, x) -> int:
        return sum(c * int(v) ** 2 for c, v in zip(self.a, x))

    def scaled(self, d) -> "ScaledForm":
        return ScaledForm(self, tuple(d))


@dataclass(frozen=True)
class ScaledForm:
    """Q_{a.d^2}(x) = sum a_j (d_j x_j)^2 with squarefree positive d_j."""

    base: DiagonalForm
    d: tuple[int, ...]

    def __post_init__(self):
        d = tuple(int(x) for x in self.d)
        object.__setattr__(self, "d", d)
        if len(d) != self.base.ell or any(x < 1 for x in d):
            raise ValueError(f"bad scaling vector {d}")
        for x in d:
            if any(e > 1 for _, e in factor(x).pairs):
                raise ValueError(f"scaling entry {x} is not squarefree")

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(a * dd * dd for a, dd in zip(self.base.a, self.d))

    @property
    def ell(self) -> int:
        return self.base.ell

    @property
    def gram_det(self) -> int:
        return prod(self.coeffs)

    @property
    def delta(self) -> int:
        return (1 << self.ell) * prod(self.coeffs)

    @property
    def level(self) -> int:
        if self.ell != 4:
            raise ValueError("level is defined here for quaternary forms only")
        return 4 * lcm(*self.coeffs)


def as_scaled(form) -> ScaledForm:
    if isinstance(form, ScaledForm):
        return form
    if isinstance(form, DiagonalForm):
        return ScaledForm(form, (1,) * form.ell)
    return ScaledForm(DiagonalForm(tuple(form)), (1,) * len(tuple(form)))


@dataclass(frozen=True)
class RepresentationSet:
    """Sign-folded solutions of Q(x) = m: nonnegative vectors plus weights."""

    m: int
    vectors: tuple[tuple[int, ...], ...]
    count: int

    def __post_init__(self):
        assert self.count == sum(2 ** sum(1 for v in vec if v) for vec in self.vectors)


def _padded(coeffs: tuple[int, ...], m: int, allowed_list=None):
    """Extend to exactly 4 coordinates; padding slots admit only x = 0."""
    coeffs = tuple(coeffs)
    if allowed_list is None:
        allowed_list = [None] * len(coeffs)
    allowed_list = list(allowed_list)
    only_zero = np.array([1], dtype=np.uint8)
    while len(coeffs) < 4:
        coeffs += (1,)
        allowed_list.append(only_zero)
    return coeffs, allowed_list


def representation_count(form, m: int) -> int:
    """Exact r_Q(m) over Z^l (kernel-accelerated)."""
    sf = as_scaled(form)
    if m < 0:
        return 0
    if m > COUNT_CAP:
        raise CountCapExceeded(f"m={m} above the enumeration cap {COUNT_CAP}")
    coeffs, allowed = _padded(sf.coeffs, m)
    return int(kernels.count_signed_allowed(coeffs, m, allowed))


def _fold_vectors(coeffs, m, allowed=None) -> list[tuple[int, ...]]:
    """All nonnegative solutions, enumerated outermost-largest-coefficient."""
    order = sorted(range(len(coeffs)), key=lambda j: coeffs[j], reverse=True)
    out: list[tuple[int, ...]] = []
    vec = [0] * len(coeffs)

    def rec(i: int, rem: int):
        if i == len(order):
            if rem == 0:
                out.append(tuple(vec))
            return
        j = order[i]
        c = coeffs[j]
        for v in range(isqrt(rem // c) + 1):
            if allowed is not None and not allowed(j, v):
                continue
            vec[j] = v
            rec(i + 1, rem - c * v * v)
        vec[j] = 0

    rec(0, m)
    return sorted(out)


def count_representations(form, m: int, with_vectors: bool = True):
    """Exact count and (optionally) the sign-folded representation set."""
    sf = as_scaled(form)
    count = representation_count(sf, m)
    if not with_vectors:
        return count, None
    vecs = tuple(_fold_vectors(sf.coeffs, m))
    rep = RepresentationSet(m=m, vectors=vecs, count=sum(2 ** sum(1 for v in w if v) for w in vecs))
    assert rep.count == count
    return count, rep


def jacobi_r4(n: int) -> int:
    """r_{(1,1,1,1)}(n) = 8 * sum of divisors of n not divisible by 4."""
    if n < 1:
        raise ValueError("n >= 1 required")
    f = factor(n)
    odd_sigma = 1
    for p, e in f.pairs:
        if p != 2:
            odd_sigma *= (p ** (e + 1) - 1) // (p - 1)
    return (24 if n % 2 == 0 else 8) * odd_sigma


def r4_sweep(n_max: int) -> np.ndarray:
    """Brute-force r_{(1,1,1,1)}(n) for all n <= n_max (theta convolution)."""
    return kernels.rep_counts_upto((1, 1, 1, 1), n_max)


@dataclass(frozen=True)
class CoprimeTo:
    """Coordinate restriction gcd(x, M) = 1.

    Note gcd(0, M) = M, so 0 is an admissible coordinate only when M = 1.
    This deliberately differs from the almost-prime convention 0 in P_r.
    """

    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M >= 1 required")


def _allowed_bitmap(restriction, vmax: int) -> np.ndarray:
    arr = np.zeros(vmax + 1, dtype=np.uint8)
    if isinstance(restriction, CoprimeTo):
        vals = np.arange(vmax + 1)
        arr[:] = np.gcd(vals, restriction.M) == 1
        if restriction.M == 1:
            arr[:] = 1
        return arr
    if isinstance(restriction, AlmostPrimeClass):
        for v in range(vmax + 1):
            arr[v] = is_member(v, restriction)
        return arr
    raise TypeError(f"unsupported restriction {restriction!r}")


def count_restricted(form, m: int, restriction) -> int:
    """Representations whose every coordinate satisfies the restriction."""
    sf = as_scaled(form)
    if m < 0:
        return 0
    if m > COUNT_CAP:
        raise CountCapExceeded(f"m={m} above the enumeration cap {COUNT_CAP}")
    vmaxes = [isqrt(m // c) for c in sf.coeffs]
    allowed = [_allowed_bitmap(restriction, v) for v in vmaxes]
    coeffs, allowed = _padded(sf.coeffs, m, allowed)
    return int(kernels.count_signed_allowed(coeffs, m, allowed))


def count_with_divisibility(form, m: int, d: tuple[int, ...]) -> int:
    """Representations of m by Q with d_j | x_j for every coordinate.

    Equals r_{Q_{a d^2}}(m); both routes are exercised in the tests.
    """
    sf = as_scaled(form)
    if m < 0:
        return 0
    allowed = []
    for c, dd in zip(sf.coeffs, d):
        vmax = isqrt(m // c)
        arr = np.zeros(vmax + 1, dtype=np.uint8)
        arr[::dd] = 1
        allowed.append(arr)
    coeffs, allowed = _padded(sf.coeffs, m, allowed)
    return int(kernels.count_signed_allowed(coeffs, m, allowed))


def inclusion_exclusion_check(form, m: int, z: int) -> bool:
    """Verify r_{Q,S_{P(z)}}(m) = sum over d vectors of mu(d) r_{Q_d}(m).

    Left side by coordinate filtering, right side by the mu-weighted sum over
    d_j | P(z).  Divisors of P(z) above sqrt(m/a_j) force x_j = 0 and give the
    same count, so they are lumped into a single term with the summed mu
    weight (an exact regrouping, not an approximation).
    """
    sf = as_scaled(form)
    ps = primes_in(2, z + 1)
    M = prod(ps) if ps else 1
    lhs = count_restricted(sf, m, CoprimeTo(M))

    only_zero = np.array([1], dtype=np.uint8)
    per_coord: list[list[tuple[np.ndarray, int]]] = []
    for c in sf.coeffs:
        cap = isqrt(m // c)
        small = [d for d in factor(M).divisors() if d <= cap] if M > 1 else [1]
        opts: list[tuple[np.ndarray, int]] = []
        for d in small:
            arr = np.zeros(cap + 1, dtype=np.uint8)
            arr[::d] = 1
            opts.append((arr, mobius(d)))
        lumped_mu = -sum(mobius(d) for d in small) if M > 1 else 0
        # total over all divisors of squarefree M > 1 is zero
        if lumped_mu:
            opts.append((only_zero, lumped_mu))
        per_coord.append(opts)

    rhs = 0
    coeffs = sf.coeffs

    def rec(i, chosen_allowed, weight):
        nonlocal rhs
        if weight == 0:
            return
        if i == len(per_coord):
            cs, al = _padded(coeffs, m, list(chosen_allowed))
            rhs += weight * int(kernels.count_signed_allowed(cs, m, al))
            return
        for arr, mu in per_coord[i]:
            rec(i + 1, chosen_allowed + [arr], weight * mu)

    rec(0, [], 1)
    return lhs == rhs


def count_lattice_points_below(form, n: int) -> int:
    """R_Q(n) = #{x in Z^l : Q(x) <= n}."""
    sf = as_scaled(form)
    if n < 0:
        return 0
    coeffs = sf.coeffs
    if len(coeffs) < 4:
        big = n + 1
        coeffs = coeffs + (big,) * (4 - len(coeffs))
    return int(kernels.lattice_count_leq(coeffs, n))


def lattice_point_bound(form, n: int) -> RationalInterval:
    """(3 sqrt(n))^l / sqrt(det Gram) + l (3 sqrt(n))^(l-1)."""
    sf = as_scaled(form)
    ell = sf.ell
    root_n = pow_frac(Fraction(n), Fraction(1, 2)) if n > 0 else RationalInterval.point(0)
    t = root_n * 3
    det_root = pow_frac(Fraction(sf.gram_det), Fraction(1, 2))
    return t**ell / det_root + t ** (ell - 1) * ell


def lattice_bound_check(form, n: int) -> bool:
    """True iff R_Q(n) provably satisfies the stated bound."""
    count = count_lattice_points_below(form, n)
    bound = lattice_point_bound(form, n)
    if count <= bound.lo:
        return True
    if count > bound.hi:
        return False
    raise ArithmeticError("indeterminate lattice bound comparison; raise precision")
