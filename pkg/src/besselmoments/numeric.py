"""Arbitrary-precision constants and zeta values.

Real numbers are mpmath ``mpf`` values. Every public routine takes a target
number of decimal ``digits``, works ``GUARD_DIGITS`` higher internally and
rounds the result to the target precision (round-to-nearest), so repeated
calls return bit-identical values.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from mpmath import mp, mpf

GUARD_DIGITS = 15
MIN_DIGITS = 10
MAX_DIGITS = 1000

_CONSTANTS = {
    "pi": lambda: +mp.pi,
    "euler_gamma": lambda: +mp.euler,
    "log2": lambda: +mp.ln2,
}


class PrecisionError(ValueError):
    """Requested precision is outside the supported range."""


def check_digits(digits: int) -> int:
    if isinstance(digits, bool) or not isinstance(digits, int):
        raise PrecisionError(f"digits must be an integer, got {digits!r}")
    if not MIN_DIGITS <= digits <= MAX_DIGITS:
        raise PrecisionError(f"digits must lie in [{MIN_DIGITS}, {MAX_DIGITS}], got {digits}")
    return digits


def rounded(x, digits: int) -> mpf:
    """Round ``x`` to the binary precision that carries ``digits`` decimals."""
    with mp.workdps(digits):
        return +mpf(x)


def to_mpf(x, dps: int) -> mpf:
    """Convert ints, Fractions, strings or mpf to an mpf at ``dps`` digits."""
    with mp.workdps(dps):
        if isinstance(x, Fraction):
            return mpf(x.numerator) / x.denominator
        return mpf(x)


def fundamental_constant(name: str, digits: int) -> mpf:
    check_digits(digits)
    try:
        make = _CONSTANTS[name]
    except KeyError:
        raise ValueError(f"unknown constant {name!r}; expected one of {sorted(_CONSTANTS)}") from None
    with mp.workdps(digits + GUARD_DIGITS):
        value = make()
    return rounded(value, digits)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n (B_1 = -1/2 convention)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        return Fraction(0)
    if n == 0:
        return Fraction(1)
    # sum_{j<=n} C(n+1, j) B_j = 0
    total = sum(math.comb(n + 1, j) * bernoulli(j) for j in range(n))
    return -total / (n + 1)


@lru_cache(maxsize=None)
def _zeta_em(k: int, dps: int) -> mpf:
    """zeta(k) by Euler-Maclaurin summation to absolute accuracy 10**-dps.

    The remainder after the Bernoulli tail is bounded by the first omitted
    correction term (real argument k > 1), which is what we stop on.
    """
    with mp.workdps(dps + 10):
        eps = mpf(10) ** (-dps - 2)
        n_cut = max(k, dps // 2 + 10)
        while True:
            big_n = mpf(n_cut)
            head = mp.fsum(mpf(j) ** (-k) for j in range(1, n_cut))
            tail = [big_n ** (1 - k) / (k - 1), big_n ** (-k) / 2]
            rising = mpf(k)  # k (k+1) ... (k + 2j - 2)
            power = big_n ** (-k - 1)
            prev = None
            converged = False
            for j in range(1, 4 * dps + 10):
                term = mpf(bernoulli(2 * j).numerator) / bernoulli(2 * j).denominator
                term = term / math.factorial(2 * j) * rising * power
                if abs(term) < eps:
                    converged = True
                    break
                if prev is not None and abs(term) > abs(prev):
                    break  # asymptotic terms started growing; need larger N
                tail.append(term)
                prev = term
                rising *= (k + 2 * j - 1) * (k + 2 * j)
                power /= big_n * big_n
            if converged:
                return head + mp.fsum(tail)
            n_cut *= 2


def zeta_value(k: int, digits: int) -> mpf:
    """Riemann zeta at an integer argument k >= 2."""
    check_digits(digits)
    return rounded(zeta_work(k, digits + GUARD_DIGITS), digits)


def zeta_work(k: int, dps: int) -> mpf:
    """zeta(k) at working precision ``dps`` (no range check on dps)."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise ValueError(f"zeta_value requires an integer k >= 2, got {k!r}")
    with mp.workdps(dps):
        return +_zeta_em(k, dps)
