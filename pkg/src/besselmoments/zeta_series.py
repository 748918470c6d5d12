"""The 2n-variable root integrals I_n and their odd-zeta decomposition.

With m = n + 2p - 1 running over integers of the parity of n - 1,

    I_n = 4 Gamma(n+1)/Gamma(n-1)^2 * sum_m N_n(m) / m^e

where N_n(m) = prod_q (m^2 - (2q-1)^2), e = n + 1 for even n and
N_n(m) = prod_q (m^2 - (2q)^2), e = n for odd n. N_n vanishes on the
excluded small m, so the sum can start at m = 1 (or 2) and splits into
Dirichlet lambda-type sums of odd weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

from .numeric import GUARD_DIGITS, check_digits, rounded, zeta_work
from .quadrature import QuadResult, halfline_quad
from .zeta_ring import ZetaExpr

FORMS = ("log_form", "sinh_form")


@dataclass(frozen=True)
class NumeratorPoly:
    """Polynomial in m (ascending coefficients) and the power of m it is divided by."""

    n: int
    coeffs: tuple[Fraction, ...]
    exponent: int
    m_parity: str  # "odd_m" or "even_m"

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, m) -> Fraction:
        return sum((c * Fraction(m) ** j for j, c in enumerate(self.coeffs)), Fraction(0))

    def excluded_values(self) -> list[int]:
        """Values of m with the summation parity that lie below the first summed term n - 1."""
        first = 1 if self.m_parity == "odd_m" else 2
        return list(range(first, self.n - 1, 2))


def _check_n(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ValueError(f"I_n is defined for integers n >= 2, got {n!r}")


def numerator_poly(n: int) -> NumeratorPoly:
    _check_n(n)
    if n % 2 == 0:
        shifts = [2 * q - 1 for q in range(1, (n - 2) // 2 + 1)]
        exponent, parity = n + 1, "odd_m"
    else:
        shifts = [2 * q for q in range(1, (n - 3) // 2 + 1)]
        exponent, parity = n, "even_m"
    coeffs = [Fraction(1)]
    for c in shifts:
        # multiply by (m^2 - c^2)
        nxt = [Fraction(0)] * (len(coeffs) + 2)
        for j, a in enumerate(coeffs):
            nxt[j + 2] += a
            nxt[j] -= a * c * c
        coeffs = nxt
    return NumeratorPoly(n, tuple(coeffs), exponent, parity)


def prefactor(n: int) -> Fraction:
    return Fraction(4 * math.factorial(n), math.factorial(n - 2) ** 2)


def power_sum_coefficients(n: int) -> dict[int, Fraction]:
    """Coefficient of sum_m m^-k for every k produced by N_n(m)/m^e (zero entries kept)."""
    poly = numerator_poly(n)
    out: dict[int, Fraction] = {}
    for j, c in enumerate(poly.coeffs):
        k = poly.exponent - j
        out[k] = out.get(k, Fraction(0)) + c
    return out


def lambda_factor(k: int, parity: str) -> Fraction:
    """sum over odd m of m^-k = (1 - 2^-k) zeta(k); over even m >= 2 it is 2^-k zeta(k)."""
    if parity == "odd_m":
        return 1 - Fraction(1, 2**k)
    if parity == "even_m":
        return Fraction(1, 2**k)
    raise ValueError(f"parity must be 'odd_m' or 'even_m', got {parity!r}")


def decompose_In(n: int) -> ZetaExpr:
    """Exact I_n as a rational combination of odd zeta values."""
    poly = numerator_poly(n)
    pre = prefactor(n)
    zeta: dict[int, Fraction] = {}
    for k, c in power_sum_coefficients(n).items():
        if not c:
            continue
        if k < 3 or k % 2 == 0:
            raise ArithmeticError(f"I_{n}: unexpected m^-{k} term with coefficient {c}")
        zeta[k] = pre * c * lambda_factor(k, poly.m_parity)
    return ZetaExpr(0, zeta)


def lambda_sum(k: int, parity: str, digits: int) -> mpf:
    """Numeric lambda-type sum for odd k >= 3."""
    check_digits(digits)
    if k < 3 or k % 2 == 0:
        raise ValueError(f"k must be odd and >= 3, got {k}")
    factor = lambda_factor(k, parity)
    dps = digits + GUARD_DIGITS
    with mp.workdps(dps):
        value = mpf(factor.numerator) / factor.denominator * zeta_work(k, dps)
    return rounded(value, digits)


def _sinh_integrand(n: int):
    def f(y: mpf) -> mpf:
        return y * (y / mp.sinh(y)) ** (n - 1)
    return f


def _log_integrand(n: int):
    # int_0^1 dy/y (y/(1-y^2))^(n-1) log(1/y)^n with y = exp(-t), dy = -y dt
    def f(t: mpf) -> mpf:
        y = mp.exp(-t)
        gap = 1 - y * y
        if gap == 0:
            return mpf(0)  # y rounds to 1; the integrand behaves like t / 2^(n-1) there
        return (y / gap) ** (n - 1) * (-mp.log(y)) ** n
    return f


def In_quad(n: int, digits: int, form: str = "sinh_form") -> QuadResult:
    _check_n(n)
    check_digits(digits)
    if form == "sinh_form":
        scale = Fraction(2, math.factorial(n - 2))
        res = halfline_quad(_sinh_integrand(n), digits)
    elif form == "log_form":
        scale = Fraction(2**n, math.factorial(n - 2))
        res = halfline_quad(_log_integrand(n), digits)
    else:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")
    dps = digits + GUARD_DIGITS
    with mp.workdps(dps):
        value = res.value * scale.numerator / scale.denominator
    return QuadResult(rounded(value, digits), res.levels, res.discrepancy, res.nodes)


def In_numeric(n: int, digits: int, form: str = "sinh_form") -> mpf:
    """I_n from one of its one-dimensional integral forms."""
    return In_quad(n, digits, form).value
