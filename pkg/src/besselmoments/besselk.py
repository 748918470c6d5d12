"""Macdonald functions K_n(u) for integer n >= 0 and real u > 0.

K_0 and K_1 come from one of three evaluators, picked from the argument and
the working precision:

* the ascending series (with the log(u/2) + gamma term), run with extra
  digits to absorb the cancellation between the I_n part and the result;
* the large-argument asymptotic expansion, whose remainder is bounded by the
  first omitted term;
* the integral K_nu(u) = int_0^inf exp(-u cosh t) cosh(nu t) dt, summed by the
  trapezoidal rule (doubly exponential decay), for the band in between.

Higher orders use the upward recurrence K_{n+1} = K_{n-1} + (2n/u) K_n.
"""

from __future__ import annotations

import math

from mpmath import mp, mpf

from .numeric import GUARD_DIGITS, check_digits, rounded, to_mpf

LOG10_E = math.log10(math.e)


class BesselDomainError(ValueError):
    pass


def series_cutoff(dps: int) -> float:
    """Largest u for which the series costs at most dps/2 extra digits."""
    return max(2.0, dps * math.log(10) / 4)


def asymptotic_cutoff(dps: int) -> float:
    """Smallest u for which the asymptotic series can reach 10**-dps."""
    return (dps * math.log(10) + 10) / 2


def choose_path(u: float, dps: int) -> str:
    if u >= asymptotic_cutoff(dps):
        return "asymptotic"
    if u <= series_cutoff(dps):
        return "series"
    return "integral"


def k01_series(u: mpf, dps: int) -> tuple[mpf, mpf]:
    extra = int(2 * float(u) * LOG10_E) + 10
    with mp.workdps(dps + extra):
        u = +u
        eps = mpf(10) ** (-(dps + extra))
        t = u * u / 4
        lg = mp.log(u / 2) + mp.euler
        term0 = mpf(1)  # t^k / (k!)^2
        term1 = mpf(1)  # t^k / (k! (k+1)!)
        h_k = mpf(0)  # harmonic number H_k
        s_i0, s_k0, s_i1, s_k1 = mpf(0), mpf(0), mpf(0), mpf(0)
        k = 0
        while True:
            h_next = h_k + mpf(1) / (k + 1)
            s_i0 += term0
            s_k0 += h_k * term0
            s_i1 += term1
            s_k1 += (h_k + h_next) * term1
            if term0 * (1 + h_next) < eps * s_i0 and k > 2:
                break
            k += 1
            term0 *= t / (k * k)
            term1 *= t / (k * (k + 1))
            h_k = h_next
        i1 = u / 2 * s_i1
        k0 = -lg * s_i0 + s_k0
        k1 = 1 / u + lg * i1 - u / 4 * s_k1
    with mp.workdps(dps):
        return +k0, +k1


def k01_asymptotic(u: mpf, dps: int) -> tuple[mpf, mpf] | None:
    """Asymptotic expansion; ``None`` if it cannot reach 10**-dps at this u."""
    with mp.workdps(dps + 5):
        u = +u
        eps = mpf(10) ** (-dps - 2)
        pref = mp.sqrt(mp.pi / (2 * u)) * mp.exp(-u)
        out = []
        for nu in (0, 1):
            four_nu2 = 4 * nu * nu
            term, total, k = mpf(1), mpf(1), 0
            while True:
                k += 1
                ratio = mpf(four_nu2 - (2 * k - 1) ** 2) / (8 * k * u)
                if abs(ratio) >= 1:
                    return None
                term *= ratio
                if abs(term) < eps * abs(total):
                    break  # remainder bounded by this first omitted term
                total += term
            out.append(pref * total)
    with mp.workdps(dps):
        return +out[0], +out[1]


def k01_integral(u: mpf, dps: int) -> tuple[mpf, mpf]:
    """Trapezoidal sum of int_0^inf exp(-u cosh t) cosh(nu t) dt, halving h to convergence."""
    with mp.workdps(dps + 10):
        u = +u
        eps = mpf(10) ** (-dps - 2)
        # exp(-u cosh t + t) < eps * exp(-u) beyond t_max
        log_eps = (dps + 5) * math.log(10)
        t_max = mpf(math.acosh(1 + (log_eps + 20) / float(u)) + 1)

        def f(t):
            e = mp.exp(-u * mp.cosh(t))
            return e, e * mp.cosh(t)

        h = mpf(1) / 2
        f0 = f(mpf(0))
        s0 = f0[0] / 2
        s1 = f0[1] / 2
        j = 1
        while j * h <= t_max:
            a, b = f(j * h)
            s0 += a
            s1 += b
            j += 1
        prev = (s0 * h, s1 * h)
        for _ in range(20):
            h /= 2
            j = 1
            while j * h <= t_max:
                a, b = f(j * h)
                s0 += a
                s1 += b
                j += 2
            cur = (s0 * h, s1 * h)
            if abs(cur[0] - prev[0]) < eps * cur[0] and abs(cur[1] - prev[1]) < eps * cur[1]:
                break
            prev = cur
        else:
            raise ArithmeticError(f"K integral representation did not converge at u={u}")
    with mp.workdps(dps):
        return +cur[0], +cur[1]


def k01(u, dps: int) -> tuple[mpf, mpf]:
    """(K_0(u), K_1(u)) accurate to ``dps`` digits; no rounding, no range checks."""
    u = to_mpf(u, dps)
    if u <= 0:
        raise BesselDomainError(f"Macdonald functions need u > 0, got {u}")
    path = choose_path(float(u), dps)
    if path == "asymptotic":
        res = k01_asymptotic(u, dps)
        if res is not None:
            return res
        path = "integral"
    if path == "series":
        return k01_series(u, dps)
    return k01_integral(u, dps)


def k_orders(u: mpf, k0: mpf, k1: mpf, nmax: int) -> list[mpf]:
    """[K_0, ..., K_nmax] by upward recurrence from K_0, K_1."""
    ks = [k0, k1]
    for n in range(1, nmax):
        ks.append(ks[n - 1] + 2 * n / u * ks[n])
    return ks[: nmax + 1]


def bessel_k(nu: int, u, digits: int) -> mpf:
    """K_nu(u) to ``digits`` significant digits."""
    check_digits(digits)
    if isinstance(nu, bool) or not isinstance(nu, int) or nu < 0:
        raise BesselDomainError(f"order must be a nonnegative integer, got {nu!r}")
    dps = digits + GUARD_DIGITS + nu // 4
    with mp.workdps(dps):
        x = to_mpf(u, dps)
        k0, k1 = k01(x, dps)
        value = k_orders(x, k0, k1, max(nu, 1))[nu]
    return rounded(value, digits)


def bessel_k_derivative_check(u, digits: int) -> mpf:
    """max(|K_0' + K_1|, |(u K_1)' + u K_0|) with central differences, h = 10**(-digits/3)."""
    check_digits(digits)
    dps = digits + GUARD_DIGITS
    with mp.workdps(dps):
        x = to_mpf(u, dps)
        if x <= 0:
            raise BesselDomainError(f"Macdonald functions need u > 0, got {x}")
        h = mpf(10) ** (-mpf(digits) / 3)
        k0p, k1p = k01(x + h, dps)
        k0m, k1m = k01(x - h, dps)
        k0, k1 = k01(x, dps)
        r0 = abs((k0p - k0m) / (2 * h) + k1)
        r1 = abs(((x + h) * k1p - (x - h) * k1m) / (2 * h) + x * k0)
        return rounded(max(r0, r1), 20)
