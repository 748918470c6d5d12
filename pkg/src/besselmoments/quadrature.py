"""Double-exponential quadrature on (0, inf) for Bessel-moment integrands.

The half line is mapped by u = exp((pi/2) sinh t); the trapezoidal rule in t
then sees doubly exponential decay at both ends, which covers the
logarithmic singularities of K_0 at the origin and exp(-c u) decay at
infinity. The step is halved level by level until two successive levels
agree to 10**-(digits+2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from mpmath import mp, mpf

from .besselk import k01, k_orders
from .numeric import GUARD_DIGITS, check_digits, rounded

MAX_LEVELS = 12
MIN_LEVELS = 3
T_LIMIT = 8  # |t| beyond this is never needed for the integrands handled here


class QuadratureError(ArithmeticError):
    """Level budget exhausted without a convergence certificate."""


class DivergentIntegralError(ValueError):
    pass


@dataclass(frozen=True)
class QuadResult:
    value: mpf
    levels: int
    discrepancy: mpf  # |S_L - S_{L-1}| at the accepting level
    nodes: int

    def diagnostics(self) -> dict:
        return {"levels": self.levels, "discrepancy": mp.nstr(self.discrepancy, 5), "nodes": self.nodes}


@dataclass(frozen=True)
class MomentIntegrand:
    """u**weight * prod K_nu(u) over ``orders``."""

    weight: int
    orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(v) for v in self.orders))
        if not self.orders:
            raise ValueError("at least one Bessel factor is required")
        if any(v < 0 for v in self.orders):
            raise ValueError("Bessel orders must be nonnegative")
        if self.weight < 0:
            raise DivergentIntegralError(f"divergent: weight {self.weight} < 0")
        total = sum(self.orders)
        if self.weight <= total - 1:
            raise DivergentIntegralError(
                f"divergent: u^{self.weight} * prod K{list(self.orders)} needs weight > {total - 1} at u -> 0"
            )

    def __call__(self, u: mpf, k0: mpf, k1: mpf) -> mpf:
        ks = k_orders(u, k0, k1, max(max(self.orders), 1))
        value = u ** self.weight
        for nu in self.orders:
            value *= ks[nu]
        return value


def _node(t: mpf) -> tuple[mpf, mpf]:
    """Abscissa u(t) and Jacobian du/dt."""
    s = mp.pi / 2 * mp.sinh(t)
    u = mp.exp(s)
    return u, u * mp.pi / 2 * mp.cosh(t)


class NodeTable:
    """Per-context cache of nodes and K_0/K_1 values at one working precision.

    Share one table between the moment integrals of a batch; the K values at
    each node are then computed only once.
    """

    def __init__(self, digits: int):
        self.digits = digits
        self.dps = digits + GUARD_DIGITS
        self._cache: dict[tuple[int, int], tuple[mpf, mpf, mpf, mpf]] = {}

    def node(self, level: int, k: int) -> tuple[mpf, mpf, mpf, mpf]:
        """(u, du/dt, K_0(u), K_1(u)) at t = k / 2**level."""
        while k and k % 2 == 0 and level > 0:
            k //= 2
            level -= 1
        key = (level, k)
        hit = self._cache.get(key)
        if hit is None:
            with mp.workdps(self.dps):
                u, jac = _node(mpf(k) / 2**level)
                k0, k1 = k01(u, self.dps)
            hit = self._cache[key] = (u, jac, k0, k1)
        return hit


def _exp_sinh(term: Callable[[int, int], mpf], digits: int, max_levels: int = MAX_LEVELS) -> QuadResult:
    """Level-doubling trapezoidal sums of ``term(level, k)``.

    ``term`` returns integrand times Jacobian at t = k / 2**level. Level L adds
    the odd multiples of 2**-L; each direction is walked outward until a term
    drops below 10**-(digits+10) of the running magnitude.
    """
    dps = digits + GUARD_DIGITS
    with mp.workdps(dps):
        tol = mpf(10) ** (-digits - 2)
        cut = mpf(10) ** (-digits - 10)
        raw = mpf(0)
        prev = None
        count = 0
        for level in range(max_levels):
            h = mpf(1) / 2**level
            step = 1 if level == 0 else 2
            new_terms: list[mpf] = []
            if level == 0:
                new_terms.append(term(0, 0))
                count += 1
            running = (abs(prev) if prev is not None else 0) + h * sum(abs(v) for v in new_terms)
            for direction in (1, -1):
                k = 1
                while k * h <= T_LIMIT:
                    value = term(level, direction * k)
                    count += 1
                    new_terms.append(value)
                    running += h * abs(value)
                    if h * abs(value) < cut * running:
                        break
                    k += step
            raw += mp.fsum(new_terms)
            current = raw * h
            if prev is not None and level >= MIN_LEVELS:
                diff = abs(current - prev)
                if diff <= tol * abs(current):
                    return QuadResult(rounded(current, digits), level, rounded(diff, 10), count)
            prev = current
    raise QuadratureError(
        f"no convergence within {max_levels} levels (last discrepancy {mp.nstr(abs(current - prev), 5)})"
    )


def integrate_halfline(f: Callable[[mpf], mpf], digits: int, max_levels: int = MAX_LEVELS) -> mpf:
    """int_0^inf f(u) du to ``digits`` digits."""
    return halfline_quad(f, digits, max_levels).value


def halfline_quad(f: Callable[[mpf], mpf], digits: int, max_levels: int = MAX_LEVELS) -> QuadResult:
    check_digits(digits)

    def term(level: int, k: int) -> mpf:
        u, jac = _node(mpf(k) / 2**level)
        if jac == 0 or u == 0:
            return mpf(0)
        return f(u) * jac

    return _exp_sinh(term, digits, max_levels)


def moment_quad(f: MomentIntegrand, digits: int, table: NodeTable | None = None,
                max_levels: int = MAX_LEVELS) -> QuadResult:
    check_digits(digits)
    if table is None:
        table = NodeTable(digits)
    elif table.digits != digits:
        raise ValueError(f"node table built for {table.digits} digits, asked for {digits}")

    def term(level: int, k: int) -> mpf:
        u, jac, k0, k1 = table.node(level, k)
        return f(u, k0, k1) * jac

    return _exp_sinh(term, digits, max_levels)


def integrate_moment(f: MomentIntegrand, digits: int, table: NodeTable | None = None) -> mpf:
    """int_0^inf u**w prod K_nu(u) du, certified by level doubling."""
    return moment_quad(f, digits, table).value


def integrate_moments(integrands: Sequence[MomentIntegrand], digits: int) -> list[mpf]:
    """Batch version sharing one node table."""
    table = NodeTable(digits)
    return [moment_quad(f, digits, table).value for f in integrands]
