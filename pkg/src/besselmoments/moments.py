"""Exact closed forms for four-K Bessel moments.

Basis moments (n + 1 is the power of u):

    p_n(0000) = int u^{n+1} K0^4          n even >= 0
    p_n(0011) = int u^{n+1} K0^2 K1^2     n even >= 2
    p_n(1111) = int u^{n+1} K1^4          n even >= 4
    i_n(0001) = int u^{n+1} K0^3 K1       n odd  >= 1
    i_n(0111) = int u^{n+1} K0 K1^3       n odd  >= 3

p_n(0000) and p_n(1111) are produced by a two-term recurrence started from
n = 4; the other families follow from integration by parts. Every value is
a ZetaExpr (rational + rational * zeta(3)).

The four-variable integrals

    I^{m,s}_{na nb nc nd} = int_{a,b,c,d>0} (a+b+c+d)^s a^na b^nb c^nc d^nd
                            / (abc+bcd+cda+dab)^m  exp(-(a+b+c+d))

are reduced to these basis moments by ``reduce``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from mpmath import mp, mpf

from .quadrature import DivergentIntegralError, MomentIntegrand
from .zeta_ring import ZERO, ZetaExpr, evaluate_work

# family -> (parity of n, smallest n, number of K1 factors)
FAMILIES = {
    "p0000": (0, 0, 0),
    "i0001": (1, 1, 1),
    "p0011": (0, 2, 2),
    "i0111": (1, 3, 3),
    "p1111": (0, 4, 4),
}
_FAMILY_BY_K1 = {fam[2]: name for name, fam in FAMILIES.items()}

# Values below n = 4 (and the n = 4 starting pair) in the zt3 = 7 zeta(3)/2
# presentation: (rational part, zt3 coefficient).
BASE_VALUES = {
    ("p0000", 0): (Fraction(0), Fraction(1, 4)),
    ("i0001", 1): (Fraction(0), Fraction(1, 8)),
    ("p0000", 2): (Fraction(-3, 16), Fraction(1, 16)),
    ("p0011", 2): (Fraction(1, 16), Fraction(1, 16)),
    ("i0001", 3): (Fraction(-3, 16), Fraction(1, 16)),
    ("i0111", 3): (Fraction(1, 4), Fraction(0)),
    ("p0000", 4): (Fraction(-27, 64), Fraction(7, 64)),
    ("p1111", 4): (Fraction(53, 64), Fraction(-9, 64)),
}


class InvalidIndexError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class BasisMoment:
    family: str
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidIndexError(f"unknown family {self.family!r}; expected one of {list(FAMILIES)}")
        parity, lowest, _ = FAMILIES[self.family]
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise InvalidIndexError(f"n must be an integer, got {self.n!r}")
        if self.n < lowest:
            raise DivergentIntegralError(f"divergent: {self.family} requires n>={lowest}")
        if self.n % 2 != parity:
            raise InvalidIndexError(f"{self.family} is defined for {'odd' if parity else 'even'} n only, got n={self.n}")

    @property
    def k1_count(self) -> int:
        return FAMILIES[self.family][2]

    def integrand(self) -> MomentIntegrand:
        j = self.k1_count
        return MomentIntegrand(self.n + 1, (0,) * (4 - j) + (1,) * j)

    def __str__(self) -> str:
        return f"{self.family[0]}_{self.n}({self.family[1:]})"


@dataclass(frozen=True)
class MomentIndex:
    """(na, nb, nc, nd) with denominator power m and weight (a+b+c+d)^s."""

    exponents: tuple[int, int, int, int]
    m: int = 1
    s: int = 0

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        object.__setattr__(self, "exponents", exps)
        if len(exps) != 4:
            raise InvalidIndexError(f"exactly four exponents are required, got {len(exps)}")
        if self.m < 1:
            raise InvalidIndexError(f"denominator power m must be >= 1, got {self.m}")
        if self.s < 0:
            raise InvalidIndexError(f"weight order s must be >= 0, got {self.s}")
        if min(exps) < self.m - 1:
            raise DivergentIntegralError(f"divergent: exponents must be >= m-1={self.m - 1}, got {list(exps)}")

    def scaling_factor(self) -> int:
        """prod_{j<s} (sum n_i + 4 - 3m + j), from I(s) = s^(3m - sum n - 4) I(1)."""
        base = sum(self.exponents) + 4 - 3 * self.m
        return math.prod(base + j for j in range(self.s))

    def integrand(self) -> tuple[MomentIntegrand, Fraction]:
        """(f, c) with I = c * int f: u^(1+2(m-1)) prod (u/2)^nu K_nu(u), nu = n_i - (m-1)."""
        orders = tuple(e - (self.m - 1) for e in self.exponents)
        f = MomentIntegrand(1 + 2 * (self.m - 1) + sum(orders), orders)
        c = Fraction(8 * self.scaling_factor(), math.factorial(self.m - 1) * 4 ** (self.m - 1) * 2 ** sum(orders))
        return f, c


@dataclass(frozen=True)
class Reduction:
    """I = prefactor * sum(coefficient * basis moment)."""

    terms: tuple[tuple[Fraction, BasisMoment], ...]
    prefactor: Fraction

    def __str__(self) -> str:
        body = " + ".join(f"({c})*{b}" for c, b in self.terms) or "0"
        return f"{self.prefactor} * [{body}]"


def expand_order(n: int) -> list[tuple[Fraction, int, str]]:
    """Write (u/2)^n K_n(u) as a sum of coeff * u^power * K0 or K1.

    Uses E_n = (n-1) E_{n-1} + (u^2/4) E_{n-2} with E_n = (u/2)^n K_n.
    Ordered K0 terms first, then K1, each by descending power.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    prev: dict[tuple[int, str], Fraction] = {(0, "K0"): Fraction(1)}
    cur: dict[tuple[int, str], Fraction] = {(1, "K1"): Fraction(1, 2)}
    if n == 0:
        cur = prev
    for j in range(2, n + 1):
        nxt: dict[tuple[int, str], Fraction] = {}
        for (p, b), c in cur.items():
            nxt[(p, b)] = nxt.get((p, b), 0) + (j - 1) * c
        for (p, b), c in prev.items():
            nxt[(p + 2, b)] = nxt.get((p + 2, b), 0) + c / 4
        prev, cur = cur, {key: c for key, c in nxt.items() if c}
    return [(c, p, b) for (p, b), c in sorted(cur.items(), key=lambda kv: (kv[0][1], -kv[0][0]))]


def recurrence_step(n: int, p0: ZetaExpr, p1: ZetaExpr) -> tuple[ZetaExpr, ZetaExpr]:
    """(p_n(0000), p_n(1111)) -> (p_{n+2}(0000), p_{n+2}(1111)), valid for n >= 4."""
    c = Fraction(1, 32 * (n + 2))
    new0 = p0 * (c * (n + 2) ** 2 * (5 * n + 4)) - p1 * (c * 3 * n * n * (n - 2))
    new1 = p1 * (c * n * (n - 2) * (5 * n + 16)) - p0 * (c * 3 * (n + 2) ** 2 * (n + 4))
    return new0, new1


def q_recurrence_step(k: int, q0: ZetaExpr, q1: ZetaExpr) -> tuple[ZetaExpr, ZetaExpr]:
    """(q_k(0), q_k(1)) -> (q_{k+1}(0), q_{k+1}(1)) in the factorial-rescaled form, k >= 2."""
    c = Fraction(1, 16 * (2 * k + 1))
    w = Fraction(1, (k + 1) ** 2)
    new0 = q0 * (c * (5 * k + 2)) - q1 * (c * 3 * k * k * (k - 1) * w)
    new1 = q1 * (c * k * (k - 1) * (5 * k + 8) * w) - q0 * (c * 3 * (k + 2))
    return new0, new1


def q_diagonal_step(k: int, plus: ZetaExpr, minus: ZetaExpr) -> tuple[ZetaExpr, ZetaExpr]:
    """The same step written on q_k(1) + q_k(0) and q_k(1) - q_k(0)."""
    c = Fraction(1, 16 * (2 * k + 1))
    g = Fraction(k * (k - 1) * (k + 4), (k + 1) ** 2)
    r = Fraction(k * (k - 1), k + 1)
    new_plus = plus * (c * (k - 2 + g)) + minus * (c * (-(k - 2) + g))
    new_minus = plus * (c * 4 * (-(k + 1) + r)) + minus * (c * 4 * (k + 1 + r))
    return new_plus, new_minus


LIMIT_MATRIX = ((Fraction(5, 32), Fraction(-3, 32)), (Fraction(-3, 32), Fraction(5, 32)))


def _rational_sqrt(q: Fraction) -> Fraction:
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num != q.numerator or den * den != q.denominator:
        raise ValueError(f"{q} is not the square of a rational")
    return Fraction(num, den)


def limit_eigen() -> list[tuple[Fraction, tuple[Fraction, Fraction]]]:
    """Exact eigenpairs of the k -> infinity recurrence matrix, largest first."""
    (a, b), (c, d) = LIMIT_MATRIX
    trace, det = a + d, a * d - b * c
    root = _rational_sqrt(trace * trace - 4 * det)
    pairs = []
    for lam in ((trace + root) / 2, (trace - root) / 2):
        vec = (b, lam - a) if b else (lam - d, c)
        lead = vec[0] if vec[0] else vec[1]
        pairs.append((lam, (vec[0] / lead, vec[1] / lead)))
    return pairs


class MomentEngine:
    """Memoized exact evaluator. Values are computed once and never mutated."""

    def __init__(self):
        self._pairs: dict[int, tuple[ZetaExpr, ZetaExpr]] = {
            4: (self._base("p0000", 4), self._base("p1111", 4)),
        }
        self._memo: dict[BasisMoment, ZetaExpr] = {}

    @staticmethod
    def _base(family: str, n: int) -> ZetaExpr:
        u, v = BASE_VALUES[(family, n)]
        return ZetaExpr.from_tilde(u, v)

    def p_pair(self, n: int) -> tuple[ZetaExpr, ZetaExpr]:
        """(p_n(0000), p_n(1111)) for even n >= 4, upward from n = 4."""
        if n < 4 or n % 2:
            raise InvalidIndexError(f"the recurrence runs on even n >= 4, got {n}")
        top = max(self._pairs)
        while top < n:
            self._pairs[top + 2] = recurrence_step(top, *self._pairs[top])
            top += 2
        return self._pairs[n]

    def value(self, b: BasisMoment) -> ZetaExpr:
        hit = self._memo.get(b)
        if hit is None:
            hit = self._memo[b] = self._compute(b)
        return hit

    def _compute(self, b: BasisMoment) -> ZetaExpr:
        fam, n = b.family, b.n
        if (fam, n) in BASE_VALUES:
            return self._base(fam, n)
        if fam == "p0000":
            return self.p_pair(n)[0]
        if fam == "p1111":
            return self.p_pair(n)[1]
        if fam == "i0001":
            # p_{n-1}(0000) = 4 i_n(0001) / (n+1)
            return self.value(BasisMoment("p0000", n - 1)) * Fraction(n + 1, 4)
        if fam == "i0111":
            # p_{n-1}(1111) = 4 i_n(0111) / (n-3)
            return self.value(BasisMoment("p1111", n - 1)) * Fraction(n - 3, 4)
        # p0011, n >= 4
        i_a = self.value(BasisMoment("i0001", n + 1))
        i_b = self.value(BasisMoment("i0111", n + 1))
        return (i_a + i_b) * Fraction(2, n)

    def ibp_residuals(self, n_max: int) -> dict[str, list[int]]:
        """Check every integration-by-parts relation up to n_max; lists the n where one fails."""
        v = lambda fam, n: self.value(BasisMoment(fam, n))  # noqa: E731
        fails: dict[str, list[int]] = {
            "p0000=4i0001/(n+2)": [],
            "p0011=2(i0001+i0111)/n": [],
            "p1111=4i0111/(n-2)": [],
            "i0111=(p1111+3p0011)/(n-1)": [],
            "i0001=(p0000+3p0011)/(n+1)": [],
            "2n p0011=(n+2)p0000+(n-2)p1111": [],
        }
        for n in range(0, n_max + 1):
            if n % 2 == 0:
                if v("p0000", n) != v("i0001", n + 1) * Fraction(4, n + 2):
                    fails["p0000=4i0001/(n+2)"].append(n)
                if n >= 2 and v("p0011", n) != (v("i0001", n + 1) + v("i0111", n + 1)) * Fraction(2, n):
                    fails["p0011=2(i0001+i0111)/n"].append(n)
                if n >= 4 and v("p1111", n) != v("i0111", n + 1) * Fraction(4, n - 2):
                    fails["p1111=4i0111/(n-2)"].append(n)
                if n >= 4 and v("p0011", n) * (2 * n) != v("p0000", n) * (n + 2) + v("p1111", n) * (n - 2):
                    fails["2n p0011=(n+2)p0000+(n-2)p1111"].append(n)
            else:
                if n >= 3 and v("i0111", n) * (n - 1) != v("p1111", n + 1) + v("p0011", n + 1) * 3:
                    fails["i0111=(p1111+3p0011)/(n-1)"].append(n)
                if v("i0001", n) * (n + 1) != v("p0000", n + 1) + v("p0011", n + 1) * 3:
                    fails["i0001=(p0000+3p0011)/(n+1)"].append(n)
        return fails

    def reduce(self, idx: MomentIndex) -> tuple[Reduction, ZetaExpr]:
        m = idx.m
        orders = [e - (m - 1) for e in idx.exponents]
        # 1/D^m = (abcd)^-m / Gamma(m) int t^(m-1) exp(-t sum 1/a) dt; with u = 2 sqrt(t):
        # I^m = 8 / (Gamma(m) 4^(m-1)) int u^(1 + 2(m-1)) prod (u/2)^nu K_nu(u) du
        collected: dict[tuple[int, int], Fraction] = {}
        for combo in product(*(expand_order(nu) for nu in orders)):
            coeff = math.prod((c for c, _, _ in combo), start=Fraction(1))
            power = sum(p for _, p, _ in combo) + 2 * (m - 1)
            k1 = sum(1 for _, _, base in combo if base == "K1")
            collected[(power, k1)] = collected.get((power, k1), 0) + coeff
        terms = []
        for (power, k1), coeff in sorted(collected.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            if not coeff:
                continue
            family = _FAMILY_BY_K1[k1]
            try:
                basis = BasisMoment(family, power)
            except (DivergentIntegralError, InvalidIndexError) as exc:
                raise DivergentIntegralError(f"divergent: term u^{power + 1} K1^{k1} of {idx}: {exc}") from None
            terms.append((coeff, basis))
        prefactor = Fraction(8 * idx.scaling_factor(), math.factorial(m - 1) * 4 ** (m - 1))
        reduction = Reduction(tuple(terms), prefactor)
        total = ZERO
        for coeff, basis in terms:
            total = total + self.value(basis) * coeff
        return reduction, total * prefactor

    def q_values(self, k: int) -> tuple[ZetaExpr, ZetaExpr, ZetaExpr, ZetaExpr]:
        """(q_k(0), q_k(1), q_k(1)+q_k(0), q_k(1)-q_k(0)) with q = p_{2k} / (2k)!."""
        if k < 2:
            raise InvalidIndexError(f"q_k needs k >= 2, got {k}")
        f = math.factorial(2 * k)
        p0, p1 = self.p_pair(2 * k)
        q0, q1 = p0 / f, p1 / f
        return q0, q1, q1 + q0, q1 - q0

    def j_values(self, k: int) -> tuple[ZetaExpr, ZetaExpr, ZetaExpr]:
        """(j_k(0001), j_k(0111), q_k(01)) with j = i_{2k+1}/(2k+1)!, q_k(01) = p_{2k}(0011)/(2k)!."""
        if k < 2:
            raise InvalidIndexError(f"j_k needs k >= 2, got {k}")
        f_odd = math.factorial(2 * k + 1)
        j0 = self.value(BasisMoment("i0001", 2 * k + 1)) / f_odd
        j1 = self.value(BasisMoment("i0111", 2 * k + 1)) / f_odd
        q01 = self.value(BasisMoment("p0011", 2 * k)) / math.factorial(2 * k)
        return j0, j1, q01

    def denominator_report(self, k_max: int, digits: int = 60) -> list[dict]:
        """Per k: zt3-presentation denominators of q_k(1)+-q_k(0) and the ratios q_{k+1}/q_k."""
        if k_max < 2:
            raise InvalidIndexError(f"k_max must be >= 2, got {k_max}")
        rows = []
        dps = digits + 15
        prev = None
        for k in range(2, k_max + 2):
            _, _, plus, minus = self.q_values(k)
            with mp.workdps(dps):
                vals = (evaluate_work(plus, dps), evaluate_work(minus, dps))
            if prev is not None:
                with mp.workdps(dps):
                    rows[-1]["ratio_sum"] = vals[0] / prev[0]
                    rows[-1]["ratio_diff"] = vals[1] / prev[1]
            if k <= k_max:
                rows.append({
                    "k": k,
                    "den_sum": plus.common_denominator(),
                    "den_diff": minus.common_denominator(),
                    "sum": plus,
                    "diff": minus,
                })
            prev = vals
        return rows


_ENGINE = MomentEngine()


def default_engine() -> MomentEngine:
    return _ENGINE


def basis_moment_value(b: BasisMoment) -> ZetaExpr:
    return _ENGINE.value(b)


def reduce(idx: MomentIndex) -> tuple[Reduction, ZetaExpr]:
    return _ENGINE.reduce(idx)


def q_values(k: int):
    return _ENGINE.q_values(k)


def j_values(k: int):
    return _ENGINE.j_values(k)


def denominator_report(k_max: int, digits: int = 60) -> list[dict]:
    return _ENGINE.denominator_report(k_max, digits)


def moment_value(idx: MomentIndex) -> ZetaExpr:
    return _ENGINE.reduce(idx)[1]


def numeric(x: ZetaExpr, dps: int) -> mpf:
    with mp.workdps(dps):
        return evaluate_work(x, dps)
