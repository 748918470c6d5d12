"""Cross-check matrix behind ``besselmoments verify``."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp, mpf

from . import reference
from .moments import BasisMoment, MomentIndex, default_engine, limit_eigen
from .numeric import GUARD_DIGITS, bernoulli, zeta_work
from .quadrature import MomentIntegrand, NodeTable, halfline_quad, moment_quad
from .simplex import mc_beta_law, mc_four, mc_root
from .zeta_ring import ZetaExpr, detect_relation, evaluate_work
from .zeta_series import FORMS, In_quad, decompose_In, power_sum_coefficients


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float | None = None
    detail: dict = field(default_factory=dict)


def _exact(name: str, got: ZetaExpr, want: ZetaExpr) -> CheckResult:
    return CheckResult(name, got == want, 0.0 if got == want else None, {"got": str(got), "expected": str(want)})


def _num(x: ZetaExpr, dps: int) -> mpf:
    with mp.workdps(dps):
        return evaluate_work(x, dps)


def k0_cube_series(dps: int) -> mpf:
    """(3/2) sum_{p>=0} (3p+1)^-2 - (2/3) zeta(2); the sum by Euler-Maclaurin from P on."""
    with mp.workdps(dps + 10):
        big_p = max(20, dps)
        head = mp.fsum(mpf(1) / (3 * p + 1) ** 2 for p in range(big_p))
        x = mpf(3 * big_p + 1)
        # sum_{p>=P} f(p) = int_P^inf f + f(P)/2 - sum_j B_2j/(2j)! f^(2j-1)(P)
        tail = [1 / (3 * x), 1 / (2 * x * x)]
        eps = mpf(10) ** (-dps - 5)
        for j in range(1, 10 * dps):
            r = 2 * j - 1
            deriv = -math.factorial(r + 1) * mpf(3) ** r / x ** (r + 2)  # f^(r), r odd
            b = bernoulli(2 * j)
            term = -mpf(b.numerator) / b.denominator / math.factorial(2 * j) * deriv
            if abs(term) < eps:
                break
            tail.append(term)
        total = head + mp.fsum(tail)
        return mpf(3) / 2 * total - mpf(2) / 3 * zeta_work(2, dps)


def table_checks() -> list[CheckResult]:
    engine = default_engine()
    out = []
    for (family, n) in reference.BASIS_TABLE:
        b = BasisMoment(family, n)
        out.append(_exact(f"table {b}", engine.value(b), reference.basis_expected(family, n)))
    for k in reference.Q_TABLE:
        _, _, plus, minus = engine.q_values(k)
        want_plus, want_minus = reference.q_expected(k)
        out.append(_exact(f"table q_{k}(1)+q_{k}(0)", plus, want_plus))
        out.append(_exact(f"table q_{k}(1)-q_{k}(0)", minus, want_minus))
    return out


def identity_checks(n_max: int = 41) -> list[CheckResult]:
    fails = default_engine().ibp_residuals(n_max)
    out = [CheckResult(f"ibp {rel} n<={n_max}", not bad, 0.0 if not bad else None, {"failing_n": bad})
           for rel, bad in fails.items()]
    eig = limit_eigen()
    values = sorted(lam for lam, _ in eig)
    out.append(CheckResult("eigenvalues 1/16, 1/4", values == [Fraction(1, 16), Fraction(1, 4)], None,
                           {"eigenvalues": [str(v) for v in values]}))
    return out


def series_checks() -> list[CheckResult]:
    out = [_exact(f"series I_{n}", decompose_In(n), want) for n, want in reference.ROOT_TABLE.items()]
    bad = []
    for n in range(2, 17):
        x = decompose_In(n)
        coeffs = power_sum_coefficients(n)
        if x.rational_part or coeffs.get(1, 0) or any(k % 2 == 0 for k in x.zeta_coeffs):
            bad.append(n)
    out.append(CheckResult("series odd-zeta only n=2..16", not bad, None, {"failing_n": bad}))
    return out


def base_quadrature_checks(digits: int, table: NodeTable | None = None) -> list[CheckResult]:
    """Re-certify the transcribed n <= 4 base values numerically."""
    table = table or NodeTable(digits)
    dps = digits + GUARD_DIGITS
    out = []
    for family, n in [k for k in reference.BASIS_TABLE if k[1] <= 4]:
        b = BasisMoment(family, n)
        q = moment_quad(b.integrand(), digits, table)
        with mp.workdps(dps):
            res = abs(q.value - _num(default_engine().value(b), dps))
        out.append(CheckResult(f"quad {b}", res < mpf(10) ** (5 - digits), float(res), q.diagnostics()))
    return out


def moment_1100_check(digits: int, table: NodeTable | None = None) -> list[CheckResult]:
    _, value = default_engine().reduce(MomentIndex((1, 1, 0, 0)))
    want = ZetaExpr.from_tilde(1, 1) / 8
    out = [_exact("I(1,1,0,0) exact", value, want)]
    # 2^4 int (u/2) (u/2)^2 K1^2 K0^2 du = 2 int u^3 K0^2 K1^2 du
    q = moment_quad(MomentIntegrand(3, (0, 0, 1, 1)), digits, table)
    dps = digits + GUARD_DIGITS
    with mp.workdps(dps):
        res = abs(2 * q.value - _num(want, dps))
    out.append(CheckResult("I(1,1,0,0) quadrature", res < mpf(10) ** (5 - digits), float(res), q.diagnostics()))
    return out


def k0_cube_check(digits: int) -> CheckResult:
    q = halfline_quad(lambda u: u * (_k0(u, digits)) ** 3, digits)
    dps = digits + GUARD_DIGITS
    with mp.workdps(dps):
        res = abs(q.value - k0_cube_series(dps))
    return CheckResult("int u K0^3 series identity", res < mpf(10) ** (5 - digits), float(res), q.diagnostics())


def _k0(u: mpf, digits: int) -> mpf:
    from .besselk import k01
    return k01(u, digits + GUARD_DIGITS)[0]


def k06_checks(digits: int = 60, height: int = 10**6) -> list[CheckResult]:
    basis = ("1", "z3", "z5", "z2z3")
    q = moment_quad(MomentIntegrand(1, (0,) * 6), digits)
    dps = digits + GUARD_DIGITS
    with mp.workdps(dps):
        value = 32 * q.value
    neg = detect_relation(value, basis, height, digits)
    out = [CheckResult("K0^6 has no relation", not neg.found, float(neg.residual),
                       {"best_relation": neg.relation})]
    controls = {
        "p_2(0000)": default_engine().value(BasisMoment("p0000", 2)),
        "I_5": decompose_In(5),
    }
    for label, expr in controls.items():
        r = detect_relation(_num(expr, dps), basis, height, digits)
        ok = r.found and r.as_expr() == expr
        out.append(CheckResult(f"relation control {label}", ok, float(r.residual),
                               {"coefficients": [str(c) for c in r.coefficients]}))
    return out


def In_form_checks(digits: int, n_max: int = 10) -> list[CheckResult]:
    out = []
    dps = digits + GUARD_DIGITS
    for n in range(2, n_max + 1):
        exact = _num(decompose_In(n), dps)
        for form in FORMS:
            q = In_quad(n, digits, form)
            with mp.workdps(dps):
                res = abs(q.value - exact)
            out.append(CheckResult(f"I_{n} {form}", res < mpf(10) ** (5 - digits), float(res), q.diagnostics()))
    return out


def four_index_cases(total: int = 8) -> list[tuple[int, int, int, int]]:
    """All (na, nb, nc, nd) with na >= nb >= nc >= nd >= 0 and sum <= total."""
    return [c for c in itertools.product(range(total + 1), repeat=4)
            if sum(c) <= total and c[0] >= c[1] >= c[2] >= c[3]]


def reduce_quadrature_checks(digits: int, table: NodeTable | None = None, total: int = 8) -> list[CheckResult]:
    table = table or NodeTable(digits)
    dps = digits + GUARD_DIGITS
    out = []
    for exps in four_index_cases(total):
        _, exact = default_engine().reduce(MomentIndex(exps))
        q = moment_quad(MomentIntegrand(1 + sum(exps), exps), digits, table)
        with mp.workdps(dps):
            value = q.value * 8 / mpf(2) ** sum(exps)
            res = abs(value - _num(exact, dps))
        out.append(CheckResult(f"reduce vs quad {exps}", res < mpf(10) ** (15 - digits), float(res)))
    return out


def ratio_check(k: int = 64, digits: int = 60) -> CheckResult:
    row = default_engine().denominator_report(k, digits)[-1]
    with mp.workdps(digits):
        rs, rd = 16 * row["ratio_sum"], 16 * row["ratio_diff"]
    ok = abs(rs - 1) < 0.05 and abs(rd - 1) < 0.05
    return CheckResult(f"16 q_(k+1)/q_k at k={k}", ok, float(max(abs(rs - 1), abs(rd - 1))),
                       {"sum": mp.nstr(rs, 12), "diff": mp.nstr(rd, 12)})


def mc_checks(samples: int = 10**5, seed: int = 20240101) -> list[CheckResult]:
    dps = 30
    out = []
    cases = [MomentIndex((1, 1, 0, 0)), MomentIndex((2, 1, 0, 0)), MomentIndex((1, 1, 0, 0), 1, 1)]
    for i, idx in enumerate(cases):
        target = float(_num(default_engine().reduce(idx)[1], dps))
        est = mc_four(idx, samples, seed + i)
        out.append(CheckResult(f"mc four {idx.exponents} m={idx.m} s={idx.s}", est.sigmas(target) < 4,
                               est.sigmas(target), est.to_dict(target)))
    target = float(_num(ZetaExpr.from_tilde(1, 1) / 16, dps))
    est = mc_beta_law(1.0, samples, seed + 10)
    out.append(CheckResult("mc beta law beta=1", est.sigmas(target) < 4, est.sigmas(target), est.to_dict(target)))
    target = float(_num(decompose_In(3), dps))
    est = mc_root(3, samples, seed + 11)
    out.append(CheckResult("mc root n=3", est.sigmas(target) < 4, est.sigmas(target), est.to_dict(target)))
    return out


def verify_all(digits: int = 30, level: str = "fast") -> list[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    table = NodeTable(digits)
    results = table_checks() + identity_checks() + series_checks()
    results += base_quadrature_checks(digits, table)
    if level == "full":
        results += moment_1100_check(digits, table)
        results.append(k0_cube_check(digits))
        results += k06_checks()
        results += In_form_checks(digits)
        results += reduce_quadrature_checks(digits, table)
        results.append(ratio_check())
        results += mc_checks()
    return results
