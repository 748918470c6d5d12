import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st
from mpmath import mp, mpf

from besselmoments import reference
from besselmoments.besselk import bessel_k
from besselmoments.moments import (
    LIMIT_MATRIX,
    BasisMoment,
    InvalidIndexError,
    MomentEngine,
    MomentIndex,
    basis_moment_value,
    default_engine,
    denominator_report,
    expand_order,
    j_values,
    limit_eigen,
    moment_value,
    q_diagonal_step,
    q_recurrence_step,
    q_values,
    recurrence_step,
    reduce,
)
from besselmoments.quadrature import DivergentIntegralError, moment_quad
from besselmoments.simplex import mc_four
from besselmoments.zeta_ring import ZetaExpr, evaluate
from besselmoments.zeta_series import decompose_In


def tilde(u, v, den=1):
    return ZetaExpr.from_tilde(F(u, den), F(v, den))


# -- basis values -----------------------------------------------------------

@pytest.mark.parametrize("key", sorted(reference.BASIS_TABLE))
def test_reference_basis_values(key):
    assert basis_moment_value(BasisMoment(*key)) == reference.basis_expected(*key)


def test_basis_examples():
    assert basis_moment_value(BasisMoment("p0000", 6)) == tilde(-37, 9, 16)
    assert basis_moment_value(BasisMoment("i0001", 1)) == tilde(0, 1, 8)
    assert basis_moment_value(BasisMoment("p1111", 12)) == ZetaExpr.from_tilde(
        F(9 * 43 * 67 * 11519, 2**12 * 5), F(-9 * 9 * 125 * 49 * 11 * 13, 2**12 * 5))


@pytest.mark.parametrize("family, n", [("p1111", 2), ("p1111", 0), ("p0011", 0), ("i0111", 1)])
def test_divergent_basis(family, n):
    with pytest.raises(DivergentIntegralError, match=f"divergent: {family} requires"):
        BasisMoment(family, n)


def test_divergent_message():
    with pytest.raises(DivergentIntegralError) as exc:
        BasisMoment("p1111", 2)
    assert str(exc.value) == "divergent: p1111 requires n>=4"


@pytest.mark.parametrize("family, n", [("p0000", 3), ("i0001", 2), ("pxxxx", 2), ("p0000", 2.0)])
def test_invalid_basis(family, n):
    with pytest.raises(InvalidIndexError):
        BasisMoment(family, n)


def test_fresh_engine_agrees_and_is_idempotent():
    e = MomentEngine()
    # fill out of order, then compare against the shared engine
    for n in (20, 8, 14):
        e.value(BasisMoment("p0011", n))
    for n in range(2, 24, 2):
        b = BasisMoment("p0011", n)
        assert e.value(b) == default_engine().value(b)
        assert e.value(b) is e.value(b)


def test_ibp_relations_to_41():
    fails = default_engine().ibp_residuals(41)
    assert len(fails) == 6
    assert all(not bad for bad in fails.values()), fails


def test_symmetric_identity_4_to_40():
    e = default_engine()
    for n in range(4, 41, 2):
        p0, p1, p01 = (e.value(BasisMoment(f, n)) for f in ("p0000", "p1111", "p0011"))
        assert p01 * (2 * n) == p0 * (n + 2) + p1 * (n - 2)


def test_recurrence_step_matches_engine():
    e = default_engine()
    for n in range(4, 20, 2):
        assert recurrence_step(n, *e.p_pair(n)) == e.p_pair(n + 2)
    with pytest.raises(InvalidIndexError):
        e.p_pair(5)


def test_q_forms_agree():
    for k in range(2, 20):
        q0, q1, plus, minus = q_values(k)
        n0, n1, np_, nm = q_values(k + 1)
        assert q_recurrence_step(k, q0, q1) == (n0, n1)
        assert q_diagonal_step(k, plus, minus) == (np_, nm)


# -- expand_order -------------------------------------------------------------

def test_expand_examples():
    assert expand_order(0) == [(1, 0, "K0")]
    assert expand_order(2) == [(F(1, 4), 2, "K0"), (F(1, 2), 1, "K1")]
    assert expand_order(4) == [(F(1, 16), 4, "K0"), (F(3, 2), 2, "K0"), (F(1, 2), 3, "K1"), (F(3), 1, "K1")]


@pytest.mark.parametrize("n", range(0, 9))
def test_expand_numeric_identity(n):
    digits = 30
    for u in ("0.5", "1", "3"):
        with mp.workdps(digits + 15):
            x = mpf(u)
            k0, k1 = bessel_k(0, x, digits + 10), bessel_k(1, x, digits + 10)
            lhs = (x / 2) ** n * bessel_k(n, x, digits + 10)
            rhs = sum(mpf(c.numerator) / c.denominator * x**p * (k0 if b == "K0" else k1)
                      for c, p, b in expand_order(n))
            assert abs(lhs - rhs) < mpf(10) ** (-digits + 5) * abs(lhs)


@given(st.integers(2, 30))
def test_expand_structure(n):
    terms = expand_order(n)
    assert all(p >= 1 for _, p, _ in terms)
    lead = {(p, b): c for c, p, b in terms}
    top, other = ("K0", "K1") if n % 2 == 0 else ("K1", "K0")
    assert lead[(n, top)] == F(1, 2**n)
    # next coefficient: c_n = (n-1)/2^(n-1) + c_(n-2)/4, c_0 = c_1 = 0; equal to 1/2 for n <= 4 only
    c = [F(0), F(0)]
    for j in range(2, n + 1):
        c.append(F(j - 1, 2 ** (j - 1)) + c[j - 2] / 4)
    assert lead[(n - 1, other)] == c[n]
    if n <= 4:
        assert c[n] == F(1, 2)
    assert max(p for _, p, _ in terms) == n


# -- reduce ---------------------------------------------------------------------

def test_reduce_examples():
    assert moment_value(MomentIndex((1, 1, 0, 0))) == tilde(1, 1, 8)
    assert moment_value(MomentIndex((0, 0, 0, 0))) == ZetaExpr.zeta(3, 7)
    assert moment_value(MomentIndex((0, 0, 0, 0))) == decompose_In(2)
    assert moment_value(MomentIndex((0, 0, 0, 0))) == basis_moment_value(BasisMoment("p0000", 0)) * 8
    assert moment_value(MomentIndex((1, 1, 0, 0), 1, 1)) == tilde(3, 3, 8)


def test_reduce_structure():
    red, _ = reduce(MomentIndex((1, 1, 0, 0)))
    assert red.prefactor == 8
    assert [(c, str(b)) for c, b in red.terms] == [(F(1, 4), "p_2(0011)")]


def test_reduce_permutation_invariant():
    for exps in [(3, 1, 0, 0), (2, 2, 1, 0), (4, 1, 1, 1)]:
        values = {moment_value(MomentIndex(tuple(exps[i] for i in perm)))
                  for perm in [(0, 1, 2, 3), (3, 2, 1, 0), (1, 3, 0, 2)]}
        assert len(values) == 1


def test_reduce_2000_vs_quadrature():
    idx = MomentIndex((2, 0, 0, 0))
    f, c = idx.integrand()
    q = moment_quad(f, 30).value
    with mp.workdps(45):
        assert abs(q * c.numerator / c.denominator - evaluate(moment_value(idx), 40)) < mpf(10) ** -25


@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5), st.integers(0, 5), st.integers(0, 4))
def test_scaling_law(a, b, c, d, s):
    base = MomentIndex((a, b, c, d))
    weighted = MomentIndex((a, b, c, d), 1, s)
    factor = math.prod(a + b + c + d + 1 + j for j in range(s))
    assert moment_value(weighted) == moment_value(base) * factor


@pytest.mark.parametrize("idx", [MomentIndex((1, 1, 1, 1), 2), MomentIndex((2, 1, 1, 1), 2),
                                 MomentIndex((2, 2, 2, 2), 3), MomentIndex((1, 1, 1, 1), 2, 1)])
def test_higher_m_against_monte_carlo(idx):
    target = float(evaluate(moment_value(idx), 20))
    est = mc_four(idx, 400_000, seed=99)
    assert est.sigmas(target) < 4


def test_higher_m_quadrature_consistent():
    idx = MomentIndex((3, 2, 1, 1), 2, 1)
    f, c = idx.integrand()
    q = moment_quad(f, 30).value
    with mp.workdps(45):
        assert abs(q * c.numerator / c.denominator - evaluate(moment_value(idx), 40)) < mpf(10) ** -24


@pytest.mark.parametrize("exps, m, s", [((0, 0, 0, 0), 2, 0), ((1, 1, 1, 0), 2, 0), ((1, 1), 1, 0),
                                        ((0, 0, 0, 0), 0, 0), ((0, 0, 0, 0), 1, -1)])
def test_invalid_index(exps, m, s):
    with pytest.raises((InvalidIndexError, DivergentIntegralError)):
        MomentIndex(exps, m, s)


# -- q, j tables ----------------------------------------------------------------

@pytest.mark.parametrize("k", sorted(reference.Q_TABLE))
def test_reference_q(k):
    _, _, plus, minus = q_values(k)
    assert (plus, minus) == reference.q_expected(k)


def test_q_examples():
    _, _, plus, minus = q_values(2)
    assert plus == tilde(13, -1, 768) and minus == tilde(5, -1, 96)
    assert q_values(3)[2] == tilde(53, -9, 2**10 * 9 * 5)
    assert q_values(6)[3] == tilde(127 * 1901, -27 * 125 * 17, 2**14 * 27 * 125 * 7 * 11)
    with pytest.raises(InvalidIndexError):
        q_values(1)


@pytest.mark.parametrize("k", range(2, 12))
def test_j_identities(k):
    q0, q1, plus, minus = q_values(k)
    j0, j1, q01 = j_values(k)
    assert j0 == q0 * F(k + 1, 2 * (2 * k + 1))
    assert j1 == q1 * F(k - 1, 2 * (2 * k + 1))
    # 2n p_n(0011) = (n+2) p_n(0000) + (n-2) p_n(1111) at n = 2k
    assert q01 == (plus - minus / k) / 2
    assert q01 == basis_moment_value(BasisMoment("p0011", 2 * k)) / math.factorial(2 * k)


def test_q01_normalization_by_quadrature():
    # settles the factor in q_k(01) independently of the recurrence
    k = 2
    q = moment_quad(BasisMoment("p0011", 2 * k).integrand(), 30).value
    _, _, plus, minus = q_values(k)
    with mp.workdps(40):
        direct = q / math.factorial(2 * k)
        half = evaluate((plus - minus / k) / 2, 35)
        assert abs(direct - half) < mpf(10) ** -28
        assert abs(direct - 2 * half) > mpf(10) ** -3


def test_j2_example():
    assert j_values(2)[1] == q_values(2)[1] / 10


def test_positivity_k2_to_32():
    for k in range(2, 33):
        _, _, plus, minus = q_values(k)
        j0, j1, _ = j_values(k)
        p, m_, a, b = (evaluate(x, 50) for x in (plus, minus, j0, j1))
        with mp.workdps(50):
            assert p > m_ > 0
            assert b - a > 0
            assert b + a <= p
            assert b - a <= m_


def test_eigenvalues():
    pairs = limit_eigen()
    assert [lam for lam, _ in pairs] == [F(1, 4), F(1, 16)]
    for lam, (x, y) in pairs:
        (a, b), (c, d) = LIMIT_MATRIX
        assert (a * x + b * y, c * x + d * y) == (lam * x, lam * y)


def test_denominators():
    rows = denominator_report(7)
    assert rows[0]["k"] == 2 and rows[0]["den_sum"] == 768
    assert rows[-1]["den_sum"] == 2**21 * 9 * 125 * 343 * 11 * 13
    with pytest.raises(InvalidIndexError):
        denominator_report(1)


def test_ratio_at_64():
    row = denominator_report(64, 60)[-1]
    with mp.workdps(60):
        assert abs(16 * row["ratio_sum"] - 1) < 0.05
        assert abs(16 * row["ratio_diff"] - 1) < 0.05
