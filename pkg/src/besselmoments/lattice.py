"""Exact integer LLL reduction (integral variant, no rational arithmetic).

Follows the integral LLL of Cohen, *A Course in Computational Algebraic
Number Theory*, Alg. 2.6.7, with a configurable Lovasz constant.
"""

from __future__ import annotations

from fractions import Fraction


def _dot(x: list[int], y: list[int]) -> int:
    return sum(a * b for a, b in zip(x, y))


def lll_reduce(basis: list[list[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """Return an LLL-reduced basis of the lattice spanned by ``basis``.

    Rows must be linearly independent integer vectors.
    """
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    if n == 0:
        return b
    dn, dd = delta.numerator, delta.denominator
    d = [0] * (n + 1)  # d[i] = Gram determinant of the first i vectors
    lam = [[0] * n for _ in range(n)]
    d[0] = 1
    d[1] = _dot(b[0], b[0])
    if d[1] == 0:
        raise ValueError("basis vectors are linearly dependent")
    k, kmax = 1, 0

    def red(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        big = (d[k - 1] * d[k + 1] + mu * mu) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - mu * t) // d[k]
            lam[i][k - 1] = (big * t + mu * lam[i][k]) // d[k + 1]
        d[k] = big

    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = _dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k + 1] = u
                    if u == 0:
                        raise ValueError("basis vectors are linearly dependent")
        red(k, k - 1)
        mu = lam[k][k - 1]
        # Lovasz: d_{k+1} d_{k-1} >= delta d_k^2 - mu^2, in integers
        if dd * d[k + 1] * d[k - 1] < dn * d[k] * d[k] - dd * mu * mu:
            swap(k)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b
