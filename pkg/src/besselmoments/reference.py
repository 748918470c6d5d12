"""Reference closed forms used by ``verify``.

Each entry is (rational part, zt3 coefficient) with zt3 = 7 zeta(3)/2, or a
ZetaExpr for the odd-zeta root integrals.
"""

from __future__ import annotations

from fractions import Fraction as F

from .zeta_ring import ZetaExpr

D10 = 2**12 * 5

BASIS_TABLE = {
    ("p0000", 0): (F(0), F(1, 4)),
    ("i0001", 1): (F(0), F(1, 8)),
    ("p0000", 2): (F(-3, 16), F(1, 16)),
    ("p0011", 2): (F(1, 16), F(1, 16)),
    ("i0001", 3): (F(-3, 16), F(1, 16)),
    ("i0111", 3): (F(1, 4), F(0)),
    ("p0000", 4): (F(-27, 64), F(7, 64)),
    ("p1111", 4): (F(53, 64), F(-9, 64)),
    ("p0000", 6): (F(-37, 16), F(9, 16)),
    ("p1111", 6): (F(3 * 67, 64), F(-3 * 3 * 5, 64)),
    ("p0000", 8): (F(-5 * 19 * 269, 2**10), F(9 * 7 * 97, 2**10)),
    ("p1111", 8): (F(3 * 13 * 811, 2**10), F(-3 * 9 * 25 * 11, 2**10)),
    ("p0000", 10): (F(-9304913, D10), F(9 * 125 * 11 * 179, D10)),
    ("p1111", 10): (F(81 * 3 * 11 * 4139, D10), F(-81 * 125 * 7 * 37, D10)),
    ("p0000", 12): (F(-81 * 7 * 19 * 23909, D10), F(81 * 125 * 23 * 263, D10)),
    ("p1111", 12): (F(9 * 43 * 67 * 11519, D10), F(-9 * 9 * 125 * 49 * 11 * 13, D10)),
}

# k -> ((u, v, den) of q_k(1)+q_k(0), (u, v, den) of q_k(1)-q_k(0))
Q_TABLE = {
    2: ((13, -1, 2**8 * 3), (5, -1, 2**5 * 3)),
    3: ((53, -9, 2**10 * 9 * 5), (349, -81, 2**10 * 9 * 5)),
    4: ((3037, -9 * 73, 2**16 * 9 * 5 * 7), (1787, -9 * 47, 2**12 * 9 * 5 * 7)),
    5: ((439 * 2003, -9 * 125 * 181, 2**19 * 81 * 125 * 7), (7 * 73 * 1993, -9 * 625 * 43, 2**18 * 81 * 25 * 7)),
    6: ((2283583, -9 * 125 * 479, 2**21 * 27 * 125 * 7 * 11), (127 * 1901, -27 * 125 * 17, 2**14 * 27 * 125 * 7 * 11)),
    7: (
        (53 * 1708543, -3 * 125 * 343 * 167, 2**21 * 9 * 125 * 343 * 11 * 13),
        (13 * 61485173, -3 * 125 * 2401 * 211, 2**23 * 9 * 125 * 49 * 11 * 13),
    ),
}

ROOT_TABLE = {
    2: ZetaExpr(0, {3: 7}),
    3: ZetaExpr(0, {3: 3}),
    4: ZetaExpr(0, {3: 21, 5: F(-3 * 31, 4)}),
    5: ZetaExpr(0, {3: F(5, 3), 5: F(-5, 3)}),
    6: ZetaExpr(0, {3: F(5 * 7, 8), 5: F(-5 * 5 * 31, 16), 7: F(5 * 9 * 127, 128)}),
}


def basis_expected(family: str, n: int) -> ZetaExpr:
    u, v = BASIS_TABLE[(family, n)]
    return ZetaExpr.from_tilde(u, v)


def q_expected(k: int) -> tuple[ZetaExpr, ZetaExpr]:
    (su, sv, sd), (du, dv, dd) = Q_TABLE[k]
    return ZetaExpr.from_tilde(F(su, sd), F(sv, sd)), ZetaExpr.from_tilde(F(du, dd), F(dv, dd))
