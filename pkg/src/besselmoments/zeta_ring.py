"""Exact elements of Q + Q*zeta(3) + Q*zeta(5) + ... and relation detection.

``ZetaExpr`` is the value type of every closed form in the package. The
canonical text form is ``a/b + (c/d)*z3 + (e/f)*z5``; ``zt3`` denotes
7*zeta(3)/2 and is accepted by the parser and produced on request.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from mpmath import mp, mpf

from .lattice import lll_reduce
from .numeric import GUARD_DIGITS, check_digits, rounded, to_mpf, zeta_work

TILDE3 = Fraction(7, 2)  # zt3 = (7/2) zeta(3)

RationalLike = Fraction | int | str


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction, int or string")
    return Fraction(x)


class ZetaExpr:
    """Immutable rational combination of 1 and odd zeta values."""

    __slots__ = ("_rational", "_zeta")

    def __init__(self, rational: RationalLike = 0, zeta: Mapping[int, RationalLike] | None = None):
        coeffs: dict[int, Fraction] = {}
        for k, c in (zeta or {}).items():
            k = int(k)
            if k < 3 or k % 2 == 0:
                raise ValueError(f"only odd zeta arguments k >= 3 are allowed, got {k}")
            c = _frac(c)
            if c:
                coeffs[k] = c
        self._rational = _frac(rational)
        self._zeta = tuple(sorted(coeffs.items()))

    @classmethod
    def zeta(cls, k: int, coeff: RationalLike = 1) -> ZetaExpr:
        return cls(0, {k: coeff})

    @classmethod
    def from_tilde(cls, rational: RationalLike, tilde_coeff: RationalLike) -> ZetaExpr:
        """Build ``rational + tilde_coeff * (7/2) zeta(3)``."""
        return cls(rational, {3: _frac(tilde_coeff) * TILDE3})

    @property
    def rational_part(self) -> Fraction:
        return self._rational

    @property
    def zeta_coeffs(self) -> dict[int, Fraction]:
        return dict(self._zeta)

    def coeff(self, k: int) -> Fraction:
        return dict(self._zeta).get(k, Fraction(0))

    def tilde_parts(self) -> tuple[Fraction, Fraction]:
        """(u, v) with self == u + v*zt3; only for expressions supported on zeta(3)."""
        if any(k != 3 for k, _ in self._zeta):
            raise ValueError("expression involves zeta values other than zeta(3)")
        return self._rational, self.coeff(3) / TILDE3

    def common_denominator(self, tilde: bool = True) -> int:
        """LCM of coefficient denominators (in the zt3 presentation by default)."""
        if tilde:
            parts = self.tilde_parts()
        else:
            parts = (self._rational, *dict(self._zeta).values())
        return math.lcm(*(p.denominator for p in parts))

    def is_zero(self) -> bool:
        return not self._rational and not self._zeta

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _combine(self, other: ZetaExpr, sign: int) -> ZetaExpr:
        coeffs = dict(self._zeta)
        for k, c in other._zeta:
            coeffs[k] = coeffs.get(k, Fraction(0)) + sign * c
        return ZetaExpr(self._rational + sign * other._rational, coeffs)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ZetaExpr(other)
        if not isinstance(other, ZetaExpr):
            return NotImplemented
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ZetaExpr(other)
        if not isinstance(other, ZetaExpr):
            return NotImplemented
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self) -> ZetaExpr:
        return self.scale(-1)

    def scale(self, r: RationalLike) -> ZetaExpr:
        r = _frac(r)
        return ZetaExpr(self._rational * r, {k: c * r for k, c in self._zeta})

    def __mul__(self, r):
        if isinstance(r, (int, Fraction)):
            return self.scale(r)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, r):
        if isinstance(r, (int, Fraction)):
            return self.scale(1 / Fraction(r))
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ZetaExpr(other)
        if not isinstance(other, ZetaExpr):
            return NotImplemented
        return self._rational == other._rational and self._zeta == other._zeta

    def __hash__(self) -> int:
        return hash((self._rational, self._zeta))

    def __repr__(self) -> str:
        return f"ZetaExpr({format_expr(self)!r})"

    def __str__(self) -> str:
        return format_expr(self)

    def to_json(self) -> dict:
        return {
            "rational": _frac_str(self._rational),
            "zeta": {str(k): _frac_str(c) for k, c in self._zeta},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> ZetaExpr:
        return cls(Fraction(data.get("rational", "0")), {int(k): Fraction(v) for k, v in data.get("zeta", {}).items()})


ZERO = ZetaExpr()


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _term_str(c: Fraction, symbol: str | None) -> str:
    """Render |c| * symbol (sign handled by the caller)."""
    c = abs(c)
    if symbol is None:
        return _frac_str(c)
    if c == 1:
        return symbol
    if c.denominator == 1:
        return f"{c.numerator}*{symbol}"
    return f"({_frac_str(c)})*{symbol}"


def format_expr(x: ZetaExpr, tilde: bool = False) -> str:
    """Canonical text; ``tilde=True`` writes the zeta(3) part via zt3."""
    terms: list[tuple[Fraction, str | None]] = []
    if x.rational_part:
        terms.append((x.rational_part, None))
    for k, c in x.zeta_coeffs.items():
        if tilde and k == 3:
            terms.append((c / TILDE3, "zt3"))
        else:
            terms.append((c, f"z{k}"))
    if not terms:
        return "0"
    out = []
    for i, (c, sym) in enumerate(terms):
        body = _term_str(c, sym)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<sym>zt3|z\d+)|(?P<op>[-+*/()]))")


class ParseError(ValueError):
    pass


def _tokens(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at position {pos}: {text[pos:pos + 10]!r}")
        out.append(m.group(m.lastgroup))
        pos = m.end()
    return out


def parse_expr(text: str) -> ZetaExpr:
    """Parse the canonical grammar (lenient about whitespace and repeated terms)."""
    toks = _tokens(text)
    if not toks:
        raise ParseError("empty expression")
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def take(expected=None):
        nonlocal i
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'token'}, got {tok!r} in {text!r}")
        i += 1
        return tok

    def number() -> Fraction:
        tok = take()
        if not tok.isdigit():
            raise ParseError(f"expected a number, got {tok!r}")
        value = Fraction(int(tok))
        if peek() == "/":
            take("/")
            den = take()
            if not den.isdigit() or int(den) == 0:
                raise ParseError(f"bad denominator {den!r}")
            value /= int(den)
        return value

    def coefficient() -> Fraction:
        if peek() == "(":
            take("(")
            sign = 1
            if peek() in ("-", "+"):
                sign = -1 if take() == "-" else 1
            value = sign * number()
            take(")")
            return value
        return number()

    rational = Fraction(0)
    coeffs: dict[int, Fraction] = {}
    first = True
    while peek() is not None:
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take() == "-" else 1
        elif not first:
            raise ParseError(f"expected '+' or '-' in {text!r}")
        first = False
        tok = peek()
        if tok is None:
            raise ParseError("dangling sign")
        if tok.startswith("z"):
            c, sym = Fraction(1), take()
        else:
            c = coefficient()
            sym = None
            if peek() == "*":
                take("*")
                sym = take()
                if not sym.startswith("z"):
                    raise ParseError(f"expected a zeta symbol, got {sym!r}")
        c *= sign
        if sym is None:
            rational += c
        elif sym == "zt3":
            coeffs[3] = coeffs.get(3, Fraction(0)) + c * TILDE3
        else:
            k = int(sym[1:])
            coeffs[k] = coeffs.get(k, Fraction(0)) + c
    try:
        return ZetaExpr(rational, coeffs)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def evaluate(x: ZetaExpr, digits: int) -> mpf:
    """Numeric value of ``x`` to ``digits`` significant digits.

    Working precision is raised until cancellation between the rational and
    zeta parts is absorbed.
    """
    check_digits(digits)
    return rounded(evaluate_work(x, digits + GUARD_DIGITS), digits)


def evaluate_work(x: ZetaExpr, dps: int) -> mpf:
    if x.is_zero():
        return mpf(0)
    work = dps
    for _ in range(20):
        with mp.workdps(work):
            terms = [to_mpf(x.rational_part, work)]
            terms += [to_mpf(c, work) * zeta_work(k, work) for k, c in x.zeta_coeffs.items()]
            total = mp.fsum(terms)
            biggest = max(abs(t) for t in terms)
            if total != 0:
                lost = float(mp.log10(biggest / abs(total)))
                if lost < work - dps - 2:
                    return +total
                work = dps + int(lost) + 10
            else:
                work *= 2
    raise ArithmeticError(f"could not evaluate {x} without total cancellation")


# --- integer relations -----------------------------------------------------

DEFAULT_BASIS = ("1", "z3", "z5", "z2z3")
_BASIS_NAME = re.compile(r"^(?:1|(?:z\d+|zt3)+)$")


class InfeasibleRelationError(ValueError):
    """Precision too low to decide relations at the requested height."""


def basis_constant(name: str, dps: int) -> mpf:
    """Numeric value of a basis name: ``1``, ``z5``, ``zt3`` or products like ``z2z3``."""
    name = name.strip()
    if not _BASIS_NAME.match(name):
        raise ValueError(f"unknown basis constant {name!r}")
    with mp.workdps(dps):
        value = mpf(1)
        for factor in re.findall(r"zt3|z\d+", name):
            if factor == "zt3":
                value *= mpf(7) / 2 * zeta_work(3, dps)
            else:
                value *= zeta_work(int(factor[1:]), dps)
        return value


@dataclass(frozen=True)
class RelationResult:
    found: bool
    coefficients: list[Fraction]
    residual: mpf
    basis: tuple[str, ...] = ()
    relation: list[int] = field(default_factory=list)  # best integer vector (value first)
    threshold: mpf | None = None

    def as_expr(self) -> ZetaExpr:
        """Coefficients as a ZetaExpr; products such as z2z3 must have coefficient zero."""
        if not self.found:
            raise ValueError("no relation was found")
        rational, coeffs = Fraction(0), {}
        for name, c in zip(self.basis, self.coefficients):
            if not c:
                continue
            if name == "1":
                rational += c
            elif name == "zt3":
                coeffs[3] = coeffs.get(3, 0) + c * TILDE3
            elif re.fullmatch(r"z\d+", name):
                coeffs[int(name[1:])] = coeffs.get(int(name[1:]), 0) + c
            else:
                raise ValueError(f"basis element {name!r} is not representable as a ZetaExpr")
        return ZetaExpr(rational, coeffs)


def detect_relation(value, basis: Sequence[str] = DEFAULT_BASIS, height_bound: int = 10**6,
                    digits: int = 60) -> RelationResult:
    """Search for ``value = sum c_i * basis_i`` with rational c_i of bounded height.

    ``value`` must be accurate to ``digits`` significant digits. A relation is
    reported only if its residual is below 10**(-digits/2) and every
    coefficient has numerator and denominator at most ``height_bound``.
    """
    check_digits(digits)
    basis = tuple(basis)
    if not basis:
        raise ValueError("basis must be non-empty")
    if height_bound < 1:
        raise ValueError("height_bound must be positive")
    dim = len(basis) + 1
    # A spurious relation of height H among `dim` reals reaches ~H**-(dim-1);
    # it must stay far above the acceptance threshold.
    if (dim - 1) * math.log10(height_bound) > digits / 2:
        raise InfeasibleRelationError(
            f"infeasible: {digits} digits cannot separate height {height_bound} relations among {dim} constants"
        )
    dps = digits + GUARD_DIGITS
    with mp.workdps(dps):
        x = [to_mpf(value, dps) if not isinstance(value, mpf) else +value]
        x += [basis_constant(name, dps) for name in basis]
        threshold = mpf(10) ** (-(digits / 2))
        mag = max(int(mp.ceil(mp.log10(abs(v)))) for v in x if v != 0)
        scale = mpf(10) ** (digits - 2 - mag)
        rows = [[int(i == j) for j in range(dim)] + [int(mp.nint(scale * x[i]))] for i in range(dim)]
        reduced = lll_reduce(rows)

        best: tuple | None = None
        found = None
        for row in reduced:
            rel = row[:dim]
            if rel[0] == 0:
                continue
            coeffs = [Fraction(-a, rel[0]) for a in rel[1:]]
            approx = mp.fsum(to_mpf(c, dps) * b for c, b in zip(coeffs, x[1:]))
            residual = abs(x[0] - approx)
            height = max([1] + [max(abs(c.numerator), c.denominator) for c in coeffs])
            if best is None or residual < best[1]:
                best = (rel, residual)
            if residual < threshold and height <= height_bound:
                if found is None or height < found[2]:
                    found = (rel, residual, height, coeffs)
    if found:
        rel, residual, _, coeffs = found
        return RelationResult(True, coeffs, rounded(residual, 20), basis, list(rel), threshold)
    if best is None:
        return RelationResult(False, [], mpf("inf"), basis, [], threshold)
    return RelationResult(False, [], rounded(best[1], 20), basis, list(best[0]), threshold)


def to_decimal_string(x: mpf, digits: int) -> str:
    """Fixed number of significant digits, stable across runs."""
    return mp.nstr(x, digits, strip_zeros=False, min_fixed=-math.inf, max_fixed=math.inf) if x != 0 else "0"


def iter_basis(names: str | Iterable[str]) -> tuple[str, ...]:
    if isinstance(names, str):
        names = names.split(",")
    return tuple(n.strip() for n in names if n.strip())
