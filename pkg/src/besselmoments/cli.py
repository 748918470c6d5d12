"""Command-line front end.

Exit status: 0 on success, 1 if ``verify`` finds a failing check, 2 on domain
errors (divergent index, bad flags, infeasible relation search), 3 when a
numerical method fails to converge. Errors go to stderr as one line of the
form ``<tag>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from mpmath import mp, mpf

from . import __version__
from .moments import BasisMoment, MomentIndex, default_engine
from .numeric import GUARD_DIGITS, check_digits, rounded
from .quadrature import MomentIntegrand, QuadratureError, moment_quad
from .simplex import McEstimate, mc_beta_law, mc_four, mc_general, mc_root
from .zeta_ring import (
    ZetaExpr,
    detect_relation,
    evaluate,
    format_expr,
    iter_basis,
    parse_expr,
    to_decimal_string,
)
from .zeta_series import In_quad, decompose_In

DIGITS_ENV = "BESSELMOMENTS_DIGITS"
DEFAULT_DIGITS = 30
TSV_COLUMNS = ("command", "label", "exact", "decimal", "digits")


@dataclass
class OutputRecord:
    command: str
    label: str
    digits: int
    exact: ZetaExpr | None = None
    decimal: str | None = None
    text: str | None = None  # exact rendering, possibly in zt3 form
    diagnostics: dict = field(default_factory=dict)
    mc: McEstimate | None = None
    target: float | None = None

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "label": self.label,
            "exact": self.exact.to_json() if self.exact is not None else None,
            "exact_text": self.text,
            "decimal": self.decimal,
            "digits": self.digits,
            "diagnostics": self.diagnostics,
        }
        if self.mc is not None:
            out.update(self.mc.to_dict(self.target))
        return out


class CliUsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliUsageError(message)


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _orders(text: str) -> tuple[int, int, int, int]:
    vals = _ints(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"--orders needs four integers a,b,c,d, got {text!r}")
    return tuple(vals)


def _default_digits() -> int:
    env = os.environ.get(DIGITS_ENV)
    if env is None:
        return DEFAULT_DIGITS
    try:
        return int(env)
    except ValueError:
        raise CliUsageError(f"{DIGITS_ENV} must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=None,
                        help=f"significant digits (default {DEFAULT_DIGITS}, or ${DIGITS_ENV})")
    common.add_argument("--exact", action="store_true", help="print the exact closed form")
    common.add_argument("--decimal", action="store_true", help="print the decimal value")
    common.add_argument("--tilde", action="store_true", help="write zeta(3) terms through zt3 = 7 zeta(3)/2")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="one JSON object per line")
    fmt.add_argument("--tsv", action="store_true", help="tab-separated table with a header row")

    index = argparse.ArgumentParser(add_help=False)
    index.add_argument("--orders", type=_orders, help="exponents a,b,c,d of the four-index moment")
    index.add_argument("--m", type=int, default=1, help="power of the denominator (default 1)")
    index.add_argument("--sweight", type=int, default=0, help="power s of (a+b+c+d) (default 0)")

    p = _Parser(prog="besselmoments", description="Exact and numerical Bessel moment evaluation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("moment", parents=[common, index], help="exact four-index moment")

    b = sub.add_parser("basis", parents=[common], help="basis moment p_n / i_n")
    b.add_argument("--family", required=True, choices=["p0000", "i0001", "p0011", "i0111", "p1111"])
    b.add_argument("--n", type=int, required=True)

    t = sub.add_parser("table", parents=[common], help="q_k, j_k or denominator tables")
    t.add_argument("--kind", choices=["q", "j", "den"], default="q")
    t.add_argument("--k", type=int, help="single k")
    t.add_argument("--kmax", type=int, help="all k from 2 to KMAX")

    s = sub.add_parser("series", parents=[common], help="odd-zeta form of the root integral I_n")
    s.add_argument("--n", type=int, required=True)

    q = sub.add_parser("quad", parents=[common, index], help="double-exponential quadrature")
    q.add_argument("--family", choices=["p0000", "i0001", "p0011", "i0111", "p1111"])
    q.add_argument("--n", type=int, help="index for --family, or n of I_n")
    q.add_argument("--form", choices=["log", "sinh"], help="one-dimensional form of I_n")

    mc = sub.add_parser("mc", parents=[common, index], help="Monte Carlo estimate")
    mc.add_argument("--beta", type=float, help="simplex integral on a+b+c+d = beta")
    mc.add_argument("--n", type=int, help="root integral I_n, or general 2n-variable moment")
    mc.add_argument("--monomial", type=_ints, help="2n exponents of a1,b1,...,an,bn")
    mc.add_argument("--samples", type=int, default=10**5)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--workers", type=int, default=1)

    f = sub.add_parser("fit", parents=[common, index], help="integer relation search")
    src = f.add_mutually_exclusive_group()
    src.add_argument("--value", help="decimal value (must carry at least --digits correct digits)")
    src.add_argument("--expr", help="closed form such as '1/8 + (7/16)*z3'")
    src.add_argument("--k0-power", type=int, help="2^N int (u/2) K0(u)^N du by quadrature")
    f.add_argument("--basis", default="1,z3,z5,z2z3", help="comma-separated constants (default 1,z3,z5,z2z3)")
    f.add_argument("--max-den", type=int, default=None,
                   help="height bound on coefficients (default: the largest the precision supports, up to 10^6)")

    v = sub.add_parser("verify", parents=[common], help="run the cross-check matrix")
    v.add_argument("--level", choices=["fast", "full"], default="fast")
    return p


def _expr_record(command: str, label: str, x: ZetaExpr, digits: int, tilde: bool, **diag) -> OutputRecord:
    return OutputRecord(command, label, digits, exact=x, decimal=to_decimal_string(evaluate(x, digits), digits),
                        text=format_expr(x, tilde=tilde), diagnostics=diag)


def _index(args) -> MomentIndex:
    if args.orders is None:
        raise CliUsageError("--orders is required")
    return MomentIndex(args.orders, args.m, args.sweight)


def _scaled(value: mpf, scale: Fraction, digits: int) -> mpf:
    with mp.workdps(digits + GUARD_DIGITS):
        return rounded(value * scale.numerator / scale.denominator, digits)


def cmd_moment(args, digits):
    idx = _index(args)
    reduction, value = default_engine().reduce(idx)
    yield _expr_record("moment", _index_label(idx), value, digits, args.tilde, reduction=str(reduction))


def _index_label(idx: MomentIndex) -> str:
    return f"I({','.join(map(str, idx.exponents))};m={idx.m},s={idx.s})"


def cmd_basis(args, digits):
    b = BasisMoment(args.family, args.n)
    yield _expr_record("basis", str(b), default_engine().value(b), digits, args.tilde)


def _k_range(args) -> range:
    if args.k is not None and args.kmax is not None:
        raise CliUsageError("give either --k or --kmax")
    if args.k is not None:
        return range(args.k, args.k + 1)
    return range(2, (args.kmax if args.kmax is not None else 7) + 1)


def cmd_table(args, digits):
    ks = _k_range(args)
    engine = default_engine()
    if args.kind == "q":
        for k in ks:
            q0, q1, plus, minus = engine.q_values(k)
            for label, x in ((f"q_{k}(0)", q0), (f"q_{k}(1)", q1),
                             (f"q_{k}(1)+q_{k}(0)", plus), (f"q_{k}(1)-q_{k}(0)", minus)):
                yield _expr_record("table", label, x, digits, args.tilde, k=k)
    elif args.kind == "j":
        for k in ks:
            j0, j1, q01 = engine.j_values(k)
            for label, x in ((f"j_{k}(0001)", j0), (f"j_{k}(0111)", j1), (f"q_{k}(01)", q01)):
                yield _expr_record("table", label, x, digits, args.tilde, k=k)
    else:
        rows = engine.denominator_report(ks.stop - 1, digits)
        for row in rows:
            if row["k"] not in ks:
                continue
            diag = {"k": row["k"], "den_sum": row["den_sum"], "den_diff": row["den_diff"]}
            with mp.workdps(digits):
                diag["ratio_sum_x16"] = mp.nstr(16 * row["ratio_sum"], 15)
                diag["ratio_diff_x16"] = mp.nstr(16 * row["ratio_diff"], 15)
            yield OutputRecord("table", f"den_{row['k']}", digits, text=f"{row['den_sum']} {row['den_diff']}",
                               diagnostics=diag)


def cmd_series(args, digits):
    yield _expr_record("series", f"I_{args.n}", decompose_In(args.n), digits, args.tilde)


def _residual(value: mpf, exact: ZetaExpr, digits: int) -> str:
    with mp.workdps(digits + GUARD_DIGITS):
        return mp.nstr(abs(value - evaluate(exact, digits + GUARD_DIGITS)), 5)


def cmd_quad(args, digits):
    if args.orders is not None:
        idx = _index(args)
        f, scale = idx.integrand()
        res = moment_quad(f, digits)
        value = _scaled(res.value, scale, digits)
        exact = default_engine().reduce(idx)[1]
        label = _index_label(idx)
    elif args.family is not None:
        if args.n is None:
            raise CliUsageError("--family needs --n")
        b = BasisMoment(args.family, args.n)
        res = moment_quad(b.integrand(), digits)
        value, exact, label = res.value, default_engine().value(b), str(b)
    elif args.n is not None:
        res = In_quad(args.n, digits, f"{args.form or 'sinh'}_form")
        value, exact, label = res.value, decompose_In(args.n), f"I_{args.n}"
    else:
        raise CliUsageError("quad needs --orders, --family/--n, or --n")
    diag = res.diagnostics()
    diag["residual"] = _residual(value, exact, digits)
    yield OutputRecord("quad", label, digits, exact=exact, decimal=to_decimal_string(value, digits),
                       text=format_expr(exact, tilde=args.tilde), diagnostics=diag)


def cmd_mc(args, digits):
    if args.samples < 1:
        raise CliUsageError("--samples must be >= 1")
    exact = None
    if args.orders is not None:
        idx = _index(args)
        est = mc_four(idx, args.samples, args.seed, args.workers)
        exact, label = default_engine().reduce(idx)[1], _index_label(idx)
    elif args.beta is not None:
        est = mc_beta_law(args.beta, args.samples, args.seed, args.workers)
        label = f"beta={args.beta}"
        exact = ZetaExpr.from_tilde(1, 1).scale(Fraction(str(args.beta)) ** 3 / 16)  # beta^3 law
    elif args.n is not None:
        if args.monomial is not None:
            est = mc_general(args.n, args.monomial, args.samples, args.seed, args.workers)
            label = f"n={args.n};monomial={','.join(map(str, args.monomial))}"
        else:
            est = mc_root(args.n, args.samples, args.seed, args.workers)
            exact, label = decompose_In(args.n), f"I_{args.n}"
    else:
        raise CliUsageError("mc needs --orders, --beta, or --n")
    target = float(evaluate(exact, digits)) if exact is not None else None
    diag = {"stderr": est.stderr}
    if target is not None:
        diag["sigmas"] = est.sigmas(target)
    yield OutputRecord("mc", label, digits, exact=exact, decimal=repr(est.mean),
                       text=format_expr(exact, tilde=args.tilde) if exact is not None else None,
                       diagnostics=diag, mc=est, target=target)


def cmd_fit(args, digits):
    dps = digits + GUARD_DIGITS
    if args.value is not None:
        value, label = args.value, args.value
    elif args.expr is not None:
        value, label = evaluate(parse_expr(args.expr), dps), args.expr
    elif args.k0_power is not None:
        n = args.k0_power
        res = moment_quad(MomentIntegrand(1, (0,) * n), digits)
        value, label = _scaled(res.value, Fraction(2**n, 2), digits), f"2^{n} int (u/2) K0^{n}"
    elif args.orders is not None:
        idx = _index(args)
        f, scale = idx.integrand()
        value, label = _scaled(moment_quad(f, digits).value, scale, digits), _index_label(idx)
    else:
        raise CliUsageError("fit needs --value, --expr, --k0-power, or --orders")
    basis = iter_basis(args.basis)
    height = args.max_den if args.max_den is not None else feasible_height(len(basis) + 1, digits)
    r = detect_relation(value, basis, height, digits)
    diag = {"found": r.found, "basis": list(basis), "height": height, "residual": mp.nstr(r.residual, 5),
            "threshold": mp.nstr(r.threshold, 5) if r.threshold is not None else None,
            "relation": [str(c) for c in r.relation]}
    exact = text = None
    if r.found:
        diag["coefficients"] = [str(c) for c in r.coefficients]
        try:
            exact = r.as_expr()
            text = format_expr(exact, tilde=args.tilde)
        except ValueError:
            text = " + ".join(f"({c})*{b}" for c, b in zip(r.coefficients, basis) if c)
    yield OutputRecord("fit", label, digits, exact=exact, text=text,
                       decimal=to_decimal_string(mpf(value) if isinstance(value, str) else value, digits),
                       diagnostics=diag)


def feasible_height(dim: int, digits: int, cap: int = 10**6) -> int:
    """Largest H <= cap with (dim - 1) log10 H <= digits / 2."""
    h = min(cap, int(10 ** (digits / (2 * (dim - 1)))))
    while h > 1 and (dim - 1) * math.log10(h) > digits / 2:  # float rounding at the boundary
        h -= 1
    return max(1, h)


def cmd_verify(args, digits):
    from .verify import verify_all

    for check in verify_all(digits, args.level):
        diag = {"passed": check.passed, "residual": check.residual, **check.detail}
        yield OutputRecord("verify", check.name, digits, text="pass" if check.passed else "FAIL",
                           diagnostics=diag)


COMMANDS = {
    "moment": cmd_moment,
    "basis": cmd_basis,
    "table": cmd_table,
    "series": cmd_series,
    "quad": cmd_quad,
    "mc": cmd_mc,
    "fit": cmd_fit,
    "verify": cmd_verify,
}


def _text_line(rec: OutputRecord, args) -> str:
    if rec.command == "verify":
        res = rec.diagnostics.get("residual")
        return f"{rec.text}\t{rec.label}" + (f"\tresidual={res:.3g}" if res is not None else "")
    if rec.mc is not None:
        line = f"{rec.label}: {rec.decimal} +- {rec.mc.stderr!r} (samples={rec.mc.samples}, seed={rec.mc.seed})"
        if rec.target is not None:
            line += f" target={rec.target!r} sigmas={rec.mc.sigmas(rec.target):.3f}"
        return line
    if args.exact and not args.decimal:
        return rec.text if rec.text is not None else "none"
    if args.decimal and not args.exact:
        return rec.decimal if rec.decimal is not None else "none"
    parts = [p for p in (rec.text, rec.decimal) if p is not None]
    return f"{rec.label} = " + " = ".join(parts)


def emit(records: Iterable[OutputRecord], args, out) -> list[OutputRecord]:
    done = []
    if args.tsv:
        out.write("\t".join(TSV_COLUMNS) + "\n")
    for rec in records:
        if args.json:
            out.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")
        elif args.tsv:
            row = (rec.command, rec.label, rec.text or "", rec.decimal or "", str(rec.digits))
            out.write("\t".join(row) + "\n")
        else:
            out.write(_text_line(rec, args) + "\n")
        done.append(rec)
    return done


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        digits = args.digits if args.digits is not None else _default_digits()
        check_digits(digits)
        records = emit(COMMANDS[args.command](args, digits), args, out)
    except CliUsageError as exc:
        err.write(f"usage: {exc}\n")
        return 2
    except (ArithmeticError, QuadratureError) as exc:
        err.write(f"nonconvergent: {exc}\n")
        return 3
    except ValueError as exc:
        msg = str(exc)
        err.write(msg + "\n" if msg.split(":", 1)[0] in ("divergent", "infeasible") else f"domain: {msg}\n")
        return 2
    if args.command == "verify" and not all(r.diagnostics["passed"] for r in records):
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
