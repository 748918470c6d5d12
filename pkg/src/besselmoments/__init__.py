"""Exact and numerical evaluation of four-Bessel moments and related simplex integrals.

The exact layer works over Q[zeta(3), zeta(5), ...]; numerical values come from
double-exponential quadrature of products of Macdonald functions and from
Monte Carlo sampling of the original multidimensional integrals.
"""

__version__ = "0.1.0"

from .besselk import bessel_k
from .moments import BasisMoment, MomentEngine, MomentIndex, basis_moment_value, moment_value, reduce
from .numeric import PrecisionError, fundamental_constant, zeta_value
from .quadrature import DivergentIntegralError, MomentIntegrand, QuadratureError, integrate_moment
from .simplex import mc_beta_law, mc_four, mc_general, mc_root
from .zeta_ring import ZetaExpr, detect_relation, evaluate, format_expr, parse_expr, to_decimal_string
from .zeta_series import decompose_In, In_numeric

__all__ = [
    "BasisMoment",
    "DivergentIntegralError",
    "In_numeric",
    "MomentEngine",
    "MomentIndex",
    "MomentIntegrand",
    "PrecisionError",
    "QuadratureError",
    "ZetaExpr",
    "basis_moment_value",
    "bessel_k",
    "decompose_In",
    "detect_relation",
    "evaluate",
    "format_expr",
    "fundamental_constant",
    "integrate_moment",
    "mc_beta_law",
    "mc_four",
    "mc_general",
    "mc_root",
    "moment_value",
    "parse_expr",
    "reduce",
    "to_decimal_string",
    "zeta_value",
]
