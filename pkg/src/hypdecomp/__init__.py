"""Exact verification of decomposition formulas for multivariable hypergeometric functions.

Series are truncated by total degree and compared coefficient by coefficient in
exact rational arithmetic; a double-precision evaluator cross-checks numerically.
"""

from .scalar import Eigenvalue, PoleError, as_rational, pochhammer
from .tps import TruncatedSeries, compare_series
from .hyperfun import (
    DomainError,
    EvalPoint,
    Family,
    FunctionSpec,
    NonConvergence,
    coefficient_of,
    eval_numeric,
    truncate,
)
from .decomp import build_lhs, build_rhs, get_identity, list_identities
from .verify import TrialConfig, run_suite, verify_exact, verify_numeric

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "Eigenvalue",
    "EvalPoint",
    "Family",
    "FunctionSpec",
    "NonConvergence",
    "PoleError",
    "TrialConfig",
    "TruncatedSeries",
    "as_rational",
    "build_lhs",
    "build_rhs",
    "coefficient_of",
    "compare_series",
    "eval_numeric",
    "get_identity",
    "list_identities",
    "pochhammer",
    "run_suite",
    "truncate",
    "verify_exact",
    "verify_numeric",
]
