"""Numerics for shifted convolution sums against sums of three squares.

Exponential sums, the cubic character sum and its factorization, circle-method
machinery, GL(3) Voronoi weight functions and the tau_3 main term.
"""

from .arith import factorize, jacobi_symbol, tau, tau3
from .coefficients import CoefficientSequence, builtin, ingest_coefficients
from .expsums import gauss_sum_direct, gauss_sum_fast, kloosterman, r_ell, r_ell_batch, salie
from .reports import BoundReport
from .weights import TestFunction, mellin

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "CoefficientSequence", "TestFunction", "builtin", "factorize", "gauss_sum_direct",
    "gauss_sum_fast", "ingest_coefficients", "jacobi_symbol", "kloosterman", "mellin", "r_ell",
    "r_ell_batch", "salie", "tau", "tau3",
]
