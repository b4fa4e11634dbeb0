"""Volterra-type integration operators on the Fock space F^2_alpha.

Truncated matrices of the seven operator families, their singular values and
Schatten norms, and the planar integrals that decide Schatten membership.
"""

from .polynomials import AffineMap, ComplexPolynomial, parse_polynomial, format_polynomial, parse_complex
from .fock import FockParams, TruncationError
from .operators import OperatorKind, SymbolPair, TruncatedOperator, build_matrix, build_matrix_quadrature, shift_weights_oracle
from .spectra import SchattenOrder, Verdict, convergence_diagnose, schatten_norm, schatten_power_sum, singular_values
from .quadrature import IntegralStatus, IntegralResult, build_grid, integrate_plane, probe_divergence
from .criteria import (
    MembershipStatus,
    TransformWhich,
    berezin_lp_integral,
    berezin_transform,
    classify_symbolic,
    companion_comparison,
    criterion_integral,
)

__version__ = "0.1.0"
