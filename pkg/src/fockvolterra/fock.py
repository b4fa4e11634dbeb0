"""The Fock space F^2_alpha with norm (alpha/pi) * int |f|^2 exp(-alpha|z|^2) dm.

The orthonormal basis is e_n(z) = sqrt(alpha^n / n!) z^n, n >= 0. Every
factorial/power ratio goes through ``math.lgamma`` so that nothing overflows
at the truncation sizes used downstream.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .polynomials import ComplexPolynomial

__all__ = [
    "FockParams",
    "BasisCoefficientVector",
    "log_basis_scale",
    "basis_eval",
    "kernel_eval",
    "normalized_kernel_eval",
    "kernel_polynomial",
    "poly_inner_product",
    "poly_norm_sq",
    "expand_in_basis",
    "dbar_kernel_norm_sq",
    "dbar_kernel_norm_sq_series",
    "kernel_norm_sq_series",
    "TruncationError",
]


class TruncationError(ValueError):
    """The truncation is too small to hold the requested expansion."""


@dataclass(frozen=True)
class FockParams:
    alpha: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a positive finite real, got {self.alpha!r}")


@dataclass(frozen=True)
class BasisCoefficientVector:
    """Coefficients <P, e_n> for n = 0..N-1."""

    entries: np.ndarray

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def __len__(self):
        return len(self.entries)


def log_basis_scale(n: int, alpha: float) -> float:
    """log sqrt(alpha^n / n!), the normalising factor of e_n."""
    return 0.5 * (n * math.log(alpha) - math.lgamma(n + 1))


def basis_eval(n: int, params: FockParams, z):
    if n < 0:
        raise ValueError("basis index must be nonnegative")
    if isinstance(z, np.ndarray):
        if n == 0:
            return np.ones_like(z, dtype=complex)
        z = z.astype(complex)
        r = np.abs(z)
        with np.errstate(divide="ignore"):
            logmag = log_basis_scale(n, params.alpha) + n * np.log(r)
        return np.where(r > 0, np.exp(logmag) * np.exp(1j * n * np.angle(z)), 0j)
    z = complex(z)
    if n == 0:
        return 1 + 0j
    if z == 0:
        return 0j
    r, theta = cmath.polar(z)
    return cmath.rect(math.exp(log_basis_scale(n, params.alpha) + n * math.log(r)), n * theta)


def kernel_eval(params: FockParams, w, z):
    """Reproducing kernel K_w(z) = exp(alpha * z * conj(w))."""
    return np.exp(params.alpha * z * np.conj(w))


def normalized_kernel_eval(params: FockParams, w, z):
    """k_w(z) = exp(alpha z conj(w) - alpha |w|^2 / 2), a unit vector."""
    return np.exp(params.alpha * z * np.conj(w) - 0.5 * params.alpha * np.abs(w) ** 2)


def kernel_polynomial(params: FockParams, w: complex, n_terms: int) -> ComplexPolynomial:
    """Truncation of K_w to its first ``n_terms`` Taylor coefficients."""
    w = complex(w)
    coeffs = []
    for n in range(n_terms):
        if n == 0:
            coeffs.append(1 + 0j)
        elif w == 0:
            coeffs.append(0j)
        else:
            r, theta = cmath.polar(w)
            mag = math.exp(n * math.log(params.alpha * r) - math.lgamma(n + 1))
            coeffs.append(cmath.rect(mag, -n * theta))
    return ComplexPolynomial(coeffs)


def _monomial_norm_sq(k: int, alpha: float) -> float:
    # ||z^k||^2 = k! / alpha^k
    return math.exp(math.lgamma(k + 1) - k * math.log(alpha))


def poly_inner_product(P: ComplexPolynomial, Q: ComplexPolynomial, params: FockParams) -> complex:
    n = min(len(P.coeffs), len(Q.coeffs))
    total = 0j
    for k in range(n):
        total += P.coeffs[k] * Q.coeffs[k].conjugate() * _monomial_norm_sq(k, params.alpha)
    return total


def poly_norm_sq(P: ComplexPolynomial, params: FockParams) -> float:
    return poly_inner_product(P, P, params).real


def expand_in_basis(P: ComplexPolynomial, params: FockParams, N: int) -> BasisCoefficientVector:
    deg = P.degree()
    if deg is not None and N <= deg:
        raise TruncationError(f"truncation N={N} cannot hold a polynomial of degree {deg}")
    entries = np.zeros(N, dtype=complex)
    for k, c in enumerate(P.coeffs):
        if c != 0:
            entries[k] = c * math.exp(-log_basis_scale(k, params.alpha))
    return BasisCoefficientVector(entries)


def kernel_norm_sq_series(params: FockParams, w: complex, n_terms: int) -> float:
    """Partial sum of sum_n |e_n(w)|^2, which converges to exp(alpha |w|^2)."""
    x = params.alpha * abs(w) ** 2
    if x == 0:
        return 1.0
    terms = [math.exp(n * math.log(x) - math.lgamma(n + 1)) for n in range(n_terms)]
    return math.fsum(terms)


def dbar_kernel_norm_sq(params: FockParams, w: complex) -> float:
    """||d/d(conj w) K_w||^2 = alpha * exp(alpha|w|^2) * (1 + alpha|w|^2)."""
    x = params.alpha * abs(w) ** 2
    log_value = math.log(params.alpha) + x + math.log1p(x)
    # beyond the double range the value is reported as inf rather than raising
    return math.exp(log_value) if log_value < 709.7 else math.inf


def dbar_kernel_norm_sq_series(params: FockParams, w: complex, n_terms: int) -> float:
    """Partial sum of sum_n |e_n'(w)|^2 = sum_n n^2 alpha^n |w|^(2n-2) / n!."""
    alpha = params.alpha
    r2 = abs(w) ** 2
    terms = []
    for n in range(1, n_terms + 1):
        if r2 == 0:
            if n == 1:
                terms.append(alpha)
            continue
        terms.append(math.exp(2 * math.log(n) + n * math.log(alpha) + (n - 1) * math.log(r2) - math.lgamma(n + 1)))
    return math.fsum(terms)
