"""Volterra-type operators acting on polynomials, and their truncated matrices.

Seven operators are supported, all induced by a symbol g and (for four of
them) a second symbol psi:

    Vg          f -> int_0^z f g'
    Ig          f -> int_0^z f' g
    Mg          f -> g f
    IgPsi       f -> int_0^z f'(psi(w)) g(w) dw
    CgPsi       f -> int_0^psi(z) f' g
    VgUpperPsi  f -> int_0^z f(psi(w)) g'(w) dw
    CgUpperPsi  f -> int_0^psi(z) f g'

Matrices are taken in the orthonormal basis e_n of F^2_alpha; entry (m, n)
is <T e_n, e_m>.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .fock import FockParams, basis_eval, log_basis_scale
from .polynomials import (
    AffineMap,
    ComplexPolynomial,
    as_polynomial,
    poly_antiderivative0,
    poly_compose,
    poly_derivative,
    poly_eval,
    poly_multiply,
)
from .quadrature import QuadratureGrid, build_grid

__all__ = [
    "OperatorKind",
    "SymbolPair",
    "TruncatedOperator",
    "MissingSymbolError",
    "GridTooCoarseError",
    "OutOfScopeSymbolError",
    "apply_operator",
    "build_matrix",
    "build_matrix_quadrature",
    "shift_weights_oracle",
    "LEAKAGE_FLAG_THRESHOLD",
]

LEAKAGE_FLAG_THRESHOLD = 1e-6


class MissingSymbolError(ValueError):
    pass


class GridTooCoarseError(ArithmeticError):
    pass


class OutOfScopeSymbolError(TypeError):
    """A symbol that is not a polynomial (e.g. an arbitrary entire function)."""


class OperatorKind(str, enum.Enum):
    Vg = "Vg"
    Ig = "Ig"
    Mg = "Mg"
    IgPsi = "IgPsi"
    CgPsi = "CgPsi"
    VgUpperPsi = "VgUpperPsi"
    CgUpperPsi = "CgUpperPsi"

    @property
    def requires_psi(self) -> bool:
        return self not in (OperatorKind.Vg, OperatorKind.Ig, OperatorKind.Mg)

    @property
    def is_integral(self) -> bool:
        return self is not OperatorKind.Mg

    @classmethod
    def parse(cls, text: str) -> "OperatorKind":
        lookup = {k.value.lower(): k for k in cls}
        try:
            return lookup[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown operator kind {text!r}; expected one of {[k.value for k in cls]}") from None


@dataclass(frozen=True)
class SymbolPair:
    g: ComplexPolynomial
    psi: ComplexPolynomial | None = None

    def __post_init__(self):
        # callables that are not polynomials are kept so callers can reject them explicitly
        for name in ("g", "psi"):
            value = getattr(self, name)
            if value is not None and not (callable(value) and not isinstance(value, (ComplexPolynomial, AffineMap))):
                object.__setattr__(self, name, as_polynomial(value))

    @property
    def polynomial(self) -> bool:
        return isinstance(self.g, ComplexPolynomial) and (self.psi is None or isinstance(self.psi, ComplexPolynomial))


def _require_polynomial_pair(pair: SymbolPair) -> None:
    if not pair.polynomial:
        raise OutOfScopeSymbolError("only polynomial symbols are supported")


@dataclass(frozen=True)
class TruncatedOperator:
    kind: OperatorKind
    pair: SymbolPair
    params: FockParams
    N: int
    matrix: np.ndarray
    leakage: np.ndarray = field(repr=False)  # relative dropped mass per column
    leak_threshold: float = LEAKAGE_FLAG_THRESHOLD

    @property
    def leaky_columns(self) -> list[int]:
        return [int(n) for n in np.flatnonzero(self.leakage > self.leak_threshold)]

    @property
    def leak_flag(self) -> bool:
        return bool(np.any(self.leakage > self.leak_threshold))


def _psi(kind: OperatorKind, pair: SymbolPair) -> ComplexPolynomial:
    if pair.psi is None:
        raise MissingSymbolError(f"operator {kind.value} needs a second symbol psi")
    return pair.psi


def apply_operator(kind: OperatorKind, pair: SymbolPair, params: FockParams | None, f: ComplexPolynomial) -> ComplexPolynomial:
    """Exact image of the polynomial ``f``. The operators do not depend on alpha."""
    kind = OperatorKind(kind)
    _require_polynomial_pair(pair)
    g = pair.g
    if kind is OperatorKind.Vg:
        return poly_antiderivative0(poly_multiply(f, poly_derivative(g)))
    if kind is OperatorKind.Ig:
        return poly_antiderivative0(poly_multiply(poly_derivative(f), g))
    if kind is OperatorKind.Mg:
        return poly_multiply(f, g)
    psi = _psi(kind, pair)
    if kind is OperatorKind.IgPsi:
        return poly_antiderivative0(poly_multiply(poly_compose(poly_derivative(f), psi), g))
    if kind is OperatorKind.CgPsi:
        return poly_compose(poly_antiderivative0(poly_multiply(poly_derivative(f), g)), psi)
    if kind is OperatorKind.VgUpperPsi:
        return poly_antiderivative0(poly_multiply(poly_compose(f, psi), poly_derivative(g)))
    if kind is OperatorKind.CgUpperPsi:
        return poly_compose(poly_antiderivative0(poly_multiply(f, poly_derivative(g))), psi)
    raise AssertionError(kind)


def _leakage(image: ComplexPolynomial, params: FockParams, N: int) -> float:
    """Relative basis-coefficient mass of ``image`` at degrees >= N."""
    if len(image.coeffs) <= N:
        return 0.0
    log_mass = np.array([
        2 * math.log(abs(c)) + math.lgamma(m + 1) - m * math.log(params.alpha) if c != 0 else -math.inf
        for m, c in enumerate(image.coeffs)
    ])
    total = logsumexp(log_mass)
    dropped = logsumexp(log_mass[N:])
    return math.exp(0.5 * (dropped - total))


def _column(kind, pair, params: FockParams, n: int, N: int) -> tuple[np.ndarray, float]:
    # T e_n = s_n T(z^n), so entry m is c_m * s_n / s_m
    image = apply_operator(kind, pair, params, ComplexPolynomial.monomial(n))
    col = np.zeros(N, dtype=complex)
    log_sn = log_basis_scale(n, params.alpha)
    for m, c in enumerate(image.coeffs[:N]):
        if c != 0:
            col[m] = c * math.exp(log_sn - log_basis_scale(m, params.alpha))
    return col, _leakage(image, params, N)


def build_matrix(kind: OperatorKind, pair: SymbolPair, params: FockParams, N: int) -> TruncatedOperator:
    """N x N matrix of <T e_n, e_m>, built column by column from exact images.

    Coefficients of T e_n at degree >= N are dropped; the relative size of
    the dropped part is kept per column in ``leakage``.
    """
    if N < 2:
        raise ValueError("truncation size must be at least 2")
    kind = OperatorKind(kind)
    if kind.requires_psi:
        _psi(kind, pair)
    matrix = np.zeros((N, N), dtype=complex)
    leakage = np.zeros(N)
    for n in range(N):
        matrix[:, n], leakage[n] = _column(kind, pair, params, n, N)
    return TruncatedOperator(kind, pair, params, N, matrix, leakage)


def build_matrix_quadrature(
    kind: OperatorKind,
    pair: SymbolPair,
    params: FockParams,
    N: int,
    grid: QuadratureGrid | None = None,
    tol: float = 1e-10,
) -> TruncatedOperator:
    """Same matrix as :func:`build_matrix`, but every entry is the planar integral

        (alpha/pi) * int (T e_n)(z) conj(e_m(z)) exp(-alpha |z|^2) dm(z)

    evaluated on a polar grid. Raises :class:`GridTooCoarseError` when the
    grid cannot resolve the angular frequencies involved or its own error
    estimate exceeds ``tol``.
    """
    kind = OperatorKind(kind)
    if kind.requires_psi:
        _psi(kind, pair)
    alpha = params.alpha
    images = [
        apply_operator(kind, pair, params, ComplexPolynomial.monomial(n, math.exp(log_basis_scale(n, alpha))))
        for n in range(N)
    ]
    top = max((im.degree() or 0) for im in images)
    if grid is None:
        grid = build_grid(alpha, tol, degree_hint=top + N - 1)
    if grid.n_angular <= top + N - 1:
        raise GridTooCoarseError(f"{grid.n_angular} angular nodes alias frequencies up to {top + N - 1}")
    if grid.center != 0 or grid.beta > alpha:
        raise GridTooCoarseError("grid must be centred at 0 with decay rate at most alpha")

    z = grid.points().ravel()
    w = grid.weights().ravel() * (alpha / math.pi) * np.exp(-alpha * np.abs(z) ** 2)
    E = np.column_stack([basis_eval(m, params, z) for m in range(N)])
    F = np.column_stack([poly_eval(im, z) for im in images])
    matrix = E.conj().T @ (w[:, None] * F)
    # rounding floor: the entries are differences of terms as large as the absolute mass
    # (Horner rounding scales with sum |c_k| |z|^k, not with |F| itself)
    absF = np.column_stack([poly_eval(ComplexPolynomial(tuple(np.abs(im.as_array()))), np.abs(z)) for im in images])
    mass = float(np.max(np.abs(E).T @ (w[:, None] * np.real(absF))))
    floor = np.finfo(float).eps * mass
    if floor > tol:
        raise GridTooCoarseError(f"cancellation floor {floor:.3g} exceeds tolerance {tol:.3g}; images too large for double precision")

    # tail estimate: size of the worst entry integrand on the boundary circle,
    # rescaled by the grid's analytic tail for its model weight
    ring = grid.radius * np.exp(2j * np.pi * np.arange(grid.n_angular) / grid.n_angular)
    worst_t = max(float(np.max(np.abs(poly_eval(im, ring)))) for im in images)
    worst_e = max(float(np.max(np.abs(basis_eval(m, params, ring)))) for m in range(N))
    R = grid.radius
    est = (alpha / math.pi) * worst_t * worst_e * grid.tail_bound * math.exp(-(alpha - grid.beta) * R * R) / R**grid.degree_hint
    if est > tol:
        raise GridTooCoarseError(f"estimated quadrature error {est:.3g} exceeds tolerance {tol:.3g}")
    leakage = np.array([_leakage(im, params, N) for im in images])
    return TruncatedOperator(kind, pair, params, N, matrix, leakage)


def shift_weights_oracle(k: int, c: complex, a: complex, params: FockParams, n: int) -> float:
    """Closed-form |<I e_n, e_{n+k}>| for g = c z^k and psi = a z.

    sigma_n = |c| n |a|^(n-1) / (n+k) * sqrt((n+k)! / (n! alpha^k)), sigma_0 = 0.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    if n == 0 or c == 0:
        return 0.0
    if a == 0:
        if n > 1:
            return 0.0
        log_a = 0.0
    else:
        log_a = (n - 1) * math.log(abs(a))
    log_sigma = (
        math.log(abs(c)) + math.log(n) + log_a - math.log(n + k)
        + 0.5 * (math.lgamma(n + k + 1) - math.lgamma(n + 1) - k * math.log(params.alpha))
    )
    return math.exp(log_sigma)
