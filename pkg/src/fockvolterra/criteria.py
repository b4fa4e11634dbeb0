"""Membership tests for the generalized Volterra companion operators.

Three independent routes decide whether I_(g,psi) (or C_(g,psi)) lies in
the Schatten class S_p:

* the L^(p/2) integrability of a Berezin-type transform (nested planar
  quadrature, :func:`berezin_lp_integral`);
* the weighted L^p integral of the symbol (:func:`criterion_integral`);
* exact exponent analysis on polynomial symbols (:func:`classify_symbolic`),
  which takes precedence wherever it applies.

:func:`companion_comparison` compares the spectral diagnostics of the
companion pairs I_(g,psi) / V_g^psi and C_(g,psi) / C_g^psi.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import FockParams, poly_norm_sq
from .operators import OperatorKind, OutOfScopeSymbolError, SymbolPair, apply_operator
from .polynomials import ComplexPolynomial, poly_compose, poly_derivative, poly_eval, poly_multiply
from .quadrature import (
    AnnulusSchedule,
    IntegralResult,
    IntegralStatus,
    QuadratureGrid,
    build_grid,
    integrate_plane,
    probe_divergence,
)
from .spectra import ConvergenceReport, SchattenOrder, Verdict, convergence_diagnose

__all__ = [
    "TransformWhich",
    "MembershipStatus",
    "MembershipReason",
    "MembershipVerdict",
    "OutOfScopeSymbolError",
    "classify_symbolic",
    "berezin_transform",
    "berezin_transform_points",
    "berezin_lp_integral",
    "criterion_integral",
    "companion_comparison",
    "CompanionReport",
    "derivative_domination_ratio",
    "power_comparison_ratio",
    "RATIO_BAND",
]

RATIO_BAND = (1e-3, 1e3)
# |a| this close to 1 counts as non-contractive
UNIT_SLOPE_TOL = 1e-12


class TransformWhich(str, enum.Enum):
    ForI = "ForI"
    ForC = "ForC"

    @classmethod
    def parse(cls, text: str) -> "TransformWhich":
        t = text.strip().lower()
        for k in cls:
            if t in (k.value.lower(), k.value[-1].lower()):
                return k
        raise ValueError(f"unknown transform {text!r}; expected ForI or ForC")


class MembershipStatus(str, enum.Enum):
    MEMBER = "Member"
    NOT_MEMBER = "NotMember"


class MembershipReason(str, enum.Enum):
    ZERO_SYMBOL = "ZeroSymbol"
    AFFINE_CONTRACTIVE = "AffineContractive"
    AFFINE_NON_CONTRACTIVE = "AffineNonContractive"
    NON_AFFINE_PSI = "NonAffinePsi"


@dataclass(frozen=True)
class MembershipVerdict:
    status: MembershipStatus
    reason: MembershipReason

    def __post_init__(self):
        member = self.reason in (MembershipReason.ZERO_SYMBOL, MembershipReason.AFFINE_CONTRACTIVE)
        if member != (self.status is MembershipStatus.MEMBER):
            raise ValueError(f"reason {self.reason.value} inconsistent with {self.status.value}")

    @property
    def member(self) -> bool:
        return self.status is MembershipStatus.MEMBER

    def to_dict(self) -> dict:
        return {"status": self.status.value, "reason": self.reason.value}


def _require_polynomials(pair: SymbolPair) -> ComplexPolynomial:
    if not isinstance(pair.g, ComplexPolynomial):
        raise OutOfScopeSymbolError("g must be a polynomial")
    if pair.psi is None:
        raise ValueError("a second symbol psi is required")
    if not isinstance(pair.psi, ComplexPolynomial):
        raise OutOfScopeSymbolError("psi must be a polynomial")
    return pair.psi


def _weight_symbol(which: TransformWhich, pair: SymbolPair) -> ComplexPolynomial:
    """The symbol whose modulus enters the criterion integral: g or g o psi."""
    return pair.g if which is TransformWhich.ForI else poly_compose(pair.g, pair.psi)


def classify_symbolic(pair: SymbolPair, order=None, which: TransformWhich = TransformWhich.ForI) -> MembershipVerdict:
    """Exact S_p decision for polynomial symbols; the answer does not depend on p.

    Member iff the weight symbol vanishes identically, or psi(z) = a z + b
    with |a| < 1. Otherwise |psi|^2 - |z|^2 is unbounded above on a set of
    infinite area (|a| > 1, or deg psi >= 2), equals a linear function
    unbounded on a half-plane (|a| = 1, b != 0), or vanishes, leaving the
    integral of a nonzero polynomial over the plane (|a| = 1, b = 0).
    """
    which = TransformWhich(which)
    psi = _require_polynomials(pair)
    if order is not None and not isinstance(order, SchattenOrder):
        SchattenOrder(float(order))
    if _weight_symbol(which, pair).is_zero:
        return MembershipVerdict(MembershipStatus.MEMBER, MembershipReason.ZERO_SYMBOL)
    deg = psi.degree()
    if deg is not None and deg >= 2:
        return MembershipVerdict(MembershipStatus.NOT_MEMBER, MembershipReason.NON_AFFINE_PSI)
    if abs(psi.coefficient(1)) < 1 - UNIT_SLOPE_TOL:
        return MembershipVerdict(MembershipStatus.MEMBER, MembershipReason.AFFINE_CONTRACTIVE)
    return MembershipVerdict(MembershipStatus.NOT_MEMBER, MembershipReason.AFFINE_NON_CONTRACTIVE)


def _log_abs(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


def _criterion_integrand(which: TransformWhich, pair: SymbolPair, alpha: float, p: float):
    h = _weight_symbol(which, pair)
    psi = pair.psi

    def f(z):
        psi_z = poly_eval(psi, z)
        expo = p * _log_abs(poly_eval(h, z)) + 0.5 * p * alpha * (np.abs(psi_z) ** 2 - np.abs(z) ** 2)
        return np.exp(expo)

    return f


def criterion_integral(
    which: TransformWhich,
    pair: SymbolPair,
    params: FockParams,
    order,
    method: str = "symbolic",
    tol: float = 1e-12,
    schedule: AnnulusSchedule | None = None,
) -> IntegralResult:
    """int |h(z)|^p exp((p alpha / 2)(|psi(z)|^2 - |z|^2)) dm(z), h = g or g o psi.

    With ``method="symbolic"`` finiteness is decided by
    :func:`classify_symbolic` first and only convergent integrals are
    evaluated, on a polar grid centred where the Gaussian exponent peaks.
    ``method="probe"`` skips the exact analysis and runs the annulus prober.
    """
    which = TransformWhich(which)
    p = order.p if isinstance(order, SchattenOrder) else SchattenOrder(float(order)).p
    alpha = params.alpha
    psi = _require_polynomials(pair)
    f = _criterion_integrand(which, pair, alpha, p)

    if method == "probe":
        schedule = schedule or AnnulusSchedule()
        res = probe_divergence(f, **schedule.as_kwargs())
        res.details.update({"method": "probe"})
        return res
    if method != "symbolic":
        raise ValueError(f"unknown method {method!r}")

    verdict = classify_symbolic(pair, p, which)
    details = {"method": "symbolic", "classification": verdict.to_dict()}
    if verdict.reason is MembershipReason.ZERO_SYMBOL:
        return IntegralResult(IntegralStatus.FINITE, value=0.0, reason="zero symbol", details=details)
    if not verdict.member:
        return IntegralResult(
            IntegralStatus.DIVERGENT, error_estimate=math.inf, reason=f"exponent analysis: {verdict.reason.value}", details=details
        )

    a, b = psi.coefficient(1), psi.coefficient(0)
    gamma = 1.0 - abs(a) ** 2
    beta = 0.5 * p * alpha * gamma
    # |a z + b|^2 - |z|^2 = -gamma |z - c|^2 + const with c = conj(a) b / gamma
    center = a.conjugate() * b / gamma
    deg = _weight_symbol(which, pair).degree() or 0
    grid = build_grid(beta, tol, degree_hint=int(math.ceil(p * deg)), center=center)
    res = integrate_plane(f, grid)
    if deg > 0 and not (p % 2 == 0):
        # |h|^p is not smooth at the zeros of h, so Gauss-Legendre/trapezoid lose their
        # spectral rate there; refine by doubling until two grids agree
        res = _refine(f, grid, res, tol)
    res.details.update(details)
    res.details.update({"beta": beta, "center": [center.real, center.imag]})
    return res


MAX_REFINEMENTS = 5


def _refine(f, grid: QuadratureGrid, res: IntegralResult, tol: float) -> IntegralResult:
    nr, na = len(grid.r_nodes), grid.n_angular
    diff = math.inf
    for _ in range(MAX_REFINEMENTS):
        nr, na = 2 * nr, 2 * na
        finer = integrate_plane(f, build_grid(grid.beta, tol, grid.degree_hint, grid.center, nr, na))
        diff = abs(finer.value - res.value)
        res = finer
        if diff <= tol * max(abs(res.value), 1.0):
            break
    res.error_estimate += diff
    res.details["refinement"] = {"n_radial": nr, "n_angular": na, "last_difference": diff}
    return res


def _transform_symbol(which: TransformWhich, pair: SymbolPair) -> ComplexPolynomial:
    """g for I-type operators, (g o psi) psi' for C-type operators."""
    if which is TransformWhich.ForI:
        return pair.g
    return poly_multiply(poly_compose(pair.g, pair.psi), poly_derivative(pair.psi))


class _BerezinKernel:
    """B(w) for a fixed symbol pair, reusing one grid shape for every w."""

    def __init__(self, which, pair, params, grid=None, tol=1e-10):
        self.which = TransformWhich(which)
        self.psi = _require_polynomials(pair)
        self.h = _transform_symbol(self.which, pair)
        self.alpha = params.alpha
        deg_psi = self.psi.degree() or 0
        self.affine = deg_psi <= 1
        self.a = self.psi.coefficient(1)
        if grid is None:
            beta = self.alpha if self.affine else 0.5 * self.alpha
            grid = build_grid(beta, tol, degree_hint=2 * (self.h.degree() or 0))
        self.grid = grid

    def _integrand(self, w: complex):
        alpha, psi, h = self.alpha, self.psi, self.h
        lw = alpha * abs(w) ** 2

        def f(z):
            expo = (
                2 * alpha * np.real(poly_eval(psi, z) * np.conj(w))
                - lw
                - alpha * np.abs(z) ** 2
                + 2 * _log_abs(poly_eval(h, z))
                - 2 * np.log1p(np.abs(z))
            )
            return np.exp(expo)

        return f

    def __call__(self, w: complex) -> float:
        return float(self.many(np.array([complex(w)]))[0])

    def many(self, ws: np.ndarray, chunk: int = 256) -> np.ndarray:
        """B evaluated at every entry of ``ws``."""
        ws = np.asarray(ws, dtype=complex).ravel()
        out = np.zeros(ws.shape)
        if self.h.is_zero:
            return out
        if not self.affine:
            for i, w in enumerate(ws):
                out[i] = (1 + abs(w)) ** 2 * integrate_plane(self._integrand(w), self.grid).value
            return out
        # z = conj(a) w + u with u on the grid; the Gaussian factor then depends on u only:
        # 2 alpha Re(psi(z) conj(w)) - alpha|w|^2 - alpha|z|^2
        #   = -alpha|u|^2 + alpha(|a|^2 - 1)|w|^2 + 2 alpha Re(b conj(w))
        alpha, a, b = self.alpha, self.a, self.psi.coefficient(0)
        grid = dataclasses.replace(self.grid, center=0j)
        u = grid.points().ravel()
        log_wu = np.log(grid.weights().ravel()) - alpha * np.abs(u) ** 2
        for start in range(0, ws.size, chunk):
            w = ws[start:start + chunk]
            z = a.conjugate() * w[:, None] + u[None, :]
            terms = log_wu[None, :] + 2 * _log_abs(poly_eval(self.h, z)) - 2 * np.log1p(np.abs(z))
            with np.errstate(over="ignore"):
                log_j = _logsumexp_rows(terms)
                log_pre = 2 * np.log1p(np.abs(w)) + alpha * (abs(a) ** 2 - 1) * np.abs(w) ** 2 + 2 * alpha * np.real(b * np.conj(w))
                out[start:start + chunk] = np.exp(log_pre + log_j)
        return out


def _logsumexp_rows(x: np.ndarray) -> np.ndarray:
    m = np.max(x, axis=1)
    finite = np.isfinite(m)
    res = np.full(x.shape[0], -np.inf)
    res[finite] = m[finite] + np.log(np.sum(np.exp(x[finite] - m[finite, None]), axis=1))
    return res


def berezin_transform(
    which: TransformWhich,
    pair: SymbolPair,
    params: FockParams,
    w: complex,
    grid: QuadratureGrid | None = None,
    tol: float = 1e-10,
) -> float:
    """(1+|w|)^2 int |k_w(psi(z))|^2 |h(z)|^2 exp(-alpha|z|^2) (1+|z|)^(-2) dm(z),
    with h = g (ForI) or h = (g o psi) psi' (ForC).

    For affine psi the grid is re-centred at conj(a) w, where the integrand
    concentrates; the grid's own centre is ignored in that case.
    """
    return _BerezinKernel(which, pair, params, grid, tol)(w)


def berezin_transform_points(
    which: TransformWhich,
    pair: SymbolPair,
    params: FockParams,
    ws,
    grid: QuadratureGrid | None = None,
    tol: float = 1e-10,
) -> np.ndarray:
    """:func:`berezin_transform` at every point of ``ws`` (vectorised for affine psi)."""
    return _BerezinKernel(which, pair, params, grid, tol).many(np.asarray(ws, dtype=complex))


def berezin_lp_integral(
    which: TransformWhich,
    pair: SymbolPair,
    params: FockParams,
    order,
    grid_outer: AnnulusSchedule | None = None,
    grid_inner: QuadratureGrid | None = None,
    tol: float = 1e-10,
) -> IntegralResult:
    """int B(w)^(p/2) dm(w), outer integral on the annulus prober.

    ``details["norm_estimate"]`` holds value**(1/p), the quantity comparable
    to the S_p norm up to constants.
    """
    p = order.p if isinstance(order, SchattenOrder) else SchattenOrder(float(order)).p
    kernel = _BerezinKernel(which, pair, params, grid_inner, tol)
    if kernel.h.is_zero:
        return IntegralResult(IntegralStatus.FINITE, value=0.0, reason="zero symbol", details={"norm_estimate": 0.0})
    schedule = grid_outer or AnnulusSchedule()

    def outer(w: np.ndarray) -> np.ndarray:
        return kernel.many(w).reshape(w.shape) ** (0.5 * p)

    res = probe_divergence(outer, **schedule.as_kwargs())
    if res.finite:
        res.details["norm_estimate"] = res.value ** (1.0 / p)
    return res


@dataclass
class CompanionReport:
    I_branch: ConvergenceReport
    V_branch: ConvergenceReport
    C_branch: ConvergenceReport
    CU_branch: ConvergenceReport

    @property
    def implication_I_to_V(self) -> bool:
        return self.I_branch.verdict is not Verdict.CONVERGED or self.V_branch.verdict is Verdict.CONVERGED

    @property
    def implication_C_to_CU(self) -> bool:
        return self.C_branch.verdict is not Verdict.CONVERGED or self.CU_branch.verdict is Verdict.CONVERGED

    @property
    def converse_failure(self) -> bool:
        """V-branch converges while the I-branch does not."""
        return self.V_branch.verdict is Verdict.CONVERGED and self.I_branch.verdict is Verdict.DIVERGING

    def to_dict(self) -> dict:
        return {
            "I_branch": self.I_branch.to_dict(),
            "V_branch": self.V_branch.to_dict(),
            "C_branch": self.C_branch.to_dict(),
            "CU_branch": self.CU_branch.to_dict(),
            "implication_I_to_V": self.implication_I_to_V,
            "implication_C_to_CU": self.implication_C_to_CU,
            "converse_failure": self.converse_failure,
        }


def companion_comparison(pair: SymbolPair, params: FockParams, order, Ns: Sequence[int], **thresholds) -> CompanionReport:
    """Spectral diagnostics of I_(g,psi) vs V_g^psi and C_(g,psi) vs C_g^psi.

    Only the forward implications (I converged => V converged, and the
    same for the C pair) are checked; the converse is reported, not asserted.
    """
    _require_polynomials(pair)

    def run(kind):
        return convergence_diagnose(kind, pair, params, order, Ns, **thresholds)

    return CompanionReport(
        I_branch=run(OperatorKind.IgPsi),
        V_branch=run(OperatorKind.VgUpperPsi),
        C_branch=run(OperatorKind.CgPsi),
        CU_branch=run(OperatorKind.CgUpperPsi),
    )


# --- fixture ratio diagnostics (no constants are asserted) ------------------

def derivative_domination_ratio(pair: SymbolPair, params: FockParams, f: ComplexPolynomial, tol: float = 1e-8) -> float:
    """||I f||^2 divided by int |f'(w)|^2 exp(-alpha|w|^2) (1+|w|)^(-2) B(w) dm(w)."""
    lhs = poly_norm_sq(apply_operator(OperatorKind.IgPsi, pair, params, f), params)
    kernel = _BerezinKernel(TransformWhich.ForI, pair, params, tol=tol)
    df = poly_derivative(f)
    alpha = params.alpha
    grid = build_grid(alpha, tol, degree_hint=2 * (df.degree() or 0), n_radial=40, n_angular=24)

    def outer(w):
        out = kernel.many(w).reshape(w.shape)
        return np.abs(poly_eval(df, w)) ** 2 * np.exp(-alpha * np.abs(w) ** 2) / (1 + np.abs(w)) ** 2 * out

    rhs = integrate_plane(outer, grid).value
    return lhs / rhs


def power_comparison_ratio(pair: SymbolPair, params: FockParams, order, w: complex, tol: float = 1e-10) -> float:
    """Ratio of the two sides of the L^2 / L^p comparison for the measure
    |k_w(psi)|^s |g|^s exp(-s alpha|z|^2/2) (1+|z|)^(-s) dm, s = 2 and s = p.

    For p <= 2 this is (s=2 integral) / (s=p integral)^(2/p); for p > 2 the
    roles are swapped: (s=p integral) / (s=2 integral)^(p/2).
    """
    p = order.p if isinstance(order, SchattenOrder) else float(order)
    psi = _require_polynomials(pair)
    g = pair.g
    alpha = params.alpha
    w = complex(w)

    def integrand(s):
        def f(z):
            expo = s * (
                alpha * np.real(poly_eval(psi, z) * np.conj(w)) - 0.5 * alpha * abs(w) ** 2
                - 0.5 * alpha * np.abs(z) ** 2 + _log_abs(poly_eval(g, z)) - np.log1p(np.abs(z))
            )
            return np.exp(expo)

        return f

    center = psi.coefficient(1).conjugate() * w
    hint = 2 * int(math.ceil(max(p, 2) * (g.degree() or 0) / 2))

    def integral(s):
        grid = build_grid(0.5 * s * alpha, tol, degree_hint=hint, center=center)
        return integrate_plane(integrand(s), grid).value

    two, pth = integral(2.0), integral(p)
    if p <= 2:
        return two / pth ** (2.0 / p)
    return pth / two ** (p / 2.0)
