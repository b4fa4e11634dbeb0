"""Polar tensor-product quadrature over the complex plane.

Radial direction: Gauss-Legendre on [0, R] with the Jacobian r folded into
the weights. Angular direction: the uniform trapezoid rule, exact on
trigonometric polynomials of degree below the node count. The truncation
radius R is chosen from the incomplete-Gamma tail of a model weight
|z|^h exp(-beta |z|^2), so the tail bound is analytic rather than guessed.

``probe_divergence`` is the fallback for integrands whose finiteness is not
known in advance: it integrates dyadic annuli and calls the integral
divergent when the outermost annuli stop shrinking.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import gammaincc, gammaln

__all__ = [
    "QuadratureError",
    "QuadratureGrid",
    "IntegralStatus",
    "IntegralResult",
    "build_grid",
    "integrate_plane",
    "probe_divergence",
    "AnnulusSchedule",
    "gaussian_tail",
]

Integrand = Callable[[np.ndarray], np.ndarray]

# R is placed where the model tail is this fraction of the requested tolerance
TAIL_MARGIN = 0.1


class QuadratureError(ArithmeticError):
    pass


class IntegralStatus(str, enum.Enum):
    FINITE = "Finite"
    DIVERGENT = "Divergent"


@dataclass
class IntegralResult:
    status: IntegralStatus
    value: float | None = None
    error_estimate: float = 0.0
    annulus_trace: list[dict] = field(default_factory=list)
    reason: str = ""
    details: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.status is IntegralStatus.FINITE

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "value": self.value,
            "error_estimate": self.error_estimate,
            "reason": self.reason,
            "annulus_trace": self.annulus_trace,
            "details": self.details,
        }


@dataclass(frozen=True)
class QuadratureGrid:
    r_nodes: np.ndarray
    r_weights: np.ndarray  # includes the Jacobian r
    n_angular: int
    radius: float
    beta: float
    tail_bound: float
    degree_hint: int = 0
    center: complex = 0j

    def points(self) -> np.ndarray:
        theta = 2 * np.pi * np.arange(self.n_angular) / self.n_angular
        return self.center + self.r_nodes[:, None] * np.exp(1j * theta)[None, :]

    def weights(self) -> np.ndarray:
        w = self.r_weights * (2 * np.pi / self.n_angular)
        return np.broadcast_to(w[:, None], (len(self.r_nodes), self.n_angular))

    @property
    def size(self) -> int:
        return len(self.r_nodes) * self.n_angular


def gaussian_tail(beta: float, degree: float, R: float) -> float:
    """int_{|z|>R} |z|^degree exp(-beta|z|^2) dm(z), via the upper incomplete Gamma."""
    s = degree / 2 + 1
    return float(math.pi * gammaincc(s, beta * R * R) * math.exp(gammaln(s) - s * math.log(beta)))


def _gauss_legendre(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def build_grid(
    beta: float,
    tol: float,
    degree_hint: int = 0,
    center: complex = 0j,
    n_radial: int | None = None,
    n_angular: int | None = None,
) -> QuadratureGrid:
    """Grid for integrands decaying like |z - center|^degree_hint exp(-beta |z - center|^2).

    The radius R solves tail(R) = TAIL_MARGIN * tol for the model weight;
    the radial node count grows with R*sqrt(beta) and the degree hint, and
    the angular count is at least 2*degree_hint + 16.
    """
    if not beta > 0:
        raise ValueError(f"decay rate beta must be positive, got {beta!r}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    if degree_hint < 0:
        raise ValueError("degree_hint must be nonnegative")
    target = TAIL_MARGIN * tol
    h = degree_hint
    # the tail is decreasing in R; bracket from the mode of the model weight outward
    lo = math.sqrt(max(h, 1) / (2 * beta))
    if gaussian_tail(beta, h, lo) <= target:
        R = lo
    else:
        hi = 2 * lo
        while gaussian_tail(beta, h, hi) > target:
            hi *= 2
        R = brentq(lambda r: math.log(gaussian_tail(beta, h, r)) - math.log(target), lo, hi, xtol=1e-12)
    if n_radial is None:
        n_radial = int(math.ceil(8 * R * math.sqrt(beta))) + h + 16
    if n_angular is None:
        n_angular = 2 * h + 16
    r, w = _gauss_legendre(0.0, R, n_radial)
    return QuadratureGrid(
        r_nodes=r,
        r_weights=w * r,
        n_angular=int(n_angular),
        radius=R,
        beta=beta,
        tail_bound=gaussian_tail(beta, h, R),
        degree_hint=h,
        center=complex(center),
    )


@dataclass(frozen=True)
class AnnulusSchedule:
    """Dyadic radii R0 * 2**k and the per-annulus node counts of the prober."""

    R0: float = 1.0
    k_max: int = 8
    n_radial: int = 48
    n_angular: int = 64
    trigger: int = 3
    k0: int = 1

    def as_kwargs(self) -> dict:
        return {f: getattr(self, f) for f in ("R0", "k_max", "n_radial", "n_angular", "trigger", "k0")}


def _evaluate(f: Integrand, z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        vals = np.asarray(f(z), dtype=float)
    return np.broadcast_to(vals, z.shape)


def integrate_plane(f: Integrand, grid: QuadratureGrid) -> IntegralResult:
    """Integrate a nonnegative evaluator against dm over the grid.

    ``f`` receives a complex ndarray and returns real values of the same
    shape. The error estimate is the analytic tail of the model weight,
    rescaled by how large ``f`` actually is on the boundary circle.
    """
    z = grid.points()
    vals = _evaluate(f, z)
    if not np.all(np.isfinite(vals)):
        bad = int(np.count_nonzero(~np.isfinite(vals)))
        raise QuadratureError(f"integrand is non-finite at {bad} of {vals.size} nodes")
    value = float(np.sum((grid.weights() * vals).ravel()))

    theta = 2 * np.pi * np.arange(grid.n_angular) / grid.n_angular
    ring = grid.center + grid.radius * np.exp(1j * theta)
    ring_mean = float(np.mean(_evaluate(f, ring)))
    model = grid.radius**grid.degree_hint * math.exp(-grid.beta * grid.radius**2)
    scale = ring_mean / model if model > 0 else math.inf
    error = grid.tail_bound * max(scale, 0.0) if math.isfinite(scale) else grid.tail_bound
    return IntegralResult(
        IntegralStatus.FINITE,
        value=value,
        error_estimate=float(error),
        details={"radius": grid.radius, "nodes": grid.size, "tail_bound": grid.tail_bound},
    )


def probe_divergence(
    f: Integrand,
    R0: float = 1.0,
    k_max: int = 8,
    n_radial: int = 48,
    n_angular: int = 64,
    trigger: int = 3,
    k0: int = 1,
    center: complex = 0j,
) -> IntegralResult:
    """Integrate f over the disc |z| <= R0 and the dyadic annuli
    R0 2^k < |z| <= R0 2^(k+1), k = 0..k_max-1.

    The result is Divergent when the last ``trigger`` annulus contributions
    (all with index >= k0) are positive and non-decreasing, or when any
    contribution is non-finite; otherwise it is Finite with the summed value.
    """
    if k_max < 4:
        raise ValueError("the radii schedule needs at least 4 annuli")
    if trigger < 2 or k_max - trigger < k0:
        raise ValueError("trigger window does not fit beyond k0 in the schedule")
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    circle = np.exp(1j * theta)
    pieces = [(0.0, R0)] + [(R0 * 2.0**k, R0 * 2.0 ** (k + 1)) for k in range(k_max)]
    trace = []
    contributions = []
    for idx, (a, b) in enumerate(pieces):
        r, w = _gauss_legendre(a, b, n_radial)
        z = center + r[:, None] * circle[None, :]
        vals = _evaluate(f, z)
        with np.errstate(over="ignore", invalid="ignore"):
            c = float(np.sum(((w * r)[:, None] * vals).ravel()) * (2 * np.pi / n_angular))
        if np.any(np.isnan(vals)):
            c = math.nan
        contributions.append(c)
        trace.append({"k": idx - 1, "r_inner": a, "r_outer": b, "contribution": c})

    config = {"R0": R0, "k_max": k_max, "trigger": trigger, "k0": k0}
    annuli = contributions[1:]
    if any(not math.isfinite(c) for c in contributions):
        return IntegralResult(
            IntegralStatus.DIVERGENT,
            error_estimate=math.inf,
            annulus_trace=trace,
            reason="non-finite annulus contribution",
            details=config,
        )
    tail = annuli[-trigger:]
    if tail[0] > 0 and all(x <= y for x, y in zip(tail, tail[1:])):
        return IntegralResult(
            IntegralStatus.DIVERGENT,
            error_estimate=math.inf,
            annulus_trace=trace,
            reason=f"last {trigger} annuli non-decreasing",
            details=config,
        )
    value = math.fsum(contributions)
    # beyond the last annulus the contributions are assumed to keep shrinking at least
    # as fast as the last observed ratio
    last, prev = annuli[-1], annuli[-2]
    if last == 0:
        error = 0.0
    elif prev > last:
        q = last / prev
        error = last * q / (1 - q)
    else:
        error = math.inf
    return IntegralResult(IntegralStatus.FINITE, value=value, error_estimate=error, annulus_trace=trace, details=config)
