"""Singular values, Schatten p-norms and finite-N membership diagnostics."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .fock import FockParams
from .operators import OperatorKind, SymbolPair, TruncatedOperator, build_matrix

__all__ = [
    "SchattenOrder",
    "SingularSpectrum",
    "Verdict",
    "ConvergenceReport",
    "singular_values",
    "schatten_norm",
    "schatten_power_sum",
    "convergence_diagnose",
    "DEFAULT_PLATEAU",
    "DEFAULT_SLOPE",
    "DEFAULT_DECAY",
]

DEFAULT_PLATEAU = 1e-8
DEFAULT_SLOPE = 0.05
DEFAULT_DECAY = 0.25


@dataclass(frozen=True)
class SchattenOrder:
    p: float

    def __post_init__(self):
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ValueError(f"Schatten exponent must be positive and finite, got {self.p!r}")

    @property
    def quasi_norm(self) -> bool:
        return self.p < 1


@dataclass(frozen=True)
class SingularSpectrum:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size and (np.any(v < 0) or np.any(np.diff(v) > 0)):
            raise ValueError("singular values must be nonnegative and nonincreasing")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


def _as_order(order) -> SchattenOrder:
    return order if isinstance(order, SchattenOrder) else SchattenOrder(float(order))


def singular_values(T: TruncatedOperator | np.ndarray) -> SingularSpectrum:
    matrix = T.matrix if isinstance(T, TruncatedOperator) else np.asarray(T)
    sv = np.linalg.svd(matrix, compute_uv=False)
    return SingularSpectrum(np.sort(sv)[::-1])


def _log_power_sum(S: SingularSpectrum, p: float) -> float:
    v = S.values[S.values > 0]
    if v.size == 0:
        return -math.inf
    return float(logsumexp(p * np.log(v)))


def schatten_power_sum(S: SingularSpectrum, order) -> float:
    """sum_n lambda_n^p, accumulated with ``math.fsum``."""
    p = _as_order(order).p
    try:
        return math.fsum(float(x) ** p for x in S.values)
    except OverflowError:
        return math.inf


def schatten_norm(S: SingularSpectrum, order) -> float:
    p = _as_order(order).p
    total = schatten_power_sum(S, p)
    if math.isinf(total):
        return math.exp(_log_power_sum(S, p) / p)
    return total ** (1.0 / p)


class Verdict(str, enum.Enum):
    CONVERGED = "Converged"
    DIVERGING = "Diverging"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ConvergenceReport:
    """Partial Schatten sums across truncation sizes, with the verdict.

    ``slope`` is the least-squares growth rate of log(partial sum) against
    log N over the last three sizes; ``decay_exponent`` is the rate at which
    the increments per unit log N shrink over the same sizes (positive for
    a power-law convergent tail, about zero for logarithmic growth).
    """

    Ns: list[int]
    p: float
    partial_sums: list[float]
    partial_norms: list[float]
    slope: float
    decay_exponent: float | None
    extrapolated_limit: float | None
    verdict: Verdict
    rule: str
    thresholds: dict = field(default_factory=dict)
    leaky_columns: list[int] = field(default_factory=list)
    spectra: list[np.ndarray] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("spectra")
        d["verdict"] = self.verdict.value
        return d


def _increments(logs: Sequence[float]) -> list[float]:
    # log(S_k - S_{k-1}); nan when the increment is not positive
    out = []
    for a, b in zip(logs, logs[1:]):
        if b == -math.inf or b <= a:
            out.append(math.nan)
        elif a == -math.inf:
            out.append(b)
        else:
            out.append(b + math.log(-math.expm1(a - b)))
    return out


_MAX_EXPONENT = 40.0


def _power_law_exponent(a: float, b: float, log_ratio: float) -> float:
    """s with log h(s) = log_ratio, h(s) = (e^{sa} - 1) / (1 - e^{-sb}).

    h is the ratio of consecutive increments of L - C N^-s over steps
    log N2/N1 = a and log N3/N2 = b; it is increasing in s and equals a/b
    at s = 0. The root is clamped to +-_MAX_EXPONENT.
    """

    def f(s: float) -> float:
        if abs(s) < 1e-9:
            return math.log(a / b) + 0.5 * s * (a + b) - log_ratio
        return math.log(math.expm1(s * a) / -math.expm1(-s * b)) - log_ratio

    lo, hi = -_MAX_EXPONENT, _MAX_EXPONENT
    if f(lo) >= 0:
        return lo
    if f(hi) <= 0:
        return hi
    return float(brentq(f, lo, hi, xtol=1e-13))


def _classify(
    Ns: Sequence[int],
    logs: Sequence[float],
    plateau: float,
    slope_threshold: float,
    decay_threshold: float,
) -> tuple[Verdict, str, float, float | None, float | None]:
    logN = np.log(np.asarray(Ns[-3:], dtype=float))
    tail = np.asarray(logs[-3:])
    if np.all(tail == -math.inf):
        return Verdict.CONVERGED, "zero operator", 0.0, None, 0.0
    if np.any(tail == -math.inf):
        slope = math.inf
    else:
        slope = float(np.polyfit(logN, tail, 1)[0])

    last = logs[-1]
    prev = logs[-2]
    rel_step = -math.expm1(prev - last) if prev > -math.inf else 1.0
    if abs(rel_step) < plateau:
        return Verdict.CONVERGED, f"relative step {abs(rel_step):.3g} < plateau", slope, None, math.exp(last)

    inc = _increments(logs[-3:])
    decay = None
    extrapolated = None
    if not any(math.isnan(x) for x in inc):
        n1, n2, n3 = (float(n) for n in Ns[-3:])
        decay = _power_law_exponent(math.log(n2 / n1), math.log(n3 / n2), inc[0] - inc[1])
        if decay > decay_threshold:
            # S_N = L - C N^-s through the last three points; the tail past N_last is D_2 / (e^{s b} - 1)
            tail = math.exp(inc[1]) / math.expm1(decay * math.log(n3 / n2))
            extrapolated = math.exp(last) + tail
            return Verdict.CONVERGED, f"decay exponent {decay:.3g} > {decay_threshold}", slope, decay, extrapolated
    if slope > slope_threshold:
        return Verdict.DIVERGING, f"growth slope {slope:.3g} > {slope_threshold}", slope, decay, math.inf
    return Verdict.INCONCLUSIVE, "no rule fired", slope, decay, None


def convergence_diagnose(
    kind: OperatorKind,
    pair: SymbolPair,
    params: FockParams,
    order,
    Ns: Sequence[int],
    plateau: float = DEFAULT_PLATEAU,
    slope_threshold: float = DEFAULT_SLOPE,
    decay_threshold: float = DEFAULT_DECAY,
) -> ConvergenceReport:
    """Probe Schatten membership from truncations of increasing size.

    Rules, applied in order:

    1. Converged if the last relative step of the p-th power sums is below
       ``plateau`` (this includes the zero operator).
    2. Converged if the increments per unit log N decay with exponent above
       ``decay_threshold`` (power-law convergent tail); the extrapolated
       limit is recorded.
    3. Diverging if the log-log growth slope over the last three sizes
       exceeds ``slope_threshold``.
    4. Otherwise Inconclusive.
    """
    p = _as_order(order).p
    Ns = [int(n) for n in Ns]
    if len(Ns) < 3:
        raise ValueError("need at least three truncation sizes")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("truncation sizes must be strictly increasing")
    logs, spectra, leaky = [], [], []
    for N in Ns:
        T = build_matrix(kind, pair, params, N)
        S = singular_values(T)
        spectra.append(S.values)
        logs.append(_log_power_sum(S, p))
        leaky.append(len(T.leaky_columns))
    verdict, rule, slope, decay, extrapolated = _classify(Ns, logs, plateau, slope_threshold, decay_threshold)
    sums = [math.fsum(float(x) ** p for x in v) if lg > -math.inf else 0.0 for v, lg in zip(spectra, logs)]
    norms = [math.exp(lg / p) if lg > -math.inf else 0.0 for lg in logs]
    return ConvergenceReport(
        Ns=Ns,
        p=p,
        partial_sums=sums,
        partial_norms=norms,
        slope=slope,
        decay_exponent=decay,
        extrapolated_limit=extrapolated,
        verdict=verdict,
        rule=rule,
        thresholds={"plateau": plateau, "slope": slope_threshold, "decay": decay_threshold},
        leaky_columns=leaky,
        spectra=spectra,
    )
