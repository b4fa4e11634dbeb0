import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from fockvolterra.fock import FockParams
from fockvolterra.operators import OperatorKind, SymbolPair, build_matrix
from fockvolterra.polynomials import ComplexPolynomial as P
from fockvolterra.spectra import (
    SchattenOrder,
    SingularSpectrum,
    Verdict,
    _classify,
    convergence_diagnose,
    schatten_norm,
    schatten_power_sum,
    singular_values,
)

ONE = FockParams(1.0)
Z = P((0, 1))


def test_order_validation():
    assert SchattenOrder(0.5).quasi_norm and not SchattenOrder(1).quasi_norm
    for bad in (0, -1, math.inf, math.nan):
        with pytest.raises(ValueError):
            SchattenOrder(bad)
    with pytest.raises(ValueError):
        schatten_norm(SingularSpectrum([1.0]), 0)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        SingularSpectrum([1.0, 2.0])
    with pytest.raises(ValueError):
        SingularSpectrum([1.0, -0.5])
    assert len(SingularSpectrum([])) == 0


def test_singular_values_examples():
    np.testing.assert_allclose(singular_values(np.diag([1.0, 2.0])).values, [2, 1])
    np.testing.assert_allclose(singular_values(np.array([[0, 1], [1, 0]])).values, [1, 1])
    w = np.array([0.3, -2.0, 1j, 0.7])
    shift = np.zeros((5, 5), dtype=complex)
    for n, x in enumerate(w):
        shift[n + 1, n] = x
    np.testing.assert_allclose(singular_values(shift).values, [2, 1, 0.7, 0.3, 0], atol=1e-15)


def test_schatten_norm_examples():
    S = SingularSpectrum([4.0, 3.0])
    assert schatten_norm(S, 2) == pytest.approx(5)
    assert schatten_norm(S, 1) == pytest.approx(7)
    assert schatten_norm(S, 0.5) == pytest.approx(7 + 4 * math.sqrt(3))
    assert schatten_norm(S, SchattenOrder(2)) == pytest.approx(5)


def test_schatten_norm_overflow_fallback():
    S = SingularSpectrum([1e200, 1e200])
    assert schatten_norm(S, 2) == pytest.approx(math.sqrt(2) * 1e200)


spectra = arrays(float, 50, elements=st.floats(min_value=0, max_value=1e3)).map(lambda v: SingularSpectrum(np.sort(v)[::-1]))


@given(spectra, st.floats(min_value=0.1, max_value=8), st.floats(min_value=0.1, max_value=8))
def test_schatten_monotone_in_p(S, p, q):
    p, q = min(p, q), max(p, q)
    assert schatten_norm(S, p) >= schatten_norm(S, q) * (1 - 1e-12)


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    B = A[rng.permutation(12)][:, rng.permutation(12)]
    np.testing.assert_allclose(singular_values(A).values, singular_values(B).values, atol=1e-12)


@given(st.sampled_from([2.0, 5j, 0.1 - 0.3j]), st.sampled_from([1.0, 2.0, 3.0]))
def test_power_sum_scales_with_symbol(c, p):
    base = schatten_power_sum(singular_values(build_matrix(OperatorKind.IgPsi, SymbolPair(Z, P((0, 0.5))), ONE, 32)), p)
    scaled = schatten_power_sum(singular_values(build_matrix(OperatorKind.IgPsi, SymbolPair(P((0, c)), P((0, 0.5))), ONE, 32)), p)
    assert scaled == pytest.approx(abs(c) ** p * base, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_vz_exactness(alpha):
    N = 128
    sv = singular_values(build_matrix(OperatorKind.Vg, SymbolPair(Z), FockParams(alpha), N)).values
    expected = np.append(1 / np.sqrt(alpha * np.arange(1, N)), 0.0)
    np.testing.assert_allclose(sv, expected, atol=1e-10)


@pytest.mark.parametrize("N", [64, 128, 256])
def test_iz_top_singular_value(N):
    top = singular_values(build_matrix(OperatorKind.Ig, SymbolPair(Z), ONE, N)).values[0]
    assert 0.9 <= top / math.sqrt(N - 1) <= 1.1


def test_diagnose_vz_p4_converges():
    rep = convergence_diagnose(OperatorKind.Vg, SymbolPair(Z), ONE, 4, [64, 128, 256])
    assert rep.verdict is Verdict.CONVERGED
    for N, s in zip(rep.Ns, rep.partial_sums):
        assert s == pytest.approx(math.fsum(n**-2.0 for n in range(1, N)), abs=1e-10)
    assert rep.extrapolated_limit == pytest.approx(math.pi**2 / 6, rel=1e-3)
    assert rep.partial_norms[-1] == pytest.approx(rep.partial_sums[-1] ** 0.25)


def test_diagnose_ig_diverges():
    rep = convergence_diagnose(OperatorKind.Ig, SymbolPair(Z), ONE, 2, [32, 64, 128, 256])
    assert rep.verdict is Verdict.DIVERGING
    assert rep.slope > 0.05
    assert rep.partial_sums == sorted(rep.partial_sums)


def test_diagnose_zero_operator():
    rep = convergence_diagnose(OperatorKind.CgPsi, SymbolPair(P(), Z), ONE, 2, [4, 8, 16])
    assert rep.verdict is Verdict.CONVERGED
    assert rep.partial_sums == [0.0, 0.0, 0.0]
    assert rep.extrapolated_limit == 0.0


def test_diagnose_validates_sizes():
    with pytest.raises(ValueError):
        convergence_diagnose(OperatorKind.Vg, SymbolPair(Z), ONE, 2, [8, 16])
    with pytest.raises(ValueError):
        convergence_diagnose(OperatorKind.Vg, SymbolPair(Z), ONE, 2, [8, 16, 16])


def test_report_records_thresholds_and_serialises():
    rep = convergence_diagnose(OperatorKind.Vg, SymbolPair(Z), ONE, 2, [8, 16, 32], plateau=1e-6, slope_threshold=0.1)
    d = rep.to_dict()
    assert d["thresholds"] == {"plateau": 1e-6, "slope": 0.1, "decay": 0.25}
    assert d["verdict"] in {v.value for v in Verdict}
    assert "spectra" not in d


def _logs(sums):
    return [math.log(s) for s in sums]


def test_classify_plateau():
    verdict, rule, *_ = _classify([8, 16, 32], _logs([1.0, 1.5, 1.5 * (1 + 1e-10)]), 1e-8, 0.05, 0.25)
    assert verdict is Verdict.CONVERGED and "plateau" in rule


def test_classify_power_law_tail():
    # S_N = 2 - 1/N: increments decay like N^-1
    Ns = [64, 128, 256]
    verdict, rule, slope, decay, limit = _classify(Ns, _logs([2 - 1 / n for n in Ns]), 1e-8, 0.05, 0.25)
    assert verdict is Verdict.CONVERGED and "decay" in rule
    assert decay == pytest.approx(1.0, rel=1e-6)
    assert limit == pytest.approx(2.0, rel=1e-9)


def test_classify_logarithmic_growth_diverges():
    Ns = [64, 128, 256]
    verdict, rule, slope, decay, limit = _classify(Ns, _logs([math.log(n) for n in Ns]), 1e-8, 0.05, 0.25)
    assert verdict is Verdict.DIVERGING
    assert abs(decay) < 0.25


def test_classify_inconclusive():
    # slow growth below the slope threshold and too slow a decay
    Ns = [64, 128, 256]
    sums = [100 + math.log(n) for n in Ns]
    verdict, *_ = _classify(Ns, _logs(sums), 1e-8, 0.05, 0.25)
    assert verdict is Verdict.INCONCLUSIVE


def test_classify_is_deterministic():
    Ns = [32, 64, 128]
    logs = _logs([1.0, 1.2, 1.25])
    assert _classify(Ns, logs, 1e-8, 0.05, 0.25) == _classify(Ns, logs, 1e-8, 0.05, 0.25)
