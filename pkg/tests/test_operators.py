import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fockvolterra.fock import FockParams, expand_in_basis
from fockvolterra.operators import (
    GridTooCoarseError,
    MissingSymbolError,
    OperatorKind,
    SymbolPair,
    apply_operator,
    build_matrix,
    build_matrix_quadrature,
    shift_weights_oracle,
)
from fockvolterra.polynomials import ComplexPolynomial as P, poly_eval
from fockvolterra.quadrature import build_grid

from strategies import polynomials

ONE = FockParams(1.0)
Z = P((0, 1))
HALF_Z = P((0, 0.5))
INTEGRAL_KINDS = [k for k in OperatorKind if k.is_integral]


def test_kind_flags_and_parse():
    assert not OperatorKind.Vg.requires_psi and OperatorKind.CgUpperPsi.requires_psi
    assert not OperatorKind.Mg.is_integral
    assert OperatorKind.parse("igpsi") is OperatorKind.IgPsi
    with pytest.raises(ValueError):
        OperatorKind.parse("Tg")


def test_apply_examples():
    assert apply_operator(OperatorKind.Ig, SymbolPair(P()), ONE, P((1, 2, 3))) == P()
    pair = SymbolPair(Z, HALF_Z)
    got = apply_operator(OperatorKind.IgPsi, pair, ONE, P((0, 0, 1)))
    assert np.allclose(got.as_array(), [0, 0, 0, 1 / 3], atol=1e-16)
    got = apply_operator(OperatorKind.CgPsi, pair, ONE, P((0, 0, 1)))
    assert np.allclose(got.as_array(), [0, 0, 0, 1 / 12], atol=1e-16)
    assert apply_operator(OperatorKind.Mg, SymbolPair(Z), ONE, Z) == P((0, 0, 1))


def test_remaining_kinds_against_hand_calculation():
    g, psi, f = P((1, 1)), P((0, 2)), P((0, 0, 1))
    # V_g f = int_0^z w^2 dw
    assert np.allclose(apply_operator(OperatorKind.Vg, SymbolPair(g), ONE, f).as_array(), [0, 0, 0, 1 / 3])
    # V_g^psi f = int_0^z (2w)^2 dw = 4 z^3 / 3
    assert np.allclose(apply_operator(OperatorKind.VgUpperPsi, SymbolPair(g, psi), ONE, f).as_array(), [0, 0, 0, 4 / 3])
    # C_g^psi f = (z^3/3) o 2z = 8 z^3 / 3
    assert np.allclose(apply_operator(OperatorKind.CgUpperPsi, SymbolPair(g, psi), ONE, f).as_array(), [0, 0, 0, 8 / 3])


@pytest.mark.parametrize("kind", [k for k in OperatorKind if k.requires_psi])
def test_missing_psi(kind):
    with pytest.raises(MissingSymbolError):
        apply_operator(kind, SymbolPair(Z), ONE, Z)
    with pytest.raises(MissingSymbolError):
        build_matrix(kind, SymbolPair(Z), ONE, 4)


@given(polynomials(5), polynomials(4), polynomials(1), st.sampled_from(INTEGRAL_KINDS))
def test_integral_kinds_vanish_at_zero_when_psi_fixes_zero(f, g, psi, kind):
    # with psi(0) = 0 every integral kind maps into functions vanishing at 0
    psi = P((0,) + psi.coeffs[1:2]) if psi.coeffs else P()
    image = apply_operator(kind, SymbolPair(g, psi), ONE, f)
    assert abs(poly_eval(image, 0)) <= 1e-12 * max(1.0, max((abs(c) for c in image.coeffs), default=0))


def test_vg_plus_ig_is_mg_minus_constant():
    g = P((1, 2j, -1))
    for f in (P((3, 1)), P((0, 0, 1j)), P((2,))):
        pair = SymbolPair(g)
        lhs = apply_operator(OperatorKind.Vg, pair, ONE, f) + apply_operator(OperatorKind.Ig, pair, ONE, f)
        rhs = apply_operator(OperatorKind.Mg, pair, ONE, f) - poly_eval(f, 0) * poly_eval(g, 0)
        assert np.allclose((lhs - rhs).as_array(), 0, atol=1e-14)


def test_build_matrix_examples():
    M = build_matrix(OperatorKind.IgPsi, SymbolPair(Z, HALF_Z), ONE, 4).matrix
    assert M[2, 1] == pytest.approx(0.5 * math.sqrt(2))
    assert M[3, 2] == pytest.approx(math.sqrt(3) / 3)
    assert np.all(M[:, 0] == 0)
    M = build_matrix(OperatorKind.Vg, SymbolPair(Z), ONE, 3).matrix
    assert M[1, 0] == pytest.approx(1) and M[2, 1] == pytest.approx(1 / math.sqrt(2))
    for kind in OperatorKind:
        assert not np.any(build_matrix(kind, SymbolPair(P(), Z), ONE, 5).matrix)


def test_build_matrix_rejects_tiny_truncation():
    with pytest.raises(ValueError):
        build_matrix(OperatorKind.Mg, SymbolPair(Z), ONE, 1)


@pytest.mark.parametrize("kind", list(OperatorKind))
def test_columns_match_basis_expansion(kind):
    params = FockParams(1.7)
    pair = SymbolPair(P((0.5, -1, 0.25j)), P((0.1, 0.6j)))
    N = 12
    T = build_matrix(kind, pair, params, N)
    for n in range(N):
        e_n = P.monomial(n, math.exp(0.5 * (n * math.log(params.alpha) - math.lgamma(n + 1))))
        image = apply_operator(kind, pair, params, e_n)
        if (image.degree() or 0) < N:
            np.testing.assert_allclose(T.matrix[:, n], expand_in_basis(image, params, N).entries, rtol=1e-12, atol=1e-14)
            assert T.leakage[n] == 0
        else:
            assert T.leakage[n] > 0


def test_leakage_flags_columns():
    T = build_matrix(OperatorKind.Mg, SymbolPair(Z), ONE, 8)
    assert T.leaky_columns == [7]
    assert T.leak_flag
    T = build_matrix(OperatorKind.IgPsi, SymbolPair(P((1, 1e-9)), HALF_Z), ONE, 8)
    # the dropped coefficient is of relative size well below the flag threshold
    assert 0 < T.leakage[7] < 1e-6 and not T.leak_flag


def test_leakage_survives_huge_images():
    T = build_matrix(OperatorKind.CgPsi, SymbolPair(Z, P((0, 0, 2))), ONE, 40)
    assert np.all(np.isfinite(T.leakage))


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("a", [0.3, 0.5, 0.5j])
def test_shift_structure(k, a):
    N = 64
    c = 1.5 - 0.5j
    M = build_matrix(OperatorKind.IgPsi, SymbolPair(P.monomial(k, c), P((0, a))), ONE, N).matrix
    for n in range(N):
        nz = np.flatnonzero(M[:, n])
        if n == 0 or n + k >= N:
            assert nz.size == 0
            continue
        assert list(nz) == [n + k]
        sigma = shift_weights_oracle(k, c, a, ONE, n)
        assert abs(M[n + k, n]) == pytest.approx(sigma, rel=1e-10)


def test_shift_oracle_examples():
    assert shift_weights_oracle(1, 1, 1, ONE, 1) == pytest.approx(math.sqrt(2) / 2)
    assert shift_weights_oracle(3, 0, 0.5, ONE, 4) == 0
    assert shift_weights_oracle(1, 1, 0.5, ONE, 3) == pytest.approx(0.375)
    assert shift_weights_oracle(2, 1, 0.5, ONE, 0) == 0
    with pytest.raises(ValueError):
        shift_weights_oracle(-1, 1, 1, ONE, 1)


def test_algebraic_identity_block():
    N = 32
    pair = SymbolPair(P((1, 1)))
    V, I, M = (build_matrix(k, pair, ONE, N).matrix for k in (OperatorKind.Vg, OperatorKind.Ig, OperatorKind.Mg))
    E = np.zeros((N, N))
    E[0, 0] = 1
    block = slice(0, N - 1)
    diff = (V + I - (M - E))[block, block]
    assert np.max(np.abs(diff)) <= 1e-12


@pytest.mark.parametrize("kind", INTEGRAL_KINDS)
def test_zero_row_for_integral_kinds(kind):
    # psi(0) = 0 fixtures; for psi(0) != 0 the composed kinds need not vanish at 0
    M = build_matrix(kind, SymbolPair(P((2, -1, 0.5j)), P((0, 0.4 + 0.2j))), ONE, 10).matrix
    assert np.all(M[0, :] == 0)


def test_quadrature_path_examples():
    pair = SymbolPair(Z, HALF_Z)
    A = build_matrix(OperatorKind.IgPsi, pair, ONE, 8).matrix
    B = build_matrix_quadrature(OperatorKind.IgPsi, pair, ONE, 8).matrix
    assert np.max(np.abs(A - B)) <= 1e-9
    Zm = build_matrix_quadrature(OperatorKind.CgPsi, SymbolPair(P(), Z), ONE, 6).matrix
    assert np.max(np.abs(Zm)) <= 1e-14
    Id = build_matrix_quadrature(OperatorKind.Mg, SymbolPair(P((1,))), ONE, 8).matrix
    assert np.max(np.abs(Id - np.eye(8))) <= 1e-10


@pytest.mark.parametrize(
    "kind, g, psi",
    [
        ("Vg", "0,0,0,0,1", None),
        ("Ig", "1,-2,0.5i", None),
        ("Mg", "1i,0,0,1", None),
        ("IgPsi", "0,1,1", "0.2,0.5i"),
        ("CgPsi", "1,0,0,0,1", "0,0.5"),
        ("VgUpperPsi", "0,1,0,1", "0.1,0.3"),
        ("CgUpperPsi", "0,0,1", "0.3i,0.4"),
    ],
)
def test_quadrature_path_agrees(kind, g, psi):
    params = FockParams(1.3)
    pair = SymbolPair(g, psi)
    A = build_matrix(kind, pair, params, 16).matrix
    B = build_matrix_quadrature(kind, pair, params, 16, tol=1e-8).matrix
    assert np.max(np.abs(A - B)) <= 1e-8


def test_quadrature_path_rejects_coarse_grid():
    pair = SymbolPair(Z, HALF_Z)
    with pytest.raises(GridTooCoarseError):
        build_matrix_quadrature(OperatorKind.IgPsi, pair, ONE, 8, grid=build_grid(1.0, 1e-10, n_angular=8))
    with pytest.raises(GridTooCoarseError):
        build_matrix_quadrature(OperatorKind.IgPsi, pair, ONE, 8, grid=build_grid(1.0, 1e-2, degree_hint=16))
    with pytest.raises(GridTooCoarseError):
        build_matrix_quadrature(OperatorKind.IgPsi, pair, ONE, 8, grid=build_grid(2.0, 1e-10, degree_hint=16))


def test_quadrature_path_reports_cancellation():
    # images of degree ~45 cancel catastrophically against the weight in double precision
    with pytest.raises(GridTooCoarseError, match="cancellation"):
        build_matrix_quadrature(OperatorKind.CgUpperPsi, SymbolPair(Z, P((0, 0, 0, 0.3))), ONE, 16, tol=1e-8)
