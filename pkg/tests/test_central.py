"""Central machinery: characters, class quadrature, lattice operators on
radial coefficient sequences, central symbol builders."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmult.central import (CentralSequence, central_part, character_inner,
                           character_orbit_product, character_table,
                           class_grid, class_rho_squared, delta2,
                           dimension_sequence, forward_difference,
                           function_of_laplacian, hypoellipticity_ratio,
                           laplace_central, nweiss_delta,
                           orbit_character_sum, orbit_exponential_sum,
                           riesz_symbol, weyl_character, weyl_dimension)
from gmult.errors import GmultError
from gmult.groups import labels_up_to
from gmult.symbols import MatrixSymbol, default_grid, laplace_difference, op_norm


def test_weyl_dimension_values():
    for t in range(8):
        assert weyl_dimension(t) == t + 1
    # signed extension: reflection across the wall flips the sign
    assert weyl_dimension(-1) == 0
    assert weyl_dimension(-2) == -1
    assert weyl_dimension(-5) == -4


def test_character_at_identity():
    angles = np.array([0.0, 1.3])
    for t in (0, 1, 4):
        chi = weyl_character(t, angles)
        assert chi[0] == pytest.approx(t + 1, abs=1e-12)


def test_character_signed_reflection():
    angles = np.linspace(0.1, 6.0, 7)
    for t in (0, 2, 5):
        plus = weyl_character(t, angles)
        minus = weyl_character(-t - 2, angles)
        assert np.allclose(minus, -plus, atol=1e-12)
    assert np.allclose(weyl_character(-1, angles), 0.0, atol=1e-14)


def test_class_measure_normalized():
    grid = class_grid(12)
    assert grid.integrate(np.ones(grid.size)) == pytest.approx(1.0,
                                                               abs=1e-13)
    assert grid.integrate(class_rho_squared(grid.angles)) == pytest.approx(
        3.0, abs=1e-12)


def test_character_inner_orthonormal():
    for ta in range(0, 8):
        for tb in range(0, 8):
            val = character_inner(ta, tb)
            assert val == pytest.approx(1.0 if ta == tb else 0.0, abs=1e-12)


def test_character_inner_signed_pairs():
    # chi_{-t-2} = -chi_t, so mixed pairs integrate to -1
    for t in (0, 1, 3, 6):
        assert character_inner(t, -t - 2) == pytest.approx(-1.0, abs=1e-12)
        assert character_inner(-t - 2, -t - 2) == pytest.approx(1.0,
                                                                abs=1e-12)
    assert character_inner(2, -1) == pytest.approx(0.0, abs=1e-13)


def test_orbit_product_identity():
    angles = np.linspace(0.0, 4 * math.pi, 33)
    for tw in (0, 1, 3):
        for tstar in (0, 2, 5):
            lhs, rhs = character_orbit_product(tw, tstar, angles)
            assert np.allclose(lhs, rhs, atol=1e-10)


def test_orbit_sums():
    angles = np.array([0.0, 0.7, 2.0])
    assert np.allclose(orbit_exponential_sum(0, angles), 1.0)
    assert np.allclose(orbit_exponential_sum(3, angles),
                       2 * np.cos(1.5 * angles), atol=1e-14)
    assert np.allclose(orbit_character_sum(2, angles),
                       weyl_character(2, angles) + weyl_character(-2, angles),
                       atol=1e-14)


def test_character_table_shape():
    angles = np.linspace(0, 2 * math.pi, 9)
    table = character_table(5, angles)
    assert table.shape == (6, 9)
    assert np.allclose(table[0], 1.0)


def test_central_sequence_extension():
    seq = CentralSequence(dimension_sequence(4).model,
                          {0: 1.0, 2: 0.5}, zero_beyond=True)
    assert seq.value(-4) == seq.value(2)  # even reflection through -1
    assert seq.value(6) == 0.0
    strict = CentralSequence(seq.model, {0: 1.0}, zero_beyond=False)
    with pytest.raises(KeyError):
        strict.value(2)


def test_delta2_matches_quadrature_route():
    rng = np.random.default_rng(3)
    vals = {t: complex(v) for t, v in enumerate(rng.standard_normal(9))}
    seq = CentralSequence(dimension_sequence(1).model, vals,
                          zero_beyond=True)
    stencil = delta2(seq)
    quad = laplace_central(seq)
    for t in range(seq.support_band + 3):
        assert stencil.value(t) == pytest.approx(quad.value(t), abs=1e-11)


def test_delta2_matches_grid_laplace():
    rng = np.random.default_rng(4)
    vals = {t: complex(v) for t, v in enumerate(rng.standard_normal(7))}
    seq = CentralSequence(dimension_sequence(1).model, vals,
                          zero_beyond=True)
    sym = seq.as_symbol(8)
    grid_out = laplace_difference(sym, default_grid(seq.model, 12))
    stencil = delta2(seq)
    for t in range(8):
        block = grid_out.get(t)
        assert np.allclose(block, stencil.value(t) * np.eye(t + 1),
                           atol=1e-10)


def test_dimension_sequence_is_harmonic():
    # the signed dimension sequence is annihilated by the one-step
    # lattice difference
    out = nweiss_delta(dimension_sequence(24))
    for t in range(23):
        assert abs(out.value(t)) < 1e-12


def test_nweiss_delta_explicit():
    # on a delta sequence the operator is the centered second difference
    seq = CentralSequence(dimension_sequence(1).model, {4: 1.0},
                          zero_beyond=True)
    out = nweiss_delta(seq)
    assert out.value(4) == pytest.approx(-2.0, abs=1e-12)
    assert out.value(3) == pytest.approx(1.0, abs=1e-12)
    assert out.value(5) == pytest.approx(1.0, abs=1e-12)
    assert abs(out.value(2)) < 1e-12


def test_forward_difference_polynomial_kill():
    t = np.arange(10, dtype=float)
    assert np.allclose(forward_difference(t + 1, 2), 0.0, atol=1e-14)
    assert np.allclose(forward_difference(t ** 2, 3), 0.0, atol=1e-12)


def test_hypoellipticity_report():
    rep = hypoellipticity_ratio(1, 40)
    assert rep["max_ratio"] <= 2.0 + 1e-12
    assert rep["growth"] <= 1.25
    assert rep["poly_bound_constant"] >= 1.0
    with pytest.raises(ValueError):
        hypoellipticity_ratio(0, 40)


def test_central_part_roundtrip(su2):
    seq = CentralSequence(su2, {0: 1.0, 1: 0.5j, 2: -0.25},
                          zero_beyond=True)
    back = central_part(seq.as_symbol(4))
    for t in range(5):
        assert back.value(t) == pytest.approx(seq.value(t), abs=1e-14)


def test_central_part_rejects_noncentral(su2):
    mat = np.eye(3, dtype=complex)
    mat[0, 1] = 0.5
    sym = MatrixSymbol(su2, {2: mat})
    with pytest.raises(GmultError):
        central_part(sym)


def test_riesz_symbol_norms(su2):
    sym = riesz_symbol(su2, (0.0, 0.0, 1.0), 12)
    assert np.allclose(sym.get(0), 0.0)
    for t in labels_up_to(su2, 12):
        assert op_norm(sym.get(t)) <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        riesz_symbol(su2, (0.0, 0.0, 2.0), 6)


def test_riesz_diagonal_closed_form(su2):
    sym = riesz_symbol(su2, (0.0, 0.0, 1.0), 8)
    for t in (1, 2, 5, 8):
        ell = t / 2.0
        mus = np.arange(-t, t + 1, 2)
        want = -1j * (mus / 2.0) / math.sqrt(ell * (ell + 1.0))
        assert np.allclose(np.diag(sym.get(t)), want, atol=1e-12)


def test_function_of_laplacian_eigenvalues(su2):
    seq = function_of_laplacian(lambda lam2: 1.0 / (1.0 + lam2), 10)
    for t in (0, 1, 4, 10):
        lam2 = (t / 2.0) * (t / 2.0 + 1.0)
        assert seq.value(t) == pytest.approx(1.0 / (1.0 + lam2), rel=1e-14)
    ident = function_of_laplacian(lambda lam2: 1.0, 6).as_symbol(6)
    for t in range(7):
        assert np.allclose(ident.get(t), np.eye(t + 1), atol=1e-14)


@settings(max_examples=15)
@given(t=st.integers(min_value=0, max_value=30))
def test_character_l2_normalized_property(t):
    grid = class_grid(2 * t + 4)
    chi = weyl_character(t, grid.angles)
    assert grid.integrate(chi * np.conj(chi)) == pytest.approx(1.0,
                                                               abs=1e-11)
