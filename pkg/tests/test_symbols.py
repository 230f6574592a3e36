"""Symbol algebra and difference calculus: product rules, certificates,
operator quantization."""
import numpy as np
import pytest

from gmult.errors import BandOverflowError
from gmult.groups import irrep_dimension, labels_up_to
from gmult.symbols import (DifferenceWord, MatrixSymbol, apply_difference,
                           default_grid, difference_generators,
                           generator_words, identity_symbol,
                           laplace_decomposition_residual, laplace_difference,
                           laplace_leibniz_residual, leibniz_residual,
                           op_norm, quantize_apply, seminorm, symbol_add,
                           symbol_product, symbol_scale, vector_field_symbol)
from gmult.transform import fourier_forward, fourier_inverse
from conftest import random_symbol


def test_symbol_algebra(su2, rng):
    a = random_symbol(su2, 4, rng, exact=4)
    b = random_symbol(su2, 4, rng, exact=6)
    s = symbol_add(a, b, beta=-2.0)
    for t in labels_up_to(su2, 4):
        assert np.allclose(s.get(t), a.get(t) - 2.0 * b.get(t))
    assert s.exact_band == 4
    p = symbol_product(a, b)
    assert np.allclose(p.get(3), a.get(3) @ b.get(3))
    assert symbol_scale(a, 1j).get(2) == pytest.approx(1j * a.get(2))


def test_identity_symbol_and_op_norm(su2):
    ident = identity_symbol(su2, 5)
    for t in labels_up_to(su2, 5):
        assert op_norm(ident.get(t)) == pytest.approx(1.0, abs=1e-14)


def test_generator_inventory(su2, torus3):
    gens = difference_generators(su2)
    assert len(gens) == 9  # one 3x3 first-shell coefficient block
    assert all(w.order == 1 for w in gens)
    assert len(difference_generators(torus3)) == 6
    # order-2 words are unordered generator multisets: 9 * 10 / 2
    assert len(generator_words(su2, 2)) == 45


def test_torus_difference_shift(torus3):
    # on the torus the difference of a lattice delta telescopes exactly
    k = (2, 0, -1)
    sym = MatrixSymbol(torus3, {k: np.array([[1.0]], dtype=complex)})
    word = DifferenceWord(torus3, (((1, 0, 0), 0, 0),))
    out = apply_difference(word, sym)
    moved = (3, 0, -1)
    assert out.scalar(moved) == pytest.approx(1.0)
    assert out.scalar(k) == pytest.approx(-1.0)


def test_difference_of_identity_vanishes(torus3, su2, rng):
    # the identity symbol is the transform of the delta kernel; every
    # first difference annihilates it
    word_t = DifferenceWord(torus3, (((0, 1, 0), 0, 0),))
    ident_t = MatrixSymbol(
        torus3, {lb: np.ones((1, 1), dtype=complex)
                 for lb in labels_up_to(torus3, 3)}, exact_band=3)
    out = apply_difference(word_t, ident_t)
    for lb in labels_up_to(torus3, 2):
        assert abs(out.scalar(lb)) < 1e-13

    ident_s = identity_symbol(su2, 8)
    word_s = DifferenceWord(su2, ((2, 0, 1),))
    out_s = apply_difference(word_s, ident_s, default_grid(su2, 12))
    for t in labels_up_to(su2, 6):
        assert np.max(np.abs(out_s.get(t))) < 1e-11


def test_difference_certificate_drops(su2, rng):
    sym = random_symbol(su2, 6, rng, exact=6)
    word = DifferenceWord(su2, ((2, 1, 1),))
    out = apply_difference(word, sym, default_grid(su2, 10))
    assert out.exact_band <= 4
    two = DifferenceWord(su2, ((2, 0, 0), (2, 1, 2)))
    assert apply_difference(two, sym, default_grid(su2, 12)).exact_band <= 2


def test_leibniz_rule_small(su2, rng):
    grid = default_grid(su2, 8)
    words = [DifferenceWord(su2, ((2, i, j),)) for i in range(3)
             for j in range(3)]
    for _ in range(3):
        a = random_symbol(su2, 4, rng)
        b = random_symbol(su2, 4, rng)
        for w in words:
            assert leibniz_residual(w, a, b, grid) < 1e-10


def test_laplace_product_rule(su2, rng):
    grid = default_grid(su2, 8)
    a = random_symbol(su2, 4, rng)
    b = random_symbol(su2, 4, rng)
    assert laplace_leibniz_residual(a, b, grid) < 1e-10


def test_laplace_decomposition(su2, rng):
    # the distance-squared operator equals its first-shell word expansion
    sym = random_symbol(su2, 5, rng)
    assert laplace_decomposition_residual(sym, default_grid(su2, 9)) < 1e-10


def test_laplace_on_characters(su2):
    # on a central delta at label t the operator acts through the
    # dimension-weighted second difference; label 0 sees the
    # heat-kernel-style eigenvalue of the first shell
    sym = MatrixSymbol(su2, {0: np.array([[1.0]], dtype=complex)},
                       exact_band=0)
    out = laplace_difference(sym, default_grid(su2, 6))
    # rho^2 = 3 - chi_2, so the transform lives on labels 0 and 2 only:
    # mean 3 at label 0 and -(1/3) I on the first shell
    assert out.get(0)[0, 0] == pytest.approx(3.0, abs=1e-11)
    assert np.max(np.abs(out.get(1))) < 1e-11
    assert np.allclose(out.get(2), -np.eye(3) / 3.0, atol=1e-11)
    assert np.max(np.abs(out.get(4))) < 1e-11


def test_quantize_identity(su2, rng):
    grid = default_grid(su2, 6)
    f = fourier_inverse(random_symbol(su2, 4, rng), grid)
    out = quantize_apply(identity_symbol(su2, 6), f)
    assert np.allclose(out.samples, f.samples, atol=1e-11)


def test_quantize_projector(su2, rng):
    # a symbol supported on one label projects onto that isotypic block
    grid = default_grid(su2, 6)
    sym = random_symbol(su2, 4, rng)
    f = fourier_inverse(sym, grid)
    d = irrep_dimension(su2, 3)
    proj = MatrixSymbol(su2, {3: np.eye(d, dtype=complex)}, exact_band=6)
    out = fourier_forward(quantize_apply(proj, f), band=4)
    assert np.allclose(out.get(3), sym.get(3), atol=1e-11)
    for t in (0, 1, 2, 4):
        assert np.max(np.abs(out.get(t))) < 1e-11


def test_vector_field_symbol_diagonal(su2):
    sym = vector_field_symbol(su2, (0.0, 0.0, 1.0), 8)
    for t in labels_up_to(su2, 6):
        mat = sym.get(t)
        off = mat - np.diag(np.diag(mat))
        assert np.max(np.abs(off)) < 1e-10
        mus = np.arange(-t, t + 1, 2)
        assert np.allclose(np.diag(mat), -1j * mus / 2.0, atol=1e-10)


def test_seminorm_identity(su2):
    ident = identity_symbol(su2, 12)
    labels = list(labels_up_to(su2, 6))
    val = seminorm(ident, 0, 0.0, labels)
    assert val == pytest.approx(1.0, abs=1e-12)


def test_band_guard(su2, rng):
    sym = random_symbol(su2, 6, rng, exact=6)
    small = default_grid(su2, 2)
    with pytest.raises(BandOverflowError):
        fourier_inverse(sym, small)
