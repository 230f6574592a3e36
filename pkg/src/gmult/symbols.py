"""Matrix symbols, quantization, difference operators, and seminorms.

A left-invariant operator is stored through its matrix symbol: one complex
``(d, d)`` block per representation label.  Difference operators act by the
defining recipe "inverse transform, multiply by a coefficient function
vanishing at the identity, forward transform"; on the torus the same
operators also have an exact lattice-shift route, and agreement of the two
routes is part of the test suite.

Band bookkeeping: ``MatrixSymbol.exact_band`` records through which label
band the stored entries faithfully represent the (possibly infinite) symbol
being approximated.  ``math.inf`` means the symbol *is* the stored finitely
supported object.  Every operation derates this certificate: a difference
word whose factors have total band ``w`` lowers it by ``w``, because entries
within ``w`` of a truncation edge feel the missing tail.  Checkers only ever
read labels inside the certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BandOverflowError
from .grids import GroupFunction, GroupGrid, build_grid, rho_squared_samples
from .groups import (GroupModel, IrrepLabel, irrep_dimension, label_band,
                     su2_exp_point, validate_label, wigner_matrix)

_GRID_CACHE: Dict[Tuple[str, int, int], GroupGrid] = {}


def default_grid(model: GroupModel, band: int) -> GroupGrid:
    """Shared grid cache; grids carry memoized representation tables."""
    key = (model.kind, model.n, int(band))
    if key not in _GRID_CACHE:
        _GRID_CACHE[key] = build_grid(model, band)
    return _GRID_CACHE[key]


@dataclass
class MatrixSymbol:
    """Finitely many stored blocks of a matrix symbol.

    ``entries`` maps labels to ``(d, d)`` complex arrays (``(1, 1)`` on the
    torus).  See the module docstring for the meaning of ``exact_band``.
    """

    model: GroupModel
    entries: Dict[IrrepLabel, np.ndarray] = field(default_factory=dict)
    exact_band: float = math.inf

    def __post_init__(self) -> None:
        fixed = {}
        for label, mat in self.entries.items():
            label = validate_label(self.model, label)
            d = irrep_dimension(self.model, label)
            mat = np.asarray(mat, dtype=complex)
            if mat.shape == () and d == 1:
                mat = mat.reshape(1, 1)
            if mat.shape != (d, d):
                raise ValueError(f"block for label {label} must have shape {(d, d)}")
            fixed[label] = mat
        self.entries = fixed

    @property
    def support_band(self) -> int:
        if not self.entries:
            return 0
        return max(label_band(self.model, lb) for lb in self.entries)

    def labels(self) -> List[IrrepLabel]:
        return sorted(self.entries.keys(), key=_label_sort_key)

    def get(self, label: IrrepLabel) -> np.ndarray:
        """Stored block, or a zero block if the label is absent."""
        label = validate_label(self.model, label)
        if label in self.entries:
            return self.entries[label]
        d = irrep_dimension(self.model, label)
        return np.zeros((d, d), dtype=complex)

    def scalar(self, label: IrrepLabel) -> complex:
        """Convenience accessor for one-dimensional (torus) blocks."""
        mat = self.get(label)
        if mat.shape != (1, 1):
            raise ValueError("scalar() requires a one-dimensional block")
        return complex(mat[0, 0])

    def restrict(self, band: int) -> "MatrixSymbol":
        kept = {lb: m.copy() for lb, m in self.entries.items()
                if label_band(self.model, lb) <= band}
        return MatrixSymbol(self.model, kept, min(self.exact_band, band))

    def exact_labels(self, band: Optional[int] = None) -> List[IrrepLabel]:
        """Stored labels within the exactness certificate (and within band)."""
        cap = self.exact_band if band is None else min(self.exact_band, band)
        return [lb for lb in self.labels() if label_band(self.model, lb) <= cap]


def _label_sort_key(label):
    return (label,) if isinstance(label, int) else tuple(label)


def symbol_add(a: MatrixSymbol, b: MatrixSymbol, beta: complex = 1.0) -> MatrixSymbol:
    """Entrywise ``a + beta * b`` on the union of supports."""
    if a.model != b.model:
        raise ValueError("symbols live on different models")
    out = {lb: m.copy() for lb, m in a.entries.items()}
    for lb, m in b.entries.items():
        out[lb] = out.get(lb, 0.0) + beta * m
    return MatrixSymbol(a.model, out, min(a.exact_band, b.exact_band))


def symbol_product(a: MatrixSymbol, b: MatrixSymbol) -> MatrixSymbol:
    """Pointwise matrix product ``a(xi) b(xi)``, the symbol of the composition."""
    if a.model != b.model:
        raise ValueError("symbols live on different models")
    out = {lb: a.entries[lb] @ b.entries[lb] for lb in a.entries if lb in b.entries}
    return MatrixSymbol(a.model, out, min(a.exact_band, b.exact_band))


def symbol_scale(a: MatrixSymbol, factor: complex) -> MatrixSymbol:
    return MatrixSymbol(a.model, {lb: factor * m for lb, m in a.entries.items()},
                        a.exact_band)


def identity_symbol(model: GroupModel, band: int) -> MatrixSymbol:
    from .groups import labels_up_to

    entries = {lb: np.eye(irrep_dimension(model, lb), dtype=complex)
               for lb in labels_up_to(model, band)}
    return MatrixSymbol(model, entries, exact_band=band)


def op_norm(mat: np.ndarray) -> float:
    """Largest singular value (the operator norm used throughout)."""
    mat = np.atleast_2d(np.asarray(mat))
    if mat.shape == (1, 1):
        return abs(complex(mat[0, 0]))
    return float(np.linalg.norm(mat, 2))


# ---------------------------------------------------------------------------
# Quantization
# ---------------------------------------------------------------------------

def symbol_to_kernel(sym: MatrixSymbol, grid: GroupGrid) -> GroupFunction:
    """Right-convolution kernel of the operator: the inverse transform of the
    symbol, ``sum_xi d_xi trace(xi(g) sigma(xi))``."""
    from . import transform

    return transform.fourier_inverse(sym, grid)


def quantize_apply(sym: MatrixSymbol, f: GroupFunction) -> GroupFunction:
    """Apply the operator with the given symbol to a sampled function.

    Computes ``sum_xi d_xi trace(xi(g) sigma(xi) fhat(xi))`` over the stored
    labels of the symbol; frequencies outside the stored support are
    annihilated (the operator is the quantization of the stored object).
    """
    from . import transform

    grid = f.grid
    labels = [lb for lb in sym.entries
              if label_band(grid.model, lb) <= grid.max_label_band]
    if f.declared_band is not None:
        labels = [lb for lb in labels
                  if label_band(grid.model, lb) <= f.declared_band]
    coeffs = transform.fourier_forward(f, labels=labels)
    prod = MatrixSymbol(grid.model,
                        {lb: sym.entries[lb] @ coeffs.entries[lb] for lb in labels},
                        exact_band=coeffs.exact_band)
    return transform.fourier_inverse(prod, grid)


def convolve_oracle(f: GroupFunction, sym: MatrixSymbol) -> np.ndarray:
    """Independent group-convolution oracle for :func:`quantize_apply`.

    Evaluates ``(f * kernel)(g) = integral f(h) kernel(h^{-1} g) dh`` by the
    double quadrature sum, with the kernel evaluated pointwise through its
    matrix-coefficient series.  Quadratic in the node count; test-scale only.
    """
    grid = f.grid
    out = np.zeros(grid.node_count, dtype=complex)
    w = grid.weights
    if grid.model.kind == "torus":
        shape = grid.shape
        F = f.samples.reshape(shape)
        K = symbol_to_kernel(sym, grid).samples.reshape(shape)
        for shift in np.ndindex(*shape):
            # kernel evaluated at g - h over the lattice via np.roll
            rolled = K
            for ax, s in enumerate(shift):
                rolled = np.roll(rolled, s, axis=ax)
            out = out.reshape(shape)
            out += F[shift] * rolled * w[0]
        return out.reshape(-1)
    nodes = grid.nodes
    from .groups import su2_matrix, euler_from_su2

    mats = [su2_matrix(p) for p in nodes]
    reps = {lb: np.stack([wigner_matrix(lb, p) for p in nodes]) for lb in sym.entries}
    for hidx in range(grid.node_count):
        Uh_inv = mats[hidx].conj().T
        acc = np.zeros(grid.node_count, dtype=complex)
        for lb, sig in sym.entries.items():
            # xi(h^-1 g) = xi(h)^* xi(g); trace(xi(h^-1 g) sigma)
            Dh = reps[lb][hidx].conj().T
            acc += np.einsum("nab,ba->n", reps[lb], sig @ Dh) * (lb + 1)
        out += f.samples[hidx] * w[hidx] * acc
        del Uh_inv
    return out


# ---------------------------------------------------------------------------
# Vector field symbols
# ---------------------------------------------------------------------------

def vector_field_symbol(model: GroupModel, coeffs: Sequence[float], band: int,
                        step: float = 1e-4) -> MatrixSymbol:
    """Symbol of a left-invariant frame field ``X = sum_j a_j D_j``.

    Entries are the derivative of ``xi(exp(t X))`` at ``t = 0``, computed by
    the five-point centered difference (one Richardson step) with the given
    step; the result is skew-Hermitian to within discretization error.
    On the torus the frame is ``D_j = d/dx_j`` and the coefficient vector has
    length n.
    """
    from .groups import labels_up_to

    entries: Dict[IrrepLabel, np.ndarray] = {}
    if model.kind == "su2":
        a = np.asarray(coeffs, dtype=float)
        pts = {s: su2_exp_point(a, s * step) for s in (1, 2, -1, -2)}
        for t in labels_up_to(model, band):
            D = {s: wigner_matrix(t, p) for s, p in pts.items()}
            entries[t] = (8.0 * (D[1] - D[-1]) - (D[2] - D[-2])) / (12.0 * step)
    else:
        a = np.asarray(coeffs, dtype=float)
        if a.shape != (model.n,):
            raise ValueError(f"torus frame vector needs {model.n} components")
        for k in labels_up_to(model, band):
            phase = 2.0 * math.pi * float(np.dot(k, a))
            vals = [np.exp(1j * phase * s * step) for s in (1, 2, -1, -2)]
            d1 = (8.0 * (vals[0] - vals[2]) - (vals[1] - vals[3])) / (12.0 * step)
            entries[k] = np.array([[d1]], dtype=complex)
    return MatrixSymbol(model, entries, exact_band=band)


# ---------------------------------------------------------------------------
# Distance function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceFunction:
    """The pseudo-distance whose square drives the second-order calculus."""

    model: GroupModel

    def squared_value(self, point) -> float:
        if self.model.kind == "su2":
            from .groups import su2_matrix

            tr = float(np.trace(su2_matrix(point)).real)
            return max(4.0 - tr * tr, 0.0)
        x = np.asarray(point, dtype=float)
        return float(np.sum(2.0 - 2.0 * np.cos(2.0 * math.pi * x)))

    def value(self, point) -> float:
        return math.sqrt(self.squared_value(point))

    def squared_on(self, grid: GroupGrid) -> GroupFunction:
        band = 2 if self.model.kind == "su2" else 1
        return GroupFunction(grid, rho_squared_samples(grid).astype(complex), band)


def rho_squared(model: GroupModel) -> DistanceFunction:
    """Distance-squared object; ``squared_on`` samples it onto a grid."""
    return DistanceFunction(model)


# ---------------------------------------------------------------------------
# Difference operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DifferenceWord:
    """A product of elementary difference operators.

    Each factor ``(label, i, j)`` multiplies the operator kernel by
    ``xi_label(g)_{ij} - delta_{ij}`` (0-based entry indices).  Factors
    commute, so a word is determined by its multiset of factors.
    """

    model: GroupModel
    factors: Tuple[Tuple[IrrepLabel, int, int], ...]

    @property
    def order(self) -> int:
        return len(self.factors)

    @property
    def band_sum(self) -> int:
        return sum(label_band(self.model, lb) for lb, _, _ in self.factors)

    def then(self, factor: Tuple[IrrepLabel, int, int]) -> "DifferenceWord":
        return DifferenceWord(self.model, self.factors + (factor,))

    def describe(self) -> str:
        if not self.factors:
            return "id"
        return "*".join(f"D[{lb}]({i},{j})" for lb, i, j in self.factors)


def difference_generators(model: GroupModel) -> List[DifferenceWord]:
    """Order-1 words from the first-shell representations.

    SU(2): the nine entries of the adjoint (twice_spin 2) representation.
    Torus-n: the 2n characters ``+-e_j``.
    """
    gens = []
    for lb in model.delta0:
        d = irrep_dimension(model, lb)
        for i in range(d):
            for j in range(d):
                gens.append(DifferenceWord(model, ((lb, i, j),)))
    return gens


def generator_words(model: GroupModel, order: int) -> List[DifferenceWord]:
    """All distinct words of the given order (multisets of generators)."""
    gens = difference_generators(model)
    if order == 0:
        return [DifferenceWord(model, ())]
    out = []
    for combo in combinations_with_replacement(range(len(gens)), order):
        factors = tuple(gens[i].factors[0] for i in combo)
        out.append(DifferenceWord(model, factors))
    return out


def _q_samples(grid: GroupGrid, factor: Tuple[IrrepLabel, int, int]) -> np.ndarray:
    lb, i, j = factor
    key = ("qfun", lb if isinstance(lb, int) else tuple(lb), i, j)
    if key not in grid._misc:
        vals = grid.coefficient_function(lb, i, j).copy()
        if i == j:
            vals = vals - 1.0
        grid._misc[key] = vals
    return grid._misc[key]


def required_difference_band(model: GroupModel, kernel_band: int, out_band: int) -> int:
    """Smallest grid band making the forward transform exact for a kernel of
    the given band evaluated at labels up to ``out_band``."""
    total = kernel_band + out_band
    if model.kind == "su2":
        return max(1, (total + 3) // 4)
    return max(1, (total + 1) // 2)


def _difference_grid(sym: MatrixSymbol, wband: int, grid: Optional[GroupGrid]) -> GroupGrid:
    model = sym.model
    kernel_band = sym.support_band + wband
    out_band = sym.support_band + wband
    needed = required_difference_band(model, kernel_band, out_band)
    if grid is None:
        return default_grid(model, needed)
    if grid.max_label_band < out_band or grid.exact_total_band < kernel_band + out_band:
        raise BandOverflowError(
            f"grid band {grid.band} too small for a difference of word band {wband} "
            f"on a symbol of support band {sym.support_band}; need band >= {needed}")
    return grid


def apply_difference(word: DifferenceWord, sym: MatrixSymbol,
                     grid: Optional[GroupGrid] = None,
                     route: str = "auto") -> MatrixSymbol:
    """Apply a difference word to a symbol.

    ``route`` is ``"auto"`` (torus: exact lattice shifts; SU(2): quadrature),
    ``"shift"`` (torus only) or ``"grid"``.  The result's exactness
    certificate drops by the word's total factor band.
    """
    if word.model != sym.model:
        raise ValueError("word and symbol live on different models")
    if word.order == 0:
        return MatrixSymbol(sym.model, {lb: m.copy() for lb, m in sym.entries.items()},
                            sym.exact_band)
    if route not in ("auto", "shift", "grid"):
        raise ValueError(f"unknown route {route!r}")
    if sym.model.kind == "torus" and route in ("auto", "shift"):
        return _apply_difference_shift(word, sym)
    if sym.model.kind == "torus" and route == "grid":
        return _apply_difference_grid(word, sym, grid)
    if route == "shift":
        raise ValueError("the shift route exists only on the torus")
    return _apply_difference_grid(word, sym, grid)


def _apply_difference_shift(word: DifferenceWord, sym: MatrixSymbol) -> MatrixSymbol:
    cur = {lb: m for lb, m in sym.entries.items()}
    n = sym.model.n
    for lb, _, _ in word.factors:
        shifted: Dict[IrrepLabel, np.ndarray] = {}
        keys = set(cur)
        for k in keys:
            shifted[k] = shifted.get(k, 0.0) - cur[k]
            moved = tuple(k[d] + lb[d] for d in range(n))
            shifted[moved] = shifted.get(moved, 0.0) + cur[k]
        cur = {k: np.asarray(v) for k, v in shifted.items()}
    return MatrixSymbol(sym.model, cur, sym.exact_band - word.band_sum)


def _apply_difference_grid(word: DifferenceWord, sym: MatrixSymbol,
                           grid: Optional[GroupGrid]) -> MatrixSymbol:
    from . import transform
    from .groups import labels_up_to

    wband = word.band_sum
    grid = _difference_grid(sym, wband, grid)
    kernel = transform.fourier_inverse(sym, grid)
    q = np.ones(grid.node_count, dtype=complex)
    for factor in word.factors:
        q = q * _q_samples(grid, factor)
    product = GroupFunction(grid, kernel.samples * q,
                            min(kernel.declared_band + wband, grid.max_label_band))
    out_band = sym.support_band + wband
    labels = [lb for lb in labels_up_to(sym.model, out_band)]
    coeffs = transform.fourier_forward(product, labels=labels)
    return MatrixSymbol(sym.model, coeffs.entries,
                        exact_band=min(sym.exact_band - wband, coeffs.exact_band))


def laplace_difference(sym: MatrixSymbol, grid: Optional[GroupGrid] = None,
                       route: str = "auto") -> MatrixSymbol:
    """The second-order difference operator driven by ``rho^2``.

    Torus (shift route): ``2 n sigma(k) - sum_j (sigma(k + e_j) + sigma(k - e_j))``.
    SU(2) (quadrature route): transform, multiply by ``rho^2``, transform back.
    The exactness certificate drops by the band of ``rho^2`` (2 on SU(2),
    1 on the torus).
    """
    model = sym.model
    if route not in ("auto", "shift", "grid"):
        raise ValueError(f"unknown route {route!r}")
    if model.kind == "torus" and route in ("auto", "shift"):
        n = model.n
        out: Dict[IrrepLabel, np.ndarray] = {}
        for k, m in sym.entries.items():
            out[k] = out.get(k, 0.0) + 2.0 * n * m
            for d_axis in range(n):
                for sign in (1, -1):
                    moved = list(k)
                    moved[d_axis] += sign
                    moved = tuple(moved)
                    out[moved] = out.get(moved, 0.0) - m
        cleaned = {k: np.asarray(v) for k, v in out.items()}
        return MatrixSymbol(model, cleaned, sym.exact_band - 1)
    if route == "shift":
        raise ValueError("the shift route exists only on the torus")
    from . import transform
    from .groups import labels_up_to

    wband = 2 if model.kind == "su2" else 1
    grid = _difference_grid(sym, wband, grid)
    kernel = transform.fourier_inverse(sym, grid)
    product = GroupFunction(grid, kernel.samples * rho_squared_samples(grid),
                            min(kernel.declared_band + wband, grid.max_label_band))
    labels = list(labels_up_to(model, sym.support_band + wband))
    coeffs = transform.fourier_forward(product, labels=labels)
    return MatrixSymbol(model, coeffs.entries,
                        exact_band=min(sym.exact_band - wband, coeffs.exact_band))


def laplace_decomposition_residual(sym: MatrixSymbol,
                                   grid: Optional[GroupGrid] = None) -> float:
    """Residual of the first-shell decomposition of the rho^2 operator:
    ``laplace(sigma) + sum_{xi0 in delta0} sum_i xi0 D_ii sigma = 0``."""
    model = sym.model
    total = laplace_difference(sym, grid, route="grid" if model.kind == "su2" else "auto")
    for lb in model.delta0:
        d = irrep_dimension(model, lb)
        for i in range(d):
            word = DifferenceWord(model, ((lb, i, i),))
            total = symbol_add(total, apply_difference(word, sym, grid))
    return max((op_norm(m) for m in total.entries.values()), default=0.0)


# ---------------------------------------------------------------------------
# Leibniz rules
# ---------------------------------------------------------------------------

def _expand_product_terms(word: DifferenceWord):
    """Expand ``D^word (sigma tau)`` into ``(word_on_sigma, word_on_tau)`` pairs
    by iterating the first-order rule; returns a list of factor-tuple pairs."""
    model = word.model
    terms = [((), ())]
    for lb, i, j in word.factors:
        d = irrep_dimension(model, lb)
        new_terms = []
        for left, right in terms:
            new_terms.append((left + ((lb, i, j),), right))
            new_terms.append((left, right + ((lb, i, j),)))
            for k in range(d):
                new_terms.append((left + ((lb, k, j),), right + ((lb, i, k),)))
        terms = new_terms
    return terms


def leibniz_residual(word: DifferenceWord, sym: MatrixSymbol, tau: MatrixSymbol,
                     grid: Optional[GroupGrid] = None) -> float:
    """Max deviation (HS norm) of the product rule for a difference word.

    Order 1 checks ``D_ij(sigma tau) = (D_ij sigma) tau + sigma (D_ij tau)
    + sum_k (D_kj sigma)(D_ik tau)`` (the cross-term pairing forced by the
    convolution convention ``(phi * psi)^ = psi^ phi^``); higher orders check
    the iterated expansion of the same rule.
    """
    if word.order == 0:
        return 0.0
    prod = symbol_product(sym, tau)
    lhs = apply_difference(word, prod, grid)
    terms = _expand_product_terms(word)
    cache_s: Dict[Tuple, MatrixSymbol] = {}
    cache_t: Dict[Tuple, MatrixSymbol] = {}

    def diff_of(base: MatrixSymbol, factors, cache):
        if factors not in cache:
            cache[factors] = apply_difference(DifferenceWord(word.model, factors),
                                              base, grid)
        return cache[factors]

    rhs: Optional[MatrixSymbol] = None
    for left, right in terms:
        piece = symbol_product(diff_of(sym, left, cache_s), diff_of(tau, right, cache_t))
        rhs = piece if rhs is None else symbol_add(rhs, piece)
    resid = symbol_add(lhs, rhs, beta=-1.0)
    cap = min(sym.exact_band, tau.exact_band)
    vals = [np.linalg.norm(m) for lb, m in resid.entries.items()
            if label_band(word.model, lb) <= cap]
    return max(vals, default=0.0)


def laplace_leibniz_residual(sym: MatrixSymbol, tau: MatrixSymbol,
                             grid: Optional[GroupGrid] = None) -> float:
    """Max deviation (HS norm) of the product rule for the rho^2 operator:
    ``A(sigma tau) = (A sigma) tau + sigma (A tau)
    - sum_{xi0} sum_{ij} (xi0 D_ij sigma)(xi0 D_ji tau)``."""
    model = sym.model
    prod = symbol_product(sym, tau)
    lhs = laplace_difference(prod, grid)
    rhs = symbol_add(symbol_product(laplace_difference(sym, grid), tau),
                     symbol_product(sym, laplace_difference(tau, grid)))
    for lb in model.delta0:
        d = irrep_dimension(model, lb)
        for i in range(d):
            for j in range(d):
                wij = DifferenceWord(model, ((lb, i, j),))
                wji = DifferenceWord(model, ((lb, j, i),))
                cross = symbol_product(apply_difference(wij, sym, grid),
                                       apply_difference(wji, tau, grid))
                rhs = symbol_add(rhs, cross, beta=-1.0)
    resid = symbol_add(lhs, rhs, beta=-1.0)
    cap = min(sym.exact_band, tau.exact_band)
    vals = [np.linalg.norm(m) for lb, m in resid.entries.items()
            if label_band(model, lb) <= cap]
    return max(vals, default=0.0)


# ---------------------------------------------------------------------------
# Seminorms
# ---------------------------------------------------------------------------

def word_sup_table(sym: MatrixSymbol, order: int, labels: Sequence[IrrepLabel],
                   grid: Optional[GroupGrid] = None) -> Dict[IrrepLabel, float]:
    """Per-label sup over all generator words of the given order of
    ``||D^alpha sigma(xi)||_op``.  Labels must lie within the derated
    exactness certificate, else BandOverflowError."""
    model = sym.model
    labels = [validate_label(model, lb) for lb in labels]
    if order == 0:
        return {lb: op_norm(sym.get(lb)) for lb in labels}
    words = generator_words(model, order)
    wband = max(w.band_sum for w in words)
    cap = sym.exact_band - wband
    bad = [lb for lb in labels if label_band(model, lb) > cap]
    if bad:
        raise BandOverflowError(
            f"labels up to band {max(label_band(model, lb) for lb in bad)} requested, "
            f"but order-{order} differences are only exact through band {cap}; "
            f"extend the stored symbol")
    best = {lb: 0.0 for lb in labels}
    if model.kind == "torus":
        for word in words:
            diff = apply_difference(word, sym)
            for lb in labels:
                best[lb] = max(best[lb], op_norm(diff.get(lb)))
        return best
    # SU(2): one kernel, one multiplier product per word, one forward each.
    from . import transform

    out_band = max((label_band(model, lb) for lb in labels), default=0)
    kernel_band = sym.support_band + wband
    needed = required_difference_band(model, kernel_band, out_band)
    if grid is None:
        grid = default_grid(model, needed)
    elif grid.exact_total_band < kernel_band + out_band:
        raise BandOverflowError(
            f"grid band {grid.band} too small; need band >= {needed}")
    kernel = transform.fourier_inverse(sym, grid)
    for word in words:
        q = np.ones(grid.node_count, dtype=complex)
        for factor in word.factors:
            q = q * _q_samples(grid, factor)
        product = GroupFunction(grid, kernel.samples * q,
                                min(kernel.declared_band + wband, grid.max_label_band))
        coeffs = transform.fourier_forward(product, labels=labels)
        for lb in labels:
            best[lb] = max(best[lb], op_norm(coeffs.entries[lb]))
    return best


def seminorm(sym: MatrixSymbol, order: int, weight_exponent: float,
             labels: Sequence[IrrepLabel],
             grid: Optional[GroupGrid] = None) -> float:
    """``sup_xi <xi>^w max_words ||D^alpha sigma(xi)||_op`` over the labels."""
    from .groups import japanese_bracket

    table = word_sup_table(sym, order, labels, grid)
    best = 0.0
    for lb, val in table.items():
        best = max(best, japanese_bracket(sym.model, lb) ** weight_exponent * val)
    return best
