"""Forward and inverse Fourier transforms on the supported groups.

Conventions (matching :mod:`gmult.groups`):

* forward:  ``fhat(xi) = integral f(g) xi(g)^* dg``  (entrywise conjugate
  transpose of the representation matrix under the normalized Haar measure);
* inverse:  ``f(g) = sum_xi d_xi trace(xi(g) fhat(xi))``.

On the torus this is the ordinary Fourier series with characters
``exp(2 pi i k . x)`` and is evaluated by the FFT.  On SU(2) the transform
separates over the Euler product grid: two phase sums (uniform angles) and a
Gauss-Legendre sum against the little-d tables.

Exactness accounting: for a function carrying a ``declared_band``
certificate ``b``, computed coefficients at labels of band ``t`` are exact
whenever ``b + t <= grid.exact_total_band``; the returned symbol's
``exact_band`` records the largest such ``t``.  Functions without a
certificate produce symbols with ``exact_band = -1`` (stored values are the
discrete quadrature transform, certified exact nowhere).
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BandOverflowError
from .grids import GroupFunction, GroupGrid
from .groups import (IrrepLabel, irrep_dimension, japanese_bracket, label_band,
                     labels_up_to, validate_label)
from .symbols import MatrixSymbol


def _su2_phase_tables(grid: GroupGrid, tmax: int):
    """Forward phase matrices e^{+i u phi / 2}/N at all twice-weights |u|<=tmax."""
    key = ("fwd_phases", tmax)
    if key not in grid._misc:
        u = np.arange(-tmax, tmax + 1)
        ephi = np.exp(0.5j * np.outer(u, grid.phis)) / grid.phis.size
        epsi = np.exp(0.5j * np.outer(u, grid.psis)) / grid.psis.size
        grid._misc[key] = (ephi, epsi)
    return grid._misc[key]


def _su2_forward_stages(grid: GroupGrid, samples: np.ndarray, tmax: int) -> np.ndarray:
    """Collapse the phi and psi axes: returns ``A[u, a, v]`` with
    ``A = (1/(Nphi Npsi)) sum_{j,k} f(phi_j, theta_a, psi_k)
    e^{i u phi_j / 2} e^{i v psi_k / 2}`` for twice-weights ``u, v``."""
    nphi, ntheta, npsi = grid.shape
    F = samples.reshape(grid.shape)
    ephi, epsi = _su2_phase_tables(grid, tmax)
    A1 = np.tensordot(ephi, F, axes=(1, 0))          # (u, theta, psi)
    return np.tensordot(A1, epsi, axes=(2, 1))       # (u, theta, v)


def _su2_forward(grid: GroupGrid, samples: np.ndarray,
                 labels: Sequence[int]) -> Dict[int, np.ndarray]:
    if not labels:
        return {}
    tmax = max(labels)
    A = _su2_forward_stages(grid, samples, tmax)
    w2 = grid.theta_weights / 2.0
    out: Dict[int, np.ndarray] = {}
    for t in labels:
        dtab = grid.little_d(t)                      # (theta, m, n) ascending
        idx = np.arange(-t, t + 1, 2) + tmax
        block = A[np.ix_(idx, np.arange(grid.thetas.size), idx)]
        # fhat_{mn} = sum_a w_a/2 d^t_{nm}(theta_a) A[u=2n, a, v=2m]
        out[t] = np.einsum("a,anm,nam->mn", w2, dtab, block, optimize=True)
    return out


def _su2_inverse(grid: GroupGrid, sym: MatrixSymbol) -> np.ndarray:
    labels = [t for t in sym.entries]
    if not labels:
        return np.zeros(grid.node_count, dtype=complex)
    tmax = max(labels)
    nu = tmax + 1
    ntheta = grid.thetas.size
    H = np.zeros((2 * tmax + 1, ntheta, 2 * tmax + 1), dtype=complex)
    for t, mat in sym.entries.items():
        dtab = grid.little_d(t)
        idx = np.arange(-t, t + 1, 2) + tmax
        # f = sum_t d_t sum_{mn} e^{-i m phi} d^t_{mn} e^{-i n psi} sigma_{nm}
        contrib = (t + 1) * np.einsum("amn,nm->man", dtab, mat, optimize=True)
        H[np.ix_(idx, np.arange(ntheta), idx)] += contrib
    u = np.arange(-tmax, tmax + 1)
    pphi = np.exp(-0.5j * np.outer(grid.phis, u))    # (phi, u)
    ppsi = np.exp(-0.5j * np.outer(u, grid.psis))    # (v, psi)
    out = np.tensordot(pphi, H, axes=(1, 0))         # (phi, theta, v)
    out = np.tensordot(out, ppsi, axes=(2, 0))       # (phi, theta, psi)
    return out.reshape(-1)


def _torus_forward(grid: GroupGrid, samples: np.ndarray,
                   labels: Sequence[Tuple[int, ...]]) -> Dict[Tuple[int, ...], np.ndarray]:
    shape = grid.shape
    table = np.fft.fftn(samples.reshape(shape)) / samples.size
    out: Dict[Tuple[int, ...], np.ndarray] = {}
    for k in labels:
        idx = tuple(int(c) % shape[d] for d, c in enumerate(k))
        out[k] = np.array([[table[idx]]], dtype=complex)
    return out


def _torus_inverse(grid: GroupGrid, sym: MatrixSymbol) -> np.ndarray:
    shape = grid.shape
    table = np.zeros(shape, dtype=complex)
    for k, mat in sym.entries.items():
        idx = tuple(int(c) % shape[d] for d, c in enumerate(k))
        table[idx] += complex(mat[0, 0])
    return (np.fft.ifftn(table) * table.size).reshape(-1)


def fourier_forward(f: GroupFunction, labels: Optional[Iterable[IrrepLabel]] = None,
                    band: Optional[int] = None) -> MatrixSymbol:
    """Transform sampled function values into matrix coefficients.

    ``labels`` selects which coefficients to compute; alternatively ``band``
    requests all labels through that band.  With neither, all labels through
    the grid's representable band are computed.  Labels beyond the grid's
    representable band raise BandOverflowError (they alias onto lower ones).
    """
    grid = f.grid
    model = grid.model
    if labels is not None and band is not None:
        raise ValueError("pass labels or band, not both")
    if labels is None:
        cap = grid.max_label_band if band is None else band
        labels = list(labels_up_to(model, cap))
    else:
        labels = [validate_label(model, lb) for lb in labels]
    for lb in labels:
        if label_band(model, lb) > grid.max_label_band:
            raise BandOverflowError(
                f"label {lb} has band {label_band(model, lb)}, beyond the grid's "
                f"representable band {grid.max_label_band}")
    if model.kind == "su2":
        entries = _su2_forward(grid, f.samples, labels)
    else:
        entries = _torus_forward(grid, f.samples, labels)
    if f.declared_band is None:
        cert = -1.0
    else:
        cert = min(float(grid.max_label_band),
                   float(grid.exact_total_band - f.declared_band))
    return MatrixSymbol(model, entries, exact_band=cert)


def fourier_inverse(sym: MatrixSymbol, grid: GroupGrid) -> GroupFunction:
    """Evaluate ``sum_xi d_xi trace(xi(g) sigma(xi))`` at the grid nodes."""
    if sym.support_band > grid.max_label_band and sym.entries:
        raise BandOverflowError(
            f"symbol support band {sym.support_band} exceeds the grid's "
            f"representable band {grid.max_label_band}")
    if grid.model.kind == "su2":
        samples = _su2_inverse(grid, sym)
    else:
        samples = _torus_inverse(grid, sym)
    return GroupFunction(grid, samples, declared_band=sym.support_band)


def plancherel_norm(sym: MatrixSymbol) -> float:
    """sqrt( sum_xi d_xi ||sigma(xi)||_HS^2 ) over the stored labels."""
    total = 0.0
    for lb, mat in sym.entries.items():
        d = irrep_dimension(sym.model, lb)
        total += d * float(np.sum(np.abs(mat) ** 2))
    return math.sqrt(total)


def sobolev_norm(sym: MatrixSymbol, order: float) -> float:
    """Plancherel norm with weights ``<xi>^order`` on each block."""
    total = 0.0
    for lb, mat in sym.entries.items():
        d = irrep_dimension(sym.model, lb)
        w = japanese_bracket(sym.model, lb) ** order
        total += d * (w * w) * float(np.sum(np.abs(mat) ** 2))
    return math.sqrt(total)


def function_norm_l2(f: GroupFunction) -> float:
    """Quadrature L2 norm of sampled values."""
    return math.sqrt(max(float(np.sum(f.grid.weights * np.abs(f.samples) ** 2)), 0.0))
