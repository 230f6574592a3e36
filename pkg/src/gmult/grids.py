"""Quadrature grids and sampled functions on the torus and SU(2).

A grid of band ``B`` integrates exactly every pointwise product of matrix
coefficients whose label bands sum to at most ``exact_total_band``:

* torus-n: ``(2B + 1)^n`` equispaced points with uniform weights; labels with
  ``|k|_inf <= B`` are representable and products with total band ``<= 2B``
  integrate exactly.
* SU(2): product grid in Euler angles with ``2B + 1`` equispaced phi nodes,
  ``B + 1`` Gauss-Legendre nodes in ``cos(theta)`` and ``2 (2B + 1)``
  equispaced psi nodes over ``[0, 4pi)``.  Labels with ``twice_spin <= 2B``
  are representable; coefficient products with total twice_spin ``<= 4B``
  integrate exactly.  (The psi range and node count make the half-integer
  spins single-valued and exactly integrable alongside the integer ones.)

Weights are normalized so the constant function integrates to 1 (Haar
probability measure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import BandOverflowError
from .groups import GroupModel, IrrepLabel, label_band, validate_label

_TWO_PI = 2.0 * math.pi
_FOUR_PI = 4.0 * math.pi


@dataclass
class GroupGrid:
    """Product quadrature grid on a group model.

    Treat instances as immutable; the dict fields are lazily filled caches
    (little-d tables and coefficient samples are expensive to rebuild).
    """

    model: GroupModel
    band: int
    phis: Optional[np.ndarray] = None
    thetas: Optional[np.ndarray] = None
    theta_weights: Optional[np.ndarray] = None
    psis: Optional[np.ndarray] = None
    axis: Optional[np.ndarray] = None
    _little_d: Dict[int, np.ndarray] = field(default_factory=dict, repr=False, compare=False)
    _coeff: Dict[Tuple, np.ndarray] = field(default_factory=dict, repr=False, compare=False)
    _misc: Dict[str, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    # -- shape bookkeeping ---------------------------------------------------

    @property
    def shape(self) -> Tuple[int, ...]:
        if self.model.kind == "su2":
            return (self.phis.size, self.thetas.size, self.psis.size)
        return (self.axis.size,) * self.model.n

    @property
    def node_count(self) -> int:
        return int(np.prod(self.shape))

    @property
    def max_label_band(self) -> int:
        """Largest label band the grid can represent without aliasing."""
        return 2 * self.band if self.model.kind == "su2" else self.band

    @property
    def exact_total_band(self) -> int:
        """Largest total band of a coefficient product integrated exactly."""
        return 4 * self.band if self.model.kind == "su2" else 2 * self.band

    @property
    def weights(self) -> np.ndarray:
        """Flattened quadrature weights summing to 1."""
        if "weights" not in self._misc:
            if self.model.kind == "su2":
                nphi, npsi = self.phis.size, self.psis.size
                w = np.broadcast_to(self.theta_weights[None, :, None] / (2.0 * nphi * npsi),
                                    self.shape)
                self._misc["weights"] = np.ascontiguousarray(w).reshape(-1)
            else:
                self._misc["weights"] = np.full(self.node_count, 1.0 / self.node_count)
        return self._misc["weights"]

    @property
    def nodes(self) -> np.ndarray:
        """Flattened node coordinates, shape ``(node_count, dim)``."""
        if "nodes" not in self._misc:
            if self.model.kind == "su2":
                P, T, S = np.meshgrid(self.phis, self.thetas, self.psis, indexing="ij")
                self._misc["nodes"] = np.column_stack([P.ravel(), T.ravel(), S.ravel()])
            else:
                axes = np.meshgrid(*([self.axis] * self.model.n), indexing="ij")
                self._misc["nodes"] = np.column_stack([a.ravel() for a in axes])
        return self._misc["nodes"]

    def integrate(self, samples: np.ndarray) -> complex:
        """Quadrature of flattened samples against the Haar weights."""
        samples = np.asarray(samples).reshape(-1)
        if samples.size != self.node_count:
            raise ValueError("sample count does not match grid")
        return complex(np.dot(self.weights, samples))

    # -- cached representation data -------------------------------------------

    def little_d(self, twice_spin: int) -> np.ndarray:
        """Little-d table at the theta nodes, shape ``(n_theta, d, d)``."""
        from .groups import wigner_little_d

        if self.model.kind != "su2":
            raise ValueError("little_d tables exist only on SU(2) grids")
        if twice_spin not in self._little_d:
            self._little_d[twice_spin] = wigner_little_d(twice_spin, self.thetas)
        return self._little_d[twice_spin]

    def coefficient_function(self, label: IrrepLabel, i: int = 0, j: int = 0) -> np.ndarray:
        """Samples of the matrix coefficient ``xi(g)_{ij}`` (0-based indices)."""
        label = validate_label(self.model, label)
        key = (label, i, j)
        if key in self._coeff:
            return self._coeff[key]
        if self.model.kind == "su2":
            t = label
            if not (0 <= i <= t and 0 <= j <= t):
                raise ValueError(f"entry ({i}, {j}) outside a {t + 1}-dim representation")
            dcol = self.little_d(t)[:, i, j]
            ephi = np.exp(-0.5j * (2 * i - t) * self.phis)
            epsi = np.exp(-0.5j * (2 * j - t) * self.psis)
            out = (ephi[:, None, None] * dcol[None, :, None] * epsi[None, None, :]).reshape(-1)
        else:
            if i != 0 or j != 0:
                raise ValueError("torus representations are one dimensional")
            out = np.ones(self.shape, dtype=complex)
            for d_axis, k in enumerate(label):
                phase = np.exp(2j * math.pi * k * self.axis)
                sh = [1] * self.model.n
                sh[d_axis] = self.axis.size
                out = out * phase.reshape(sh)
            out = out.reshape(-1)
        self._coeff[key] = out
        return out

    def class_angles(self) -> np.ndarray:
        """SU(2) only: conjugacy-class angle ``t in [0, 2pi]`` of each node."""
        if self.model.kind != "su2":
            raise ValueError("class angles exist only on SU(2) grids")
        if "class_angles" not in self._misc:
            P, T, S = np.meshgrid(self.phis, self.thetas, self.psis, indexing="ij")
            half_trace = np.cos(T / 2.0) * np.cos((P + S) / 2.0)
            self._misc["class_angles"] = (
                2.0 * np.arccos(np.clip(half_trace, -1.0, 1.0))).reshape(-1)
        return self._misc["class_angles"]


def build_grid(model: GroupModel, band: int) -> GroupGrid:
    """Build the product quadrature grid of the given band (``band >= 1``)."""
    if band < 1:
        raise ValueError(f"grid band must be a positive integer, got {band}")
    band = int(band)
    if model.kind == "su2":
        nphi = 2 * band + 1
        npsi = 2 * (2 * band + 1)
        ntheta = band + 1
        xs, ws = leggauss(ntheta)
        thetas = np.arccos(xs)
        return GroupGrid(model=model, band=band,
                         phis=np.arange(nphi) * (_TWO_PI / nphi),
                         thetas=thetas, theta_weights=ws,
                         psis=np.arange(npsi) * (_FOUR_PI / npsi))
    npts = 2 * band + 1
    return GroupGrid(model=model, band=band, axis=np.arange(npts) / npts)


@dataclass
class GroupFunction:
    """Samples of a function on a grid.

    ``declared_band`` is the caller's certificate that the function is a
    linear combination of matrix coefficients with label band at most that
    value; ``None`` means no certificate (transforms of such samples are
    computed but carry no exactness guarantee).
    """

    grid: GroupGrid
    samples: np.ndarray
    declared_band: Optional[int] = None

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=complex).reshape(-1)
        if self.samples.size != self.grid.node_count:
            raise ValueError(
                f"got {self.samples.size} samples for a grid of {self.grid.node_count} nodes")
        if self.declared_band is not None:
            self.declared_band = int(self.declared_band)
            if self.declared_band > self.grid.max_label_band:
                raise BandOverflowError(
                    f"declared band {self.declared_band} exceeds grid capacity "
                    f"{self.grid.max_label_band}; build the grid with band >= "
                    f"{_required_grid_band(self.grid.model, self.declared_band)}")

    def multiply(self, other: "GroupFunction") -> "GroupFunction":
        """Pointwise product; declared bands add (None is absorbing)."""
        if other.grid is not self.grid and other.grid != self.grid:
            raise ValueError("functions live on different grids")
        band = None
        if self.declared_band is not None and other.declared_band is not None:
            band = self.declared_band + other.declared_band
            band = min(band, self.grid.max_label_band)
        return GroupFunction(self.grid, self.samples * other.samples, band)

    def integral(self) -> complex:
        return self.grid.integrate(self.samples)


def _required_grid_band(model: GroupModel, label_band_value: int) -> int:
    if model.kind == "su2":
        return (label_band_value + 1) // 2
    return label_band_value


def rho_squared_samples(grid: GroupGrid) -> np.ndarray:
    """Samples of the squared pseudo-distance ``rho^2`` at the grid nodes.

    ``rho^2(g) = n - trace Ad(g)`` on SU(2) (adjoint = twice_spin 2) and
    ``rho^2(x) = 2 n - sum_j (e^{2 pi i x_j} + e^{-2 pi i x_j})`` on the torus.
    Values are real and nonnegative.
    """
    if "rho2" in grid._misc:
        return grid._misc["rho2"]
    if grid.model.kind == "su2":
        t = grid.class_angles()
        vals = 2.0 - 2.0 * np.cos(t)
    else:
        vals = np.zeros(grid.shape)
        n = grid.model.n
        for d_axis in range(n):
            sh = [1] * n
            sh[d_axis] = grid.axis.size
            vals = vals + (2.0 - 2.0 * np.cos(_TWO_PI * grid.axis)).reshape(sh)
        vals = vals.reshape(-1)
    vals = np.maximum(vals, 0.0)
    grid._misc["rho2"] = vals
    return vals
