"""Central (scalar) multiplier machinery on SU(2).

A central symbol assigns to each label a scalar multiple of the identity; it
corresponds to a conjugation-invariant convolution kernel, i.e. a class
function.  Class functions live on the conjugacy-angle circle, so this module
carries a one-dimensional quadrature engine for them: the conjugation-
invariant integral of a class function F is

    integral_G F dg = (1/pi) * int_0^{2pi} F(s) sin^2(s/2) ds,

where ``s`` is the class angle (the fundamental representation has trace
``2 cos(s/2)``).  Characters are evaluated through the stable three-term
recurrence ``chi_{t+1} = 2 cos(s/2) chi_t - chi_{t-1}`` (Chebyshev kind II).

Lattice conventions: labels are twice-spin integers ``t``; the weight lattice
extends them to all integers with the reflection ``t' = -2 - t``.  Scalar
sequences extend evenly (``s_{t'} = s_t``) while dimensions and characters
extend oddly (``d_{t'} = -d_t``, ``chi_{t'} = -chi_t``); the wall ``t = -1``
carries ``d = 0`` and ``chi = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GmultError
from .groups import GroupModel, casimir_lambda, japanese_bracket, su2_model
from .symbols import MatrixSymbol, vector_field_symbol


# ---------------------------------------------------------------------------
# Weight lattice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightLatticePoint:
    """A point of the (rank-one) weight lattice in twice-weight units.

    ``twice_rho = 1`` is half the positive root in the same units.
    """

    twice_weight: int
    twice_rho: int = 1

    def reflected(self) -> "WeightLatticePoint":
        """Image under the nontrivial Weyl reflection about ``-rho``."""
        return WeightLatticePoint(-2 - self.twice_weight, self.twice_rho)


def weyl_dimension(w) -> int:
    """Signed dimension on the extended lattice: ``t + 1``.

    Dominant labels give the honest dimension; the reflection
    ``t' = -2 - t`` flips the sign, and the wall ``t = -1`` gives 0.
    """
    t = w.twice_weight if isinstance(w, WeightLatticePoint) else int(w)
    return t + 1


def weyl_character(w, angle) -> np.ndarray:
    """Character value(s) at class angle(s), on the extended lattice.

    For dominant ``t``: ``chi_t(s) = sin((t+1)s/2) / sin(s/2)`` with the
    singular angles filled by continuity (the recurrence evaluation used here
    has no singularities).  Extended labels follow the signed reflection.
    """
    t = w.twice_weight if isinstance(w, WeightLatticePoint) else int(w)
    s = np.asarray(angle, dtype=float)
    if t == -1:
        return np.zeros_like(s)
    sign = 1.0
    if t < -1:
        t = -2 - t
        sign = -1.0
    x = 2.0 * np.cos(0.5 * s)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for _ in range(t):
        prev, cur = cur, x * cur - prev
    return sign * cur


def character_table(tmax: int, angles: np.ndarray) -> np.ndarray:
    """``(tmax+1, len(angles))`` table of characters chi_0..chi_tmax."""
    x = 2.0 * np.cos(0.5 * np.asarray(angles, dtype=float))
    out = np.empty((tmax + 1, x.size), dtype=float)
    out[0] = 1.0
    if tmax >= 1:
        out[1] = x
    for t in range(2, tmax + 1):
        out[t] = x * out[t - 1] - out[t - 2]
    return out


# ---------------------------------------------------------------------------
# Class-function quadrature
# ---------------------------------------------------------------------------

@dataclass
class ClassGrid:
    """Uniform class-angle grid exact for bounded-degree character products.

    Nodes ``s_j = 4 pi j / N`` with weights ``(2/N) sin^2(s_j/2)`` integrate
    any product of characters whose total label sum stays below ``N - 4``.
    """

    angles: np.ndarray
    weights: np.ndarray
    _chi: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.angles.size

    def characters(self, tmax: int) -> np.ndarray:
        if tmax not in self._chi:
            self._chi[tmax] = character_table(tmax, self.angles)
        return self._chi[tmax]

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))


def class_grid(total_band: int) -> ClassGrid:
    """Grid exact for class functions of total character band ``total_band``."""
    n = 2 * total_band + 16
    s = 4.0 * math.pi * np.arange(n) / n
    w = (2.0 / n) * np.sin(0.5 * s) ** 2
    return ClassGrid(s, w)


def class_rho_squared(angles: np.ndarray) -> np.ndarray:
    """Distance squared as a function of the class angle: ``2 - 2 cos s``."""
    return 2.0 - 2.0 * np.cos(np.asarray(angles, dtype=float))


# ---------------------------------------------------------------------------
# Central sequences
# ---------------------------------------------------------------------------

@dataclass
class CentralSequence:
    """Scalar values indexed by twice-spin, with Weyl-even extension.

    ``values`` holds labels ``t >= -1`` (the wall value, when it matters to a
    lattice operator, may be stored at ``-1``).  ``zero_beyond`` declares the
    sequence finitely supported: missing dominant labels read as zero.
    Without it, reading a missing label is an error.
    """

    model: GroupModel
    values: Dict[int, complex] = field(default_factory=dict)
    zero_beyond: bool = False

    def __post_init__(self) -> None:
        if self.model.kind != "su2":
            raise ValueError("central sequences are implemented on su2")
        self.values = {int(t): complex(v) for t, v in self.values.items()}
        if any(t < -1 for t in self.values):
            raise ValueError("store values at twice_spin >= -1; lower labels "
                             "follow by reflection")

    @property
    def support_band(self) -> int:
        dom = [t for t in self.values if t >= 0]
        return max(dom) if dom else 0

    def value(self, t: int) -> complex:
        """Evenly extended value; missing labels are 0 only if zero_beyond."""
        t = int(t)
        if t < -1:
            t = -2 - t
        if t in self.values:
            return self.values[t]
        if self.zero_beyond:
            return 0.0
        raise KeyError(f"central sequence has no value at twice_spin {t}")

    def as_symbol(self, band: Optional[int] = None) -> MatrixSymbol:
        """``sigma(t) = s_t I`` through the given band."""
        band = self.support_band if band is None else int(band)
        entries = {t: self.value(t) * np.eye(t + 1, dtype=complex)
                   for t in range(band + 1)}
        cert = math.inf if (self.zero_beyond and band >= self.support_band) \
            else float(band)
        return MatrixSymbol(self.model, entries, exact_band=cert)


def central_part(sym: MatrixSymbol, tol: float = 1e-8) -> CentralSequence:
    """Extract ``s_t`` from a central symbol; raises if any block deviates
    from a scalar matrix by more than ``tol`` in max-norm."""
    vals: Dict[int, complex] = {}
    for t, mat in sym.entries.items():
        s = complex(np.trace(mat)) / mat.shape[0]
        if np.abs(mat - s * np.eye(mat.shape[0])).max() > tol:
            raise GmultError(f"symbol block at label {t} is not central")
        vals[t] = s
    return CentralSequence(sym.model, vals,
                           zero_beyond=math.isinf(sym.exact_band))


def _weighted(seq: CentralSequence, t: int) -> complex:
    """Dimension-weighted, odd-extended value ``d_t * s_t`` (0 at the wall)."""
    d = weyl_dimension(t)
    if d == 0:
        return 0.0
    return d * seq.value(t)


def delta2(seq: CentralSequence) -> CentralSequence:
    """Root-shift second difference realizing the distance-squared operator
    on central symbols: with ``tau_t = d_t s_t`` (odd-extended),

        d_t * out_t = 2 tau_t - tau_{t-2} - tau_{t+2}.

    Agrees with ``laplace_difference`` applied to ``as_symbol`` on every
    label where the input values are available.
    """
    out: Dict[int, complex] = {}
    if seq.zero_beyond:
        labels = range(seq.support_band + 3)
    else:
        dom = sorted(t for t in seq.values if t >= 0)
        labels = [t for t in dom if all(
            (nb in seq.values or nb <= -1 or -2 - nb in seq.values)
            for nb in (t - 2, t + 2))]
    for t in labels:
        num = 2.0 * _weighted(seq, t) - _weighted(seq, t - 2) - _weighted(seq, t + 2)
        out[t] = num / weyl_dimension(t)
    return CentralSequence(seq.model, out, zero_beyond=seq.zero_beyond)


def laplace_central(seq: CentralSequence, out_band: Optional[int] = None) -> CentralSequence:
    """Distance-squared operator on a central sequence by class-function
    quadrature: transform to the kernel ``sum_t d_t s_t chi_t``, multiply by
    ``rho^2`` on the class circle, expand back in characters."""
    if not seq.zero_beyond:
        raise GmultError("quadrature route needs a finitely supported sequence")
    sup = seq.support_band
    out_band = sup + 2 if out_band is None else int(out_band)
    grid = class_grid(sup + out_band + 6)
    chi = grid.characters(max(sup, out_band))
    coeffs = np.array([_weighted(seq, t) for t in range(sup + 1)])
    kernel = coeffs @ chi[: sup + 1]
    kernel = kernel * class_rho_squared(grid.angles)
    out: Dict[int, complex] = {}
    for t in range(out_band + 1):
        out[t] = grid.integrate(kernel * chi[t]) / weyl_dimension(t)
    return CentralSequence(seq.model, out, zero_beyond=True)


def nweiss_delta(seq: CentralSequence) -> CentralSequence:
    """One-step lattice difference via the Weyl-vector shift multiplier.

    The input is read as a lattice sequence ``u`` (the dimension-weighted
    convention), its kernel ``sum_t u_t chi_t`` is multiplied by
    ``gamma(s) = 2 cos(s/2) - 2`` — the orbit sum of the Weyl vector minus
    the Weyl group order — and re-expanded.  The result equals
    ``u_{t-1} + u_{t+1} - 2 u_t`` with ``u_{-1}`` read as 0 (the wall label
    carries no kernel mass); in particular the signed dimension sequence is
    annihilated identically.
    """
    if not seq.zero_beyond:
        raise GmultError("quadrature route needs a finitely supported sequence")
    sup = seq.support_band
    out_band = sup + 1
    grid = class_grid(sup + out_band + 6)
    chi = grid.characters(max(sup, out_band))
    coeffs = np.array([seq.value(t) for t in range(sup + 1)])
    kernel = coeffs @ chi[: sup + 1]
    gamma = 2.0 * np.cos(0.5 * grid.angles) - 2.0
    kernel = kernel * gamma
    out: Dict[int, complex] = {}
    for t in range(out_band + 1):
        out[t] = grid.integrate(kernel * chi[t])
    return CentralSequence(seq.model, out, zero_beyond=True)


def dimension_sequence(band: int) -> CentralSequence:
    """The signed dimension sequence through the given band (wall included)."""
    vals = {t: complex(weyl_dimension(t)) for t in range(-1, band + 1)}
    return CentralSequence(su2_model(), vals, zero_beyond=True)


# ---------------------------------------------------------------------------
# Orbit sums and character orthogonality
# ---------------------------------------------------------------------------

def orbit_exponential_sum(tw: int, angle) -> np.ndarray:
    """Sum of ``e^{i w s / 2}`` over the Weyl orbit of the weight ``tw``."""
    s = np.asarray(angle, dtype=float)
    if tw == 0:
        return np.ones_like(s)
    return 2.0 * np.cos(0.5 * abs(tw) * s)


def orbit_character_sum(tw: int, angle) -> np.ndarray:
    """Sum of extended characters over the Weyl orbit of the weight ``tw``."""
    tw = abs(int(tw))
    if tw == 0:
        return weyl_character(0, angle)
    return weyl_character(tw, angle) + weyl_character(-tw, angle)


def character_orbit_product(tw: int, tstar: int, angle) -> Tuple[np.ndarray, np.ndarray]:
    """Both sides of the orbit product identity: the orbit sum of weight
    ``tw`` times ``chi_{tstar}`` equals the orbit sum of shifted characters."""
    lhs = orbit_character_sum(tw, angle) * weyl_character(tstar, angle)
    tw = abs(int(tw))
    if tw == 0:
        rhs = weyl_character(tstar, angle)
    else:
        rhs = weyl_character(tstar + tw, angle) + weyl_character(tstar - tw, angle)
    return lhs, rhs


def character_inner(ta: int, tb: int) -> complex:
    """Quadrature value of ``integral chi_a conj(chi_b)`` on extended labels:
    1 for equal labels, -1 for a signed reflection pair, else 0."""
    grid = class_grid(abs(ta) + abs(tb) + 8)
    return grid.integrate(weyl_character(ta, grid.angles)
                          * np.conj(weyl_character(tb, grid.angles)))


# ---------------------------------------------------------------------------
# Hypoellipticity of the dimension sequence
# ---------------------------------------------------------------------------

def forward_difference(values: np.ndarray, order: int) -> np.ndarray:
    """Iterated forward difference along the lattice (unit twice-spin step)."""
    out = np.asarray(values, dtype=float)
    for _ in range(order):
        out = out[1:] - out[:-1]
    return out


def hypoellipticity_ratio(order: int, band: int) -> Dict[str, float]:
    """Report on ``<xi>^k |Delta_k d| / d`` over labels ``t <= band``.

    Also reports the polynomial bound constant ``sup d / <xi>`` (single
    positive root, so the exponent is one) and a half/full growth ratio.
    """
    if order < 1 or band < 4:
        raise ValueError("need order >= 1 and band >= 4")
    model = su2_model()
    t = np.arange(band + 1 + order)
    d = (t + 1).astype(float)
    diff = forward_difference(d, order)
    brackets = np.array([japanese_bracket(model, int(x)) for x in t[: band + 1]])
    ratios = brackets ** order * np.abs(diff[: band + 1]) / d[: band + 1]
    half = ratios[: band // 2 + 1]
    full_c = float(ratios.max())
    half_c = float(half.max())
    growth = 1.0 if full_c <= 1e-300 else (math.inf if half_c <= 1e-300
                                           else full_c / half_c)
    poly = float((d[: band + 1] / brackets).max())
    return {"order": float(order), "band": float(band), "max_ratio": full_c,
            "growth": growth, "poly_bound_constant": poly}


# ---------------------------------------------------------------------------
# Symbol builders
# ---------------------------------------------------------------------------

def riesz_symbol(model: GroupModel, coeffs: Sequence[float], band: int) -> MatrixSymbol:
    """Symbol of the Riesz transform of a normalized frame field: the field
    symbol divided per label by the square root of the Laplacian eigenvalue,
    zero at the trivial label.  Operator norms are <= 1."""
    a = np.asarray(coeffs, dtype=float)
    if abs(float(np.linalg.norm(a)) - 1.0) > 1e-9:
        raise ValueError("field coefficients must have unit norm")
    base = vector_field_symbol(model, a, band)
    entries = {}
    for lb, mat in base.entries.items():
        lam = casimir_lambda(model, lb)
        if lam == 0.0:
            entries[lb] = np.zeros_like(mat)
        else:
            entries[lb] = mat / lam
    return MatrixSymbol(model, entries, exact_band=band)


def function_of_laplacian(f: Callable[[float], complex], band: int) -> CentralSequence:
    """Central sequence ``s_t = f(lambda_t^2)`` with the Laplacian eigenvalue
    ``lambda_t^2 = (t/2)(t/2 + 1)``.  The caller supplies the value at the
    trivial label through ``f(0)`` (singular functions must patch it)."""
    vals = {t: complex(f((t / 2.0) * (t / 2.0 + 1.0))) for t in range(band + 1)}
    return CentralSequence(su2_model(), vals, zero_beyond=False)
