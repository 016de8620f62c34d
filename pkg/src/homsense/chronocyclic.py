"""Chronocyclic Wigner engine: analytic, numeric, grids, marginals.

Normalization convention: W integrates to 1 over (omega, t), so
pi * W(0, 0) = 1 for even normalized amplitudes and the dip formula
I = (1 - pi W)/2 stays inside [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooCoarse, QuadratureFailure, ZeroAnchor
from .numerics import integrate
from .statefamilies import (PhaseMatchingSpec, is_even, spectral_terms,
                            temporal_terms)

__all__ = [
    "WignerGrid",
    "wigner_numeric",
    "wigner_numeric_grid",
    "wigner_analytic",
    "wigner_with_grad",
    "wigner_grid",
    "marginals",
    "inverse_transform",
]

IM_RESIDUE_TOL = 1e-9


@dataclass(frozen=True)
class WignerGrid:
    omega_axis: np.ndarray
    time_axis: np.ndarray
    values: np.ndarray          # shape (n_omega, n_t), real
    norm_estimate: float
    even: bool
    unit_scale: float = 1.0
    spec: PhaseMatchingSpec | None = field(default=None, compare=False)

    @property
    def d_omega(self) -> float:
        return float(self.omega_axis[1] - self.omega_axis[0])

    @property
    def d_time(self) -> float:
        return float(self.time_axis[1] - self.time_axis[0])


def wigner_analytic(spec: PhaseMatchingSpec, omega, t):
    """Closed-form W(omega, t), vectorized over broadcastable arrays."""
    return spectral_terms(spec).wigner(np.asarray(omega, float),
                                       np.asarray(t, float))


def wigner_with_grad(spec: PhaseMatchingSpec, omega, t):
    """(W, dW/domega, dW/dt) in closed form."""
    return spectral_terms(spec).wigner(np.asarray(omega, float),
                                       np.asarray(t, float), grad=True)


def wigner_numeric(spec: PhaseMatchingSpec, omega: float, t: float, *,
                   tol: float = 1e-9) -> float:
    """Quadrature of (1/pi) int e^{2 i x t} f(omega - x) conj(f)(omega + x) dx."""
    terms = spectral_terms(spec)
    lo, hi = terms.support()
    center = 0.5 * (lo + hi)
    radius = 0.5 * (hi - lo)
    reach = radius + abs(omega - center)
    if reach <= 0:
        return 0.0

    def integrand(x):
        return np.exp(2j * x * t) * terms(omega - x) * np.conj(terms(omega + x))

    # Panel count follows both the term-set fringe content (linear phases
    # up to span(Im b)) and the e^{2 i x t} oscillation.
    phase_span = float(np.max(np.abs(terms.b.imag))) + 2.0 * abs(t)
    panels = max(1, len(terms) // 8, int(phase_span * reach / np.pi / 4))
    res = integrate(integrand, -reach, reach, tol=tol, panels=panels)
    val = res.value / np.pi
    if abs(val.imag) > IM_RESIDUE_TOL:
        raise QuadratureFailure(
            f"Wigner quadrature imaginary residue {val.imag:.3e}")
    return float(val.real)


def wigner_numeric_grid(spec: PhaseMatchingSpec, omega_axis: np.ndarray,
                        time_axis: np.ndarray, *, order: int = 128,
                        panels: int | None = None) -> np.ndarray:
    """Fixed-order quadrature of W on a full grid in one matrix product.

    The autocorrelation variable x is confined to half the amplitude
    support, so one shared node set serves every grid point; the
    oscillatory factor e^{2 i x t} then turns the x sum into a dense
    (points x nodes) @ (nodes x times) product.
    """
    from numpy.polynomial.legendre import leggauss

    terms = spectral_terms(spec)
    lo, hi = terms.support()
    half = 0.5 * (hi - lo)
    omega_axis = np.asarray(omega_axis, float)
    time_axis = np.asarray(time_axis, float)
    if panels is None:
        phase_span = (float(np.max(np.abs(terms.b.imag)))
                      + 2.0 * float(np.max(np.abs(time_axis))))
        # ~4 Gauss nodes per oscillation period keeps panel-local
        # Gauss-Legendre quadrature spectrally accurate
        periods = phase_span * half / np.pi
        panels = max(2, math.ceil(4.0 * periods / order))
    nodes, weights = leggauss(order)
    edges = np.linspace(-half, half, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    scale = 0.5 * (edges[1] - edges[0])
    x = (mids[:, None] + scale * nodes[None, :]).ravel()
    w = np.tile(scale * weights, panels)
    out = np.zeros((omega_axis.size, time_axis.size))
    # chunk the node axis: the term-set evaluation holds per-term
    # temporaries of shape (n_omega, chunk)
    for k0 in range(0, x.size, 4096):
        xs = x[k0:k0 + 4096]
        ws = w[k0:k0 + 4096]
        corr = (terms(omega_axis[:, None] - xs[None, :])
                * np.conj(terms(omega_axis[:, None] + xs[None, :]))) * ws
        kernel = np.exp(2j * xs[:, None] * time_axis[None, :])
        out += np.real(corr @ kernel)
    return out / np.pi


def wigner_grid(spec: PhaseMatchingSpec, omega_range: tuple[float, float],
                time_range: tuple[float, float], nx: int, ny: int) -> WignerGrid:
    """Sample the closed-form W on a uniform nx x ny grid."""
    if nx < 16 or ny < 16:
        raise GridTooCoarse("grid needs at least 16 points per axis")
    omega_axis = np.linspace(omega_range[0], omega_range[1], nx)
    time_axis = np.linspace(time_range[0], time_range[1], ny)
    vals = wigner_analytic(spec, omega_axis[:, None], time_axis[None, :])
    norm = float(np.trapezoid(np.trapezoid(vals, time_axis, axis=1), omega_axis))
    if abs(norm - 1.0) > 1e-2:
        raise GridTooCoarse(
            f"grid norm estimate {norm:.6f} deviates from 1 by more than 1e-2")
    return WignerGrid(omega_axis=omega_axis, time_axis=time_axis, values=vals,
                      norm_estimate=norm, even=is_even(spec),
                      unit_scale=spec.unit_scale, spec=spec)


def marginals(grid: WignerGrid) -> tuple[np.ndarray, np.ndarray]:
    """(spectral intensity over omega_axis, temporal intensity over time_axis)."""
    spectral = np.trapezoid(grid.values, grid.time_axis, axis=1)
    temporal = np.trapezoid(grid.values, grid.omega_axis, axis=0)
    return spectral, temporal


def inverse_transform(grid: WignerGrid) -> np.ndarray:
    """Recover f(omega) on omega_axis from the sampled Wigner function.

    Uses f(w) = (1/conj(f(0))) int W(w/2, t) e^{i w t} dt with cubic
    interpolation of the grid along omega.  The anchor f(0) is fixed real
    positive (global-phase convention).
    """
    from scipy.integrate import simpson
    from scipy.interpolate import CubicSpline

    omega = grid.omega_axis
    t = grid.time_axis
    spline = CubicSpline(omega, grid.values, axis=0)
    half = np.clip(omega / 2.0, omega[0], omega[-1])
    w_half = spline(half)                          # W(w/2, t)
    kernel = np.exp(1j * omega[:, None] * t[None, :])
    transformed = simpson(w_half * kernel, x=t, axis=1)

    w0 = spline(0.0)
    f0_sq = float(simpson(w0, x=t))
    if f0_sq < 1e-18:
        raise ZeroAnchor(f"|f(0)|^2 estimate {f0_sq:.3e} too small to anchor")
    return transformed / np.sqrt(f0_sq)
