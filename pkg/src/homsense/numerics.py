"""Shared numerical kernels: quadrature, Gaussian moments, lattice sums.

Conventions used throughout the package:
  * quadrature is composite Gauss-Legendre with order doubling,
  * "Gaussian moment" means the closed form of  int x^k exp(-a x^2 + b x) dx
    over the real line with complex a (Re a > 0) and complex b.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import InvalidAlpha, NonConvergentSum, QuadratureFailure

__all__ = [
    "QuadratureResult",
    "integrate",
    "gaussian_moment",
    "truncated_double_sum",
    "central_difference",
]

MAX_QUAD_ORDER = 2 ** 14


@lru_cache(maxsize=32)
@lru_cache(maxsize=32)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


# node generation is cubic in the order, so refine by panels past this point
_ORDER_CAP = 2048


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float
    order: int
    panels: int

    @property
    def real(self) -> float:
        return float(np.real(self.value))


def _panel_sum(f: Callable[[np.ndarray], np.ndarray],
               edges: np.ndarray, order: int) -> complex:
    x0, w0 = _leggauss(order)
    total = 0.0 + 0.0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        total += half * np.sum(w0 * np.asarray(f(mid + half * x0)))
    return total


def integrate(f: Callable[[np.ndarray], np.ndarray],
              lo: float, hi: float, *,
              tol: float = 1e-9,
              base_order: int = 64,
              max_order: int = MAX_QUAD_ORDER,
              panels: int = 1) -> QuadratureResult:
    """Integrate a vectorized integrand over [lo, hi].

    The interval is split into equal panels; each refinement doubles the
    Gauss-Legendre order on every panel until successive estimates agree
    within tol (absolute, against an order-doubled reference).  Raises
    QuadratureFailure when the order cap is reached first.
    """
    if not hi > lo:
        raise ValueError("integration interval is empty")
    panels = max(1, int(panels))
    order = max(4, int(base_order))
    edges = np.linspace(lo, hi, panels + 1)
    prev = _panel_sum(f, edges, order)
    effective = order
    while True:
        effective *= 2
        if effective > max_order:
            break
        if order * 2 <= _ORDER_CAP:
            order *= 2
        else:
            panels *= 2
            edges = np.linspace(lo, hi, panels + 1)
        cur = _panel_sum(f, edges, order)
        err = abs(cur - prev)
        if err < tol:
            return QuadratureResult(value=cur, error=err,
                                    order=order, panels=panels)
        prev = cur
    raise QuadratureFailure(
        f"quadrature did not reach tol={tol:g} by order {max_order} "
        f"({panels} panels) on [{lo:g}, {hi:g}]")


def gaussian_moment(alpha: complex, beta: complex, order: int = 0) -> complex:
    """Closed form of  int x^order exp(-alpha x^2 + beta x) dx,  x over R.

    Supports order in {0, 1, 2} with complex alpha (Re alpha > 0) and
    complex beta.  Higher orders are intentionally unsupported; the
    callers only ever need first and second moments.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    if not np.isfinite(alpha.real) or alpha.real <= 0.0:
        raise InvalidAlpha(f"Re(alpha) must be positive, got {alpha!r}")
    base = np.sqrt(np.pi / alpha) * np.exp(beta * beta / (4.0 * alpha))
    if order == 0:
        return base
    mean = beta / (2.0 * alpha)
    if order == 1:
        return mean * base
    if order == 2:
        return (1.0 / (2.0 * alpha) + mean * mean) * base
    raise ValueError(f"order must be 0, 1 or 2, got {order}")


def truncated_double_sum(weight: Callable[[np.ndarray, np.ndarray], np.ndarray],
                         tail_bound: Callable[[int], float], *,
                         tol: float = 1e-12,
                         block: int = 64,
                         max_index: int = 10_000) -> float:
    """Sum weight(n, m) over the quarter lattice n, m >= 0.

    The lattice is consumed in square shells of width `block`.  tail_bound(k)
    must bound the absolute sum of every term with max(n, m) >= k; the sum
    stops once that bound drops below tol.  Raises NonConvergentSum if the
    index cap is reached before the bound is met.
    """
    total = 0.0
    k = 0
    while k < max_index:
        k_next = min(k + block, max_index)
        n = np.arange(0, k_next)
        nn, mm = np.meshgrid(n, n, indexing="ij")
        shell = (nn >= k) | (mm >= k)
        total += float(np.sum(np.asarray(weight(nn, mm))[shell]))
        k = k_next
        if tail_bound(k) < tol:
            return total
    raise NonConvergentSum(
        f"double sum tail bound still {tail_bound(k):g} at index cap {max_index}")


def central_difference(f: Callable[[float], float], x: float, *,
                       scale: float = 1.0) -> float:
    """Second-order central difference with a curvature-balanced step."""
    h = np.cbrt(np.finfo(float).eps) * max(abs(x), abs(scale))
    return (f(x + h) - f(x - h)) / (2.0 * h)
