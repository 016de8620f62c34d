"""Internal complex-Gaussian term algebra.

Every phase-matching amplitude in this package is an exact finite sum of
terms   c * exp(-alpha (x - a)^2 + b (x - a))   with complex c, alpha, b
and a real center a (Re alpha > 0).  Keeping the real center explicit
avoids catastrophic exponent magnitudes for far-detuned terms (comb teeth,
cat peaks).  Sums of such terms are closed under Fourier transform,
differentiation, polynomial moments, and the Wigner transform, which is
what the analytic engines build on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["GaussTermSet"]

_LOG_PRUNE = np.log(1e-300)


@dataclass(frozen=True)
class GaussTermSet:
    """A finite sum of complex Gaussian terms over one real variable."""

    c: np.ndarray      # complex amplitudes
    a: np.ndarray      # real centers
    alpha: np.ndarray  # complex exponents, Re > 0
    b: np.ndarray      # complex linear coefficients (about each center)

    def __post_init__(self):
        object.__setattr__(self, "c", np.atleast_1d(np.asarray(self.c, complex)))
        object.__setattr__(self, "a", np.atleast_1d(np.asarray(self.a, float)))
        object.__setattr__(self, "alpha",
                           np.atleast_1d(np.asarray(self.alpha, complex)))
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, complex)))
        if np.any(self.alpha.real <= 0):
            raise ValueError("all term exponents need Re(alpha) > 0")

    def __len__(self) -> int:
        return self.c.size

    def scaled(self, factor: complex) -> "GaussTermSet":
        return GaussTermSet(self.c * factor, self.a, self.alpha, self.b)

    # -- pointwise evaluation -------------------------------------------

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        u = x[..., None] - self.a
        expo = -self.alpha * u * u + self.b * u
        np.clip(expo.real, _LOG_PRUNE, None, out=expo.real)
        return np.sum(self.c * np.exp(expo), axis=-1)

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        u = x[..., None] - self.a
        expo = -self.alpha * u * u + self.b * u
        np.clip(expo.real, _LOG_PRUNE, None, out=expo.real)
        return np.sum(self.c * (-2.0 * self.alpha * u + self.b) * np.exp(expo),
                      axis=-1)

    # -- closed-form pair moments ---------------------------------------

    def _pair_coeffs(self):
        """Coefficients of f_j(x) * conj(f_k(x)) as exp(-A u^2 + B u + C0)
        around the midpoint s = (a_j + a_k)/2, for all ordered pairs."""
        aj = self.alpha[:, None]
        ak = np.conj(self.alpha[None, :])
        bj = self.b[:, None]
        bk = np.conj(self.b[None, :])
        s = 0.5 * (self.a[:, None] + self.a[None, :])
        d = 0.5 * (self.a[None, :] - self.a[:, None])  # s - a_j
        A = aj + ak
        B = bj + bk - 2.0 * d * (aj - ak)
        C0 = -d * d * A + d * (bj - bk)
        cc = self.c[:, None] * np.conj(self.c[None, :])
        return cc, A, B, C0, s

    def pair_moment_matrices(self):
        """Matrices M_k[j, l] = int x^k f_j(x) conj(f_l(x)) dx, k = 0, 1, 2."""
        cc, A, B, C0, s = self._pair_coeffs()
        expo = B * B / (4.0 * A) + C0
        np.clip(expo.real, _LOG_PRUNE, None, out=expo.real)
        i0 = cc * np.sqrt(np.pi / A) * np.exp(expo)
        m = B / (2.0 * A) + s
        m2 = 1.0 / (2.0 * A) + (B / (2.0 * A)) ** 2 + 2.0 * s * B / (2.0 * A) + s * s
        return i0, i0 * m, i0 * m2

    def moment(self, order: int) -> complex:
        """Closed form of  int x^order |f(x)|^2 dx  (order in {0, 1, 2})."""
        cc, A, B, C0, s = self._pair_coeffs()
        expo = B * B / (4.0 * A) + C0
        np.clip(expo.real, _LOG_PRUNE, None, out=expo.real)
        i0 = np.sqrt(np.pi / A) * np.exp(expo)
        m = B / (2.0 * A)
        if order == 0:
            val = i0
        elif order == 1:
            val = i0 * (m + s)
        elif order == 2:
            val = i0 * (1.0 / (2.0 * A) + m * m + 2.0 * s * m + s * s)
        else:
            raise ValueError("order must be 0, 1 or 2")
        return complex(np.sum(cc * val))

    def norm_squared(self) -> float:
        return float(np.real(self.moment(0)))

    # -- Fourier transform ----------------------------------------------

    def fourier(self, sign: int) -> "GaussTermSet":
        """Exact transform  g(y) = (1/sqrt(2 pi)) int f(x) e^{i sign x y} dx,
        re-expressed in the same center form."""
        alpha_y = 1.0 / (4.0 * self.alpha)
        beta = 1j * sign * (self.a + self.b / (2.0 * self.alpha))
        const = self.b * self.b / (4.0 * self.alpha)
        a_y = beta.real.copy()
        pos = 2.0 * alpha_y.real
        a_y /= pos
        b_y = beta - 2.0 * alpha_y * a_y
        expo = const + beta * a_y - alpha_y * a_y * a_y
        np.clip(expo.real, _LOG_PRUNE, None, out=expo.real)
        c_y = self.c / np.sqrt(2.0 * self.alpha) * np.exp(expo)
        return GaussTermSet(c_y, a_y, alpha_y, b_y)

    # -- support estimate -----------------------------------------------

    def support(self, rel: float = 1e-12) -> tuple[float, float]:
        """Interval outside which |f| < rel * (peak scale), conservatively."""
        mag = np.abs(self.c)
        cmax = float(np.max(mag))
        lo = np.inf
        hi = -np.inf
        log_rel = np.log(rel)
        for cj, aj, alj, bj in zip(mag, self.a, self.alpha, self.b):
            if cj == 0.0:
                continue
            head = np.log(cj / cmax) - log_rel
            if head <= 0.0:
                continue
            ra = alj.real
            rb = abs(bj.real)
            r = (rb + np.sqrt(rb * rb + 4.0 * ra * head)) / (2.0 * ra)
            lo = min(lo, aj - r)
            hi = max(hi, aj + r)
        if not np.isfinite(lo):
            return (-1.0, 1.0)
        return (float(lo), float(hi))

    # -- Wigner transform ------------------------------------------------

    def wigner(self, omega, t, *, grad: bool = False, chunk: int = 256):
        """W(omega, t) = (1/pi) int e^{2 i x t} f(omega - x) conj(f)(omega + x) dx
        evaluated in closed form, broadcast over omega/t arrays.

        Returns W, or (W, dW/domega, dW/dt) when grad is set.  The pair sum
        is chunked so grid evaluations stay within a bounded working set.
        """
        omega = np.asarray(omega, float)
        t = np.asarray(t, float)
        shape = np.broadcast_shapes(omega.shape, t.shape)
        w = np.zeros(shape, complex)
        dw_o = np.zeros(shape, complex) if grad else None
        dw_t = np.zeros(shape, complex) if grad else None

        n = len(self)
        jj, kk = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        jj = jj.ravel()
        kk = kk.ravel()
        cc = self.c[jj] * np.conj(self.c[kk])
        keep = np.abs(cc) > 1e-18 * float(np.max(np.abs(cc)))
        jj, kk, cc = jj[keep], kk[keep], cc[keep]

        two_it = 2j * t
        for start in range(0, jj.size, chunk):
            sl = slice(start, start + chunk)
            aj = self.alpha[jj[sl]]
            ak = np.conj(self.alpha[kk[sl]])
            bj = self.b[jj[sl]]
            bk = np.conj(self.b[kk[sl]])
            xj = omega[..., None] - self.a[jj[sl]]
            xk = omega[..., None] - self.a[kk[sl]]
            A = aj + ak
            B = 2.0 * aj * xj - 2.0 * ak * xk - bj + bk + two_it[..., None]
            C = -aj * xj * xj - ak * xk * xk + bj * xj + bk * xk
            E = B * B / (4.0 * A) + C
            np.clip(E.real, _LOG_PRUNE, None, out=E.real)
            core = cc[sl] * np.sqrt(np.pi / A) * np.exp(E)
            w += np.sum(core, axis=-1)
            if grad:
                dE_o = B * (aj - ak) / A - 2.0 * aj * xj - 2.0 * ak * xk + bj + bk
                dE_t = 1j * B / A
                dw_o += np.sum(core * dE_o, axis=-1)
                dw_t += np.sum(core * dE_t, axis=-1)
        w /= np.pi
        if not grad:
            return w.real if shape else complex(w).real
        return w.real, (dw_o / np.pi).real, (dw_t / np.pi).real
