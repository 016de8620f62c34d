"""Quantum Fisher information over (tau, mu) and Cramer-Rao covariances.

Two conventions coexist behind a tag:

  * ``canonical``: f_tt = 4 Var(omega), f_mm = 4 Var(t), f_mt = -4 cov.
    This is the convention the HOM Fisher information saturates at the dip
    for even states, and the one used for all cross-module consistency.
  * ``printed``: the per-family closed forms as published, whose constant
    bookkeeping differs from canonical by a fixed per-family factor
    (1/4 for Gaussian/grid families, 1/2 for cat families).

The published inverse blocks correspond to inverting canonical/2; that is
what printed_inverse reproduces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._terms import GaussTermSet
from .errors import InvalidSpec, SingularMatrix
from .numerics import integrate
from .statefamilies import (Chirp, Family, PhaseMatchingSpec, spectral_terms,
                            temporal_terms)

__all__ = [
    "QfiMatrix",
    "CrCovariance",
    "qfi_numeric",
    "qfi_canonical",
    "qfi_analytic",
    "grid_moments",
    "grid_variance",
    "qfi_mixed_two_color",
    "qfi_mixed_two_color_numeric",
    "qfi_total",
    "invert",
    "printed_inverse",
    "qcr_table",
    "table1_rows",
    "table2_rows",
]

VAR_CLAMP = 1e-300  # grid variances below this underflow level read as 0


@dataclass(frozen=True)
class QfiMatrix:
    f_tt: float
    f_mm: float
    f_mt: float
    convention: str

    def as_array(self) -> np.ndarray:
        return np.array([[self.f_tt, self.f_mt], [self.f_mt, self.f_mm]])


@dataclass(frozen=True)
class CrCovariance:
    var_tau: float
    var_mu: float
    cov_mu_tau: float
    n_repeats: int


# -- moments -------------------------------------------------------------


def _canonical_from_moments(mo1, mo2, mt1, mt2, cross) -> QfiMatrix:
    var_o = mo2 - mo1 * mo1
    var_t = mt2 - mt1 * mt1
    cov = cross - mo1 * mt1
    return QfiMatrix(4.0 * var_o, 4.0 * var_t, -4.0 * cov, "canonical")


def _cross_moment_exact(spec: PhaseMatchingSpec) -> float:
    """<omega t> = Re int conj(f) omega (-i d/domega) f, in closed form."""
    terms = spectral_terms(spec)
    m0, m1, m2 = terms.pair_moment_matrices()
    aj = terms.alpha[:, None]
    cj = terms.a[:, None]
    bj = terms.b[:, None]
    val = np.sum(-1j * (-2.0 * aj * (m2 - cj * m1) + bj * m1))
    return float(np.real(val))


def qfi_canonical(spec: PhaseMatchingSpec) -> QfiMatrix:
    """Canonical QFI from closed-form phase-space moments (exact)."""
    st = spectral_terms(spec)
    tt = temporal_terms(spec)
    mo1, mo2 = float(np.real(st.moment(1))), float(np.real(st.moment(2)))
    mt1, mt2 = float(np.real(tt.moment(1))), float(np.real(tt.moment(2)))
    return _canonical_from_moments(mo1, mo2, mt1, mt2, _cross_moment_exact(spec))


def _moment_quad(terms: GaussTermSet, order: int) -> float:
    lo, hi = terms.support()
    span = hi - lo
    phase = float(np.max(np.abs(terms.b.imag))) if len(terms) else 0.0
    panels = int(min(4096, max(1, len(terms), phase * span / (2.0 * np.pi))))
    scale = max(1.0, max(abs(lo), abs(hi)) ** order)
    res = integrate(lambda x: x ** order * np.abs(terms(x)) ** 2, lo, hi,
                    tol=1e-10 * scale, base_order=32, panels=panels)
    return res.real


def qfi_numeric(spec: PhaseMatchingSpec) -> QfiMatrix:
    """Canonical QFI with moments evaluated by adaptive quadrature."""
    st = spectral_terms(spec)
    tt = temporal_terms(spec)
    mo1 = _moment_quad(st, 1)
    mo2 = _moment_quad(st, 2)
    mt1 = _moment_quad(tt, 1)
    mt2 = _moment_quad(tt, 2)
    lo, hi = st.support()
    phase = float(np.max(np.abs(st.b.imag)))
    panels = int(min(4096, max(1, len(st), phase * (hi - lo) / (2.0 * np.pi))))
    res = integrate(
        lambda x: np.conj(st(x)) * x * (-1j) * st.derivative(x),
        lo, hi, tol=1e-10 * max(1.0, hi * hi), base_order=32, panels=panels)
    cross = float(np.real(res.value))
    return _canonical_from_moments(mo1, mo2, mt1, mt2, cross)


# -- grid lattice moments ------------------------------------------------


def _grid_weights(R: float, a: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    from .statefamilies import _grid_n_max

    n_max = _grid_n_max(R)
    n = np.arange(n_max + 1)
    nn, mm = np.meshgrid(n, n, indexing="ij")
    log_w = (nn + mm) * (math.log(R) if R > 0 else 0.0) - (nn - mm) ** 2 * a * a
    w = np.where((nn + mm) == 0, 1.0, np.exp(np.clip(log_w, -745.0, 0.0)))
    if R == 0.0:
        w = np.where((nn == 0) & (mm == 0), 1.0, 0.0)
    return nn, mm, w


def grid_moments(R: float, tau_bar_sigma_product: float, order: int,
                 sign: str) -> float:
    """<(n +/- m)^order> with weights R^(n+m) exp(-(n-m)^2 (tau sigma)^2)."""
    if not 0.0 <= R < 1.0:
        raise InvalidSpec("R must be in [0, 1)")
    if order not in (1, 2):
        raise InvalidSpec("order must be 1 or 2")
    if sign not in ("+", "-"):
        raise InvalidSpec("sign must be '+' or '-'")
    if sign == "-" and order == 1:
        return 0.0  # exact by antisymmetry of the weight
    nn, mm, w = _grid_weights(R, tau_bar_sigma_product)
    x = nn + mm if sign == "+" else nn - mm
    return float(np.sum(x ** order * w) / np.sum(w))


def grid_variance(R: float, tau_bar_sigma_product: float, sign: str) -> float:
    """Var(n +/- m); values below the underflow clamp read as exactly 0."""
    m1 = grid_moments(R, tau_bar_sigma_product, 1, sign)
    m2 = grid_moments(R, tau_bar_sigma_product, 2, sign)
    var = m2 - m1 * m1
    if var < VAR_CLAMP:
        return 0.0
    return var


# -- printed per-family forms -------------------------------------------


def _printed_gaussian(spec: PhaseMatchingSpec) -> QfiMatrix:
    s2 = spec.sigma ** 2
    if spec.freq_chirp is not None:
        C = spec.freq_chirp.c
        sgn = spec.freq_chirp.sign
        return QfiMatrix(0.5 * s2, 0.5 * (1.0 / s2 + s2 / C ** 4),
                         -sgn * 0.5 * s2 / C ** 2, "printed")
    if spec.time_chirp is not None:
        Ct = spec.time_chirp.c
        sgn = spec.time_chirp.sign
        return QfiMatrix(0.5 * (s2 + 1.0 / (s2 * Ct ** 4)), 0.5 / s2,
                         sgn * 0.5 / (s2 * Ct ** 2), "printed")
    return QfiMatrix(0.5 * s2, 0.5 / s2, 0.0, "printed")


def _printed_frequency_cat(spec: PhaseMatchingSpec) -> QfiMatrix:
    s2 = spec.sigma ** 2
    d2 = spec.delta ** 2
    eps = math.exp(-d2 / s2)
    f_tt = s2 + 2.0 * d2 / (1.0 + eps)
    f_mm = (1.0 / s2) * (1.0 - 2.0 * (d2 / s2) * eps / (1.0 + eps))
    f_mt = 0.0
    if spec.freq_chirp is not None:
        C = spec.freq_chirp.c
        sgn = spec.freq_chirp.sign
        q2 = 1.0 / (2.0 * C ** 2)  # quadratic-phase scale
        f_mm += q2 * q2 * s2 - (d2 / (2.0 * s2 ** 2)) * eps / (1.0 + eps)
        f_mt = -sgn * q2 * s2 / (1.0 + eps)
    return QfiMatrix(f_tt, f_mm, f_mt, "printed")


def _printed_time_cat(spec: PhaseMatchingSpec) -> QfiMatrix:
    s2 = spec.sigma ** 2
    d2 = spec.delta_t ** 2
    eps = math.exp(-d2 * s2)
    f_mm = 1.0 / s2 + 2.0 * d2 / (1.0 + eps)
    f_tt = s2 * (1.0 - 2.0 * d2 * s2 * eps / (1.0 + eps))
    f_mt = 0.0
    if spec.time_chirp is not None:
        Ct = spec.time_chirp.c
        sgn = spec.time_chirp.sign
        q2 = 1.0 / (2.0 * Ct ** 2)  # temporal quadratic-phase scale
        f_tt += q2 * q2 / s2 - (d2 * s2 ** 2 / 2.0) * eps / (1.0 + eps)
        f_mt = sgn * q2 / (s2 * (1.0 + eps))
    return QfiMatrix(f_tt, f_mm, f_mt, "printed")


def _printed_grid(spec: PhaseMatchingSpec) -> QfiMatrix:
    s2 = spec.sigma ** 2
    a = spec.sigma * spec.tau_bar
    v_plus = grid_variance(spec.reflectivity, a, "+")
    v_minus = grid_variance(spec.reflectivity, a, "-")
    boost = 1.0 + 2.0 * a * a * v_plus
    damp = 1.0 - 2.0 * a * a * v_minus
    if spec.family is Family.AIRY_GRID:
        f_tt = 0.5 * s2 * damp
        f_mm = 0.5 * boost / s2
        f_mt = 0.0
        if spec.freq_chirp is not None:
            C = spec.freq_chirp.c
            sgn = spec.freq_chirp.sign
            f_mm += 0.5 * (s2 / C ** 4) * damp
            f_mt = -sgn * 0.5 * (s2 / C ** 2) * damp
        return QfiMatrix(f_tt, f_mm, f_mt, "printed")
    f_tt = 0.5 * s2 * boost
    f_mm = 0.5 * damp / s2
    f_mt = 0.0
    if spec.time_chirp is not None:
        Ct = spec.time_chirp.c
        sgn = spec.time_chirp.sign
        f_tt += 0.5 * damp / (s2 * Ct ** 4)
        f_mt = sgn * 0.5 * damp / (s2 * Ct ** 2)
    return QfiMatrix(f_tt, f_mm, f_mt, "printed")


def qfi_analytic(spec: PhaseMatchingSpec) -> QfiMatrix:
    """Per-family published QFI expressions (convention tag 'printed')."""
    fam = spec.family
    if fam is Family.GAUSSIAN:
        return _printed_gaussian(spec)
    if fam is Family.FREQUENCY_CAT:
        return _printed_frequency_cat(spec)
    if fam is Family.TIME_CAT:
        return _printed_time_cat(spec)
    if fam in (Family.AIRY_GRID, Family.FREQUENCY_AIRY_GRID):
        return _printed_grid(spec)
    if fam is Family.GAUSSIAN_COMB:
        # The published comb matrix reuses the grid form with re-weighted
        # lattice moments whose printed weights are dimensionally
        # inconsistent; the exact moments fill the same role.
        q = qfi_canonical(spec)
        return QfiMatrix(q.f_tt / 4.0, q.f_mm / 4.0, q.f_mt / 4.0, "printed")
    raise InvalidSpec(f"no printed QFI for family {fam.value}")


# -- two-color statistical mixture --------------------------------------


def _check_mixture(spec: PhaseMatchingSpec):
    if spec.family is not Family.TWO_COLOR_MIXTURE:
        raise InvalidSpec("two-color mixture QFI needs a two_color_mixture spec")


def qfi_mixed_two_color(spec: PhaseMatchingSpec, tau: float) -> float:
    """Temporal QFI curve of an equal mixture of two frequency peaks.

    Closed form of the cross-Wigner sum (4 sum_ij T_ij^2 with the component
    amplitudes carrying weight 1/2 each); vanishes at tau = 0 and stays
    below the coherent cat's canonical QFI.
    """
    _check_mixture(spec)
    s2 = spec.sigma ** 2
    d = spec.delta
    env = math.exp(-2.0 * tau * tau * s2)
    osc = d * math.sin(2.0 * d * tau) + tau * s2 * math.cos(2.0 * d * tau)
    auto = 2.0 * env * osc * osc
    cross = 2.0 * tau * tau * s2 * s2 * env * math.exp(-2.0 * d * d / s2)
    return auto + cross


def qfi_mixed_two_color_numeric(spec: PhaseMatchingSpec, tau: float) -> float:
    """Quadrature oracle: 4 sum_ij (int w sin(2 w tau) f_i f_j dw)^2."""
    _check_mixture(spec)
    s = spec.sigma
    d = spec.delta
    amp = (math.pi * s * s) ** -0.25 / math.sqrt(2.0)

    def peak(sign):
        return lambda w: amp * np.exp(-(w - sign * d) ** 2 / (2.0 * s * s))

    lo, hi = -d - 8.0 * s, d + 8.0 * s
    panels = max(1, int(2.0 * abs(tau) * (hi - lo) / np.pi))
    total = 0.0
    for si in (+1, -1):
        for sj in (+1, -1):
            fi, fj = peak(si), peak(sj)
            res = integrate(
                lambda w: w * np.sin(2.0 * w * tau) * fi(w) * fj(w),
                lo, hi, tol=1e-13, panels=panels)
            total += res.real ** 2
    return 4.0 * total


# -- totals, inverses, tables -------------------------------------------


def qfi_total(spec_minus: PhaseMatchingSpec, sigma_plus: float) -> QfiMatrix:
    """Full biphoton QFI with a Gaussian pump sector of width sigma_plus."""
    if not sigma_plus > 0:
        raise InvalidSpec("sigma_plus must be positive")
    minus = qfi_canonical(spec_minus)
    return QfiMatrix(minus.f_tt + 4.0 * (sigma_plus ** 2 / 2.0),
                     minus.f_mm + 4.0 / (2.0 * sigma_plus ** 2),
                     minus.f_mt, "canonical")


def invert(q: QfiMatrix, n_repeats: int = 1) -> CrCovariance:
    """Cramer-Rao covariance (1/N) * inverse(q)."""
    if n_repeats < 1:
        raise InvalidSpec("n_repeats must be >= 1")
    det = q.f_tt * q.f_mm - q.f_mt * q.f_mt
    if not det > 1e-12 * abs(q.f_tt * q.f_mm):
        raise SingularMatrix(f"QFI matrix determinant {det:g} too small")
    scale = 1.0 / (n_repeats * det)
    return CrCovariance(var_tau=q.f_mm * scale, var_mu=q.f_tt * scale,
                        cov_mu_tau=-q.f_mt * scale, n_repeats=n_repeats)


def printed_inverse(spec: PhaseMatchingSpec, n_repeats: int = 1) -> CrCovariance:
    """The published inverse-QFI blocks: inverse of canonical/2."""
    q = qfi_canonical(spec)
    half = QfiMatrix(q.f_tt / 2.0, q.f_mm / 2.0, q.f_mt / 2.0, "canonical")
    return invert(half, n_repeats)


def qcr_table(rows, n_repeats: int = 1) -> list[dict]:
    """Precision rows sqrt(var * N) for (label, spec) pairs."""
    out = []
    for label, spec in rows:
        cov = printed_inverse(spec, 1)
        out.append({
            "label": label,
            "family": spec.family.value,
            "sigma": spec.sigma,
            "delta_tau_sqrt_n": math.sqrt(cov.var_tau),
            "delta_mu_sqrt_n": math.sqrt(cov.var_mu),
            "delta_cross_sqrt_n": math.copysign(
                math.sqrt(abs(cov.cov_mu_tau)), cov.cov_mu_tau),
        })
    return out


def table1_rows() -> list[tuple[str, PhaseMatchingSpec]]:
    """Gaussian source survey rows (platform bandwidths in rad/s)."""
    two_pi = 2.0 * math.pi
    return [
        ("algaas_broadband", PhaseMatchingSpec(Family.GAUSSIAN,
                                               sigma=two_pi * 10.9e12)),
        ("ppktp_narrowband", PhaseMatchingSpec(Family.GAUSSIAN,
                                               sigma=two_pi * 0.5e12)),
        ("laser_cooled", PhaseMatchingSpec(Family.GAUSSIAN, sigma=1e6)),
        ("bulk_crystal", PhaseMatchingSpec(Family.GAUSSIAN,
                                           sigma=two_pi * 1.5e12)),
        ("laser_cooled_freq_chirp",
         PhaseMatchingSpec(Family.GAUSSIAN, sigma=1e6,
                           freq_chirp=Chirp(2e5))),
        ("bulk_time_chirp",
         PhaseMatchingSpec(Family.GAUSSIAN, sigma=two_pi * 1.5e12,
                           time_chirp=Chirp(3.16e-13))),
    ]


def table2_rows() -> list[tuple[str, PhaseMatchingSpec]]:
    """Fixed-platform comparison of Gaussian vs cat vs grid states."""
    sig_t = 2.0 * math.pi * 10.9e12   # broadband platform, time column
    sig_f = 1e6                       # narrowband platform, frequency column
    return [
        ("time_gaussian", PhaseMatchingSpec(Family.GAUSSIAN, sigma=sig_t)),
        ("time_cat_like", PhaseMatchingSpec(Family.FREQUENCY_CAT, sigma=sig_t,
                                            delta=10.0 * sig_t)),
        ("time_grid", PhaseMatchingSpec(Family.FREQUENCY_AIRY_GRID,
                                        sigma=sig_t, reflectivity=0.9,
                                        tau_bar=10.0 / sig_t)),
        ("freq_gaussian", PhaseMatchingSpec(Family.GAUSSIAN, sigma=sig_f)),
        ("freq_cat_like", PhaseMatchingSpec(Family.TIME_CAT, sigma=sig_f,
                                            delta_t=10.0 / sig_f)),
        ("freq_grid", PhaseMatchingSpec(Family.AIRY_GRID, sigma=sig_f,
                                        reflectivity=0.9, tau_bar=10.0 / sig_f)),
    ]
