"""Generalized HOM measurement model: dip curve, lossy counts, Fisher info.

The interferometer output is summarized by the coincidence probability
I(mu, tau) = (1 - pi W(mu, tau))/2.  Detector loss is modeled by a
beam-splitter of reflectivity gamma in front of each photodetector,
which folds the two-photon statistics into three observable outcomes
(no click, single click, coincidence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .chronocyclic import wigner_analytic, wigner_with_grad
from .errors import InvalidSpec
from .statefamilies import Family, PhaseMatchingSpec, spectral_terms, temporal_terms

__all__ = [
    "DetectionModel",
    "OutcomeProbabilities",
    "FisherMatrix",
    "coincidence_prob",
    "outcome_probs",
    "fisher_matrix",
    "fisher_tau_analytic",
    "fisher_mu_analytic",
]

# below this distance from the dip bottom the FI ratio is 0/0
_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class DetectionModel:
    """Photodetector loss: beam-splitter reflectivity gamma per arm."""

    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.gamma < 1.0):
            raise InvalidSpec(f"gamma must lie in [0, 1), got {self.gamma}")


@dataclass(frozen=True)
class OutcomeProbabilities:
    """Probabilities of the three count patterns of a lossy HOM run."""

    p0: float
    p1: float
    p2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2])


@dataclass(frozen=True)
class FisherMatrix:
    """Classical FI of the three-outcome measurement over (tau, mu).

    ``singular`` marks points where the dip bottom made the leading
    ratio 0/0 and the entries are the analytic limit instead.
    """

    f_tt: float
    f_mm: float
    f_mt: float
    singular: bool = False

    def as_array(self) -> np.ndarray:
        return np.array([[self.f_tt, self.f_mt], [self.f_mt, self.f_mm]])


def _pi_wigner(spec: PhaseMatchingSpec, mu: float, tau: float):
    w, dw, dt = wigner_with_grad(spec, mu, tau)
    return (math.pi * float(np.real(w)),
            math.pi * float(np.real(dw)),
            math.pi * float(np.real(dt)))


def coincidence_prob(spec: PhaseMatchingSpec, mu: float, tau: float) -> float:
    """Coincidence rate I(mu, tau) = (1 - pi W(mu, tau))/2, clamped to [0, 1]."""
    piw = math.pi * float(wigner_analytic(spec, mu, tau))
    return min(1.0, max(0.0, 0.5 * (1.0 - piw)))


def outcome_probs(spec: PhaseMatchingSpec, mu: float, tau: float,
                  det: DetectionModel) -> OutcomeProbabilities:
    """Zero/single/coincidence probabilities behind lossy detectors."""
    g = det.gamma
    piw = 1.0 - 2.0 * coincidence_prob(spec, mu, tau)
    p0 = g * g
    p1 = 0.5 * (1.0 - g) * ((1.0 + 3.0 * g) + (1.0 - g) * piw)
    p2 = 0.5 * (1.0 - g) ** 2 * (1.0 - piw)
    p1 = min(1.0, max(0.0, p1))
    p2 = min(1.0, max(0.0, p2))
    return OutcomeProbabilities(p0=p0, p1=p1, p2=p2)


def _bracket(piw: float, g: float) -> float:
    return 1.0 / (1.0 - piw) + 1.0 / ((1.0 + 3.0 * g) / (1.0 - g) + piw)


@lru_cache(maxsize=None)
def _fd_scales(spec: PhaseMatchingSpec) -> tuple[float, float]:
    # conjugate-variable widths set the finite-difference step
    st, tt = spectral_terms(spec), temporal_terms(spec)
    var_w = float(np.real(st.moment(2) - st.moment(1) ** 2))
    var_t = float(np.real(tt.moment(2) - tt.moment(1) ** 2))
    return 1.0 / math.sqrt(max(var_w, 1e-300)), 1.0 / math.sqrt(max(var_t, 1e-300))


def _fisher_regular(spec: PhaseMatchingSpec, mu: float, tau: float,
                    g: float) -> tuple[float, float, float]:
    piw, pdw, pdt = _pi_wigner(spec, mu, tau)
    pref = 0.5 * (1.0 - g) ** 2 * _bracket(piw, g)
    return pref * pdt * pdt, pref * pdw * pdw, pref * pdt * pdw


def fisher_matrix(spec: PhaseMatchingSpec, mu: float, tau: float,
                  det: DetectionModel) -> FisherMatrix:
    """FI matrix of the three-outcome multinomial at the point (mu, tau).

    Uses closed-form Wigner gradients.  Exactly at the dip bottom
    (pi W = 1) the diagonal entries are continued by evaluating the
    ratio a small step off the singular point on either side; the cross
    term limit along either axis is zero there.
    """
    g = det.gamma
    piw, _, _ = _pi_wigner(spec, mu, tau)
    if 1.0 - piw > _SINGULAR_TOL:
        f_tt, f_mm, f_mt = _fisher_regular(spec, mu, tau, g)
        return FisherMatrix(f_tt=f_tt, f_mm=f_mm, f_mt=f_mt)
    scale_t, scale_m = _fd_scales(spec)
    # quarter-power step: the continued ratio loses half the mantissa
    # to cancellation in 1 - pi W near the dip bottom
    eps4 = float(np.finfo(float).eps) ** 0.25
    h_t = eps4 * max(scale_t, abs(tau))
    h_m = eps4 * max(scale_m, abs(mu))
    f_tt = 0.5 * (_fisher_regular(spec, mu, tau + h_t, g)[0]
                  + _fisher_regular(spec, mu, tau - h_t, g)[0])
    f_mm = 0.5 * (_fisher_regular(spec, mu + h_m, tau, g)[1]
                  + _fisher_regular(spec, mu - h_m, tau, g)[1])
    return FisherMatrix(f_tt=f_tt, f_mm=f_mm, f_mt=0.0, singular=True)


# -- closed forms for the two-peak superposition -------------------------


def _require_frequency_cat(spec: PhaseMatchingSpec) -> None:
    if spec.family is not Family.FREQUENCY_CAT:
        raise InvalidSpec("closed-form FI is available for the "
                          "frequency_cat family only")
    if spec.freq_chirp is not None:
        raise InvalidSpec("closed-form FI does not cover chirped states")


def cat_dip_curve(spec: PhaseMatchingSpec, tau: float) -> tuple[float, float]:
    """(pi W, pi dW/dtau) of a two-peak superposition on the mu = 0 cut."""
    s2 = spec.sigma ** 2
    d = spec.delta
    eps = math.exp(-d * d / s2)
    env = math.exp(-tau * tau * s2)
    piw = env * (math.cos(2.0 * d * tau) + eps) / (1.0 + eps)
    pdt = -env * (2.0 * tau * s2 * (math.cos(2.0 * d * tau) + eps)
                  + 2.0 * d * math.sin(2.0 * d * tau)) / (1.0 + eps)
    return piw, pdt


def fisher_tau_analytic(spec: PhaseMatchingSpec, tau: float,
                        det: DetectionModel) -> float:
    """Closed-form F_tt(tau) of the two-peak state on the mu = 0 cut.

    At tau = 0 the 0/0 ratio is replaced by its series limit
    2 (1-gamma)^2 (sigma^2 + 2 Delta^2/(1+eps)).
    """
    _require_frequency_cat(spec)
    g = det.gamma
    s2 = spec.sigma ** 2
    d = spec.delta
    eps = math.exp(-d * d / s2)
    if tau == 0.0:
        return 2.0 * (1.0 - g) ** 2 * (s2 + 2.0 * d * d / (1.0 + eps))
    piw, pdt = cat_dip_curve(spec, tau)
    return 0.5 * (1.0 - g) ** 2 * pdt * pdt * _bracket(piw, g)


def fisher_mu_analytic(spec: PhaseMatchingSpec, mu: float,
                       det: DetectionModel) -> float:
    """Closed-form F_mm(mu) of the two-peak state on the tau = 0 cut.

    The derivative is odd in mu, so the value at the symmetric point
    mu = 0 is zero.
    """
    _require_frequency_cat(spec)
    if mu == 0.0:
        return 0.0
    g = det.gamma
    s2 = spec.sigma ** 2
    d = spec.delta
    eps = math.exp(-d * d / s2)
    norm = 2.0 * (1.0 + eps)
    e_m = math.exp(-(mu - d) ** 2 / s2)
    e_p = math.exp(-(mu + d) ** 2 / s2)
    e_0 = math.exp(-mu * mu / s2)
    piw = (e_m + e_p + 2.0 * e_0) / norm
    pdw = -2.0 * ((mu - d) * e_m + (mu + d) * e_p + 2.0 * mu * e_0) / (s2 * norm)
    return 0.5 * (1.0 - g) ** 2 * pdw * pdw * _bracket(piw, g)
