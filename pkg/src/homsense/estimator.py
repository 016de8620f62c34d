"""Simulation and maximum-likelihood estimation for lossy HOM counting.

A run of N photon pairs produces multinomial counts (n0, n1, n2) over
the zero/single/coincidence outcomes.  Extremizing the multinomial
likelihood reduces the estimation problem to inverting the dip profile:

    pi W(alpha~) = (n1 - n2 (1+3 gamma)/(1-gamma)) / (n1 + n2)

which is solved by bracketed root finding inside a window where the
profile is strictly monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import (DegenerateDerivative, InvalidSpec, NoRoot,
                     NonMonotoneWindow)
from .hommodel import (DetectionModel, fisher_matrix, outcome_probs,
                       _pi_wigner)
from .statefamilies import Family, PhaseMatchingSpec

__all__ = [
    "TrialCounts",
    "EstimationResult",
    "PrecisionProfile",
    "simulate_trials",
    "mle_estimate",
    "estimate_gamma",
    "precision_profile",
    "cr_saturation_study",
    "default_window",
]

_WINDOW_SAMPLES = 257
_DERIV_FLOOR = 1e-300


@dataclass(frozen=True)
class TrialCounts:
    """Outcome tallies of repeated pair injections."""

    n0: int
    n1: int
    n2: int

    def __post_init__(self) -> None:
        if min(self.n0, self.n1, self.n2) < 0:
            raise InvalidSpec("counts must be nonnegative")
        if self.n_total < 1:
            raise InvalidSpec("need at least one recorded trial")

    @property
    def n_total(self) -> int:
        return self.n0 + self.n1 + self.n2


@dataclass(frozen=True)
class EstimationResult:
    estimate: float | tuple[float, float]
    dip_value_hat: float
    stderr: float
    cr_bound: float
    search_window: tuple
    converged: bool
    gamma_hat: float | None = None


@dataclass(frozen=True)
class PrecisionProfile:
    """Error-propagation precision curve of the coincidence counter."""

    alpha: np.ndarray
    delta: np.ndarray
    optimal_alpha: float
    optimal_delta: float


def simulate_trials(spec: PhaseMatchingSpec, true_mu: float, true_tau: float,
                    det: DetectionModel, n_repeats: int, seed) -> TrialCounts:
    """Multinomial draw of (n0, n1, n2); deterministic for a fixed seed."""
    if n_repeats < 1:
        raise InvalidSpec("n_repeats must be >= 1")
    p = outcome_probs(spec, true_mu, true_tau, det).as_array()
    p = np.clip(p, 0.0, 1.0)
    p /= p.sum()
    rng = np.random.default_rng(seed)
    n0, n1, n2 = (int(v) for v in rng.multinomial(n_repeats, p))
    return TrialCounts(n0=n0, n1=n1, n2=n2)


def estimate_gamma(counts: TrialCounts) -> float:
    """Loss estimate from the zero-count rate, gamma_hat = sqrt(n0/N)."""
    return math.sqrt(counts.n0 / counts.n_total)


def _dip_target(counts: TrialCounts, gamma: float) -> float:
    a = (1.0 + 3.0 * gamma) / (1.0 - gamma)
    return (counts.n1 - counts.n2 * a) / (counts.n1 + counts.n2)


def default_window(spec: PhaseMatchingSpec,
                   which: Literal["tau", "mu"]) -> tuple[float, float]:
    """Monotone inversion window at the preferred operating point.

    Oscillatory two-peak profiles use the first fringe flank (center
    pi/(4 Delta), half-width just under a quarter fringe); Gaussian
    profiles use the one-sided ramp of width two conjugate widths.
    """
    fam = spec.family
    if fam is Family.GAUSSIAN:
        width = 2.0 / spec.sigma if which == "tau" else 2.0 * spec.sigma
        return (0.0, width)
    if fam is Family.FREQUENCY_CAT and which == "tau":
        quarter = math.pi / (4.0 * spec.delta)
        return (quarter * 0.02, quarter * 1.98)
    if fam is Family.TIME_CAT and which == "mu":
        quarter = math.pi / (4.0 * spec.delta_t)
        return (quarter * 0.02, quarter * 1.98)
    raise InvalidSpec(
        f"no window preset for family {fam.value!r} along {which!r}; "
        "pass an explicit (lo, hi) window")


def _profile(spec: PhaseMatchingSpec, which: str, mu: float, tau: float):
    if which == "tau":
        return lambda x: _pi_wigner(spec, mu, x)[0]
    return lambda x: _pi_wigner(spec, x, tau)[0]


def _invert_dip(profile, window: tuple[float, float], target: float) -> float:
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise InvalidSpec("window must satisfy lo < hi")
    xs = np.linspace(lo, hi, _WINDOW_SAMPLES)
    ys = np.array([profile(x) for x in xs])
    dy = np.diff(ys)
    if not ((dy >= -1e-12).all() or (dy <= 1e-12).all()):
        raise NonMonotoneWindow(
            "dip profile is not monotone over the window; shrink it")
    y_lo, y_hi = min(ys[0], ys[-1]), max(ys[0], ys[-1])
    if target < y_lo or target > y_hi:
        # clamp exact-boundary targets produced by noiseless counts
        if abs(target - y_lo) < 1e-12:
            return float(xs[np.argmin(ys)])
        if abs(target - y_hi) < 1e-12:
            return float(xs[np.argmax(ys)])
        raise NoRoot(
            f"dip value {target:.6g} outside profile range "
            f"[{y_lo:.6g}, {y_hi:.6g}] on the window")
    return float(brentq(lambda x: profile(x) - target, lo, hi,
                        xtol=1e-12 * (hi - lo), rtol=8.9e-16))


def _stderr_from_counts(counts: TrialCounts, gamma: float, slope: float) -> float:
    # delta method on the dip-value statistic through the profile slope
    n = counts.n1 + counts.n2
    if n == 0 or abs(slope) < _DERIV_FLOOR:
        return math.inf
    a = (1.0 + 3.0 * gamma) / (1.0 - gamma)
    q = counts.n2 / n
    var_dip = (1.0 + a) ** 2 * q * (1.0 - q) / n
    return math.sqrt(var_dip) / abs(slope)


def mle_estimate(counts: TrialCounts, spec: PhaseMatchingSpec,
                 det: DetectionModel, window,
                 which: Literal["tau", "mu", "joint"] = "tau",
                 *, fixed_mu: float = 0.0,
                 fixed_tau: float = 0.0) -> EstimationResult:
    """Maximum-likelihood parameter estimate from outcome counts.

    Scalar estimation inverts the dip equation inside the window; joint
    estimation maximizes the multinomial likelihood on a local grid
    refined by coordinate descent.
    """
    g = det.gamma
    if which == "joint":
        return _joint_estimate(counts, spec, det, window)
    target = _dip_target(counts, g)
    profile = _profile(spec, which, fixed_mu, fixed_tau)
    alpha = _invert_dip(profile, window, target)
    point = (fixed_mu, alpha) if which == "tau" else (alpha, fixed_tau)
    fm = fisher_matrix(spec, point[0], point[1], det)
    fval = fm.f_tt if which == "tau" else fm.f_mm
    cr = math.inf if fval <= 0 else 1.0 / math.sqrt(counts.n_total * fval)
    _, pdw, pdt = _pi_wigner(spec, point[0], point[1])
    slope = pdt if which == "tau" else pdw
    stderr = _stderr_from_counts(counts, g, slope)
    return EstimationResult(estimate=alpha, dip_value_hat=target,
                            stderr=stderr, cr_bound=cr,
                            search_window=tuple(window), converged=True,
                            gamma_hat=estimate_gamma(counts))


def _log_likelihood(counts: TrialCounts, spec: PhaseMatchingSpec,
                    det: DetectionModel, mu: float, tau: float) -> float:
    p = outcome_probs(spec, mu, tau, det).as_array()
    n = np.array([counts.n0, counts.n1, counts.n2], dtype=float)
    with np.errstate(divide="ignore"):
        logp = np.where(n > 0, np.log(np.clip(p, 1e-300, 1.0)), 0.0)
    return float(np.sum(n * logp))


def _joint_estimate(counts: TrialCounts, spec: PhaseMatchingSpec,
                    det: DetectionModel, window) -> EstimationResult:
    (t_lo, t_hi), (m_lo, m_hi) = window
    taus = np.linspace(t_lo, t_hi, 41)
    mus = np.linspace(m_lo, m_hi, 41)
    ll = np.array([[_log_likelihood(counts, spec, det, m, t)
                    for m in mus] for t in taus])
    it, im = np.unravel_index(np.argmax(ll), ll.shape)
    tau, mu = float(taus[it]), float(mus[im])
    converged = False
    for _ in range(40):
        res = minimize_scalar(
            lambda t: -_log_likelihood(counts, spec, det, mu, t),
            bounds=(t_lo, t_hi), method="bounded",
            options={"xatol": 1e-12 * (t_hi - t_lo)})
        new_tau = float(res.x)
        res = minimize_scalar(
            lambda m: -_log_likelihood(counts, spec, det, m, new_tau),
            bounds=(m_lo, m_hi), method="bounded",
            options={"xatol": 1e-12 * (m_hi - m_lo)})
        new_mu = float(res.x)
        if abs(new_tau - tau) < 1e-10 * (t_hi - t_lo) and \
                abs(new_mu - mu) < 1e-10 * (m_hi - m_lo):
            tau, mu, converged = new_tau, new_mu, True
            break
        tau, mu = new_tau, new_mu
    fm = fisher_matrix(spec, mu, tau, det)
    det_f = fm.f_tt * fm.f_mm - fm.f_mt ** 2
    cr = math.inf if det_f <= 0 else \
        math.sqrt(fm.f_mm / (det_f * counts.n_total))
    return EstimationResult(estimate=(tau, mu),
                            dip_value_hat=_dip_target(counts, det.gamma),
                            stderr=cr, cr_bound=cr,
                            search_window=(tuple(window[0]), tuple(window[1])),
                            converged=converged,
                            gamma_hat=estimate_gamma(counts))


def precision_profile(spec: PhaseMatchingSpec, which: Literal["tau", "mu"],
                      alpha: np.ndarray, det: DetectionModel,
                      *, fixed_mu: float = 0.0,
                      fixed_tau: float = 0.0) -> PrecisionProfile:
    """Error-propagated precision sqrt(P2 (1-P2)) / |dP2/dalpha| per point.

    Zero-slope points (symmetric extrema) report +inf and are excluded
    from the optimum.
    """
    alpha = np.asarray(alpha, dtype=float)
    g = det.gamma
    delta = np.empty_like(alpha)
    for i, a in enumerate(alpha):
        mu, tau = (fixed_mu, a) if which == "tau" else (a, fixed_tau)
        piw, pdw, pdt = _pi_wigner(spec, mu, tau)
        p2 = 0.5 * (1.0 - g) ** 2 * (1.0 - piw)
        dp2 = -0.5 * (1.0 - g) ** 2 * (pdt if which == "tau" else pdw)
        if abs(dp2) < _DERIV_FLOOR * max(1.0, abs(p2)) or abs(dp2) < 1e-14:
            delta[i] = math.inf
            continue
        delta[i] = math.sqrt(max(p2 * (1.0 - p2), 0.0)) / abs(dp2)
    finite = np.isfinite(delta)
    if not finite.any():
        raise DegenerateDerivative("slope vanishes over the whole range")
    best = int(np.argmin(np.where(finite, delta, math.inf)))
    return PrecisionProfile(alpha=alpha, delta=delta,
                            optimal_alpha=float(alpha[best]),
                            optimal_delta=float(delta[best]))


def cr_saturation_study(spec: PhaseMatchingSpec, true_mu: float,
                        true_tau: float, det: DetectionModel,
                        n_repeats: int, n_experiments: int, seed,
                        *, which: Literal["tau", "mu"] = "tau",
                        window=None, n_workers: int = 1) -> dict:
    """Empirical MLE variance against the Cramer-Rao bound.

    Each experiment draws from its own (seed, index) stream and results
    are aggregated in index order, so the report is reproducible and
    independent of worker count.
    """
    if window is None:
        window = default_window(spec, which)

    def one(idx: int):
        counts = simulate_trials(spec, true_mu, true_tau, det, n_repeats,
                                 seed=(seed, idx))
        try:
            res = mle_estimate(counts, spec, det, window, which,
                               fixed_mu=true_mu if which == "tau" else 0.0,
                               fixed_tau=true_tau if which == "mu" else 0.0)
        except (NoRoot, NonMonotoneWindow):
            return idx, math.nan, False
        return idx, float(res.estimate), True

    if n_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            records = sorted(pool.map(one, range(n_experiments)))
    else:
        records = [one(idx) for idx in range(n_experiments)]
    estimates = [est for _, est, ok in records if ok]
    n_failed = n_experiments - len(estimates)
    report = {
        "records": records,
        "n_experiments": n_experiments,
        "n_repeats": n_repeats,
        "n_failed": n_failed,
        "failure_rate": n_failed / n_experiments,
        "true_value": true_tau if which == "tau" else true_mu,
        "estimates": estimates,
    }
    fm = fisher_matrix(spec, true_mu, true_tau, det)
    fisher = fm.f_tt if which == "tau" else fm.f_mm
    report["fisher"] = fisher
    if len(estimates) >= 2:
        arr = np.array(estimates)
        emp_var = float(np.var(arr, ddof=1))
        ratio = emp_var * n_repeats * fisher
        # normal-theory standard error of a sample-variance ratio
        ratio_stderr = ratio * math.sqrt(2.0 / (len(arr) - 1))
        report.update({
            "mean_estimate": float(arr.mean()),
            "bias": float(arr.mean()) - report["true_value"],
            "empirical_var": emp_var,
            "ratio": ratio,
            "ratio_stderr": ratio_stderr,
        })
    return report
