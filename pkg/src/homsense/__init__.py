"""Time-frequency HOM metrology toolkit.

State families with closed-form Gaussian-sum amplitudes, chronocyclic
Wigner evaluation, quantum/classical Fisher information with detector
loss, and maximum-likelihood estimation with Cramer-Rao checks.
"""

from .chronocyclic import (WignerGrid, inverse_transform, marginals,
                           wigner_analytic, wigner_grid, wigner_numeric,
                           wigner_with_grad)
from .errors import (DegenerateDerivative, GridTooCoarse, HomsenseError,
                     InvalidSpec, NoRoot, NonConvergentSum,
                     NonMonotoneWindow, QuadratureFailure, SingularMatrix,
                     SingularPoint, ZeroAnchor)
from .estimator import (EstimationResult, PrecisionProfile, TrialCounts,
                        cr_saturation_study, default_window, estimate_gamma,
                        mle_estimate, precision_profile, simulate_trials)
from .hommodel import (DetectionModel, FisherMatrix, OutcomeProbabilities,
                       coincidence_prob, fisher_matrix, fisher_mu_analytic,
                       fisher_tau_analytic, outcome_probs)
from .qfi import (CrCovariance, QfiMatrix, grid_moments, grid_variance,
                  invert, printed_inverse, qcr_table, qfi_analytic,
                  qfi_canonical, qfi_mixed_two_color,
                  qfi_mixed_two_color_numeric, qfi_numeric, qfi_total,
                  table1_rows, table2_rows)
from .statefamilies import (Chirp, Family, PhaseMatchingSpec, comb_tooth_sum,
                            load_spec, spec_from_dict, verify_normalization)

__version__ = "0.1.0"
