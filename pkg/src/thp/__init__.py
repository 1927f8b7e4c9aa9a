"""Tempered and generalized fractional Hawkes processes.

Simulation of Hawkes paths and inverse-subordinator clocks, closed-form
moments of the time-changed intensity, and a Monte Carlo harness that
cross-validates every analytic expression.
"""

from .analytics import (
    TfhpModel,
    convolve_kernel_phi,
    gfhp_covariance,
    gfhp_mean,
    gfhp_variance,
    lt_diff,
    lt_sum,
    tfhp_covariance,
    tfhp_mean,
    tfhp_variance,
)
from .bernstein import BernsteinSpec, drift_coefficient, eval_f, levy_tail
from .hawkes import (
    HawkesParams,
    HawkesPath,
    MarkLaw,
    derived,
    hp_covariance,
    hp_mean,
    hp_variance,
    intensity_at,
    simulate_hawkes,
)
from .laplace_inversion import gaver_stehfest, invert_mean_inverse_subordinator, talbot
from .montecarlo import (
    MomentReport,
    MomentRow,
    compare,
    estimate_hp_moments,
    estimate_inverse_lts,
    estimate_tfhp_moments,
    path_streams,
)
from .special_functions import (
    kernel_h_renewal,
    kernel_h_sum,
    ml3,
    phi,
    phi_info,
    upper_incomplete_gamma,
)
from .subordinators import (
    InverseSample,
    SubordinatorPath,
    sample_inverse_on_grid,
    sample_stable_increment,
    sample_tss_increment,
    simulate_subordinator_path,
)

__all__ = [
    "BernsteinSpec",
    "HawkesParams",
    "HawkesPath",
    "InverseSample",
    "MarkLaw",
    "MomentReport",
    "MomentRow",
    "SubordinatorPath",
    "TfhpModel",
    "compare",
    "convolve_kernel_phi",
    "derived",
    "drift_coefficient",
    "estimate_hp_moments",
    "estimate_inverse_lts",
    "estimate_tfhp_moments",
    "eval_f",
    "gaver_stehfest",
    "gfhp_covariance",
    "gfhp_mean",
    "gfhp_variance",
    "hp_covariance",
    "hp_mean",
    "hp_variance",
    "intensity_at",
    "invert_mean_inverse_subordinator",
    "kernel_h_renewal",
    "kernel_h_sum",
    "levy_tail",
    "lt_diff",
    "lt_sum",
    "ml3",
    "path_streams",
    "phi",
    "phi_info",
    "sample_inverse_on_grid",
    "sample_stable_increment",
    "sample_tss_increment",
    "simulate_hawkes",
    "simulate_subordinator_path",
    "talbot",
    "upper_incomplete_gamma",
]

__version__ = "0.1.0"
