"""Hankel determinants, orthogonal polynomials and edge limit laws for the
Gaussian weight with two jump discontinuities."""

__version__ = "0.1.0"

from .airy import AiryValue, airy_ai
from .errors import (DegenerateJumpError, InsufficientConditioningError,
                     LossOfPositivityError, NonConvergenceError,
                     NumericalError, PoleOrSignChangeError,
                     RouteDisagreementError)
from .op_engine import (JumpWeightSpec, QuadratureGrid, RecurrenceTable,
                        build_quadrature, compute_recurrence, eval_monic_op,
                        eval_monic_pair, hankel_dlog_cd,
                        hankel_dlog_subleading, log_hankel_gue)
from .painleve_ii import (CPIIParams, CPIITrajectory, DistributionCurve,
                          conditional_distribution_limit, edge_coordinate,
                          gap_probability_limit, hamiltonian_ii,
                          hankel_ratio_prediction, orthopoly_predictions,
                          solve_as_pii, solve_cpii, tracy_widom_cdf,
                          tw_exponent)
from .painleve_iv import (CPIVState, cpiv_ode_residual, cpiv_scaling_check,
                          cpiv_second_order_residual, dlog_gamma_residual,
                          hamiltonian_iv, piv_reduction_residual,
                          reconstruct_cpiv, thm_identity_residuals)
from .rmt_oracles import (MCEstimate, SpectrumSample,
                          fredholm_airy_discontinuous,
                          mc_conditional_distribution, mc_gap_probability,
                          mc_gap_probability_multi, sample_gue_spectrum)

__all__ = [
    "AiryValue", "airy_ai",
    "NumericalError", "LossOfPositivityError", "DegenerateJumpError",
    "PoleOrSignChangeError", "RouteDisagreementError",
    "InsufficientConditioningError", "NonConvergenceError",
    "JumpWeightSpec", "QuadratureGrid", "RecurrenceTable",
    "build_quadrature", "compute_recurrence", "eval_monic_op",
    "eval_monic_pair", "hankel_dlog_cd", "hankel_dlog_subleading",
    "log_hankel_gue",
    "CPIIParams", "CPIITrajectory", "DistributionCurve",
    "conditional_distribution_limit", "edge_coordinate",
    "gap_probability_limit", "hamiltonian_ii", "hankel_ratio_prediction",
    "orthopoly_predictions", "solve_as_pii", "solve_cpii",
    "tracy_widom_cdf", "tw_exponent",
    "CPIVState", "cpiv_ode_residual", "cpiv_scaling_check",
    "cpiv_second_order_residual", "dlog_gamma_residual", "hamiltonian_iv",
    "piv_reduction_residual", "reconstruct_cpiv", "thm_identity_residuals",
    "MCEstimate", "SpectrumSample", "fredholm_airy_discontinuous",
    "mc_conditional_distribution", "mc_gap_probability",
    "mc_gap_probability_multi", "sample_gue_spectrum",
]
