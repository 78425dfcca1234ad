"""Payload sizing for ultra-reliable multi-antenna downlink links.

Closed-form and numeric maximum-payload allocation under a strict error
probability target, a finite-blocklength refinement, and a Monte Carlo link
simulator that serves as ground truth for all of it.
"""
from .finite_blocklength import (
    FbEvaluation,
    channel_dispersion,
    fb_error_average,
    fb_error_conditional,
    fb_kstar,
    shannon_capacity,
)
from .numerics import (
    Bracket,
    BracketError,
    QuadratureError,
    QuadratureSpec,
    find_root_monotone,
    integrate_semi_infinite,
    q_function,
    regularized_gamma_lower,
    regularized_gamma_upper,
)
from .rate_control import (
    LinkConfig,
    Method,
    QuantileMethod,
    RateSolution,
    Scheme,
    combined_sir_pdf,
    k_for_threshold,
    lomax_sum_cdf,
    lomax_sum_cdf_lower_bound,
    lomax_sum_pdf,
    mrc_error,
    mrc_kstar,
    mrc_quantile_closed,
    mrc_quantile_numeric,
    sc_error,
    sc_kstar_approx,
    sc_kstar_exact,
    sc_pdf,
    theta_for_rate,
)
from .simulator import (
    Semantics,
    SimReport,
    SimSpec,
    UndersampledError,
    run_sim,
    sample_sir,
    sample_sir_block,
    wilson_interval,
)
from .sir_model import (
    SirDistribution,
    Topology,
    beta_from_path_losses,
    beta_from_topology,
    load_topology,
    sir_cdf_approx,
    sir_cdf_exact,
    sir_pdf_approx,
    sir_pdf_exact,
)

__version__ = "0.1.0"
