"""Numerical checks for log-majorization, matrix means, Renyi divergences and
multivariate Golden-Thompson inequalities on small dense matrices."""

from .divergence import (
    alpha_monotonicity_scan,
    d1_normalized,
    d_alpha_z,
    line_scan,
    log_convexity_check,
    q_alpha_z,
    support_relation,
    umegaki,
    z_monotonicity_scan,
)
from .ensembles import random_psd
from .expansion import (
    closed_form_coefficients,
    equality_case_check,
    finite_difference_taylor,
    fourth_order_trace_defect,
    lie_trotter_kato,
    taylor_recursion,
)
from .golden_thompson import (
    beta_density,
    block_equality_triple,
    build_quadrature,
    gt_check,
    gt_log_majorization,
    lieb_triple_integral,
)
from .io import read_matrices, read_matrix, write_matrices
from .linalg import ConvergenceError, DomainError, PreconditionError
from .majorization import (
    araki_pair,
    check_log_majorization,
    check_majorization,
    check_weak_majorization,
    compound_matrix,
    extended_araki_norm_check,
    extended_araki,
    extended_araki_singular_values,
)
from .means import (
    geometric_mean_two,
    karcher_field,
    karcher_mean,
    log_euclidean_mean,
    power_log_majorization_check,
    power_mean,
    riemannian_distance,
)
from .norms import parse_norm
from .suites import RunConfig, run_all, run_suite

__version__ = "0.1.0"
