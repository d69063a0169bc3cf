"""Level-set tools for fully nonlinear degenerate elliptic operators."""

from .acdo import (
    AcdoResult,
    acdo_from_minus,
    acdo_value,
    compute_acdo,
    fat_zero_set_pair,
    project_to_gamma,
    ray_edge,
    signed_distance_to_gamma,
    sup_inf_gap,
)
from .errors import *  # noqa: F401,F403
from .levelsets import (
    ascoli_distance,
    bounded_hausdorff,
    check_condition,
    dist_to_level_set,
    excess_estimate,
    sample_level_set,
)
from .matrixineq import (
    BlockPair,
    block_defect,
    block_inequality_holds,
    forward_direction_check,
    lemma_sm_check,
    resolvent_lower_defect,
    reverse_direction_check,
)
from .operators import MINUS, PLUS, OperatorSpec, check_ellipticity_at_zero, make_operator
from .symmat import eig_sym, lambda_max, lambda_min, op_norm, psd_leq, random_sym, resolvent_transform, sym

__version__ = "0.1.0"
