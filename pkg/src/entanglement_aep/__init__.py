"""Entanglement measures on multipartite pure states, their smoothings and AEP checks."""

from .entropy import binary_h, kl, renyi, shannon, tv, variational_renyi_check
from .locc import (
    ConditionallyPureState,
    OneStepChannel,
    apply,
    check_cond_pure_distance,
    check_max_eig,
    check_outcome_prob_lower,
    compose_and_discard,
    monotone_avg_check,
    random_one_step,
)
from .measures import MeasureSpec, Term, continuity_bound, evaluate
from .smoothing import (
    OptConfig,
    phi_estimate,
    regularized_smooth_h0,
    smooth_h0_count,
    smooth_infimum_estimate,
    smooth_support,
    typical_projector,
)
from .tensor_core import (
    MultipartiteState,
    direct_sum,
    ghz,
    marginal,
    marginal_spectrum,
    random_state,
    schmidt,
    tensor_power,
    tensor_product,
)

__all__ = [
    "ConditionallyPureState",
    "MeasureSpec",
    "MultipartiteState",
    "OneStepChannel",
    "OptConfig",
    "Term",
    "apply",
    "binary_h",
    "check_cond_pure_distance",
    "check_max_eig",
    "check_outcome_prob_lower",
    "compose_and_discard",
    "continuity_bound",
    "direct_sum",
    "evaluate",
    "ghz",
    "kl",
    "marginal",
    "marginal_spectrum",
    "monotone_avg_check",
    "phi_estimate",
    "random_one_step",
    "random_state",
    "regularized_smooth_h0",
    "renyi",
    "schmidt",
    "shannon",
    "smooth_h0_count",
    "smooth_infimum_estimate",
    "smooth_support",
    "tensor_power",
    "tensor_product",
    "tv",
    "typical_projector",
    "variational_renyi_check",
]
