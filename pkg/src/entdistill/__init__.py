"""Reduction criterion, isotropic states and filter-twirl-XOR distillation."""

from .criteria import (
    Criterion,
    CriterionReport,
    collective_reduction_check,
    entropic_check,
    fef_pure,
    ppt_check,
    reduction_check,
    renyi_entropy,
)
from .distillation import (
    DistillationTrace,
    FilterOperator,
    Outcome,
    apply_filter,
    distill_run,
    filter_from_state,
    gxor_unitary,
    haar_unitary,
    recurrence_exact,
    recurrence_simulated,
    twirl_exact,
    twirl_monte_carlo,
)
from .maps import OperatorMap, apply_map, apply_to_subsystem, is_cp, kraus_from_choi, map_from_action, verify_decomposition
from .states import (
    BipartiteState,
    PureState,
    Side,
    embed_diag,
    fidelity,
    isotropic,
    partial_trace,
    partial_transpose,
    psi_plus,
    random_density,
    random_separable,
    schmidt,
    sigma_example,
    werner,
)

__version__ = "0.1.0"
