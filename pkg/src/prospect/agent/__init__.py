"""Particle-rollout planning agent over a learned energy landscape."""

from .landscape import (
    EnergyLandscape,
    decay,
    init_landscape,
    integrate_observation,
    load_landscape_matrix,
    mask,
    mask_offsets,
    record_failed_reach,
    save_landscape,
)
from .params import AgentParams
from .planner import (
    ConsensusResult,
    Planner,
    circular_variance,
    masked_error_sums,
    move_consensus,
    select_fovea,
)
from .rollouts import (
    Rollout,
    RolloutBatch,
    accumulate_error,
    apply_learning,
    first_step_distribution_counts,
    rollout,
    run_rollout_batch,
)

__all__ = [
    "AgentParams",
    "ConsensusResult",
    "EnergyLandscape",
    "Planner",
    "Rollout",
    "RolloutBatch",
    "accumulate_error",
    "apply_learning",
    "circular_variance",
    "decay",
    "first_step_distribution_counts",
    "init_landscape",
    "integrate_observation",
    "load_landscape_matrix",
    "mask",
    "mask_offsets",
    "masked_error_sums",
    "move_consensus",
    "record_failed_reach",
    "rollout",
    "run_rollout_batch",
    "save_landscape",
    "select_fovea",
]
