"""Partially observable hold-landscape navigation: maps, task environment,
particle-rollout planning agent, behavioral metrics, batch harness, and the
task service behind the browser client."""

from .agent import AgentParams, Planner
from .env import Action, EnvConfig, Observation, TrialState, TrialStatus, apply_action, init_trial, observe, trial_clock
from .harness import ExperimentConfig, grid_search, run_batch, run_trial
from .mapgen import GeneratorConfig, generate_map
from .maps import Goal, Hold, MapSpec, PathSolution, ReachGraph, build_reach_graph, min_path, parse_map, serialize_map
from .metrics import correlate, difficulty_terciles, trial_score
from .records import TrialRecord, TrialStore, ingest_log, parse_record

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AgentParams",
    "EnvConfig",
    "ExperimentConfig",
    "GeneratorConfig",
    "Goal",
    "Hold",
    "MapSpec",
    "Observation",
    "PathSolution",
    "Planner",
    "ReachGraph",
    "TrialRecord",
    "TrialState",
    "TrialStatus",
    "TrialStore",
    "apply_action",
    "build_reach_graph",
    "correlate",
    "difficulty_terciles",
    "generate_map",
    "grid_search",
    "ingest_log",
    "init_trial",
    "min_path",
    "observe",
    "parse_map",
    "parse_record",
    "run_batch",
    "run_trial",
    "serialize_map",
    "trial_clock",
    "trial_score",
]
