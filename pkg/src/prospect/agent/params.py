"""Planner parameters and their defaults.

Defaults are a reasonable grid-search starting point, not calibrated truth;
the harness tunes per map. All radii here are in landscape cells.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass


@dataclass(frozen=True)
class AgentParams:
    #: particle rollouts emitted per planning step
    particles: int = 50
    #: softmax temperature for next-cell sampling
    temperature: float = 0.08
    #: particle mass; damps how strongly energy changes drain momentum
    mass: float = 4.0
    #: learning rate for energy updates from finished rollouts
    learning_rate: float = 0.25
    #: move when the circular variance of first-step directions drops below this
    consensus_threshold: float = 0.05
    #: per-step decay of the landscape toward its initial state
    decay_rate: float = 0.02
    #: constant added to the distance floor at initialization
    floor_offset: float = 0.35
    initial_momentum: float = 1.0
    #: fixed momentum cost per rollout step
    momentum_drain: float = 0.12
    max_rollout_steps: int = 40
    #: radius of the low-energy well written around a discovered hold, in cells
    well_radius_cells: float = 1.5
    #: footprint of the per-step learning update around a trajectory cell;
    #: kept narrow so one batch cannot erase the observation structure
    learning_radius_cells: float = 1.5
    #: planning steps the hold just departed stays excluded as a move target;
    #: turns two-hold oscillation into backtracking
    revisit_cooldown: int = 8
    #: a consensus move needs this fraction of the directional first steps
    #: behind the winning hold
    min_plurality: float = 0.25
    #: energy written to observed empty terrain; fixed at 1
    empty_energy: float = 1.0
    #: landscape cells across the map width
    resolution: int = 100

    def __post_init__(self):
        if self.particles < 0:
            raise ValueError("particles must be >= 0")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.mass <= 0:
            raise ValueError("mass must be > 0")
        if not (0 <= self.learning_rate <= 1):
            raise ValueError("learning_rate must be in [0, 1]")
        if self.consensus_threshold <= 0:
            raise ValueError("consensus_threshold must be > 0")
        if not (0 <= self.decay_rate <= 1):
            raise ValueError("decay_rate must be in [0, 1]")
        if not (0 < self.floor_offset < 1):
            raise ValueError("floor_offset must be in (0, 1)")
        if self.initial_momentum <= 0:
            raise ValueError("initial_momentum must be > 0")
        if self.momentum_drain <= 0:
            raise ValueError("momentum_drain must be > 0")
        if self.max_rollout_steps < 1:
            raise ValueError("max_rollout_steps must be >= 1")
        if self.well_radius_cells <= 0:
            raise ValueError("well_radius_cells must be > 0")
        if self.learning_radius_cells <= 0:
            raise ValueError("learning_radius_cells must be > 0")
        if self.revisit_cooldown < 0:
            raise ValueError("revisit_cooldown must be >= 0")
        if not (0 <= self.min_plurality <= 1):
            raise ValueError("min_plurality must be in [0, 1]")
        if self.empty_energy != 1.0:
            raise ValueError("empty_energy is fixed at 1")
        if self.resolution < 16:
            raise ValueError("resolution must be >= 16")

    def replace(self, **kwargs) -> "AgentParams":
        return dataclasses.replace(self, **kwargs)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, data: bytes | str | dict) -> "AgentParams":
        if not isinstance(data, dict):
            data = json.loads(data)
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown agent parameters: {sorted(extra)}")
        return cls(**data)
