"""Partially observable trial state machine.

A trial advances through `apply_action`: the agent may attempt to move to a
hold (success requires the target to coincide with a hold and lie within the
reach radius), and the fovea glides toward its target at a capped velocity,
consuming one environment step per increment. The clock is step-driven; the
trial times out at the configured limit. Attention is sampled egocentrically
(fovea minus agent) once per environment step, matching the stream captured
from human play.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .maps import Hold, MapSpec, Point, dist


class TrialStatus(enum.Enum):
    RUNNING = "RUNNING"
    SUCCESS = "SUCCESS"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class NavigationAttempt:
    target_hold_id: int | None
    t: float
    success: bool


@dataclass(frozen=True)
class Observation:
    """Everything revealed by one look: holds inside the fovea disc, plus the
    disc itself certifying that its complement within the disc is empty."""

    visible_holds: tuple[Hold, ...]
    fovea_position: Point
    disc_radius: float


@dataclass(frozen=True)
class Action:
    """Targets for the next step; None means stay."""

    agent_target: Point | None = None
    fovea_target: Point | None = None


@dataclass(frozen=True)
class EnvConfig:
    step_duration: float = 0.1
    time_limit: float = 60.0
    #: a move targets a hold when the requested point is within
    #: snap_fraction * map width of the hold center
    snap_fraction: float = 0.02
    #: fovea velocity cap, as a multiple of the reach radius per step
    fovea_speed_reach_multiple: float = 2.0

    @property
    def step_limit(self) -> int:
        return int(round(self.time_limit / self.step_duration))


@dataclass(frozen=True)
class TrialState:
    agent_position: Point
    fovea_position: Point
    step_count: int
    path: tuple[tuple[int, float], ...]
    attempts: tuple[NavigationAttempt, ...]
    #: egocentric attention samples, one per environment step: (t, x, y)
    attention: tuple[tuple[float, float, float], ...]
    status: TrialStatus

    @property
    def move_count(self) -> int:
        return len(self.path)


def trial_clock(step_count: int, config: EnvConfig = EnvConfig()) -> float:
    return step_count * config.step_duration


def _in_goal(position: Point, map_spec: MapSpec) -> bool:
    return any(dist(position, g.position) <= g.radius for g in map_spec.goals)


def init_trial(map_spec: MapSpec, config: EnvConfig = EnvConfig()) -> TrialState:
    status = TrialStatus.SUCCESS if _in_goal(map_spec.start, map_spec) else TrialStatus.RUNNING
    return TrialState(
        agent_position=map_spec.start,
        fovea_position=map_spec.start,
        step_count=0,
        path=(),
        attempts=(),
        attention=(),
        status=status,
    )


def observe(state: TrialState, map_spec: MapSpec) -> Observation:
    if state.status is not TrialStatus.RUNNING:
        raise ValueError(f"cannot observe a {state.status.value} trial")
    visible = tuple(
        h for h in map_spec.holds if dist(h.position, state.fovea_position) <= map_spec.fovea_radius
    )
    return Observation(
        visible_holds=visible,
        fovea_position=state.fovea_position,
        disc_radius=map_spec.fovea_radius,
    )


def _snap_to_hold(target: Point, map_spec: MapSpec, tolerance: float) -> Hold | None:
    best: Hold | None = None
    best_d = tolerance
    for hold in map_spec.holds:
        d = dist(target, hold.position)
        if d <= best_d:
            best, best_d = hold, d
    return best


def apply_action(
    state: TrialState,
    action: Action,
    map_spec: MapSpec,
    config: EnvConfig = EnvConfig(),
) -> TrialState:
    if state.status is not TrialStatus.RUNNING:
        raise ValueError(f"cannot act on a {state.status.value} trial")
    for target in (action.agent_target, action.fovea_target):
        if target is not None and not (math.isfinite(target[0]) and math.isfinite(target[1])):
            raise ValueError(f"non-finite action target: {target}")

    agent = state.agent_position
    fovea = state.fovea_position
    step_count = state.step_count
    path = list(state.path)
    attempts = list(state.attempts)
    attention = list(state.attention)
    status = state.status

    fovea_speed = config.fovea_speed_reach_multiple * map_spec.reach_radius
    fovea_target = action.fovea_target
    fovea_steps = 0
    if fovea_target is not None:
        fovea_steps = int(math.ceil(dist(fovea, fovea_target) / fovea_speed))
    total_steps = max(1, fovea_steps)

    snap_tolerance = config.snap_fraction * map_spec.bounds[0]

    for internal in range(total_steps):
        step_count += 1
        now = trial_clock(step_count, config)

        if internal == 0 and action.agent_target is not None:
            hold = _snap_to_hold(action.agent_target, map_spec, snap_tolerance)
            if hold is None:
                attempts.append(NavigationAttempt(target_hold_id=None, t=now, success=False))
            elif dist(agent, hold.position) <= map_spec.reach_radius:
                attempts.append(NavigationAttempt(target_hold_id=hold.id, t=now, success=True))
                agent = hold.position
                path.append((hold.id, now))
            else:
                attempts.append(NavigationAttempt(target_hold_id=hold.id, t=now, success=False))

        if fovea_target is not None and internal < fovea_steps:
            gap = dist(fovea, fovea_target)
            if gap <= fovea_speed:
                fovea = fovea_target
            else:
                ux = (fovea_target[0] - fovea[0]) / gap
                uy = (fovea_target[1] - fovea[1]) / gap
                fovea = (fovea[0] + ux * fovea_speed, fovea[1] + uy * fovea_speed)

        attention.append((now, fovea[0] - agent[0], fovea[1] - agent[1]))

        if _in_goal(agent, map_spec):
            status = TrialStatus.SUCCESS
            break
        if step_count >= config.step_limit:
            status = TrialStatus.TIMEOUT
            break

    return replace(
        state,
        agent_position=agent,
        fovea_position=fovea,
        step_count=step_count,
        path=tuple(path),
        attempts=tuple(attempts),
        attention=tuple(attention),
        status=status,
    )
