"""Fovea and move policies, and the planner that composes them.

Each planning step: integrate the latest observation (and any reach failure
it just suffered), run a batch of rollouts from the agent's cell against the
frozen raster, tally the error map from pre-learning energies, apply the
learning updates in particle order, decay the landscape toward its initial
state, then pick the next fovea (masked error-map argmax) and next move
(first-step consensus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..env import Action, Observation, TrialState
from ..maps import Point, PublicMapView, dist
from ..rng import derive
from .landscape import Cell, EnergyLandscape, init_landscape, integrate_observation, decay, mask_offsets, record_failed_reach
from .params import AgentParams
from .rollouts import RolloutBatch, accumulate_error, apply_learning, run_rollout_batch


@njit(cache=True)
def _masked_sum_kernel(psi, mask_di, mask_dj):
    h, w = psi.shape
    n_off = mask_di.shape[0]
    out = np.zeros((h, w), np.float64)
    for i in range(h):
        for j in range(w):
            v = psi[i, j]
            if v != 0.0:
                for t in range(n_off):
                    ii = i + mask_di[t]
                    jj = j + mask_dj[t]
                    if 0 <= ii < h and 0 <= jj < w:
                        out[ii, jj] += v
    return out


@njit(cache=True)
def _argmax_kernel(sums, fi, fj):
    h, w = sums.shape
    best_i, best_j = 0, 0
    best = -1e300
    best_d2 = np.int64(2**62)
    for i in range(h):
        for j in range(w):
            s = sums[i, j]
            if s > best:
                best = s
                best_i, best_j = i, j
                best_d2 = (i - fi) ** 2 + (j - fj) ** 2
            elif s == best:
                d2 = (i - fi) ** 2 + (j - fj) ** 2
                if d2 < best_d2:
                    best_i, best_j = i, j
                    best_d2 = d2
    return best_i, best_j


def masked_error_sums(error_map: np.ndarray, fovea_radius_cells: float) -> np.ndarray:
    """For every cell, the sum of the error map within the fovea mask."""
    di, dj = mask_offsets(fovea_radius_cells)
    return _masked_sum_kernel(error_map, di, dj)


def select_fovea(
    error_map: np.ndarray,
    fovea_radius_cells: float,
    current: Cell,
) -> Cell | None:
    """Cell whose fovea mask covers the most accumulated error; ties go to
    the candidate nearest the current fovea, then lowest row-major index.
    Returns None (stay) when the error map is identically zero."""
    if not np.any(error_map):
        return None
    sums = masked_error_sums(error_map, fovea_radius_cells)
    i, j = _argmax_kernel(sums, current[0], current[1])
    return (int(i), int(j))


def circular_variance(angles: np.ndarray) -> float:
    """1 - mean resultant length; 0 for identical angles, ~1 for angles
    spread uniformly around the circle. Wrap-safe, unlike a naive variance."""
    if angles.size == 0:
        raise ValueError("need at least one angle")
    c = float(np.mean(np.cos(angles)))
    s = float(np.mean(np.sin(angles)))
    return 1.0 - math.hypot(c, s)


@dataclass(frozen=True)
class ConsensusResult:
    variance: float
    hold_id: int | None


def move_consensus(
    first_steps: list[tuple[Cell, Cell]],
    consensus_threshold: float,
    known_holds: dict[int, Cell],
    goal_cells: list[Cell],
    well_radius_cells: float,
    excluded_hold_ids: frozenset[int] = frozenset(),
    min_plurality: float = 0.0,
) -> ConsensusResult:
    """Decide whether the batch agrees on a direction, and if so, which known
    hold the plurality of first steps lands on.

    Zero-displacement first steps carry no direction and are ignored. When
    the circular variance of the remaining directions is below the threshold,
    each first-step cell maps to the nearest known hold within the well
    radius; unmapped cells are dropped. `excluded_hold_ids` removes
    non-candidates (the hold the agent occupies, and any under a revisit
    cooldown); a winner must carry at least `min_plurality` of the votes
    mapped to candidate holds. Ties between holds break toward the hold
    nearest a goal, then by id."""
    dirs = [(b[0] - a[0], b[1] - a[1]) for a, b in first_steps if b != a]
    if not dirs:
        return ConsensusResult(variance=1.0, hold_id=None)
    angles = np.array([math.atan2(di, dj) for di, dj in dirs])
    variance = circular_variance(angles)
    if variance >= consensus_threshold:
        return ConsensusResult(variance=variance, hold_id=None)

    counts: dict[int, int] = {}
    for a, b in first_steps:
        if b == a:
            continue
        best_id, best_d = None, well_radius_cells
        for hold_id, cell in known_holds.items():
            if hold_id in excluded_hold_ids:
                continue
            d = math.hypot(b[0] - cell[0], b[1] - cell[1])
            if d <= best_d:
                best_id, best_d = hold_id, d
        if best_id is not None:
            counts[best_id] = counts.get(best_id, 0) + 1
    if not counts or max(counts.values()) < min_plurality * sum(counts.values()):
        return ConsensusResult(variance=variance, hold_id=None)

    def goal_gap(hold_id: int) -> float:
        cell = known_holds[hold_id]
        return min(math.hypot(cell[0] - g[0], cell[1] - g[1]) for g in goal_cells)

    winner = min(counts, key=lambda hid: (-counts[hid], goal_gap(hid), hid))
    return ConsensusResult(variance=variance, hold_id=winner)


class Planner:
    """Stateful planning agent for one trial.

    Built from the public map view only (bounds, start, goals, radii); holds
    enter its world model exclusively through observations, preserving
    partial observability.
    """

    def __init__(self, view: PublicMapView, params: AgentParams, seed: int):
        self.params = params
        self.seed = seed
        self.view = view
        self.land: EnergyLandscape = init_landscape(
            view.bounds, view.goals, params.floor_offset, params.resolution
        )
        self.reach_cells = max(1, self.land.units_to_cells(view.reach_radius))
        self.fovea_cells = max(1, self.land.units_to_cells(view.fovea_radius))
        self.known_holds: dict[int, Point] = {}
        self.step_index = 0
        self._seen_attempts = 0
        self._seen_moves = 0
        self._departed_hold: int | None = None
        self._departed_at = 0
        #: reaches refuted by a failed attempt: (hold occupied, target hold);
        #: the world is static, so a refuted pair is never retried in place
        self._refuted: set[tuple[int | None, int]] = set()
        self.last_batch: RolloutBatch | None = None
        self.last_error_map: np.ndarray | None = None

    def _known_hold_cells(self) -> dict[int, Cell]:
        return {hid: self.land.pos_to_cell(p) for hid, p in self.known_holds.items()}

    def _occupied_hold_id(self, agent_position: Point) -> int | None:
        for hold_id, position in self.known_holds.items():
            if dist(position, agent_position) <= 1e-9:
                return hold_id
        return None

    def _track_departure(self, state: TrialState) -> None:
        if len(state.path) > self._seen_moves:
            if len(state.path) >= 2:
                self._departed_hold = state.path[-2][0]
                self._departed_at = self.step_index
            self._seen_moves = len(state.path)

    def _handle_new_attempts(self, state: TrialState) -> None:
        occupied = self._occupied_hold_id(state.agent_position)
        for attempt in state.attempts[self._seen_attempts :]:
            if not attempt.success and attempt.target_hold_id is not None:
                self._refuted.add((occupied, attempt.target_hold_id))
                target = self.known_holds.get(attempt.target_hold_id)
                if target is not None:
                    record_failed_reach(
                        self.land,
                        self.land.pos_to_cell(state.agent_position),
                        self.land.pos_to_cell(target),
                        self.params.well_radius_cells,
                        self.params.empty_energy,
                    )
        self._seen_attempts = len(state.attempts)

    def step(self, state: TrialState, observation: Observation) -> Action:
        params = self.params
        for hold in observation.visible_holds:
            self.known_holds[hold.id] = hold.position
        integrate_observation(
            self.land,
            observation.fovea_position,
            observation.disc_radius,
            [h.position for h in observation.visible_holds],
            params.well_radius_cells,
            params.empty_energy,
        )
        self._handle_new_attempts(state)
        self._track_departure(state)

        agent_cell = self.land.pos_to_cell(state.agent_position)
        batch_seed = derive(self.seed, self.step_index)
        batch = run_rollout_batch(
            self.land,
            agent_cell,
            self.reach_cells,
            params.particles,
            params.temperature,
            params.initial_momentum,
            params.momentum_drain,
            params.mass,
            params.max_rollout_steps,
            batch_seed,
        )
        error_map = accumulate_error(batch, self.land.energy)
        apply_learning(self.land, batch, params.learning_radius_cells, params.learning_rate)
        decay(self.land, params.decay_rate)
        self.last_batch = batch
        self.last_error_map = error_map

        fovea_cell = self.land.pos_to_cell(state.fovea_position)
        target_cell = select_fovea(error_map, self.fovea_cells, fovea_cell)
        fovea_target: Point | None = None
        if target_cell is not None and target_cell != fovea_cell:
            fovea_target = self.land.cell_center(target_cell)

        goal_cells = [self.land.pos_to_cell(g.position) for g in self.view.goals]
        occupied = self._occupied_hold_id(state.agent_position)
        excluded = {to for frm, to in self._refuted if frm == occupied}
        if occupied is not None:
            excluded.add(occupied)
        if (
            self._departed_hold is not None
            and self.step_index - self._departed_at < params.revisit_cooldown
        ):
            excluded.add(self._departed_hold)
        consensus = move_consensus(
            batch.first_steps(),
            params.consensus_threshold,
            self._known_hold_cells(),
            goal_cells,
            params.well_radius_cells,
            excluded_hold_ids=frozenset(excluded),
            min_plurality=params.min_plurality,
        )
        agent_target: Point | None = None
        if consensus.hold_id is not None:
            agent_target = self.known_holds[consensus.hold_id]

        self.step_index += 1
        return Action(agent_target=agent_target, fovea_target=fovea_target)
