"""Particle rollouts over the energy landscape.

A rollout hops cell to cell, sampling each successor from a softmax over the
energies inside the reach mask around the current cell. Momentum drains by a
fixed amount per step plus the energy climbed (scaled by mass); descending
recovers momentum, capped at the initial value. A rollout ends when momentum
is exhausted or the step cap is hit.

The kernels run under numba and draw from splitmix64 streams keyed by
(batch seed, particle index), so a batch is deterministic and independent of
scheduling. Learning is applied after the whole batch finishes, in particle
order, against the terminal energy recorded at rollout time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .landscape import Cell, EnergyLandscape, mask_offsets

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.1102230246251565e-16  # 2**-53

#: momentum at or below this counts as exhausted (guards against float drift
#: in repeated drain subtraction)
MOMENTUM_EPS = 1e-12


@njit(cache=True, inline="always")
def _mix64(x):
    x = x + _GOLD
    x = x ^ (x >> _S30)
    x = x * _M1
    x = x ^ (x >> _S27)
    x = x * _M2
    x = x ^ (x >> _S31)
    return x


@njit(cache=True, inline="always")
def _uniform(state):
    """Returns (value in [0,1), next state)."""
    value = _mix64(state)
    return np.float64(value >> _S11) * _INV53, state + _GOLD


@njit(cache=True)
def _rollout_kernel(
    energy,
    oi,
    oj,
    mask_di,
    mask_dj,
    tau,
    p0,
    drain,
    mass,
    max_steps,
    n_particles,
    base_seed,
    traj,
    mom,
    lengths,
    term_e,
):
    h, w = energy.shape
    n_off = mask_di.shape[0]
    cand_e = np.empty(n_off, np.float64)
    cand_i = np.empty(n_off, np.int64)
    cand_j = np.empty(n_off, np.int64)
    weights = np.empty(n_off, np.float64)
    for p in range(n_particles):
        # matches rng.derive(base_seed, p)
        state = _mix64(_mix64(base_seed) ^ _mix64(np.uint64(p)))
        ci, cj = oi, oj
        traj[p, 0, 0] = ci
        traj[p, 0, 1] = cj
        pm = p0
        mom[p, 0] = pm
        e_prev = energy[ci, cj]
        n = 0
        for step in range(1, max_steps + 1):
            m = 0
            emin = 1e300
            for t in range(n_off):
                ii = ci + mask_di[t]
                jj = cj + mask_dj[t]
                if 0 <= ii < h and 0 <= jj < w:
                    e = energy[ii, jj]
                    cand_e[m] = e
                    cand_i[m] = ii
                    cand_j[m] = jj
                    if e < emin:
                        emin = e
                    m += 1
            total = 0.0
            for t in range(m):
                wgt = math.exp(-(cand_e[t] - emin) / tau)
                weights[t] = wgt
                total += wgt
            u, state = _uniform(state)
            u *= total
            chosen = m - 1
            acc = 0.0
            for t in range(m):
                acc += weights[t]
                if u < acc:
                    chosen = t
                    break
            ci = cand_i[chosen]
            cj = cand_j[chosen]
            e_new = cand_e[chosen]
            pm = pm - drain - (e_new - e_prev) / mass
            if pm > p0:
                pm = p0
            traj[p, step, 0] = ci
            traj[p, step, 1] = cj
            mom[p, step] = pm
            e_prev = e_new
            n = step
            if pm <= 1e-12:
                break
        lengths[p] = n
        term_e[p] = e_prev


@njit(cache=True)
def _tally_kernel(psi, energy, traj, lengths):
    for p in range(lengths.shape[0]):
        for j in range(1, lengths[p] + 1):
            ci = traj[p, j, 0]
            cj = traj[p, j, 1]
            psi[ci, cj] += energy[ci, cj]


@njit(cache=True)
def _learn_kernel(energy, floor, traj, mom, lengths, term_e, mask_di, mask_dj, alpha):
    h, w = energy.shape
    n_off = mask_di.shape[0]
    for p in range(lengths.shape[0]):
        et = term_e[p]
        for j in range(lengths[p] + 1):
            pm = mom[p, j]
            if pm < 0.0:
                pm = 0.0
            gain = alpha * pm
            if gain == 0.0:
                continue
            ci = traj[p, j, 0]
            cj = traj[p, j, 1]
            for t in range(n_off):
                ii = ci + mask_di[t]
                jj = cj + mask_dj[t]
                if 0 <= ii < h and 0 <= jj < w:
                    e = energy[ii, jj]
                    e = e + gain * (et - e)
                    f = floor[ii, jj]
                    if e < f:
                        e = f
                    elif e > 1.0:
                        e = 1.0
                    energy[ii, jj] = e


@njit(cache=True)
def _first_step_counts_kernel(energy, oi, oj, mask_di, mask_dj, tau, n_samples, seed, counts):
    h, w = energy.shape
    n_off = mask_di.shape[0]
    cand_e = np.empty(n_off, np.float64)
    cand_t = np.empty(n_off, np.int64)
    weights = np.empty(n_off, np.float64)
    m = 0
    emin = 1e300
    for t in range(n_off):
        ii = oi + mask_di[t]
        jj = oj + mask_dj[t]
        if 0 <= ii < h and 0 <= jj < w:
            e = energy[ii, jj]
            cand_e[m] = e
            cand_t[m] = t
            if e < emin:
                emin = e
            m += 1
    total = 0.0
    for t in range(m):
        wgt = math.exp(-(cand_e[t] - emin) / tau)
        weights[t] = wgt
        total += wgt
    state = _mix64(seed)
    for _ in range(n_samples):
        u, state = _uniform(state)
        u *= total
        chosen = m - 1
        acc = 0.0
        for t in range(m):
            acc += weights[t]
            if u < acc:
                chosen = t
                break
        counts[cand_t[chosen]] += 1


@dataclass(frozen=True)
class Rollout:
    """One particle's sampled trajectory (cells[0] is the origin)."""

    cells: tuple[Cell, ...]
    momenta: tuple[float, ...]
    terminal_energy: float

    @property
    def length(self) -> int:
        return len(self.cells) - 1

    @property
    def first_step(self) -> Cell | None:
        return self.cells[1] if len(self.cells) > 1 else None


class RolloutBatch:
    """Raw batch arrays straight from the kernel, plus list-of-Rollout view."""

    def __init__(self, traj: np.ndarray, mom: np.ndarray, lengths: np.ndarray, term_e: np.ndarray):
        self.traj = traj
        self.mom = mom
        self.lengths = lengths
        self.term_e = term_e

    def __len__(self) -> int:
        return self.lengths.shape[0]

    def first_steps(self) -> list[tuple[Cell, Cell]]:
        """(origin, first cell) for every rollout with at least one step."""
        out = []
        for p in range(len(self)):
            if self.lengths[p] >= 1:
                out.append(
                    (
                        (int(self.traj[p, 0, 0]), int(self.traj[p, 0, 1])),
                        (int(self.traj[p, 1, 0]), int(self.traj[p, 1, 1])),
                    )
                )
        return out

    def rollouts(self) -> list[Rollout]:
        out = []
        for p in range(len(self)):
            n = int(self.lengths[p])
            cells = tuple((int(self.traj[p, j, 0]), int(self.traj[p, j, 1])) for j in range(n + 1))
            momenta = tuple(float(self.mom[p, j]) for j in range(n + 1))
            out.append(Rollout(cells=cells, momenta=momenta, terminal_energy=float(self.term_e[p])))
        return out


def run_rollout_batch(
    land: EnergyLandscape,
    origin: Cell,
    reach_radius_cells: float,
    n_particles: int,
    temperature: float,
    initial_momentum: float,
    momentum_drain: float,
    mass: float,
    max_steps: int,
    seed: int,
) -> RolloutBatch:
    """Run `n_particles` rollouts from `origin` against the current energy
    raster (not mutated). Deterministic for a fixed seed."""
    di, dj = mask_offsets(reach_radius_cells)
    traj = np.zeros((max(n_particles, 1), max_steps + 1, 2), dtype=np.int64)
    mom = np.zeros((max(n_particles, 1), max_steps + 1), dtype=np.float64)
    lengths = np.zeros(max(n_particles, 1), dtype=np.int64)
    term_e = np.zeros(max(n_particles, 1), dtype=np.float64)
    if n_particles > 0:
        _rollout_kernel(
            land.energy,
            origin[0],
            origin[1],
            di,
            dj,
            temperature,
            initial_momentum,
            momentum_drain,
            mass,
            max_steps,
            n_particles,
            np.uint64(seed & (2**64 - 1)),
            traj,
            mom,
            lengths,
            term_e,
        )
    return RolloutBatch(traj[:n_particles], mom[:n_particles], lengths[:n_particles], term_e[:n_particles])


def rollout(
    land: EnergyLandscape,
    origin: Cell,
    reach_radius_cells: float,
    temperature: float,
    initial_momentum: float,
    momentum_drain: float,
    mass: float,
    max_steps: int,
    seed: int,
) -> Rollout:
    """Single-particle convenience wrapper around `run_rollout_batch`."""
    batch = run_rollout_batch(
        land,
        origin,
        reach_radius_cells,
        1,
        temperature,
        initial_momentum,
        momentum_drain,
        mass,
        max_steps,
        seed,
    )
    return batch.rollouts()[0]


def accumulate_error(
    rollouts: RolloutBatch | Sequence[Rollout],
    energy: np.ndarray,
) -> np.ndarray:
    """Error map: for every trajectory step (excluding the origin cell), add
    the energy under the visited cell. `energy` must be the raster the
    rollouts were sampled from (pre-learning)."""
    psi = np.zeros_like(energy)
    if isinstance(rollouts, RolloutBatch):
        _tally_kernel(psi, energy, rollouts.traj, rollouts.lengths)
    else:
        for ro in rollouts:
            for cell in ro.cells[1:]:
                psi[cell[0], cell[1]] += energy[cell[0], cell[1]]
    return psi


def apply_learning(
    land: EnergyLandscape,
    rollouts: RolloutBatch | Iterable[Rollout],
    learning_radius_cells: float,
    learning_rate: float,
) -> None:
    """Pull the mask around every trajectory step toward the rollout's
    terminal energy, weighted by the momentum held at that step (clamped at
    zero), then clip into [floor, 1]. Batch form applies particles in index
    order."""
    di, dj = mask_offsets(learning_radius_cells)
    if isinstance(rollouts, RolloutBatch):
        if len(rollouts):
            _learn_kernel(
                land.energy,
                land.floor,
                rollouts.traj,
                rollouts.mom,
                rollouts.lengths,
                rollouts.term_e,
                di,
                dj,
                learning_rate,
            )
        return
    for ro in rollouts:
        n = ro.length
        traj = np.zeros((1, n + 1, 2), dtype=np.int64)
        mom = np.zeros((1, n + 1), dtype=np.float64)
        for j, cell in enumerate(ro.cells):
            traj[0, j, 0] = cell[0]
            traj[0, j, 1] = cell[1]
            mom[0, j] = ro.momenta[j]
        lengths = np.array([n], dtype=np.int64)
        term_e = np.array([ro.terminal_energy], dtype=np.float64)
        _learn_kernel(land.energy, land.floor, traj, mom, lengths, term_e, di, dj, learning_rate)


def first_step_distribution_counts(
    land: EnergyLandscape,
    origin: Cell,
    reach_radius_cells: float,
    temperature: float,
    n_samples: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample the successor-cell draw `n_samples` times through the same
    kernel path rollouts use. Returns (counts, rows, cols) aligned with the
    in-bounds mask cells."""
    di, dj = mask_offsets(reach_radius_cells)
    counts = np.zeros(di.shape[0], dtype=np.int64)
    _first_step_counts_kernel(
        land.energy,
        origin[0],
        origin[1],
        di,
        dj,
        temperature,
        n_samples,
        np.uint64(seed & (2**64 - 1)),
        counts,
    )
    rows = origin[0] + di
    cols = origin[1] + dj
    keep = (rows >= 0) & (rows < land.shape[0]) & (cols >= 0) & (cols < land.shape[1])
    return counts[keep], rows[keep], cols[keep]
