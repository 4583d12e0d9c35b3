from __future__ import annotations

import math

import numpy as np
import pytest

from prospect.agent.landscape import (
    EnergyLandscape,
    decay,
    init_landscape,
    integrate_observation,
    load_landscape_matrix,
    mask,
    record_failed_reach,
    save_landscape,
)
from prospect.maps import Goal

C = 0.35


def small_land(goals=((500.0, 500.0),), resolution=48) -> EnergyLandscape:
    return init_landscape(
        (1000.0, 1000.0),
        tuple(Goal(position=g, radius=40.0) for g in goals),
        C,
        resolution,
    )


class TestInitLandscape:
    def test_goal_cell_sits_at_floor_offset(self):
        land = small_land()
        i, j = land.pos_to_cell((500.0, 500.0))
        # distance from the cell center to the goal is sub-cell
        assert land.floor[i, j] < 0.02
        assert land.energy[i, j] == pytest.approx(land.floor[i, j] + C)

    def test_two_goal_floor_is_pointwise_min(self):
        goals = ((200.0, 300.0), (800.0, 700.0))
        land = small_land(goals)
        h, w = land.shape
        diag = math.hypot(1000.0, 1000.0)
        for i in range(0, h, 5):
            for j in range(0, w, 5):
                cx, cy = land.cell_center((i, j))
                expected = min(math.hypot(cx - g[0], cy - g[1]) for g in goals)
                assert land.floor[i, j] == pytest.approx(expected / diag * (1 - C))

    def test_farthest_corner_has_highest_floor(self):
        land = small_land(goals=((100.0, 100.0),))
        h, w = land.shape
        assert land.floor[h - 1, w - 1] == pytest.approx(land.floor.max())

    def test_initial_bounded_by_one(self):
        land = small_land(goals=((10.0, 10.0),))
        assert float(land.initial.max()) <= 1.0
        assert np.all(land.energy >= land.floor)

    def test_rejects_tiny_resolution(self):
        with pytest.raises(ValueError):
            init_landscape((1000.0, 1000.0), (Goal(position=(1.0, 1.0), radius=5.0),), C, 8)


class TestMask:
    def test_radius_zero_is_center_only(self):
        cells = mask((10, 12), 0.0, (48, 48))
        assert cells.tolist() == [[10, 12]]

    def test_corner_quarter_disc_matches_brute_force(self):
        radius = 3.0
        cells = {tuple(c) for c in mask((0, 0), radius, (48, 48)).tolist()}
        expected = {
            (i, j)
            for i in range(48)
            for j in range(48)
            if math.hypot(i, j) <= radius + 1e-9
        }
        assert cells == expected

    def test_full_grid_radius_covers_everything(self):
        cells = mask((24, 24), 100.0, (48, 48))
        assert len(cells) == 48 * 48


class TestIntegrateObservation:
    def test_empty_disc_saturates(self):
        land = small_land()
        integrate_observation(land, (500.0, 500.0), 150.0, [], 1.5)
        h, w = land.shape
        for i in range(h):
            for j in range(w):
                cx, cy = land.cell_center((i, j))
                if math.hypot(cx - 500.0, cy - 500.0) <= 150.0:
                    assert land.energy[i, j] == 1.0

    def test_well_drops_to_floor_and_annulus_saturates(self):
        land = small_land()
        hold = (430.0, 500.0)
        integrate_observation(land, (500.0, 500.0), 150.0, [hold], 1.5)
        well_units = 1.5 * land.cell_size
        h, w = land.shape
        for i in range(h):
            for j in range(w):
                cx, cy = land.cell_center((i, j))
                if math.hypot(cx - hold[0], cy - hold[1]) <= well_units:
                    assert land.energy[i, j] == land.floor[i, j]
                elif math.hypot(cx - 500.0, cy - 500.0) <= 150.0:
                    assert land.energy[i, j] == 1.0

    def test_overlapping_wells_union_matches_brute_force(self):
        land = small_land()
        holds = [(430.0, 500.0), (455.0, 500.0)]
        integrate_observation(land, (450.0, 500.0), 150.0, holds, 1.5)
        well_units = 1.5 * land.cell_size
        h, w = land.shape
        for i in range(h):
            for j in range(w):
                cx, cy = land.cell_center((i, j))
                in_well = any(math.hypot(cx - p[0], cy - p[1]) <= well_units for p in holds)
                in_disc = math.hypot(cx - 450.0, cy - 500.0) <= 150.0
                if in_well:
                    assert land.energy[i, j] == land.floor[i, j]
                elif in_disc:
                    assert land.energy[i, j] == 1.0

    def test_idempotent(self):
        land = small_land()
        hold = (430.0, 500.0)
        integrate_observation(land, (500.0, 500.0), 150.0, [hold], 1.5)
        snapshot = land.energy.copy()
        integrate_observation(land, (500.0, 500.0), 150.0, [hold], 1.5)
        assert np.array_equal(land.energy, snapshot)


class TestDecay:
    def test_full_rate_resets_to_initial(self):
        land = small_land()
        land.energy[:] = 1.0
        decay(land, 1.0)
        assert np.allclose(land.energy, land.initial)

    def test_zero_rate_is_identity(self):
        land = small_land()
        land.energy[:] = 0.9
        decay(land, 0.0)
        assert np.all(land.energy == 0.9)

    def test_quarter_rate_arithmetic(self):
        # cell at 0.2 with initial 0.6 and rate 0.25 lands on 0.3
        land = small_land()
        i, j = 5, 5
        land.initial[i, j] = 0.6
        land.floor[i, j] = 0.0
        land.energy[i, j] = 0.2
        decay(land, 0.25)
        assert land.energy[i, j] == pytest.approx(0.3)

    def test_geometric_approach_to_initial(self):
        land = small_land()
        land.energy[:] = np.clip(land.initial + 0.2, land.floor, 1.0)
        start_gap = np.abs(land.energy - land.initial).max()
        d = 0.3
        for n in range(1, 6):
            decay(land, d)
            gap = np.abs(land.energy - land.initial).max()
            assert gap <= (1 - d) ** n * start_gap + 1e-12


class TestFailedReach:
    def test_capsule_matches_brute_force_membership(self):
        land = small_land()
        a, b = (10, 10), (10, 22)
        rho = 1.5
        before = land.energy.copy()
        record_failed_reach(land, a, b, rho)
        radius = rho / 2.0
        h, w = land.shape
        for i in range(h):
            for j in range(w):
                d = _segment_distance((i, j), a, b)
                if d <= radius:
                    assert land.energy[i, j] == 1.0
                else:
                    assert land.energy[i, j] == before[i, j]

    def test_degenerate_segment_is_noop(self):
        land = small_land()
        before = land.energy.copy()
        record_failed_reach(land, (7, 7), (7, 7), 1.5)
        assert np.array_equal(land.energy, before)

    def test_diagonal_capsule(self):
        land = small_land()
        a, b = (5, 30), (14, 40)
        record_failed_reach(land, a, b, 2.0)
        for i, j in ((5, 30), (14, 40), (10, 35)):
            assert land.energy[i, j] == 1.0

    def test_forced_rollout_along_refuted_gap_accrues_maximal_error(self):
        from prospect.agent.rollouts import Rollout, accumulate_error

        land = small_land()
        a, b = (10, 10), (10, 22)
        record_failed_reach(land, a, b, 1.5)
        crossing = tuple((10, j) for j in range(10, 23, 3))
        ro = Rollout(cells=crossing, momenta=(1.0,) * len(crossing), terminal_energy=1.0)
        psi = accumulate_error([ro], land.energy)
        for cell in crossing[1:]:
            assert psi[cell] == pytest.approx(1.0)  # each step lands on e_high


def _segment_distance(p, a, b):
    pi, pj = float(p[0]), float(p[1])
    ai, aj = float(a[0]), float(a[1])
    bi, bj = float(b[0]), float(b[1])
    vi, vj = bi - ai, bj - aj
    vv = vi * vi + vj * vj
    t = max(0.0, min(1.0, ((pi - ai) * vi + (pj - aj) * vj) / vv))
    return math.hypot(pi - (ai + t * vi), pj - (aj + t * vj))


class TestExport:
    def test_round_trip(self, tmp_path):
        land = small_land()
        land.energy[3, 4] = 0.123456789
        path = tmp_path / "land.txt"
        save_landscape(land, path)
        matrix, cell_size = load_landscape_matrix(path)
        assert cell_size == land.cell_size
        assert np.array_equal(matrix, land.energy)
