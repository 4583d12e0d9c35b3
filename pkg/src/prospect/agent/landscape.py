"""The agent's raster belief over where its path will lie.

Cells hold energies in [floor, 1]: the floor is the normalized distance to
the nearest goal (the naive prior shape), 1 marks terrain known to be empty,
and values near the floor mark discovered holds. Update operations mutate the
raster in place; one landscape belongs to one trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..maps import Goal, Point

Cell = tuple[int, int]


@dataclass
class EnergyLandscape:
    energy: np.ndarray  # (H, W) float64
    floor: np.ndarray  # (H, W) float64
    initial: np.ndarray  # (H, W) float64
    cell_size: float  # map units per cell

    @property
    def shape(self) -> tuple[int, int]:
        return self.energy.shape  # type: ignore[return-value]

    def pos_to_cell(self, p: Point) -> Cell:
        h, w = self.shape
        j = min(max(int(p[0] / self.cell_size), 0), w - 1)
        i = min(max(int(p[1] / self.cell_size), 0), h - 1)
        return (i, j)

    def cell_center(self, cell: Cell) -> Point:
        i, j = cell
        return ((j + 0.5) * self.cell_size, (i + 0.5) * self.cell_size)

    def cells_to_units(self, n_cells: float) -> float:
        return n_cells * self.cell_size

    def units_to_cells(self, units: float) -> int:
        return int(round(units / self.cell_size))

    def copy(self) -> "EnergyLandscape":
        return EnergyLandscape(
            energy=self.energy.copy(),
            floor=self.floor,
            initial=self.initial,
            cell_size=self.cell_size,
        )


def init_landscape(
    bounds: tuple[float, float],
    goals: tuple[Goal, ...],
    floor_offset: float,
    resolution: int = 100,
) -> EnergyLandscape:
    """Floor = distance to nearest goal, scaled into [0, 1 - floor_offset];
    energy starts at floor + floor_offset."""
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    if not goals:
        raise ValueError("at least one goal is required")
    width, height = bounds
    cell_size = width / resolution
    n_rows = max(16, int(round(height / cell_size)))
    xs = (np.arange(resolution) + 0.5) * cell_size
    ys = (np.arange(n_rows) + 0.5) * cell_size
    gx, gy = np.meshgrid(xs, ys)
    diag = math.hypot(width, height)
    d_min = np.full((n_rows, resolution), np.inf)
    for goal in goals:
        d = np.hypot(gx - goal.position[0], gy - goal.position[1])
        np.minimum(d_min, d, out=d_min)
    floor = (d_min / diag) * (1.0 - floor_offset)
    initial = np.clip(floor + floor_offset, floor, 1.0)
    return EnergyLandscape(
        energy=initial.copy(),
        floor=floor,
        initial=initial,
        cell_size=cell_size,
    )


@lru_cache(maxsize=64)
def mask_offsets(radius_cells: float) -> tuple[np.ndarray, np.ndarray]:
    """Row/column offsets of all cells within `radius_cells` of a center."""
    r = int(math.floor(radius_cells + 1e-9))
    di, dj = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
    keep = di * di + dj * dj <= radius_cells * radius_cells + 1e-9
    return di[keep].astype(np.int64).copy(), dj[keep].astype(np.int64).copy()


def mask(center: Cell, radius_cells: float, shape: tuple[int, int]) -> np.ndarray:
    """Cells within `radius_cells` of center, clipped at the grid edge.
    Returns an (n, 2) array of (row, col) pairs."""
    di, dj = mask_offsets(radius_cells)
    i = center[0] + di
    j = center[1] + dj
    keep = (i >= 0) & (i < shape[0]) & (j >= 0) & (j < shape[1])
    return np.stack([i[keep], j[keep]], axis=1)


def integrate_observation(
    land: EnergyLandscape,
    disc_center: Point,
    disc_radius: float,
    visible_hold_positions: list[Point],
    well_radius_cells: float,
    empty_energy: float = 1.0,
) -> None:
    """Write one observation into the landscape: terrain inside the observed
    disc but outside every hold well becomes `empty_energy`; cells within the
    well radius of a visible hold drop to the floor. Idempotent per
    observation; later observations overwrite."""
    h, w = land.shape
    cs = land.cell_size
    well_units = well_radius_cells * cs

    disc_box = _bbox(disc_center, disc_radius, cs, h, w)
    if disc_box is not None:
        i0, i1, j0, j1 = disc_box
        cx, cy = _center_grids(i0, i1, j0, j1, cs)
        inside = (cx - disc_center[0]) ** 2 + (cy - disc_center[1]) ** 2 <= disc_radius**2
        if visible_hold_positions:
            well = np.zeros_like(inside)
            for hp in visible_hold_positions:
                well |= (cx - hp[0]) ** 2 + (cy - hp[1]) ** 2 <= well_units**2
            write = inside & ~well
        else:
            write = inside
        land.energy[i0:i1, j0:j1][write] = empty_energy

    for hp in visible_hold_positions:
        box = _bbox(hp, well_units, cs, h, w)
        if box is None:
            continue
        i0, i1, j0, j1 = box
        cx, cy = _center_grids(i0, i1, j0, j1, cs)
        well = (cx - hp[0]) ** 2 + (cy - hp[1]) ** 2 <= well_units**2
        view = land.energy[i0:i1, j0:j1]
        view[well] = land.floor[i0:i1, j0:j1][well]


def decay(land: EnergyLandscape, rate: float) -> None:
    """Pull every cell toward the initial landscape by `rate`, then clip."""
    land.energy += rate * (land.initial - land.energy)
    np.clip(land.energy, land.floor, 1.0, out=land.energy)


def record_failed_reach(
    land: EnergyLandscape,
    from_cell: Cell,
    to_cell: Cell,
    well_radius_cells: float,
    empty_energy: float = 1.0,
) -> None:
    """Raise the capsule (radius well/2) along the refuted gap segment so
    particles stop treating the crossing as passable. No-op when the segment
    is degenerate."""
    if from_cell == to_cell:
        return
    h, w = land.shape
    radius = well_radius_cells / 2.0
    ai, aj = float(from_cell[0]), float(from_cell[1])
    bi, bj = float(to_cell[0]), float(to_cell[1])
    i0 = max(0, int(math.floor(min(ai, bi) - radius)))
    i1 = min(h, int(math.ceil(max(ai, bi) + radius)) + 1)
    j0 = max(0, int(math.floor(min(aj, bj) - radius)))
    j1 = min(w, int(math.ceil(max(aj, bj) + radius)) + 1)
    ii, jj = np.meshgrid(np.arange(i0, i1), np.arange(j0, j1), indexing="ij")
    d2 = _segment_dist2(ii.astype(float), jj.astype(float), ai, aj, bi, bj)
    land.energy[i0:i1, j0:j1][d2 <= radius * radius] = empty_energy


def _segment_dist2(pi, pj, ai, aj, bi, bj):
    vi, vj = bi - ai, bj - aj
    vv = vi * vi + vj * vj
    t = ((pi - ai) * vi + (pj - aj) * vj) / vv
    t = np.clip(t, 0.0, 1.0)
    di = pi - (ai + t * vi)
    dj = pj - (aj + t * vj)
    return di * di + dj * dj


def _bbox(center: Point, radius: float, cs: float, h: int, w: int):
    j0 = max(0, int(math.floor((center[0] - radius) / cs)))
    j1 = min(w, int(math.ceil((center[0] + radius) / cs)) + 1)
    i0 = max(0, int(math.floor((center[1] - radius) / cs)))
    i1 = min(h, int(math.ceil((center[1] + radius) / cs)) + 1)
    if i0 >= i1 or j0 >= j1:
        return None
    return i0, i1, j0, j1


def _center_grids(i0: int, i1: int, j0: int, j1: int, cs: float):
    xs = (np.arange(j0, j1) + 0.5) * cs
    ys = (np.arange(i0, i1) + 0.5) * cs
    return np.meshgrid(xs, ys)


def save_landscape(land: EnergyLandscape, path) -> None:
    """Dense text export: a header line `H W cell_size`, then H rows of W
    energies (row-major)."""
    h, w = land.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{h} {w} {float(land.cell_size)!r}\n")
        for row in land.energy:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_landscape_matrix(path) -> tuple[np.ndarray, float]:
    """Read a matrix exported by `save_landscape`; returns (energy, cell_size)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        h, w, cs = int(header[0]), int(header[1]), float(header[2])
        rows = [[float(v) for v in fh.readline().split()] for _ in range(h)]
    matrix = np.array(rows, dtype=np.float64)
    if matrix.shape != (h, w):
        raise ValueError(f"matrix shape {matrix.shape} does not match header ({h}, {w})")
    return matrix, cs
