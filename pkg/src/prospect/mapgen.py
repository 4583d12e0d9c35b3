"""Procedural map generation.

Maps are built from a meandering backbone of holds walked out from the start,
with the goal disc centered on the final backbone hold, plus dead-end decoy
branches and unreachable scatter holds for visual density. Every placed hold
keeps a clearance of more than one reach radius from all holds it should not
connect to, so the backbone is the unique route and the minimum path length
is the backbone hop count by construction (decoys only add dead ends).

Generation is deterministic for a fixed (seed, config) pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .maps import Goal, Hold, MapSpec, Point, dist


class MapGenerationError(RuntimeError):
    """The configuration could not be satisfied within the retry budget."""


@dataclass(frozen=True)
class GeneratorConfig:
    n_holds: int = 50
    n_goals: int = 1
    #: backbone hops from start to each goal hold (one entry per goal;
    #: a single int applies to all goals)
    path_hops: int | tuple[int, ...] = 6
    #: hop gap sampled uniformly from this range, as a fraction of reach
    gap_fraction: tuple[float, float] = (0.6, 0.9)
    #: heading jitter per hop, degrees
    heading_jitter: float = 35.0
    #: cap on how far the walk heading may drift from its initial bearing,
    #: degrees; keeps backbones trending toward their goal
    max_heading_drift: float = 60.0
    decoy_branches: int = 3
    decoy_length: tuple[int, int] = (2, 4)
    bounds: tuple[float, float] = (1000.0, 1000.0)
    #: reach radius as a fraction of map width
    reach_fraction: float = 1.0 / 6.0
    fovea_fraction: float = 1.0 / 6.0
    goal_radius: float = 40.0
    #: clearance multiplier: non-consecutive holds stay further apart
    #: than clearance * reach_radius
    clearance: float = 1.05
    solvable: bool = True
    max_retries: int = 400

    def __post_init__(self):
        if self.n_holds < 1:
            raise ValueError("n_holds must be >= 1")
        if self.n_goals < 1:
            raise ValueError("n_goals must be >= 1")
        lo, hi = self.gap_fraction
        if not (0 < lo <= hi <= 1.0):
            raise ValueError("gap_fraction must satisfy 0 < lo <= hi <= 1")

    def hops_for_goal(self, idx: int) -> int:
        if isinstance(self.path_hops, int):
            return self.path_hops
        return self.path_hops[idx]

    @classmethod
    def from_json(cls, data: bytes | str | dict) -> "GeneratorConfig":
        if not isinstance(data, dict):
            data = json.loads(data)
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown generator config fields: {sorted(extra)}")
        kwargs = dict(data)
        for key in ("path_hops", "gap_fraction", "decoy_length", "bounds"):
            if key in kwargs and isinstance(kwargs[key], list):
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            out[name] = list(value) if isinstance(value, tuple) else value
        return out


@dataclass
class _Layout:
    """Mutable hold layout under construction."""

    positions: list[Point] = field(default_factory=list)
    #: pairs allowed to be within reach of each other
    linked: set[tuple[int, int]] = field(default_factory=set)

    def add(self, p: Point, link_to: int | None) -> int:
        idx = len(self.positions)
        self.positions.append(p)
        if link_to is not None:
            self.linked.add((min(idx, link_to), max(idx, link_to)))
        return idx

    def clear_of_others(self, p: Point, link_to: int | None, min_gap: float) -> bool:
        for j, q in enumerate(self.positions):
            if j == link_to:
                continue
            if dist(p, q) <= min_gap:
                return False
        return True


def generate_map(seed: int, config: GeneratorConfig, map_id: str | None = None) -> MapSpec:
    """Generate a MapSpec; deterministic for fixed (seed, config)."""
    rng = np.random.default_rng(np.random.SeedSequence([seed & (2**63 - 1)]))
    last_error = "no attempt"
    for attempt in range(config.max_retries):
        result = _try_generate(rng, config)
        if isinstance(result, str):
            last_error = result
            continue
        holds, goals = result
        spec = MapSpec(
            id=map_id or f"gen-{seed}",
            bounds=config.bounds,
            holds=tuple(Hold(id=i, position=p) for i, p in enumerate(holds)),
            start=(config.bounds[0] / 2.0, config.bounds[1] / 2.0),
            goals=tuple(goals),
            reach_radius=config.reach_fraction * config.bounds[0],
            fovea_radius=config.fovea_fraction * config.bounds[0],
            meta={
                "generator": {"seed": seed, "attempt": attempt, **config.to_json()},
                "radius_note": "reach/fovea set to bounds/6 by convention; heuristic default",
            },
        )
        return spec
    raise MapGenerationError(f"config unsatisfiable within {config.max_retries} retries: {last_error}")


def _try_generate(rng: np.random.Generator, config: GeneratorConfig):
    """One generation attempt; returns (holds, goals) or an error string."""
    w, h = config.bounds
    reach = config.reach_fraction * w
    clearance = config.clearance * reach
    margin = config.goal_radius + 10.0
    start = (w / 2.0, h / 2.0)
    layout = _Layout()

    goals: list[Goal] = []
    backbone_parent: list[int | None] = []
    goal_headings = rng.uniform(0, 2 * math.pi) + np.arange(config.n_goals) * (2 * math.pi / config.n_goals)

    if config.solvable:
        for gi in range(config.n_goals):
            hops = config.hops_for_goal(gi)
            path_idx = _walk_backbone(rng, layout, config, start, float(goal_headings[gi]), hops, clearance, margin)
            if path_idx is None:
                return f"goal {gi}: backbone walk failed"
            goals.append(Goal(position=layout.positions[path_idx], radius=config.goal_radius))
            backbone_parent.append(path_idx)
        # goal discs must not swallow earlier holds, or the hop count shrinks
        for g in goals:
            inside = [
                i
                for i, p in enumerate(layout.positions)
                if dist(p, g.position) <= g.radius and p != g.position
            ]
            if inside:
                return "goal disc covers a non-terminal hold"
    else:
        # place goals beyond reach of everything; scatter below stays clear too
        for gi in range(config.n_goals):
            gp = _random_point(rng, config.bounds, margin)
            goals.append(Goal(position=gp, radius=config.goal_radius))

    n_decoys = 0
    for _ in range(config.decoy_branches):
        if not layout.positions:
            break
        length = int(rng.integers(config.decoy_length[0], config.decoy_length[1] + 1))
        if _grow_decoy(rng, layout, config, length, clearance, margin, goals):
            n_decoys += length

    budget = config.n_holds - len(layout.positions)
    if budget < 0:
        return f"n_holds {config.n_holds} too small for backbone+decoys ({len(layout.positions)})"
    if not _scatter(rng, layout, config, budget, reach, clearance, goals, start):
        return "scatter placement failed"

    return layout.positions, goals


def _walk_backbone(
    rng: np.random.Generator,
    layout: _Layout,
    config: GeneratorConfig,
    start: Point,
    heading: float,
    hops: int,
    clearance: float,
    margin: float,
) -> int | None:
    reach = config.reach_fraction * config.bounds[0]
    jitter = math.radians(config.heading_jitter)
    max_drift = math.radians(config.max_heading_drift)
    base_heading = heading
    current = start
    prev_idx: int | None = None
    for hop in range(hops):
        placed = False
        for _ in range(40):
            gap = rng.uniform(*config.gap_fraction) * reach
            theta = heading + rng.uniform(-jitter, jitter)
            drift = _wrap_angle(theta - base_heading)
            theta = base_heading + max(-max_drift, min(max_drift, drift))
            candidate = (current[0] + gap * math.cos(theta), current[1] + gap * math.sin(theta))
            if not _inside(candidate, config.bounds, margin):
                heading += rng.uniform(0.6, 1.2) * (1 if rng.random() < 0.5 else -1)
                continue
            # keep clear of the start region except for the first hop
            if hop > 0 and dist(candidate, start) <= clearance:
                continue
            if layout.clear_of_others(candidate, prev_idx, clearance):
                idx = layout.add(candidate, prev_idx)
                prev_idx = idx
                current = candidate
                heading = theta
                placed = True
                break
        if not placed:
            return None
    return prev_idx


def _wrap_angle(theta: float) -> float:
    while theta > math.pi:
        theta -= 2 * math.pi
    while theta < -math.pi:
        theta += 2 * math.pi
    return theta


def _grow_decoy(
    rng: np.random.Generator,
    layout: _Layout,
    config: GeneratorConfig,
    length: int,
    clearance: float,
    margin: float,
    goals: list[Goal],
) -> bool:
    reach = config.reach_fraction * config.bounds[0]
    jitter = math.radians(config.heading_jitter)
    root = int(rng.integers(0, len(layout.positions)))
    current = layout.positions[root]
    heading = rng.uniform(0, 2 * math.pi)
    prev_idx = root
    added = []
    for _ in range(length):
        placed = False
        for _ in range(40):
            gap = rng.uniform(*config.gap_fraction) * reach
            theta = heading + rng.uniform(-jitter, jitter)
            candidate = (current[0] + gap * math.cos(theta), current[1] + gap * math.sin(theta))
            if not _inside(candidate, config.bounds, margin):
                heading += rng.uniform(0.6, 1.2)
                continue
            if any(dist(candidate, g.position) <= g.radius + clearance for g in goals):
                continue
            if layout.clear_of_others(candidate, prev_idx, clearance):
                idx = layout.add(candidate, prev_idx)
                added.append(idx)
                prev_idx = idx
                current = candidate
                heading = theta
                placed = True
                break
        if not placed:
            break
    return bool(added)


def _scatter(
    rng: np.random.Generator,
    layout: _Layout,
    config: GeneratorConfig,
    budget: int,
    reach: float,
    clearance: float,
    goals: list[Goal],
    start: Point,
) -> bool:
    """Fill remaining hold budget with scatter kept out of reach of the
    connected component, so it cannot create shortcuts."""
    margin = 10.0
    structured = list(range(len(layout.positions)))
    for _ in range(budget):
        placed = False
        for _ in range(200):
            candidate = _random_point(rng, config.bounds, margin)
            if dist(candidate, start) <= clearance:
                continue
            if any(dist(candidate, g.position) <= g.radius for g in goals):
                continue
            if all(dist(candidate, layout.positions[j]) > clearance for j in structured):
                layout.add(candidate, None)
                placed = True
                break
        if not placed:
            return False
    return True


def _random_point(rng: np.random.Generator, bounds: tuple[float, float], margin: float) -> Point:
    return (
        float(rng.uniform(margin, bounds[0] - margin)),
        float(rng.uniform(margin, bounds[1] - margin)),
    )


def _inside(p: Point, bounds: tuple[float, float], margin: float) -> bool:
    return margin <= p[0] <= bounds[0] - margin and margin <= p[1] <= bounds[1] - margin


def difficulty_sweep_config(level: int, base: GeneratorConfig | None = None) -> GeneratorConfig:
    """Config for sweep level 0, 1, 2, ...: more hops and more decoys."""
    base = base or GeneratorConfig(
        n_holds=24,
        decoy_branches=1,
        path_hops=3,
        gap_fraction=(0.45, 0.62),
        heading_jitter=40.0,
        max_heading_drift=110.0,
        max_retries=800,
    )
    hops = base.hops_for_goal(0) + 3 * level
    return replace(base, path_hops=hops, decoy_branches=base.decoy_branches + level, n_holds=max(base.n_holds, hops + 12))
