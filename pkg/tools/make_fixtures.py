#!/usr/bin/env python3
"""Regenerate the checked-in fixture maps under fixtures/maps/.

Run from the repository root:  python3 tools/make_fixtures.py
"""

from __future__ import annotations

import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from prospect.mapgen import GeneratorConfig, generate_map
from prospect.maps import Goal, Hold, MapSpec, build_reach_graph, min_path, save_map

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures", "maps")

W = 1000.0
REACH = W / 6.0  # 166.67
RADIUS_NOTE = "reach/fovea set to bounds/6 by convention; heuristic default"


def trivial() -> MapSpec:
    """One hold inside the goal disc, one move from the start."""
    return MapSpec(
        id="trivial-1",
        bounds=(W, W),
        holds=(Hold(id=0, position=(420.0, 500.0)),),
        start=(500.0, 500.0),
        goals=(Goal(position=(420.0, 500.0), radius=40.0),),
        reach_radius=REACH,
        fovea_radius=REACH,
        meta={"radius_note": RADIUS_NOTE, "expected_min_hops": 1},
    )


def corridor() -> MapSpec:
    """Eight holds in a straight diagonal chain, spacing 0.8 * reach."""
    gap = 0.8 * REACH
    step = gap / math.sqrt(2.0)
    start = (150.0, 150.0)
    holds = tuple(
        Hold(id=i, position=(start[0] + (i + 1) * step, start[1] + (i + 1) * step))
        for i in range(8)
    )
    return MapSpec(
        id="corridor-8",
        bounds=(W, W),
        holds=holds,
        start=start,
        goals=(Goal(position=holds[-1].position, radius=40.0),),
        reach_radius=REACH,
        fovea_radius=REACH,
        meta={"radius_note": RADIUS_NOTE, "expected_min_hops": 8},
    )


def fork_trap() -> MapSpec:
    """Two branches from a fork: the direct branch dead-ends at a gap of
    1.08 * reach (visually plausible, not traversable); the detour branch
    reaches the goal in 7 moves."""
    holds = {
        "F": (270.0, 530.0),
        "A1": (400.0, 520.0),
        "A2": (530.0, 540.0),
        "A3": (660.0, 540.0),
        "B1": (330.0, 680.0),
        "B2": (460.0, 750.0),
        "B3": (600.0, 770.0),
        "B4": (740.0, 720.0),
        "B5": (830.0, 610.0),
        "T": (840.0, 530.0),
    }
    order = ["F", "A1", "A2", "A3", "B1", "B2", "B3", "B4", "B5", "T"]
    spec = MapSpec(
        id="fork-trap",
        bounds=(W, W),
        holds=tuple(Hold(id=i, position=holds[name]) for i, name in enumerate(order)),
        start=(140.0, 500.0),
        goals=(Goal(position=(860.0, 540.0), radius=40.0),),
        reach_radius=REACH,
        fovea_radius=REACH,
        meta={
            "radius_note": RADIUS_NOTE,
            "expected_min_hops": 7,
            "trap_gap": round(math.hypot(840.0 - 660.0, 530.0 - 540.0), 2),
        },
    )
    return spec


def zigzag() -> MapSpec:
    """Generated 20-hold map with a 12-hop backbone and one decoy branch."""
    config = GeneratorConfig(
        n_holds=20,
        path_hops=12,
        gap_fraction=(0.55, 0.72),
        heading_jitter=45.0,
        max_heading_drift=100.0,
        decoy_branches=1,
        decoy_length=(2, 3),
    )
    for seed in range(100):
        try:
            spec = generate_map(seed, config, map_id="zigzag-12")
        except Exception:
            continue
        if min_path(spec).hop_count == 12:
            return _with_expected(spec, 12)
    raise RuntimeError("no zigzag seed found")


def meadow() -> MapSpec:
    """Paper-scale 50-hold map: 6-hop backbone, several decoys, dense scatter."""
    config = GeneratorConfig(
        n_holds=50,
        path_hops=6,
        gap_fraction=(0.6, 0.85),
        decoy_branches=4,
        decoy_length=(2, 4),
        clearance=1.02,
    )
    for seed in range(200):
        try:
            spec = generate_map(seed, config, map_id="meadow-50")
        except Exception:
            continue
        if min_path(spec).hop_count == 6 and len(spec.holds) == 50:
            return _with_expected(spec, 6)
    raise RuntimeError("no meadow seed found")


def _with_expected(spec: MapSpec, hops: int) -> MapSpec:
    import dataclasses

    meta = dict(spec.meta or {})
    meta["expected_min_hops"] = hops
    return dataclasses.replace(spec, meta=meta)


def thicket() -> MapSpec:
    """Harder paper-scale map: 50 holds, 10-hop folded backbone, heavy decoys."""
    config = GeneratorConfig(
        n_holds=50,
        path_hops=10,
        gap_fraction=(0.5, 0.68),
        heading_jitter=45.0,
        max_heading_drift=95.0,
        decoy_branches=5,
        decoy_length=(2, 4),
        clearance=1.02,
        max_retries=800,
    )
    for seed in range(300):
        try:
            spec = generate_map(seed, config, map_id="thicket-50")
        except Exception:
            continue
        if min_path(spec).hop_count == 10 and len(spec.holds) == 50:
            return _with_expected(spec, 10)
    raise RuntimeError("no thicket seed found")


def island() -> MapSpec:
    """No hold within reach of the start: unreachable goal, for timeout paths."""
    return MapSpec(
        id="island-0",
        bounds=(W, W),
        holds=(
            Hold(id=0, position=(850.0, 850.0)),
            Hold(id=1, position=(850.0, 700.0)),
            Hold(id=2, position=(120.0, 850.0)),
        ),
        start=(500.0, 500.0),
        goals=(Goal(position=(850.0, 850.0), radius=40.0),),
        reach_radius=REACH,
        fovea_radius=REACH,
        meta={"radius_note": RADIUS_NOTE, "expected_min_hops": None},
    )


def main() -> None:
    os.makedirs(OUT, exist_ok=True)
    for spec in (trivial(), corridor(), fork_trap(), zigzag(), meadow(), thicket(), island()):
        solution = min_path(spec)
        expected = (spec.meta or {}).get("expected_min_hops", "?")
        assert solution.hop_count == expected, (spec.id, solution.hop_count, expected)
        n_edges = len(build_reach_graph(spec).edges)
        path = os.path.join(OUT, f"{spec.id}.json")
        save_map(spec, path)
        print(f"{spec.id}: {len(spec.holds)} holds, {n_edges} edges, min hops {solution.hop_count} -> {path}")


if __name__ == "__main__":
    main()
