"""Ground-truth map model: holds, goals, reachability graph, optimal paths,
and the versioned JSON map format.

Coordinates are continuous map units; maps are normalized so bounds fit
within [0, 1000] on each axis. All types are immutable after construction and
safe to share across parallel trial runs.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Mapping

Point = tuple[float, float]

#: Synthetic graph node representing the trial start location.
START_NODE = -1

MAP_FORMAT_VERSION = 1
MAX_BOUND = 1000.0


class MapError(ValueError):
    """Base class for map construction and format errors."""


class MapValidationError(MapError):
    """A MapSpec violates a structural invariant."""


class MapFormatError(MapError):
    """A map document cannot be parsed; `location` names the offending field."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class Hold:
    """A discrete waypoint; the only positions an agent may occupy."""

    id: int
    position: Point


@dataclass(frozen=True)
class Goal:
    position: Point
    radius: float


@dataclass(frozen=True)
class PublicMapView:
    """The map information a player may see before exploring: everything
    except hold positions."""

    id: str
    bounds: tuple[float, float]
    start: Point
    goals: tuple[Goal, ...]
    reach_radius: float
    fovea_radius: float
    hold_count: int


@dataclass(frozen=True)
class MapSpec:
    id: str
    bounds: tuple[float, float]
    holds: tuple[Hold, ...]
    start: Point
    goals: tuple[Goal, ...]
    reach_radius: float
    fovea_radius: float
    meta: Mapping[str, Any] | None = None

    def __post_init__(self):
        w, h = self.bounds
        if not (0 < w <= MAX_BOUND and 0 < h <= MAX_BOUND):
            raise MapValidationError(f"bounds must lie in (0, {MAX_BOUND}]: {self.bounds}")
        if not self.goals:
            raise MapValidationError("at least one goal is required")
        if self.reach_radius <= 0:
            raise MapValidationError("reach_radius must be > 0")
        if self.fovea_radius <= 0:
            raise MapValidationError("fovea_radius must be > 0")
        if not _in_bounds(self.start, self.bounds):
            raise MapValidationError(f"start {self.start} outside bounds {self.bounds}")
        seen: set[int] = set()
        for i, hold in enumerate(self.holds):
            if hold.id < 0:
                raise MapValidationError(f"holds[{i}]: id must be >= 0")
            if hold.id in seen:
                raise MapValidationError(f"holds[{i}]: duplicate id {hold.id}")
            seen.add(hold.id)
            if not _in_bounds(hold.position, self.bounds):
                raise MapValidationError(f"holds[{i}]: position {hold.position} outside bounds")
        for i, goal in enumerate(self.goals):
            if goal.radius <= 0:
                raise MapValidationError(f"goals[{i}]: radius must be > 0")

    def hold_by_id(self, hold_id: int) -> Hold:
        for hold in self.holds:
            if hold.id == hold_id:
                return hold
        raise KeyError(hold_id)

    def public_view(self) -> PublicMapView:
        return PublicMapView(
            id=self.id,
            bounds=self.bounds,
            start=self.start,
            goals=self.goals,
            reach_radius=self.reach_radius,
            fovea_radius=self.fovea_radius,
            hold_count=len(self.holds),
        )

    def goal_hold_ids(self) -> tuple[int, ...]:
        """Holds whose position lies inside some goal disc (boundary inclusive)."""
        out = []
        for hold in self.holds:
            if any(dist(hold.position, g.position) <= g.radius for g in self.goals):
                out.append(hold.id)
        return tuple(out)


def _in_bounds(p: Point, bounds: tuple[float, float]) -> bool:
    return 0 <= p[0] <= bounds[0] and 0 <= p[1] <= bounds[1]


@dataclass(frozen=True)
class ReachGraph:
    """Reachability graph over holds plus the synthetic start node.

    An edge exists iff the center-to-center gap is <= reach_radius
    (boundary inclusive).
    """

    nodes: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    adjacency: Mapping[int, tuple[int, ...]] = field(repr=False)

    def neighbors(self, node: int) -> tuple[int, ...]:
        return self.adjacency.get(node, ())


def build_reach_graph(map_spec: MapSpec) -> ReachGraph:
    holds = map_spec.holds
    r = map_spec.reach_radius
    adjacency: dict[int, list[int]] = {START_NODE: []}
    for hold in holds:
        adjacency[hold.id] = []
    edges: set[tuple[int, int]] = set()
    for i, a in enumerate(holds):
        if dist(map_spec.start, a.position) <= r:
            edges.add((START_NODE, a.id))
            adjacency[START_NODE].append(a.id)
            adjacency[a.id].append(START_NODE)
        for b in holds[i + 1 :]:
            if dist(a.position, b.position) <= r:
                lo, hi = sorted((a.id, b.id))
                edges.add((lo, hi))
                adjacency[a.id].append(b.id)
                adjacency[b.id].append(a.id)
    nodes = (START_NODE,) + tuple(h.id for h in holds)
    return ReachGraph(
        nodes=nodes,
        edges=frozenset(edges),
        adjacency={k: tuple(v) for k, v in adjacency.items()},
    )


@dataclass(frozen=True)
class PathSolution:
    """Minimum move count to any goal, with a witness path of hold ids.

    `hop_count` is None when no goal hold is reachable from the start.
    """

    hop_count: int | None
    path: tuple[int, ...] = ()

    @property
    def reachable(self) -> bool:
        return self.hop_count is not None


def min_path(map_spec: MapSpec, graph: ReachGraph | None = None) -> PathSolution:
    """BFS from the start node to the nearest hold inside any goal disc."""
    graph = graph or build_reach_graph(map_spec)
    goal_ids = set(map_spec.goal_hold_ids())
    if not goal_ids:
        return PathSolution(hop_count=None)
    parents: dict[int, int] = {START_NODE: START_NODE}
    queue = deque([START_NODE])
    while queue:
        node = queue.popleft()
        if node in goal_ids:
            path = []
            cur = node
            while cur != START_NODE:
                path.append(cur)
                cur = parents[cur]
            path.reverse()
            return PathSolution(hop_count=len(path), path=tuple(path))
        for nxt in graph.neighbors(node):
            if nxt not in parents:
                parents[nxt] = node
                queue.append(nxt)
    return PathSolution(hop_count=None)


# --- map document format (version 1) ---------------------------------------
#
# {
#   "format": 1,
#   "id": "corridor-8",
#   "bounds": [1000.0, 1000.0],
#   "start": [150.0, 150.0],
#   "reach_radius": 166.67,
#   "fovea_radius": 166.67,
#   "holds": [{"id": 0, "position": [243.0, 243.0]}, ...],
#   "goals": [{"position": [904.0, 904.0], "radius": 40.0}],
#   "meta": {...}          # optional, free-form
# }


def serialize_map(map_spec: MapSpec) -> bytes:
    doc = {
        "format": MAP_FORMAT_VERSION,
        "id": map_spec.id,
        "bounds": list(map_spec.bounds),
        "start": list(map_spec.start),
        "reach_radius": map_spec.reach_radius,
        "fovea_radius": map_spec.fovea_radius,
        "holds": [{"id": h.id, "position": list(h.position)} for h in map_spec.holds],
        "goals": [{"position": list(g.position), "radius": g.radius} for g in map_spec.goals],
    }
    if map_spec.meta:
        doc["meta"] = dict(map_spec.meta)
    return json.dumps(doc, indent=2, sort_keys=True).encode("utf-8")


def parse_map(data: bytes | str) -> MapSpec:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MapFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MapFormatError("document must be a JSON object")
    version = doc.get("format")
    if version != MAP_FORMAT_VERSION:
        raise MapFormatError(f"unsupported format {version!r}", "format")

    map_id = _require(doc, "id", str)
    bounds = _point(doc, "bounds")
    start = _point(doc, "start")
    reach = _number(doc, "reach_radius")
    fovea = _number(doc, "fovea_radius")

    holds_raw = _require(doc, "holds", list)
    holds = []
    for i, item in enumerate(holds_raw):
        loc = f"holds[{i}]"
        if not isinstance(item, dict):
            raise MapFormatError("hold must be an object", loc)
        hold_id = item.get("id")
        if not isinstance(hold_id, int) or isinstance(hold_id, bool):
            raise MapFormatError("id must be an integer", f"{loc}.id")
        holds.append(Hold(id=hold_id, position=_point(item, "position", loc)))

    goals_raw = _require(doc, "goals", list)
    goals = []
    for i, item in enumerate(goals_raw):
        loc = f"goals[{i}]"
        if not isinstance(item, dict):
            raise MapFormatError("goal must be an object", loc)
        goals.append(Goal(position=_point(item, "position", loc), radius=_number(item, "radius", loc)))

    meta = doc.get("meta")
    if meta is not None and not isinstance(meta, dict):
        raise MapFormatError("meta must be an object", "meta")

    try:
        return MapSpec(
            id=map_id,
            bounds=bounds,
            holds=tuple(holds),
            start=start,
            goals=tuple(goals),
            reach_radius=reach,
            fovea_radius=fovea,
            meta=meta,
        )
    except MapValidationError as exc:
        raise MapFormatError(str(exc)) from exc


def _require(doc: Mapping[str, Any], name: str, kind: type, loc: str = "") -> Any:
    where = f"{loc}.{name}" if loc else name
    if name not in doc:
        raise MapFormatError("missing field", where)
    value = doc[name]
    if not isinstance(value, kind):
        raise MapFormatError(f"expected {kind.__name__}", where)
    return value


def _number(doc: Mapping[str, Any], name: str, loc: str = "") -> float:
    value = _require(doc, name, (int, float), loc)  # type: ignore[arg-type]
    if isinstance(value, bool):
        raise MapFormatError("expected number", f"{loc}.{name}" if loc else name)
    return float(value)


def _point(doc: Mapping[str, Any], name: str, loc: str = "") -> Point:
    where = f"{loc}.{name}" if loc else name
    value = _require(doc, name, list, loc)
    if len(value) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise MapFormatError("expected [x, y] pair of numbers", where)
    return (float(value[0]), float(value[1]))


def load_map(path) -> MapSpec:
    with open(path, "rb") as fh:
        return parse_map(fh.read())


def save_map(map_spec: MapSpec, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_map(map_spec))


def load_map_dir(path) -> dict[str, MapSpec]:
    """Load every `*.json` map in a directory, keyed by map id."""
    import os

    maps: dict[str, MapSpec] = {}
    for name in sorted(os.listdir(path)):
        if name.endswith(".json"):
            spec = load_map(os.path.join(path, name))
            maps[spec.id] = spec
    return maps
