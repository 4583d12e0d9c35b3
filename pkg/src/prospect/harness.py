"""Batch experiment driver: seeded trials, aggregate reports, grid search.

Every experiment output is a pure function of its configuration and master
seed. Per-trial seeds are derived with the splittable scheme in `rng`, so
trials can run in any order (or in parallel worker processes) and still
produce byte-identical aggregates.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .agent.params import AgentParams
from .agent.planner import Planner
from .env import EnvConfig, TrialStatus, apply_action, init_trial, observe
from .maps import MapSpec, PathSolution, min_path
from .metrics import (
    Correlation,
    binned_max_attention,
    correlate,
    delay_to_first_move,
    difficulty_terciles,
    trial_score,
)
from .records import TrialRecord, TrialStore, from_trial_state, record_to_json
from .rng import derive, map_key

DEFAULT_RUNS_PER_MAP = 81
ATTENTION_BINS = 10


def run_trial(
    map_spec: MapSpec,
    params: AgentParams,
    seed: int,
    env_config: EnvConfig = EnvConfig(),
    max_decisions: int | None = None,
) -> TrialRecord:
    """One seeded agent trial; deterministic for fixed (map, params, seed)."""
    state = init_trial(map_spec, env_config)
    planner = Planner(map_spec.public_view(), params, seed)
    decisions = 0
    while state.status is TrialStatus.RUNNING:
        obs = observe(state, map_spec)
        action = planner.step(state, obs)
        state = apply_action(state, action, map_spec, env_config)
        decisions += 1
        if max_decisions is not None and decisions >= max_decisions:
            break
    meta = {"seed": seed, "params": params.to_json()}
    return from_trial_state(state, map_spec, actor="AGENT", meta=meta, config=env_config)


@dataclass(frozen=True)
class ExperimentConfig:
    maps: tuple[MapSpec, ...]
    runs_per_map: int = DEFAULT_RUNS_PER_MAP
    #: one parameter set for all maps, or a per-map-id mapping
    params: AgentParams | Mapping[str, AgentParams] = field(default_factory=AgentParams)
    master_seed: int = 0
    env: EnvConfig = field(default_factory=EnvConfig)
    workers: int = 1

    def __post_init__(self):
        if self.runs_per_map < 1:
            raise ValueError("runs_per_map must be >= 1")
        if not self.maps:
            raise ValueError("at least one map is required")

    def params_for(self, map_id: str) -> AgentParams:
        if isinstance(self.params, AgentParams):
            return self.params
        if map_id in self.params:
            return self.params[map_id]
        raise KeyError(f"no parameters configured for map {map_id}")


def trial_seed(master_seed: int, map_id: str, run_index: int) -> int:
    return derive(master_seed, map_key(map_id), run_index)


@dataclass(frozen=True)
class MapAggregate:
    map_id: str
    n_runs: int
    n_success: int
    success_rate: float
    min_hops: int | None
    mean_score: float
    scores: tuple[float, ...]
    durations: tuple[float, ...]
    mean_duration: float
    goal_counts: dict[int, int]
    mean_attention_distance: float | None
    #: mean over runs of per-run binned max attention distance (None where
    #: every run's bin was empty)
    attention_profile: tuple[float | None, ...]
    mean_delay_to_first_move: float


@dataclass(frozen=True)
class AggregateReport:
    per_map: dict[str, MapAggregate]
    n_trials: int
    overall_success_rate: float
    difficulty: dict[str, str] | None
    comparison: dict[str, Any] | None = None

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "format": 1,
            "n_trials": self.n_trials,
            "overall_success_rate": self.overall_success_rate,
            "difficulty": self.difficulty,
            "maps": {},
        }
        for map_id, agg in sorted(self.per_map.items()):
            out["maps"][map_id] = {
                "n_runs": agg.n_runs,
                "n_success": agg.n_success,
                "success_rate": agg.success_rate,
                "min_hops": agg.min_hops,
                "mean_score": agg.mean_score,
                "scores": list(agg.scores),
                "durations": list(agg.durations),
                "mean_duration": agg.mean_duration,
                "goal_counts": {str(k): v for k, v in sorted(agg.goal_counts.items())},
                "mean_attention_distance": agg.mean_attention_distance,
                "attention_profile": list(agg.attention_profile),
                "mean_delay_to_first_move": agg.mean_delay_to_first_move,
            }
        if self.comparison is not None:
            out["comparison"] = self.comparison
        return out

    def to_json(self) -> bytes:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")

    def summary_text(self) -> str:
        lines = [f"{'map':<16} {'runs':>5} {'success':>8} {'score':>7} {'dur':>7}  difficulty"]
        for map_id, agg in sorted(self.per_map.items()):
            tier = (self.difficulty or {}).get(map_id, "-")
            lines.append(
                f"{map_id:<16} {agg.n_runs:>5} {agg.success_rate:>8.3f}"
                f" {agg.mean_score:>7.3f} {agg.mean_duration:>7.2f}  {tier}"
            )
        lines.append(f"overall: {self.n_trials} trials, success rate {self.overall_success_rate:.3f}")
        if self.comparison:
            for key, value in sorted(self.comparison.items()):
                lines.append(f"compare {key}: {value}")
        return "\n".join(lines)


def _run_one(args: tuple[MapSpec, AgentParams, int, EnvConfig]) -> TrialRecord:
    map_spec, params, seed, env_config = args
    return run_trial(map_spec, params, seed, env_config)


def run_batch(config: ExperimentConfig, store: TrialStore | None = None) -> AggregateReport:
    """Run `runs_per_map` seeded trials on every map and aggregate. With
    `workers > 1`, trials execute in a process pool; results are folded in
    deterministic (map, run index) order either way."""
    tasks = []
    for map_spec in config.maps:
        params = config.params_for(map_spec.id)
        for run in range(config.runs_per_map):
            seed = trial_seed(config.master_seed, map_spec.id, run)
            tasks.append((map_spec, params, seed, config.env))

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_run_one, tasks, chunksize=4))
    else:
        records = [_run_one(task) for task in tasks]

    if store is not None:
        for record in records:
            store.add(record)

    by_map: dict[str, list[TrialRecord]] = {m.id: [] for m in config.maps}
    for record in records:
        by_map[record.map_id].append(record)
    maps_by_id = {m.id: m for m in config.maps}
    return aggregate({mid: recs for mid, recs in by_map.items()}, maps_by_id)


def aggregate(
    records_by_map: Mapping[str, Sequence[TrialRecord]],
    maps_by_id: Mapping[str, MapSpec],
) -> AggregateReport:
    per_map: dict[str, MapAggregate] = {}
    n_trials = 0
    n_success = 0
    for map_id in sorted(records_by_map):
        records = list(records_by_map[map_id])
        if not records:
            continue
        map_spec = maps_by_id.get(map_id)
        per_map[map_id] = _aggregate_map(map_id, records, map_spec)
        n_trials += len(records)
        n_success += per_map[map_id].n_success
    difficulty = None
    if len(per_map) >= 3:
        difficulty = difficulty_terciles({mid: agg.success_rate for mid, agg in per_map.items()})
    return AggregateReport(
        per_map=per_map,
        n_trials=n_trials,
        overall_success_rate=(n_success / n_trials) if n_trials else 0.0,
        difficulty=difficulty,
    )


def _aggregate_map(map_id: str, records: Sequence[TrialRecord], map_spec: MapSpec | None) -> MapAggregate:
    # canonical record order: float folds below must not depend on whether
    # records arrive from a live batch or a store replay
    records = sorted(records, key=record_to_json)
    solution: PathSolution | None = None
    goal_counts: dict[int, int] = {}
    scores = []
    if map_spec is not None:
        solution = min_path(map_spec)
    for record in records:
        if map_spec is not None and solution is not None and solution.reachable:
            scores.append(trial_score(record, map_spec, solution).score)
        else:
            scores.append(0.0)
        goal_idx = _goal_reached(record, map_spec)
        if goal_idx is not None:
            goal_counts[goal_idx] = goal_counts.get(goal_idx, 0) + 1

    successes = sum(1 for r in records if r.success)
    # distributions are stored sorted so reports do not depend on record
    # iteration order (live batch vs store replay)
    scores = sorted(scores)
    durations = tuple(sorted(r.duration for r in records))
    att_means = [m for r in records if (m := _mean_attention(r)) is not None]
    profiles = [
        binned_max_attention(r.attention, ATTENTION_BINS, duration=r.duration)
        for r in records
        if r.attention
    ]
    profile = _mean_profile(profiles)
    delays = [delay_to_first_move(r) for r in records]
    return MapAggregate(
        map_id=map_id,
        n_runs=len(records),
        n_success=successes,
        success_rate=successes / len(records),
        min_hops=solution.hop_count if solution is not None else None,
        mean_score=float(np.mean(scores)) if scores else 0.0,
        scores=tuple(scores),
        durations=durations,
        mean_duration=float(np.mean(durations)),
        goal_counts=goal_counts,
        mean_attention_distance=float(np.mean(att_means)) if att_means else None,
        attention_profile=profile,
        mean_delay_to_first_move=float(np.mean(delays)),
    )


def _mean_attention(record: TrialRecord) -> float | None:
    if not record.attention:
        return None
    return float(np.mean([s.distance() for s in record.attention]))


def _mean_profile(profiles: list[list[float | None]]) -> tuple[float | None, ...]:
    if not profiles:
        return tuple([None] * ATTENTION_BINS)
    out: list[float | None] = []
    for b in range(ATTENTION_BINS):
        values = [p[b] for p in profiles if p[b] is not None]
        out.append(float(np.mean(values)) if values else None)
    return tuple(out)


def _goal_reached(record: TrialRecord, map_spec: MapSpec | None) -> int | None:
    """Index of the goal disc containing the final hold of a successful run."""
    if map_spec is None or not record.success:
        return None
    last_hold_id = None
    for attempt in record.navigation:
        if attempt.success:
            last_hold_id = attempt.target_hold_id
    if last_hold_id is None:
        return None
    try:
        hold = map_spec.hold_by_id(last_hold_id)
    except KeyError:
        return None
    for idx, goal in enumerate(map_spec.goals):
        if math.hypot(hold.position[0] - goal.position[0], hold.position[1] - goal.position[1]) <= goal.radius:
            return idx
    return None


def compare_reports(base: AggregateReport, other: AggregateReport) -> dict[str, Any]:
    """Cross-population comparison over the maps both reports share: Pearson
    correlation of per-map success rates and mean durations."""
    shared = sorted(set(base.per_map) & set(other.per_map))
    result: dict[str, Any] = {"n_shared_maps": len(shared), "maps": shared}
    if len(shared) >= 3:
        result["success_rate"] = _corr_dict(
            correlate(
                [base.per_map[m].success_rate for m in shared],
                [other.per_map[m].success_rate for m in shared],
            )
        )
        result["mean_duration"] = _corr_dict(
            correlate(
                [base.per_map[m].mean_duration for m in shared],
                [other.per_map[m].mean_duration for m in shared],
            )
        )
    return result


def _corr_dict(corr: Correlation) -> dict[str, Any]:
    return {"r": corr.r, "p_value": corr.p_value, "undefined_reason": corr.undefined_reason}


# --- grid search ------------------------------------------------------------


@dataclass(frozen=True)
class GridCell:
    index: int
    overrides: dict[str, Any]
    params: AgentParams
    n_runs: int
    n_success: int
    mean_score: float
    mean_duration: float

    @property
    def success_rate(self) -> float:
        return self.n_success / self.n_runs if self.n_runs else 0.0

    def objective(self) -> tuple[float, float, float]:
        """Sort key: success first, then efficiency, then speed."""
        return (self.success_rate, self.mean_score, -self.mean_duration)


@dataclass(frozen=True)
class GridSearchResult:
    best: GridCell
    table: tuple[GridCell, ...]

    def to_json_dict(self) -> dict[str, Any]:
        def cell(c: GridCell) -> dict[str, Any]:
            return {
                "index": c.index,
                "overrides": c.overrides,
                "n_runs": c.n_runs,
                "n_success": c.n_success,
                "success_rate": c.success_rate,
                "mean_score": c.mean_score,
                "mean_duration": c.mean_duration,
            }

        return {"format": 1, "best": cell(self.best), "table": [cell(c) for c in self.table]}


def grid_cells(grid: Mapping[str, Sequence[Any]], base: AgentParams) -> list[tuple[dict[str, Any], AgentParams]]:
    """Expand a {param: values} grid into (overrides, params) cells, ordered
    row-major over sorted parameter names."""
    names = sorted(grid)
    if not names:
        raise ValueError("grid must have at least one axis")
    for name in names:
        if not grid[name]:
            raise ValueError(f"grid axis {name} is empty")
    cells = []
    for combo in itertools.product(*(grid[n] for n in names)):
        overrides = dict(zip(names, combo))
        cells.append((overrides, base.replace(**overrides)))
    return cells


def grid_search(
    map_spec: MapSpec,
    grid: Mapping[str, Sequence[Any]],
    runs_per_cell: int,
    seed: int,
    base_params: AgentParams | None = None,
    env_config: EnvConfig = EnvConfig(),
    early_stop: bool = True,
    screen_runs: int | None = None,
) -> GridSearchResult:
    """Evaluate every grid cell by (success rate, mean score, mean duration)
    and return the argmax cell plus the full table. Deterministic per seed.

    With `early_stop`, a cell is abandoned once it can no longer reach the
    best success rate seen so far (its final rate would be strictly lower, so
    it cannot win). With `screen_runs`, all cells are first ranked at that
    cheaper run count and only leading cells are promoted to the full
    `runs_per_cell`; the certified winner always carries `runs_per_cell`
    evaluations."""
    base = base_params or AgentParams()
    cells = grid_cells(grid, base)
    mkey = map_key(map_spec.id)

    def evaluate(cell_idx: int, params: AgentParams, n_runs: int, rate_to_beat: float) -> tuple[int, int, float, float]:
        n_success = 0
        scores: list[float] = []
        durations: list[float] = []
        solution = min_path(map_spec)
        for run in range(n_runs):
            if early_stop and n_runs - run + n_success < math.ceil(rate_to_beat * n_runs):
                break  # cannot reach rate_to_beat anymore
            record = run_trial(
                map_spec,
                params,
                derive(seed, mkey, cell_idx, run),
                env_config,
            )
            n_success += 1 if record.success else 0
            scores.append(trial_score(record, map_spec, solution).score if solution.reachable else 0.0)
            durations.append(record.duration)
        n_eval = len(scores)
        return (
            n_eval,
            n_success,
            float(np.mean(scores)) if scores else 0.0,
            float(np.mean(durations)) if durations else 0.0,
        )

    def run_stage(n_runs: int) -> list[GridCell]:
        results: list[GridCell] = []
        best_rate = 0.0
        for idx, (overrides, params) in enumerate(cells):
            n_eval, n_success, mean_score, mean_duration = evaluate(idx, params, n_runs, best_rate)
            cell = GridCell(
                index=idx,
                overrides=overrides,
                params=params,
                n_runs=n_eval,
                n_success=n_success,
                mean_score=mean_score,
                mean_duration=mean_duration,
            )
            results.append(cell)
            best_rate = max(best_rate, cell.success_rate)
        return results

    if screen_runs is not None and screen_runs < runs_per_cell:
        screened = run_stage(screen_runs)
        order = sorted(screened, key=lambda c: (c.objective(), -c.index), reverse=True)
        table: dict[int, GridCell] = {c.index: c for c in screened}
        best: GridCell | None = None
        for candidate in order:
            idx = candidate.index
            rate_to_beat = best.success_rate if best is not None else 0.0
            n_eval, n_success, mean_score, mean_duration = evaluate(idx, cells[idx][1], runs_per_cell, rate_to_beat)
            full = GridCell(
                index=idx,
                overrides=candidate.overrides,
                params=candidate.params,
                n_runs=n_eval,
                n_success=n_success,
                mean_score=mean_score,
                mean_duration=mean_duration,
            )
            table[idx] = full
            if best is None or full.objective() > best.objective():
                best = full
            # stop promoting once no remaining screened cell could beat the
            # certified best even with a perfect record
            if best.success_rate >= 1.0:
                break
        assert best is not None
        ordered_table = tuple(table[i] for i in sorted(table))
        return GridSearchResult(best=best, table=ordered_table)

    results = run_stage(runs_per_cell)
    best = max(results, key=lambda c: (c.objective(), -c.index))
    return GridSearchResult(best=best, table=tuple(results))


# --- report persistence -----------------------------------------------------


def write_report(report: AggregateReport, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "wb") as fh:
        fh.write(report.to_json())
    with open(os.path.join(out_dir, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(report.summary_text() + "\n")


def report_from_store(
    store: TrialStore,
    maps_by_id: Mapping[str, MapSpec],
    compare_store: TrialStore | None = None,
) -> AggregateReport:
    """Aggregate straight from persisted records, optionally attaching a
    comparison against a second population."""
    by_map: dict[str, list[TrialRecord]] = {}
    for _, record in store:
        by_map.setdefault(record.map_id, []).append(record)
    report = aggregate(by_map, maps_by_id)
    if compare_store is not None:
        other_by_map: dict[str, list[TrialRecord]] = {}
        for _, record in compare_store:
            other_by_map.setdefault(record.map_id, []).append(record)
        other = aggregate(other_by_map, maps_by_id)
        comparison = compare_reports(report, other)
        report = AggregateReport(
            per_map=report.per_map,
            n_trials=report.n_trials,
            overall_success_rate=report.overall_success_rate,
            difficulty=report.difficulty,
            comparison=comparison,
        )
    return report
