"""Command-line entry points.

    prospect run --maps <dir|files> --runs 81 --seed 7 --params params.json --out out/
    prospect gridsearch --map fixtures/maps/fork-trap.json --grid grid.json \
        --runs-per-cell 81 --seed 7 --out out/
    prospect report --in out/ [--compare other-out/] [--out report-dir/]
    prospect genmaps --seed 7 --config gen.json --count 5 --out maps/
    prospect serve --maps fixtures/maps --store sessions/ --port 8000

The output directory may also be set with the PROSPECT_OUT environment
variable; an explicit --out wins. Exit status is 0 on success and 2 on
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .agent.params import AgentParams
from .harness import (
    DEFAULT_RUNS_PER_MAP,
    ExperimentConfig,
    GridSearchResult,
    grid_search,
    report_from_store,
    run_batch,
    write_report,
)
from .mapgen import GeneratorConfig, generate_map
from .maps import MapSpec, load_map, load_map_dir, save_map
from .records import TrialStore


class CliError(Exception):
    pass


def _resolve_out(value: str | None) -> str:
    out = value or os.environ.get("PROSPECT_OUT")
    if not out:
        raise CliError("no output directory: pass --out or set PROSPECT_OUT")
    return out


def _load_maps(source: str) -> dict[str, MapSpec]:
    if os.path.isdir(source):
        maps = load_map_dir(source)
        if not maps:
            raise CliError(f"no maps found in directory {source}")
        return maps
    maps = {}
    for part in source.split(","):
        part = part.strip()
        if not part:
            continue
        if not os.path.exists(part):
            raise CliError(f"map file not found: {part}")
        m = load_map(part)
        maps[m.id] = m
    if not maps:
        raise CliError(f"no maps resolved from {source!r}")
    return maps


def _load_params(path: str | None) -> AgentParams | dict[str, AgentParams]:
    if path is None:
        return AgentParams()
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if "per_map" in doc:
        return {mid: AgentParams.from_json(p) for mid, p in doc["per_map"].items()}
    return AgentParams.from_json(doc)


def _cmd_run(args: argparse.Namespace) -> int:
    maps = _load_maps(args.maps)
    params = _load_params(args.params)
    out_dir = _resolve_out(args.out)
    config = ExperimentConfig(
        maps=tuple(maps.values()),
        runs_per_map=args.runs,
        params=params,
        master_seed=args.seed,
        workers=args.workers,
    )
    store = TrialStore(out_dir)
    report = run_batch(config, store=store)
    write_report(report, out_dir)
    print(report.summary_text())
    return 0


def _cmd_gridsearch(args: argparse.Namespace) -> int:
    maps = _load_maps(args.map)
    if len(maps) != 1:
        raise CliError("gridsearch expects exactly one map")
    (map_spec,) = maps.values()
    with open(args.grid, "r", encoding="utf-8") as fh:
        grid = json.load(fh)
    base = _load_params(args.params)
    if not isinstance(base, AgentParams):
        raise CliError("gridsearch --params must be a single parameter set")
    result: GridSearchResult = grid_search(
        map_spec,
        grid,
        runs_per_cell=args.runs_per_cell,
        seed=args.seed,
        base_params=base,
        screen_runs=args.screen_runs,
    )
    payload = json.dumps(result.to_json_dict(), indent=2, sort_keys=True)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"gridsearch-{map_spec.id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        print(f"wrote {path}")
    best = result.best
    print(f"best cell {best.index}: {best.overrides}"
          f" rate={best.success_rate:.3f} score={best.mean_score:.3f} dur={best.mean_duration:.2f}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    store = TrialStore(args.in_dir)
    maps = _load_maps(args.maps) if args.maps else {}
    compare = TrialStore(args.compare) if args.compare else None
    report = report_from_store(store, maps, compare_store=compare)
    if args.out:
        write_report(report, args.out)
    print(report.summary_text())
    return 0


def _cmd_genmaps(args: argparse.Namespace) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = GeneratorConfig.from_json(fh.read())
    else:
        config = GeneratorConfig()
    out_dir = _resolve_out(args.out)
    os.makedirs(out_dir, exist_ok=True)
    for i in range(args.count):
        spec = generate_map(args.seed + i, config, map_id=f"gen-{args.seed + i}")
        path = os.path.join(out_dir, f"{spec.id}.json")
        save_map(spec, path)
        print(f"wrote {path}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    maps = _load_maps(args.maps)
    app = create_app(maps=maps, store_dir=args.store, practice_map_id=args.practice_map)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prospect")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run seeded trial batches and write records + report")
    p_run.add_argument("--maps", required=True, help="map directory or comma-separated map files")
    p_run.add_argument("--runs", type=int, default=DEFAULT_RUNS_PER_MAP)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--params", help="agent params JSON (or {'per_map': {...}})")
    p_run.add_argument("--out", help="output directory (or PROSPECT_OUT)")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.set_defaults(func=_cmd_run)

    p_grid = sub.add_parser("gridsearch", help="tune parameters on one map")
    p_grid.add_argument("--map", required=True)
    p_grid.add_argument("--grid", required=True, help="JSON {param: [values, ...]}")
    p_grid.add_argument("--runs-per-cell", type=int, default=DEFAULT_RUNS_PER_MAP)
    p_grid.add_argument("--screen-runs", type=int, default=None,
                        help="cheap screening run count before full evaluation of leaders")
    p_grid.add_argument("--seed", type=int, default=0)
    p_grid.add_argument("--params", help="base agent params JSON")
    p_grid.add_argument("--out")
    p_grid.set_defaults(func=_cmd_gridsearch)

    p_rep = sub.add_parser("report", help="aggregate a record store")
    p_rep.add_argument("--in", dest="in_dir", required=True)
    p_rep.add_argument("--maps", help="map directory for score/goal aggregation")
    p_rep.add_argument("--compare", help="second record store to correlate against")
    p_rep.add_argument("--out", help="directory for report.json/report.txt")
    p_rep.set_defaults(func=_cmd_report)

    p_gen = sub.add_parser("genmaps", help="generate maps")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--config", help="generator config JSON")
    p_gen.add_argument("--count", type=int, default=1)
    p_gen.add_argument("--out", help="output directory (or PROSPECT_OUT)")
    p_gen.set_defaults(func=_cmd_genmaps)

    p_srv = sub.add_parser("serve", help="serve the task API for the browser client")
    p_srv.add_argument("--maps", required=True)
    p_srv.add_argument("--store", required=True)
    p_srv.add_argument("--practice-map", default=None)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
