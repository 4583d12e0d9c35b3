"""HTTP service for the browser task client.

Serves maps with hold positions withheld: the client only ever receives the
holds inside a requested spotlight disc (the reveal endpoint), so partial
observability holds even against inspection of network traffic. Submitted
trials go through the same validation as agent records and land in the same
append-only store the harness reads.

Endpoints:
    POST /sessions                      {"seed": int?}        -> session info
    GET  /sessions/{sid}/maps/{index}                         -> map payload (no holds)
    POST /sessions/{sid}/reveal         {"index", "x", "y"}   -> visible holds
    POST /sessions/{sid}/trials         {trial record JSON}   -> stored id + totals
    GET  /trials/{tid}                                        -> trial record JSON

The reveal handler is a linear scan over at most a few dozen holds, far
inside the one-frame (33 ms) budget of a 30 Hz client.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .maps import MapSpec, PathSolution, dist, min_path
from .metrics import trial_score
from .records import RecordError, TrialStore, parse_record


@dataclass(frozen=True)
class BonusPolicy:
    """Base payment plus a bonus tier keyed on score as a percent of maximum:
    below 60% pays 0, 60-80% pays 2, above 80% pays 4."""

    base: float = 6.0
    mid_threshold: float = 0.6
    high_threshold: float = 0.8
    tiers: tuple[float, float, float] = (0.0, 2.0, 4.0)

    def tier(self, score_fraction: float) -> float:
        if score_fraction > self.high_threshold:
            return self.tiers[2]
        if score_fraction >= self.mid_threshold:
            return self.tiers[1]
        return self.tiers[0]

    def total(self, score_fraction: float) -> float:
        return self.base + self.tier(score_fraction)


@dataclass
class Session:
    id: str
    #: practice map first (when configured), then the scored maps shuffled
    map_order: list[str]
    practice_map_id: str | None
    submitted: dict[str, str] = field(default_factory=dict)  # map_id -> trial_id
    cumulative_score: float = 0.0

    def scored_map_ids(self) -> list[str]:
        return [m for m in self.map_order if m != self.practice_map_id]

    def score_fraction(self) -> float:
        n = len(self.scored_map_ids())
        return self.cumulative_score / n if n else 0.0


def create_session(
    map_ids: list[str],
    seed: int,
    practice_map_id: str | None = None,
    session_id: str | None = None,
) -> Session:
    """Deterministic per seed: the scored maps are permuted, the practice map
    (when present) is pinned first."""
    scored = [m for m in sorted(map_ids) if m != practice_map_id]
    if not scored:
        raise ValueError("need at least one scored map")
    rng = np.random.default_rng(np.random.SeedSequence([seed & (2**63 - 1)]))
    order = [scored[i] for i in rng.permutation(len(scored))]
    if practice_map_id is not None:
        order.insert(0, practice_map_id)
    return Session(
        id=session_id or secrets.token_hex(8),
        map_order=order,
        practice_map_id=practice_map_id,
    )


class TaskService:
    """Session book-keeping plus the record store; per-session mutation is
    serialized under one lock per session."""

    def __init__(
        self,
        maps: Mapping[str, MapSpec],
        store: TrialStore,
        practice_map_id: str | None = None,
        bonus: BonusPolicy = BonusPolicy(),
    ):
        if practice_map_id is not None and practice_map_id not in maps:
            raise ValueError(f"practice map {practice_map_id!r} not in map set")
        self.maps = dict(maps)
        self.store = store
        self.practice_map_id = practice_map_id
        self.bonus = bonus
        self.sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self.solutions: dict[str, PathSolution] = {}
        for map_id, spec in self.maps.items():
            if map_id == practice_map_id:
                continue
            solution = min_path(spec)
            if not solution.reachable:
                raise ValueError(f"scored map {map_id} has no reachable goal")
            self.solutions[map_id] = solution

    def new_session(self, seed: int | None) -> Session:
        if seed is None:
            seed = int.from_bytes(secrets.token_bytes(6), "big")
        session = create_session(list(self.maps), seed, self.practice_map_id)
        with self._registry_lock:
            while session.id in self.sessions:
                session.id = secrets.token_hex(8)
            self.sessions[session.id] = session
            self._locks[session.id] = threading.Lock()
        return session

    def _session(self, session_id: str) -> tuple[Session, threading.Lock]:
        with self._registry_lock:
            session = self.sessions.get(session_id)
            lock = self._locks.get(session_id)
        if session is None or lock is None:
            raise KeyError(session_id)
        return session, lock

    def map_payload(self, session_id: str, index: int) -> dict[str, Any]:
        session, _ = self._session(session_id)
        if not (0 <= index < len(session.map_order)):
            raise IndexError(index)
        spec = self.maps[session.map_order[index]]
        return {
            "index": index,
            "map_id": spec.id,
            "practice": spec.id == session.practice_map_id,
            "bounds": list(spec.bounds),
            "start": list(spec.start),
            "goals": [{"position": list(g.position), "radius": g.radius} for g in spec.goals],
            "reach_radius": spec.reach_radius,
            "fovea_radius": spec.fovea_radius,
            "hold_count": len(spec.holds),
            "n_maps": len(session.map_order),
        }

    def reveal(self, session_id: str, index: int, x: float, y: float) -> list[dict[str, Any]]:
        session, _ = self._session(session_id)
        if not (0 <= index < len(session.map_order)):
            raise IndexError(index)
        spec = self.maps[session.map_order[index]]
        visible = [
            {"id": h.id, "position": list(h.position)}
            for h in spec.holds
            if dist(h.position, (x, y)) <= spec.fovea_radius
        ]
        return visible

    def submit_trial(self, session_id: str, payload: bytes) -> dict[str, Any]:
        session, lock = self._session(session_id)
        record, anomalies = parse_record(payload)
        if record.map_id not in self.maps:
            raise RecordError(f"unknown map {record.map_id}")
        if record.map_id not in session.map_order:
            raise RecordError(f"map {record.map_id} does not belong to session {session_id}")
        with lock:
            if record.map_id in session.submitted:
                raise RecordError(f"map {record.map_id} already submitted for this session")
            trial_id = self.store.add(record)
            session.submitted[record.map_id] = trial_id
            score = 0.0
            if record.map_id != session.practice_map_id:
                score = trial_score(
                    record, self.maps[record.map_id], self.solutions[record.map_id]
                ).score
                session.cumulative_score += score
            fraction = session.score_fraction()
        return {
            "trial_id": trial_id,
            "score": score,
            "cumulative_score": session.cumulative_score,
            "score_fraction": fraction,
            "bonus_tier": self.bonus.tier(fraction),
            "bonus_total": self.bonus.total(fraction),
            "anomalies": anomalies,
        }


def create_app(
    maps: Mapping[str, MapSpec],
    store_dir,
    practice_map_id: str | None = None,
    bonus: BonusPolicy = BonusPolicy(),
) -> FastAPI:
    service = TaskService(maps, TrialStore(store_dir), practice_map_id, bonus)
    app = FastAPI(title="prospect task service")
    app.state.service = service

    @app.post("/sessions")
    async def post_session(body: dict | None = None) -> dict:
        seed = (body or {}).get("seed")
        if seed is not None and not isinstance(seed, int):
            raise HTTPException(status_code=422, detail="seed must be an integer")
        session = service.new_session(seed)
        return {
            "session_id": session.id,
            "n_maps": len(session.map_order),
            "practice_first": session.practice_map_id is not None,
        }

    @app.get("/sessions/{session_id}/maps/{index}")
    async def get_map(session_id: str, index: int) -> dict:
        try:
            return service.map_payload(session_id, index)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        except IndexError:
            raise HTTPException(status_code=404, detail="map index out of range")

    @app.post("/sessions/{session_id}/reveal")
    async def post_reveal(session_id: str, body: dict) -> dict:
        try:
            index = int(body["index"])
            x = float(body["x"])
            y = float(body["y"])
        except (KeyError, TypeError, ValueError):
            raise HTTPException(status_code=422, detail="body must carry index, x, y")
        try:
            return {"holds": service.reveal(session_id, index, x, y)}
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        except IndexError:
            raise HTTPException(status_code=404, detail="map index out of range")

    @app.post("/sessions/{session_id}/trials")
    async def post_trial(session_id: str, body: dict) -> dict:
        try:
            return service.submit_trial(session_id, json.dumps(body).encode("utf-8"))
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session")
        except RecordError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/trials/{trial_id}")
    async def get_trial(trial_id: str):
        try:
            record = service.store.get(trial_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown trial")
        from .records import record_to_json

        return JSONResponse(content=json.loads(record_to_json(record)))

    return app
