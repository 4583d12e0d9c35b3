"""Unified trial record: one JSON document per trial, shared by agent
simulations and human play.

Document format (version 1):

    {
      "format": 1,
      "map_id": "corridor-8",
      "actor": "AGENT" | "HUMAN",
      "outcome": "SUCCESS" | "TIMEOUT",
      "duration": 12.4,
      "path_length": 5,
      "navigation": [{"t": 1.2, "target_hold_id": 7, "success": true}, ...],
      "attention": {"t": [...], "x": [...], "y": [...]},
      "meta": {"seed": 3, "params": {...}} | {"session_id": "..."}
    }

Attention coordinates are egocentric (agent at the origin) so agent and
human streams share one analysis pipeline. `path_length` must equal the
number of successful navigation events; timestamps must be non-decreasing
and within the 60 s trial budget.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import threading
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping

from .env import EnvConfig, NavigationAttempt, TrialState, TrialStatus, trial_clock
from .maps import MapSpec

RECORD_FORMAT_VERSION = 1
TRIAL_TIME_LIMIT = 60.0
_DURATION_TOLERANCE = 1e-6


class RecordError(ValueError):
    """A trial record document is malformed or inconsistent."""


@dataclass(frozen=True)
class AttentionSample:
    t: float
    x: float
    y: float

    def distance(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class TrialRecord:
    map_id: str
    actor: str  # AGENT | HUMAN
    outcome: str  # SUCCESS | TIMEOUT
    duration: float
    attention: tuple[AttentionSample, ...]
    navigation: tuple[NavigationAttempt, ...]
    path_length: int
    meta: Mapping[str, Any] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.outcome == "SUCCESS"

    def successful_moves(self) -> tuple[NavigationAttempt, ...]:
        return tuple(a for a in self.navigation if a.success)


def from_trial_state(
    state: TrialState,
    map_spec: MapSpec,
    actor: str,
    meta: Mapping[str, Any] | None = None,
    config: EnvConfig = EnvConfig(),
) -> TrialRecord:
    if state.status is TrialStatus.RUNNING:
        raise ValueError("trial still running")
    duration = min(trial_clock(state.step_count, config), config.time_limit)
    return TrialRecord(
        map_id=map_spec.id,
        actor=actor,
        outcome=state.status.value,
        duration=duration,
        attention=tuple(AttentionSample(t=t, x=x, y=y) for t, x, y in state.attention),
        navigation=state.attempts,
        path_length=len(state.path),
        meta=dict(meta or {}),
    )


def record_to_json(record: TrialRecord) -> bytes:
    doc = {
        "format": RECORD_FORMAT_VERSION,
        "map_id": record.map_id,
        "actor": record.actor,
        "outcome": record.outcome,
        "duration": record.duration,
        "path_length": record.path_length,
        "navigation": [
            {"t": a.t, "target_hold_id": a.target_hold_id, "success": a.success}
            for a in record.navigation
        ],
        "attention": {
            "t": [s.t for s in record.attention],
            "x": [s.x for s in record.attention],
            "y": [s.y for s in record.attention],
        },
        "meta": dict(record.meta),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def parse_record(data: bytes | str) -> tuple[TrialRecord, list[str]]:
    """Parse and validate a trial record document.

    Returns the record plus a list of tolerated anomalies (currently
    attention sampling gaps wider than twice the stream's median spacing).
    Raises RecordError on structural violations."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise RecordError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise RecordError("document must be a JSON object")
    if doc.get("format") != RECORD_FORMAT_VERSION:
        raise RecordError(f"format: unsupported version {doc.get('format')!r}")

    map_id = doc.get("map_id")
    if not isinstance(map_id, str) or not map_id:
        raise RecordError("map_id: must be a non-empty string")
    actor = doc.get("actor")
    if actor not in ("AGENT", "HUMAN"):
        raise RecordError(f"actor: must be AGENT or HUMAN, got {actor!r}")
    outcome = doc.get("outcome")
    if outcome not in ("SUCCESS", "TIMEOUT"):
        raise RecordError(f"outcome: must be SUCCESS or TIMEOUT, got {outcome!r}")
    duration = doc.get("duration")
    if not isinstance(duration, (int, float)) or isinstance(duration, bool):
        raise RecordError("duration: must be a number")
    duration = float(duration)
    if not (0 <= duration <= TRIAL_TIME_LIMIT + _DURATION_TOLERANCE):
        raise RecordError(f"duration: {duration} outside [0, {TRIAL_TIME_LIMIT}]")

    navigation = []
    nav_raw = doc.get("navigation")
    if not isinstance(nav_raw, list):
        raise RecordError("navigation: must be a list")
    last_t = -math.inf
    for i, item in enumerate(nav_raw):
        loc = f"navigation[{i}]"
        if not isinstance(item, dict):
            raise RecordError(f"{loc}: must be an object")
        t = item.get("t")
        if not isinstance(t, (int, float)) or isinstance(t, bool):
            raise RecordError(f"{loc}.t: must be a number")
        if t < last_t:
            raise RecordError(f"{loc}.t: non-monotone timestamp {t} < {last_t}")
        last_t = t
        hold_id = item.get("target_hold_id")
        if hold_id is not None and (not isinstance(hold_id, int) or isinstance(hold_id, bool)):
            raise RecordError(f"{loc}.target_hold_id: must be an integer or null")
        success = item.get("success")
        if not isinstance(success, bool):
            raise RecordError(f"{loc}.success: must be a boolean")
        navigation.append(NavigationAttempt(target_hold_id=hold_id, t=float(t), success=success))

    att_raw = doc.get("attention")
    if not isinstance(att_raw, dict):
        raise RecordError("attention: must be an object with t/x/y arrays")
    columns = {}
    for name in ("t", "x", "y"):
        col = att_raw.get(name)
        if not isinstance(col, list):
            raise RecordError(f"attention.{name}: must be a list")
        for v in col:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise RecordError(f"attention.{name}: non-numeric entry {v!r}")
        columns[name] = [float(v) for v in col]
    if not (len(columns["t"]) == len(columns["x"]) == len(columns["y"])):
        raise RecordError("attention: t/x/y arrays must have equal length")
    ts = columns["t"]
    for i in range(1, len(ts)):
        if ts[i] < ts[i - 1]:
            raise RecordError(f"attention.t[{i}]: non-monotone timestamp")
    attention = tuple(
        AttentionSample(t=t, x=x, y=y) for t, x, y in zip(ts, columns["x"], columns["y"])
    )

    path_length = doc.get("path_length")
    if not isinstance(path_length, int) or isinstance(path_length, bool):
        raise RecordError("path_length: must be an integer")
    n_success = sum(1 for a in navigation if a.success)
    if path_length != n_success:
        raise RecordError(
            f"path_length: {path_length} does not match {n_success} successful navigation events"
        )

    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise RecordError("meta: must be an object")

    record = TrialRecord(
        map_id=map_id,
        actor=actor,
        outcome=outcome,
        duration=duration,
        attention=attention,
        navigation=tuple(navigation),
        path_length=path_length,
        meta=meta,
    )
    return record, _attention_anomalies(ts)


def _attention_anomalies(ts: list[float]) -> list[str]:
    if len(ts) < 3:
        return []
    gaps = sorted(ts[i + 1] - ts[i] for i in range(len(ts) - 1))
    median = gaps[len(gaps) // 2]
    if median <= 0:
        return []
    out = []
    for i in range(len(ts) - 1):
        gap = ts[i + 1] - ts[i]
        if gap > 2.0 * median:
            out.append(
                f"attention sampling gap of {gap * 1000:.0f} ms at t={ts[i]:.3f}s"
                f" (median spacing {median * 1000:.1f} ms)"
            )
    return out


def ingest_log(data: bytes | str) -> tuple[TrialRecord, list[str]]:
    """Validate a persisted trial log (human or agent); alias of parse_record."""
    return parse_record(data)


class TrialStore:
    """Append-only directory store of trial records.

    Layout: `<root>/trials/<id>.json` plus `<root>/index.json`. Writes go to
    a temp file and are renamed into place, so readers never observe partial
    documents. Records are content-addressed; duplicates are rejected."""

    def __init__(self, root):
        self.root = os.fspath(root)
        self.trials_dir = os.path.join(self.root, "trials")
        self.index_path = os.path.join(self.root, "index.json")
        os.makedirs(self.trials_dir, exist_ok=True)
        # serializes the index read-modify-write; record files themselves are
        # written atomically
        self._lock = threading.Lock()

    def _load_index(self) -> dict[str, dict]:
        if not os.path.exists(self.index_path):
            return {}
        with open(self.index_path, "r", encoding="utf-8") as fh:
            return json.load(fh)["trials"]

    def _write_index(self, index: dict[str, dict]) -> None:
        payload = json.dumps({"format": 1, "trials": index}, sort_keys=True, indent=1)
        _atomic_write(self.index_path, payload.encode("utf-8"))

    def add(self, record: TrialRecord) -> str:
        import hashlib

        blob = record_to_json(record)
        trial_id = "t" + hashlib.sha256(blob).hexdigest()[:16]
        with self._lock:
            index = self._load_index()
            if trial_id in index:
                raise RecordError(f"duplicate trial record {trial_id}")
            _atomic_write(os.path.join(self.trials_dir, f"{trial_id}.json"), blob)
            index[trial_id] = {
                "map_id": record.map_id,
                "actor": record.actor,
                "outcome": record.outcome,
            }
            self._write_index(index)
        return trial_id

    def get(self, trial_id: str) -> TrialRecord:
        path = os.path.join(self.trials_dir, f"{trial_id}.json")
        if not os.path.exists(path):
            raise KeyError(trial_id)
        with open(path, "rb") as fh:
            record, _ = parse_record(fh.read())
        return record

    def ids(self) -> list[str]:
        return sorted(self._load_index())

    def __iter__(self) -> Iterator[tuple[str, TrialRecord]]:
        for trial_id in self.ids():
            yield trial_id, self.get(trial_id)

    def records(self) -> list[TrialRecord]:
        return [record for _, record in self]


def _atomic_write(path: str, payload: bytes) -> None:
    directory = os.path.dirname(path)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
