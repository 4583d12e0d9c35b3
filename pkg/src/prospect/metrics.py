"""Scoring and behavioral analytics shared by agent and human trials.

All functions are pure over immutable records. The trial score is path
efficiency: the map's minimum move count over the moves actually taken, zero
on failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .maps import MapSpec, PathSolution, min_path
from .records import AttentionSample, TrialRecord, ingest_log

__all__ = [
    "ScoreResult",
    "trial_score",
    "attention_distance",
    "segment_reachable",
    "binned_max_attention",
    "delay_to_first_move",
    "difficulty_terciles",
    "Correlation",
    "correlate",
    "ingest_log",
]


class InconsistentRecordError(ValueError):
    """A record's outcome and navigation events disagree."""


@dataclass(frozen=True)
class ScoreResult:
    score: float
    min_hops: int
    path_length: int
    success: bool


def trial_score(
    record: TrialRecord,
    map_spec: MapSpec,
    solution: PathSolution | None = None,
) -> ScoreResult:
    """Score in [0, 1]: 0 on failure, min_hops/path_length on success.

    `solution` may be supplied to avoid recomputing the map's optimum."""
    solution = solution or min_path(map_spec)
    if not solution.reachable:
        raise ValueError(f"map {map_spec.id} has no reachable goal; score undefined")
    assert solution.hop_count is not None
    if not record.success:
        return ScoreResult(score=0.0, min_hops=solution.hop_count, path_length=record.path_length, success=False)
    if record.path_length <= 0:
        raise InconsistentRecordError("successful record with no successful moves")
    return ScoreResult(
        score=solution.hop_count / record.path_length,
        min_hops=solution.hop_count,
        path_length=record.path_length,
        success=True,
    )


def attention_distance(stream: Sequence[AttentionSample]) -> tuple[np.ndarray, float | None]:
    """Per-sample egocentric distance of the fovea from the agent, plus the
    mean (None for an empty stream)."""
    distances = np.array([s.distance() for s in stream], dtype=np.float64)
    mean = float(distances.mean()) if distances.size else None
    return distances, mean


def segment_reachable(
    stream: Sequence[AttentionSample], reach_radius: float
) -> tuple[list[AttentionSample], list[AttentionSample]]:
    """Split samples into (within reach, beyond reach); the boundary counts
    as within, consistent with the reach rule."""
    within, beyond = [], []
    for sample in stream:
        (within if sample.distance() <= reach_radius else beyond).append(sample)
    return within, beyond


def binned_max_attention(
    stream: Sequence[AttentionSample],
    n_bins: int,
    duration: float | None = None,
) -> list[float | None]:
    """Maximum attention distance per progress bin; None marks empty bins.

    Samples are assigned by t/duration; `duration` defaults to the last
    sample's timestamp."""
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if not stream:
        raise ValueError("stream must be nonempty")
    if duration is None:
        duration = stream[-1].t
    maxima: list[float | None] = [None] * n_bins
    for sample in stream:
        if duration > 0:
            idx = min(int(sample.t / duration * n_bins), n_bins - 1)
        else:
            idx = 0
        d = sample.distance()
        if maxima[idx] is None or d > maxima[idx]:
            maxima[idx] = d
    return maxima


def delay_to_first_move(record: TrialRecord) -> float:
    """Timestamp of the first successful navigation event; the full trial
    duration when no move succeeded."""
    for attempt in record.navigation:
        if attempt.success:
            return attempt.t
    return record.duration


def difficulty_terciles(success_rates: dict[str, float]) -> dict[str, str]:
    """Assign LOW/MEDIUM/HIGH difficulty by success rate (high rate = LOW
    difficulty). Group sizes are as equal as possible, remainders going to
    the easier groups; rate ties break by map id."""
    if len(success_rates) < 3:
        raise ValueError("need at least 3 maps for terciles")
    ordered = sorted(success_rates, key=lambda m: (-success_rates[m], m))
    n = len(ordered)
    base, rem = divmod(n, 3)
    sizes = [base + (1 if rem >= 1 else 0), base + (1 if rem >= 2 else 0), base]
    labels = {}
    cursor = 0
    for size, label in zip(sizes, ("LOW", "MEDIUM", "HIGH")):
        for map_id in ordered[cursor : cursor + size]:
            labels[map_id] = label
        cursor += size
    return labels


@dataclass(frozen=True)
class Correlation:
    r: float | None
    p_value: float | None
    undefined_reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.r is not None


def correlate(xs: Iterable[float], ys: Iterable[float]) -> Correlation:
    """Pearson correlation with a two-sided p-value; flags degenerate input
    instead of raising."""
    x = np.asarray(list(xs), dtype=np.float64)
    y = np.asarray(list(ys), dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.size < 3:
        raise ValueError("need at least 3 points")
    if float(np.var(x)) == 0.0 or float(np.var(y)) == 0.0:
        return Correlation(r=None, p_value=None, undefined_reason="zero variance")
    result = stats.pearsonr(x, y)
    r, p = float(result.statistic), float(result.pvalue)
    if math.isnan(r):
        return Correlation(r=None, p_value=None, undefined_reason="numerically degenerate input")
    return Correlation(r=r, p_value=p)
