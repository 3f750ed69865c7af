"""Replay and benchmark harness: run scenarios through a policy, compute the
waiting-time metrics, and generate seeded synthetic workloads for comparing
policies at different fleet sizes.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .bursttime import BurstPredictor
from .core import (
    GeoPoint,
    MILES_PER_DEGREE_LAT,
    ScenarioError,
    format_hhmm,
)
from .scenario import FORMAT_TAG, Scenario, load_scenario
from .sched import POLICIES, ScheduleResult, schedule

REPLAY_FORMAT = "replay/1"
BENCH_FORMAT = "bench/1"
WORKLOAD_FORMAT = "workload/1"


# ---------------------------------------------------------------------------
# Metrics.

@dataclass(frozen=True)
class TaskMetric:
    task_id: str
    waiting: int
    turnaround: int
    completion: int


@dataclass(frozen=True)
class MetricsReport:
    """Waiting/turnaround metrics plus the running-average waiting series.

    awt_series[k-1] is the mean waiting time over the first k completed tasks
    (completion order); its max and mean summarize a whole run.
    """

    per_task: tuple
    awt_series: tuple
    max_avg_wt: float
    mean_avg_wt: float
    mean_waiting: float
    mean_turnaround: float

    @property
    def completed(self) -> int:
        return len(self.per_task)


def metrics_from_entries(entries: Sequence) -> MetricsReport:
    """Independent second pass over emitted schedule entries."""
    ordered = sorted(entries, key=lambda e: (e.completion_time, e.task_id))
    per_task, series = [], []
    total = 0
    for k, entry in enumerate(ordered, start=1):
        total += entry.waiting_time
        series.append(total / k)
        per_task.append(TaskMetric(entry.task_id, entry.waiting_time,
                                   entry.turnaround_time, entry.completion_time))
    if not per_task:
        return MetricsReport((), (), 0.0, 0.0, 0.0, 0.0)
    return MetricsReport(
        per_task=tuple(per_task),
        awt_series=tuple(series),
        max_avg_wt=max(series),
        mean_avg_wt=sum(series) / len(series),
        mean_waiting=series[-1],
        mean_turnaround=sum(t.turnaround for t in per_task) / len(per_task),
    )


# ---------------------------------------------------------------------------
# Replay.

@dataclass(frozen=True)
class ReplayResult:
    scenario_name: str
    policy: str
    unit_count: int
    schedule: ScheduleResult
    metrics: MetricsReport

    def to_dict(self) -> dict:
        rows = [{
            "task_id": e.task_id,
            "unit": e.unit_id,
            "start_time": format_hhmm(e.start_time),
            "start_minutes": e.start_time,
            "route_distance": e.route_distance,
            "route_duration": e.route_duration,
            "waiting": e.waiting_time,
            "burst": e.burst_used,
            "turnaround": e.turnaround_time,
            "completion_minutes": e.completion_time,
        } for e in self.schedule.entries]
        return {
            "format": REPLAY_FORMAT,
            "scenario": self.scenario_name,
            "policy": self.policy,
            "units": self.unit_count,
            "rows": rows,
            "unschedulable": list(self.schedule.unschedulable),
            "summary": {
                "tasks": self.metrics.completed,
                "mean_wait_min": round(self.metrics.mean_waiting, 4),
                "max_wait_min": self.schedule.summary.max_waiting,
                "mean_turnaround_min": round(self.metrics.mean_turnaround, 4),
                "max_avg_wt_min": round(self.metrics.max_avg_wt, 4),
                "mean_avg_wt_min": round(self.metrics.mean_avg_wt, 4),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def replay(scenario: Scenario, policy: str, unit_count: Optional[int] = None) -> ReplayResult:
    """Deterministic event replay of a scenario under one policy."""
    units = scenario.units_for(unit_count)
    predictor = BurstPredictor(scenario.config.initial_burst_estimate,
                               scenario.config.ema_alpha)
    result = schedule(
        policy, scenario.tasks, units, scenario.config.scheduler_config(),
        distance=scenario.distance,
        weights=scenario.weights,
        predictor=predictor,
        env_updates=scenario.env_updates,
        completion_overrides=scenario.completion_overrides,
    )
    return ReplayResult(scenario.name, policy, len(units), result,
                        metrics_from_entries(result.entries))


# ---------------------------------------------------------------------------
# Seeded workload generation.

# Requests per hour over a day, tiled across the horizon: quiet nights,
# build-up through the afternoon and evening.
DEFAULT_HOURLY_SHAPE = (
    0.3, 0.2, 0.2, 0.2, 0.3, 0.5, 0.8, 1.2, 1.5, 1.6, 1.5, 1.4,
    1.3, 1.3, 1.4, 1.6, 1.8, 1.9, 1.7, 1.3, 1.0, 0.8, 0.6, 0.4,
)

DEFAULT_PRIORITY_WEIGHTS = {
    1: 18, 2: 16, 3: 14, 4: 12, 5: 12, 6: 9, 7: 8, 8: 6, 9: 3, 10: 2,
}


@dataclass(frozen=True)
class WorkloadSpec:
    seed: int = 0
    count: int = 550
    horizon_hours: int = 72
    hourly_shape: Sequence[float] = DEFAULT_HOURLY_SHAPE
    burst_mean: float = 54.0
    burst_sd: float = 15.0
    priority_weights: Mapping[int, float] = field(
        default_factory=lambda: dict(DEFAULT_PRIORITY_WEIGHTS))
    base: GeoPoint = GeoPoint(29.885, -93.94)
    spread_miles: float = 8.0
    cluster_count: int = 8
    cluster_radius_miles: float = 0.7
    clustered: bool = True
    unit_count: int = 10
    unit_capacity: int = 3
    speed_mph: float = 20.0
    prep_minutes: int = 30

    def __post_init__(self):
        if self.count < 1:
            raise ScenarioError("workload count must be >= 1")
        if self.burst_mean <= 0 or self.burst_sd < 0:
            raise ScenarioError("burst distribution parameters invalid")
        if not self.hourly_shape or any(r < 0 for r in self.hourly_shape):
            raise ScenarioError("hourly shape must be non-negative rates")
        if self.cluster_count < 1 or self.cluster_radius_miles <= 0:
            raise ScenarioError("cluster parameters invalid")
        if any(w < 0 for w in self.priority_weights.values()) \
                or not any(self.priority_weights.values()):
            raise ScenarioError("priority weights invalid")


def workload_from_dict(data: Mapping) -> WorkloadSpec:
    if data.get("format") not in (None, WORKLOAD_FORMAT):
        raise ScenarioError(f"workload format must be {WORKLOAD_FORMAT!r}")
    kwargs = {}
    for key in ("seed", "count", "horizon_hours", "burst_mean", "burst_sd",
                "spread_miles", "cluster_count", "cluster_radius_miles",
                "clustered", "unit_count", "unit_capacity", "speed_mph",
                "prep_minutes"):
        if key in data:
            kwargs[key] = data[key]
    if "hourly_shape" in data:
        kwargs["hourly_shape"] = tuple(data["hourly_shape"])
    if "priority_weights" in data:
        kwargs["priority_weights"] = {int(k): float(v)
                                      for k, v in data["priority_weights"].items()}
    if "base" in data:
        kwargs["base"] = GeoPoint(float(data["base"]["lat"]),
                                  float(data["base"]["lon"]))
    return WorkloadSpec(**kwargs)


def _offset_point(base: GeoPoint, rng: random.Random, radius_miles: float) -> GeoPoint:
    r = radius_miles * math.sqrt(rng.random())
    theta = rng.random() * 2.0 * math.pi
    dlat = (r * math.sin(theta)) / MILES_PER_DEGREE_LAT
    dlon = (r * math.cos(theta)) / (MILES_PER_DEGREE_LAT *
                                    math.cos(math.radians(base.latitude)))
    return GeoPoint(base.latitude + dlat, base.longitude + dlon)


def generate(spec: WorkloadSpec, seed: Optional[int] = None) -> dict:
    """Build a scenario document from the workload spec; same seed, same bytes."""
    rng = random.Random(spec.seed if seed is None else seed)

    # Arrival minutes drawn from the piecewise-constant hourly density.
    shape = [spec.hourly_shape[h % len(spec.hourly_shape)]
             for h in range(spec.horizon_hours)]
    total = sum(shape)
    arrivals = []
    for _ in range(spec.count):
        x = rng.random() * total
        for hour, rate in enumerate(shape):
            if x < rate or hour == len(shape) - 1:
                frac = x / rate if rate > 0 else rng.random()
                arrivals.append(int((hour + min(frac, 0.999999)) * 60))
                break
            x -= rate
    arrivals.sort()

    centers = [_offset_point(spec.base, rng, spec.spread_miles)
               for _ in range(spec.cluster_count)]
    prio_names = sorted(spec.priority_weights)
    prio_weights = [spec.priority_weights[p] for p in prio_names]

    tasks = []
    for i, arrival in enumerate(arrivals, start=1):
        burst = 0.0
        while burst <= 0:
            burst = rng.gauss(spec.burst_mean, spec.burst_sd)
        if spec.clustered:
            center = centers[rng.randrange(len(centers))]
            point = _offset_point(center, rng, spec.cluster_radius_miles)
        else:
            point = _offset_point(spec.base, rng, spec.spread_miles)
        tasks.append({
            "id": f"t{i}",
            "arrival": arrival,
            "burst": max(1, round(burst)),
            "priority": float(rng.choices(prio_names, weights=prio_weights)[0]),
            "location": {"lat": round(point.latitude, 6),
                         "lon": round(point.longitude, 6)},
        })

    units = [{
        "id": f"unit-{i}",
        "capacity": spec.unit_capacity,
        "speed_mph": spec.speed_mph,
        "prep_minutes": spec.prep_minutes,
        "base": {"lat": spec.base.latitude, "lon": spec.base.longitude},
        "available_at": 0,
    } for i in range(1, spec.unit_count + 1)]

    return {
        "format": FORMAT_TAG,
        "name": f"workload-seed{spec.seed if seed is None else seed}",
        "epoch": "1970-01-01",
        "config": {
            "speed_mph": spec.speed_mph,
            "prep_minutes": spec.prep_minutes,
            "rest_minutes": 0,
            "dis_radius_miles": 2.0,
            "high_priority_threshold": 7.0,
            "ema_alpha": 0.5,
            "initial_burst_estimate": spec.burst_mean,
            "unit_capacity": spec.unit_capacity,
            "weights": {"base_priority": 1.0, "max_priority": 10.0,
                        "labels": {}, "env": {}},
        },
        "units": units,
        "tasks": tasks,
    }


def generate_scenario(spec: WorkloadSpec, seed: Optional[int] = None) -> Scenario:
    return load_scenario(generate(spec, seed))


# ---------------------------------------------------------------------------
# Benchmarks.

@dataclass(frozen=True)
class BenchCell:
    policy: str
    units: int
    mean_avg_wt_hours: float       # averaged across seeds
    max_avg_wt_hours: float        # averaged across seeds
    per_seed: tuple                # (seed, mean_avg_wt_hours, max_avg_wt_hours)


@dataclass(frozen=True)
class BenchResult:
    cells: tuple
    seeds: tuple
    series: Mapping  # (policy, units, seed) -> AWT series in minutes

    def to_dict(self) -> dict:
        return {
            "format": BENCH_FORMAT,
            "seeds": list(self.seeds),
            "cells": [{
                "policy": c.policy,
                "units": c.units,
                "mean_avg_wt_hours": round(c.mean_avg_wt_hours, 4),
                "max_avg_wt_hours": round(c.max_avg_wt_hours, 4),
                "per_seed": [{"seed": s, "mean_avg_wt_hours": round(m, 4),
                              "max_avg_wt_hours": round(x, 4)}
                             for s, m, x in c.per_seed],
            } for c in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def series_csv(self) -> str:
        lines = ["policy,units,seed,k,awt_minutes"]
        for (policy, units, seed), series in sorted(self.series.items()):
            for k, value in enumerate(series, start=1):
                lines.append(f"{policy},{units},{seed},{k},{value:.4f}")
        return "\n".join(lines) + "\n"


def bench(spec: WorkloadSpec, policies: Sequence[str], unit_counts: Sequence[int],
          seeds: Optional[Sequence[int]] = None) -> BenchResult:
    """Compare policies across fleet sizes on seeded synthetic workloads."""
    if not policies or not unit_counts:
        raise ScenarioError("bench needs at least one policy and one unit count")
    for policy in policies:
        if policy not in POLICIES:
            raise ScenarioError(f"unknown policy {policy!r}")
    seeds = tuple(seeds) if seeds else (spec.seed,)

    scenarios = {seed: generate_scenario(spec, seed) for seed in seeds}
    cells, series = [], {}
    for policy in policies:
        for units in unit_counts:
            per_seed = []
            for seed in seeds:
                scenario = scenarios[seed]
                run = replay(scenario, policy, unit_count=units)
                mean_h = run.metrics.mean_avg_wt / 60.0
                max_h = run.metrics.max_avg_wt / 60.0
                per_seed.append((seed, mean_h, max_h))
                series[(policy, units, seed)] = run.metrics.awt_series
            cells.append(BenchCell(
                policy=policy,
                units=units,
                mean_avg_wt_hours=sum(m for _, m, _ in per_seed) / len(per_seed),
                max_avg_wt_hours=sum(x for _, _, x in per_seed) / len(per_seed),
                per_seed=tuple(per_seed),
            ))
    return BenchResult(tuple(cells), seeds, series)


def load_bench_spec(path) -> tuple:
    """Read a bench spec file: workload parameters plus seeds/policies/units."""
    if isinstance(path, Mapping):
        data = dict(path)
    else:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    spec = workload_from_dict(data.get("workload") or {})
    seeds = tuple(data.get("seeds") or (spec.seed,))
    policies = tuple(data.get("policies") or POLICIES)
    unit_counts = tuple(data.get("unit_counts") or (10, 20))
    return spec, seeds, policies, unit_counts
