"""Scenario files: the JSON document shared by the simulator, CLI, and service.

Schema (format tag "scenario/1"):

    {
      "format": "scenario/1",
      "name": "...",
      "epoch": "2017-08-30",            # ISO date; times are minutes after 00:00
      "config": {
        "speed_mph": 20.0, "prep_minutes": 30, "rest_minutes": 0,
        "dis_radius_miles": 2.0, "high_priority_threshold": 7.0,
        "ema_alpha": 0.5, "initial_burst_estimate": 54,
        "weights": {"base_priority": 1.0, "max_priority": 10.0,
                     "labels": {...}, "env": {...}}
      },
      "units": [{"id", "capabilities", "capacity", "speed_mph",
                  "prep_minutes", "rest_minutes", "available_at"}],
      "tasks": [{"id", "arrival": "HH:MM"|minutes, "burst", "priority"?,
                  "labels"?, "env"?, "location": {"lat","lon"}?,
                  "distance_from_base"?, "required_capabilities"?,
                  "demand"?, "text"?}],
      "distance_matrix": {"base": {"t1": 5.1, ...}, ...},   # optional
      "env_updates": [{"time", "task_id", "env"}],           # optional
      "completion_overrides": {"t1": 60}                     # optional
    }

Locations: with a distance_matrix, every task is addressed by its own id (and
units by "base"); a task carrying only "distance_from_base" contributes one
matrix entry, leaving pairwise distances unknown (so it can never be chained).
Without a matrix, tasks carry coordinates and distances are great-circle miles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .core import (
    DistanceModel,
    GeoPoint,
    LabelVector,
    RescueTask,
    RescueUnit,
    ScenarioError,
    WeightConfig,
    parse_time,
)
from .priority import score
from .sched import EnvUpdate, SchedulerConfig

FORMAT_TAG = "scenario/1"


@dataclass(frozen=True)
class ScenarioConfig:
    speed_mph: float = 20.0
    prep_minutes: int = 30
    rest_minutes: int = 0
    dis_radius_miles: float = 2.0
    high_priority_threshold: float = 7.0
    ema_alpha: float = 0.5
    initial_burst_estimate: float = 54.0
    unit_capacity: int = 3

    def scheduler_config(self) -> SchedulerConfig:
        return SchedulerConfig(
            dis_radius_miles=self.dis_radius_miles,
            high_priority_threshold=self.high_priority_threshold,
        )


@dataclass(frozen=True)
class Scenario:
    name: str
    epoch: str
    config: ScenarioConfig
    weights: WeightConfig
    units: tuple
    tasks: tuple
    distance: DistanceModel
    env_updates: tuple = ()
    completion_overrides: Mapping[str, int] = field(default_factory=dict)

    def units_for(self, count: Optional[int]) -> tuple:
        """The scenario's units, truncated or padded (cloning the last one) to count."""
        if count is None or count == len(self.units):
            return self.units
        if count < 1:
            raise ScenarioError(f"unit count must be >= 1, got {count}")
        if not self.units:
            raise ScenarioError("scenario has no units to scale from")
        if count <= len(self.units):
            return self.units[:count]
        template = self.units[-1]
        extra = []
        for i in range(len(self.units) + 1, count + 1):
            extra.append(RescueUnit(
                id=f"unit-{i}",
                capabilities=template.capabilities,
                capacity=template.capacity,
                speed_mph=template.speed_mph,
                prep_minutes=template.prep_minutes,
                rest_minutes=template.rest_minutes,
                base=template.base,
                available_at=template.available_at,
            ))
        return self.units + tuple(extra)


def _require(mapping: Mapping, key: str, where: str, problems: list):
    if key not in mapping:
        problems.append(f"{where}: missing required field {key!r}")
        return None
    return mapping[key]


def _load_task(raw: Mapping, weights: WeightConfig, matrix_mode: bool,
               problems: list) -> Optional[RescueTask]:
    task_id = _require(raw, "id", "task", problems)
    arrival_raw = _require(raw, "arrival", f"task {task_id}", problems)
    if task_id is None or arrival_raw is None:
        return None
    where = f"task {task_id}"
    try:
        arrival = parse_time(arrival_raw)
    except ScenarioError as exc:
        problems.append(f"{where}: {exc}")
        return None

    labels = LabelVector()
    if raw.get("labels"):
        try:
            labels = LabelVector.from_mapping(raw["labels"])
        except (ScenarioError, ValueError) as exc:
            problems.append(f"{where}: {exc}")
    env = dict(raw.get("env") or {})

    location = None
    if raw.get("location") is not None:
        loc = raw["location"]
        try:
            location = GeoPoint(float(loc["lat"]), float(loc["lon"]))
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{where}: bad location ({exc})")
    elif matrix_mode:
        location = task_id

    burst = raw.get("burst")
    if burst is not None and (not isinstance(burst, (int, float)) or burst <= 0):
        problems.append(f"{where}: burst must be positive minutes")
        burst = None

    pinned = "priority" in raw and not raw.get("priority_computed", False)
    if pinned:
        prio = float(raw["priority"])
    else:
        try:
            prio = score(labels, env, weights)
        except Exception as exc:
            problems.append(f"{where}: cannot score priority ({exc})")
            prio = weights.base_priority
    if not weights.base_priority <= prio <= weights.max_priority:
        problems.append(f"{where}: priority {prio} outside "
                        f"[{weights.base_priority}, {weights.max_priority}]")

    try:
        return RescueTask(
            id=str(task_id),
            arrival=arrival,
            burst_estimate=int(burst) if burst is not None else None,
            labels=labels,
            env=env,
            location=location,
            priority=prio,
            priority_pinned=pinned,
            required_capabilities=frozenset(raw.get("required_capabilities") or ()),
            demand=int(raw.get("demand", 1)),
            text=raw.get("text"),
        )
    except ValueError as exc:
        problems.append(f"{where}: {exc}")
        return None


def load_weights(raw: Mapping) -> WeightConfig:
    return WeightConfig(
        label_weights=dict(raw.get("labels") or {}),
        env_weights=dict(raw.get("env") or {}),
        base_priority=float(raw.get("base_priority", 1.0)),
        max_priority=float(raw.get("max_priority", 10.0)),
    )


def task_from_dict(raw: Mapping, weights: WeightConfig, matrix_mode: bool) -> RescueTask:
    """Parse one task document, raising ScenarioError on any problem."""
    problems: list = []
    task = _load_task(raw, weights, matrix_mode, problems)
    if problems or task is None:
        raise ScenarioError(problems or [f"task {raw.get('id')!r} unparseable"])
    return task


def task_to_dict(task: RescueTask) -> dict:
    doc = {
        "id": task.id,
        "arrival": task.arrival,
        "priority": task.priority,
        "labels": task.labels.as_dict(),
        "env": dict(task.env),
        "demand": task.demand,
    }
    if task.burst_estimate is not None:
        doc["burst"] = task.burst_estimate
    if isinstance(task.location, GeoPoint):
        doc["location"] = {"lat": task.location.latitude,
                           "lon": task.location.longitude}
    if task.required_capabilities:
        doc["required_capabilities"] = sorted(task.required_capabilities)
    if task.text is not None:
        doc["text"] = task.text
    if not task.priority_pinned:
        doc["priority_computed"] = True
    return doc


def load_scenario(source) -> Scenario:
    """Parse and validate a scenario from a path, JSON string, or dict.

    Raises ScenarioError listing every offending field found.
    """
    if isinstance(source, (str, Path)) and Path(source).exists():
        data = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        data = json.loads(source)
    elif isinstance(source, Mapping):
        data = source
    else:
        raise ScenarioError(f"cannot load scenario from {source!r}")

    problems: list = []
    if data.get("format") != FORMAT_TAG:
        problems.append(f"format must be {FORMAT_TAG!r}, got {data.get('format')!r}")

    cfg_raw = data.get("config") or {}
    weights = load_weights(cfg_raw.get("weights") or
                           {"labels": {}, "env": {}})
    config = ScenarioConfig(
        speed_mph=float(cfg_raw.get("speed_mph", 20.0)),
        prep_minutes=int(cfg_raw.get("prep_minutes", 30)),
        rest_minutes=int(cfg_raw.get("rest_minutes", 0)),
        dis_radius_miles=float(cfg_raw.get("dis_radius_miles", 2.0)),
        high_priority_threshold=float(cfg_raw.get("high_priority_threshold", 7.0)),
        ema_alpha=float(cfg_raw.get("ema_alpha", 0.5)),
        initial_burst_estimate=float(cfg_raw.get("initial_burst_estimate", 54.0)),
        unit_capacity=int(cfg_raw.get("unit_capacity", 3)),
    )

    matrix = data.get("distance_matrix")
    matrix_mode = matrix is not None
    if matrix_mode:
        matrix = {a: dict(row) for a, row in matrix.items()}

    tasks = []
    seen_ids = set()
    for raw in data.get("tasks") or []:
        task = _load_task(raw, weights, matrix_mode, problems)
        if task is None:
            continue
        if task.id in seen_ids:
            problems.append(f"task {task.id}: duplicate id")
            continue
        seen_ids.add(task.id)
        if matrix_mode and raw.get("distance_from_base") is not None:
            matrix.setdefault("base", {})[task.id] = float(raw["distance_from_base"])
        tasks.append(task)

    units = []
    for raw in data.get("units") or []:
        try:
            units.append(RescueUnit(
                id=str(raw["id"]),
                capabilities=frozenset(raw.get("capabilities") or ()),
                capacity=int(raw.get("capacity", config.unit_capacity)),
                speed_mph=float(raw.get("speed_mph", config.speed_mph)),
                prep_minutes=int(raw.get("prep_minutes", config.prep_minutes)),
                rest_minutes=int(raw.get("rest_minutes", config.rest_minutes)),
                base="base" if matrix_mode else _unit_base(raw, problems),
                available_at=parse_time(raw.get("available_at", 0)),
            ))
        except (KeyError, ValueError, ScenarioError) as exc:
            problems.append(f"unit {raw.get('id')}: {exc}")
    unit_ids = [u.id for u in units]
    if len(set(unit_ids)) != len(unit_ids):
        problems.append("duplicate unit ids")

    try:
        distance = DistanceModel.from_matrix(matrix) if matrix_mode \
            else DistanceModel.coordinates()
    except ScenarioError as exc:
        problems.extend(exc.problems)
        distance = DistanceModel.coordinates()

    # Every task location must resolve against the model.
    for task in tasks:
        if task.location is None:
            problems.append(f"task {task.id}: no location or distance available")
        elif matrix_mode:
            if distance.miles_or_none("base", task.location) is None:
                problems.append(f"task {task.id}: no distance from base in matrix")

    env_updates = []
    for raw in data.get("env_updates") or []:
        try:
            env_updates.append(EnvUpdate(
                time=parse_time(raw["time"]),
                task_id=str(raw["task_id"]),
                env=dict(raw["env"]),
            ))
        except (KeyError, ScenarioError) as exc:
            problems.append(f"env_update: {exc}")

    overrides = {str(k): int(v) for k, v in
                 (data.get("completion_overrides") or {}).items()}

    if problems:
        raise ScenarioError(problems)
    return Scenario(
        name=str(data.get("name", "scenario")),
        epoch=str(data.get("epoch", "1970-01-01")),
        config=config,
        weights=weights,
        units=tuple(units),
        tasks=tuple(tasks),
        distance=distance,
        env_updates=tuple(env_updates),
        completion_overrides=overrides,
    )


def _unit_base(raw: Mapping, problems: list):
    base = raw.get("base")
    if base is None:
        problems.append(f"unit {raw.get('id')}: coordinates scenario needs a base location")
        return GeoPoint(0.0, 0.0)
    try:
        return GeoPoint(float(base["lat"]), float(base["lon"]))
    except (KeyError, TypeError, ValueError):
        problems.append(f"unit {raw.get('id')}: bad base location")
        return GeoPoint(0.0, 0.0)


def dump_scenario(data: Mapping) -> str:
    """Canonical scenario JSON: stable key order, two-space indent."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"
