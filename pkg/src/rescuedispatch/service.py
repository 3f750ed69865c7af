"""Long-running dispatch service: HTTP ingestion, scheduling, and mission
lifecycle over an append-only JSONL event log.

State is a pure fold over the log: every mutation appends exactly one event
and is re-applied verbatim on restart, so kill-and-replay reproduces the
pre-crash state bit for bit. Reads never append. The clock is injectable so
integration tests can replay historical scenarios in virtual time.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import priority as priority_mod
from .bursttime import BurstPredictor
from .core import (
    ConfigError,
    DispatchError,
    DistanceModel,
    RescueUnit,
    ScenarioError,
    WeightConfig,
)
from .scenario import Scenario, load_weights, task_from_dict, task_to_dict
from .sched import (
    Mission,
    SchedulerConfig,
    build_mission,
    queue_sort_key,
    schedule_hybrid,
)
from .sim import metrics_from_entries
from .textpipe import LinearModel

EVENT_KINDS = (
    "TaskIngested", "EnvUpdated", "WeightsChanged", "UnitRegistered",
    "MissionDispatched", "MissionCompleted", "PriorityOverridden",
)


class SimClock:
    """Virtual minute clock; tests advance it explicitly."""

    def __init__(self, start: int = 0):
        self._now = start

    def now(self) -> int:
        return self._now

    def advance(self, minutes: int) -> int:
        if minutes < 0:
            raise ValueError("cannot advance the clock backwards")
        self._now += minutes
        return self._now


class RealClock:
    """Minutes elapsed since service start."""

    def __init__(self):
        self._anchor = time.time()

    def now(self) -> int:
        return int((time.time() - self._anchor) / 60.0)


@dataclass
class ActiveMission:
    mission: Mission
    chain: tuple  # RescueTask snapshots in visit order


@dataclass
class DispatchState:
    """Material state of the dispatcher; mutated only through apply_event."""

    weights: WeightConfig
    scheduler_cfg: SchedulerConfig
    distance: DistanceModel
    predictor: BurstPredictor
    seq: int = 0
    queue: dict = field(default_factory=dict)      # task_id -> RescueTask
    units: dict = field(default_factory=dict)      # unit_id -> RescueUnit
    unit_available: dict = field(default_factory=dict)
    active: dict = field(default_factory=dict)     # mission_id -> ActiveMission
    completed: list = field(default_factory=list)  # ScheduleEntry, completion order

    def sorted_queue(self) -> list:
        return sorted(self.queue.values(),
                      key=lambda t: queue_sort_key(t, self.predictor.estimate))

    def units_snapshot(self) -> list:
        out = []
        for uid in sorted(self.units):
            unit = self.units[uid]
            avail = max(self.unit_available.get(uid, unit.available_at),
                        unit.available_at)
            out.append(RescueUnit(
                id=unit.id, capabilities=unit.capabilities, capacity=unit.capacity,
                speed_mph=unit.speed_mph, prep_minutes=unit.prep_minutes,
                rest_minutes=unit.rest_minutes, base=unit.base, available_at=avail))
        return out

    def snapshot_dict(self, now: int) -> dict:
        """Canonical JSON view of the whole state; used by tests and GET /state."""
        return {
            "seq": self.seq,
            "now": now,
            "weights": {
                "labels": dict(sorted(self.weights.label_weights.items())),
                "env": dict(sorted(self.weights.env_weights.items())),
                "base_priority": self.weights.base_priority,
                "max_priority": self.weights.max_priority,
            },
            "high_priority_threshold": self.scheduler_cfg.high_priority_threshold,
            "dis_radius_miles": self.scheduler_cfg.dis_radius_miles,
            "predictor": {
                "alpha": self.predictor.alpha,
                "estimate": self.predictor.estimate,
                "observations": len(self.predictor.history),
            },
            "queue": [task_to_dict(t) for t in self.sorted_queue()],
            "units": [{
                "id": u.id,
                "capabilities": sorted(u.capabilities),
                "capacity": u.capacity,
                "available_at": u.available_at,
            } for u in self.units_snapshot()],
            "active_missions": [{
                "mission_id": mid,
                "unit_id": am.mission.unit_id,
                "task_ids": list(am.mission.task_ids),
                "depart": am.mission.depart_base,
            } for mid, am in sorted(self.active.items())],
            "completed": [{
                "task_id": e.task_id, "unit": e.unit_id, "start": e.start_time,
                "waiting": e.waiting_time, "burst": e.burst_used,
                "turnaround": e.turnaround_time, "completion": e.completion_time,
            } for e in self.completed],
        }


class DispatchService:
    """Single-writer dispatcher around the event log."""

    def __init__(self, log_path, clock=None, scenario: Optional[Scenario] = None,
                 model: Optional[LinearModel] = None, ingest_tasks: bool = False):
        self.log_path = Path(log_path)
        self.clock = clock or RealClock()
        self.model = model
        self._lock = threading.Lock()
        self._schedule_cache = None

        if scenario is not None:
            weights = scenario.weights
            cfg = scenario.config.scheduler_config()
            distance = scenario.distance
            predictor = BurstPredictor(scenario.config.initial_burst_estimate,
                                       scenario.config.ema_alpha)
        else:
            weights = WeightConfig.default()
            cfg = SchedulerConfig()
            distance = DistanceModel.coordinates()
            predictor = BurstPredictor(54.0, 0.5)
        self.state = DispatchState(weights=weights, scheduler_cfg=cfg,
                                   distance=distance, predictor=predictor)

        existing = self._read_log()
        for event in existing:
            self._apply(event)
            self.state.seq = event["seq"]
        if not existing and scenario is not None:
            for unit in scenario.units:
                self._append("UnitRegistered", _unit_to_dict(unit))
            if ingest_tasks:
                for task in scenario.tasks:
                    self._append("TaskIngested", task_to_dict(task))

    # -- log plumbing -------------------------------------------------------

    def _read_log(self) -> list:
        if not self.log_path.exists():
            return []
        events = []
        for line in self.log_path.read_text().splitlines():
            if line.strip():
                events.append(json.loads(line))
        return events

    def _append(self, kind: str, payload: Mapping) -> dict:
        event = {
            "seq": self.state.seq + 1,
            "ts": time.time(),
            "kind": kind,
            "payload": payload,
        }
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
        self._apply(event)
        self.state.seq = event["seq"]
        self._schedule_cache = None
        return event

    # -- fold ---------------------------------------------------------------

    def _apply(self, event: Mapping) -> None:
        kind, payload = event["kind"], event["payload"]
        st = self.state
        if kind == "TaskIngested":
            task = task_from_dict(payload, st.weights, st.distance.matrix_mode)
            if st.distance.matrix_mode and payload.get("distance_from_base") is not None:
                st.distance = st.distance.with_entry(
                    "base", task.id, float(payload["distance_from_base"]))
            st.queue[task.id] = task
        elif kind == "EnvUpdated":
            task = st.queue[payload["task_id"]].with_env(payload["env"])
            if not task.priority_pinned:
                task = task.with_priority(
                    priority_mod.score(task.labels, task.env, st.weights))
            st.queue[task.id] = task
        elif kind == "WeightsChanged":
            st.weights = load_weights(payload)
            if "high_priority_threshold" in payload:
                st.scheduler_cfg = SchedulerConfig(
                    dis_radius_miles=st.scheduler_cfg.dis_radius_miles,
                    high_priority_threshold=float(payload["high_priority_threshold"]))
            st.queue = {t.id: t for t in
                        priority_mod.rebalance(st.queue.values(), st.weights)}
        elif kind == "UnitRegistered":
            unit = _unit_from_dict(payload, st.distance.matrix_mode)
            st.units[unit.id] = unit
            st.unit_available[unit.id] = unit.available_at
        elif kind == "MissionDispatched":
            chain = tuple(st.queue.pop(tid) for tid in payload["task_ids"])
            unit = st.units[payload["unit_id"]]
            bursts = {t.id: (t.burst_estimate if t.burst_estimate is not None
                             else max(1, round(st.predictor.estimate)))
                      for t in chain}
            mission = build_mission(payload["mission_id"], unit, chain,
                                    payload["depart"], st.distance, bursts)
            st.unit_available[unit.id] = mission.available_after
            st.active[mission.mission_id] = ActiveMission(mission, chain)
        elif kind == "MissionCompleted":
            am = st.active.pop(payload["mission_id"])
            unit = st.units[am.mission.unit_id]
            durations = {tid: int(v) for tid, v in payload["durations"].items()}
            bursts = {e.task_id: durations.get(e.task_id, e.burst_used)
                      for e in am.mission.entries}
            actual = build_mission(am.mission.mission_id, unit, am.chain,
                                   am.mission.depart_base, st.distance, bursts)
            st.unit_available[unit.id] = actual.available_after
            st.completed.extend(actual.entries)
            for entry in actual.entries:
                st.predictor.observe(entry.burst_used)
            st.queue = {t.id: t for t in
                        priority_mod.rebalance(st.queue.values(), st.weights)}
        elif kind == "PriorityOverridden":
            task = st.queue[payload["task_id"]]
            st.queue[task.id] = task.with_priority(float(payload["priority"]),
                                                   pinned=True)
        else:
            raise DispatchError(f"unknown event kind {kind!r}")

    # -- scheduling views ---------------------------------------------------

    def _compute_schedule(self, queue=None, units=None, weights=None, cfg=None,
                          predictor=None):
        st = self.state
        predictor = predictor if predictor is not None else st.predictor
        probe = BurstPredictor(max(predictor.estimate, 1e-9), predictor.alpha)
        return schedule_hybrid(
            list(queue if queue is not None else st.queue.values()),
            list(units if units is not None else st.units_snapshot()),
            cfg or st.scheduler_cfg,
            distance=st.distance,
            weights=weights or st.weights,
            predictor=probe,
            start_clock=self.clock.now(),
        )

    def schedule_snapshot(self) -> dict:
        if self._schedule_cache is None:
            result = self._compute_schedule()
            self._schedule_cache = _schedule_to_dict(result, self.clock.now())
        return self._schedule_cache

    def metrics_snapshot(self) -> dict:
        report = metrics_from_entries(self.state.completed)
        return {
            "format": "metrics/1",
            "completed": report.completed,
            "mean_wait_min": report.mean_waiting,
            "mean_turnaround_min": report.mean_turnaround,
            "max_avg_wt_min": report.max_avg_wt,
            "mean_avg_wt_min": report.mean_avg_wt,
            "awt_series": list(report.awt_series),
            "per_task": [{
                "task_id": m.task_id, "waiting": m.waiting,
                "turnaround": m.turnaround, "completion": m.completion,
            } for m in report.per_task],
        }


def _unit_to_dict(unit: RescueUnit) -> dict:
    doc = {
        "id": unit.id,
        "capabilities": sorted(unit.capabilities),
        "capacity": unit.capacity,
        "speed_mph": unit.speed_mph,
        "prep_minutes": unit.prep_minutes,
        "rest_minutes": unit.rest_minutes,
        "available_at": unit.available_at,
    }
    if not isinstance(unit.base, str):
        doc["base"] = {"lat": unit.base.latitude, "lon": unit.base.longitude}
    return doc


def _unit_from_dict(raw: Mapping, matrix_mode: bool) -> RescueUnit:
    from .core import GeoPoint
    base = raw.get("base")
    if base is None:
        base_loc = "base"
    else:
        base_loc = GeoPoint(float(base["lat"]), float(base["lon"]))
    try:
        return RescueUnit(
            id=str(raw["id"]),
            capabilities=frozenset(raw.get("capabilities") or ()),
            capacity=int(raw.get("capacity", 3)),
            speed_mph=float(raw.get("speed_mph", 20.0)),
            prep_minutes=int(raw.get("prep_minutes", 30)),
            rest_minutes=int(raw.get("rest_minutes", 0)),
            base=base_loc,
            available_at=int(raw.get("available_at", 0)),
        )
    except (KeyError, ValueError) as exc:
        raise ScenarioError(str(exc)) from None


def _schedule_to_dict(result, now: int) -> dict:
    return {
        "format": "schedule/1",
        "now": now,
        "rows": [{
            "task_id": e.task_id,
            "unit": e.unit_id,
            "start_minutes": e.start_time,
            "route_distance": e.route_distance,
            "route_duration": e.route_duration,
            "waiting": e.waiting_time,
            "burst": e.burst_used,
            "turnaround": e.turnaround_time,
        } for e in result.entries],
        "missions": [{
            "mission_id": m.mission_id,
            "unit_id": m.unit_id,
            "task_ids": list(m.task_ids),
            "depart": m.depart_base,
            "return_base": m.return_base,
            "available_after": m.available_after,
        } for m in result.missions],
        "unschedulable": list(result.unschedulable),
        "summary": {
            "mean_wait_min": result.summary.mean_waiting,
            "max_wait_min": result.summary.max_waiting,
            "mean_turnaround_min": result.summary.mean_turnaround,
        },
    }


# ---------------------------------------------------------------------------
# HTTP layer.

def create_app(log_path, clock=None, scenario: Optional[Scenario] = None,
               model: Optional[LinearModel] = None, ingest_tasks: bool = False,
               console_dir=None) -> FastAPI:
    service = DispatchService(log_path, clock=clock, scenario=scenario,
                              model=model, ingest_tasks=ingest_tasks)
    app = FastAPI(title="rescuedispatch", version="0.1.0")
    app.state.service = service

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": message})

    @app.post("/tasks", status_code=201)
    async def ingest_task(request: Request):
        body = await request.json()
        st = service.state
        with service._lock:
            task_id = str(body.get("id") or f"task-{st.seq + 1}")
            known = (task_id in st.queue
                     or any(task_id in am.mission.task_ids
                            for am in st.active.values())
                     or any(e.task_id == task_id for e in st.completed))
            if known:
                return error(409, f"task {task_id} already exists")
            payload = dict(body)
            payload["id"] = task_id
            if "arrival" not in payload:
                payload["arrival"] = service.clock.now()
            partial_heads: tuple = ()
            if "labels" not in payload and payload.get("text") is not None:
                if service.model is not None:
                    labels, _, partial_heads = service.model.classify(payload["text"])
                    payload["labels"] = labels.as_dict()
                else:
                    partial_heads = tuple(sorted(
                        name for name in st.weights.label_weights))
                    payload["labels"] = {}
            if payload.get("location") is None and st.distance.matrix_mode:
                known = st.distance.miles_or_none("base", task_id)
                if known is None and payload.get("distance_from_base") is None:
                    return error(422, "task needs a location: no coordinates, no "
                                      "matrix entry, and no distance_from_base")
            try:
                event = service._append("TaskIngested", payload)
            except (ScenarioError, ConfigError, ValueError) as exc:
                return error(422, str(exc))
            task = st.queue[task_id]
            position = [t.id for t in st.sorted_queue()].index(task_id)
        doc = task_to_dict(task)
        doc.update({"queue_position": position, "seq": event["seq"]})
        if partial_heads:
            doc["labels_partial"] = True
            doc["unavailable_heads"] = sorted(partial_heads)
        return doc

    @app.get("/tasks")
    def list_tasks():
        return {"format": "queue/1",
                "tasks": [task_to_dict(t) for t in service.state.sorted_queue()]}

    @app.get("/schedule")
    def get_schedule():
        with service._lock:
            return service.schedule_snapshot()

    @app.get("/metrics")
    def get_metrics():
        return service.metrics_snapshot()

    @app.get("/state")
    def get_state():
        return service.state.snapshot_dict(service.clock.now())

    @app.post("/units", status_code=201)
    async def register_unit(request: Request):
        body = await request.json()
        with service._lock:
            if not body.get("id"):
                return error(422, "unit id is required")
            if body["id"] in service.state.units:
                return error(409, f"unit {body['id']} already exists")
            try:
                _unit_from_dict(body, service.state.distance.matrix_mode)
            except (ScenarioError, ValueError) as exc:
                return error(422, str(exc))
            event = service._append("UnitRegistered", dict(body))
        return {"id": body["id"], "seq": event["seq"]}

    @app.put("/config/weights")
    async def put_weights(request: Request):
        body = await request.json()
        with service._lock:
            try:
                load_weights(body)
            except (ConfigError, ValueError, TypeError) as exc:
                return error(422, str(exc))
            event = service._append("WeightsChanged", dict(body))
            queue = [t.id for t in service.state.sorted_queue()]
        return {"seq": event["seq"], "queue_order": queue}

    @app.post("/tasks/{task_id}/env")
    async def update_env(task_id: str, request: Request):
        body = await request.json()
        env = body.get("env", body)
        with service._lock:
            if task_id not in service.state.queue:
                return error(404, f"task {task_id} is not queued")
            try:
                priority_mod.score(service.state.queue[task_id].labels, env,
                                   service.state.weights)
            except (ConfigError, ValueError) as exc:
                return error(422, str(exc))
            event = service._append("EnvUpdated",
                                    {"task_id": task_id, "env": dict(env)})
            task = service.state.queue[task_id]
        return {"seq": event["seq"], "task_id": task_id, "priority": task.priority}

    @app.post("/tasks/{task_id}/priority-override")
    async def override_priority(task_id: str, request: Request):
        body = await request.json()
        with service._lock:
            st = service.state
            if task_id not in st.queue:
                return error(404, f"task {task_id} is not queued")
            value = body.get("priority")
            if not isinstance(value, (int, float)) or not \
                    st.weights.base_priority <= value <= st.weights.max_priority:
                return error(422, f"priority must be within "
                                  f"[{st.weights.base_priority}, "
                                  f"{st.weights.max_priority}]")
            event = service._append("PriorityOverridden",
                                    {"task_id": task_id, "priority": float(value)})
            position = [t.id for t in st.sorted_queue()].index(task_id)
        return {"seq": event["seq"], "task_id": task_id,
                "priority": float(value), "queue_position": position}

    @app.post("/missions/dispatch", status_code=201)
    async def dispatch_mission(request: Request):
        body = await request.json() if await request.body() else {}
        with service._lock:
            st = service.state
            result = service._compute_schedule()
            missions = list(result.missions)
            if body.get("unit_id"):
                missions = [m for m in missions if m.unit_id == body["unit_id"]]
            index = int(body.get("mission_index", 0))
            if not missions or index >= len(missions):
                return error(404, "no planned mission to dispatch")
            planned = missions[index]
            payload = {
                "mission_id": f"m{st.seq + 1}",
                "unit_id": planned.unit_id,
                "task_ids": list(planned.task_ids),
                "depart": planned.depart_base,
            }
            event = service._append("MissionDispatched", payload)
        return {"seq": event["seq"], **payload}

    @app.post("/missions/{mission_id}/complete")
    async def complete_mission(mission_id: str, request: Request):
        body = await request.json()
        durations = body.get("durations") or {}
        with service._lock:
            st = service.state
            if mission_id not in st.active:
                return error(404, f"mission {mission_id} is not active")
            chain_ids = set(st.active[mission_id].mission.task_ids)
            for tid, value in durations.items():
                if tid not in chain_ids:
                    return error(422, f"task {tid} is not part of {mission_id}")
                if not isinstance(value, (int, float)) or value <= 0:
                    return error(422, f"duration for {tid} must be positive")
            event = service._append("MissionCompleted", {
                "mission_id": mission_id,
                "durations": {k: int(v) for k, v in durations.items()},
            })
            estimate = st.predictor.estimate
            queue = [{"task_id": t.id, "priority": t.priority}
                     for t in st.sorted_queue()]
        return {"seq": event["seq"], "burst_estimate": estimate, "queue": queue}

    @app.post("/whatif")
    async def what_if(request: Request):
        body = await request.json() if await request.body() else {}
        with service._lock:
            st = service.state
            before = service._compute_schedule()
            weights, cfg = st.weights, st.scheduler_cfg
            try:
                if body.get("weights_scale") is not None:
                    factor = float(body["weights_scale"])
                    weights = weights.scaled(factor)
                    cfg = SchedulerConfig(
                        dis_radius_miles=cfg.dis_radius_miles,
                        high_priority_threshold=cfg.high_priority_threshold * factor)
                if body.get("weights") is not None:
                    weights = load_weights(body["weights"])
                queue = priority_mod.rebalance(st.queue.values(), weights)
                for tid, value in (body.get("priority_overrides") or {}).items():
                    queue = [t.with_priority(float(value), pinned=True)
                             if t.id == tid else t for t in queue]
                units = st.units_snapshot()
                for raw in body.get("extra_units") or []:
                    units.append(_unit_from_dict(raw, st.distance.matrix_mode))
                after = service._compute_schedule(queue=queue, units=units,
                                                  weights=weights, cfg=cfg)
            except (ScenarioError, ConfigError, ValueError) as exc:
                return error(422, str(exc))
            now = service.clock.now()
        return {
            "format": "whatif/1",
            "before": _schedule_to_dict(before, now),
            "after": _schedule_to_dict(after, now),
            "delta": {
                "mean_wait_min": after.summary.mean_waiting
                                 - before.summary.mean_waiting,
                "mean_turnaround_min": after.summary.mean_turnaround
                                       - before.summary.mean_turnaround,
                "order_changed": [e.task_id for e in after.entries]
                                 != [e.task_id for e in before.entries],
            },
        }

    if console_dir and Path(console_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/console", StaticFiles(directory=str(console_dir), html=True),
                  name="console")
    return app
