"""The three dispatch policies: FCFS, priority, and multi-task hybrid.

All three share the same timeline model per unit: depart base -> travel ->
on-site burst (-> further chained legs) -> travel back -> preparation (and
optional rest) -> available again. Schedulers are pure functions from a
scenario snapshot to a ScheduleResult; re-running with identical inputs yields
byte-identical output.

Event handling in the priority/hybrid loop: before any dispatch decision is
committed, every task arrival, environment update, and mission-completion
event with a timestamp at or before the departure time is applied, so new
arrivals and rebalanced priorities always re-sort the queue first.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from . import priority as priority_mod
from .core import (
    ConfigError,
    DistanceModel,
    Mission,
    RescueTask,
    RescueUnit,
    ScheduleEntry,
    WeightConfig,
    travel_minutes,
)
from .bursttime import BurstPredictor

POLICIES = ("fcfs", "priority", "hybrid")


@dataclass(frozen=True)
class SchedulerConfig:
    """Knobs of the hybrid policy; harmless for the simpler policies."""

    dis_radius_miles: float = 2.0
    high_priority_threshold: float = 7.0

    def __post_init__(self):
        if self.dis_radius_miles <= 0:
            raise ConfigError("dis_radius_miles must be positive")


@dataclass(frozen=True)
class EnvUpdate:
    time: int
    task_id: str
    env: Mapping[str, float]


@dataclass(frozen=True)
class Summary:
    completed: int
    mean_waiting: float
    max_waiting: int
    mean_turnaround: float


@dataclass(frozen=True)
class ScheduleResult:
    policy: str
    entries: tuple          # grouped by mission, missions in dispatch order
    missions: tuple
    unschedulable: tuple    # task ids no unit is capable of
    summary: Summary


def summarize(entries: Sequence[ScheduleEntry]) -> Summary:
    if not entries:
        return Summary(completed=0, mean_waiting=0.0, max_waiting=0, mean_turnaround=0.0)
    waits = [e.waiting_time for e in entries]
    turns = [e.turnaround_time for e in entries]
    return Summary(
        completed=len(entries),
        mean_waiting=sum(waits) / len(waits),
        max_waiting=max(waits),
        mean_turnaround=sum(turns) / len(turns),
    )


def queue_sort_key(task: RescueTask, burst_fallback: float = 54.0):
    """Priority descending; ties by burst ascending, then arrival, then id."""
    burst = task.burst_estimate if task.burst_estimate is not None else burst_fallback
    return (-task.priority, burst, task.arrival, task.id)


def fcfs_sort_key(task: RescueTask):
    return (task.arrival, task.id)


def _effective_burst(task: RescueTask, predictor: Optional[BurstPredictor],
                     overrides: Optional[Mapping[str, int]]) -> int:
    """Actual on-site minutes: scenario override, else stated burst, else prediction."""
    if overrides and task.id in overrides:
        return max(1, int(overrides[task.id]))
    if task.burst_estimate is not None:
        return task.burst_estimate
    if predictor is not None:
        return max(1, round(predictor.estimate))
    return 54  # nothing better to go on; matches the default seed estimate


def build_mission(
    mission_id: str,
    unit: RescueUnit,
    chain: Sequence[RescueTask],
    depart: int,
    distance: DistanceModel,
    bursts: Mapping[str, int],
) -> Mission:
    """Lay out one mission timeline: base -> each chained task -> base -> prep."""
    entries = []
    clock = depart
    prev = unit.base
    for task in chain:
        leg_miles = distance.miles(prev, task.location)
        leg_minutes = travel_minutes(leg_miles, unit.speed_mph)
        burst = bursts[task.id]
        waiting = (clock - task.arrival) + leg_minutes
        entries.append(ScheduleEntry(
            task_id=task.id,
            unit_id=unit.id,
            start_time=clock,
            route_distance=leg_miles,
            route_duration=leg_minutes,
            waiting_time=waiting,
            burst_used=burst,
            turnaround_time=waiting + burst,
            completion_time=clock + leg_minutes + burst,
        ))
        clock = clock + leg_minutes + burst
        prev = task.location
    back = travel_minutes(distance.miles(prev, unit.base), unit.speed_mph)
    return_base = clock + back
    return Mission(
        mission_id=mission_id,
        unit_id=unit.id,
        task_ids=tuple(t.id for t in chain),
        depart_base=depart,
        return_base=return_base,
        available_after=return_base + unit.prep_minutes + unit.rest_minutes,
        entries=tuple(entries),
    )


# ---------------------------------------------------------------------------
# FCFS: strict arrival order, one task per mission.

def schedule_fcfs(
    tasks: Iterable[RescueTask],
    units: Sequence[RescueUnit],
    *,
    distance: DistanceModel,
    predictor: Optional[BurstPredictor] = None,
    completion_overrides: Optional[Mapping[str, int]] = None,
    start_clock: int = 0,
) -> ScheduleResult:
    """Serve requests in arrival order on the earliest-available capable unit."""
    if not units:
        raise ConfigError("at least one rescue unit is required")
    available = {u.id: max(u.available_at, start_clock) for u in units}
    by_id = {u.id: u for u in units}
    missions, entries, unschedulable = [], [], []
    for task in sorted(tasks, key=fcfs_sort_key):
        capable = [u for u in units if u.can_serve(task)]
        if not capable:
            unschedulable.append(task.id)
            continue
        unit = min(capable, key=lambda u: (available[u.id], u.id))
        depart = max(task.arrival, available[unit.id], start_clock)
        burst = _effective_burst(task, predictor, completion_overrides)
        mission = build_mission(f"m{len(missions) + 1}", by_id[unit.id], [task],
                                depart, distance, {task.id: burst})
        available[unit.id] = mission.available_after
        missions.append(mission)
        entries.extend(mission.entries)
        if predictor is not None:
            predictor.observe(burst)
    return ScheduleResult("fcfs", tuple(entries), tuple(missions),
                          tuple(unschedulable), summarize(entries))


# ---------------------------------------------------------------------------
# Priority and hybrid: event-driven queue loop.

@dataclass
class _LoopState:
    clock: int
    pending: list
    arrivals: list           # tasks sorted by arrival, consumed front-to-back
    arrival_idx: int
    env_updates: list        # EnvUpdate sorted by time
    env_idx: int
    completions: list        # heap of (return_base, seq, mission)
    completion_seq: int = 0
    dirty: bool = False      # priorities may need a rebalance pass


def _next_event_time(st: _LoopState) -> Optional[int]:
    times = []
    if st.arrival_idx < len(st.arrivals):
        times.append(st.arrivals[st.arrival_idx].arrival)
    if st.env_idx < len(st.env_updates):
        times.append(st.env_updates[st.env_idx].time)
    if st.completions:
        times.append(st.completions[0][0])
    return min(times) if times else None


def _apply_events_until(st: _LoopState, when: int, weights: Optional[WeightConfig],
                        predictor: Optional[BurstPredictor],
                        bursts_by_task: Mapping[str, int]) -> None:
    """Apply arrivals, environment updates, and completions stamped <= when."""
    while True:
        candidates = []
        if st.arrival_idx < len(st.arrivals):
            candidates.append((st.arrivals[st.arrival_idx].arrival, 0))
        if st.env_idx < len(st.env_updates):
            candidates.append((st.env_updates[st.env_idx].time, 1))
        if st.completions:
            candidates.append((st.completions[0][0], 2))
        candidates = [c for c in candidates if c[0] <= when]
        if not candidates:
            return
        _, kind = min(candidates)
        if kind == 0:
            st.pending.append(st.arrivals[st.arrival_idx])
            st.arrival_idx += 1
        elif kind == 1:
            update = st.env_updates[st.env_idx]
            st.env_idx += 1
            for i, task in enumerate(st.pending):
                if task.id == update.task_id:
                    task = task.with_env(update.env)
                    if not task.priority_pinned and weights is not None:
                        task = task.with_priority(
                            priority_mod.score(task.labels, task.env, weights))
                    st.pending[i] = task
        else:
            _, _, mission = heapq.heappop(st.completions)
            if predictor is not None:
                for tid in mission.task_ids:
                    predictor.observe(bursts_by_task[tid])
            if weights is not None:
                st.pending = priority_mod.rebalance(st.pending, weights)


def _run_queue_loop(
    tasks: Iterable[RescueTask],
    units: Sequence[RescueUnit],
    cfg: SchedulerConfig,
    *,
    policy: str,
    distance: DistanceModel,
    weights: Optional[WeightConfig],
    predictor: Optional[BurstPredictor],
    env_updates: Sequence[EnvUpdate],
    completion_overrides: Optional[Mapping[str, int]],
    start_clock: int,
) -> ScheduleResult:
    if not units:
        raise ConfigError("at least one rescue unit is required")
    chaining = policy == "hybrid"
    units = sorted(units, key=lambda u: u.id)
    available = {u.id: max(u.available_at, start_clock) for u in units}

    st = _LoopState(
        clock=start_clock,
        pending=[],
        arrivals=sorted(tasks, key=fcfs_sort_key),
        arrival_idx=0,
        env_updates=sorted(env_updates, key=lambda e: (e.time, e.task_id)),
        env_idx=0,
        completions=[],
    )
    bursts_by_task: dict = {}
    missions, entries, unschedulable = [], [], []
    fallback = predictor.estimate if predictor is not None else 54.0

    def sort_pending():
        st.pending.sort(key=lambda t: queue_sort_key(t, fallback))

    _apply_events_until(st, st.clock, weights, predictor, bursts_by_task)
    while st.pending or st.arrival_idx < len(st.arrivals):
        if not st.pending:
            st.clock = st.arrivals[st.arrival_idx].arrival
            _apply_events_until(st, st.clock, weights, predictor, bursts_by_task)
            continue
        fallback = predictor.estimate if predictor is not None else fallback
        sort_pending()
        anchor = st.pending[0]
        capable = [u for u in units if u.can_serve(anchor)]
        if not capable:
            unschedulable.append(anchor.id)
            st.pending.pop(0)
            continue
        unit = min(capable, key=lambda u: (available[u.id], u.id))
        depart = max(st.clock, available[unit.id], anchor.arrival)
        next_event = _next_event_time(st)
        if next_event is not None and next_event <= depart:
            # Something lands before this unit rolls out; let it re-sort the queue.
            st.clock = max(st.clock, next_event)
            _apply_events_until(st, st.clock, weights, predictor, bursts_by_task)
            continue

        chain = [anchor]
        if chaining and anchor.location is not None:
            idle = [u for u in units
                    if available[u.id] <= depart
                    and any(u.can_serve(t) for t in st.pending)]
            # Batch tasks into one mission only when demand outstrips the units
            # that could roll out right now; otherwise a dedicated unit is faster.
            if len(st.pending) > len(idle):
                load = anchor.demand
                for candidate in st.pending[1:]:
                    if load + candidate.demand > unit.capacity:
                        continue
                    if not unit.can_serve(candidate):
                        continue
                    if candidate.location is None:
                        continue
                    if (candidate.priority >= cfg.high_priority_threshold
                            and any(u.id != unit.id and u.can_serve(candidate)
                                    for u in units)):
                        continue  # high-priority tasks get their own unit
                    gap = distance.miles_or_none(anchor.location, candidate.location)
                    if gap is None or gap > cfg.dis_radius_miles:
                        continue
                    chain.append(candidate)
                    load += candidate.demand
        for task in chain:
            bursts_by_task[task.id] = _effective_burst(task, predictor, completion_overrides)
        mission = build_mission(f"m{len(missions) + 1}", unit, chain, depart,
                                distance, bursts_by_task)
        chain_ids = {t.id for t in chain}
        st.pending = [t for t in st.pending if t.id not in chain_ids]
        available[unit.id] = mission.available_after
        heapq.heappush(st.completions, (mission.return_base, st.completion_seq, mission))
        st.completion_seq += 1
        missions.append(mission)
        entries.extend(mission.entries)
        st.clock = depart
    # Drain the remaining completions so the predictor sees every mission.
    _apply_events_until(st, float("inf"), weights, predictor, bursts_by_task)
    return ScheduleResult(policy, tuple(entries), tuple(missions),
                          tuple(unschedulable), summarize(entries))


def schedule_priority(
    tasks: Iterable[RescueTask],
    units: Sequence[RescueUnit],
    cfg: Optional[SchedulerConfig] = None,
    *,
    distance: DistanceModel,
    weights: Optional[WeightConfig] = None,
    predictor: Optional[BurstPredictor] = None,
    env_updates: Sequence[EnvUpdate] = (),
    completion_overrides: Optional[Mapping[str, int]] = None,
    start_clock: int = 0,
) -> ScheduleResult:
    """Highest priority first, one task per mission; arrivals re-sort the queue."""
    return _run_queue_loop(
        tasks, units, cfg or SchedulerConfig(), policy="priority",
        distance=distance, weights=weights, predictor=predictor,
        env_updates=env_updates, completion_overrides=completion_overrides,
        start_clock=start_clock)


def schedule_hybrid(
    tasks: Iterable[RescueTask],
    units: Sequence[RescueUnit],
    cfg: Optional[SchedulerConfig] = None,
    *,
    distance: DistanceModel,
    weights: Optional[WeightConfig] = None,
    predictor: Optional[BurstPredictor] = None,
    env_updates: Sequence[EnvUpdate] = (),
    completion_overrides: Optional[Mapping[str, int]] = None,
    start_clock: int = 0,
) -> ScheduleResult:
    """Priority dispatch with geographic task grouping under capacity limits.

    The queue head anchors each mission. While pending tasks outnumber the
    units able to roll out immediately, other queued tasks within the grouping
    radius of the anchor are chained onto the same mission (highest priority
    first), except tasks at or above the high-priority threshold, which get a
    dedicated unit whenever any other capable unit exists.
    """
    return _run_queue_loop(
        tasks, units, cfg or SchedulerConfig(), policy="hybrid",
        distance=distance, weights=weights, predictor=predictor,
        env_updates=env_updates, completion_overrides=completion_overrides,
        start_clock=start_clock)


def schedule(policy: str, tasks, units, cfg=None, **kwargs) -> ScheduleResult:
    if policy == "fcfs":
        kwargs.pop("weights", None)
        kwargs.pop("env_updates", None)
        return schedule_fcfs(tasks, units, **kwargs)
    if policy == "priority":
        return schedule_priority(tasks, units, cfg, **kwargs)
    if policy == "hybrid":
        return schedule_hybrid(tasks, units, cfg, **kwargs)
    raise ConfigError(f"unknown policy {policy!r}; expected one of {POLICIES}")
