"""Shared domain types: integer-minute time, geography, tasks, units, missions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Union

EARTH_RADIUS_MILES = 3958.8
MILES_PER_DEGREE_LAT = 2.0 * math.pi * EARTH_RADIUS_MILES / 360.0

LABEL_NAMES = ("rescue_needed", "flood", "water_needed", "dcew", "injured", "sick")

# Default label / environment weights used by the bundled scenarios.
DEFAULT_LABEL_WEIGHTS = {
    "flood": 1.5,
    "water_needed": 1.5,
    "dcew": 2.0,
    "sick_or_injured": 2.5,
}
DEFAULT_ENV_WEIGHTS = {
    "storm": 1.0,
    "road_damaged": 1.0,
    "forecast_storm": 0.5,
    "forecast_flood": 0.5,
}


class DispatchError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DispatchError):
    """Invalid configuration: weights, speeds, thresholds, capacities."""


class ScenarioError(DispatchError):
    """Malformed or inconsistent scenario input; carries one message per problem."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class UnknownLocationError(DispatchError):
    """A location key could not be resolved against the distance model."""


# ---------------------------------------------------------------------------
# Time: everything is integer minutes since the scenario epoch (day start).

def parse_hhmm(text: str) -> int:
    """Parse "HH:MM" into minutes. Hours may exceed 23 for times past midnight."""
    parts = text.strip().split(":")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise ScenarioError(f"bad time literal {text!r}, expected HH:MM")
    try:
        hours, minutes = int(parts[0]), int(parts[1])
    except ValueError:
        raise ScenarioError(f"bad time literal {text!r}, expected HH:MM") from None
    if hours < 0 or not 0 <= minutes <= 59:
        raise ScenarioError(f"time {text!r} out of range")
    return hours * 60 + minutes


def format_hhmm(minutes: int) -> str:
    """Render minutes as "HH:MM"; the hour field keeps counting past 23."""
    if minutes < 0:
        raise ValueError(f"negative time point {minutes}")
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def parse_time(value) -> int:
    """Accept either integer minutes or an "HH:MM" string."""
    if isinstance(value, bool):
        raise ScenarioError(f"bad time value {value!r}")
    if isinstance(value, int):
        if value < 0:
            raise ScenarioError(f"negative time value {value}")
        return value
    if isinstance(value, str):
        return parse_hhmm(value)
    raise ScenarioError(f"bad time value {value!r}")


# ---------------------------------------------------------------------------
# Labels, environment, weights.

@dataclass(frozen=True)
class LabelVector:
    """Binary output flags of the six-class request classifier."""

    rescue_needed: int = 0
    flood: int = 0
    water_needed: int = 0
    dcew: int = 0
    injured: int = 0
    sick: int = 0

    def __post_init__(self):
        for name in LABEL_NAMES:
            value = getattr(self, name)
            if value not in (0, 1):
                raise ValueError(f"label {name} must be 0 or 1, got {value!r}")

    def signal(self, name: str) -> int:
        """Resolve a weighted signal name: one of the six flags, or the merged
        sick_or_injured head used by the priority weights."""
        if name == "sick_or_injured":
            return max(self.injured, self.sick)
        if name in LABEL_NAMES:
            return getattr(self, name)
        raise ConfigError(f"unknown label signal {name!r}")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in LABEL_NAMES}

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, int]) -> "LabelVector":
        unknown = sorted(set(mapping) - set(LABEL_NAMES))
        if unknown:
            raise ScenarioError(f"unknown labels {unknown}")
        return cls(**{k: int(v) for k, v in mapping.items()})


# An environment vector is a plain mapping of condition name -> intensity >= 0.
EnvVector = Mapping[str, float]


def validate_env(env: EnvVector) -> None:
    for key, value in env.items():
        if value < 0:
            raise ValueError(f"environment value {key}={value} must be >= 0")


@dataclass(frozen=True)
class WeightConfig:
    """Weights feeding the priority score, plus the clamp bounds."""

    label_weights: Mapping[str, float]
    env_weights: Mapping[str, float]
    base_priority: float = 1.0
    max_priority: float = 10.0

    def __post_init__(self):
        if self.base_priority > self.max_priority:
            raise ConfigError("base_priority must not exceed max_priority")
        for name, weight in {**self.label_weights, **self.env_weights}.items():
            if weight < 0:
                raise ConfigError(f"weight {name}={weight} must be >= 0")

    def scaled(self, factor: float) -> "WeightConfig":
        """Rescale the whole priority axis by a positive constant."""
        if factor <= 0:
            raise ConfigError("scale factor must be positive")
        return WeightConfig(
            label_weights={k: v * factor for k, v in self.label_weights.items()},
            env_weights={k: v * factor for k, v in self.env_weights.items()},
            base_priority=self.base_priority * factor,
            max_priority=self.max_priority * factor,
        )

    @classmethod
    def default(cls) -> "WeightConfig":
        return cls(label_weights=dict(DEFAULT_LABEL_WEIGHTS),
                   env_weights=dict(DEFAULT_ENV_WEIGHTS))


# ---------------------------------------------------------------------------
# Geography and the distance model.

@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} out of range")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} out of range")


# A location is either a coordinate pair or a distance-matrix key.
Location = Union[GeoPoint, str]


def haversine_miles(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance over the mean Earth radius (3958.8 mi)."""
    lat1, lon1 = math.radians(a.latitude), math.radians(a.longitude)
    lat2, lon2 = math.radians(b.latitude), math.radians(b.longitude)
    dlat, dlon = lat2 - lat1, lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_MILES * math.asin(min(1.0, math.sqrt(h)))


class DistanceModel:
    """Pairwise miles between locations.

    Matrix mode stores explicit symmetric distances keyed by location name
    ("base" plus one key per task); coordinates mode computes great-circle
    miles between GeoPoints. Matrix entries may be sparse: a missing pair is
    reported as unknown rather than guessed.
    """

    def __init__(self, matrix: Optional[Mapping[str, Mapping[str, float]]] = None):
        self._matrix = None
        if matrix is not None:
            self._matrix = {a: dict(row) for a, row in matrix.items()}
            self._validate_matrix()

    @classmethod
    def coordinates(cls) -> "DistanceModel":
        return cls(None)

    @classmethod
    def from_matrix(cls, matrix: Mapping[str, Mapping[str, float]]) -> "DistanceModel":
        return cls(matrix)

    @property
    def matrix_mode(self) -> bool:
        return self._matrix is not None

    def _validate_matrix(self):
        problems = []
        for a, row in self._matrix.items():
            for b, value in row.items():
                if value < 0:
                    problems.append(f"distance_matrix[{a}][{b}]={value} is negative")
                if a == b and value != 0:
                    problems.append(f"distance_matrix[{a}][{a}]={value} must be 0")
                back = self._matrix.get(b, {}).get(a)
                if back is not None and back != value:
                    problems.append(f"distance_matrix not symmetric at [{a}][{b}]")
        if problems:
            raise ScenarioError(sorted(set(problems)))

    def miles_or_none(self, a: Location, b: Location) -> Optional[float]:
        """Distance in miles, or None when a matrix pair is not listed."""
        if isinstance(a, GeoPoint) and isinstance(b, GeoPoint):
            if a == b:
                return 0.0
            return haversine_miles(a, b)
        if isinstance(a, str) and isinstance(b, str):
            if self._matrix is None:
                raise UnknownLocationError(
                    f"matrix keys ({a!r}, {b!r}) used with a coordinates-only model")
            if a == b:
                return 0.0
            value = self._matrix.get(a, {}).get(b)
            if value is None:
                value = self._matrix.get(b, {}).get(a)
            return value
        raise UnknownLocationError(f"cannot mix location kinds: {a!r} vs {b!r}")

    def miles(self, a: Location, b: Location) -> float:
        value = self.miles_or_none(a, b)
        if value is None:
            raise UnknownLocationError(f"no distance between {a!r} and {b!r}")
        return value

    def with_entry(self, a: str, b: str, miles: float) -> "DistanceModel":
        """A new matrix model including one extra pair; keeps this one intact."""
        if self._matrix is None:
            raise UnknownLocationError("cannot add matrix entries to a "
                                       "coordinates-only model")
        matrix = {key: dict(row) for key, row in self._matrix.items()}
        matrix.setdefault(a, {})[b] = miles
        return DistanceModel.from_matrix(matrix)


def travel_minutes(distance_miles: float, speed_mph: float) -> int:
    """Whole minutes to cover a distance, rounded half-up once per leg."""
    if speed_mph <= 0:
        raise ConfigError(f"speed must be positive, got {speed_mph}")
    if distance_miles < 0:
        raise ConfigError(f"distance must be >= 0, got {distance_miles}")
    return int(math.floor(distance_miles * 60.0 / speed_mph + 0.5))


# ---------------------------------------------------------------------------
# Tasks, units, schedule rows.

@dataclass(frozen=True)
class RescueTask:
    """One rescue request (possibly aggregating several people at a spot)."""

    id: str
    arrival: int
    burst_estimate: Optional[int] = None  # minutes on site; None -> predictor fills in
    labels: LabelVector = LabelVector()
    env: Mapping[str, float] = field(default_factory=dict)
    location: Optional[Location] = None
    priority: float = 1.0
    priority_pinned: bool = False  # explicit priority, exempt from rebalancing
    required_capabilities: frozenset = frozenset()
    demand: int = 1
    text: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("task id must be non-empty")
        if self.arrival < 0:
            raise ValueError(f"task {self.id}: arrival must be >= 0")
        if self.burst_estimate is not None and self.burst_estimate <= 0:
            raise ValueError(f"task {self.id}: burst must be positive")
        if self.demand < 0:
            raise ValueError(f"task {self.id}: demand must be >= 0")
        validate_env(self.env)

    def with_priority(self, value: float, pinned: bool = False) -> "RescueTask":
        return replace(self, priority=value, priority_pinned=pinned)

    def with_env(self, env: Mapping[str, float]) -> "RescueTask":
        return replace(self, env=dict(env))


@dataclass(frozen=True)
class RescueUnit:
    """A rescue team / vehicle: the scheduler's processor."""

    id: str
    capabilities: frozenset = frozenset()
    capacity: int = 3  # resource units per mission; one task consumes task.demand
    speed_mph: float = 20.0
    prep_minutes: int = 30
    rest_minutes: int = 0
    base: Location = "base"
    available_at: int = 0

    def __post_init__(self):
        if not self.id:
            raise ValueError("unit id must be non-empty")
        if self.capacity < 1:
            raise ValueError(f"unit {self.id}: capacity must be >= 1")
        if self.speed_mph <= 0:
            raise ValueError(f"unit {self.id}: speed must be positive")
        if self.prep_minutes < 0 or self.rest_minutes < 0:
            raise ValueError(f"unit {self.id}: prep/rest must be >= 0")

    def can_serve(self, task: RescueTask) -> bool:
        return task.required_capabilities <= self.capabilities


@dataclass(frozen=True)
class ScheduleEntry:
    """One executed task leg; the row type of the schedule output table."""

    task_id: str
    unit_id: str
    start_time: int        # departure toward this task
    route_distance: float  # one-way miles for this leg
    route_duration: int    # minutes for this leg
    waiting_time: int      # (start - arrival) + route_duration
    burst_used: int        # minutes on site
    turnaround_time: int   # waiting + burst
    completion_time: int   # on-site completion: start + route + burst

    def __post_init__(self):
        for name in ("start_time", "route_duration", "waiting_time",
                     "burst_used", "turnaround_time"):
            if getattr(self, name) < 0:
                raise ValueError(f"entry {self.task_id}: {name} must be >= 0")
        if self.route_distance < 0:
            raise ValueError(f"entry {self.task_id}: route_distance must be >= 0")


@dataclass(frozen=True)
class Mission:
    """One unit dispatch covering an ordered chain of grouped tasks."""

    mission_id: str
    unit_id: str
    task_ids: tuple
    depart_base: int
    return_base: int       # arrival back at base
    available_after: int   # return + prep + rest
    entries: tuple

    def __post_init__(self):
        if len(self.task_ids) < 1:
            raise ValueError(f"mission {self.mission_id}: empty task chain")
        if len(self.entries) != len(self.task_ids):
            raise ValueError(f"mission {self.mission_id}: entries/tasks mismatch")
