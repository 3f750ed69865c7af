import importlib.resources
import random

import pytest

from rescuedispatch.core import GeoPoint, RescueTask, RescueUnit
from rescuedispatch.scenario import Scenario, load_scenario


def data_path(name: str) -> str:
    return str(importlib.resources.files("rescuedispatch").joinpath(f"data/{name}"))


@pytest.fixture(scope="session")
def portarthur() -> Scenario:
    return load_scenario(data_path("portarthur.json"))


def random_scenario(seed: int, task_count: int = None, unit_count: int = None,
                    with_capabilities: bool = False):
    """Small random coordinate-mode scenario for invariant sweeps."""
    rng = random.Random(seed)
    task_count = task_count or rng.randint(6, 24)
    unit_count = unit_count or rng.randint(1, 5)
    base = GeoPoint(30.0 + rng.uniform(-1, 1), -94.0 + rng.uniform(-1, 1))
    cap_pool = ("boat", "medical", "heavy")

    def jitter(radius_miles):
        return GeoPoint(
            base.latitude + rng.uniform(-radius_miles, radius_miles) / 69.09,
            base.longitude + rng.uniform(-radius_miles, radius_miles) / 60.0,
        )

    tasks = []
    for i in range(1, task_count + 1):
        caps = frozenset()
        if with_capabilities and rng.random() < 0.4:
            caps = frozenset(rng.sample(cap_pool, rng.randint(1, 2)))
        tasks.append(RescueTask(
            id=f"t{i}",
            arrival=rng.randint(0, 600),
            burst_estimate=rng.randint(10, 90),
            location=jitter(6.0),
            priority=float(rng.randint(1, 10)),
            priority_pinned=True,
            demand=rng.randint(1, 2),
        ))
    units = []
    for i in range(1, unit_count + 1):
        caps = frozenset(rng.sample(cap_pool, rng.randint(0, 2))) \
            if with_capabilities else frozenset()
        units.append(RescueUnit(
            id=f"unit-{i}",
            capabilities=caps,
            capacity=rng.randint(2, 4),
            speed_mph=20.0,
            prep_minutes=rng.choice((0, 15, 30)),
            base=base,
            available_at=rng.randint(0, 120),
        ))
    return tasks, units
