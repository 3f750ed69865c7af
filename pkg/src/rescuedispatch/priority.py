"""Priority scoring of rescue tasks from classified labels and environment state.

The score of a task is the weighted sum of its label flags and environmental
condition intensities, clamped to the configured [base, max] band. Tasks that
ship an explicit, pinned priority (operator overrides, scenarios without label
data) are left untouched by rebalancing.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional

from .core import ConfigError, EnvVector, LabelVector, RescueTask, WeightConfig


def score(labels: LabelVector, env: EnvVector, weights: WeightConfig) -> float:
    """Weighted label + environment sum, clamped to [base_priority, max_priority].

    Every active environment key must have a configured weight; a missing
    weight raises instead of silently contributing zero.
    """
    raw = 0.0
    for key, value in env.items():
        if value < 0:
            raise ConfigError(f"environment value {key}={value} must be >= 0")
        try:
            weight = weights.env_weights[key]
        except KeyError:
            raise ConfigError(f"no weight configured for environment key {key!r}") from None
        raw += value * weight
    for name, weight in weights.label_weights.items():
        raw += labels.signal(name) * weight
    return min(max(raw, weights.base_priority), weights.max_priority)


def rebalance(
    queue: Iterable[RescueTask],
    weights: WeightConfig,
    env_feed: Optional[Mapping[str, EnvVector]] = None,
) -> list:
    """Recompute the priority of every queued task against its latest environment.

    `env_feed` maps task id to the current environment vector; tasks absent
    from the feed keep their stored environment. Pinned-priority tasks pass
    through unchanged. Dispatched and running tasks are never in the queue, so
    they are untouched by construction.
    """
    env_feed = env_feed or {}
    updated = []
    for task in queue:
        if task.priority_pinned:
            updated.append(task)
            continue
        env = env_feed.get(task.id, task.env)
        task = task.with_env(env) if env is not task.env else task
        updated.append(task.with_priority(score(task.labels, env, weights)))
    return updated
