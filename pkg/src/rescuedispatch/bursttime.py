"""Burst-time prediction by exponential averaging of observed mission durations.

Each completed task feeds its actual on-site duration back into the estimate:

    next = alpha * actual + (1 - alpha) * current

so the estimate is always a convex combination of the seed and everything
observed so far.
"""

from __future__ import annotations


class BurstPredictor:
    """Single-writer exponential-average estimator of mission service time."""

    def __init__(self, seed_estimate: float, alpha: float = 0.5):
        if seed_estimate <= 0:
            raise ValueError(f"seed estimate must be positive, got {seed_estimate}")
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must be within [0, 1], got {alpha}")
        self.alpha = alpha
        self._estimate = float(seed_estimate)
        self._seed = float(seed_estimate)
        self.history: list = []  # (predicted-before, actual) pairs

    @classmethod
    def bootstrap(cls, seed_estimate: float, alpha: float = 0.5) -> "BurstPredictor":
        return cls(seed_estimate, alpha)

    @property
    def estimate(self) -> float:
        return self._estimate

    def observe(self, actual: float) -> float:
        """Fold one actual duration into the estimate and return the new value."""
        if actual <= 0:
            raise ValueError(f"observed duration must be positive, got {actual}")
        self.history.append((self._estimate, float(actual)))
        self._estimate = self.alpha * float(actual) + (1.0 - self.alpha) * self._estimate
        return self._estimate

    def replayed_estimate(self) -> float:
        """Recompute the estimate by folding the history from the seed."""
        value = self._seed
        for _, actual in self.history:
            value = self.alpha * actual + (1.0 - self.alpha) * value
        return value
