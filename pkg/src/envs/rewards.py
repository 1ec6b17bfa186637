"""Truncated Gaussian-mixture reward distributions, sampled by rejection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

MAX_REJECTION_ROUNDS = 1000


@dataclass(frozen=True)
class TruncatedMixture:
    """Mixture of ``(weight, mean, std)`` Gaussians restricted to ``[low, high]``."""

    components: tuple[tuple[float, float, float], ...]
    low: float
    high: float

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("mixture needs at least one component")
        if not self.low < self.high:
            raise ValueError(f"empty support [{self.low!r}, {self.high!r}]")
        weights = np.array([w for w, _, _ in self.components])
        if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"mixture weights must be positive and sum to 1, got {weights!r}")
        if any(std <= 0 for _, _, std in self.components):
            raise ValueError("component std must be > 0")

    def sample_many(self, rng: np.random.Generator, n: int) -> np.ndarray:
        weights = np.array([w for w, _, _ in self.components])
        means = np.array([m for _, m, _ in self.components])
        stds = np.array([s for _, _, s in self.components])
        out = np.empty(n)
        pending = np.arange(n)
        for _ in range(MAX_REJECTION_ROUNDS):
            if pending.size == 0:
                return out
            picked = rng.choice(weights.size, size=pending.size, p=weights)
            draws = rng.normal(means[picked], stds[picked])
            accepted = (draws >= self.low) & (draws <= self.high)
            out[pending[accepted]] = draws[accepted]
            pending = pending[~accepted]
        raise RuntimeError(f"rejection sampling of {self!r} kept missing [{self.low}, {self.high}]")

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.sample_many(rng, 1)[0])

    def mean(self) -> float:
        """Exact mean of the truncated mixture."""
        masses, means = [], []
        for weight, mu, std in self.components:
            a, b = (self.low - mu) / std, (self.high - mu) / std
            masses.append(weight * (stats.norm.cdf(b) - stats.norm.cdf(a)))
            means.append(stats.truncnorm.mean(a, b, loc=mu, scale=std))
        masses_arr = np.array(masses)
        return float(np.dot(masses_arr, means) / masses_arr.sum())


def normal(mean: float, std: float, low: float, high: float) -> TruncatedMixture:
    return TruncatedMixture(((1.0, mean, std),), low, high)


def mixture(first: tuple[float, float], second: tuple[float, float], low: float, high: float) -> TruncatedMixture:
    """``1/3 N(first) + 2/3 N(second)`` on ``[low, high]``."""
    return TruncatedMixture(((1.0 / 3.0, *first), (2.0 / 3.0, *second)), low, high)


MAZE_STEP = mixture((-1.5, 0.2), (-0.5, 0.3), -2.0, 0.0)
MAZE_WALL = mixture((-11.5, 0.2), (-10.5, 0.3), -12.0, -10.0)
MAZE_GOAL = normal(10.0, 0.02, 9.5, 11.5)

COMBAT_BAD_SHOT = normal(-10.0, 0.1, -11.0, -9.0)
COMBAT_WALL = mixture((-1.5, 0.2), (-0.5, 0.3), -2.0, 0.0)
COMBAT_GOAL = mixture((97.0, 0.2), (100.0, 0.15), 95.0, 105.0)
