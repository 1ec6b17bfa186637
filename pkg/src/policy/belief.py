"""Value beliefs and the Thompson-sampling policies built from them.

A Thompson policy gives every action its probability of being the best one
under the current value beliefs. Tabular learners express their uncertainty
as confidence intervals, converted here into independent Gaussians and raced
by Monte-Carlo; network learners count argmax wins over dropout passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

POLICY_TOLERANCE = 1e-9
DEFAULT_XI = 1e-4
DEFAULT_SAMPLE_COUNT = 4096


@dataclass(frozen=True)
class GaussianBelief:
    """Belief about one action value: N(mean, std**2) in reward units."""

    mean: float
    std: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.std)):
            raise ValueError(f"belief must be finite, got mean={self.mean!r} std={self.std!r}")
        if self.std < 0:
            raise ValueError(f"belief std must be >= 0, got {self.std!r}")


@dataclass(frozen=True, eq=False)
class ActionPolicy:
    """Probability vector over an action set."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError(f"policy must be a non-empty vector, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError(f"policy entries must be finite and >= 0, got {probs!r}")
        if abs(probs.sum() - 1.0) > POLICY_TOLERANCE:
            raise ValueError(f"policy must sum to 1, got sum={probs.sum()!r}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, action: int) -> float:
        return float(self.probs[action])

    @classmethod
    def from_weights(cls, weights: np.ndarray) -> ActionPolicy:
        """Normalise non-negative weights into a policy."""
        weights = np.asarray(weights, dtype=np.float64)
        return cls(weights / weights.sum())

    @classmethod
    def uniform(cls, action_count: int) -> ActionPolicy:
        return cls(np.full(action_count, 1.0 / action_count))


def ci_to_gaussian(q_hat: float, half_width: float, quantile: float) -> GaussianBelief:
    """Read a symmetric interval ``q_hat ± half_width`` as a Gaussian belief.

    ``quantile`` is the t- or z-value the interval was built with, so the
    implied standard deviation is ``half_width / quantile``.
    """
    for name, value in (("q_hat", q_hat), ("half_width", half_width), ("quantile", quantile)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")
    if half_width < 0:
        raise ValueError(f"half_width must be >= 0, got {half_width!r}")
    if quantile <= 0:
        raise ValueError(f"quantile must be > 0, got {quantile!r}")
    return GaussianBelief(mean=q_hat, std=half_width / quantile)


def draw_thompson_noise(rng: np.random.Generator, sample_count: int, action_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Standard normal draws plus tie-break uniforms for one Thompson race.

    Sharing one draw between several belief sets (common random numbers) makes
    identical beliefs produce identical policies.
    """
    if sample_count < 1:
        raise ValueError(f"sample_count must be >= 1, got {sample_count!r}")
    return rng.standard_normal((sample_count, action_count)), rng.random((sample_count, action_count))


def thompson_from_draws(means: np.ndarray, stds: np.ndarray, normals: np.ndarray, tie_break: np.ndarray) -> ActionPolicy:
    """Count argmax wins of ``means + stds * normals`` row by row.

    Means are centred on their maximum first, so a common shift of every mean
    leaves the race untouched. Exact ties go to the tied action with the
    largest tie-break uniform, i.e. uniformly at random.
    """
    means = np.asarray(means, dtype=np.float64)
    stds = np.asarray(stds, dtype=np.float64)
    samples = (means - means.max()) + stds * normals
    best = samples.max(axis=1, keepdims=True)
    winners = np.argmax(np.where(samples == best, tie_break, -1.0), axis=1)
    counts = np.bincount(winners, minlength=means.size)
    return ActionPolicy(counts / counts.sum())


def thompson_from_beliefs(
    beliefs: Sequence[GaussianBelief],
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    rng_seed: int | np.random.Generator | None = None,
) -> ActionPolicy:
    """Monte-Carlo estimate of P(Q_i > Q_j for all j != i) under independent Gaussians."""
    if not beliefs:
        raise ValueError("need at least one belief")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    means = np.array([b.mean for b in beliefs])
    stds = np.array([b.std for b in beliefs])
    normals, tie_break = draw_thompson_noise(rng, sample_count, len(beliefs))
    return thompson_from_draws(means, stds, normals, tie_break)


def thompson_from_dropout(win_counts: Sequence[int], total: int) -> ActionPolicy:
    """Thompson policy from argmax counts over ``total`` dropout forward passes."""
    counts = np.asarray(win_counts, dtype=np.int64)
    if total < 1:
        raise ValueError(f"total must be >= 1, got {total!r}")
    if np.any(counts < 0):
        raise ValueError(f"win counts must be >= 0, got {counts!r}")
    if counts.sum() != total:
        raise ValueError(f"win counts sum to {counts.sum()}, expected {total}")
    return ActionPolicy(counts / total)


def floor_policy(policy: ActionPolicy, xi: float = DEFAULT_XI) -> ActionPolicy:
    """Raise every probability to at least ``xi`` and renormalise.

    After renormalisation a floored entry can sit slightly below ``xi``, at
    ``xi / (1 + |A| xi)`` in the worst case; a policy already clearing that
    level is returned as is, so flooring twice changes nothing.
    """
    action_count = len(policy)
    if not 0 < xi < 1.0 / action_count:
        raise ValueError(f"xi must lie in (0, 1/{action_count}), got {xi!r}")
    if policy.probs.min() >= xi / (1.0 + action_count * xi):
        return policy
    return ActionPolicy.from_weights(np.maximum(policy.probs, xi))
