"""Tabular Watkins Q(lambda) with Monte-Carlo return statistics.

Q-values come from Q(lambda); their uncertainty comes from every-visit
discounted returns, summarised as a t-interval around the Q-value.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import stats

from exceptions import InsufficientDataError
from policy import ActionPolicy, ci_to_gaussian, draw_thompson_noise, thompson_from_draws

from .base import Learner, StateRegistry, ThompsonNoise, grown

logger = logging.getLogger(__name__)


@dataclass
class QTable:
    """Action values and eligibility traces, one row per state."""

    q: np.ndarray
    trace: np.ndarray

    @classmethod
    def zeros(cls, rows: int, action_count: int) -> QTable:
        return cls(q=np.zeros((rows, action_count)), trace=np.zeros((rows, action_count)))

    def reset_traces(self) -> None:
        self.trace[:] = 0.0

    def ensure_rows(self, rows: int) -> None:
        self.q = grown(self.q, rows)
        self.trace = grown(self.trace, rows)


@dataclass(frozen=True)
class ReturnSummary:
    """Sufficient statistics of the sampled returns of one (state, action)."""

    n: int
    total: float
    total_sq: float


@dataclass
class ReturnStats:
    n: np.ndarray
    total: np.ndarray
    total_sq: np.ndarray

    @classmethod
    def zeros(cls, rows: int, action_count: int) -> ReturnStats:
        return cls(
            n=np.zeros((rows, action_count), dtype=np.int64),
            total=np.zeros((rows, action_count)),
            total_sq=np.zeros((rows, action_count)),
        )

    def ensure_rows(self, rows: int) -> None:
        self.n = grown(self.n, rows)
        self.total = grown(self.total, rows)
        self.total_sq = grown(self.total_sq, rows)

    def add(self, state: int, action: int, sampled_return: float) -> None:
        self.n[state, action] += 1
        self.total[state, action] += sampled_return
        self.total_sq[state, action] += sampled_return * sampled_return

    def at(self, state: int, action: int) -> ReturnSummary:
        return ReturnSummary(
            n=int(self.n[state, action]),
            total=float(self.total[state, action]),
            total_sq=float(self.total_sq[state, action]),
        )


def _check_rates(gamma: float, eta: float, lam: float) -> None:
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta!r}")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma!r}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")


def q_update(
    table: QTable,
    s: int,
    a: int,
    r: float,
    s_next: int,
    gamma: float,
    eta: float,
    lam: float,
    greedy_action_taken: bool,
) -> QTable:
    """One Watkins Q(lambda) step with replacing traces.

    An exploratory action clears the traces of earlier pairs before its TD
    error is applied, so only greedy chains share credit.
    """
    _check_rates(gamma, eta, lam)
    delta = r + gamma * table.q[s_next].max() - table.q[s, a]
    if not greedy_action_taken:
        table.reset_traces()
    table.trace[s, a] = 1.0
    table.q += eta * delta * table.trace
    table.trace *= gamma * lam
    return table


def record_returns(trajectory: Sequence[tuple[int, int, float]], gamma: float) -> list[tuple[int, int, float]]:
    """Every-visit discounted return from each step of a finished episode."""
    sampled: list[tuple[int, int, float]] = []
    ret = 0.0
    for state, action, reward in reversed(trajectory):
        ret = reward + gamma * ret
        sampled.append((state, action, ret))
    sampled.reverse()
    return sampled


def sample_std(summary: ReturnSummary) -> float:
    n = summary.n
    if n < 2:
        raise InsufficientDataError(f"sample std needs n >= 2, got n={n}")
    spread = n * summary.total_sq - summary.total * summary.total
    return math.sqrt(max(spread, 0.0) / (n * (n - 1)))


@lru_cache(maxsize=4096)
def t_quantile(nu: float, dof: int) -> float:
    """One-sided t-value leaving ``nu/2`` in the upper tail."""
    return float(stats.t.ppf(1.0 - nu / 2.0, dof))


@lru_cache(maxsize=64)
def z_quantile(nu: float) -> float:
    return float(stats.norm.ppf(1.0 - nu / 2.0))


def mf_interval(summary: ReturnSummary, nu: float, prior_half_width: float) -> tuple[float, float]:
    """Half-width of the ``1 - nu`` interval on a Q-value, with the quantile it used.

    Below two samples the interval falls back to ``prior_half_width`` read
    at the normal quantile.
    """
    if not 0.0 < nu < 1.0:
        raise ValueError(f"nu must lie in (0, 1), got {nu!r}")
    if summary.n < 2:
        return prior_half_width, z_quantile(nu)
    quantile = t_quantile(nu, summary.n - 1)
    return quantile * sample_std(summary) / math.sqrt(summary.n), quantile


@dataclass
class ModelFreeSettings:
    gamma: float = 0.95
    eta: float = 0.1
    lam: float = 0.8
    nu: float = 0.05
    reward_span: float = 1.0
    sample_count: int = 4096
    dense_limit: int = 20000

    prior_half_width: float = field(init=False)

    def __post_init__(self) -> None:
        _check_rates(self.gamma, self.eta, self.lam)
        self.prior_half_width = self.reward_span / (1.0 - self.gamma)


class ModelFreeLearner(Learner):
    """Q(lambda) values with t-interval beliefs for one tabular space."""

    def __init__(self, action_count: int, space_size: int, settings: ModelFreeSettings) -> None:
        super().__init__(action_count)
        self.settings = settings
        self.registry = StateRegistry(space_size, settings.dense_limit)
        self.table = QTable.zeros(self.registry.row_count, action_count)
        self.returns = ReturnStats.zeros(self.registry.row_count, action_count)
        self._trajectory: list[tuple[int, int, float]] = []

    def _row(self, state: int) -> int:
        row = self.registry.row(state)
        self.table.ensure_rows(self.registry.row_count)
        self.returns.ensure_rows(self.registry.row_count)
        return row

    def action_values(self, state: int) -> np.ndarray:
        return self.table.q[self._row(state)].copy()

    def thompson_policy(self, state: int, rng: np.random.Generator, noise: ThompsonNoise | None = None) -> ActionPolicy:
        row = self._row(state)
        means = np.empty(self.action_count)
        stds = np.empty(self.action_count)
        for action in range(self.action_count):
            half_width, quantile = mf_interval(self.returns.at(row, action), self.settings.nu, self.settings.prior_half_width)
            belief = ci_to_gaussian(float(self.table.q[row, action]), half_width, quantile)
            means[action], stds[action] = belief.mean, belief.std
        if noise is None:
            noise = draw_thompson_noise(rng, self.settings.sample_count, self.action_count)
        return thompson_from_draws(means, stds, *noise)

    def observe(self, state: int, action: int, reward: float, next_state: int, terminal: bool) -> None:
        row = self._row(state)
        next_row = StateRegistry.SINK if terminal else self._row(next_state)
        greedy = self.table.q[row, action] >= self.table.q[row].max()
        s = self.settings
        q_update(self.table, row, action, reward, next_row, s.gamma, s.eta, s.lam, greedy)
        self._trajectory.append((row, action, reward))
        if terminal:
            for visited, taken, sampled in record_returns(self._trajectory, s.gamma):
                self.returns.add(visited, taken, sampled)
            logger.debug("recorded %d returns", len(self._trajectory))
            self._trajectory.clear()

    def end_episode(self, truncated: bool) -> None:
        # returns of a truncated episode never reached a terminal state
        self._trajectory.clear()
        self.table.reset_traces()
