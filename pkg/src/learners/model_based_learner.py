"""Count-based MDP estimate with UCRL2-style upper and lower Q bounds.

Transitions are smoothed as ``(n(s,a,s') + 1) / (n(s,a) + 1)`` and then
renormalised. Small spaces smooth over every state; spaces indexed lazily
smooth over the successors observed so far, so the estimate stays sparse.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from exceptions import ConvergenceError
from policy import ActionPolicy, GaussianBelief, draw_thompson_noise, thompson_from_draws

from .base import Learner, StateRegistry, ThompsonNoise, grown
from .model_free_learner import z_quantile

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITERS = 100_000


@dataclass
class MdpEstimate:
    state_count: int
    action_count: int
    sink: int | None = None
    full_support: bool = True
    n_sa: np.ndarray = field(init=False)
    r_hat: np.ndarray = field(init=False)
    n_sas: dict[tuple[int, int], Counter[int]] = field(init=False, default_factory=dict)

    def __post_init__(self) -> None:
        if self.state_count < 1 or self.action_count < 1:
            raise ValueError(f"need >= 1 state and action, got S={self.state_count!r} A={self.action_count!r}")
        self.n_sa = np.zeros((self.state_count, self.action_count), dtype=np.int64)
        self.r_hat = np.zeros((self.state_count, self.action_count))

    def ensure_states(self, count: int) -> None:
        """Grow to ``count`` states; new states start unvisited."""
        if count <= self.state_count:
            return
        self.n_sa = grown(self.n_sa, count)[:count]
        self.r_hat = grown(self.r_hat, count)[:count]
        self.state_count = count

    def successors(self, s: int, a: int) -> Counter[int]:
        return self.n_sas.get((s, a), Counter())


@dataclass
class QBounds:
    q_hat: np.ndarray
    q_upper: np.ndarray
    q_lower: np.ndarray

    def __post_init__(self) -> None:
        if not (self.q_hat.shape == self.q_upper.shape == self.q_lower.shape):
            raise ValueError("bound tables differ in shape")


def _check_index(model: MdpEstimate, s: int, a: int) -> None:
    if not 0 <= s < model.state_count:
        raise ValueError(f"state {s!r} outside a model of {model.state_count} states")
    if not 0 <= a < model.action_count:
        raise ValueError(f"action {a!r} outside a model of {model.action_count} actions")


def update_model(model: MdpEstimate, s: int, a: int, s_next: int, r: float) -> MdpEstimate:
    _check_index(model, s, a)
    _check_index(model, s_next, 0)
    model.n_sa[s, a] += 1
    model.r_hat[s, a] += (r - model.r_hat[s, a]) / model.n_sa[s, a]
    model.n_sas.setdefault((s, a), Counter())[s_next] += 1
    return model


def _support(model: MdpEstimate, s: int, a: int) -> tuple[np.ndarray, np.ndarray]:
    """Next states and smoothed, renormalised probabilities for one pair."""
    counts = model.successors(s, a)
    if model.full_support:
        raw = np.ones(model.state_count)
        for s_next, count in counts.items():
            raw[s_next] += count
        return np.arange(model.state_count), raw / raw.sum()
    if not counts:
        fallback = s if model.sink is None else model.sink
        return np.array([fallback]), np.ones(1)
    states = np.fromiter(sorted(counts), dtype=np.int64)
    raw = np.array([counts[s_next] + 1.0 for s_next in states])
    return states, raw / raw.sum()


def transition_estimate(model: MdpEstimate, s: int, a: int) -> np.ndarray:
    _check_index(model, s, a)
    states, probs = _support(model, s, a)
    out = np.zeros(model.state_count)
    out[states] = probs
    return out


@dataclass(frozen=True)
class _Entries:
    """Flattened transition estimate: one entry per (pair, next state), grouped by pair."""

    pairs: np.ndarray
    states: np.ndarray
    probs: np.ndarray
    pair_count: int


def _entries(model: MdpEstimate) -> _Entries:
    S, A = model.state_count, model.action_count
    if model.full_support:
        counts = np.zeros((S * A, S))
        for (s, a), successors in model.n_sas.items():
            for s_next, count in successors.items():
                counts[s * A + a, s_next] = count
        raw = counts + 1.0
        probs = raw / raw.sum(axis=1, keepdims=True)
        return _Entries(
            pairs=np.repeat(np.arange(S * A), S),
            states=np.tile(np.arange(S), S * A),
            probs=probs.ravel(),
            pair_count=S * A,
        )
    pair_list: list[np.ndarray] = []
    state_list: list[np.ndarray] = []
    prob_list: list[np.ndarray] = []
    for s in range(S):
        for a in range(A):
            states, probs = _support(model, s, a)
            pair_list.append(np.full(states.size, s * A + a))
            state_list.append(states)
            prob_list.append(probs)
    return _Entries(np.concatenate(pair_list), np.concatenate(state_list), np.concatenate(prob_list), S * A)


def _state_values(q: np.ndarray, sink: int | None) -> np.ndarray:
    v = q.max(axis=1)
    if sink is not None:
        v[sink] = 0.0
    return v


def _expected(entries: _Entries, probs: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.bincount(entries.pairs, weights=probs * values[entries.states], minlength=entries.pair_count)


def solve_q(
    model: MdpEstimate,
    gamma: float,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
    initial: np.ndarray | None = None,
) -> np.ndarray:
    """Value iteration on the estimated model until the sup-norm change drops below ``tol``."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma!r}")
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    return _solve(model, _entries(model), gamma, tol, max_iters, initial)


def _solve(
    model: MdpEstimate, entries: _Entries, gamma: float, tol: float, max_iters: int, initial: np.ndarray | None
) -> np.ndarray:
    shape = model.r_hat.shape
    q = np.zeros(shape) if initial is None else np.array(initial, dtype=np.float64)
    residual = math.inf
    for iteration in range(1, max_iters + 1):
        v = _state_values(q, model.sink)
        q_next = model.r_hat + gamma * _expected(entries, entries.probs, v).reshape(shape)
        if model.sink is not None:
            q_next[model.sink] = 0.0
        residual = float(np.max(np.abs(q_next - q)))
        q = q_next
        if residual < tol:
            logger.debug("value iteration converged in %d sweeps", iteration)
            return q
    raise ConvergenceError(residual, max_iters)


def radii(model: MdpEstimate, s: int, a: int, t: int, delta: float, reward_span: float) -> tuple[float, float]:
    """Reward and L1 transition radii of one pair at total step ``t``."""
    _check_index(model, s, a)
    eps_r, d_l1 = _radii_table(model, t, delta, reward_span)
    return float(eps_r[s, a]), float(d_l1[s, a])


def _radii_table(model: MdpEstimate, t: int, delta: float, reward_span: float) -> tuple[np.ndarray, np.ndarray]:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t!r}")
    S, A = model.state_count, model.action_count
    visits = np.maximum(1, model.n_sa)
    eps_r = reward_span * np.sqrt(7.0 * math.log(2.0 * S * A * t / delta) / (2.0 * visits))
    d_l1 = np.sqrt(14.0 * S * math.log(2.0 * A * t / delta) / visits)
    return eps_r, d_l1


def _shift_mass(
    entries: _Entries, values: np.ndarray, d: np.ndarray, order: np.ndarray
) -> np.ndarray:
    """Entry probabilities moved toward high ``values`` within each pair's L1 ball.

    ``order`` sorts entries by pair, then by value descending. The best entry
    of each pair gains ``min(d/2, 1 - p_best)``; the same mass leaves the
    worst entries first.
    """
    pairs = entries.pairs[order]
    p = entries.probs[order]
    starts = np.flatnonzero(np.r_[True, pairs[1:] != pairs[:-1]])
    ends = np.r_[starts[1:], pairs.size] - 1
    add = np.minimum(d[pairs[starts]] / 2.0, 1.0 - p[starts])

    cumulative = np.cumsum(p)
    segment = np.repeat(np.arange(starts.size), np.diff(np.r_[starts, pairs.size]))
    mass_after = cumulative[ends[segment]] - cumulative
    removed = np.clip(add[segment] - mass_after, 0.0, p)
    removed[starts] = 0.0

    shifted = p - removed
    shifted[starts] += add
    out = np.empty_like(shifted)
    out[order] = shifted
    return out


def _value_order(entries: _Entries, values: np.ndarray) -> np.ndarray:
    return np.lexsort((-values[entries.states], entries.pairs))


def inner_max_l1(values: np.ndarray, p_hat: np.ndarray, d: float) -> np.ndarray:
    """Distribution within L1 distance ``d`` of ``p_hat`` with the highest expected value."""
    values = np.asarray(values, dtype=np.float64)
    p_hat = np.asarray(p_hat, dtype=np.float64)
    if values.shape != p_hat.shape or p_hat.ndim != 1:
        raise ValueError(f"values and p_hat must be vectors of one length, got {values.shape} and {p_hat.shape}")
    if d < 0:
        raise ValueError(f"L1 radius must be >= 0, got {d!r}")
    if np.any(p_hat < 0) or abs(p_hat.sum() - 1.0) > 1e-9:
        raise ValueError("p_hat must be a probability vector")
    entries = _Entries(np.zeros(p_hat.size, dtype=np.int64), np.arange(p_hat.size), p_hat, 1)
    shifted = _shift_mass(entries, values, np.array([d]), _value_order(entries, values))
    return np.clip(shifted, 0.0, 1.0)


class _OrderCache:
    """Re-sorts entries only when the ranking of state values changes."""

    def __init__(self, entries: _Entries) -> None:
        self.entries = entries
        self._ranking: np.ndarray | None = None
        self._order: np.ndarray | None = None

    def order(self, values: np.ndarray) -> np.ndarray:
        ranking = np.argsort(-values, kind="stable")
        if self._order is None or not np.array_equal(ranking, self._ranking):
            self._ranking = ranking
            self._order = _value_order(self.entries, values)
        return self._order


def _extended_sweeps(
    model: MdpEstimate,
    entries: _Entries,
    rewards: np.ndarray,
    d: np.ndarray,
    gamma: float,
    sign: float,
    tol: float,
    max_iters: int,
    initial: np.ndarray,
) -> np.ndarray:
    """Fixed point of the optimistic (sign=+1) or pessimistic (sign=-1) Bellman operator."""
    cache = _OrderCache(entries)
    shape = rewards.shape
    q = initial.copy()
    residual = math.inf
    for _ in range(max_iters):
        v = _state_values(q, model.sink)
        # pessimistic sweeps maximise over the negated values
        signed = sign * v
        probs = _shift_mass(entries, signed, d, cache.order(signed))
        q_next = rewards + gamma * _expected(entries, probs, v).reshape(shape)
        if model.sink is not None:
            q_next[model.sink] = 0.0
        residual = float(np.max(np.abs(q_next - q)))
        q = q_next
        if residual < tol:
            return q
    raise ConvergenceError(residual, max_iters)


def extended_vi(
    model: MdpEstimate,
    gamma: float,
    delta: float,
    t: int,
    tol: float = DEFAULT_TOL,
    reward_span: float = 1.0,
    max_iters: int = DEFAULT_MAX_ITERS,
    initial: QBounds | None = None,
) -> QBounds:
    """Point estimate plus upper and lower Q bounds over the confidence set."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma!r}")
    entries = _entries(model)
    q_hat = _solve(model, entries, gamma, tol, max_iters, None if initial is None else initial.q_hat)
    eps_r, d_l1 = _radii_table(model, t, delta, reward_span)
    d = d_l1.ravel()
    upper_start = q_hat if initial is None else np.maximum(initial.q_upper, q_hat)
    lower_start = q_hat if initial is None else np.minimum(initial.q_lower, q_hat)
    q_upper = _extended_sweeps(model, entries, model.r_hat + eps_r, d, gamma, 1.0, tol, max_iters, upper_start)
    q_lower = _extended_sweeps(model, entries, model.r_hat - eps_r, d, gamma, -1.0, tol, max_iters, lower_start)
    # both fixed points are only tol-accurate
    return QBounds(q_hat=q_hat, q_upper=np.maximum(q_upper, q_hat), q_lower=np.minimum(q_lower, q_hat))


def mb_belief(bounds: QBounds, s: int, a: int, z_quantile: float) -> GaussianBelief:
    if z_quantile <= 0:
        raise ValueError(f"z_quantile must be > 0, got {z_quantile!r}")
    width = float(bounds.q_upper[s, a] - bounds.q_lower[s, a])
    return GaussianBelief(mean=float(bounds.q_hat[s, a]), std=max(width, 0.0) / (2.0 * z_quantile))


@dataclass
class ModelBasedSettings:
    gamma: float = 0.95
    delta: float = 0.05
    reward_span: float = 1.0
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    refresh: str = "episode"
    sample_count: int = 4096
    dense_limit: int = 1000

    def __post_init__(self) -> None:
        if self.refresh not in ("episode", "step"):
            raise ValueError(f"refresh must be 'episode' or 'step', got {self.refresh!r}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")


class ModelBasedLearner(Learner):
    """Estimated MDP of one tabular space, solved into Q bounds between refreshes."""

    def __init__(self, action_count: int, space_size: int, settings: ModelBasedSettings) -> None:
        super().__init__(action_count)
        self.settings = settings
        self.registry = StateRegistry(space_size, settings.dense_limit)
        self.model = MdpEstimate(
            self.registry.row_count, action_count, sink=StateRegistry.SINK, full_support=self.registry.dense
        )
        self.z = z_quantile(settings.delta)
        self.steps = 0
        self.bounds: QBounds | None = None
        self._prior_half_width = settings.reward_span / (1.0 - settings.gamma)

    def _row(self, state: int) -> int:
        row = self.registry.row(state)
        self.model.ensure_states(self.registry.row_count)
        return row

    def refresh(self) -> QBounds:
        initial = None
        if self.bounds is not None:
            rows = self.model.state_count
            initial = QBounds(
                q_hat=grown(self.bounds.q_hat, rows)[:rows],
                q_upper=grown(self.bounds.q_upper, rows)[:rows],
                q_lower=grown(self.bounds.q_lower, rows)[:rows],
            )
        s = self.settings
        self.bounds = extended_vi(
            self.model, s.gamma, s.delta, max(1, self.steps), s.tol, s.reward_span, s.max_iters, initial
        )
        logger.debug("refreshed bounds over %d states at step %d", self.model.state_count, self.steps)
        return self.bounds

    def _beliefs(self, row: int) -> tuple[np.ndarray, np.ndarray]:
        if self.bounds is None:
            self.refresh()
        bounds = self.bounds
        if row >= bounds.q_hat.shape[0]:
            # first seen since the last refresh
            return np.zeros(self.action_count), np.full(self.action_count, self._prior_half_width / self.z)
        beliefs = [mb_belief(bounds, row, a, self.z) for a in range(self.action_count)]
        return np.array([b.mean for b in beliefs]), np.array([b.std for b in beliefs])

    def action_values(self, state: int) -> np.ndarray:
        means, _ = self._beliefs(self._row(state))
        return means

    def thompson_policy(self, state: int, rng: np.random.Generator, noise: ThompsonNoise | None = None) -> ActionPolicy:
        means, stds = self._beliefs(self._row(state))
        if noise is None:
            noise = draw_thompson_noise(rng, self.settings.sample_count, self.action_count)
        return thompson_from_draws(means, stds, *noise)

    def observe(self, state: int, action: int, reward: float, next_state: int, terminal: bool) -> None:
        row = self._row(state)
        next_row = StateRegistry.SINK if terminal else self._row(next_state)
        update_model(self.model, row, action, next_row, reward)
        self.steps += 1
        if self.settings.refresh == "step":
            self.refresh()

    def end_episode(self, truncated: bool) -> None:
        if self.settings.refresh == "episode":
            self.refresh()
