from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any

import numpy as np

from policy import ActionPolicy

ThompsonNoise = tuple[np.ndarray, np.ndarray]


class Learner(ABC):
    """Value learner behind one space (main space or subspace).

    States handed to a learner are already projected into its space.
    """

    def __init__(self, action_count: int) -> None:
        if action_count < 1:
            raise ValueError(f"action_count must be >= 1, got {action_count!r}")
        self.action_count = action_count

    @abstractmethod
    def thompson_policy(self, state: Any, rng: np.random.Generator, noise: ThompsonNoise | None = None) -> ActionPolicy:
        """Probability of each action being optimal in ``state`` (not yet floored)."""
        raise NotImplementedError

    @abstractmethod
    def action_values(self, state: Any) -> np.ndarray:
        """Point estimate of every action value in ``state``."""
        raise NotImplementedError

    @abstractmethod
    def observe(self, state: Any, action: int, reward: float, next_state: Any, terminal: bool) -> None:
        raise NotImplementedError

    def end_episode(self, truncated: bool) -> None:
        """Hook called once after the last transition of every episode."""
        return None


class StateRegistry:
    """Maps abstract state ids onto table rows.

    Row 0 is reserved for the absorbing terminal sink. Spaces up to
    ``dense_limit`` states get a fixed row per id; larger spaces allocate rows
    on first sight, so tables only grow with the states actually visited.
    """

    SINK = 0

    def __init__(self, size: int, dense_limit: int) -> None:
        if size < 1:
            raise ValueError(f"space size must be >= 1, got {size!r}")
        self.size = size
        self.dense = size <= dense_limit
        self._rows: dict[int, int] = {}

    @property
    def row_count(self) -> int:
        return self.size + 1 if self.dense else len(self._rows) + 1

    def row(self, state_id: int) -> int:
        state_id = int(state_id)
        if not 0 <= state_id < self.size:
            raise ValueError(f"state id {state_id} outside a space of {self.size} states")
        if self.dense:
            return state_id + 1
        row = self._rows.get(state_id)
        if row is None:
            row = len(self._rows) + 1
            self._rows[state_id] = row
        return row


def grown(array: np.ndarray, rows: int) -> np.ndarray:
    """``array`` zero-padded along its leading axis to hold at least ``rows`` rows."""
    if array.shape[0] >= rows:
        return array
    capacity = max(rows, 2 * array.shape[0])
    shape = (capacity,) + array.shape[1:]
    out = np.zeros(shape, dtype=array.dtype)
    out[: array.shape[0]] = array
    return out
