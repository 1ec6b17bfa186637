from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np


@dataclass(frozen=True)
class Subspace:
    """One state transform: the main space (identity) or a projection of it.

    Tabular spaces map a state onto an id in ``range(size)``; vector spaces
    select ``columns`` of the observation.
    """

    name: str
    project: Callable[[Any], Any]
    size: int | None = None
    columns: np.ndarray | None = None

    @property
    def tabular(self) -> bool:
        return self.size is not None


class Environment(ABC):
    """Episodic environment driven by an explicit random generator."""

    @property
    @abstractmethod
    def action_count(self) -> int:
        raise NotImplementedError

    @property
    @abstractmethod
    def reward_range(self) -> tuple[float, float]:
        """Smallest and largest reward a single step can produce."""
        raise NotImplementedError

    @abstractmethod
    def reset(self, rng: np.random.Generator) -> Any:
        raise NotImplementedError

    @abstractmethod
    def step(self, state: Any, action: int, rng: np.random.Generator) -> tuple[Any, float, bool]:
        """``(next_state, reward, terminal)``."""
        raise NotImplementedError

    @abstractmethod
    def spaces(self) -> list[Subspace]:
        """Main space first, then the subspaces."""
        raise NotImplementedError

    @property
    def reward_span(self) -> float:
        low, high = self.reward_range
        return high - low
