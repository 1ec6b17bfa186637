from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from policy import ActionPolicy

from .base import Learner, ThompsonNoise
from .qnet import DEFAULT_DROPOUT_PASSES, Batch, Mlp, ReplayBuffer, dropout_ts, forward, train_step

logger = logging.getLogger(__name__)


@dataclass
class NetworkSettings:
    gamma: float = 0.95
    learning_rate: float = 1e-3
    batch_size: int = 32
    warmup: int = 500
    replay_capacity: int = 10_000
    dropout_passes: int = DEFAULT_DROPOUT_PASSES

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size!r}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate!r}")


class NetworkLearner(Learner):
    """Dropout Q-network behind one feature space, trained by one-step Q-learning from replay.

    With a shared buffer the learner trains on the full observations stored
    by its agent, reading only ``columns``; otherwise it stores the projected
    observations it is given.
    """

    def __init__(
        self,
        net: Mlp,
        settings: NetworkSettings,
        rng: np.random.Generator,
        shared_buffer: ReplayBuffer | None = None,
        columns: np.ndarray | None = None,
    ) -> None:
        super().__init__(net.action_count)
        self.net = net
        self.settings = settings
        self.rng = rng
        self.owns_buffer = shared_buffer is None
        self.buffer = ReplayBuffer(settings.replay_capacity, net.input_size) if shared_buffer is None else shared_buffer
        self.columns = columns
        self.steps = 0
        self.last_loss: float | None = None

    def action_values(self, state: np.ndarray) -> np.ndarray:
        return forward(self.net, state)

    def thompson_policy(self, state: np.ndarray, rng: np.random.Generator, noise: ThompsonNoise | None = None) -> ActionPolicy:
        return dropout_ts(self.net, state, self.settings.dropout_passes, rng)

    def _sample(self) -> Batch:
        batch = self.buffer.sample(self.settings.batch_size, self.rng)
        if self.owns_buffer or self.columns is None:
            return batch
        return Batch(
            batch.observations[:, self.columns],
            batch.actions,
            batch.rewards,
            batch.next_observations[:, self.columns],
            batch.terminals,
        )

    def observe(self, state: np.ndarray, action: int, reward: float, next_state: np.ndarray, terminal: bool) -> None:
        if self.owns_buffer:
            self.buffer.push(state, action, reward, next_state, terminal)
        self.steps += 1
        s = self.settings
        if self.steps < s.warmup or len(self.buffer) < s.batch_size:
            return
        _, self.last_loss = train_step(self.net, self._sample(), s.gamma, s.learning_rate, self.rng)
        if self.steps % 1000 == 0:
            logger.debug("step %d loss %.5f", self.steps, self.last_loss)
