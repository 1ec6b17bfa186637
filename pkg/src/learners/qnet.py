"""Fully connected Q-network in numpy with inverted dropout on the hidden layers."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from policy import ActionPolicy, thompson_from_dropout

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"FQN1"
DEFAULT_DROPOUT_PASSES = 100


@dataclass
class Mlp:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    dropout_rate: float = 0.0

    def __post_init__(self) -> None:
        if len(self.layer_sizes) < 2:
            raise ValueError(f"need at least input and output sizes, got {self.layer_sizes!r}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout rate must lie in [0, 1), got {self.dropout_rate!r}")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[i], self.layer_sizes[i + 1])
            if w.shape != expected or b.shape != (expected[1],):
                raise ValueError(f"layer {i} has shapes {w.shape}/{b.shape}, expected {expected}")

    @classmethod
    def initialise(cls, layer_sizes: Sequence[int], dropout_rate: float, rng: np.random.Generator) -> Mlp:
        """Glorot-uniform weights, zero biases."""
        sizes = tuple(int(n) for n in layer_sizes)
        weights = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases = [np.zeros(n) for n in sizes[1:]]
        return cls(sizes, weights, biases, dropout_rate)

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def action_count(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list[np.ndarray]:
        """Weights and biases interleaved layer by layer (views, not copies)."""
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def copy(self) -> Mlp:
        return Mlp(self.layer_sizes, [w.copy() for w in self.weights], [b.copy() for b in self.biases], self.dropout_rate)


@dataclass(frozen=True)
class Batch:
    observations: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_observations: np.ndarray
    terminals: np.ndarray

    def __len__(self) -> int:
        return self.actions.size


class ReplayBuffer:
    """Fixed-capacity ring of transitions."""

    def __init__(self, capacity: int, observation_size: int) -> None:
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity!r}")
        self.capacity = capacity
        self.observations = np.zeros((capacity, observation_size))
        self.next_observations = np.zeros((capacity, observation_size))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.terminals = np.zeros(capacity, dtype=bool)
        self._cursor = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, observation: np.ndarray, action: int, reward: float, next_observation: np.ndarray, terminal: bool) -> None:
        i = self._cursor
        self.observations[i] = observation
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_observations[i] = next_observation
        self.terminals[i] = terminal
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        if batch_size < 1 or self._size < batch_size:
            raise ValueError(f"cannot sample {batch_size} transitions from a buffer holding {self._size}")
        idx = rng.integers(0, self._size, size=batch_size)
        return Batch(
            self.observations[idx],
            self.actions[idx],
            self.rewards[idx],
            self.next_observations[idx],
            self.terminals[idx],
        )


def _as_batch(net: Mlp, x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != net.input_size:
        raise ValueError(f"expected observations of length {net.input_size}, got shape {x.shape}")
    return batch, single


def _masks(net: Mlp, rows: int, rng: np.random.Generator | None) -> list[np.ndarray | None]:
    """Scaled keep-masks for every hidden layer, or ``None`` when dropout is off."""
    hidden = net.layer_sizes[1:-1]
    if rng is None or net.dropout_rate == 0.0:
        return [None] * len(hidden)
    keep = 1.0 - net.dropout_rate
    return [(rng.random((rows, n)) < keep) / keep for n in hidden]


def _forward(net: Mlp, batch: np.ndarray, masks: list[np.ndarray | None]) -> tuple[np.ndarray, list[np.ndarray], list[np.ndarray]]:
    """Output plus the layer inputs and tanh activations kept for backprop."""
    inputs: list[np.ndarray] = []
    activations: list[np.ndarray] = []
    a = batch
    for w, b, mask in zip(net.weights[:-1], net.biases[:-1], masks):
        inputs.append(a)
        h = np.tanh(a @ w + b)
        activations.append(h)
        a = h if mask is None else h * mask
    inputs.append(a)
    return a @ net.weights[-1] + net.biases[-1], inputs, activations


def forward(net: Mlp, x: np.ndarray, dropout_on: bool = False, rng: np.random.Generator | None = None) -> np.ndarray:
    """Action values for one observation (or a batch of them)."""
    batch, single = _as_batch(net, x)
    if dropout_on and rng is None and net.dropout_rate > 0:
        raise ValueError("dropout needs an rng")
    q, _, _ = _forward(net, batch, _masks(net, batch.shape[0], rng if dropout_on else None))
    return q[0] if single else q


def dropout_ts(net: Mlp, x: np.ndarray, passes: int, rng: np.random.Generator) -> ActionPolicy:
    """Thompson policy from argmax counts over ``passes`` dropout forwards, run as one batch."""
    if passes < 1:
        raise ValueError(f"passes must be >= 1, got {passes!r}")
    batch, single = _as_batch(net, x)
    if not single:
        raise ValueError("dropout_ts takes a single observation")
    q, _, _ = _forward(net, np.repeat(batch, passes, axis=0), _masks(net, passes, rng))
    wins = np.bincount(np.argmax(q, axis=1), minlength=net.action_count)
    return thompson_from_dropout(wins, passes)


def loss_and_gradients(
    net: Mlp,
    observations: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
    masks: list[np.ndarray | None] | None = None,
) -> tuple[float, list[np.ndarray]]:
    """Mean ``0.5 * (Q(s,a) - y)**2`` and its gradient, ordered like ``net.parameters()``."""
    batch, _ = _as_batch(net, observations)
    rows = batch.shape[0]
    if masks is None:
        masks = [None] * (len(net.layer_sizes) - 2)
    q, inputs, activations = _forward(net, batch, masks)
    index = np.arange(rows)
    error = q[index, actions] - targets
    loss = float(0.5 * np.mean(error * error))

    grad_out = np.zeros_like(q)
    grad_out[index, actions] = error / rows
    grads: list[np.ndarray] = []
    upstream = grad_out
    for layer in range(len(net.weights) - 1, -1, -1):
        grads.append(upstream.sum(axis=0))
        grads.append(inputs[layer].T @ upstream)
        if layer == 0:
            break
        back = upstream @ net.weights[layer].T
        mask = masks[layer - 1]
        if mask is not None:
            back = back * mask
        h = activations[layer - 1]
        upstream = back * (1.0 - h * h)
    grads.reverse()
    return loss, grads


def q_targets(net: Mlp, batch: Batch, gamma: float) -> np.ndarray:
    """``r + gamma * max_a' Q(s', a')`` with dropout off; ``r`` alone on terminal transitions."""
    bootstrap = forward(net, batch.next_observations).max(axis=1)
    return batch.rewards + gamma * np.where(batch.terminals, 0.0, bootstrap)


def train_step(
    net: Mlp,
    batch: Batch,
    gamma: float,
    learning_rate: float,
    rng: np.random.Generator | None = None,
) -> tuple[Mlp, float]:
    """One SGD step on the batch; dropout is applied to the online pass when ``rng`` is given."""
    if len(batch) == 0:
        raise ValueError("batch must be non-empty")
    targets = q_targets(net, batch, gamma)
    masks = _masks(net, len(batch), rng)
    loss, grads = loss_and_gradients(net, batch.observations, batch.actions, targets, masks)
    for param, grad in zip(net.parameters(), grads):
        param -= learning_rate * grad
    return net, loss


def save_checkpoint(net: Mlp, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    sizes = np.array([len(net.layer_sizes), *net.layer_sizes], dtype="<u4")
    params = np.concatenate([p.ravel() for p in net.parameters()]).astype("<f8")
    path.write_bytes(CHECKPOINT_MAGIC + sizes.tobytes() + params.tobytes())
    logger.info("wrote checkpoint %s (%d parameters)", path, params.size)


def load_checkpoint(path: Path, dropout_rate: float = 0.0) -> Mlp:
    data = path.read_bytes()
    if data[:4] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path} is not a Q-network checkpoint")
    count = int(np.frombuffer(data, dtype="<u4", count=1, offset=4)[0])
    sizes = tuple(int(n) for n in np.frombuffer(data, dtype="<u4", count=count, offset=8))
    offset = 8 + 4 * count
    flat = np.frombuffer(data, dtype="<f8", offset=offset).astype(np.float64)
    expected = sum(i * o + o for i, o in zip(sizes[:-1], sizes[1:]))
    if flat.size != expected:
        raise ValueError(f"{path} holds {flat.size} parameters, layer sizes {sizes} need {expected}")
    weights, biases = [], []
    cursor = 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(flat[cursor : cursor + fan_in * fan_out].reshape(fan_in, fan_out).copy())
        cursor += fan_in * fan_out
        biases.append(flat[cursor : cursor + fan_out].copy())
        cursor += fan_out
    return Mlp(sizes, weights, biases, dropout_rate)
