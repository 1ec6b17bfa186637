"""Stochastic 2-D grid maze with noisy moves and mixture-distributed rewards."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .base import Environment, Subspace
from .rewards import MAZE_GOAL, MAZE_STEP, MAZE_WALL

BARRIER, EMPTY, GOAL = "#", ".", "G"
ACTION_NAMES = ("up", "right", "down", "left")
MOVES = ((0, -1), (1, 0), (0, 1), (-1, 0))
SLIP_PROBABILITY = 0.1


@dataclass(frozen=True)
class MazeState:
    x: int
    y: int


@dataclass(frozen=True)
class MazeSpec:
    rows: tuple[str, ...]
    name: str = "maze"

    def __post_init__(self) -> None:
        if not self.rows or not self.rows[0]:
            raise ValueError("maze has no cells")
        width = len(self.rows[0])
        for y, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"maze row {y} has {len(row)} cells, expected {width}")
            unknown = set(row) - {BARRIER, EMPTY, GOAL}
            if unknown:
                raise ValueError(f"maze row {y} has unknown cells {sorted(unknown)!r}")
        border = self.rows[0] + self.rows[-1] + "".join(row[0] + row[-1] for row in self.rows)
        if set(border) != {BARRIER}:
            raise ValueError("maze border must be all barrier")
        cells = "".join(self.rows)
        if GOAL not in cells:
            raise ValueError("maze needs at least one goal")
        if EMPTY not in cells:
            raise ValueError("maze needs at least one empty cell")

    @property
    def width(self) -> int:
        return len(self.rows[0])

    @property
    def height(self) -> int:
        return len(self.rows)

    def cell(self, x: int, y: int) -> str:
        return self.rows[y][x]

    @cached_property
    def start_cells(self) -> tuple[MazeState, ...]:
        return tuple(
            MazeState(x, y) for y in range(self.height) for x in range(self.width) if self.cell(x, y) == EMPTY
        )

    def state_id(self, state: MazeState) -> int:
        return state.y * self.width + state.x

    def check(self, state: MazeState) -> None:
        if not (0 <= state.x < self.width and 0 <= state.y < self.height):
            raise ValueError(f"{state!r} lies outside a {self.width}x{self.height} maze")
        if self.cell(state.x, state.y) == BARRIER:
            raise ValueError(f"{state!r} sits on a barrier")


def _move(spec: MazeSpec, state: MazeState, direction: int) -> tuple[MazeState, bool]:
    dx, dy = MOVES[direction]
    target = MazeState(state.x + dx, state.y + dy)
    if spec.cell(target.x, target.y) == BARRIER:
        return state, True
    return target, False


def maze_step(
    spec: MazeSpec,
    state: MazeState,
    action: int,
    rng: np.random.Generator,
    slip: float = SLIP_PROBABILITY,
) -> tuple[MazeState, float, bool]:
    spec.check(state)
    if not 0 <= action < len(MOVES):
        raise ValueError(f"maze action must be in 0..3, got {action!r}")
    direction = int(rng.integers(len(MOVES))) if rng.random() < slip else action
    next_state, hit_wall = _move(spec, state, direction)
    reward = MAZE_STEP.sample(rng)
    if hit_wall:
        reward += MAZE_WALL.sample(rng)
    terminal = spec.cell(next_state.x, next_state.y) == GOAL
    if terminal:
        reward += MAZE_GOAL.sample(rng)
    return next_state, reward, terminal


def maze_subspaces(spec: MazeSpec) -> list[Subspace]:
    return [
        Subspace("X", lambda s: s.x, size=spec.width),
        Subspace("Y", lambda s: s.y, size=spec.height),
    ]


def optimal_q(spec: MazeSpec, gamma: float, slip: float = SLIP_PROBABILITY, tol: float = 1e-10) -> np.ndarray:
    """Q-values of the true maze MDP by value iteration, indexed ``[state_id, action]``.

    Barrier and goal rows stay zero; entering a goal ends the episode.
    """
    n_states, n_actions = spec.width * spec.height, len(MOVES)
    step_mean, wall_mean, goal_mean = MAZE_STEP.mean(), MAZE_WALL.mean(), MAZE_GOAL.mean()
    transitions: list[tuple[int, int, float, int, float]] = []
    for state in spec.start_cells:
        for action in range(n_actions):
            for direction in range(n_actions):
                p = (1.0 - slip) * (direction == action) + slip / n_actions
                target, hit = _move(spec, state, direction)
                goal = spec.cell(target.x, target.y) == GOAL
                reward = step_mean + hit * wall_mean + goal * goal_mean
                continue_to = -1 if goal else spec.state_id(target)
                transitions.append((spec.state_id(state), action, p, continue_to, reward))
    s_idx, a_idx, probs, next_idx, rewards = (np.array(column) for column in zip(*transitions))
    s_idx, a_idx, next_idx = s_idx.astype(int), a_idx.astype(int), next_idx.astype(int)
    continuing = next_idx >= 0
    q = np.zeros((n_states, n_actions))
    while True:
        v = q.max(axis=1)
        q_next = np.zeros_like(q)
        bootstrap = np.where(continuing, v[np.maximum(next_idx, 0)], 0.0)
        np.add.at(q_next, (s_idx, a_idx), probs * (rewards + gamma * bootstrap))
        if np.max(np.abs(q_next - q)) < tol:
            return q_next
        q = q_next


def greedy_policy(spec: MazeSpec, q: np.ndarray) -> dict[MazeState, int]:
    return {state: int(np.argmax(q[spec.state_id(state)])) for state in spec.start_cells}


class MazeEnvironment(Environment):
    def __init__(self, spec: MazeSpec, slip: float = SLIP_PROBABILITY) -> None:
        if not 0.0 <= slip <= 1.0:
            raise ValueError(f"slip must be between 0.0 and 1.0, got {slip!r}")
        self.spec = spec
        self.slip = slip

    @property
    def action_count(self) -> int:
        return len(MOVES)

    @property
    def reward_range(self) -> tuple[float, float]:
        return MAZE_STEP.low + MAZE_WALL.low, MAZE_STEP.high + MAZE_GOAL.high

    def reset(self, rng: np.random.Generator) -> MazeState:
        starts: Sequence[MazeState] = self.spec.start_cells
        return starts[int(rng.integers(len(starts)))]

    def step(self, state: MazeState, action: int, rng: np.random.Generator) -> tuple[MazeState, float, bool]:
        return maze_step(self.spec, state, action, rng, self.slip)

    def spaces(self) -> list[Subspace]:
        main = Subspace("main", self.spec.state_id, size=self.spec.width * self.spec.height)
        return [main, *maze_subspaces(self.spec)]
