"""Continuous food/poison world sensed through a fan of rays.

Every agent has ``eye_count`` eyes spread over its field of view. Each eye
reports, per kind (wall, food, poison), the distance to the nearest hit over
the eye range: 1.0 means nothing in range, 0.0 means touching. Items never
occlude walls; walls occlude items. Agents do not see or block each other.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .base import Subspace

logger = logging.getLogger(__name__)

WALL, FOOD, POISON = 0, 1, 2
KINDS = ("wall", "food", "poison")
ACTION_NAMES = ("forward", "small-left", "small-right", "large-left", "large-right")
FOOD_REWARD = 5.0
POISON_REWARD = -6.0
STRAIGHT_THRESHOLD = 0.75
STRAIGHT_FACTOR = 0.1
MAX_PLACEMENT_TRIES = 10_000


@dataclass(frozen=True)
class WorldConfig:
    width: float = 700.0
    height: float = 500.0
    eye_count: int = 9
    fov_degrees: float = 120.0
    eye_range: float = 85.0
    speed: float = 3.0
    small_turn_degrees: float = 15.0
    large_turn_degrees: float = 45.0
    item_radius: float = 10.0
    agent_radius: float = 10.0
    food: int = 50
    poison: int = 50

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"world bounds must be positive, got {self.width!r}x{self.height!r}")
        if self.eye_count < 1 or self.eye_range <= 0:
            raise ValueError("need at least one eye with a positive range")
        if self.food < 0 or self.poison < 0:
            raise ValueError("item counts must be >= 0")

    @property
    def observation_size(self) -> int:
        return self.eye_count * len(KINDS)

    def turn(self, action: int) -> float:
        """Heading change of ``action`` in radians (left is positive)."""
        if not 0 <= action < len(ACTION_NAMES):
            raise ValueError(f"action must be in 0..{len(ACTION_NAMES) - 1}, got {action!r}")
        degrees = (0.0, self.small_turn_degrees, -self.small_turn_degrees, self.large_turn_degrees, -self.large_turn_degrees)
        return math.radians(degrees[action])


@dataclass
class AgentBody:
    position: np.ndarray
    heading: float


@dataclass
class World:
    config: WorldConfig
    walls: np.ndarray
    item_positions: np.ndarray
    item_kinds: np.ndarray
    agents: list[AgentBody] = field(default_factory=list)

    @classmethod
    def create(
        cls,
        config: WorldConfig,
        interior_walls: Sequence[tuple[float, float, float, float]],
        agent_count: int,
        rng: np.random.Generator,
    ) -> World:
        """Bounded world with items and agents placed uniformly in free space."""
        w, h = config.width, config.height
        border = [(0.0, 0.0, w, 0.0), (w, 0.0, w, h), (w, h, 0.0, h), (0.0, h, 0.0, 0.0)]
        walls = np.array(border + [tuple(map(float, wall)) for wall in interior_walls], dtype=np.float64)
        kinds = np.array([FOOD] * config.food + [POISON] * config.poison, dtype=np.int64)
        world = cls(config, walls, np.zeros((kinds.size, 2)), kinds)
        for i in range(kinds.size):
            world.item_positions[i] = world.free_point(config.item_radius, rng)
        for _ in range(agent_count):
            world.agents.append(AgentBody(world.free_point(config.agent_radius, rng), float(rng.uniform(0, 2 * math.pi))))
        return world

    def free_point(self, clearance: float, rng: np.random.Generator) -> np.ndarray:
        c = self.config
        for _ in range(MAX_PLACEMENT_TRIES):
            point = rng.uniform((clearance, clearance), (c.width - clearance, c.height - clearance))
            if wall_distances(point, self.walls).min() >= clearance:
                return point
        raise RuntimeError(f"no free point with clearance {clearance} after {MAX_PLACEMENT_TRIES} tries")


@dataclass(frozen=True)
class StepOutcome:
    observation: np.ndarray
    proximity_reward: float
    straight_reward: float
    digestion_reward: float

    @property
    def reward(self) -> float:
        return self.proximity_reward + self.straight_reward + self.digestion_reward


def _cross(ax: np.ndarray, ay: np.ndarray, bx: np.ndarray, by: np.ndarray) -> np.ndarray:
    return ax * by - ay * bx


def wall_distances(point: np.ndarray, walls: np.ndarray) -> np.ndarray:
    """Distance from ``point`` to every wall segment."""
    a, b = walls[:, :2], walls[:, 2:]
    edge = b - a
    length_sq = np.einsum("ij,ij->i", edge, edge)
    u = np.clip(np.einsum("ij,ij->i", point - a, edge) / np.where(length_sq > 0, length_sq, 1.0), 0.0, 1.0)
    closest = a + u[:, None] * edge
    return np.linalg.norm(point - closest, axis=1)


def _ray_wall_hits(origin: np.ndarray, directions: np.ndarray, walls: np.ndarray, max_range: float) -> np.ndarray:
    """Nearest wall distance along each ray, ``inf`` when nothing is in range."""
    a = walls[:, :2]
    edge = walls[:, 2:] - a
    offset = a - origin
    dx, dy = directions[:, :1], directions[:, 1:]
    denom = _cross(dx, dy, edge[None, :, 0], edge[None, :, 1])
    safe = np.where(np.abs(denom) > 1e-12, denom, np.nan)
    t = _cross(offset[None, :, 0], offset[None, :, 1], edge[None, :, 0], edge[None, :, 1]) / safe
    u = _cross(offset[None, :, 0], offset[None, :, 1], dx, dy) / safe
    with np.errstate(invalid="ignore"):
        valid = (t >= 0) & (t <= max_range) & (u >= 0) & (u <= 1)
    return np.where(valid, t, np.inf).min(axis=1)


def _ray_circle_hits(origin: np.ndarray, directions: np.ndarray, centres: np.ndarray, radius: float, max_range: float) -> np.ndarray:
    """Distance along each ray to each circle, ``inf`` on a miss; 0 when the origin is inside."""
    offset = centres - origin
    along = directions @ offset.T
    miss_sq = np.einsum("ij,ij->i", offset, offset)[None, :] - along * along
    half = np.sqrt(np.maximum(radius * radius - miss_sq, 0.0))
    near, far = along - half, along + half
    hit = (miss_sq <= radius * radius) & (far >= 0)
    t = np.maximum(near, 0.0)
    return np.where(hit & (t <= max_range), t, np.inf)


def eye_directions(config: WorldConfig, heading: float) -> np.ndarray:
    half = math.radians(config.fov_degrees) / 2.0
    angles = heading + (np.linspace(-half, half, config.eye_count) if config.eye_count > 1 else np.zeros(1))
    return np.column_stack((np.cos(angles), np.sin(angles)))


def sense_point(
    config: WorldConfig,
    walls: np.ndarray,
    item_positions: np.ndarray,
    item_kinds: np.ndarray,
    position: np.ndarray,
    heading: float,
) -> np.ndarray:
    """Observation of an eye fan at ``position``, laid out as ``eye * 3 + kind``."""
    directions = eye_directions(config, heading)
    distances = np.full((config.eye_count, len(KINDS)), np.inf)
    distances[:, WALL] = _ray_wall_hits(position, directions, walls, config.eye_range)
    if item_positions.size:
        item_hits = _ray_circle_hits(position, directions, item_positions, config.item_radius, config.eye_range)
        # an item behind a wall is hidden
        item_hits = np.where(item_hits <= distances[:, WALL : WALL + 1], item_hits, np.inf)
        for kind in (FOOD, POISON):
            columns = item_hits[:, item_kinds == kind]
            if columns.size:
                distances[:, kind] = columns.min(axis=1)
    proximity = np.where(np.isfinite(distances), distances / config.eye_range, 1.0)
    return np.clip(proximity, 0.0, 1.0).ravel()


def sense(world: World, agent: int) -> np.ndarray:
    body = world.agents[agent]
    return sense_point(world.config, world.walls, world.item_positions, world.item_kinds, body.position, body.heading)


def _digest(world: World, agent: int, rng: np.random.Generator) -> float:
    """Eat every item touching the agent; eaten items respawn at once."""
    c = world.config
    body = world.agents[agent]
    reach = c.item_radius + c.agent_radius
    gap = np.linalg.norm(world.item_positions - body.position, axis=1)
    reward = 0.0
    for i in np.flatnonzero(gap <= reach):
        reward += FOOD_REWARD if world.item_kinds[i] == FOOD else POISON_REWARD
        world.item_positions[i] = world.free_point(c.item_radius, rng)
        logger.debug("agent %d ate %s, respawned at %s", agent, KINDS[world.item_kinds[i]], world.item_positions[i])
    return reward


def _move(world: World, agent: int, action: int) -> None:
    c = world.config
    body = world.agents[agent]
    body.heading = (body.heading + c.turn(action)) % (2 * math.pi)
    target = body.position + c.speed * np.array([math.cos(body.heading), math.sin(body.heading)])
    if wall_distances(target, world.walls).min() >= c.agent_radius:
        body.position = target


def cont_step(world: World, agent: int, action: int, rng: np.random.Generator) -> StepOutcome:
    """Turn, advance unless a wall is in the way, eat, then sense the new surroundings."""
    _move(world, agent, action)
    digestion = _digest(world, agent, rng)
    observation = sense(world, agent)
    return _outcome(world.config, observation, action, digestion)


def _outcome(config: WorldConfig, observation: np.ndarray, action: int, digestion: float) -> StepOutcome:
    proximity = float(observation[WALL :: len(KINDS)].mean())
    straight = STRAIGHT_FACTOR * proximity if action == 0 and proximity > STRAIGHT_THRESHOLD else 0.0
    return StepOutcome(observation, proximity, straight, digestion)


def multi_agent_tick(
    world: World,
    policies: Sequence[Callable[[np.ndarray], int]],
    rng: np.random.Generator,
) -> list[tuple[np.ndarray, int, StepOutcome]]:
    """Advance every agent once, in list order.

    All agents choose on their observation at the start of the tick; moves and
    item consumption are then processed agent by agent.
    """
    if len(policies) != len(world.agents):
        raise ValueError(f"got {len(policies)} policies for {len(world.agents)} agents")
    observations = [sense(world, i) for i in range(len(world.agents))]
    actions = [int(policy(obs)) for policy, obs in zip(policies, observations)]
    digestion = []
    for i, action in enumerate(actions):
        _move(world, i, action)
        digestion.append(_digest(world, i, rng))
    return [
        (observations[i], actions[i], _outcome(world.config, sense(world, i), actions[i], digestion[i]))
        for i in range(len(world.agents))
    ]


def cont_subspaces(config: WorldConfig | None = None) -> list[Subspace]:
    config = config or WorldConfig()
    spaces = []
    for kind, name in enumerate(KINDS):
        columns = np.arange(kind, config.observation_size, len(KINDS))
        spaces.append(Subspace(name, lambda obs, columns=columns: np.asarray(obs)[columns], columns=columns))
    return spaces


def cont_spaces(config: WorldConfig | None = None) -> list[Subspace]:
    return [Subspace("main", lambda obs: np.asarray(obs)), *cont_subspaces(config)]
