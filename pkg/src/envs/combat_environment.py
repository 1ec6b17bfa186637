"""Grid skirmish against stationary enemies, scored by hitpoint exchange.

Actions, for ``E`` enemies: ``0..E-1`` step toward enemy ``i``, ``E`` step
back toward the start cell, ``E+1..2E`` shoot enemy ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import Environment, Subspace
from .rewards import COMBAT_BAD_SHOT, COMBAT_GOAL, COMBAT_WALL

STEP_COST = 1.0
HITPOINT_WEIGHT = 10.0


@dataclass(frozen=True)
class CombatState:
    x: int
    y: int
    hp: int
    enemy_hp: tuple[int, ...]


@dataclass(frozen=True)
class CombatSpec:
    enemies: tuple[tuple[int, int], ...]
    width: int = 16
    height: int = 16
    start: tuple[int, int] = (0, 0)
    agent_hp: int = 100
    enemy_hp: int = 100
    damage: int = 25
    enemy_damage: int = 25
    theta_e: int = 3
    attack_range: int = 2
    name: str = "combat"

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        if not self.enemies:
            raise ValueError("combat needs at least one enemy")
        for where in (self.start, *self.enemies):
            if not self.on_grid(*where):
                raise ValueError(f"position {where!r} is off the {self.width}x{self.height} grid")
        if len(set(self.enemies)) != len(self.enemies) or self.start in self.enemies:
            raise ValueError("enemies and start must occupy distinct cells")
        if self.agent_hp <= 0 or self.enemy_hp <= 0:
            raise ValueError("hitpoints must be > 0")
        if self.damage <= 0 or self.enemy_damage < 0:
            raise ValueError("damage must be > 0 and enemy damage >= 0")
        if self.theta_e < 0 or self.attack_range < 0:
            raise ValueError("distances must be >= 0")

    @property
    def enemy_count(self) -> int:
        return len(self.enemies)

    @property
    def action_count(self) -> int:
        return 1 + 2 * self.enemy_count

    def on_grid(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def initial_state(self) -> CombatState:
        return CombatState(self.start[0], self.start[1], self.agent_hp, (self.enemy_hp,) * self.enemy_count)

    def check(self, state: CombatState) -> None:
        if not self.on_grid(state.x, state.y):
            raise ValueError(f"{state!r} is off the grid")
        if not 0 <= state.hp <= self.agent_hp or len(state.enemy_hp) != self.enemy_count:
            raise ValueError(f"{state!r} has invalid hitpoints")
        if any(not 0 <= hp <= self.enemy_hp for hp in state.enemy_hp):
            raise ValueError(f"{state!r} has invalid enemy hitpoints")


def manhattan(ax: int, ay: int, bx: int, by: int) -> int:
    return abs(ax - bx) + abs(ay - by)


def _step_toward(x: int, y: int, tx: int, ty: int) -> tuple[int, int] | None:
    """One cell closer to ``(tx, ty)``, closing the x gap first; ``None`` when already there."""
    if x != tx:
        return x + (1 if tx > x else -1), y
    if y != ty:
        return x, y + (1 if ty > y else -1)
    return None


def combat_step(
    spec: CombatSpec, state: CombatState, action: int, rng: np.random.Generator
) -> tuple[CombatState, float, bool]:
    spec.check(state)
    if not 0 <= action < spec.action_count:
        raise ValueError(f"combat action must be in 0..{spec.action_count - 1}, got {action!r}")
    E = spec.enemy_count
    x, y = state.x, state.y
    enemy_hp = list(state.enemy_hp)
    extra = 0.0

    if action <= E:
        target = spec.enemies[action] if action < E else spec.start
        moved = _step_toward(x, y, *target)
        blocked = moved is None or not spec.on_grid(*moved) or any(
            moved == where and hp > 0 for where, hp in zip(spec.enemies, enemy_hp)
        )
        if blocked:
            extra += COMBAT_WALL.sample(rng)
        else:
            x, y = moved
    else:
        i = action - E - 1
        ex, ey = spec.enemies[i]
        if enemy_hp[i] == 0 or manhattan(x, y, ex, ey) > spec.theta_e:
            extra += COMBAT_BAD_SHOT.sample(rng)
        else:
            enemy_hp[i] = max(0, enemy_hp[i] - spec.damage)

    hp = state.hp
    for (ex, ey), alive in zip(spec.enemies, enemy_hp):
        if alive > 0 and manhattan(x, y, ex, ey) <= spec.attack_range:
            hp = max(0, hp - spec.enemy_damage)

    won = all(h == 0 for h in enemy_hp)
    if won:
        extra += COMBAT_GOAL.sample(rng)
    dealt = sum(state.enemy_hp) - sum(enemy_hp)
    taken = state.hp - hp
    reward = HITPOINT_WEIGHT * (dealt - taken) + extra - STEP_COST
    return CombatState(x, y, hp, tuple(enemy_hp)), reward, won or hp == 0


def combat_subspaces(spec: CombatSpec) -> list[Subspace]:
    spaces = [
        Subspace("XY", lambda s: s.y * spec.width + s.x, size=spec.width * spec.height),
        Subspace("HP", lambda s: s.hp, size=spec.agent_hp + 1),
    ]
    max_distance = spec.width + spec.height - 1
    for i, (ex, ey) in enumerate(spec.enemies, start=1):
        spaces.append(Subspace(f"dist{i}", lambda s, ex=ex, ey=ey: manhattan(s.x, s.y, ex, ey), size=max_distance))
    return spaces


def combat_state_id(spec: CombatSpec, state: CombatState) -> int:
    """Mixed-radix index over ``(x, y, hp, enemy hp...)``."""
    index = state.y * spec.width + state.x
    index = index * (spec.agent_hp + 1) + state.hp
    for hp in state.enemy_hp:
        index = index * (spec.enemy_hp + 1) + hp
    return index


class CombatEnvironment(Environment):
    def __init__(self, spec: CombatSpec) -> None:
        self.spec = spec

    @property
    def action_count(self) -> int:
        return self.spec.action_count

    @property
    def reward_range(self) -> tuple[float, float]:
        s = self.spec
        worst = -HITPOINT_WEIGHT * s.enemy_count * s.enemy_damage + min(COMBAT_BAD_SHOT.low, COMBAT_WALL.low)
        best = HITPOINT_WEIGHT * s.damage + COMBAT_GOAL.high
        return worst - STEP_COST, best - STEP_COST

    def reset(self, rng: np.random.Generator) -> CombatState:
        return self.spec.initial_state()

    def step(self, state: CombatState, action: int, rng: np.random.Generator) -> tuple[CombatState, float, bool]:
        return combat_step(self.spec, state, action, rng)

    def spaces(self) -> list[Subspace]:
        s = self.spec
        size = s.width * s.height * (s.agent_hp + 1) * math.prod([s.enemy_hp + 1] * s.enemy_count)
        main = Subspace("main", lambda state: combat_state_id(s, state), size=size)
        return [main, *combat_subspaces(s)]
