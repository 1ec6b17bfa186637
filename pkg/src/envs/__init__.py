from .base import Environment, Subspace
from .combat_environment import CombatEnvironment, CombatSpec, CombatState, combat_step, combat_subspaces
from .continuous_maze import (
    AgentBody,
    StepOutcome,
    World,
    WorldConfig,
    cont_spaces,
    cont_step,
    cont_subspaces,
    multi_agent_tick,
    sense,
    sense_point,
)
from .maze_environment import MazeEnvironment, MazeSpec, MazeState, greedy_policy, maze_step, maze_subspaces, optimal_q
from .rewards import TruncatedMixture

__all__ = [
    "Environment",
    "Subspace",
    "CombatEnvironment",
    "CombatSpec",
    "CombatState",
    "combat_step",
    "combat_subspaces",
    "AgentBody",
    "StepOutcome",
    "World",
    "WorldConfig",
    "cont_spaces",
    "cont_step",
    "cont_subspaces",
    "multi_agent_tick",
    "sense",
    "sense_point",
    "MazeEnvironment",
    "MazeSpec",
    "MazeState",
    "greedy_policy",
    "maze_step",
    "maze_subspaces",
    "optimal_q",
    "TruncatedMixture",
]
