"""Concurrent learning over the main space and its subspaces.

Each decision: every active space turns its beliefs into a floored Thompson
policy, the free energy of each space is evaluated against the main space,
the space with the lowest free energy is selected (ties go to main) and the
action is drawn from that space's behavioural or free-energy optimal policy.
Every space then learns from the transition, projected into its own states.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from envs import Subspace
from exceptions import LearnerStateError
from learners import NetworkLearner
from policy import (
    ActionPolicy,
    FreeEnergyEval,
    draw_thompson_noise,
    epsilon_greedy_policy,
    evaluate,
    evaluate_ts_behavioral,
    floor_policy,
    sample_action,
    select_space,
)

from .agent_config import AgentConfig
from .space_model import SpaceModel, build_space_models

logger = logging.getLogger(__name__)

MAIN_INDEX = 0


@dataclass(frozen=True)
class Decision:
    action: int
    selected: int
    free_energies: tuple[float, ...]
    policy: ActionPolicy


@dataclass(frozen=True)
class EpisodeDiagnostics:
    """Per-space mean free energy over the episode's decisions and selection fractions."""

    space_names: tuple[str, ...]
    mean_free_energy: tuple[float, ...]
    selection_fraction: tuple[float, ...]
    steps: int


class FetsAgent:
    def __init__(
        self,
        config: AgentConfig,
        spaces: Sequence[Subspace],
        action_count: int,
        reward_span: float,
        seed: int | np.random.SeedSequence,
        observation_size: int | None = None,
    ) -> None:
        self.config = config
        self.action_count = action_count
        sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        act_stream, learner_stream = sequence.spawn(2)
        self.rng = np.random.default_rng(act_stream)
        self.models, self.shared_buffer = build_space_models(
            config, spaces, action_count, reward_span, learner_stream, observation_size
        )
        self.episode: int | None = None
        self.epsilon = config.epsilon
        self._energy_sums = np.zeros(len(self.models))
        self._selections = np.zeros(len(self.models), dtype=np.int64)
        self._steps = 0

    @property
    def space_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.models)

    def start_episode(self, episode: int) -> None:
        self.episode = episode
        self.epsilon = self.config.epsilon_at(episode)
        self._energy_sums[:] = 0.0
        self._selections[:] = 0
        self._steps = 0

    def _thompson_policies(self, projected: list[Any]) -> list[ActionPolicy]:
        noise = None
        if self.config.spec.learner != "TS":
            # one draw shared by every tabular space
            noise = draw_thompson_noise(self.rng, self.config.thompson_samples, self.action_count)
        return [
            floor_policy(m.learner.thompson_policy(s, self.rng, noise), self.config.xi)
            for m, s in zip(self.models, projected)
        ]

    def _behavioural(self, model: SpaceModel, state: Any, pi_ts: ActionPolicy) -> ActionPolicy:
        if self.config.spec.learner == "TS":
            return pi_ts
        return epsilon_greedy_policy(model.learner.action_values(state), self.epsilon)

    def act(self, state: Any) -> Decision:
        if self.episode is None:
            raise LearnerStateError("start_episode must be called before act")
        spec = self.config.spec
        projected = [m.project(state) for m in self.models]
        pi_ts = self._thompson_policies(projected)
        main_ts = pi_ts[MAIN_INDEX]

        behavioural: list[ActionPolicy] = []
        evals: list[FreeEnergyEval] = []
        for model, s, ts in zip(self.models, projected, pi_ts):
            pi_b = self._behavioural(model, s, ts)
            behavioural.append(pi_b)
            if spec.learner == "TS":
                evals.append(evaluate_ts_behavioral(ts, main_ts, self.config.alpha))
            else:
                evals.append(evaluate(ts, main_ts, pi_b, self.config.fe_params))

        selected = select_space(evals, MAIN_INDEX) if spec.fets else MAIN_INDEX
        policy = evals[selected].policy if spec.acting == "FE" else behavioural[selected]
        action = sample_action(policy, self.rng)

        energies = tuple(e.free_energy for e in evals)
        self._energy_sums += energies
        self._selections[selected] += 1
        self._steps += 1
        return Decision(action, selected, energies, policy)

    def observe(self, state: Any, action: int, reward: float, next_state: Any, terminal: bool) -> None:
        if self.shared_buffer is not None:
            self.shared_buffer.push(state, action, reward, next_state, terminal)
        for model in self.models:
            model.learner.observe(model.project(state), action, reward, model.project(next_state), terminal)

    def end_episode(self, truncated: bool = False) -> EpisodeDiagnostics:
        for model in self.models:
            model.learner.end_episode(truncated)
        return self.diagnostics()

    def diagnostics(self) -> EpisodeDiagnostics:
        """Averages over the decisions since the last ``start_episode``."""
        steps = max(self._steps, 1)
        return EpisodeDiagnostics(
            space_names=self.space_names,
            mean_free_energy=tuple(float(x) for x in self._energy_sums / steps),
            selection_fraction=tuple(float(x) for x in self._selections / steps),
            steps=self._steps,
        )

    def reset_diagnostics(self) -> None:
        self._energy_sums[:] = 0.0
        self._selections[:] = 0
        self._steps = 0

    def networks(self) -> dict[str, Any]:
        return {m.name: m.learner.net for m in self.models if isinstance(m.learner, NetworkLearner)}
