from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from envs import Subspace
from learners import (
    Learner,
    ModelBasedLearner,
    ModelBasedSettings,
    ModelFreeLearner,
    ModelFreeSettings,
    Mlp,
    NetworkLearner,
    NetworkSettings,
    ReplayBuffer,
)

from .agent_config import AgentConfig


@dataclass
class SpaceModel:
    """One learnable model: a state transform plus the learner that sees its output."""

    subspace: Subspace
    learner: Learner
    is_main: bool = False

    @property
    def name(self) -> str:
        return self.subspace.name

    def project(self, state: Any) -> Any:
        return self.subspace.project(state)


def _tabular_learner(config: AgentConfig, subspace: Subspace, action_count: int, reward_span: float) -> Learner:
    if config.spec.learner == "MF":
        settings = ModelFreeSettings(
            gamma=config.gamma,
            eta=config.eta,
            lam=config.lam,
            nu=config.nu,
            reward_span=reward_span,
            sample_count=config.thompson_samples,
            dense_limit=config.dense_state_limit,
        )
        return ModelFreeLearner(action_count, subspace.size, settings)
    settings = ModelBasedSettings(
        gamma=config.gamma,
        delta=config.delta,
        reward_span=reward_span,
        refresh=config.bounds_refresh,
        sample_count=config.thompson_samples,
        dense_limit=config.dense_state_limit,
    )
    return ModelBasedLearner(action_count, subspace.size, settings)


def _network_learner(
    config: AgentConfig,
    subspace: Subspace,
    is_main: bool,
    action_count: int,
    observation_size: int,
    rng: np.random.Generator,
    shared_buffer: ReplayBuffer | None,
) -> Learner:
    inputs = observation_size if subspace.columns is None else subspace.columns.size
    hidden = config.main_hidden if is_main else config.sub_hidden
    net = Mlp.initialise([inputs, hidden, hidden, action_count], config.dropout_rate, rng)
    settings = NetworkSettings(
        gamma=config.gamma,
        learning_rate=config.learning_rate,
        batch_size=config.batch_size,
        warmup=config.warmup,
        replay_capacity=config.replay_capacity,
        dropout_passes=config.dropout_passes,
    )
    return NetworkLearner(net, settings, rng, shared_buffer=shared_buffer, columns=subspace.columns)


def build_space_models(
    config: AgentConfig,
    spaces: Sequence[Subspace],
    action_count: int,
    reward_span: float,
    seed: np.random.SeedSequence,
    observation_size: int | None = None,
) -> tuple[list[SpaceModel], ReplayBuffer | None]:
    """Space models for ``config.method``: the main space only unless the method uses FETS.

    Returns the shared replay buffer as well when networks share one.
    """
    if not spaces:
        raise ValueError("need at least the main space")
    active = list(spaces) if config.spec.fets else [spaces[0]]
    shared: ReplayBuffer | None = None
    if config.spec.learner == "TS":
        if observation_size is None:
            raise ValueError("network learners need the observation size")
        if config.shared_replay:
            shared = ReplayBuffer(config.replay_capacity, observation_size)
    streams = seed.spawn(len(active))

    models = []
    for index, (subspace, stream) in enumerate(zip(active, streams)):
        is_main = index == 0
        if config.spec.learner == "TS":
            learner = _network_learner(
                config, subspace, is_main, action_count, observation_size, np.random.default_rng(stream), shared
            )
        else:
            if not subspace.tabular:
                raise ValueError(f"space {subspace.name!r} has no finite size for a tabular learner")
            learner = _tabular_learner(config, subspace, action_count, reward_span)
        models.append(SpaceModel(subspace, learner, is_main=is_main))
    return models, shared
