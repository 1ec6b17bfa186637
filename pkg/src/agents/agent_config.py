from __future__ import annotations

from dataclasses import dataclass

from policy import FeParams

LEARNER_FAMILIES = ("MB", "MF", "TS")


@dataclass(frozen=True)
class MethodSpec:
    """What a method tag switches on.

    ``learner``: MB (model-based table), MF (model-free table) or TS
    (dropout Q-network). ``fets``: whether subspaces compete for the
    decision. ``acting``: ``B`` samples the behavioural policy, ``FE`` the
    free-energy optimal policy.
    """

    tag: str
    learner: str
    fets: bool
    acting: str


def _method_table() -> dict[str, MethodSpec]:
    table: dict[str, MethodSpec] = {}
    for learner in LEARNER_FAMILIES:
        table[learner] = MethodSpec(learner, learner, fets=False, acting="B")
        table[f"{learner}-FE"] = MethodSpec(f"{learner}-FE", learner, fets=False, acting="FE")
        for acting in ("B", "FE"):
            tag = f"{learner}-FETS-{acting}"
            table[tag] = MethodSpec(tag, learner, fets=True, acting=acting)
    return table


METHODS = _method_table()


def method_spec(tag: str) -> MethodSpec:
    try:
        return METHODS[tag]
    except KeyError:
        raise ValueError(f"unknown method {tag!r}; expected one of {sorted(METHODS)}") from None


@dataclass(frozen=True)
class AgentConfig:
    method: str = "MB-FETS-FE"
    alpha: float = 4.0
    beta: float = 7.0
    gamma: float = 0.95
    epsilon: float = 0.1
    epsilon_decay_episodes: int = 0
    epsilon_min: float = 0.0
    eta: float = 0.1
    lam: float = 0.8
    nu: float = 0.05
    delta: float = 0.05
    xi: float = 1e-4
    thompson_samples: int = 4096
    dropout_passes: int = 100
    dropout_rate: float = 0.1
    main_hidden: int = 50
    sub_hidden: int = 15
    learning_rate: float = 1e-3
    replay_capacity: int = 10_000
    batch_size: int = 32
    warmup: int = 500
    bounds_refresh: str = "episode"
    shared_replay: bool = False
    dense_state_limit: int = 1000

    def __post_init__(self) -> None:
        method_spec(self.method)
        FeParams(self.alpha, self.beta)
        if not 0.0 <= self.epsilon <= 1.0 or not 0.0 <= self.epsilon_min <= 1.0:
            raise ValueError(f"epsilon values must lie in [0, 1], got {self.epsilon!r} / {self.epsilon_min!r}")

    @property
    def spec(self) -> MethodSpec:
        return method_spec(self.method)

    @property
    def fe_params(self) -> FeParams:
        return FeParams(self.alpha, self.beta)

    def epsilon_at(self, episode: int) -> float:
        """Linear decay from ``epsilon`` to ``epsilon_min`` over ``epsilon_decay_episodes``; constant when 0."""
        if self.epsilon_decay_episodes <= 0:
            return self.epsilon
        progress = min(1.0, episode / self.epsilon_decay_episodes)
        return self.epsilon + (self.epsilon_min - self.epsilon) * progress
