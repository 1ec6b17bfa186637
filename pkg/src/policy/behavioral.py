from __future__ import annotations

import numpy as np

from .belief import ActionPolicy


def epsilon_greedy_policy(q_values: np.ndarray, epsilon: float) -> ActionPolicy:
    """``1 - eps + eps/|A|`` on the greedy action (lowest index on ties), ``eps/|A|`` elsewhere."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be between 0.0 and 1.0, got {epsilon!r}")
    q_values = np.asarray(q_values, dtype=np.float64)
    probs = np.full(q_values.size, epsilon / q_values.size)
    probs[int(np.argmax(q_values))] += 1.0 - epsilon
    return ActionPolicy(probs)


def epsilon_greedy(q_values: np.ndarray, epsilon: float, rng: np.random.Generator) -> tuple[ActionPolicy, int]:
    policy = epsilon_greedy_policy(q_values, epsilon)
    return policy, sample_action(policy, rng)


def sample_action(policy: ActionPolicy, rng: np.random.Generator) -> int:
    return int(rng.choice(len(policy), p=policy.probs))
