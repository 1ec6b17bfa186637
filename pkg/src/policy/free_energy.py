"""Free-energy evaluation of one space and the argmin selection across spaces.

Each space's utility is the log of its Thompson policy. The utility is tilted
toward the main space's by ``beta``; the optimal policy is the behavioural
policy reweighted by ``exp(alpha * tilted utility)``. At the optimum the
free energy equals ``-(1/alpha) * log Z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .belief import ActionPolicy

IDENTITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FeParams:
    """``alpha``: inverse temperature toward the behavioural policy; ``beta``: generalisation weight."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha!r}")
        if not (math.isfinite(self.beta) and self.beta >= 1):
            raise ValueError(f"beta must be finite and >= 1, got {self.beta!r}")


@dataclass(frozen=True, eq=False)
class FreeEnergyEval:
    policy: ActionPolicy
    partition: float
    free_energy: float


def utility(pi_ts: ActionPolicy) -> np.ndarray:
    """Negative surprise about optimality: ``log pi_ts(a)``."""
    if np.any(pi_ts.probs <= 0):
        raise ValueError("utility needs a floored Thompson policy (zero probability found)")
    return np.log(pi_ts.probs)


def tilted_utility(u_sub: np.ndarray, u_main: np.ndarray, beta: float) -> np.ndarray:
    u_sub = np.asarray(u_sub, dtype=np.float64)
    u_main = np.asarray(u_main, dtype=np.float64)
    if u_sub.shape != u_main.shape:
        raise ValueError(f"utility vectors differ in length: {u_sub.shape} vs {u_main.shape}")
    if not beta >= 1:
        raise ValueError(f"beta must be >= 1, got {beta!r}")
    return u_sub - (u_sub - u_main) / beta


def _check_policies(*policies: ActionPolicy) -> None:
    sizes = {len(p) for p in policies}
    if len(sizes) != 1:
        raise ValueError(f"policies cover different action counts: {sorted(sizes)}")


def _log(probs: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(probs)


def _optimum(log_weights: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Optimal policy, its logs, and ``log Z`` of the tilted weights (log-space, max-subtracted)."""
    log_z = float(logsumexp(log_weights))
    log_opt = log_weights - log_z
    return np.exp(log_opt), log_opt, log_z


def _expect(probs: np.ndarray, terms: np.ndarray) -> float:
    """``sum_a probs * terms`` skipping zero-probability actions."""
    support = probs > 0
    return float(np.sum(probs[support] * terms[support]))


def _confirm(explicit: float, log_z: float, alpha: float) -> float:
    closed_form = -log_z / alpha
    if abs(explicit - closed_form) > IDENTITY_TOLERANCE:
        raise AssertionError(f"free energy {explicit!r} disagrees with -(1/alpha) log Z = {closed_form!r}")
    return closed_form


def evaluate(pi_ts_sub: ActionPolicy, pi_ts_main: ActionPolicy, pi_b: ActionPolicy, params: FeParams) -> FreeEnergyEval:
    """Optimal policy, partition value and free energy of one space in one state."""
    _check_policies(pi_ts_sub, pi_ts_main, pi_b)
    u_tilde = tilted_utility(utility(pi_ts_sub), utility(pi_ts_main), params.beta)
    log_b = _log(pi_b.probs)
    probs, log_opt, log_z = _optimum(log_b + params.alpha * u_tilde)

    explicit = _expect(probs, (log_opt - log_b) / params.alpha - u_tilde)
    free_energy = _confirm(explicit, log_z, params.alpha)
    return FreeEnergyEval(policy=ActionPolicy.from_weights(probs), partition=math.exp(log_z), free_energy=free_energy)


def evaluate_ts_behavioral(pi_ts_sub: ActionPolicy, pi_ts_main: ActionPolicy, alpha: float) -> FreeEnergyEval:
    """Free energy when the behavioural policy is the space's own Thompson policy and alpha = beta.

    Minimises ``E_pi[-log pi_ts_sub] + (1/alpha) KL(pi || pi_ts_main)``: the
    expected utility of the space, kept close to the main space's policy.
    """
    if not (math.isfinite(alpha) and alpha > 0):
        raise ValueError(f"alpha must be finite and > 0, got {alpha!r}")
    _check_policies(pi_ts_sub, pi_ts_main)
    u_sub = utility(pi_ts_sub)
    log_main = utility(pi_ts_main)
    probs, log_opt, log_z = _optimum(log_main + alpha * u_sub)

    explicit = _expect(probs, -u_sub + (log_opt - log_main) / alpha)
    free_energy = _confirm(explicit, log_z, alpha)
    return FreeEnergyEval(policy=ActionPolicy.from_weights(probs), partition=math.exp(log_z), free_energy=free_energy)


def select_space(evals: Sequence[FreeEnergyEval], main_index: int) -> int:
    """Index of the space with minimal free energy; ties go to the main space, then the lowest index."""
    if not evals:
        raise ValueError("need at least one space to select from")
    if not 0 <= main_index < len(evals):
        raise ValueError(f"main_index {main_index} out of range for {len(evals)} spaces")
    energies = [e.free_energy for e in evals]
    lowest = min(energies)
    if energies[main_index] == lowest:
        return main_index
    return energies.index(lowest)
