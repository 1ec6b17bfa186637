from .behavioral import epsilon_greedy, epsilon_greedy_policy, sample_action
from .belief import (
    ActionPolicy,
    GaussianBelief,
    ci_to_gaussian,
    draw_thompson_noise,
    floor_policy,
    thompson_from_beliefs,
    thompson_from_draws,
    thompson_from_dropout,
)
from .free_energy import FeParams, FreeEnergyEval, evaluate, evaluate_ts_behavioral, select_space, tilted_utility, utility

__all__ = [
    "ActionPolicy",
    "GaussianBelief",
    "FeParams",
    "FreeEnergyEval",
    "ci_to_gaussian",
    "draw_thompson_noise",
    "thompson_from_beliefs",
    "thompson_from_draws",
    "thompson_from_dropout",
    "floor_policy",
    "utility",
    "tilted_utility",
    "evaluate",
    "evaluate_ts_behavioral",
    "select_space",
    "epsilon_greedy",
    "epsilon_greedy_policy",
    "sample_action",
]
