from .base import Learner, StateRegistry
from .model_based_learner import (
    MdpEstimate,
    ModelBasedLearner,
    ModelBasedSettings,
    QBounds,
    extended_vi,
    inner_max_l1,
    mb_belief,
    radii,
    solve_q,
    transition_estimate,
    update_model,
)
from .model_free_learner import (
    ModelFreeLearner,
    ModelFreeSettings,
    QTable,
    ReturnStats,
    ReturnSummary,
    mf_interval,
    q_update,
    record_returns,
    sample_std,
    t_quantile,
    z_quantile,
)
from .network_learner import NetworkLearner, NetworkSettings
from .qnet import (
    Batch,
    Mlp,
    ReplayBuffer,
    dropout_ts,
    forward,
    load_checkpoint,
    loss_and_gradients,
    q_targets,
    save_checkpoint,
    train_step,
)

__all__ = [
    "Learner",
    "StateRegistry",
    "MdpEstimate",
    "ModelBasedLearner",
    "ModelBasedSettings",
    "QBounds",
    "extended_vi",
    "inner_max_l1",
    "mb_belief",
    "radii",
    "solve_q",
    "transition_estimate",
    "update_model",
    "ModelFreeLearner",
    "ModelFreeSettings",
    "QTable",
    "ReturnStats",
    "ReturnSummary",
    "mf_interval",
    "q_update",
    "record_returns",
    "sample_std",
    "t_quantile",
    "z_quantile",
    "NetworkLearner",
    "NetworkSettings",
    "Batch",
    "Mlp",
    "ReplayBuffer",
    "dropout_ts",
    "forward",
    "load_checkpoint",
    "loss_and_gradients",
    "q_targets",
    "save_checkpoint",
    "train_step",
]
