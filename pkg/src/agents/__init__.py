from .agent_config import METHODS, AgentConfig, MethodSpec, method_spec
from .fets_agent import Decision, EpisodeDiagnostics, FetsAgent
from .space_model import SpaceModel, build_space_models

__all__ = [
    "METHODS",
    "AgentConfig",
    "MethodSpec",
    "method_spec",
    "Decision",
    "EpisodeDiagnostics",
    "FetsAgent",
    "SpaceModel",
    "build_space_models",
]
