from __future__ import annotations


class InsufficientDataError(ValueError):
    """Raised when a statistic needs more samples than are available."""


class ConvergenceError(RuntimeError):
    """Raised when value iteration does not reach its tolerance in time."""

    def __init__(self, residual: float, iterations: int) -> None:
        super().__init__(f"value iteration did not converge after {iterations} iterations (residual={residual:.3e})")
        self.residual = residual
        self.iterations = iterations


class LearnerStateError(RuntimeError):
    """Raised when a learner is asked for beliefs before they exist."""


class ConfigError(ValueError):
    """Raised for unreadable or invalid run configurations.

    Args:
        problems: ``(field_path, message)`` pairs, one per failing field.
    """

    def __init__(self, problems: list[tuple[str, str]]) -> None:
        self.problems = problems
        lines = [f"{path}: {message}" for path, message in problems]
        super().__init__("invalid configuration\n  " + "\n  ".join(lines))
